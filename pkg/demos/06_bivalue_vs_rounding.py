#!/usr/bin/env python3
"""When merging two close values beats power-of-two rounding.

With at most two distinct values per agent, the specialized rule merges them
into one type whenever the smaller-to-larger ratio exceeds (sqrt(3)-1)/2 and
skips rounding entirely; that keeps the allocation within (2+sqrt(3))*MMS.
Plain rounding can keep such a pair as two separate types and pay for it.
"""
from fractions import Fraction as F

from fairdiv import GeneratorConfig, generate_instance, leq_two_plus_sqrt3, mms_exact, run_online
from fairdiv.allocator import BiValuePolicy, PressureGreedyPolicy

cfg = GeneratorConfig(n=3, m=12, k=2, D=F(4), value_grid="adversarial-near-threshold", seed=1)
inst = generate_instance(cfg)
print("agent value pairs:",
      [sorted(set(map(str, inst.agent_values(i)))) for i in range(1, 4)])

plain, _ = run_online(inst, PressureGreedyPolicy())
policy = BiValuePolicy()
merged, _ = run_online(inst, policy)

for label, alloc in [("power-of-two rounding", plain), ("bi-value merging", merged)]:
    ratios = []
    for i in range(1, 4):
        mms = mms_exact(inst.agent_values(i), 3)[0]
        ratios.append(alloc.bundle_disutility(inst, i) / mms)
    print(f"{label:22s} per-agent ratios {[str(r) for r in ratios]}  worst {max(ratios)}")

print("\nbi-value guarantees, checked exactly (no floating point):")
for i in range(1, 4):
    mms = mms_exact(inst.agent_values(i), 3)[0]
    ok = leq_two_plus_sqrt3(merged.bundle_disutility(inst, i), mms)
    print(f"  agent {i}: d(A) <= (2+sqrt(3))*MMS  ->  {ok}")
print(f"  max pressure {policy.max_pressure_seen()} <= 2 + 1/(n-1) = {2 + F(1, 2)}")
