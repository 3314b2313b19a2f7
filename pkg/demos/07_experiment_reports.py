#!/usr/bin/env python3
"""Generate instances, run the policy suite, and read the exact reports.

Reports carry per-agent realized disutility and the ratio to the MMS: exact
when the search oracle is feasible, a certified interval otherwise. Bound
checks (trace invariants, stacking consistency, the 8k+2 / n / 2+sqrt(3)
caps) come back as named flags; CSV rows carry exact rationals next to
20-digit decimal renderings.
"""
from fractions import Fraction as F

from fairdiv import GeneratorConfig, generate_instance
from fairdiv.harness import run_batch

instances = [
    generate_instance(GeneratorConfig(n=3, m=10, k=2, D=F(4), value_grid="powers-of-two", seed=s))
    for s in (1, 2)
] + [
    generate_instance(GeneratorConfig(n=3, m=24, k=3, D=F(8), value_grid="uniform-rational", seed=3))
]

for report in run_batch(instances):
    print(f"instance {report.digest[:12]} (n={report.n}, m={report.m}): "
          f"{'all checks pass' if report.passed else 'CHECK FAILED'}")
    for run in report.runs:
        kinds = {a.ratio_kind for a in run.agents}
        if kinds == {"exact"}:
            worst = max(a.ratio for a in run.agents)
            summary = f"worst ratio {worst}"
        else:
            summary = "ratios " + ", ".join(
                f"[{a.ratio_low}, {a.ratio_high}]" for a in run.agents
            )
        flags = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in run.checks.items())
        print(f"    {run.policy:16s} {summary}  {flags}")
    print()

print("CSV head:")
print("\n".join(run_batch(instances[:1])[0].to_csv().splitlines()[:5]))
