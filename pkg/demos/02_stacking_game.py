#!/usr/bin/env python3
"""Play the stacking game by hand and watch its invariants hold.

The state is a sorted piecewise-constant function on (-1/2, 1/2] starting at
zero. A move raises a measure-|A| set by a and lowers a measure-|B| set by b
(|A|+|B| = 1/k, A left of B, the raised and lowered mass cancel), then the
values are re-sorted. However the mover plays, the suffix integral stays
under k/2 - 2k*x^2, which caps the maximum value at 2k.
"""
import random
from fractions import Fraction as F

from fairdiv import (
    BoundProfile,
    StackingFunction,
    StackingOperation,
    apply_operation,
    check_bound,
    contiguify,
    integral_F,
)

H = F(1, 2)

# The most aggressive single move at k=1: raise the left half, drop the right.
f = StackingFunction.zero()
op = StackingOperation.make(1, 1, [(-H, 0)], [(0, H)], k=1)
f = apply_operation(f, op)
print("after the full swing:", [(str(l), str(r), str(v)) for l, r, v in f.pieces])
print("F(0) =", integral_F(f, F(0)), " bound at 0 =", BoundProfile(k=1).bound_at(F(0)))
print("bound report:", check_bound(f, BoundProfile(k=1)))

# Fragmented moves never help: the contiguified move dominates pointwise.
op2 = StackingOperation.make(
    1, 1, [(F(-1, 8), 0), (F(1, 8), F(1, 4))], [(F(1, 4), H)], k=2
)
print("\nfragmented move  A =", [(str(l), str(r)) for l, r in op2.A])
tidy = contiguify(op2)
print("contiguified     A =", [(str(l), str(r)) for l, r in tidy.A],
      " B =", [(str(l), str(r)) for l, r in tidy.B])
g_plain = apply_operation(f, op2)
g_tidy = apply_operation(f, tidy)
dominated = all(
    integral_F(g_tidy, x) >= integral_F(g_plain, x)
    for x in set(g_plain.breakpoints()) | set(g_tidy.breakpoints())
)
print("contiguified move dominates pointwise:", dominated)

# A short random-play session at k=2: the bound never budges.
rng = random.Random(7)
f = StackingFunction.zero()
for step in range(60):
    q = 8
    ca = rng.randint(1, 3)
    cb = 4 - ca
    t = F(1, max(ca, cb) * rng.choice([1, 2, 4]))
    cells = sorted(rng.sample(range(q), 4))
    ivs = lambda cs: [(-H + F(c, q), -H + F(c + 1, q)) for c in cs]
    f = apply_operation(
        f, StackingOperation.make(cb * t, ca * t, ivs(cells[:ca]), ivs(cells[ca:]), k=2)
    )
    assert integral_F(f, -H) == 0
    assert check_bound(f, BoundProfile(k=2)).passed
print("\n60 random moves at k=2: integral stayed 0, max value", f.max_value(), "<= 4")
