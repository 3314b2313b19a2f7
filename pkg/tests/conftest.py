"""Shared test helpers: independent brute-force oracles and generators."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from fairdiv import Instance


def brute_force_mms(values, n: int) -> Fraction:
    """Min over ALL n^m assignments of the max bundle sum.

    Deliberately independent of the branch-and-bound search: plain
    enumeration, usable for m up to ~9.
    """
    values = [Fraction(v) for v in values]
    best = None
    for assignment in product(range(n), repeat=len(values)):
        loads = [Fraction(0)] * n
        for v, b in zip(values, assignment):
            loads[b] += v
        worst = max(loads)
        if best is None or worst < best:
            best = worst
    return best


def random_rational(rng: random.Random, max_num: int = 64, max_den: int = 16) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def random_instance(rng: random.Random, n: int, m: int, k: int) -> Instance:
    """Uniform k-valued instance without the generator module (independent)."""
    items = []
    value_sets = []
    for _ in range(n):
        vals = set()
        while len(vals) < k:
            vals.add(random_rational(rng))
        value_sets.append(sorted(vals))
    for j in range(m):
        items.append(tuple(value_sets[i][rng.randrange(k)] for i in range(n)))
    return Instance(n=n, items=tuple(items))


class OracleRec3:
    """Independent transcription of the three-agent recursive emission rules.

    Kept deliberately separate from the adversary module: flat state, no
    recursion, used to cross-check every emitted value and the clean-up
    scaling identity.
    """

    def __init__(self, eps, pin_horizon: int):
        eps = Fraction(eps)
        self.eps_sub = eps / 3       # top-level clean-up parameter
        self.eps3 = eps / 18         # top own-agent parameter: eps / (n*(n+3))
        self.eps2L = eps / 3         # the level-2 game runs at eps/n
        self.eps_sub2 = self.eps2L / 3
        self.eps2 = self.eps2L / 18
        self.pin = pin_horizon
        self.r = 0
        self.top_sums = [Fraction(0)] * 3
        self.top_scale = [Fraction(1), Fraction(1)]
        self.d3_emitted = Fraction(0)
        self.V3 = None
        self.last3 = None
        self._u3 = [Fraction(1)]
        self._u3_sum = Fraction(1)
        self._u2 = [Fraction(1)]
        self._u2_sum = Fraction(1)
        self.pending = None
        self.l2_pending = None
        self._reset_l2()

    def _reset_l2(self):
        self.l2_r = 0
        self.l2_sums = [Fraction(0), Fraction(0)]
        self.l2_scale1 = Fraction(1)
        self.d2_emitted = Fraction(0)
        self.V2 = None
        self.last2 = None

    def _u(self, seq, total, eps_own, t):
        while len(seq) < t:
            nxt = total[0] / eps_own + 1
            seq.append(nxt)
            total[0] += nxt
        return seq[t - 1]

    def _a2(self, s):
        total = [self._u2_sum]
        u_s = self._u(self._u2, total, self.eps2, max(s, 4))
        self._u2_sum = total[0]
        return self._u2[s - 1] * self.V2 / self._u2[3]  # pinned: a_4 = V2

    def _a3(self, s):
        total = [self._u3_sum]
        self._u(self._u3, total, self.eps3, max(s, self.pin + 1))
        self._u3_sum = total[0]
        return self._u3[s - 1] * self.V3 / self._u3[self.pin]  # a_{pin+1} = V3

    def next(self):
        self.r += 1
        self.l2_r += 1
        d1_l2 = self.l2_scale1  # constant-1 base stream, rescaled by clean-ups
        if self.V2 is None:
            d2_l2 = Fraction(1) if self.l2_r == 1 else self.d2_emitted / self.eps2
        else:
            d2_l2 = self._a2(self.l2_r - self.last2)
        self.d2_emitted += d2_l2
        d1 = d1_l2 * self.top_scale[0]
        d2 = d2_l2 * self.top_scale[1]
        if self.V3 is None:
            d3 = Fraction(1) if self.r == 1 else self.d3_emitted / self.eps3
        else:
            d3 = self._a3(self.r - self.last3)
        self.d3_emitted += d3
        self.pending = (d1, d2, d3)
        self.l2_pending = (d1_l2, d2_l2)
        return self.pending

    def observe(self, agent: int):
        d = self.pending
        for i in range(3):
            self.top_sums[i] += d[i]
        if agent == 3:
            if self.V3 is None:
                self.V3 = d[2]
            self.last3 = self.r
            self.top_scale = [self.top_sums[0] / self.eps_sub, self.top_sums[1] / self.eps_sub]
            self._reset_l2()
            return
        self.l2_sums[0] += self.l2_pending[0]
        self.l2_sums[1] += self.l2_pending[1]
        if agent == 2:
            if self.V2 is None:
                self.V2 = self.l2_pending[1]
            self.last2 = self.l2_r
            self.l2_scale1 = self.l2_sums[0] / self.eps_sub2
