"""Online allocation policies behind a single streaming interface.

The central policy is greedy-over-pressure: each agent keeps one pressure
counter per distinct (power-of-two-rounded) disutility value it has seen; an
arriving item goes to the agent whose pressure for the item's type is lowest
(ties to the lowest agent index), after which the receiver's pressure rises
by 1 and every other agent's pressure for its own type of the item falls by
1/(n-1). Pressures measure deviation from the ideal pace of taking one item
per type out of every n.

Pressures are stored scaled by (n-1): every reachable pressure value is an
integer multiple of 1/(n-1), so the scaled values are plain ints and the
argmin over them is exact and fast. Public accessors expose Fractions.

A bi-value variant skips the power-of-two rounding: when an agent reveals a
second distinct value, the two values are merged into a single type when the
smaller-to-larger ratio exceeds (sqrt(3)-1)/2, and kept separate otherwise.
If a third distinct value ever appears the variant falls back to the rounded
greedy rule, rebuilding pressures from the allocation history.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import Allocation, FairdivError, Instance, ceil_div, format_rational, parse_rational

POLICY_NAMES = ("pressure-greedy", "bi-value", "round-robin", "dump-to-one")


def round_up_pow2(d: Fraction) -> Fraction:
    """Smallest integer power of two (exponent may be negative) that is >= d."""
    d = Fraction(d)
    if d <= 0:
        raise FairdivError(f"round_up_pow2: non-positive input {d}")
    # bit-length difference lands within a factor of two of the answer
    r = Fraction(2) ** (d.numerator.bit_length() - d.denominator.bit_length())
    while r < d:
        r *= 2
    while r / 2 >= d:
        r /= 2
    return r


class PressureState:
    """Per-agent type registries and scaled pressures for the greedy rule.

    ``registry[i]`` maps an agent's effective item value to its type index
    (1-based, in first-appearance order); ``scaled[i][u-1]`` is the pressure
    H_i^u multiplied by (n-1). Receipt and sighting counts per type back the
    closed-form identity (n-1)*H_i^u = n*receipts - sightings.
    """

    def __init__(self, n: int):
        if n < 2:
            raise FairdivError("PressureState requires n >= 2")
        self.n = n
        self.registry: list[dict[Fraction, int]] = [dict() for _ in range(n)]
        self.scaled: list[list[int]] = [[] for _ in range(n)]
        self.receipts: list[list[int]] = [[] for _ in range(n)]
        self.sightings: list[list[int]] = [[] for _ in range(n)]

    def register(self, agent: int, value: Fraction) -> int:
        """Type index of ``value`` for ``agent``, adding a fresh type if new."""
        reg = self.registry[agent - 1]
        u = reg.get(value)
        if u is None:
            u = len(reg) + 1
            reg[value] = u
            self.scaled[agent - 1].append(0)
            self.receipts[agent - 1].append(0)
            self.sightings[agent - 1].append(0)
        return u

    def pressure(self, agent: int, u: int) -> Fraction:
        return Fraction(self.scaled[agent - 1][u - 1], self.n - 1)

    def type_count(self, agent: int) -> int:
        return len(self.registry[agent - 1])

    def max_type_count(self) -> int:
        return max(len(r) for r in self.registry)

    def snapshot(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(
            tuple(Fraction(s, self.n - 1) for s in row) for row in self.scaled
        )

    def step(self, types: tuple[int, ...]) -> int:
        """Pick argmin pressure over the touched types and apply the update."""
        n = self.n
        scaled = self.scaled
        sightings = self.sightings
        winner = 0
        best = scaled[0][types[0] - 1]
        for i in range(1, n):
            s = scaled[i][types[i] - 1]
            if s < best:
                best = s
                winner = i
        for i in range(n):
            u = types[i] - 1
            sightings[i][u] += 1
            scaled[i][u] -= 1
        scaled[winner][types[winner] - 1] += n
        self.receipts[winner][types[winner] - 1] += 1
        return winner + 1


def allocate_next(state: PressureState, raw_d) -> tuple[int, PressureState]:
    """One greedy-over-pressure step: round, register types, pick, update."""
    types = tuple(
        state.register(i, round_up_pow2(raw_d[i - 1])) for i in range(1, state.n + 1)
    )
    return state.step(types), state


@dataclass(frozen=True)
class TraceStep:
    item: int
    raw: tuple[Fraction, ...]
    effective: tuple[Fraction, ...]  # rounded (or merged-representative) values
    types: tuple[int, ...]
    agent: int
    pressures: tuple[tuple[Fraction, ...], ...] | None = None


@dataclass
class RunTrace:
    n: int
    policy: str
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.steps)

    def allocation(self) -> Allocation:
        return Allocation(tuple(s.agent for s in self.steps))

    def max_type_count(self) -> int:
        k = 0
        for s in self.steps:
            k = max(k, max(s.types))
        return k

    def to_jsonl(self) -> str:
        lines = []
        for s in self.steps:
            rec = {
                "item": s.item,
                "raw": [format_rational(v) for v in s.raw],
                "effective": [format_rational(v) for v in s.effective],
                "types": list(s.types),
                "agent": s.agent,
            }
            if s.pressures is not None:
                rec["pressures"] = [[format_rational(h) for h in row] for row in s.pressures]
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
        return "\n".join(lines) + ("\n" if lines else "")


def trace_from_jsonl(text: str, n: int, policy: str = "external") -> RunTrace:
    trace = RunTrace(n=n, policy=policy)
    for line in text.splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        pressures = None
        if "pressures" in rec:
            pressures = tuple(tuple(parse_rational(h) for h in row) for row in rec["pressures"])
        trace.steps.append(
            TraceStep(
                item=rec["item"],
                raw=tuple(parse_rational(v) for v in rec["raw"]),
                effective=tuple(parse_rational(v) for v in rec["effective"]),
                types=tuple(rec["types"]),
                agent=rec["agent"],
                pressures=pressures,
            )
        )
    return trace


# Policies ----------------------------------------------------------------

class Policy:
    """A deterministic online allocation rule fed one item at a time."""

    name = "abstract"

    def start(self, n: int) -> None:
        self.n = n

    def choose(self, raw) -> int:
        raise NotImplementedError

    # Effective values and type indices recorded in traces; policies without
    # pressure accounting report the raw values and type 1.
    def last_effective(self, raw) -> tuple[Fraction, ...]:
        return tuple(raw)

    def last_types(self) -> tuple[int, ...]:
        return tuple([1] * self.n)

    def pressure_snapshot(self):
        return None

    def max_pressure_seen(self) -> Fraction | None:
        return None


class PressureGreedyPolicy(Policy):
    name = "pressure-greedy"

    def start(self, n: int) -> None:
        super().start(n)
        self.state = PressureState(n) if n >= 2 else None
        self._rounded_cache: dict[Fraction, Fraction] = {}
        self._types: tuple[int, ...] = ()
        self._effective: tuple[Fraction, ...] = ()
        self._last_raw: tuple[Fraction, ...] | None = None
        self._max_scaled = 0

    def _round(self, v: Fraction) -> Fraction:
        r = self._rounded_cache.get(v)
        if r is None:
            r = round_up_pow2(v)
            self._rounded_cache[v] = r
        return r

    def choose(self, raw) -> int:
        if self.state is None:  # n == 1: no pressure accounting
            self._effective = tuple(self._round(v) for v in raw)
            self._types = (1,)
            return 1
        # Repeated raw vectors (the common case in long typed streams) skip
        # re-rounding and re-registration; types cannot change on a repeat.
        if raw != self._last_raw:
            self._last_raw = tuple(raw)
            self._effective = tuple(self._round(v) for v in self._last_raw)
            self._types = tuple(
                self.state.register(i, self._effective[i - 1]) for i in range(1, self.n + 1)
            )
        winner = self.state.step(self._types)
        touched = self.state.scaled[winner - 1][self._types[winner - 1] - 1]
        if touched > self._max_scaled:
            self._max_scaled = touched
        return winner

    def last_effective(self, raw):
        return self._effective

    def last_types(self):
        return self._types

    def pressure_snapshot(self):
        return None if self.state is None else self.state.snapshot()

    def max_pressure_seen(self):
        if self.state is None:
            return None
        return Fraction(self._max_scaled, self.n - 1)


MERGE_THRESHOLD_SQUARED = Fraction(3)  # merge iff (2*lo/hi + 1)^2 > 3, i.e. lo/hi > (sqrt(3)-1)/2


def bi_value_merges(v1: Fraction, v2: Fraction) -> bool:
    """Whether two distinct values are close enough to share one type."""
    lo, hi = min(v1, v2), max(v1, v2)
    r = lo / hi
    return (2 * r + 1) ** 2 > MERGE_THRESHOLD_SQUARED


class BiValuePromiseViolated(FairdivError):
    """An agent revealed a third distinct disutility value."""


class BiValuePolicy(Policy):
    """Greedy-over-pressure specialized to at-most-two values per agent.

    No rounding is applied. When an agent's second distinct value arrives it
    is merged into type 1 if the smaller-to-larger ratio exceeds
    (sqrt(3)-1)/2, else registered as type 2; the merged type's reported
    value is the larger of the pair. On a third distinct value the policy
    falls back to the rounded greedy rule from that item onward, rebuilding
    pressures from the closed form over the realized history.
    """

    name = "bi-value"

    def start(self, n: int) -> None:
        super().start(n)
        self.state = PressureState(n) if n >= 2 else None
        self.values_seen: list[list[Fraction]] = [[] for _ in range(n)]
        self.type_of_value: list[dict[Fraction, int]] = [dict() for _ in range(n)]
        self.representative: list[dict[int, Fraction]] = [dict() for _ in range(n)]
        self.history: list[tuple[tuple[Fraction, ...], int]] = []
        self.fallback: PressureGreedyPolicy | None = None
        self._types: tuple[int, ...] = ()
        self._effective: tuple[Fraction, ...] = ()
        self._max_scaled = 0

    def register_value(self, agent: int, value: Fraction) -> int:
        """Type index for one agent's raw value under the bi-value rule."""
        known = self.type_of_value[agent - 1]
        if value in known:
            return known[value]
        seen = self.values_seen[agent - 1]
        if len(seen) == 0:
            seen.append(value)
            known[value] = 1
            self.representative[agent - 1][1] = value
            if self.state is not None:
                self._new_type_slot(agent)
            return 1
        if len(seen) == 1:
            v1 = seen[0]
            seen.append(value)
            if bi_value_merges(v1, value):
                known[value] = 1
                self.representative[agent - 1][1] = max(v1, value)
                return 1
            known[value] = 2
            self.representative[agent - 1][2] = value
            if self.state is not None:
                self._new_type_slot(agent)
            return 2
        raise BiValuePromiseViolated(f"agent {agent}: third distinct value {value}")

    def _new_type_slot(self, agent: int) -> None:
        self.state.scaled[agent - 1].append(0)
        self.state.receipts[agent - 1].append(0)
        self.state.sightings[agent - 1].append(0)

    def _activate_fallback(self) -> None:
        fb = PressureGreedyPolicy()
        fb.start(self.n)
        if fb.state is not None:
            for raw, agent in self.history:
                rounded = tuple(fb._round(v) for v in raw)
                types = tuple(fb.state.register(i, rounded[i - 1]) for i in range(1, self.n + 1))
                for i in range(1, self.n + 1):
                    u = types[i - 1]
                    fb.state.sightings[i - 1][u - 1] += 1
                    if i == agent:
                        fb.state.receipts[i - 1][u - 1] += 1
            # Pressures re-derived from the closed form over rounded values:
            # (n-1)*H = n*receipts - sightings.
            for i in range(self.n):
                for u in range(len(fb.state.scaled[i])):
                    fb.state.scaled[i][u] = (
                        self.n * fb.state.receipts[i][u] - fb.state.sightings[i][u]
                    )
                    fb._max_scaled = max(fb._max_scaled, fb.state.scaled[i][u])
        self.fallback = fb

    def choose(self, raw) -> int:
        raw = tuple(raw)
        if self.fallback is not None:
            agent = self.fallback.choose(raw)
            self.history.append((raw, agent))
            self._types = self.fallback.last_types()
            self._effective = self.fallback.last_effective(raw)
            return agent
        if self.state is None:
            self.history.append((raw, 1))
            self._types = (1,)
            self._effective = raw
            return 1
        try:
            types = tuple(self.register_value(i, raw[i - 1]) for i in range(1, self.n + 1))
        except BiValuePromiseViolated:
            self._activate_fallback()
            return self.choose(raw)
        self._types = types
        self._effective = tuple(
            self.representative[i - 1][types[i - 1]] for i in range(1, self.n + 1)
        )
        agent = self.state.step(types)
        touched = self.state.scaled[agent - 1][types[agent - 1] - 1]
        if touched > self._max_scaled:
            self._max_scaled = touched
        self.history.append((raw, agent))
        return agent

    def last_effective(self, raw):
        return self._effective

    def last_types(self):
        return self._types

    def pressure_snapshot(self):
        if self.fallback is not None:
            return self.fallback.pressure_snapshot()
        return None if self.state is None else self.state.snapshot()

    def max_pressure_seen(self):
        if self.n == 1:
            return None
        own = Fraction(self._max_scaled, self.n - 1)
        if self.fallback is not None and self.fallback.max_pressure_seen() is not None:
            return max(own, self.fallback.max_pressure_seen())
        return own


class RoundRobinPolicy(Policy):
    name = "round-robin"

    def start(self, n: int) -> None:
        super().start(n)
        self.step_index = 0

    def choose(self, raw) -> int:
        agent = self.step_index % self.n + 1
        self.step_index += 1
        return agent


class DumpToOnePolicy(Policy):
    name = "dump-to-one"

    def __init__(self, target: int = 1):
        self.target = target

    def start(self, n: int) -> None:
        super().start(n)
        if self.target > n:
            raise FairdivError(f"dump-to-one target {self.target} exceeds n={n}")

    def choose(self, raw) -> int:
        return self.target


class SeededMixturePolicy(Policy):
    """Deterministic pseudo-random choices from a seeded stream."""

    def __init__(self, seed: int):
        self.seed = seed
        self.name = f"mixture-{seed}"

    def start(self, n: int) -> None:
        super().start(n)
        import random

        self.rng = random.Random(self.seed)

    def choose(self, raw) -> int:
        return self.rng.randrange(self.n) + 1


class ExternalPolicy(Policy):
    """Adapter for a caller-supplied choice function of the raw vector stream."""

    name = "external"

    def __init__(self, fn):
        self.fn = fn

    def choose(self, raw) -> int:
        return self.fn(tuple(raw))


def make_policy(name: str) -> Policy:
    if name == "pressure-greedy":
        return PressureGreedyPolicy()
    if name == "bi-value":
        return BiValuePolicy()
    if name == "round-robin":
        return RoundRobinPolicy()
    if name == "dump-to-one":
        return DumpToOnePolicy()
    if name.startswith("mixture:"):
        return SeededMixturePolicy(int(name.split(":", 1)[1]))
    raise FairdivError(f"unknown policy {name!r}")


def run_online(inst: Instance, policy: Policy, record_pressures: bool = True) -> tuple[Allocation, RunTrace]:
    """Feed the instance's items in arrival order through a policy."""
    policy.start(inst.n)
    trace = RunTrace(n=inst.n, policy=policy.name)
    for j, raw in enumerate(inst.items, start=1):
        agent = policy.choose(raw)
        if not (1 <= agent <= inst.n):
            raise FairdivError(f"policy chose invalid agent {agent}")
        trace.steps.append(
            TraceStep(
                item=j,
                raw=tuple(raw),
                effective=policy.last_effective(raw),
                types=policy.last_types(),
                agent=agent,
                pressures=policy.pressure_snapshot() if record_pressures else None,
            )
        )
    return trace.allocation(), trace


# Trace validation ---------------------------------------------------------

@dataclass(frozen=True)
class TraceCheck:
    closed_form: bool
    zero_sum: bool
    rounding_sandwich: bool
    pressure_bound: bool
    count_bound: bool
    max_scaled_pressure: int
    game_k: int

    @property
    def passed(self) -> bool:
        return (
            self.closed_form
            and self.zero_sum
            and self.rounding_sandwich
            and self.pressure_bound
            and self.count_bound
        )


def validate_pressure_trace(trace: RunTrace) -> TraceCheck:
    """Replay a rounded-greedy trace and check every stated invariant.

    Checks, per step: the closed form (n-1)*H_i^u = n*|A_i ^ M_i^u| - N_i^u;
    that each item's pressure deltas sum to zero; the rounding sandwich
    raw <= effective < 2*raw; the pressure bound H <= 2k with k the maximum
    registered type count so far; and the per-type receipt-count bound
    |A_i ^ M_i^u| <= ceil(N_i^u / n) - 1 + 2k.
    """
    n = trace.n
    if n < 2:
        raise FairdivError("validate_pressure_trace requires n >= 2")
    receipts: list[list[int]] = [[] for _ in range(n)]
    sightings: list[list[int]] = [[] for _ in range(n)]
    scaled: list[list[int]] = [[] for _ in range(n)]
    ok_closed = ok_zero = ok_round = ok_pressure = ok_count = True
    max_scaled = 0
    game_k = 0
    for s in trace.steps:
        for i in range(1, n + 1):
            raw, eff = s.raw[i - 1], s.effective[i - 1]
            if not (raw <= eff < 2 * raw):
                ok_round = False
            u = s.types[i - 1]
            while len(scaled[i - 1]) < u:
                scaled[i - 1].append(0)
                receipts[i - 1].append(0)
                sightings[i - 1].append(0)
        game_k = max(game_k, max(len(r) for r in scaled))
        delta = 0
        for i in range(1, n + 1):
            u = s.types[i - 1]
            sightings[i - 1][u - 1] += 1
            if i == s.agent:
                receipts[i - 1][u - 1] += 1
                scaled[i - 1][u - 1] += n - 1
                delta += n - 1
            else:
                scaled[i - 1][u - 1] -= 1
                delta -= 1
        if delta != 0:
            ok_zero = False
        for i in range(n):
            for u in range(len(scaled[i])):
                if scaled[i][u] != n * receipts[i][u] - sightings[i][u]:
                    ok_closed = False
                if scaled[i][u] > max_scaled:
                    max_scaled = scaled[i][u]
                if scaled[i][u] > 2 * game_k * (n - 1):
                    ok_pressure = False
                if receipts[i][u] > ceil_div(sightings[i][u], n) - 1 + 2 * game_k:
                    ok_count = False
        if s.pressures is not None:
            snap = tuple(
                tuple(Fraction(v, n - 1) for v in row) for row in scaled
            )
            if snap != s.pressures:
                ok_closed = False
    return TraceCheck(
        closed_form=ok_closed,
        zero_sum=ok_zero,
        rounding_sandwich=ok_round,
        pressure_bound=ok_pressure,
        count_bound=ok_count,
        max_scaled_pressure=max_scaled,
        game_k=max(game_k, 1),
    )


__all__ = [
    "POLICY_NAMES",
    "round_up_pow2",
    "PressureState",
    "allocate_next",
    "TraceStep",
    "RunTrace",
    "trace_from_jsonl",
    "Policy",
    "PressureGreedyPolicy",
    "bi_value_merges",
    "BiValuePromiseViolated",
    "BiValuePolicy",
    "RoundRobinPolicy",
    "DumpToOnePolicy",
    "SeededMixturePolicy",
    "ExternalPolicy",
    "make_policy",
    "run_online",
    "TraceCheck",
    "validate_pressure_trace",
]
