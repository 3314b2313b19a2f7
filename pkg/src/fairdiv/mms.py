"""Exact min-max-share values, per-type closed forms, and certified bounds.

The MMS of an agent is the minimum over n-way partitions of the item set of
the largest bundle disutility under that agent's valuation. Exact values are
computed by branch and bound over partitions; when that is infeasible the
module produces certified lower/upper bounds instead, so downstream ratio
reports never state an exact number without an exact benchmark.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Allocation, FairdivError, Instance, ceil_div, format_rational


class InstanceTooLarge(FairdivError):
    """Exhaustive MMS search refused; callers must fall back to bounds."""


# Item counts up to which the branch-and-bound search is allowed, per agent
# count. Chosen so the worst case (all-distinct values) stays well under a
# second; duplicated values are far cheaper thanks to load-multiset pruning.
_EXACT_LIMITS = {1: 64, 2: 22, 3: 16, 4: 14}
_EXACT_LIMIT_DEFAULT = 10


def exact_search_limit(n: int) -> int:
    return _EXACT_LIMITS.get(n, _EXACT_LIMIT_DEFAULT)


def mms_exact(values, n: int) -> tuple[Fraction, tuple[tuple[int, ...], ...]]:
    """Exact MMS of a value list, plus one witness partition attaining it.

    Returns ``(share, partition)`` where ``partition`` is an n-tuple of
    tuples of 0-based positions into ``values`` and the max bundle sum of
    the partition equals ``share``. Raises :class:`InstanceTooLarge` when
    the search guard for this ``n`` is exceeded.
    """
    vals = [Fraction(v) for v in values]
    if not vals:
        raise FairdivError("mms_exact: empty value list")
    if any(v <= 0 for v in vals):
        raise FairdivError("mms_exact: values must be positive")
    if n < 1:
        raise FairdivError("mms_exact: n must be >= 1")
    m = len(vals)
    if m > exact_search_limit(n):
        raise InstanceTooLarge(f"m={m} exceeds exact-search limit for n={n}")
    if n == 1:
        return sum(vals, Fraction(0)), (tuple(range(m)),)
    if m <= n:
        share = max(vals)
        partition = [()] * n
        for pos in range(m):
            partition[pos] = (pos,)
        return share, tuple(partition)

    order = sorted(range(m), key=lambda p: vals[p], reverse=True)
    svals = [vals[p] for p in order]
    total = sum(svals, Fraction(0))
    smallest_bundle = sorted(vals)[: ceil_div(m, n)]
    lower = max(total / n, svals[0], sum(smallest_bundle, Fraction(0)))

    # Greedy (largest item to least-loaded bundle) seeds the incumbent.
    loads = [Fraction(0)] * n
    greedy_assign = []
    for v in svals:
        b = min(range(n), key=loads.__getitem__)
        loads[b] += v
        greedy_assign.append(b)
    best = max(loads)
    best_assign = list(greedy_assign)

    assign = [0] * m

    def search(t: int, loads: tuple[Fraction, ...], curmax: Fraction) -> None:
        nonlocal best, best_assign
        if curmax >= best or best == lower:
            return
        if t == m:
            best = curmax
            best_assign = assign[:m].copy()
            return
        v = svals[t]
        seen_loads = set()
        for b in range(n):
            lb = loads[b]
            # Bundles with identical loads are interchangeable for all
            # remaining (value-only) decisions; try one representative.
            if lb in seen_loads:
                continue
            seen_loads.add(lb)
            new_load = lb + v
            if new_load >= best:
                continue
            assign[t] = b
            search(t + 1, loads[:b] + (new_load,) + loads[b + 1 :], max(curmax, new_load))
            if best == lower:
                return

    search(0, (Fraction(0),) * n, Fraction(0))

    partition: list[list[int]] = [[] for _ in range(n)]
    for t, b in enumerate(best_assign):
        partition[b].append(order[t])
    for bundle in partition:
        bundle.sort()
    return best, tuple(tuple(bundle) for bundle in partition)


@dataclass(frozen=True)
class TypeShare:
    """One distinct value of one agent: its count and per-type share."""

    value: Fraction
    count: int
    share: Fraction  # ceil(count / n) * value


def per_type_share(count: int, value: Fraction, n: int) -> Fraction:
    """Closed-form MMS over `count` identical items of `value`: ceil(count/n)*value."""
    if count < 0:
        raise FairdivError("per_type_share: negative count")
    if value <= 0:
        raise FairdivError("per_type_share: non-positive value")
    if count == 0:
        return Fraction(0)
    return ceil_div(count, n) * value


def agent_type_shares(values, n: int) -> list[TypeShare]:
    """Group a value stream by distinct value (first-appearance order)."""
    counts: dict[Fraction, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return [TypeShare(value=v, count=c, share=per_type_share(c, v, n)) for v, c in counts.items()]


def mms_per_type(counts_and_values, n: int) -> list[TypeShare]:
    """Per-type shares for explicit (count, value) pairs."""
    return [TypeShare(value=Fraction(v), count=c, share=per_type_share(c, Fraction(v), n))
            for c, v in counts_and_values]


def witness_max_bundle(inst: Instance, agent: int, partition) -> Fraction:
    """Largest bundle disutility of a partition, under one agent's valuation.

    ``partition`` is an iterable of bundles of 1-based item indices; it must
    cover every arrived item exactly once.
    """
    seen: set[int] = set()
    worst = Fraction(0)
    for bundle in partition:
        s = Fraction(0)
        for j in bundle:
            if j in seen:
                raise FairdivError(f"witness partition repeats item {j}")
            seen.add(j)
            s += inst.disutility(agent, j)
        worst = max(worst, s)
    if len(seen) != inst.m:
        raise FairdivError("witness partition does not cover all items")
    return worst


def mms_bounds(inst: Instance, agent: int, witness=None) -> tuple[Fraction, Fraction]:
    """Certified (lower, upper) bounds on one agent's MMS.

    lower = max(average disutility, largest single item): the average is a
    bound because some bundle carries at least its share of the total, and
    some bundle must hold the largest item. upper = the per-type share sum
    (valid because the per-type optimal partitions can be unioned), improved
    by an explicit witness partition when one is supplied.
    """
    if inst.m == 0:
        raise FairdivError("mms_bounds: empty instance")
    vals = inst.agent_values(agent)
    lower = max(sum(vals, Fraction(0)) / inst.n, max(vals))
    upper = sum((ts.share for ts in agent_type_shares(vals, inst.n)), Fraction(0))
    if witness is not None:
        upper = min(upper, witness_max_bundle(inst, agent, witness))
    return lower, upper


@dataclass(frozen=True)
class AgentMms:
    """Exact MMS when tractable, certified bounds always."""

    agent: int
    lower: Fraction
    upper: Fraction
    exact: Fraction | None = None
    witness: tuple[tuple[int, ...], ...] | None = None  # 1-based item indices

    def __post_init__(self):
        if self.exact is not None and not (self.lower <= self.exact <= self.upper):
            raise FairdivError(
                f"agent {self.agent}: exact MMS {self.exact} outside [{self.lower}, {self.upper}]"
            )


def agent_mms(inst: Instance, agent: int) -> AgentMms:
    lower, upper = mms_bounds(inst, agent)
    try:
        exact, positions = mms_exact(inst.agent_values(agent), inst.n)
    except InstanceTooLarge:
        return AgentMms(agent=agent, lower=lower, upper=upper)
    witness = tuple(tuple(p + 1 for p in bundle) for bundle in positions)
    return AgentMms(agent=agent, lower=lower, upper=min(upper, exact), exact=exact, witness=witness)


def mms_report(inst: Instance) -> list[AgentMms]:
    return [agent_mms(inst, i) for i in range(1, inst.n + 1)]


def mms_report_to_obj(report) -> list[dict]:
    out = []
    for entry in report:
        obj = {
            "agent": entry.agent,
            "lower_bound": format_rational(entry.lower),
            "upper_bound": format_rational(entry.upper),
            "exact_mms": None if entry.exact is None else format_rational(entry.exact),
            "witness_partition": None
            if entry.witness is None
            else [list(bundle) for bundle in entry.witness],
        }
        out.append(obj)
    return out


@dataclass(frozen=True)
class DecompositionCheck:
    agent: int
    lhs: Fraction  # sum over types of (share - value)
    exact: Fraction
    rhs: Fraction  # sum over types of share
    passed: bool


def check_mms_decomposition(inst: Instance) -> list[DecompositionCheck]:
    """Verify, per agent, that sum(share_u - V_u) <= MMS <= sum(share_u).

    The upper side holds because the per-type optimal partitions can be
    unioned into one partition; the lower side because each per-type share
    overshoots the per-type average by at most one item. Requires the exact
    search to be feasible.
    """
    out = []
    for i in range(1, inst.n + 1):
        vals = inst.agent_values(i)
        shares = agent_type_shares(vals, inst.n)
        exact, _ = mms_exact(vals, inst.n)
        lhs = sum((ts.share - ts.value for ts in shares), Fraction(0))
        rhs = sum((ts.share for ts in shares), Fraction(0))
        out.append(
            DecompositionCheck(agent=i, lhs=lhs, exact=exact, rhs=rhs, passed=lhs <= exact <= rhs)
        )
    return out


def allocation_ratios(inst: Instance, alloc: Allocation):
    """Per-agent realized-vs-MMS ratio, exact or as a certified interval.

    Yields ``(agent, d_A, kind, value)`` where kind is ``"exact"`` (value is
    the exact ratio) or ``"interval"`` (value is ``(low, high)`` bracketing
    the true ratio via the MMS bounds).
    """
    for entry in mms_report(inst):
        d_a = alloc.bundle_disutility(inst, entry.agent)
        if entry.exact is not None:
            yield entry.agent, d_a, "exact", d_a / entry.exact
        else:
            yield entry.agent, d_a, "interval", (d_a / entry.upper, d_a / entry.lower)


__all__ = [
    "InstanceTooLarge",
    "exact_search_limit",
    "mms_exact",
    "TypeShare",
    "per_type_share",
    "agent_type_shares",
    "mms_per_type",
    "witness_max_bundle",
    "mms_bounds",
    "AgentMms",
    "agent_mms",
    "mms_report",
    "mms_report_to_obj",
    "DecompositionCheck",
    "check_mms_decomposition",
    "allocation_ratios",
]
