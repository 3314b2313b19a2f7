"""Exact simulator for the stacking game and its allocator reduction.

The game state is a non-decreasing piecewise-constant function f on the
interval (-1/2, 1/2], starting from f = 0. One move raises f by ``a`` on a
set A of intervals and lowers it by ``b`` on a set B lying entirely to the
right of A, with measures |A| = b/(k(a+b)) and |B| = a/(k(a+b)); the values
are then re-sorted into non-decreasing order. The raise/lower masses cancel
exactly, so the integral of f stays zero forever. The mover tries to push
max f as high as possible; with a+b <= beta the suffix integral
F(x) = int_x^{1/2} f stays below beta*k/4 - beta*k*x^2, which pins
max f <= beta*k.

Two engines implement the same dynamics:

* :class:`StackingFunction` + :func:`apply_operation`: general rational
  intervals, the reference implementation.
* :class:`GridGame`: moves aligned to a uniform grid of cells, with values
  kept as scaled integers. This is exact (cell values are integer multiples
  of a fixed unit) and fast enough for bulk property sweeps and for the
  allocator reduction, where every move touches whole cells of width 1/(nk).

:func:`allocator_to_stacking` replays a rounded-greedy allocation trace as a
sequence of moves: the nk pressure counters map to the nk cells so that the
multiset of pressures always equals the multiset of cell values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .core import FairdivError, InvariantViolation, format_rational, parse_rational
from .allocator import RunTrace

HALF = Fraction(1, 2)


def _merge_runs(pieces):
    """Coalesce adjacent pieces of equal value."""
    out = []
    for left, right, value in pieces:
        if out and out[-1][2] == value and out[-1][1] == left:
            out[-1] = (out[-1][0], right, value)
        else:
            out.append((left, right, value))
    return out


@dataclass(frozen=True)
class StackingFunction:
    """Non-decreasing piecewise-constant function on (-1/2, 1/2].

    ``pieces`` are (left, right, value) with left-open right-closed
    intervals abutting exactly from -1/2 to 1/2, values non-decreasing,
    and total integral exactly zero.
    """

    pieces: tuple[tuple[Fraction, Fraction, Fraction], ...]

    def __post_init__(self):
        if not self.pieces:
            raise InvariantViolation("stacking function has no pieces")
        if self.pieces[0][0] != -HALF or self.pieces[-1][1] != HALF:
            raise InvariantViolation("pieces must cover (-1/2, 1/2]")
        prev_right = None
        prev_value = None
        total = Fraction(0)
        for left, right, value in self.pieces:
            if left >= right:
                raise InvariantViolation(f"empty or inverted piece ({left}, {right}]")
            if prev_right is not None and left != prev_right:
                raise InvariantViolation("pieces must abut exactly")
            if prev_value is not None and value < prev_value:
                raise InvariantViolation("piece values must be non-decreasing")
            prev_right, prev_value = right, value
            total += value * (right - left)
        if total != 0:
            raise InvariantViolation(f"integral is {total}, expected 0")

    @classmethod
    def zero(cls) -> "StackingFunction":
        return cls(pieces=((-HALF, HALF, Fraction(0)),))

    @classmethod
    def from_pieces(cls, pieces) -> "StackingFunction":
        norm = [(Fraction(l), Fraction(r), Fraction(v)) for l, r, v in pieces]
        return cls(pieces=tuple(_merge_runs(norm)))

    def max_value(self) -> Fraction:
        return self.pieces[-1][2]

    def value_at(self, x: Fraction) -> Fraction:
        """f(x) for x in (-1/2, 1/2] (left-open right-closed pieces)."""
        if not (-HALF < x <= HALF):
            raise FairdivError(f"x={x} outside (-1/2, 1/2]")
        for left, right, value in self.pieces:
            if left < x <= right:
                return value
        raise AssertionError("unreachable: pieces cover the interval")

    def breakpoints(self) -> list[Fraction]:
        pts = [self.pieces[0][0]]
        pts.extend(right for _, right, _ in self.pieces)
        return pts


def integral_F(f: StackingFunction, x: Fraction) -> Fraction:
    """Exact suffix integral F(x) = int_x^{1/2} f(u) du."""
    x = Fraction(x)
    if not (-HALF <= x <= HALF):
        raise FairdivError(f"x={x} outside [-1/2, 1/2]")
    total = Fraction(0)
    for left, right, value in f.pieces:
        if right <= x:
            continue
        total += value * (right - max(left, x))
    return total


def _intervals_measure(intervals) -> Fraction:
    return sum((r - l for l, r in intervals), Fraction(0))


@dataclass(frozen=True)
class StackingOperation:
    """One move: raise by a on A, lower by b on B, A entirely left of B."""

    a: Fraction
    b: Fraction
    A: tuple[tuple[Fraction, Fraction], ...]
    B: tuple[tuple[Fraction, Fraction], ...]
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise FairdivError(f"k must be >= 1, got {self.k}")
        for name, v in (("a", self.a), ("b", self.b)):
            if not (0 < v <= 1):
                raise FairdivError(f"{name} must lie in (0, 1], got {v}")
        for name, intervals in (("A", self.A), ("B", self.B)):
            prev = None
            for l, r in intervals:
                if not (-HALF <= l < r <= HALF):
                    raise FairdivError(f"{name} interval ({l}, {r}] outside the domain")
                if prev is not None and l < prev:
                    raise FairdivError(f"{name} intervals must be sorted and disjoint")
                prev = r
        want_a = Fraction(self.b, self.k * (self.a + self.b))
        want_b = Fraction(self.a, self.k * (self.a + self.b))
        if _intervals_measure(self.A) != want_a or _intervals_measure(self.B) != want_b:
            raise FairdivError(
                f"measure mismatch: |A|={_intervals_measure(self.A)} |B|={_intervals_measure(self.B)}, "
                f"expected {want_a} and {want_b}"
            )
        if not self.A or not self.B:
            raise FairdivError("A and B must be nonempty")
        if max(r for _, r in self.A) > min(l for l, _ in self.B):
            raise FairdivError("A must lie entirely to the left of B")

    @classmethod
    def make(cls, a, b, A, B, k) -> "StackingOperation":
        return cls(
            a=Fraction(a),
            b=Fraction(b),
            A=tuple((Fraction(l), Fraction(r)) for l, r in A),
            B=tuple((Fraction(l), Fraction(r)) for l, r in B),
            k=int(k),
        )


def _covered(intervals, left: Fraction, right: Fraction) -> bool:
    """Whether the fragment (left, right] lies inside one of the intervals."""
    for l, r in intervals:
        if l <= left and right <= r:
            return True
    return False


def apply_operation(f: StackingFunction, op: StackingOperation) -> StackingFunction:
    """Apply one move and re-sort into a valid stacking function.

    The fragments of the updated function are sorted by value, stable in
    their pre-sort left endpoints, and laid back over (-1/2, 1/2].
    """
    cuts = {-HALF, HALF}
    for l, r in op.A:
        cuts.add(l)
        cuts.add(r)
    for l, r in op.B:
        cuts.add(l)
        cuts.add(r)

    fragments = []  # (value_after, original_left, length)
    for left, right, value in f.pieces:
        points = sorted(c for c in cuts if left < c < right)
        lo = left
        for hi in points + [right]:
            if _covered(op.A, lo, hi):
                new_value = value + op.a
            elif _covered(op.B, lo, hi):
                new_value = value - op.b
            else:
                new_value = value
            fragments.append((new_value, lo, hi - lo))
            lo = hi

    fragments.sort(key=lambda frag: frag[0])  # stable: ties keep left-endpoint order
    pieces = []
    cursor = -HALF
    for value, _, length in fragments:
        pieces.append((cursor, cursor + length, value))
        cursor += length
    return StackingFunction.from_pieces(pieces)


@dataclass(frozen=True)
class BoundProfile:
    """Parameters of the suffix-integral bound beta*k/4 - beta*k*x^2."""

    k: int
    beta: Fraction = Fraction(2)

    def __post_init__(self):
        if self.k < 1:
            raise FairdivError(f"k must be >= 1, got {self.k}")
        if not (0 < self.beta <= 2):
            raise FairdivError(f"beta must lie in (0, 2], got {self.beta}")

    def bound_at(self, x: Fraction) -> Fraction:
        return self.beta * self.k / 4 - self.beta * self.k * x * x


@dataclass(frozen=True)
class BoundReport:
    passed: bool
    margin: Fraction
    worst_x: Fraction
    max_value_slack: Fraction


def check_bound(f: StackingFunction, profile: BoundProfile) -> BoundReport:
    """Check F(x) <= beta*k/4 - beta*k*x^2 and max f <= beta*k.

    F is piecewise linear and the bound is concave, so the difference is
    concave on each piece and its minimum over the domain is attained at a
    piece breakpoint; checking breakpoints is therefore sufficient. At
    x = +-1/2 both sides are identically zero, so the reported margin is
    taken over the interior breakpoints plus x = 0.
    """
    points = {Fraction(0)}
    points.update(p for p in f.breakpoints() if -HALF < p < HALF)
    margin = None
    worst = Fraction(0)
    for x in sorted(points):
        slack = profile.bound_at(x) - integral_F(f, x)
        if margin is None or slack < margin:
            margin = slack
            worst = x
    value_slack = profile.beta * profile.k - f.max_value()
    passed = margin >= 0 and value_slack >= 0
    return BoundReport(
        passed=passed,
        margin=min(margin, value_slack),
        worst_x=worst,
        max_value_slack=value_slack,
    )


def contiguify(op: StackingOperation) -> StackingOperation:
    """Equivalent move whose support A u B is one contiguous interval.

    Repeatedly substituting the leftmost fragment of A into gaps on its
    right (and the rightmost fragment of B into gaps on its left) never
    decreases any suffix integral of the resulting function; composing all
    substitutions anchors the support at the left end of B. The returned
    move therefore has A = (c - |A|, c] and B = (c, c + |B|] with c the
    left endpoint of B, and dominates the input pointwise in F.
    """
    measure_a = _intervals_measure(op.A)
    measure_b = _intervals_measure(op.B)
    anchor = min(l for l, _ in op.B)
    return StackingOperation(
        a=op.a,
        b=op.b,
        A=((anchor - measure_a, anchor),),
        B=((anchor, anchor + measure_b),),
        k=op.k,
    )


def is_contiguous(op: StackingOperation) -> bool:
    support = sorted(list(op.A) + list(op.B))
    for (l1, r1), (l2, r2) in zip(support, support[1:]):
        if r1 != l2:
            return False
    return True


# Grid engine ---------------------------------------------------------------

class GridGame:
    """Stacking game restricted to moves aligned to Q equal cells.

    Cell values are stored as integers scaled by ``scale``: a move with
    raise ``a`` and lower ``b`` requires a*scale and b*scale integral. All
    invariant checks are exact integer arithmetic.
    """

    def __init__(self, k: int, cells_per_unit: int, scale: int):
        if k < 1 or cells_per_unit < 1 or scale < 1:
            raise FairdivError("k, cells_per_unit, scale must be positive")
        self.k = k
        self.Q = k * cells_per_unit
        self.cells_per_unit = cells_per_unit  # cells touched by one move
        self.scale = scale
        self.values: list[int] = [0] * self.Q
        self._bound_rhs: dict[Fraction, list[int]] = {}

    def cell_interval(self, c: int) -> tuple[Fraction, Fraction]:
        return (-HALF + Fraction(c, self.Q), -HALF + Fraction(c + 1, self.Q))

    def apply_cells(self, a: Fraction, b: Fraction, a_cells, b_cells,
                    need_order: bool = True) -> list[int] | None:
        """Apply one move on explicit cell index sets and re-sort.

        With ``need_order`` the sort order is returned: entry ``new`` holds
        the previous position of the value now at position ``new`` (ties
        keep their left-to-right order). Callers that only track the value
        multiset can pass ``need_order=False`` for a plain in-place sort.
        """
        a, b = Fraction(a), Fraction(b)
        if not (0 < a <= 1 and 0 < b <= 1):
            raise FairdivError("a and b must lie in (0, 1]")
        a_scaled = a * self.scale
        b_scaled = b * self.scale
        if a_scaled.denominator != 1 or b_scaled.denominator != 1:
            raise FairdivError(f"a={a}, b={b} not representable at scale {self.scale}")
        want_a = Fraction(self.cells_per_unit) * b / (a + b)
        want_b = Fraction(self.cells_per_unit) * a / (a + b)
        if Fraction(len(a_cells)) != want_a or Fraction(len(b_cells)) != want_b:
            raise FairdivError(
                f"cell counts ({len(a_cells)}, {len(b_cells)}) do not match measures "
                f"({want_a}, {want_b}) for a={a}, b={b}"
            )
        if max(a_cells) >= min(b_cells):
            raise FairdivError("A cells must lie strictly left of B cells")
        if len(set(a_cells) | set(b_cells)) != len(a_cells) + len(b_cells):
            raise FairdivError("A and B cells must be disjoint")
        av, bv = int(a_scaled), int(b_scaled)
        vals = self.values
        for c in a_cells:
            vals[c] += av
        for c in b_cells:
            vals[c] -= bv
        if not need_order:
            vals.sort()
            return None
        order = sorted(range(self.Q), key=lambda c: (vals[c], c))
        self.values = [vals[c] for c in order]
        return order

    def integral_is_zero(self) -> bool:
        return sum(self.values) == 0

    def is_sorted(self) -> bool:
        return all(x <= y for x, y in zip(self.values, self.values[1:]))

    def max_value(self) -> Fraction:
        return Fraction(self.values[-1], self.scale)

    def _rhs_for(self, beta: Fraction) -> list[int]:
        # F(x_i) <= beta*k/4 - beta*k*x_i^2 at x_i = -1/2 + i/Q, cross-multiplied:
        # 4*bq*Q*suffix_i <= bp*k*scale*(Q^2 - (2i-Q)^2).
        rhs = self._bound_rhs.get(beta)
        if rhs is None:
            bp, bq = beta.numerator, beta.denominator
            rhs = [
                bp * self.k * self.scale * (self.Q * self.Q - (2 * i - self.Q) ** 2)
                for i in range(self.Q + 1)
            ]
            self._bound_rhs[beta] = rhs
        return rhs

    def bound_ok(self, beta) -> bool:
        """Exact check of the suffix-integral bound and max value, at every cell edge."""
        beta = Fraction(beta)
        rhs = self._rhs_for(beta)
        bq = beta.denominator
        if Fraction(self.values[-1], self.scale) > beta * self.k:
            return False
        lhs_factor = 4 * bq * self.Q
        suffix = 0
        for i in range(self.Q, 0, -1):
            suffix += self.values[i - 1]
            if lhs_factor * suffix > rhs[i - 1]:
                return False
        return suffix == 0

    def bound_margin(self, beta) -> Fraction:
        beta = Fraction(beta)
        margin = beta * self.k - Fraction(self.values[-1], self.scale)
        suffix = 0
        for i in range(self.Q, 0, -1):
            suffix += self.values[i - 1]
            x = -HALF + Fraction(i - 1, self.Q)
            slack = (beta * self.k / 4 - beta * self.k * x * x) - Fraction(suffix, self.scale * self.Q)
            if -HALF < x:
                margin = min(margin, slack)
        return margin

    def to_function(self) -> StackingFunction:
        pieces = []
        for c, v in enumerate(self.values):
            l, r = self.cell_interval(c)
            pieces.append((l, r, Fraction(v, self.scale)))
        return StackingFunction.from_pieces(pieces)


def cells_to_intervals(game_q: int, cells) -> tuple[tuple[Fraction, Fraction], ...]:
    """Merge sorted cell indices into maximal (left, right] intervals."""
    out = []
    run_start = None
    prev = None
    for c in sorted(cells):
        if run_start is None:
            run_start = c
        elif c != prev + 1:
            out.append((-HALF + Fraction(run_start, game_q), -HALF + Fraction(prev + 1, game_q)))
            run_start = c
        prev = c
    if run_start is not None:
        out.append((-HALF + Fraction(run_start, game_q), -HALF + Fraction(prev + 1, game_q)))
    return tuple(out)


# Allocator reduction --------------------------------------------------------

@dataclass(frozen=True)
class ReductionStep:
    op: StackingOperation
    function: StackingFunction


@dataclass
class ReductionResult:
    n: int
    k: int
    steps: list[ReductionStep] = field(default_factory=list)

    @property
    def final(self) -> StackingFunction:
        return self.steps[-1].function if self.steps else StackingFunction.zero()

    def operations(self) -> list[StackingOperation]:
        return [s.op for s in self.steps]


def allocator_to_stacking(trace: RunTrace, n: int, k: int | None = None) -> ReductionResult:
    """Replay a rounded-greedy trace as stacking-game moves.

    The interval is divided into n*k cells of width 1/(nk); each pressure
    counter holds one cell, and the value of the function on that cell is
    the pressure times 1 (scaled by n-1 internally). At each item the chosen
    agent's counter is the touched minimum, which after a value-preserving
    relabeling sits on the leftmost touched cell; that cell is raised by 1
    and the other n-1 touched cells are lowered by 1/(n-1).

    Raises :class:`InvariantViolation` if at any step the multiset of
    pressures stops matching the multiset of cell values.
    """
    if n < 2:
        raise FairdivError("allocator_to_stacking requires n >= 2")
    result_k = k if k is not None else max(trace.max_type_count(), 1)
    result = ReductionResult(n=n, k=result_k)
    if not trace.steps:
        return result
    if trace.max_type_count() > result_k:
        raise FairdivError("trace registers more types than k")

    Q = n * result_k
    game = GridGame(k=result_k, cells_per_unit=n, scale=n - 1)
    cell_of: dict[tuple[int, int], int] = {}
    holder: dict[int, tuple[int, int]] = {}
    scaled: dict[tuple[int, int], int] = {}

    for step in trace.steps:
        for i in range(1, n + 1):
            u = step.types[i - 1]
            if (i, u) not in cell_of:
                free = next(c for c in range(Q) if c not in holder)
                if game.values[free] != 0:
                    raise InvariantViolation("fresh pressure assigned to a nonzero cell")
                cell_of[(i, u)] = free
                holder[free] = (i, u)
                scaled[(i, u)] = 0

        touched = [cell_of[(i, step.types[i - 1])] for i in range(1, n + 1)]
        chosen_key = (step.agent, step.types[step.agent - 1])
        c_star = min(touched)
        if game.values[c_star] != scaled[chosen_key]:
            raise InvariantViolation(
                "leftmost touched cell does not carry the minimum pressure"
            )
        displaced = holder[c_star]
        old_cell = cell_of[chosen_key]
        cell_of[chosen_key], cell_of[displaced] = c_star, old_cell
        holder[c_star], holder[old_cell] = chosen_key, displaced

        b_cells = sorted(
            cell_of[(i, step.types[i - 1])] for i in range(1, n + 1) if i != step.agent
        )
        op = StackingOperation(
            a=Fraction(1),
            b=Fraction(1, n - 1),
            A=cells_to_intervals(Q, [c_star]),
            B=cells_to_intervals(Q, b_cells),
            k=result_k,
        )
        order = game.apply_cells(Fraction(1), Fraction(1, n - 1), [c_star], b_cells)

        new_pos = {old: new for new, old in enumerate(order)}
        holder = {new_pos[c]: key for c, key in holder.items()}
        cell_of = {key: new_pos[c] for key, c in cell_of.items()}

        for i in range(1, n + 1):
            key = (i, step.types[i - 1])
            scaled[key] += (n - 1) if i == step.agent else -1

        want = sorted(scaled.values()) + [0] * (Q - len(scaled))
        if sorted(game.values) != sorted(want):
            raise InvariantViolation("pressure multiset != cell value multiset")
        if not game.is_sorted() or not game.integral_is_zero():
            raise InvariantViolation("grid state lost sortedness or zero integral")

        result.steps.append(ReductionStep(op=op, function=game.to_function()))
    return result


# Trace file format ----------------------------------------------------------

def stacking_trace_to_jsonl(steps) -> str:
    lines = []
    for step in steps:
        rec = {
            "a": format_rational(step.op.a),
            "b": format_rational(step.op.b),
            "A": [[format_rational(l), format_rational(r)] for l, r in step.op.A],
            "B": [[format_rational(l), format_rational(r)] for l, r in step.op.B],
            "pieces_after": [
                [format_rational(l), format_rational(r), format_rational(v)]
                for l, r, v in step.function.pieces
            ],
        }
        lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class ReplayReport:
    steps: int
    passed: bool
    failures: tuple[str, ...]


def replay_stacking_trace(text: str) -> ReplayReport:
    """Re-verify a stacking trace file: invariants, bound, recorded pieces."""
    f = StackingFunction.zero()
    failures = []
    count = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        a = parse_rational(rec["a"])
        b = parse_rational(rec["b"])
        A = tuple((parse_rational(l), parse_rational(r)) for l, r in rec["A"])
        B = tuple((parse_rational(l), parse_rational(r)) for l, r in rec["B"])
        measure = _intervals_measure(A) + _intervals_measure(B)
        if measure <= 0 or (1 / measure).denominator != 1:
            failures.append(f"line {lineno}: |A|+|B| = {measure} is not 1/k for integer k")
            break
        k = int(1 / measure)
        try:
            op = StackingOperation(a=a, b=b, A=A, B=B, k=k)
            f = apply_operation(f, op)
        except FairdivError as exc:
            failures.append(f"line {lineno}: {exc}")
            break
        count += 1
        recorded = tuple(
            (parse_rational(l), parse_rational(r), parse_rational(v))
            for l, r, v in rec["pieces_after"]
        )
        if recorded != f.pieces:
            failures.append(f"line {lineno}: recorded pieces do not match replay")
        if a + b <= 2:
            report = check_bound(f, BoundProfile(k=k, beta=Fraction(2)))
            if not report.passed:
                failures.append(f"line {lineno}: suffix-integral bound violated")
    return ReplayReport(steps=count, passed=not failures, failures=tuple(failures))


__all__ = [
    "HALF",
    "StackingFunction",
    "integral_F",
    "StackingOperation",
    "apply_operation",
    "BoundProfile",
    "BoundReport",
    "check_bound",
    "contiguify",
    "is_contiguous",
    "GridGame",
    "cells_to_intervals",
    "ReductionStep",
    "ReductionResult",
    "allocator_to_stacking",
    "stacking_trace_to_jsonl",
    "ReplayReport",
    "replay_stacking_trace",
]
