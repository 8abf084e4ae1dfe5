"""Exact arithmetic, the instance model, rank-space normalization, and the
shared randomized decision-to-optimization driver.

Every coordinate in this package is a ``Rat`` (= :class:`fractions.Fraction`).
All geometric predicates are decided with exact rational arithmetic; floats
never enter a comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

Rat = Fraction

ZERO = Rat(0)
ONE = Rat(1)


class InfeasibleError(Exception):
    """No candidate satisfies the constraints at hand."""


class BudgetExceededError(Exception):
    """Input exceeds a solver's declared budget."""


class VerificationError(Exception):
    """A result failed its exactness checks."""


def rat(x: int | str | Rat) -> Rat:
    """Coerce *x* to an exact rational.

    Accepts ints, Fractions and strings (decimal like ``"0.25"`` or a
    quotient like ``"3/7"``).  Floats are rejected on purpose: a binary
    float silently misrepresents decimal input, so callers must pass
    strings instead.
    """
    if isinstance(x, Rat):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a coordinate")
    if isinstance(x, int):
        return Rat(x)
    if isinstance(x, str):
        return Rat(x)
    raise TypeError(f"expected int, str or Fraction, got {type(x).__name__}")


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class Point:
    """A point with exact rational coordinates."""

    coords: tuple[Rat, ...]

    def __getitem__(self, i: int) -> Rat:
        return self.coords[i]

    def __len__(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def point(*coords) -> Point:
    return Point(tuple(rat(c) for c in coords))


@dataclass(frozen=True)
class AABox:
    """Axis-aligned box given by its lower and upper corner.

    ``lo[i] <= hi[i]`` always; emptiness tests elsewhere use the *open*
    interior, so boundary contact never blocks.
    """

    lo: tuple[Rat, ...]
    hi: tuple[Rat, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("corner dimension mismatch")
        for a, b in zip(self.lo, self.hi):
            if a > b:
                raise ValueError(f"inverted box: {a} > {b}")

    @staticmethod
    def make(lo: Sequence, hi: Sequence) -> "AABox":
        return AABox(tuple(rat(c) for c in lo), tuple(rat(c) for c in hi))

    @property
    def d(self) -> int:
        return len(self.lo)

    def volume(self) -> Rat:
        v = ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def contains(self, p: Point | Sequence[Rat]) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, p, self.hi))

    def interior_contains(self, p: Point | Sequence[Rat]) -> bool:
        return all(a < c < b for a, c, b in zip(self.lo, p, self.hi))

    def contains_box(self, other: "AABox") -> bool:
        return all(a <= c for a, c in zip(self.lo, other.lo)) and all(
            c <= b for c, b in zip(other.hi, self.hi)
        )


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Variant:
    """Which flavour of the empty-box problem an instance asks for.

    kind is one of ``unrestricted``, ``anchored`` (the box must be
    ``(0,x_1) x ... x (0,x_d)``, i.e. the origin is a vertex),
    ``point`` (the closed box must contain ``o``), ``line`` / ``plane``
    (the closed box must meet the axis-parallel flat fixed by the
    ``(axis, value)`` pairs: one pair for a hyperplane, ``d-1`` pairs
    for a line).
    """

    kind: str
    o: Point | None = None
    fixed: tuple[tuple[int, Rat], ...] = ()

    @staticmethod
    def unrestricted() -> "Variant":
        return Variant("unrestricted")

    @staticmethod
    def anchored() -> "Variant":
        return Variant("anchored")

    @staticmethod
    def point_restricted(o: Point) -> "Variant":
        return Variant("point", o=o)

    @staticmethod
    def plane_restricted(axis: int, value) -> "Variant":
        return Variant("plane", fixed=((axis, rat(value)),))

    @staticmethod
    def line_restricted(fixed: Sequence[tuple[int, Any]]) -> "Variant":
        pairs = tuple(sorted((int(a), rat(v)) for a, v in fixed))
        return Variant("line", fixed=pairs)


KINDS = ("unrestricted", "anchored", "point", "line", "plane")


@dataclass(frozen=True)
class Instance:
    """An empty-box problem instance: dimension, bounding box, points, variant."""

    d: int
    b0: AABox
    points: tuple[Point, ...]
    variant: Variant = field(default_factory=Variant.unrestricted)

    def __post_init__(self):
        self.validate()

    @property
    def n(self) -> int:
        return len(self.points)

    def validate(self) -> None:
        if self.d < 2:
            raise ValueError("instances require d >= 2")
        if self.b0.d != self.d:
            raise ValueError("b0 dimension mismatch")
        for a, b in zip(self.b0.lo, self.b0.hi):
            if a >= b:
                raise ValueError("b0 must have nonempty interior")
        for p in self.points:
            if len(p) != self.d:
                raise ValueError("point dimension mismatch")
            if not self.b0.contains(p):
                raise ValueError(f"point {p.coords} outside b0")
        v = self.variant
        if v.kind not in KINDS:
            raise ValueError(f"unknown variant kind {v.kind!r}")
        if v.kind == "anchored":
            if not all(a <= 0 <= b for a, b in zip(self.b0.lo, self.b0.hi)):
                raise ValueError("anchored instances need the origin inside b0")
        elif v.kind == "point":
            if v.o is None or len(v.o) != self.d:
                raise ValueError("point-restricted variant needs a d-dim point o")
            if not self.b0.contains(v.o):
                raise ValueError("restriction point o outside b0")
        elif v.kind in ("line", "plane"):
            want = 1 if v.kind == "plane" else self.d - 1
            axes = [a for a, _ in v.fixed]
            if len(v.fixed) != want or len(set(axes)) != len(axes):
                raise ValueError(f"{v.kind}-restricted variant needs {want} distinct axes")
            for a, val in v.fixed:
                if not (0 <= a < self.d):
                    raise ValueError("fixed axis out of range")
                if not (self.b0.lo[a] <= val <= self.b0.hi[a]):
                    raise ValueError("restriction flat misses b0")


def make_instance(d, b0_lo, b0_hi, pts, variant: Variant | None = None) -> Instance:
    return Instance(
        d=d,
        b0=AABox.make(b0_lo, b0_hi),
        points=tuple(Point(tuple(rat(c) for c in p)) for p in pts),
        variant=variant if variant is not None else Variant.unrestricted(),
    )


# ---------------------------------------------------------------------------
# results


@dataclass
class Stats:
    """Run counters plus wall time.  Purely informational."""

    counters: dict[str, int] = field(default_factory=dict)
    wall_ns: int = 0

    def inc(self, key: str, amount: int = 1) -> None:
        self.counters[key] = self.counters.get(key, 0) + amount

    def peak(self, key: str, value: int) -> None:
        if value > self.counters.get(key, 0):
            self.counters[key] = value

    def merge(self, other: "Stats") -> None:
        for k, v in other.counters.items():
            self.counters[k] = self.counters.get(k, 0) + v


@dataclass
class SolveResult:
    value: Rat
    witness: AABox | None
    stats: Stats = field(default_factory=Stats)


def verify_result(inst: Instance, res: SolveResult) -> None:
    """Check the universal postconditions of a solver result, exactly.

    witness inside b0, witness interior empty of points, measure equals
    the reported value, and the instance variant holds.  Raises
    :class:`VerificationError` on any failure.
    """
    w = res.witness
    if w is None:
        raise VerificationError("missing witness")
    if w.d != inst.d:
        raise VerificationError("witness dimension mismatch")
    if not inst.b0.contains_box(w):
        raise VerificationError("witness escapes b0")
    for p in inst.points:
        if w.interior_contains(p):
            raise VerificationError(f"witness interior contains point {p.coords}")
    if w.volume() != res.value:
        raise VerificationError(f"witness volume {w.volume()} != value {res.value}")
    v = inst.variant
    if v.kind == "anchored":
        if any(c != 0 for c in w.lo):
            raise VerificationError("anchored witness must have lower corner 0")
    elif v.kind == "point":
        if not w.contains(v.o):
            raise VerificationError("witness misses restriction point")
    elif v.kind in ("line", "plane"):
        for a, val in v.fixed:
            if not (w.lo[a] <= val <= w.hi[a]):
                raise VerificationError("witness misses restriction flat")


# ---------------------------------------------------------------------------
# rank-space normalization


def rank_normalize(inst: Instance) -> tuple[Instance, list[list[Rat]]]:
    """Replace coordinates by per-axis integer ranks.

    Each axis is independently replaced by the ranks 1..n of its point
    coordinates, ties broken by original point index (stable); ``b0``
    becomes ``[0, n+1]^d``.  Returns the ranked instance together with
    per-axis tables mapping rank -> original value
    (``tables[axis][rank-1]``), which makes the back-mapping exact.

    Variant payloads are mapped along: a value equal to some point
    coordinate maps to the first tied rank, any other value maps to the
    half-integer between the neighbouring ranks, so every strict
    comparison against point coordinates is preserved.

    With no points at all there is nothing to rank and the instance is
    returned unchanged with empty tables.
    """
    n = inst.n
    d = inst.d
    if n == 0:
        return inst, [[] for _ in range(d)]

    tables: list[list[Rat]] = []
    new_coords = [[ZERO] * d for _ in range(n)]
    for axis in range(d):
        order = sorted(range(n), key=lambda k: (inst.points[k][axis], k))
        tables.append([inst.points[k][axis] for k in order])
        for rank, k in enumerate(order, start=1):
            new_coords[k][axis] = Rat(rank)

    def map_value(axis: int, v: Rat) -> Rat:
        col = tables[axis]
        lo_idx = _bisect_left(col, v)
        if lo_idx < n and col[lo_idx] == v:
            return Rat(lo_idx + 1)
        return Rat(2 * lo_idx + 1, 2)

    v = inst.variant
    if v.kind == "point":
        nv = Variant("point", o=Point(tuple(map_value(a, v.o[a]) for a in range(d))))
    elif v.kind in ("line", "plane"):
        nv = Variant(v.kind, fixed=tuple((a, map_value(a, val)) for a, val in v.fixed))
    else:
        nv = v

    ranked = Instance(
        d=d,
        b0=AABox(tuple(ZERO for _ in range(d)), tuple(Rat(n + 1) for _ in range(d))),
        points=tuple(Point(tuple(row)) for row in new_coords),
        variant=nv,
    )
    return ranked, tables


def _bisect_left(col: list[Rat], v: Rat) -> int:
    lo, hi = 0, len(col)
    while lo < hi:
        mid = (lo + hi) // 2
        if col[mid] < v:
            lo = mid + 1
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# randomized optimization over pair-decomposable searches


@dataclass
class PairSearch:
    """A search whose optimum is a maximum of ``pair_value`` over S x T.

    ``pair_value(s, t)`` returns the exact value of the pair, or ``None``
    when the pair is inadmissible.
    """

    s_items: Sequence[Any]
    t_items: Sequence[Any]
    pair_value: Callable[[Any, Any], Rat | None]


@dataclass
class BestPair:
    value: Rat
    s: Any
    t: Any


def chan_optimize(
    problem: PairSearch,
    decide: Callable[[Sequence[Any], Sequence[Any], Rat], Any],
    rng,
    *,
    r0: Rat = ZERO,
    groups: int = 4,
    base_size: int = 64,
    stats: Stats | None = None,
) -> BestPair:
    """Exact maximization via the randomized decision-to-optimization scheme.

    Both sides are split into ``groups`` contiguous chunks and the
    resulting subproblem pairs are processed in uniformly random order,
    recursing into a pair only when ``decide(S_a, T_b, best)`` answers
    truthy (i.e. the subproblem may hold a pair of value > best).
    ``decide`` may err on the yes side but never on the no side.  Base
    cases (|S|+|T| <= base_size) are scanned exhaustively.

    The returned *value* is the exact maximum over admissible pairs of
    value > ``r0`` and does not depend on the rng seed (only running
    time does).  Raises :class:`InfeasibleError` when no admissible pair
    beats ``r0``.
    """
    if stats is None:
        stats = Stats()
    best_val = r0
    best: tuple[Any, Any] | None = None

    def rec(S: Sequence[Any], T: Sequence[Any]) -> None:
        nonlocal best_val, best
        if not S or not T:
            return
        if len(S) + len(T) <= base_size:
            pv = problem.pair_value
            for s in S:
                for t in T:
                    stats.inc("chan_base_pairs")
                    v = pv(s, t)
                    if v is not None and v > best_val:
                        best_val = v
                        best = (s, t)
            return
        stats.inc("chan_splits")
        Ss = _chunks(S, groups)
        Ts = _chunks(T, groups)
        order = [(a, b) for a in range(len(Ss)) for b in range(len(Ts))]
        rng.shuffle(order)
        for a, b in order:
            stats.inc("chan_decide_calls")
            if decide(Ss[a], Ts[b], best_val):
                rec(Ss[a], Ts[b])

    rec(list(problem.s_items), list(problem.t_items))
    if best is None:
        raise InfeasibleError(f"no admissible pair of value > {r0}")
    return BestPair(best_val, best[0], best[1])


def _chunks(xs: Sequence[Any], g: int) -> list[Sequence[Any]]:
    """Split into at most g contiguous near-equal nonempty chunks."""
    g = min(g, len(xs))
    q, r = divmod(len(xs), g)
    out = []
    start = 0
    for i in range(g):
        end = start + q + (1 if i < r else 0)
        out.append(xs[start:end])
        start = end
    return out


# ---------------------------------------------------------------------------
# JSON interchange


def _rat_str(x: Rat) -> str:
    return str(x)


def instance_to_json(inst: Instance) -> dict:
    v = inst.variant
    if v.kind == "unrestricted" or v.kind == "anchored":
        vj: Any = v.kind
    elif v.kind == "point":
        vj = {"kind": "point", "o": [_rat_str(c) for c in v.o]}
    elif v.kind == "plane":
        (a, val), = v.fixed
        vj = {"kind": "plane", "axis": a, "value": _rat_str(val)}
    else:
        vj = {"kind": "line", "fixed": [[a, _rat_str(val)] for a, val in v.fixed]}
    return {
        "d": inst.d,
        "b0": {
            "lo": [_rat_str(c) for c in inst.b0.lo],
            "hi": [_rat_str(c) for c in inst.b0.hi],
        },
        "points": [[_rat_str(c) for c in p] for p in inst.points],
        "variant": vj,
    }


def instance_from_json(obj: dict) -> Instance:
    vj = obj.get("variant", "unrestricted")
    if isinstance(vj, str):
        if vj not in ("unrestricted", "anchored"):
            raise ValueError(f"variant {vj!r} needs a payload")
        variant = Variant(vj)
    else:
        kind = vj["kind"]
        if kind == "point":
            variant = Variant.point_restricted(Point(tuple(rat(c) for c in vj["o"])))
        elif kind == "plane":
            variant = Variant.plane_restricted(int(vj["axis"]), rat(vj["value"]))
        elif kind == "line":
            if "fixed" in vj:
                variant = Variant.line_restricted([(int(a), rat(val)) for a, val in vj["fixed"]])
            else:
                variant = Variant("line", fixed=((int(vj["axis"]), rat(vj["value"])),))
        else:
            raise ValueError(f"unknown variant kind {kind!r}")
    return make_instance(
        int(obj["d"]), obj["b0"]["lo"], obj["b0"]["hi"], obj["points"], variant
    )


def parse_instance_text(text: str) -> Instance:
    # parse_float=str keeps decimal literals exact; rat() finishes the job
    return instance_from_json(json.loads(text, parse_float=str))


def result_to_json(res: SolveResult) -> dict:
    out: dict[str, Any] = {
        "value": {
            "num": res.value.numerator,
            "den": res.value.denominator,
            "float": float(res.value),
        },
        "stats": {"counters": dict(res.stats.counters), "wall_ns": res.stats.wall_ns},
    }
    if res.witness is not None:
        out["witness"] = {
            "lo": [_rat_str(c) for c in res.witness.lo],
            "hi": [_rat_str(c) for c in res.witness.hi],
        }
    return out
