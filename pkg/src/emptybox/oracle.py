"""Independent brute-force solvers.

These are the correctness authorities for the fast solvers: slow, simple,
exhaustive, exact.  They share nothing with the fast code paths beyond the
instance model, so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

from .core import (
    ZERO,
    AABox,
    BudgetExceededError,
    Instance,
    Rat,
    SolveResult,
    Stats,
)

if TYPE_CHECKING:  # pragma: no cover - typing only, avoids an import cycle
    from .expr import Expr
    from .rect2d import HSeg


@dataclass(frozen=True)
class OracleBudget:
    """Hard input-size caps; oracles refuse larger inputs outright."""

    max_points: int
    max_dimension: int = 6


def default_budget(d: int) -> OracleBudget:
    return OracleBudget(max_points={2: 200, 3: 60}.get(d, 25))


def _check_budget(inst: Instance, budget: OracleBudget | None) -> OracleBudget:
    b = budget if budget is not None else default_budget(inst.d)
    if inst.d > b.max_dimension:
        raise BudgetExceededError(f"d={inst.d} exceeds oracle budget {b.max_dimension}")
    if inst.n > b.max_points:
        raise BudgetExceededError(f"n={inst.n} exceeds oracle budget {b.max_points}")
    return b


def _effective_points(inst: Instance) -> list[tuple[Rat, ...]]:
    """Points that can actually block a box: strictly interior to b0."""
    return [p.coords for p in inst.points if inst.b0.interior_contains(p)]


# ---------------------------------------------------------------------------
# 2D: maximal empty rectangles


def _maximal_empty_rects(eff: list[tuple[Rat, Rat]], b0: AABox):
    """Yield every maximal empty open rectangle (x1, x2, y1, y2) in b0.

    Any maximal empty rectangle has each of its four sides either on a
    b0 wall or passing through a point that touches the open part of
    that side.  Rectangles whose left (resp. right) side is supported by
    a point are found by a rightward (leftward) sweep anchored at that
    point; full-width rectangles come from gaps in the sorted list of
    y-values.
    """
    lox, loy = b0.lo
    hix, hiy = b0.hi

    by_x: dict[Rat, list[Rat]] = {}
    for x, y in eff:
        by_x.setdefault(x, []).append(y)
    xs = sorted(by_x)

    def sweep(anchor_x: Rat, anchor_y: Rat, cols: list[Rat], left_to_right: bool):
        bot, top = loy, hiy
        for X in cols:
            ys = by_x[X]
            if any(bot < y < top for y in ys):
                if left_to_right:
                    yield anchor_x, X, bot, top
                else:
                    yield X, anchor_x, bot, top
                stop = False
                for y in ys:
                    if y > anchor_y:
                        if y < top:
                            top = y
                    elif y < anchor_y:
                        if y > bot:
                            bot = y
                    else:
                        stop = True
                if stop:
                    return
        if left_to_right:
            yield anchor_x, hix, bot, top
        else:
            yield lox, anchor_x, bot, top

    for px, py in eff:
        i = bisect.bisect_right(xs, px)
        yield from sweep(px, py, xs[i:], True)
        j = bisect.bisect_left(xs, px)
        yield from sweep(px, py, xs[j - 1 :: -1] if j else [], False)

    y_vals = [loy] + sorted({y for _, y in eff}) + [hiy]
    for y1, y2 in zip(y_vals, y_vals[1:]):
        if y1 < y2:
            yield lox, hix, y1, y2


def _rect_feasible(inst: Instance, x1: Rat, x2: Rat, y1: Rat, y2: Rat) -> bool:
    v = inst.variant
    if v.kind == "unrestricted":
        return True
    if v.kind == "point":
        ox, oy = v.o
        return x1 <= ox <= x2 and y1 <= oy <= y2
    if v.kind in ("line", "plane"):
        for axis, val in v.fixed:
            lo, hi = (x1, x2) if axis == 0 else (y1, y2)
            if not (lo <= val <= hi):
                return False
        return True
    raise ValueError(f"unsupported variant {v.kind} here")


def _anchored_2d(inst: Instance, eff: list[tuple[Rat, Rat]]) -> SolveResult:
    hix, hiy = inst.b0.hi
    if hix <= 0 or hiy <= 0:
        z = (ZERO, ZERO)
        return SolveResult(ZERO, AABox(z, z), Stats())
    blockers = sorted((x, y) for x, y in eff if x > 0 and y > 0)
    cands = sorted({x for x, _ in blockers if x < hix} | {hix})
    best_v, best_w = Rat(-1), None
    min_y = hiy
    k = 0
    for X in cands:
        while k < len(blockers) and blockers[k][0] < X:
            if blockers[k][1] < min_y:
                min_y = blockers[k][1]
            k += 1
        v = X * min_y
        if v > best_v:
            best_v, best_w = v, AABox((ZERO, ZERO), (X, min_y))
    return SolveResult(best_v, best_w, Stats())


def brute_rect2d(inst: Instance, budget: OracleBudget | None = None) -> SolveResult:
    """Exact largest empty rectangle by exhaustive enumeration (d = 2).

    Every candidate comes from the wall-quadruple space spanned by point
    coordinates and b0's walls; enumeration goes through the maximal
    empty rectangles, which dominate all variants except `anchored`
    (growing a rectangle preserves intersection constraints), and a
    dedicated staircase scan for `anchored`.
    """
    if inst.d != 2:
        raise ValueError("brute_rect2d requires d = 2")
    _check_budget(inst, budget)
    eff = _effective_points(inst)
    if inst.variant.kind == "anchored":
        return _anchored_2d(inst, eff)

    best_v, best_w = Rat(-1), None
    for x1, x2, y1, y2 in _maximal_empty_rects(eff, inst.b0):
        if not _rect_feasible(inst, x1, x2, y1, y2):
            continue
        v = (x2 - x1) * (y2 - y1)
        if v > best_v:
            best_v, best_w = v, AABox((x1, y1), (x2, y2))
    if best_w is None:
        # no maximal rectangle satisfies the variant; only possible for
        # degenerate restrictions, answered by a zero-volume box on the flat
        best_v, best_w = ZERO, _degenerate_witness(inst)
    return SolveResult(best_v, best_w, Stats())


def _degenerate_witness(inst: Instance) -> AABox:
    v = inst.variant
    if v.kind == "point":
        return AABox(v.o.coords, v.o.coords)
    if v.kind == "anchored":
        z = tuple(ZERO for _ in range(inst.d))
        return AABox(z, z)
    coords = list(inst.b0.lo)
    if v.kind in ("line", "plane"):
        for axis, val in v.fixed:
            coords[axis] = val
    c = tuple(coords)
    return AABox(c, c)


# ---------------------------------------------------------------------------
# any dimension: recursive clipping


def brute_box(inst: Instance, budget: OracleBudget | None = None) -> SolveResult:
    """Exact largest empty box by recursive clipping (d <= 6).

    A box with an interior point p splits, per axis, into the two
    clippings at p; every empty box survives into some leaf, so the
    leaves (empty boxes with walls from coordinates and b0) dominate all
    intersection variants, and carry enough structure to evaluate the
    anchored variant too.  Memoization collapses repeated subboxes and a
    volume bound prunes hopeless branches.
    """
    _check_budget(inst, budget)
    d = inst.d
    eff = _effective_points(inst)
    variant = inst.variant
    kind = variant.kind

    mid = [float(a + b) / 2.0 for a, b in zip(inst.b0.lo, inst.b0.hi)]
    wid = [float(b - a) for a, b in zip(inst.b0.lo, inst.b0.hi)]
    pts_f = [[float(c) for c in p] for p in eff]

    def feasible_box(lo, hi) -> bool:
        if kind == "unrestricted":
            return True
        if kind == "anchored":
            return all(a <= 0 for a in lo) and all(b >= 0 for b in hi)
        if kind == "point":
            return all(a <= c <= b for a, c, b in zip(lo, variant.o, hi))
        for axis, val in variant.fixed:
            if not (lo[axis] <= val <= hi[axis]):
                return False
        return True

    def value_bound(lo, hi) -> Rat:
        if kind == "anchored":
            v = Rat(1)
            for b in hi:
                if b <= 0:
                    return ZERO
                v *= b
            return v
        v = Rat(1)
        for a, b in zip(lo, hi):
            v *= b - a
        return v

    best_v: Rat = Rat(-1)
    best_w: AABox | None = None
    memo: set = set()
    stats = Stats()

    def leaf_candidate(lo, hi):
        nonlocal best_v, best_w
        if kind == "anchored":
            v = Rat(1)
            for b in hi:
                v *= b
            if v > best_v:
                best_v, best_w = v, AABox(tuple(ZERO for _ in range(d)), tuple(hi))
            return
        v = Rat(1)
        for a, b in zip(lo, hi):
            v *= b - a
        if v > best_v:
            best_v, best_w = v, AABox(tuple(lo), tuple(hi))

    def rec(lo: tuple, hi: tuple):
        nonlocal best_v
        key = (lo, hi)
        if key in memo:
            return
        memo.add(key)
        stats.inc("oracle_boxes")
        if not feasible_box(lo, hi):
            return
        if value_bound(lo, hi) <= best_v:
            return
        inside = [
            k
            for k, p in enumerate(eff)
            if all(a < c < b for a, c, b in zip(lo, p, hi))
        ]
        if not inside:
            leaf_candidate(lo, hi)
            return
        # heuristic splitter: the most central interior point (floats only
        # steer the branching order, never a predicate)
        def centrality(k: int) -> float:
            return max(
                abs(pts_f[k][i] - (float(lo[i]) + float(hi[i])) / 2.0) / wid[i]
                for i in range(d)
            )

        p = eff[min(inside, key=lambda k: (centrality(k), k))]
        for i in range(d):
            rec(lo, hi[:i] + (p[i],) + hi[i + 1 :])
            rec(lo[:i] + (p[i],) + lo[i + 1 :], hi)

    rec(inst.b0.lo, inst.b0.hi)
    if best_w is None:
        best_v, best_w = ZERO, _degenerate_witness(inst)
    return SolveResult(best_v, best_w, stats)


# ---------------------------------------------------------------------------
# segment pairs (Problems 1 and 2)


def good_pair_value(s: "HSeg", t: "HSeg") -> Rat | None:
    """The pair objective, or None when the ordering does not hold.

    Ordered means x_t^- < x_s^- < x_t^+ < x_s^+, all strict; the value
    is (x_t^+ - x_s^-) * (y_t - y_s).
    """
    if t.x_minus < s.x_minus < t.x_plus < s.x_plus:
        return (t.x_plus - s.x_minus) * (t.y - s.y)
    return None


def brute_good_pair(S: Sequence["HSeg"], T: Sequence["HSeg"], r: Rat):
    """Scan all |S|*|T| pairs; return any good pair for threshold r, else None."""
    for s in S:
        for t in T:
            v = good_pair_value(s, t)
            if v is not None and v > r:
                return (s, t)
    return None


def brute_best_pair(S: Sequence["HSeg"], T: Sequence["HSeg"], r0: Rat = ZERO):
    """Maximize the pair objective over ordered pairs; None if nothing beats r0."""
    best = None
    best_v = r0
    for s in S:
        for t in T:
            v = good_pair_value(s, t)
            if v is not None and v > best_v:
                best_v, best = v, (s, t)
    if best is None:
        return None
    return best_v, best[0], best[1]


# ---------------------------------------------------------------------------
# 2D segment construction and the nested case, the slow way


def brute_cartesian_segments(
    pts: Sequence[tuple[Rat, Rat]], b0: AABox, side: str
) -> list[tuple[Rat, Rat, Rat, tuple[Rat, Rat]]]:
    """Per-point quadratic scan for the support segment of each point.

    side="below": the segment through p runs until blocked by a point
    strictly above it (greater y); side="above" is the mirror.  Returns
    (x_minus, x_plus, y, defining point) tuples; degenerate (zero-width)
    segments are kept here so callers can see them.
    """
    lox, hix = b0.lo[0], b0.hi[0]
    out = []
    for px, py in pts:
        lo, hi = lox, hix
        for qx, qy in pts:
            blocks = qy > py if side == "below" else qy < py
            if not blocks:
                continue
            if qx <= px and qx > lo:
                lo = qx
            if qx >= px and qx < hi:
                hi = qx
        out.append((lo, hi, py, (px, py)))
    return out


def brute_nested_best(S: Sequence["HSeg"], T: Sequence["HSeg"]):
    """Containment-pair scan: for each s, the lowest t anchored strictly
    inside s's span; returns (value, s, t) maximizing span * height, or None."""
    best = None
    for s in S:
        cand = None
        for t in T:
            inside = t.source is None or s.x_minus < t.source[0] < s.x_plus
            if inside:
                if cand is None or t.y < cand.y:
                    cand = t
        if cand is not None:
            v = (s.x_plus - s.x_minus) * (cand.y - s.y)
            if best is None or v > best[0]:
                best = (v, s, cand)
    return best


def brute_region_max(e: "Expr", objective):
    """Exhaustive scan of an expression's region for the objective maximum.

    Walks every wall-respecting rank vector, keeps those where all
    predicates hold, and returns (best value, witness dict); (None, None)
    when the region is empty.
    """
    ranges = [range(lo, hi + 1) for lo, hi in e.walls]
    best = None
    arg = None
    for combo in itertools.product(*ranges):
        x = dict(zip(e.dims, combo))
        if not e.holds(x):
            continue
        v = objective.value(x)
        if best is None or v > best:
            best, arg = v, x
    return best, arg
