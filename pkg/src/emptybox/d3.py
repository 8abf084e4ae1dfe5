"""Exact 3D largest empty box through dominance lifting.

A box around the origin is encoded by its six wall distances
``(x1, x1', x2, x2', x3, x3')`` and a blocking point becomes an open
upward orthant in that 6D wall space: the point lies inside the box iff
the box's encoding dominates the orthant corner strictly.  When every
point of a set lies strictly on one side of the plane ``x1 = 0``, one of
the two first wall coordinates is unconstrained, so the orthants live in
5 effective dimensions.  The complement of their union inside the wall
box is downward closed and is captured exactly by its finitely many
maximal points; the best box compatible with a vertex ``z`` from the
left set and ``a`` from the right set has volume
``prod_k (min(z_2k, a_2k) + min(z_2k+1, a_2k+1))``, so the whole problem
is a pairwise maximization resolved by a multi-level range decomposition
plus the randomized decision-to-optimization scheme.

The unrestricted solver reduces to that asymmetric core: divide space by
a point-median plane, inside the plane by a median line, and along the
line into slabs; a box crossing a slab wall contains one concrete point
of the line, which is an origin-restricted instance after translation.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass

from .core import (
    AABox,
    Instance,
    PairSearch,
    Point,
    Rat,
    SolveResult,
    Stats,
    Variant,
    VerificationError,
    chan_optimize,
    rat,
)
from .highdim import solve_anchored

_DIM = 6
_LIVE_LEFT = (0, 2, 3, 4, 5)
_LIVE_RIGHT = (1, 2, 3, 4, 5)


# ---------------------------------------------------------------------------
# lifting


def lift_to_dominance(points, side: str) -> tuple:
    """Map blocking points to orthant corners in the 5 live wall dims.

    For a point ``p = (p1, p2, p3)`` the 6D corner is
    ``(-p1, p1, -p2, p2, -p3, p3)``; a box encoding is inside the open
    orthant above the corner iff the point is interior to the box.  On
    the ``left`` side (``p1 < 0``) the ``x1'`` wall never decides, on the
    ``right`` side (``p1 > 0``) the ``x1`` wall never decides, so that
    coordinate is dropped and generators keep 5 components.
    """
    if side not in ("left", "right"):
        raise ValueError(f"unknown side {side!r}")
    out = []
    for p in points:
        coords = tuple(rat(c) for c in (p.coords if isinstance(p, Point) else p))
        if len(coords) != 3:
            raise ValueError("lift_to_dominance needs 3D points")
        p1, p2, p3 = coords
        if side == "left":
            if p1 >= 0:
                raise ValueError(f"left point has x1 = {p1} >= 0")
            out.append((-p1, -p2, p2, -p3, p3))
        else:
            if p1 <= 0:
                raise ValueError(f"right point has x1 = {p1} <= 0")
            out.append((p1, -p2, p2, -p3, p3))
    return tuple(out)


# ---------------------------------------------------------------------------
# maximal vacant vertices


@dataclass(frozen=True)
class VertexSet:
    """Maximal points of a wall box minus a union of open upward orthants.

    The members form an antichain under coordinatewise <=, each lies in
    the wall box, and each escapes every generating orthant; the region
    they dominate is exactly the vacant set.
    """

    points: tuple

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)


def _dominates_strictly(y, g) -> bool:
    return all(a > b for a, b in zip(y, g))


def _leq(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _insert_orthant(M: list, g, rest_lo) -> list:
    """Shrink a maximal antichain by one open orthant constraint.

    Members strictly above ``g`` die; each spawns one candidate per axis
    by lowering that coordinate onto the orthant facet, and the antichain
    filter keeps exactly the new maximal points.
    """
    keep, dying = [], []
    for y in M:
        (dying if _dominates_strictly(y, g) else keep).append(y)
    if not dying:
        return M
    cands = set()
    for y in dying:
        for t, gt in enumerate(g):
            if gt >= rest_lo[t]:
                cands.add(y[:t] + (gt,) + y[t + 1 :])
    out = keep[:]
    for c in cands:
        if any(_leq(c, u) for u in keep):
            continue
        if any(_leq(c, o) and c != o for o in cands):
            continue
        out.append(c)
    out.sort()
    return out


def maximal_vacant_vertices(generators, X: AABox) -> VertexSet:
    """Maximal points of ``X`` minus the open orthants above ``generators``.

    Sweeps the first coordinate upward: the rest-dimension antichain
    starts at the upper corner and shrinks as orthants activate, and a
    member dying at activation value ``v`` is exactly a maximal point
    with first coordinate ``v``; survivors cap out at the wall.
    """
    k = X.d
    gens = []
    for g in generators:
        g = tuple(rat(c) for c in g)
        if len(g) != k:
            raise ValueError(f"generator dimension {len(g)} != {k}")
        gens.append(g)
    lo0, hi0 = X.lo[0], X.hi[0]
    rest_lo, rest_hi = X.lo[1:], X.hi[1:]
    active = sorted((g for g in gens if g[0] < hi0), key=lambda g: g[0])

    M = [tuple(rest_hi)]
    out = []
    i = 0
    while i < len(active) and M:
        j = i
        while j < len(active) and active[j][0] == active[i][0]:
            j += 1
        v = active[i][0]
        group = [g[1:] for g in active[i:j]]
        dying = [y for y in M if any(_dominates_strictly(y, g) for g in group)]
        if v >= lo0:
            out.extend((v,) + y for y in dying)
        for g in group:
            M = _insert_orthant(M, g, rest_lo)
        i = j
    out.extend((hi0,) + y for y in M)
    return VertexSet(tuple(sorted(out)))


def verify_vertex_set(vs: VertexSet, generators, X: AABox) -> None:
    """Exact invariant check: membership, vacancy, antichain."""
    gens = [tuple(rat(c) for c in g) for g in generators]
    pts = list(vs.points)
    for p in pts:
        if len(p) != X.d:
            raise VerificationError(f"vertex {p} has wrong dimension")
        if not all(a <= c <= b for a, c, b in zip(X.lo, p, X.hi)):
            raise VerificationError(f"vertex {p} escapes the wall box")
        for g in gens:
            if _dominates_strictly(p, g):
                raise VerificationError(f"vertex {p} lies inside orthant {g}")
    for a, b in itertools.combinations(pts, 2):
        if _leq(a, b) or _leq(b, a):
            raise VerificationError(f"vertices {a} and {b} are comparable")


# ---------------------------------------------------------------------------
# pairwise maximization


def pair_objective(z, a) -> Rat:
    """Volume of the best box dominated by both 6D vertices."""
    v = Rat(1)
    for t in range(3):
        v *= min(z[2 * t], a[2 * t]) + min(z[2 * t + 1], a[2 * t + 1])
    return v


_PATTERNS = tuple(itertools.product((True, False), repeat=_DIM))


def _pattern_value(z, a, pattern) -> Rat:
    v = Rat(1)
    for t in range(3):
        s0 = z[2 * t] if pattern[2 * t] else a[2 * t]
        s1 = z[2 * t + 1] if pattern[2 * t + 1] else a[2 * t + 1]
        v *= s0 + s1
    return v


class _RangeNode:
    """One level of a multi-level orthogonal range tree.

    A balanced tree over points sorted by the level's coordinate; each
    node lazily owns a next-level tree over its slice, so a half-line
    query decomposes into O(log) canonical nodes per level.
    """

    __slots__ = ("level", "pts", "lo_key", "hi_key", "left", "right", "_child")

    def __init__(self, pts: list, level: int):
        self.level = level
        self.pts = pts
        self.lo_key = pts[0][level]
        self.hi_key = pts[-1][level]
        if len(pts) > 1:
            mid = len(pts) // 2
            self.left = _RangeNode(pts[:mid], level)
            self.right = _RangeNode(pts[mid:], level)
        else:
            self.left = self.right = None
        self._child = None

    def child(self):
        if self._child is None:
            nxt = self.level + 1
            self._child = _RangeNode(sorted(self.pts, key=lambda p: p[nxt]), nxt)
        return self._child


def _build_tree(points) -> _RangeNode | None:
    pts = sorted(points, key=lambda p: p[0])
    return _RangeNode(pts, 0) if pts else None


def _collect(node: _RangeNode, want_ge: bool, bound, acc: list) -> None:
    """Canonical nodes of {a_t >= bound} (or {a_t < bound}) at one level."""
    if want_ge:
        if node.lo_key >= bound:
            acc.append(node)
            return
        if node.hi_key < bound:
            return
    else:
        if node.hi_key < bound:
            acc.append(node)
            return
        if node.lo_key >= bound:
            return
    _collect(node.left, want_ge, bound, acc)
    _collect(node.right, want_ge, bound, acc)


def _search(node: _RangeNode, z, pattern, level: int, r):
    """A vertex in the pattern's range with pattern value >= r, if any."""
    acc: list = []
    _collect(node, pattern[level], z[level], acc)
    for nd in acc:
        if level == _DIM - 1:
            for a in nd.pts:
                if _pattern_value(z, a, pattern) >= r:
                    return a
        else:
            got = _search(nd.child(), z, pattern, level + 1, r)
            if got is not None:
                return got
    return None


def max_pair_objective(Z: VertexSet, A: VertexSet, r):
    """A pair ``(z, a)`` with ``pair_objective(z, a) >= r``, else None.

    Decision form: for each ``z`` the candidate set splits by the 64
    dominance sign patterns between the coordinates of ``z`` and ``a``;
    each pattern fixes which side every minimum comes from, turning the
    objective into a closed form, and the pattern's range query is
    answered through the multi-level decomposition with an exact scan of
    every canonical subset.
    """
    for vs in (Z, A):
        for p in vs:
            if len(p) != _DIM:
                raise ValueError("max_pair_objective expects 6D vertices")
    root = _build_tree(A.points)
    if root is None:
        return None
    for z in Z:
        for pattern in _PATTERNS:
            a = _search(root, z, pattern, 0, r)
            if a is not None:
                return (z, a)
    return None


# ---------------------------------------------------------------------------
# asymmetric origin-restricted solver


def _embed(vs: VertexSet, idx: int, wall) -> VertexSet:
    return VertexSet(tuple(p[:idx] + (wall,) + p[idx:] for p in vs))


def solve_origin_restricted_3d(left_points, right_points, b0: AABox) -> SolveResult:
    """Largest box containing the origin, empty of both point sets.

    ``left_points`` must lie strictly in ``x1 < 0`` and ``right_points``
    strictly in ``x1 > 0``; the origin must be interior to ``b0``.  The
    two sides lift to 5-dimensional orthant unions whose vacant vertex
    sets Z and A reduce the problem to maximizing ``pair_objective``,
    solved exactly by the randomized decision-to-optimization scheme
    over the range-decomposition decision.
    """
    if b0.d != 3:
        raise ValueError("solve_origin_restricted_3d needs a 3D box")
    if not all(a < 0 < b for a, b in zip(b0.lo, b0.hi)):
        raise ValueError("origin must be interior to b0")
    walls = (
        -b0.lo[0], b0.hi[0], -b0.lo[1], b0.hi[1], -b0.lo[2], b0.hi[2],
    )
    stats = Stats()
    x_left = AABox.make((0,) * 5, tuple(walls[t] for t in _LIVE_LEFT))
    x_right = AABox.make((0,) * 5, tuple(walls[t] for t in _LIVE_RIGHT))
    Z = _embed(maximal_vacant_vertices(lift_to_dominance(left_points, "left"), x_left), 1, walls[1])
    A = _embed(maximal_vacant_vertices(lift_to_dominance(right_points, "right"), x_right), 0, walls[0])
    stats.inc("z_size", len(Z))
    stats.inc("a_size", len(A))

    def decide(S, T, r):
        return max_pair_objective(VertexSet(tuple(S)), VertexSet(tuple(T)), r) is not None

    rng = random.Random("origin-restricted-3d")
    best = chan_optimize(
        PairSearch(Z.points, A.points, pair_objective),
        decide,
        rng,
        r0=Rat(-1),
        stats=stats,
    )
    b = tuple(min(zc, ac) for zc, ac in zip(best.s, best.t))
    witness = AABox.make((-b[0], -b[2], -b[4]), (b[1], b[3], b[5]))
    assert witness.volume() == best.value
    return SolveResult(best.value, witness, stats)


# ---------------------------------------------------------------------------
# unrestricted 3D solver


@dataclass(frozen=True)
class Box3DConfig:
    """Slab size for the line-restricted decomposition (default sqrt(n))."""

    m: int | None = None

    def __post_init__(self):
        if self.m is not None and self.m < 1:
            raise ValueError("slab size m must be at least 1")


def _clip(b0: AABox, axis: int, lo=None, hi=None) -> AABox:
    los, his = list(b0.lo), list(b0.hi)
    if lo is not None:
        los[axis] = lo
    if hi is not None:
        his[axis] = hi
    return AABox.make(tuple(los), tuple(his))


def _full(b0: AABox):
    return (b0.volume(), b0)


def _better(a, b):
    return a if a[0] >= b[0] else b


def _lower_median(vals: list) -> Rat:
    vals = sorted(vals)
    return vals[(len(vals) - 1) // 2]


def solve_box3d(inst: Instance, config: Box3DConfig | None = None) -> SolveResult:
    """Largest empty box in 3D by median and slab divide-and-conquer.

    Space splits at a median plane, the plane-restricted case at a
    median line, and the line-restricted case into slabs along the line;
    a box whose far wall lands in a slab but which escapes it contains
    the line's crossing point with the slab wall, which after
    translation is an origin-restricted instance.
    """
    if inst.d != 3:
        raise ValueError("solve_box3d requires d = 3")
    if inst.variant.kind != "unrestricted":
        raise ValueError("solve_box3d handles the unrestricted variant")
    m_cfg = config.m if config is not None else None
    stats = Stats()
    pts = [
        p.coords
        for p in inst.points
        if all(a < c < b for a, c, b in zip(inst.b0.lo, p.coords, inst.b0.hi))
    ]
    value, witness = _box3d(pts, inst.b0, m_cfg, stats)
    return SolveResult(value, witness, stats)


def _box3d(pts: list, b0: AABox, m_cfg, stats: Stats):
    if not pts:
        return _full(b0)
    med = _lower_median([p[0] for p in pts])
    best = _plane(pts, 0, med, b0, m_cfg, stats)
    left = [p for p in pts if p[0] < med]
    right = [p for p in pts if p[0] > med]
    best = _better(best, _box3d(left, _clip(b0, 0, hi=med), m_cfg, stats))
    best = _better(best, _box3d(right, _clip(b0, 0, lo=med), m_cfg, stats))
    return best


def _plane(pts: list, pax: int, pval, b0: AABox, m_cfg, stats: Stats):
    """Best empty box whose interior meets the plane {x_pax = pval}."""
    stats.inc("plane_nodes")
    if not pts:
        return _full(b0)
    qax = (pax + 1) % 3
    med = _lower_median([p[qax] for p in pts])
    fixed = {pax: pval, qax: med}
    best = _line(pts, fixed, b0, m_cfg, stats)
    below = [p for p in pts if p[qax] < med]
    above = [p for p in pts if p[qax] > med]
    best = _better(best, _plane(below, pax, pval, _clip(b0, qax, hi=med), m_cfg, stats))
    best = _better(best, _plane(above, pax, pval, _clip(b0, qax, lo=med), m_cfg, stats))
    return best


def _line(pts: list, fixed: dict, b0: AABox, m_cfg, stats: Stats):
    """Best empty box whose interior meets the axis line through ``fixed``."""
    stats.inc("line_nodes")
    if not pts:
        return _full(b0)
    if len(pts) <= 3:
        return _tiny_line(pts, fixed, b0, stats)
    (rax,) = (t for t in range(3) if t not in fixed)
    values = sorted({p[rax] for p in pts})
    if len(values) == 1:
        return _shared_coordinate_line(pts, rax, fixed, b0, values[0], stats)

    n = len(pts)
    m = m_cfg if m_cfg is not None else math.isqrt(n - 1) + 1
    ordered = sorted(pts, key=lambda p: p[rax])
    cuts: list = []
    since = 0
    for a, b in zip(ordered, ordered[1:]):
        since += 1
        if since >= m and a[rax] != b[rax]:
            cuts.append((a[rax] + b[rax]) / 2)
            since = 0
    if not cuts:
        # a dominant value group swallowed every window; cut at the
        # boundary nearest the median to guarantee progress
        idx = next(i for i, (a, b) in enumerate(zip(ordered, ordered[1:])) if a[rax] != b[rax])
        for i, (a, b) in enumerate(zip(ordered, ordered[1:])):
            if a[rax] != b[rax] and abs(i - n // 2) < abs(idx - n // 2):
                idx = i
        cuts.append((ordered[idx][rax] + ordered[idx + 1][rax]) / 2)

    bounds = [b0.lo[rax]] + cuts + [b0.hi[rax]]
    slabs = [
        [p for p in pts if lo < p[rax] < hi]
        for lo, hi in zip(bounds, bounds[1:])
    ]
    best = (Rat(-1), None)
    for i, cut in enumerate(cuts):
        stats.inc("asym_calls")
        clipped = _clip(b0, rax, hi=bounds[i + 2])
        prefix = [p for p in pts if p[rax] < cut]
        best = _better(best, _asym(prefix, slabs[i + 1], rax, fixed, cut, clipped))
    for slab, lo, hi in zip(slabs, bounds, bounds[1:]):
        stats.inc("slabs")
        best = _better(best, _line(slab, fixed, _clip(b0, rax, lo=lo, hi=hi), m_cfg, stats))
    return best


def _asym(prefix: list, slab: list, rax: int, fixed: dict, cut, b0: AABox):
    """Boxes through the line point at ``cut``: translate and permute to
    the origin-restricted form with ``rax`` first."""
    o1, o2 = sorted(t for t in range(3) if t != rax)
    origin = {rax: cut, o1: fixed[o1], o2: fixed[o2]}
    perm = (rax, o1, o2)

    def fwd(p):
        return tuple(p[t] - origin[t] for t in perm)

    left = [fwd(p) for p in prefix]
    right = [fwd(p) for p in slab]
    box = AABox.make(
        tuple(b0.lo[t] - origin[t] for t in perm),
        tuple(b0.hi[t] - origin[t] for t in perm),
    )
    res = solve_origin_restricted_3d(left, right, box)
    lo = [None] * 3
    hi = [None] * 3
    for s, t in enumerate(perm):
        lo[t] = res.witness.lo[s] + origin[t]
        hi[t] = res.witness.hi[s] + origin[t]
    return (res.value, AABox.make(tuple(lo), tuple(hi)))


def _shared_coordinate_line(pts, rax, fixed, b0, val, stats: Stats):
    """Every point shares the line coordinate ``val``: boxes dodging the
    plane {x_rax = val} are unblocked, and boxes straddling it reduce to
    an anchored 2D instance in the cross-section."""
    stats.inc("shared_coordinate")
    best = (Rat(-1), None)
    if val > b0.lo[rax]:
        best = _better(best, _full(_clip(b0, rax, hi=val)))
    if val < b0.hi[rax]:
        best = _better(best, _full(_clip(b0, rax, lo=val)))
    o1, o2 = sorted(t for t in range(3) if t != rax)
    box2 = AABox.make(
        (b0.lo[o1] - fixed[o1], b0.lo[o2] - fixed[o2]),
        (b0.hi[o1] - fixed[o1], b0.hi[o2] - fixed[o2]),
    )
    proj = tuple(Point((p[o1] - fixed[o1], p[o2] - fixed[o2])) for p in pts)
    res = solve_anchored(Instance(2, box2, proj, Variant.anchored()))
    depth = b0.hi[rax] - b0.lo[rax]
    lo = [None] * 3
    hi = [None] * 3
    lo[rax], hi[rax] = b0.lo[rax], b0.hi[rax]
    lo[o1], hi[o1] = res.witness.lo[0] + fixed[o1], res.witness.hi[0] + fixed[o1]
    lo[o2], hi[o2] = res.witness.lo[1] + fixed[o2], res.witness.hi[1] + fixed[o2]
    return _better(best, (res.value * depth, AABox.make(tuple(lo), tuple(hi))))


def _tiny_line(pts: list, fixed: dict, b0: AABox, stats: Stats):
    """Direct enumeration over wall candidates for up to a few points."""
    stats.inc("tiny_calls")
    pairs = []
    for t in range(3):
        lows = {b0.lo[t]} | {p[t] for p in pts if b0.lo[t] < p[t] < b0.hi[t]}
        his = {b0.hi[t]} | {p[t] for p in pts if b0.lo[t] < p[t] < b0.hi[t]}
        ok = []
        for a in sorted(lows):
            for b in sorted(his):
                if a >= b:
                    continue
                if t in fixed and not (a < fixed[t] < b):
                    continue
                ok.append((a, b))
        pairs.append(ok)
    best = (Rat(-1), None)
    for (x1, x2), (y1, y2), (z1, z2) in itertools.product(*pairs):
        lo, hi = (x1, y1, z1), (x2, y2, z2)
        if any(all(a < c < b for a, c, b in zip(lo, p, hi)) for p in pts):
            continue
        v = (x2 - x1) * (y2 - y1) * (z2 - z1)
        if v > best[0]:
            best = (v, AABox.make(lo, hi))
    return best
