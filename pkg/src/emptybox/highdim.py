"""Exact largest empty box solvers in any fixed dimension.

Geometry enters through two liftings.  An anchored box (0,x_1) x ... x
(0,x_d) is blocked by a point p exactly when x lies in the open orthant
beyond p, so the anchored problem maximizes the volume product over the
part of a rank grid outside a union of orthants.  A box around a fixed
interior point o (translated to the origin) splits each axis into its
negative and positive reach, becoming a point in 2d dimensions blocked
by orthants the same way, with the volume turning into the paired-sum
product (x_1 + x_2)(x_3 + x_4)...

Both solvers then run the same playbook:

* partition the grid by flats through orthant faces, and keep splitting
  cells until every obstacle shows at most two of its sides inside,
* fold the 1-sided obstacles into the cell walls (their union is the
  complement of a box),
* compress the 2-sided residue into staircase predicates and hand those
  to the elimination engine, which halves the live dimensions,
* finish terminals by direct range or graph maximization.

Everything here works on integer ranks with exact rational values, and
every step function value is assumed nonnegative: the maximizations
factor products termwise, which is only sound for the volume-shaped
objectives this module exists for.
"""

from __future__ import annotations

import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass

from .core import (
    AABox,
    InfeasibleError,
    Instance,
    Rat,
    SolveResult,
    Stats,
)
from .expr import (
    Edge,
    Expr,
    GFunc,
    Pred,
    SimpleFunc,
    _clamp,
    _compare,
    _stepfn_mul,
    eliminate_all,
    rewrite_normalize,
)
from .partition import AxisFlat, build_partition
from .stepfn import BiStepFn, Orthant, StepFn, range_max, staircase_of_orthants

__all__ = [
    "Orthant",
    "ObjectiveSpec",
    "GenGFunc",
    "max_simple_over_complement",
    "max_gfunc_over_box",
    "max_gfunc_over_box_complement",
    "max_genG_over_box",
    "solve_2sided_anchored",
    "solve_2sided_box",
    "solve_2sided_anchored_improved",
    "solve_anchored",
    "solve_box_hd",
]


def _isqrt_ceil(n: int) -> int:
    return math.isqrt(n - 1) + 1 if n > 1 else 1


def _icbrt_ceil(n: int) -> int:
    r = 1
    while r * r * r < n:
        r += 1
    return r


# ---------------------------------------------------------------------------
# objectives


@dataclass(frozen=True)
class GenGFunc:
    """H(x) = scale * prod h_i(x_i) * prod W_e(x_u, x_v).

    The graph generalization with bivariate step terms: each edge
    carries a full grid function instead of a sum of two sides.
    """

    dims: tuple
    h: tuple
    gedges: tuple
    scale: Rat = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        h = tuple(sorted(((int(k), f) for k, f in self.h), key=lambda kv: kv[0]))
        if len({k for k, _f in h}) != len(h):
            raise ValueError("one univariate factor per dimension")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "gedges", tuple(tuple(e) for e in self.gedges))
        live = set(self.dims)
        for u, v, w in self.gedges:
            if u not in live or v not in live:
                raise ValueError("edge endpoint is not a live dimension")
            if u == v:
                raise ValueError("bivariate terms need two distinct dimensions")
            if not isinstance(w, BiStepFn):
                raise ValueError("edge term must be a bivariate step function")
        if any(k not in live for k, _f in self.h):
            raise ValueError("objective references a dimension it does not carry")

    def h_of(self, dim: int):
        for k, f in self.h:
            if k == dim:
                return f
        return None

    def degree(self, dim: int) -> int:
        return sum((u == dim) + (v == dim) for u, v, _w in self.gedges)

    def value(self, x) -> Rat:
        v = self.scale
        for k, f in self.h:
            v *= f.at(x[k])
        for u, vv, w in self.gedges:
            v *= w.at(x[u], x[vv])
        return v


_OBJECTIVE_KINDS = ("vol", "newvol", "simple", "gfunc", "gen_gfunc")


@dataclass(frozen=True)
class ObjectiveSpec:
    """What a solver maximizes: a named volume form or an explicit function.

    ``vol`` is the plain product x_1...x_d, ``newvol`` the paired-sum
    product (x_1+x_2)(x_3+x_4)...; both are realized over per-dimension
    rank-to-value maps.  The remaining kinds wrap an already-built
    SimpleFunc / GFunc / GenGFunc.
    """

    kind: str
    payload: object = None

    def __post_init__(self):
        if self.kind not in _OBJECTIVE_KINDS:
            raise ValueError(f"unknown objective kind {self.kind!r}")
        want = {"simple": SimpleFunc, "gfunc": GFunc, "gen_gfunc": GenGFunc}
        if self.kind in want:
            if not isinstance(self.payload, want[self.kind]):
                raise ValueError(f"{self.kind} objective needs a {want[self.kind].__name__}")
        elif self.payload is not None:
            raise ValueError(f"{self.kind} objective takes no payload")

    def realize(self, sides):
        """Instantiate over rank-to-value maps, one increasing StepFn per dim."""
        d = len(sides)
        if self.kind == "vol":
            dims = tuple(range(d))
            return SimpleFunc(dims, tuple(enumerate(sides)), frozenset(dims))
        if self.kind == "newvol":
            if d % 2:
                raise ValueError("newvol needs an even number of dimensions")
            dims = tuple(range(d))
            edges = tuple(
                Edge(2 * t, 2 * t + 1, sides[2 * t], sides[2 * t + 1])
                for t in range(d // 2)
            )
            return GFunc(dims, (), edges, frozenset(dims))
        if len(self.payload.dims) != d:
            raise ValueError("objective dimension mismatch")
        return self.payload


# ---------------------------------------------------------------------------
# per-cell side classification

# An obstacle is a conjunction of closed per-dimension rays ("sides"),
# which covers both orthants and boxes.  Within a cell, each side either
# holds everywhere, fails everywhere, or genuinely varies; the refinement
# below splits cells until at most `limit` sides of any obstacle vary,
# after which the obstacle is locally a point-free slab or halfspace.


def _orthant_sides(o: Orthant) -> tuple:
    return tuple(
        (k, op, int(a)) for k, c in enumerate(o.constraints) if c is not None for op, a in (c,)
    )


def _box_sides(b: AABox) -> tuple:
    out = []
    for k in range(b.d):
        out.append((k, "ge", int(b.lo[k])))
        out.append((k, "le", int(b.hi[k])))
    return tuple(out)


def _refine_cells(box: AABox, obstacles, limit: int, stats: Stats):
    """Yield (lo, hi, actives) subcells where every obstacle is simple.

    ``actives`` holds, for each obstacle meeting the subcell, the sides
    that still vary inside it (an empty list means the obstacle covers
    the subcell).  Sides are classified against the closed cell, so a
    threshold on a shared cell face counts as varying; the partition's
    conflict lists alone cannot see those, which is why this pass
    re-checks every obstacle exactly.
    """
    stack = [([int(v) for v in box.lo], [int(v) for v in box.hi])]
    while stack:
        lo, hi = stack.pop()
        actives = []
        split = None
        for sides in obstacles:
            acts = []
            dead = False
            for k, op, a in sides:
                if op == "ge":
                    if a <= lo[k]:
                        continue
                    if a > hi[k]:
                        dead = True
                        break
                else:
                    if a >= hi[k]:
                        continue
                    if a < lo[k]:
                        dead = True
                        break
                acts.append((k, op, a))
            if dead:
                continue
            if len(acts) > limit:
                split = acts[0]
                break
            actives.append(acts)
        if split is None:
            yield lo, hi, actives
            continue
        stats.inc("cell_splits")
        k, op, a = split
        cut = a - 1 if op == "ge" else a
        left_hi = list(hi)
        left_hi[k] = cut
        right_lo = list(lo)
        right_lo[k] = cut + 1
        stack.append((lo, left_hi))
        stack.append((right_lo, hi))


def _allowed_box(lo, hi, singles):
    """Intersect cell [lo,hi] with the complements of 1-sided obstacles."""
    alo, ahi = list(lo), list(hi)
    for k, op, a in singles:
        if op == "ge":
            ahi[k] = min(ahi[k], a - 1)
        else:
            alo[k] = max(alo[k], a + 1)
    if any(a > b for a, b in zip(alo, ahi)):
        return None
    return alo, ahi


def _range_argmax(h: StepFn | None, lo: int, hi: int):
    """Maximum of h on [lo, hi] together with the lowest attaining rank."""
    if lo > hi:
        raise ValueError("empty range")
    if h is None:
        return 1, lo
    i = bisect_right(h.breakpoints, lo)
    j = bisect_right(h.breakpoints, hi)
    best_v, best_x = h.values[i], lo
    for t in range(i + 1, j + 1):
        if h.values[t] > best_v:
            best_v, best_x = h.values[t], h.breakpoints[t - 1]
    return best_v, best_x


# ---------------------------------------------------------------------------
# simple products over orthant complements


def _pair_flats(side_lists, want: int):
    """Axis flats through every `want`-subset of each obstacle's sides."""
    flats = []
    for sides in side_lists:
        if len(sides) < want:
            continue
        for combo in itertools.combinations(sides, want):
            if len({k for k, _op, _a in combo}) == want:
                flats.append(AxisFlat.of({k: a for k, _op, a in combo}))
    return flats


def _max_simple_core(H: SimpleFunc, orths, b0: AABox, stats: Stats):
    d = b0.d
    obstacles = [_orthant_sides(o) for o in orths]
    flats = _pair_flats(obstacles, 2)
    r = _isqrt_ceil(max(1, len(orths)))
    best = None
    for cell in build_partition(flats, r, b0):
        stats.inc("cells")
        for lo, hi, actives in _refine_cells(cell.box, obstacles, 1, stats):
            if any(not acts for acts in actives):
                continue
            allowed = _allowed_box(lo, hi, [acts[0] for acts in actives])
            if allowed is None:
                continue
            val = H.scale
            pt = []
            for k in range(d):
                v, x = _range_argmax(H.h_of(k), allowed[0][k], allowed[1][k])
                val *= v
                pt.append(x)
            if best is None or val > best[0]:
                best = (val, pt)
    return best


def _check_axes(H, b0: AABox) -> None:
    if tuple(H.dims) != tuple(range(b0.d)):
        raise ValueError("objective must be labeled 0..d-1 to match the box axes")


def _point_box(pt) -> AABox:
    c = tuple(Rat(v) for v in pt)
    return AABox(c, c)


def max_simple_over_complement(H: SimpleFunc, orths, b0: AABox) -> SolveResult:
    """Exact max of a product objective over b0 minus a union of orthants.

    Partitions by the flats through pairs of orthant sides with
    r = ceil(sqrt(n)), refines cells until every orthant is at most
    1-sided inside, folds the survivors into a per-cell box, and takes
    per-dimension range maxima.  The witness is the maximizing rank
    point (a degenerate box).
    """
    _check_axes(H, b0)
    for o in orths:
        if o.d != b0.d:
            raise ValueError("orthant dimension mismatch")
    stats = Stats()
    best = _max_simple_core(H, orths, b0, stats)
    if best is None:
        raise InfeasibleError("region empty")
    return SolveResult(best[0], _point_box(best[1]), stats)


# ---------------------------------------------------------------------------
# graph products over boxes

# Lines are (slope, intercept) pairs; the upper envelope is the standard
# convex-hull construction, exact over rationals.


def _upper_envelope(lines):
    lines = sorted(set(lines))
    hull = []
    for a, b in lines:
        while hull:
            a2, b2 = hull[-1]
            if a2 == a:
                hull.pop()
                continue
            if len(hull) >= 2:
                a1, b1 = hull[-2]
                x = Rat(b1 - b2, a2 - a1)
                if a * x + b >= a2 * x + b2:
                    hull.pop()
                    continue
            break
        hull.append((a, b))
    cuts = [Rat(b1 - b2, a2 - a1) for (a1, b1), (a2, b2) in zip(hull, hull[1:])]
    return cuts, hull


def _env_at(env, x) -> Rat:
    cuts, hull = env
    a, b = hull[bisect_right(cuts, x)]
    return a * x + b


def _piece_starts(lo: int, hi: int, *fns) -> list:
    """Ranks where any of the step functions changes inside [lo, hi]."""
    pts = {lo}
    for f in fns:
        if f is None:
            continue
        grid = f.breakpoints if isinstance(f, StepFn) else f
        pts.update(b for b in grid if lo < b <= hi)
    return sorted(pts)


def _mul_opt(a: StepFn | None, b: StepFn) -> StepFn:
    return b if a is None else _stepfn_mul(a, b)


def _plus_const(f: StepFn, c) -> StepFn:
    return StepFn("unconstrained", f.breakpoints, tuple(v + c for v in f.values))


def _graph_max(h: dict, edges: list, walls: dict):
    """Exact max of prod h_i(x_i) * prod (fu+fv) over a wall box.

    Handles a general pseudo-forest: trees by repeated leaf elimination
    through upper envelopes of lines, 1-trees by enumerating the piece
    settings of one cycle vertex.  Returns (value, assignment).
    """
    verts = sorted(walls)
    parent = {v: v for v in verts}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in edges:
        ra, rb = find(e.u), find(e.v)
        if ra != rb:
            parent[ra] = rb
    comps: dict = {}
    for v in verts:
        comps.setdefault(find(v), ([], []))[0].append(v)
    for e in edges:
        comps[find(e.u)][1].append(e)

    total = Rat(1)
    assign: dict = {}
    for root in sorted(comps):
        cv, ce = comps[root]
        if len(ce) > len(cv):
            raise ValueError("objective graph is not a pseudo-forest")
        if len(ce) == len(cv):
            val, sub = _onetree_max(h, cv, ce, walls)
        else:
            val, sub = _tree_max(h, cv, ce, walls)
        total *= val
        assign.update(sub)
    return total, assign


def _tree_max(h: dict, cv: list, ce: list, walls: dict):
    hs = {v: h.get(v) for v in cv}
    alive = list(ce)
    log = []
    while alive:
        deg: dict = {}
        for e in alive:
            deg[e.u] = deg.get(e.u, 0) + 1
            deg[e.v] = deg.get(e.v, 0) + 1
        leaf = min(v for v in deg if deg[v] == 1)
        ei = next(t for t, e in enumerate(alive) if leaf in e.ends())
        e = alive.pop(ei)
        fu, other, fo = (e.fu, e.v, e.fv) if e.u == leaf else (e.fv, e.u, e.fu)
        lo, hi = walls[leaf]
        cands = _piece_starts(lo, hi, hs[leaf], fu)
        lines = []
        for x in cands:
            hx = hs[leaf].at(x) if hs[leaf] is not None else Rat(1)
            lines.append((hx, hx * fu.at(x)))
        env = _upper_envelope(lines)
        # the eliminated factor becomes F(fo(x_other)), a step function
        grown = StepFn(
            "unconstrained", fo.breakpoints, tuple(_env_at(env, v) for v in fo.values)
        )
        hs[other] = _mul_opt(hs.get(other), grown)
        log.append((leaf, other, hs[leaf] if hs[leaf] is not None else None, fu, fo, cands))
        del hs[leaf]
    # a tree always reduces to a single vertex; isolated input vertices
    # arrive here with no edges and fall through the same way
    root = min(hs)
    val, x = _range_argmax(hs[root], walls[root][0], walls[root][1])
    assign = {root: x}
    for leaf, other, hleaf, fu, fo, cands in reversed(log):
        xi = fo.at(assign[other])
        best = None
        for x in cands:
            hx = hleaf.at(x) if hleaf is not None else Rat(1)
            v = hx * (fu.at(x) + xi)
            if best is None or v > best[0]:
                best = (v, x)
        assign[leaf] = best[1]
    return val, assign


def _onetree_max(h: dict, cv: list, ce: list, walls: dict):
    # strip hanging trees to find the cycle, then enumerate one cycle vertex
    deg: dict = {v: 0 for v in cv}
    for e in ce:
        deg[e.u] += 1
        deg[e.v] += 1
    alive = [True] * len(ce)
    queue = [v for v in cv if deg[v] == 1]
    while queue:
        v = queue.pop()
        if deg[v] != 1:
            continue
        for t, e in enumerate(ce):
            if alive[t] and v in e.ends():
                alive[t] = False
                other = e.v if e.u == v else e.u
                deg[v] -= 1
                deg[other] -= 1
                if deg[other] == 1:
                    queue.append(other)
                break
    cyc = min(v for v in cv if deg[v] > 0)
    lo, hi = walls[cyc]
    incident = [f for e in ce for end, f in ((e.u, e.fu), (e.v, e.fv)) if end == cyc]
    cands = _piece_starts(lo, hi, h.get(cyc), *incident)
    best = None
    for t in cands:
        factor = h[cyc].at(t) if h.get(cyc) is not None else Rat(1)
        h2 = {v: h.get(v) for v in cv if v != cyc}
        rest = []
        for e in ce:
            if cyc not in e.ends():
                rest.append(e)
            elif e.u == cyc and e.v == cyc:
                factor *= e.fu.at(t) + e.fv.at(t)
            else:
                fc, other, fo = (e.fu, e.v, e.fv) if e.u == cyc else (e.fv, e.u, e.fu)
                h2[other] = _mul_opt(h2.get(other), _plus_const(fo, fc.at(t)))
        val, sub = _graph_max(h2, rest, {v: walls[v] for v in cv if v != cyc})
        v = factor * val
        if best is None or v > best[0]:
            best = (v, {**sub, cyc: t})
    return best


def max_gfunc_over_box(H: GFunc, b0: AABox) -> SolveResult:
    """Exact max of a pseudo-forest graph objective over a box."""
    _check_axes(H, b0)
    stats = Stats()
    walls = {k: (int(b0.lo[k]), int(b0.hi[k])) for k in range(b0.d)}
    val, assign = _graph_max(dict(H.h), list(H.edges), walls)
    pt = [assign[k] for k in range(b0.d)]
    return SolveResult(H.scale * val, _point_box(pt), stats)


def _gfunc_breakpoint_flats(H) -> list:
    flats = []
    for k, f in H.h:
        flats.extend(AxisFlat.of({k: b}) for b in f.breakpoints)
    for e in getattr(H, "edges", ()):
        flats.extend(AxisFlat.of({e.u: b}) for b in e.fu.breakpoints)
        flats.extend(AxisFlat.of({e.v: b}) for b in e.fv.breakpoints)
    for u, v, w in getattr(H, "gedges", ()):
        flats.extend(AxisFlat.of({u: b}) for b in w.xs)
        flats.extend(AxisFlat.of({v: b}) for b in w.ys)
    return flats


def _complement_core(H, boxes, b0: AABox, stats: Stats, inner):
    obstacles = [_box_sides(b) for b in boxes]
    flats = _pair_flats(obstacles, 2) + _gfunc_breakpoint_flats(H)
    r = _isqrt_ceil(max(1, len(boxes)))
    best = None
    for cell in build_partition(flats, r, b0):
        stats.inc("cells")
        for lo, hi, actives in _refine_cells(cell.box, obstacles, 1, stats):
            if any(not acts for acts in actives):
                continue
            allowed = _allowed_box(lo, hi, [acts[0] for acts in actives])
            if allowed is None:
                continue
            walls = {k: (allowed[0][k], allowed[1][k]) for k in range(b0.d)}
            val, assign = inner(walls)
            if best is None or val > best[0]:
                best = (val, [assign[k] for k in range(b0.d)])
    return best


def max_gfunc_over_box_complement(H: GFunc, boxes, b0: AABox) -> SolveResult:
    """Exact max of a pseudo-forest objective over b0 minus a union of boxes.

    Partitions by the flats through pairs of box facets plus one flat
    per breakpoint of H, refines until every box is at most 1-sided per
    cell, and runs the box maximizer on what remains.
    """
    _check_axes(H, b0)
    stats = Stats()

    def inner(walls):
        return _graph_max(dict(H.h), list(H.edges), walls)

    best = _complement_core(H, boxes, b0, stats, inner)
    if best is None:
        raise InfeasibleError("region empty")
    return SolveResult(H.scale * best[0], _point_box(best[1]), stats)


# ---------------------------------------------------------------------------
# staircase predicates and their inverse

def _staircase_preds(orths, d: int) -> tuple:
    """One predicate per (dims, pattern) group, complementing the union."""
    groups: dict = {}
    for o in orths:
        if o.d != d:
            raise ValueError("orthant dimension mismatch")
        if o.sidedness != 2:
            raise ValueError("orthants must be 2-sided here")
        i, j = o.constrained_dims()
        pat = (o.constraints[i][0], o.constraints[j][0])
        groups.setdefault((i, j, pat), []).append(o)
    preds = []
    for (i, j, pat), grp in sorted(groups.items()):
        f = staircase_of_orthants(grp)
        preds.append(Pred(i, "le" if pat[0] == "ge" else "ge", f, j))
    return tuple(preds)


def _pred_orthants(p: Pred, d: int, axis: dict) -> list:
    """Map a predicate back to the orthants whose union it complements.

    The forbidden set of [x_s <= f(x_a)] is {x_s > f(x_a)}, a staircase
    region, which decomposes into at most one orthant per piece of f;
    likewise for the >= side.  Infinite piece values drop the
    corresponding side (or the whole piece when unsatisfiable).
    """
    s = axis[p.subject]
    f = p.rhs
    if p.argument is None:
        c = f.values[0]
        if p.op == "le":
            return [] if c == math.inf else [Orthant.of(d, {s: ("ge", int(c) + 1)})]
        return [] if c == -math.inf else [Orthant.of(d, {s: ("le", int(c) - 1)})]
    a = axis[p.argument]
    starts = (-math.inf,) + f.breakpoints + (math.inf,)
    inc = f.direction == "increasing"
    out = []
    for t, v in enumerate(f.values):
        spec = {}
        if p.op == "le":
            # forbid x_s > f(x_a)
            if v == math.inf:
                continue
            if v != -math.inf:
                spec[s] = ("ge", int(v) + 1)
            if inc and starts[t + 1] != math.inf:
                spec[a] = ("le", int(starts[t + 1]) - 1)
            elif not inc and starts[t] != -math.inf:
                spec[a] = ("ge", int(starts[t]))
        else:
            # forbid x_s < f(x_a)
            if v == -math.inf:
                continue
            if v != math.inf:
                spec[s] = ("le", int(v) - 1)
            if inc and starts[t] != -math.inf:
                spec[a] = ("ge", int(starts[t]))
            elif not inc and starts[t + 1] != math.inf:
                spec[a] = ("le", int(starts[t + 1]) - 1)
        if spec:
            out.append(Orthant.of(d, spec))
    return out


def _clip_orthant(o: Orthant, lo, hi) -> AABox | None:
    blo, bhi = list(lo), list(hi)
    for k, c in enumerate(o.constraints):
        if c is None:
            continue
        op, a = c
        if op == "ge":
            blo[k] = max(blo[k], a)
        else:
            bhi[k] = min(bhi[k], a)
    if any(a > b for a, b in zip(blo, bhi)):
        return None
    return AABox(tuple(Rat(v) for v in blo), tuple(Rat(v) for v in bhi))


def _walls_of(b0: AABox) -> tuple:
    return tuple((int(a), int(b)) for a, b in zip(b0.lo, b0.hi))


def _wall_box(walls) -> AABox:
    return AABox(tuple(Rat(a) for a, _b in walls), tuple(Rat(b) for _a, b in walls))


def _recover_point(pt: dict, log) -> dict:
    x = dict(pt)
    for i, f, j in reversed(log):
        x[i] = f.at(x[j]) if j is not None else f.values[0]
    return x


# ---------------------------------------------------------------------------
# the two 2-sided pipelines


def solve_2sided_anchored(orths, b0: AABox, H: SimpleFunc) -> SolveResult:
    """Exact max of a simple product over b0 minus 2-sided orthants.

    Groups the orthants into staircase predicates, eliminates every
    variable through the expression engine (anchored mode), and solves
    each terminal, now over at most floor(d/2) dimensions, as an
    orthant-complement problem again.  The witness point is rebuilt
    from the elimination log.
    """
    _check_axes(H, b0)
    d = b0.d
    if H.free != frozenset(range(d)):
        raise ValueError("every dimension must be free initially")
    stats = Stats()
    e = Expr(tuple(range(d)), _staircase_preds(orths, d), _walls_of(b0))
    best = None
    for br in eliminate_all(e, H, "anchored"):
        stats.inc("branches")
        got = _anchored_terminal(br, stats)
        if got is None:
            continue
        val, pt = got
        if best is None or val > best[0]:
            best = (val, _recover_point(pt, br.eliminated))
    if best is None:
        raise InfeasibleError("region empty")
    pt = [best[1][k] for k in range(d)]
    return SolveResult(best[0], _point_box(pt), stats)


def _anchored_terminal(br, stats: Stats):
    e, Ht = br.expr, br.objective
    k = len(e.dims)
    if k == 0:
        return Ht.scale, {}
    axis = {dim: t for t, dim in enumerate(e.dims)}
    orths = [o for p in e.preds for o in _pred_orthants(p, k, axis)]
    H2 = SimpleFunc(
        tuple(range(k)), [(axis[dim], f) for dim, f in Ht.h], frozenset(), Ht.scale
    )
    best = _max_simple_core(H2, orths, _wall_box(e.walls), stats)
    if best is None:
        return None
    return best[0], {dim: best[1][axis[dim]] for dim in e.dims}


def _identity_sides(walls) -> tuple:
    out = []
    for lo, hi in walls:
        vals = tuple(range(lo, hi + 1))
        out.append(StepFn("increasing", tuple(range(lo + 1, hi + 1)), vals))
    return tuple(out)


def solve_2sided_box(orths, b0: AABox, sides=None) -> SolveResult:
    """Exact max of the paired-sum product over b0 minus 2-sided orthants.

    Same pipeline as the anchored case but in box mode: the objective
    starts as the matching graph with one edge per consecutive
    dimension pair, eliminations keep it a pseudo-forest, and every
    terminal (all components 1-trees) is a box-complement instance of
    the graph maximizer.  ``sides`` maps ranks to coordinate values per
    dimension and defaults to the rank identity.
    """
    d = b0.d
    if d % 2:
        raise ValueError("the paired-sum objective needs an even dimension")
    walls = _walls_of(b0)
    if sides is None:
        sides = _identity_sides(walls)
    if len(sides) != d:
        raise ValueError("one rank-to-value map per dimension")
    stats = Stats()
    H = ObjectiveSpec("newvol").realize(sides)
    e = Expr(tuple(range(d)), _staircase_preds(orths, d), walls)
    best = None
    for br in eliminate_all(e, H, "box"):
        stats.inc("branches")
        got = _box_terminal(br, stats)
        if got is None:
            continue
        val, pt = got
        if best is None or val > best[0]:
            best = (val, _recover_point(pt, br.eliminated))
    if best is None:
        raise InfeasibleError("region empty")
    pt = [best[1][k] for k in range(d)]
    return SolveResult(best[0], _point_box(pt), stats)


def _box_terminal(br, stats: Stats):
    e, Ht = br.expr, br.objective
    k = len(e.dims)
    if k == 0:
        return Ht.scale, {}
    axis = {dim: t for t, dim in enumerate(e.dims)}
    lo = [w[0] for w in e.walls]
    hi = [w[1] for w in e.walls]
    boxes = []
    for p in e.preds:
        for o in _pred_orthants(p, k, axis):
            clipped = _clip_orthant(o, lo, hi)
            if clipped is not None:
                boxes.append(clipped)
    H2 = GFunc(
        tuple(range(k)),
        [(axis[dim], f) for dim, f in Ht.h],
        tuple(Edge(axis[ed.u], axis[ed.v], ed.fu, ed.fv) for ed in Ht.edges),
        frozenset(),
        Ht.scale,
    )

    def inner(walls):
        return _graph_max(dict(H2.h), list(H2.edges), walls)

    best = _complement_core(H2, boxes, _wall_box(e.walls), stats, inner)
    if best is None:
        return None
    return Ht.scale * best[0], {dim: best[1][axis[dim]] for dim in e.dims}


# ---------------------------------------------------------------------------
# the generalized route (bivariate window terms)


def max_genG_over_box(H: GenGFunc, b0: AABox) -> SolveResult:
    """Exact max of a matching-shaped generalized objective over a box.

    Isolated dimensions contribute range maxima; each matched edge is
    scanned exactly over the piece grid of its two dimensions.
    """
    _check_axes(H, b0)
    if any(H.degree(k) > 1 for k in H.dims):
        raise ValueError("generalized objective must be a matching")
    stats = Stats()
    walls = _walls_of(b0)
    val, assign = _genG_core(H, walls)
    pt = [assign[k] for k in range(b0.d)]
    return SolveResult(val, _point_box(pt), stats)


def _genG_core(H: GenGFunc, walls):
    val = H.scale
    assign = {}
    matched = {u for u, v, _w in H.gedges} | {v for _u, v, _w in H.gedges}
    for k in H.dims:
        if k in matched:
            continue
        v, x = _range_argmax(H.h_of(k), walls[k][0], walls[k][1])
        val *= v
        assign[k] = x
    for u, v, w in H.gedges:
        cu = _piece_starts(walls[u][0], walls[u][1], H.h_of(u), w.xs)
        cv = _piece_starts(walls[v][0], walls[v][1], H.h_of(v), w.ys)
        hu, hv = H.h_of(u), H.h_of(v)
        best = None
        for a in cu:
            fa = hu.at(a) if hu is not None else Rat(1)
            for b in cv:
                fb = hv.at(b) if hv is not None else Rat(1)
                t = fa * fb * w.at(a, b)
                if best is None or t > best[0]:
                    best = (t, a, b)
        val *= best[0]
        assign[u], assign[v] = best[1], best[2]
    return val, assign


def _genG_complement(H: GenGFunc, boxes, b0: AABox, stats: Stats):
    def inner(walls):
        return _genG_core(GenGFunc(H.dims, H.h, H.gedges, Rat(1)), walls)

    best = _complement_core(H, boxes, b0, stats, inner)
    if best is None:
        return None
    return H.scale * best[0], best[1]


def _window_max(h: StepFn | None, lo, hi) -> Rat:
    """Max of h over [lo, hi], or 0 when the window is empty.

    Empty windows only show up outside the feasible region carved by
    the comparison predicate, so the filler value is never the max.
    """
    if lo > hi:
        return Rat(0)
    if h is None:
        return Rat(1)
    return range_max(h, (int(lo), int(hi)))


def solve_2sided_anchored_improved(orths, b0: AABox, H: SimpleFunc) -> SolveResult:
    """The generalized-elimination route for 2-sided anchored instances.

    Instead of substituting the top of each variable's feasible window
    (which ties up the bound's argument), an isolated variable x_i is
    replaced by the window maximum of its factor, a bivariate term in
    the two bound arguments, added as a graph edge (Case 1).  Once no
    isolated variable remains, any variable of degree >= 2 is removed
    by enumerating the piece settings of everything it touches
    (Case 2).  The loop stops at a matching, solved per terminal as a
    box-complement instance of the generalized maximizer, and the
    elimination counts are asserted: with s Case-1 steps and t Case-2
    steps, d - s - t dimensions and at most s - 2t edges remain, which
    forces 3s >= d + 3t.
    """
    _check_axes(H, b0)
    d = b0.d
    if H.free != frozenset(range(d)):
        raise ValueError("every dimension must be free initially")
    stats = Stats()
    e0 = Expr(tuple(range(d)), _staircase_preds(orths, d), _walls_of(b0))
    work = [(e0, dict(H.h), [], H.scale, 0, 0, [])]
    best = None
    while work:
        e, hm, ges, sc, s, t, log = work.pop()
        deg = {i: 0 for i in e.dims}
        for u, v, _w in ges:
            deg[u] += 1
            deg[v] += 1
        isolated = [i for i in e.dims if deg[i] == 0]
        if isolated:
            stats.inc("case1")
            work.extend(_improved_case1(e, hm, ges, sc, s, t, log, min(isolated)))
            continue
        heavy = [i for i in e.dims if deg[i] >= 2]
        if heavy:
            stats.inc("case2")
            work.extend(_improved_case2(e, hm, ges, sc, s, t, log, min(heavy)))
            continue
        k = len(e.dims)
        assert k == d - s - t, "dimension bookkeeping broke"
        assert 2 * len(ges) == k, "terminal graph is not a perfect matching"
        assert len(ges) <= s - 2 * t, "edge count exceeds the elimination budget"
        assert 3 * s >= d + 3 * t, "counting relation violated"
        got = _improved_terminal(e, hm, ges, sc, stats)
        if got is None:
            continue
        val, pt = got
        if best is None or val > best[0]:
            best = (val, _recover_improved(pt, log))
    if best is None:
        raise InfeasibleError("region empty")
    pt = [best[1][k] for k in range(d)]
    return SolveResult(best[0], _point_box(pt), stats)


def _improved_case1(e, hm, ges, sc, s, t, log, i):
    wall = e.wall(i)
    h_i = hm.get(i)
    out = []
    for br in rewrite_normalize(e, i):
        preds = list(br.expr.preds)
        up = next((p for p in preds if p.subject == i and p.op == "le"), None)
        dn = next((p for p in preds if p.subject == i and p.op == "ge"), None)
        rest = [p for p in preds if p.subject != i]
        f = _clamp(up.rhs if up else None, wall, "le")
        g = _clamp(dn.rhs if dn else None, wall, "ge")
        j = up.argument if up and f.complexity else None
        k = dn.argument if dn and g.complexity else None
        for alt in _compare(f, j, g, k):
            e2 = br.expr.drop_dim(i, tuple(rest + alt))
            hm2 = {dim: fn for dim, fn in hm.items() if dim != i}
            ges2 = list(ges)
            sc2 = sc
            if j is None and k is None:
                sc2 = sc2 * _window_max(h_i, g.values[0], f.values[0])
            elif j is None:
                u = StepFn(
                    "unconstrained",
                    g.breakpoints,
                    tuple(_window_max(h_i, v, f.values[0]) for v in g.values),
                )
                hm2[k] = _mul_opt(hm2.get(k), u)
            elif k is None or k == j:
                if k is None:
                    bps = f.breakpoints
                    vals = tuple(_window_max(h_i, g.values[0], v) for v in f.values)
                else:
                    bps = tuple(sorted(set(f.breakpoints) | set(g.breakpoints)))
                    vals = (_window_max(h_i, g.values[0], f.values[0]),) + tuple(
                        _window_max(h_i, g.at(b), f.at(b)) for b in bps
                    )
                hm2[j] = _mul_opt(hm2.get(j), StepFn("unconstrained", bps, vals))
            else:
                w = BiStepFn(
                    f.breakpoints,
                    g.breakpoints,
                    tuple(
                        tuple(_window_max(h_i, gv, fv) for gv in g.values)
                        for fv in f.values
                    ),
                )
                ges2.append((j, k, w))
            out.append(
                (e2, hm2, ges2, sc2, s + 1, t, log + [("win", i, h_i, f, j, g, k)])
            )
    return out


def _improved_case2(e, hm, ges, sc, s, t, log, i):
    lo, hi = e.wall(i)
    cands = {lo}
    h_i = hm.get(i)
    if h_i is not None:
        cands.update(b for b in h_i.breakpoints if lo < b <= hi)
    for u, v, w in ges:
        if u == i:
            cands.update(b for b in w.xs if lo < b <= hi)
        elif v == i:
            cands.update(b for b in w.ys if lo < b <= hi)
    for p in e.preds:
        if p.subject == i:
            shift = 1 if p.op == "le" else 0
            cands.update(
                int(v) + shift
                for v in p.rhs.values
                if v != math.inf and v != -math.inf
            )
        if p.argument == i:
            cands.update(p.rhs.breakpoints)
    out = []
    for c in sorted(x for x in cands if lo <= x <= hi):
        preds2 = []
        ok = True
        for p in e.preds:
            if p.subject == i:
                if p.op == "le":
                    alts = _compare(p.rhs, p.argument, StepFn.constant(c), None)
                else:
                    alts = _compare(StepFn.constant(c), None, p.rhs, p.argument)
                if not alts:
                    ok = False
                    break
                preds2.extend(alts[0])
            elif p.argument == i:
                v = p.rhs.at(c)
                if v == math.inf:
                    if p.op == "ge":
                        ok = False
                        break
                elif v == -math.inf:
                    if p.op == "le":
                        ok = False
                        break
                else:
                    preds2.append(Pred(p.subject, p.op, StepFn.constant(v), None))
            else:
                preds2.append(p)
        if not ok:
            continue
        e2 = e.drop_dim(i, tuple(preds2))
        hm2 = {dim: fn for dim, fn in hm.items() if dim != i}
        sc2 = sc * (h_i.at(c) if h_i is not None else 1)
        ges2 = []
        for u, v, w in ges:
            if i not in (u, v):
                ges2.append((u, v, w))
            elif u == i:
                row = w.values[bisect_right(w.xs, c)]
                hm2[v] = _mul_opt(hm2.get(v), StepFn("unconstrained", w.ys, row))
            else:
                col = tuple(r[bisect_right(w.ys, c)] for r in w.values)
                hm2[u] = _mul_opt(hm2.get(u), StepFn("unconstrained", w.xs, col))
        out.append((e2, hm2, ges2, sc2, s, t + 1, log + [("fix", i, c)]))
    return out


def _improved_terminal(e, hm, ges, sc, stats: Stats):
    k = len(e.dims)
    if k == 0:
        return sc, {}
    axis = {dim: t for t, dim in enumerate(e.dims)}
    lo = [w[0] for w in e.walls]
    hi = [w[1] for w in e.walls]
    boxes = []
    for p in e.preds:
        for o in _pred_orthants(p, k, axis):
            clipped = _clip_orthant(o, lo, hi)
            if clipped is not None:
                boxes.append(clipped)
    Hg = GenGFunc(
        tuple(range(k)),
        [(axis[dim], fn) for dim, fn in hm.items() if fn is not None],
        [(axis[u], axis[v], w) for u, v, w in ges],
        sc,
    )
    got = _genG_complement(Hg, boxes, _wall_box(e.walls), stats)
    if got is None:
        return None
    return got[0], {dim: got[1][axis[dim]] for dim in e.dims}


def _recover_improved(pt: dict, log) -> dict:
    x = dict(pt)
    for entry in reversed(log):
        if entry[0] == "fix":
            _kind, i, c = entry
            x[i] = c
        else:
            _kind, i, h_i, f, j, g, k = entry
            top = f.at(x[j]) if j is not None else f.values[0]
            bot = g.at(x[k]) if k is not None else g.values[0]
            x[i] = _range_argmax(h_i, int(bot), int(top))[1]
    return x


# ---------------------------------------------------------------------------
# geometry: the anchored solver


def solve_anchored(inst: Instance, improved: bool = False) -> SolveResult:
    """Exact largest empty anchored box (0,x_1) x ... x (0,x_d).

    Points lift to orthants on a per-axis rank grid of the blocking
    coordinates.  Small dimensions go straight to the orthant-complement
    maximizer; from d = 4 on, a partition by the flats through orthant
    side pairs and triples (r = ceil(n^(1/3))) cuts every cell down to
    at most 2-sided orthants, the 1-sided ones fold into the cell box,
    and the residue runs through the 2-sided pipeline (the generalized
    route instead when ``improved`` is set).
    """
    if inst.variant.kind != "anchored":
        raise ValueError("solve_anchored needs the anchored variant")
    d = inst.d
    stats = Stats()
    grids = []
    for k in range(d):
        top = inst.b0.hi[k]
        vals = sorted({Rat(0), top} | {p[k] for p in inst.points if 0 < p[k] < top})
        grids.append(vals)
    orths = []
    for p in inst.points:
        if all(0 < p[k] < inst.b0.hi[k] for k in range(d)):
            spec = {k: ("ge", grids[k].index(p[k]) + 1) for k in range(d)}
            orths.append(Orthant.of(d, spec))
    sides = tuple(
        StepFn("increasing", tuple(range(1, len(g))), tuple(g)) for g in grids
    )
    H = ObjectiveSpec("vol").realize(sides)
    b0r = AABox(tuple(Rat(0) for _ in grids), tuple(Rat(len(g) - 1) for g in grids))
    if d <= 3:
        res = max_simple_over_complement(H, orths, b0r)
        stats.merge(res.stats)
        best = (res.value, [int(v) for v in res.witness.lo])
    else:
        best = _anchored_partitioned(H, orths, b0r, improved, stats)
    hi = tuple(grids[k][best[1][k]] for k in range(d))
    witness = AABox(tuple(Rat(0) for _ in range(d)), hi)
    return SolveResult(best[0], witness, stats)


def _anchored_partitioned(H, orths, b0r, improved: bool, stats: Stats):
    obstacles = [_orthant_sides(o) for o in orths]
    flats = _pair_flats(obstacles, 2) + _pair_flats(obstacles, 3)
    r = _icbrt_ceil(max(1, len(orths)))
    route = solve_2sided_anchored_improved if improved else solve_2sided_anchored
    d = b0r.d
    best = None
    for cell in build_partition(flats, r, b0r):
        stats.inc("cells")
        for lo, hi, actives in _refine_cells(cell.box, obstacles, 2, stats):
            if any(not acts for acts in actives):
                continue
            allowed = _allowed_box(
                lo, hi, [acts[0] for acts in actives if len(acts) == 1]
            )
            if allowed is None:
                continue
            # the factors are increasing, so the cell's top corner bounds
            # everything inside it exactly
            bound = H.scale
            for k in range(d):
                hk = H.h_of(k)
                bound *= hk.at(allowed[1][k]) if hk is not None else 1
            if best is not None and bound <= best[0]:
                continue
            residue = [
                Orthant.of(d, {k: (op, a) for k, op, a in acts})
                for acts in actives
                if len(acts) == 2
            ]
            if not residue:
                best = (bound, list(allowed[1]))
                continue
            cell_box = _wall_box(tuple(zip(allowed[0], allowed[1])))
            try:
                res = route(residue, cell_box, H)
            except InfeasibleError:
                continue
            stats.merge(res.stats)
            if best is None or res.value > best[0]:
                best = (res.value, [int(v) for v in res.witness.lo])
    # the zero-volume box at the origin is always feasible, so some cell
    # must have survived
    assert best is not None, "anchored region lost its origin"
    return best


# ---------------------------------------------------------------------------
# geometry: the general box solver


def solve_box_hd(inst: Instance) -> SolveResult:
    """Exact largest empty box via divide-and-conquer to point-restricted.

    Splitting at a median per axis, an optimal box either stays within
    one half (recursion on fewer points) or straddles every split value
    (after d levels: it contains a known point o, handled by the
    2d-dimensional lifting and the paired-sum pipeline).
    """
    if inst.variant.kind != "unrestricted":
        raise ValueError("solve_box_hd handles the unrestricted variant")
    stats = Stats()
    pts = [tuple(p.coords) for p in inst.points]
    got = _split_rec(pts, list(inst.b0.lo), list(inst.b0.hi), 0, [], inst.d, stats, Rat(-1))
    val, box = got
    return SolveResult(val, box, stats)


def _split_rec(pts, blo, bhi, k: int, o: list, d: int, stats: Stats, floor: Rat):
    # every candidate lives inside this node's box, so a volume at or
    # below the best found elsewhere prunes the whole subtree exactly
    vol = Rat(1)
    for a, b in zip(blo, bhi):
        vol *= b - a
    if vol <= floor:
        stats.inc("pruned")
        return None
    pts = [p for p in pts if all(a < c < b for a, c, b in zip(blo, p, bhi))]
    if not pts:
        return vol, AABox(tuple(blo), tuple(bhi))
    if k == d:
        return _point_restricted(pts, blo, bhi, o, stats)
    stats.inc("splits")
    vals = sorted(p[k] for p in pts)
    m = vals[(len(vals) - 1) // 2]
    best = None
    for args in (
        (pts, blo, bhi[:k] + [m] + bhi[k + 1 :], k, o),
        (pts, blo[:k] + [m] + blo[k + 1 :], bhi, k, o),
        (pts, blo, bhi, k + 1, o + [m]),
    ):
        got = _split_rec(*args, d, stats, best[0] if best else floor)
        if got is not None and (best is None or got[0] > best[0]):
            best = got
    return best


def _point_restricted(pts, blo, bhi, o: list, stats: Stats):
    """Largest empty box containing o, via the 2d-dimensional lifting.

    With o at the origin, a box (-x_1, x_1') x ... is blocked by q
    exactly when x_i > -q_i and x_i' > q_i for every axis, an orthant
    in the lifted coordinates; sides whose threshold is negative are
    dropped (always true on the nonnegative reach).
    """
    d = len(blo)
    D = 2 * d
    grids = []
    for k in range(d):
        neg = sorted({Rat(0), o[k] - blo[k]} | {o[k] - q[k] for q in pts if q[k] < o[k]})
        pos = sorted({Rat(0), bhi[k] - o[k]} | {q[k] - o[k] for q in pts if q[k] > o[k]})
        grids.append(neg)
        grids.append(pos)
    orths = []
    for q in pts:
        spec = {}
        for k in range(d):
            dq = q[k] - o[k]
            if dq <= 0:
                spec[2 * k] = ("ge", grids[2 * k].index(-dq) + 1)
            if dq >= 0:
                spec[2 * k + 1] = ("ge", grids[2 * k + 1].index(dq) + 1)
        orths.append(Orthant.of(D, spec))
    sides = tuple(
        StepFn("increasing", tuple(range(1, len(g))), tuple(g)) for g in grids
    )
    b0r = AABox(tuple(Rat(0) for _ in grids), tuple(Rat(len(g) - 1) for g in grids))
    if d == 2:
        boxes = []
        lo = [0] * D
        hi = [len(g) - 1 for g in grids]
        for orth in orths:
            clipped = _clip_orthant(orth, lo, hi)
            if clipped is not None:
                boxes.append(clipped)
        H = ObjectiveSpec("newvol").realize(sides)
        try:
            res = max_gfunc_over_box_complement(H, boxes, b0r)
        except InfeasibleError:
            return _lifted_result(None, grids, o, stats)
        stats.merge(res.stats)
        return _lifted_result((res.value, [int(v) for v in res.witness.lo]), grids, o, stats)
    best = _box_partitioned(orths, b0r, sides, stats)
    return _lifted_result(best, grids, o, stats)


def _box_partitioned(orths, b0r, sides, stats: Stats):
    D = b0r.d
    obstacles = [_orthant_sides(orth) for orth in orths]
    flats = _pair_flats(obstacles, 2) + _pair_flats(obstacles, 3)
    r = _icbrt_ceil(max(1, len(orths)))
    best = None
    for cell in build_partition(flats, r, b0r):
        stats.inc("cells")
        for lo, hi, actives in _refine_cells(cell.box, obstacles, 2, stats):
            if any(not acts for acts in actives):
                continue
            allowed = _allowed_box(
                lo, hi, [acts[0] for acts in actives if len(acts) == 1]
            )
            if allowed is None:
                continue
            # increasing rank-to-value maps put the unconstrained optimum
            # at the top corner, an exact bound for the whole subcell
            bound = Rat(1)
            for t in range(D // 2):
                bound *= sides[2 * t].at(allowed[1][2 * t]) + sides[2 * t + 1].at(
                    allowed[1][2 * t + 1]
                )
            if best is not None and bound <= best[0]:
                continue
            residue = [
                Orthant.of(D, {k: (op, a) for k, op, a in acts})
                for acts in actives
                if len(acts) == 2
            ]
            if not residue:
                best = (bound, list(allowed[1]))
                continue
            cell_box = _wall_box(tuple(zip(allowed[0], allowed[1])))
            try:
                res = solve_2sided_box(residue, cell_box, sides)
            except InfeasibleError:
                continue
            stats.merge(res.stats)
            if best is None or res.value > best[0]:
                best = (res.value, [int(v) for v in res.witness.lo])
    return best


def _lifted_result(best, grids, o: list, stats: Stats):
    # a blocked point never forbids the degenerate box at o itself, so
    # the lifted region always contains the all-zero rank point
    assert best is not None, "lifted region lost the origin"
    val, pt = best
    d = len(o)
    lo = tuple(o[k] - grids[2 * k][pt[2 * k]] for k in range(d))
    hi = tuple(o[k] + grids[2 * k + 1][pt[2 * k + 1]] for k in range(d))
    return val, AABox(lo, hi)
