"""Predicate conjunctions on rank grids and free-variable elimination.

An expression is a conjunction of predicates [x_i op f(x_j)] over live
integer-rank variables, bounded per dimension by wall ranks.  The
rewrite engine normalizes a chosen variable to at most one upper and
one lower bound (merging envelopes, flipping sides through Galois
adjoints, and branching on function comparisons), then eliminates it
from an objective that is either a product of per-variable step
functions or a graph product with per-edge binary terms.

Everything is exact: predicates compare integer ranks, objectives
multiply rationals, and every rewrite preserves the described region,
which the tests check by exhaustive grid membership.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import BudgetExceededError, Rat
from .stepfn import StepFn, compose, envelope_minmax, galois_inverse

__all__ = [
    "Pred",
    "Expr",
    "SimpleFunc",
    "Edge",
    "GFunc",
    "Branch",
    "BranchSet",
    "rewrite_normalize",
    "eliminate_free",
    "eliminate_all",
]


# ---------------------------------------------------------------------------
# predicate and expression types


@dataclass(frozen=True)
class Pred:
    """One predicate [x_subject op rhs(x_argument)] on rank vectors.

    ``op`` is "le" or "ge".  The rhs must be monotone or constant; a
    constant rhs may use ``argument=None`` since no variable is read.
    """

    subject: int
    op: str
    rhs: StepFn
    argument: int | None

    def __post_init__(self):
        if self.op not in ("le", "ge"):
            raise ValueError(f"unknown predicate op {self.op!r}")
        if self.rhs.complexity == 0:
            object.__setattr__(self, "argument", None)
        if self.argument == self.subject:
            raise ValueError("predicate subject equals its argument")
        if self.rhs.direction == "unconstrained" and self.rhs.complexity > 0:
            raise ValueError("predicate rhs must be monotone or constant")
        if self.argument is None and self.rhs.complexity > 0:
            raise ValueError("non-constant rhs needs an argument variable")

    def bound(self, x):
        if self.argument is None:
            return self.rhs.values[0]
        return self.rhs.at(x[self.argument])

    def holds(self, x) -> bool:
        b = self.bound(x)
        return x[self.subject] <= b if self.op == "le" else x[self.subject] >= b

    def mentions(self, v: int) -> bool:
        return self.subject == v or (self.argument == v and self.rhs.complexity > 0)


@dataclass(frozen=True)
class Expr:
    """A conjunction of predicates over live dims with per-dim wall ranks.

    ``walls[k]`` is the inclusive (lo, hi) rank range of dims[k]; the
    described region is the set of wall-respecting rank vectors where
    every predicate holds.
    """

    dims: tuple
    preds: tuple
    walls: tuple

    def __post_init__(self):
        dims = tuple(self.dims)
        if tuple(sorted(set(dims))) != dims:
            raise ValueError("dims must be sorted and distinct")
        if len(self.walls) != len(dims):
            raise ValueError("one wall pair per dimension")
        for lo, hi in self.walls:
            if lo > hi:
                raise ValueError("empty wall range")
        live = set(dims)
        for p in self.preds:
            if p.subject not in live:
                raise ValueError(f"predicate subject {p.subject} is not live")
            if p.argument is not None and p.argument not in live:
                raise ValueError(f"predicate argument {p.argument} is not live")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "preds", tuple(self.preds))
        object.__setattr__(self, "walls", tuple(tuple(w) for w in self.walls))

    def wall(self, dim: int) -> tuple:
        return self.walls[self.dims.index(dim)]

    def holds(self, x) -> bool:
        return all(p.holds(x) for p in self.preds)

    def drop_dim(self, dim: int, preds) -> "Expr":
        k = self.dims.index(dim)
        return Expr(
            self.dims[:k] + self.dims[k + 1 :],
            tuple(preds),
            self.walls[:k] + self.walls[k + 1 :],
        )


# ---------------------------------------------------------------------------
# objectives


def _h_pairs(pairs) -> tuple:
    return tuple(sorted((int(k), f) for k, f in pairs))


@dataclass(frozen=True)
class SimpleFunc:
    """H(x) = scale * prod of h_dim(x_dim) over the listed dims."""

    dims: tuple
    h: tuple
    free: frozenset
    scale: Rat = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "h", _h_pairs(self.h))
        object.__setattr__(self, "free", frozenset(self.free))
        live = set(self.dims)
        if any(k not in live for k, _f in self.h) or not self.free <= live:
            raise ValueError("objective references a dimension it does not carry")

    def h_of(self, dim: int):
        for k, f in self.h:
            if k == dim:
                return f
        return None

    def value(self, x) -> Rat:
        v = self.scale
        for k, f in self.h:
            v *= f.at(x[k])
        return v


@dataclass(frozen=True)
class Edge:
    """An edge term fu(x_u) + fv(x_v) of a graph objective.

    Freshly built graphs have no self-loops; elimination may produce
    u == v when a leaf's bound points at its own edge partner, which
    turns the term univariate and the loop into the component's cycle.
    """

    u: int
    v: int
    fu: StepFn
    fv: StepFn

    def ends(self) -> tuple:
        return (self.u, self.v)


@dataclass(frozen=True)
class GFunc:
    """H(x) = scale * prod h_i(x_i) * prod over edges (fu(x_u) + fv(x_v))."""

    dims: tuple
    h: tuple
    edges: tuple
    free: frozenset
    scale: Rat = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "h", _h_pairs(self.h))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "free", frozenset(self.free))
        live = set(self.dims)
        for e in self.edges:
            if e.u not in live or e.v not in live:
                raise ValueError("edge endpoint is not a live dimension")
        if any(k not in live for k, _f in self.h) or not self.free <= live:
            raise ValueError("objective references a dimension it does not carry")

    def h_of(self, dim: int):
        for k, f in self.h:
            if k == dim:
                return f
        return None

    def degree(self, dim: int) -> int:
        return sum(e.ends().count(dim) for e in self.edges)

    def value(self, x) -> Rat:
        v = self.scale
        for k, f in self.h:
            v *= f.at(x[k])
        for e in self.edges:
            v *= e.fu.at(x[e.u]) + e.fv.at(x[e.v])
        return v

    def components(self) -> list:
        """Connected components as (vertex set, edge index list) pairs."""
        parent = {d: d for d in self.dims}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for e in self.edges:
            ra, rb = find(e.u), find(e.v)
            if ra != rb:
                parent[ra] = rb
        groups: dict = {}
        for d in self.dims:
            groups.setdefault(find(d), (set(), []))[0].add(d)
        for idx, e in enumerate(self.edges):
            groups[find(e.u)][1].append(idx)
        return list(groups.values())


@dataclass(frozen=True)
class Branch:
    """One branch of a rewrite or elimination: expression, objective, log.

    ``eliminated`` records, oldest first, one (dim, bound, argument)
    triple per eliminated variable: the variable's optimum on the branch
    is bound(x_argument) (or the constant bound when argument is None),
    so walking the log backwards reconstructs a maximizing point from
    any point of the terminal region.
    """

    expr: Expr
    objective: object = None
    eliminated: tuple = ()


@dataclass(frozen=True)
class BranchSet:
    branches: tuple

    def __iter__(self):
        return iter(self.branches)

    def __len__(self):
        return len(self.branches)


# ---------------------------------------------------------------------------
# adjoint helpers


def _shift_values(f: StepFn, delta: int) -> StepFn:
    return StepFn(f.direction, f.breakpoints, tuple(v + delta for v in f.values))


def _upper_adjoint(f: StepFn) -> StepFn:
    """max-flavored dual of galois_inverse on the integer grid.

    increasing f: u(x) = max{y : f(y) <= x};  f(y) <= x  <=>  y <= u(x).
    decreasing f: u(x) = max{y : f(y) >= x};  f(y) >= x  <=>  y <= u(x).
    """
    g = galois_inverse(f)
    if f.direction == "increasing":
        bps = tuple(b - 1 for b in g.breakpoints)
    else:
        bps = tuple(b + 1 for b in g.breakpoints)
    return StepFn(f.direction, bps, tuple(v - 1 for v in g.values))


def _as_direction(f: StepFn, direction: str) -> StepFn:
    """Relabel a constant function; constants satisfy every direction."""
    if f.direction == direction:
        return f
    if f.complexity:
        raise ValueError("only constants can change direction")
    return StepFn(direction, (), f.values)


def _subjectify(p: Pred, i: int) -> Pred:
    """Rewrite a predicate with x_i in argument position to subject form."""
    f, j = p.rhs, p.subject
    inc = f.direction == "increasing"
    if p.op == "le":
        # x_j <= f(x_i)
        if inc:
            return Pred(i, "ge", galois_inverse(f), j)
        return Pred(i, "le", _upper_adjoint(f), j)
    # x_j >= f(x_i)
    if inc:
        return Pred(i, "le", _upper_adjoint(f), j)
    return Pred(i, "ge", galois_inverse(f), j)


def _value_bands(g: StepFn, k) -> list:
    """Bands of x_k on which g is -inf, finite, or +inf.

    Monotonicity keeps each class contiguous, so this returns at most
    three (cls, preds) pairs in axis order, cls in {"neg", "fin", "pos"}
    and preds the constant bounds on x_k that carve the band out.
    """
    starts = (-math.inf,) + g.breakpoints

    def cls(v):
        if v == -math.inf:
            return "neg"
        return "pos" if v == math.inf else "fin"

    m = g.complexity
    bands = []
    p = 0
    while p <= m:
        q = p
        while q < m and cls(g.values[q + 1]) == cls(g.values[p]):
            q += 1
        preds = []
        if starts[p] != -math.inf:
            preds.append(Pred(k, "ge", StepFn.constant(starts[p]), None))
        if q < m:
            preds.append(Pred(k, "le", StepFn.constant(starts[q + 1] - 1), None))
        bands.append((cls(g.values[p]), preds))
        p = q + 1
    return bands


def _attains_inf(f: StepFn, j) -> list:
    """Alternatives for f(x_j) = +inf."""
    if f.complexity == 0:
        return [[]] if f.values[0] == math.inf else []
    return [band for c, band in _value_bands(f, j) if c == "pos"]


def _compare(f: StepFn, j, g: StepFn, k, strict: bool = False) -> list:
    """Branch alternatives for the condition f(x_j) >= g(x_k) (+1 if strict).

    Returns a list of alternatives, each a list of predicates whose
    conjunction carves one piece of the condition, and whose union is
    exactly the condition.  Alternatives are pairwise disjoint except
    possibly on ties at +-infinity, which is harmless for a union.  An
    always-true condition yields [[]], an impossible one [].

    Infinite values need care: the Galois adjoints are exact at finite
    inputs only, so the axis of x_k is banded by the sign class of
    g(x_k) and the adjoint composition is applied on the finite band
    alone.  On the -inf band the condition is free, and on the +inf
    band it degenerates to f(x_j) = +inf.
    """
    if strict:
        g = _shift_values(g, 1)
    fc, gc = f.complexity == 0, g.complexity == 0
    if gc:
        c = g.values[0]
        if c == -math.inf:
            return [[]]
        if c == math.inf:
            return _attains_inf(f, j)
    if fc and gc:
        return [[]] if f.values[0] >= g.values[0] else []
    if fc:
        c = f.values[0]
        if c == math.inf:
            return [[]]
        if c == -math.inf:
            return [band for cl, band in _value_bands(g, k) if cl == "neg"]
        # finite c >= g(x_k); the adjoints are exact here
        if g.direction == "increasing":
            t = _upper_adjoint(g).at(c)  # x_k <= t
            op = "le"
        else:
            t = galois_inverse(g).at(c)  # x_k >= t
            op = "ge"
        if t == math.inf:
            return [[]] if op == "le" else []
        if t == -math.inf:
            return [] if op == "le" else [[]]
        return [[Pred(k, op, StepFn.constant(t), None)]]
    if not gc and j == k:
        return _compare_same_var(f, g, j)
    if f.direction == "increasing":
        op, adj = "ge", galois_inverse(f)
    else:
        op, adj = "le", _upper_adjoint(f)
    out = []
    for cl, band in _value_bands(g, k):
        if cl == "neg":
            out.append(band)
            continue
        if cl == "pos":
            out.extend(band + alt for alt in _attains_inf(f, j))
            continue
        rhs = compose(adj, g)
        if rhs.complexity == 0:
            t = rhs.values[0]
            if t == math.inf:
                alts = [] if op == "ge" else [[]]
            elif t == -math.inf:
                alts = [[]] if op == "ge" else []
            else:
                alts = [[Pred(j, op, StepFn.constant(t), None)]]
            out.extend(band + alt for alt in alts)
        else:
            out.append(band + [Pred(j, op, rhs, k)])
    return out


def _compare_same_var(f: StepFn, g: StepFn, j) -> list:
    """{y : f(y) >= g(y)} as disjoint rank intervals of constant preds."""
    merged = sorted(set(f.breakpoints) | set(g.breakpoints))
    starts = [-math.inf] + merged
    flags = [f.values[0] >= g.values[0]] + [f.at(b) >= g.at(b) for b in merged]
    out = []
    p = 0
    while p < len(flags):
        if not flags[p]:
            p += 1
            continue
        q = p
        while q + 1 < len(flags) and flags[q + 1]:
            q += 1
        lo = starts[p]
        hi = starts[q + 1] - 1 if q + 1 < len(starts) else math.inf
        preds = []
        if lo != -math.inf:
            preds.append(Pred(j, "ge", StepFn.constant(lo), None))
        if hi != math.inf:
            preds.append(Pred(j, "le", StepFn.constant(hi), None))
        out.append(preds)
        p = q + 1
    return out


# ---------------------------------------------------------------------------
# rewrite rules


def _mergeable(p: Pred, q: Pred) -> bool:
    if p.rhs.complexity == 0 or q.rhs.complexity == 0:
        return True
    return p.argument == q.argument and p.rhs.direction == q.rhs.direction


def _merge_pair(p: Pred, q: Pred) -> Pred:
    kind = "min" if p.op == "le" else "max"
    if p.rhs.complexity == 0 and q.rhs.complexity == 0:
        pick = min if kind == "min" else max
        return Pred(p.subject, p.op, StepFn.constant(pick(p.rhs.values[0], q.rhs.values[0])), None)
    if p.rhs.complexity == 0:
        p, q = q, p
    rhs = envelope_minmax(p.rhs, _as_direction(q.rhs, p.rhs.direction), kind)
    if rhs.complexity == 0:
        return Pred(p.subject, p.op, rhs, None)
    return Pred(p.subject, p.op, rhs, p.argument)


def _merge_rule1(preds: list, i: int) -> list:
    """Merge same-op bounds on x_i whenever a single monotone rhs exists."""
    for op in ("le", "ge"):
        while True:
            idxs = [t for t, p in enumerate(preds) if p.subject == i and p.op == op]
            hit = None
            for a in range(len(idxs)):
                for b in range(a + 1, len(idxs)):
                    if _mergeable(preds[idxs[a]], preds[idxs[b]]):
                        hit = (idxs[a], idxs[b])
                        break
                if hit:
                    break
            if hit is None:
                break
            a, b = hit
            merged = _merge_pair(preds[a], preds[b])
            preds = [p for t, p in enumerate(preds) if t not in (a, b)]
            preds.append(merged)
    return preds


def _normal(preds, i) -> bool:
    les = sum(1 for p in preds if p.subject == i and p.op == "le")
    ges = sum(1 for p in preds if p.subject == i and p.op == "ge")
    return les <= 1 and ges <= 1


def rewrite_normalize(e: Expr, i: int, budget: int | None = None) -> BranchSet:
    """Branch e so that x_i has at most one bound per direction everywhere.

    Occurrences of x_i in argument position are flipped to subject form
    through the Galois adjoints, same-direction bounds merge through
    envelopes, and incomparable bound pairs split the region on which
    function is smaller (a disjoint cover, so semantics are preserved).
    A branch budget of 4^(d^2) guards against runaway splitting.
    """
    if i not in e.dims:
        raise ValueError(f"dimension {i} is not live")
    if budget is None:
        budget = 4 ** (len(e.dims) ** 2)
    if _normal(e.preds, i) and not any(
        p.argument == i and p.rhs.complexity > 0 for p in e.preds
    ):
        return BranchSet((Branch(e),))
    start = [
        _subjectify(p, i) if p.argument == i and p.rhs.complexity > 0 else p
        for p in e.preds
    ]
    made = 1
    work = [start]
    done = []
    while work:
        preds = _merge_rule1(work.pop(), i)
        if _normal(preds, i):
            done.append(preds)
            continue
        op = "le" if sum(1 for p in preds if p.subject == i and p.op == "le") > 1 else "ge"
        idxs = [t for t, p in enumerate(preds) if p.subject == i and p.op == op]
        a, b = idxs[0], idxs[1]
        pa, pb = preds[a], preds[b]
        rest = [p for t, p in enumerate(preds) if t not in (a, b)]
        # rule 4: split on which bound is tighter; for "le" keep the
        # smaller rhs on each side, for "ge" the larger
        if op == "le":
            sides = (
                (pa, _compare(pb.rhs, pb.argument, pa.rhs, pa.argument)),
                (pb, _compare(pa.rhs, pa.argument, pb.rhs, pb.argument, strict=True)),
            )
        else:
            sides = (
                (pa, _compare(pa.rhs, pa.argument, pb.rhs, pb.argument)),
                (pb, _compare(pb.rhs, pb.argument, pa.rhs, pa.argument, strict=True)),
            )
        for keep, alts in sides:
            for side_preds in alts:
                made += 1
                if made > budget:
                    raise BudgetExceededError(
                        f"rewrite produced more than {budget} branches"
                    )
                work.append(rest + [keep] + side_preds)
    out = tuple(
        Branch(Expr(e.dims, tuple(preds), e.walls)) for preds in done
    )
    return BranchSet(out)


# ---------------------------------------------------------------------------
# elimination


def _stepfn_mul(a: StepFn, b: StepFn) -> StepFn:
    merged = sorted(set(a.breakpoints) | set(b.breakpoints))
    vals = [a.values[0] * b.values[0]]
    vals.extend(a.at(x) * b.at(x) for x in merged)
    return StepFn("unconstrained", tuple(merged), tuple(vals))


def _clamp(f: StepFn | None, wall: tuple, side: str) -> StepFn:
    """Clip a bound to the wall range (supplying the wall when absent)."""
    lo, hi = wall
    if side == "le":
        if f is None:
            return StepFn.constant(hi)
        if f.complexity == 0:
            return StepFn.constant(min(f.values[0], hi))
        return envelope_minmax(f, StepFn.constant(hi, f.direction), "min")
    if f is None:
        return StepFn.constant(lo)
    if f.complexity == 0:
        return StepFn.constant(max(f.values[0], lo))
    return envelope_minmax(f, StepFn.constant(lo, f.direction), "max")


def _check_box(H: GFunc) -> None:
    """Pseudo-forest bookkeeping: raise on any structural violation."""
    for verts, eidx in H.components():
        ne, nv = len(eidx), len(verts)
        if ne > nv:
            raise ValueError("component has more than one cycle")
        if ne and ne == nv - 1:
            leaves = [
                v for v in verts if H.degree(v) == 1 and v in H.free
            ]
            if len(leaves) < 2:
                raise ValueError("tree component lost its two free leaves")


def _sub_anchored(H: SimpleFunc, i: int, fprime: StepFn, j) -> SimpleFunc:
    hi = H.h_of(i)
    if hi is None:
        hi = StepFn.constant(1)
    if hi.complexity and hi.direction != "increasing":
        raise ValueError("eliminating a variable whose factor is not increasing")
    dims = tuple(d for d in H.dims if d != i)
    pairs = [(k, f) for k, f in H.h if k != i]
    free = set(H.free) - {i}
    scale = H.scale
    if fprime.complexity == 0:
        scale = scale * hi.at(fprime.values[0])
    else:
        free.discard(j)
        grown = compose(hi, fprime)
        old = next((f for k, f in pairs if k == j), None)
        pairs = [(k, f) for k, f in pairs if k != j]
        pairs.append((j, grown if old is None else _stepfn_mul(old, grown)))
    return SimpleFunc(dims, pairs, frozenset(free), scale)


def _sub_box(H: GFunc, i: int, fprime: StepFn, j) -> GFunc:
    if H.h_of(i) is not None:
        # substitution below maximizes the edge term alone, which is
        # only the optimum of H when x_i carries no other factor
        raise ValueError("free leaf carries a vertex factor")
    mine = [t for t, e in enumerate(H.edges) if i in e.ends()]
    if len(mine) > 1:
        raise ValueError("eliminated variable is not a leaf")
    dims = tuple(d for d in H.dims if d != i)
    pairs = list(H.h)
    free = set(H.free) - {i}
    scale = H.scale
    edges = list(H.edges)
    if not mine:
        # the variable does not appear in H at all; bounds only gate
        # feasibility, which the comparison predicate already encodes
        return GFunc(dims, pairs, tuple(edges), frozenset(free), scale)
    e = edges.pop(mine[0])
    fu, other, fo = (e.fu, e.v, e.fv) if e.u == i else (e.fv, e.u, e.fu)
    if fu.complexity and fu.direction != "increasing":
        raise ValueError("eliminating a variable whose edge side is not increasing")
    if fprime.complexity == 0:
        # constant optimum: the edge term turns univariate in the partner;
        # keep it as a self-loop so the component closes into a 1-tree
        edges.append(Edge(other, other, StepFn.constant(fu.at(fprime.values[0])), fo))
        free.discard(other)
    elif j == other:
        # the bound points back across the eliminated edge: same story,
        # the rerouted edge j-other degenerates to a loop at the partner
        edges.append(Edge(other, other, compose(fu, fprime), fo))
        free.discard(other)
    else:
        free.discard(j)
        edges.append(Edge(j, other, compose(fu, fprime), fo))
    out = GFunc(dims, pairs, tuple(edges), frozenset(free), scale)
    _check_box(out)
    return out


def eliminate_free(
    e: Expr, H, i: int, mode: str, budget: int | None = None
) -> BranchSet:
    """Eliminate the free variable x_i from every normalized branch.

    Per branch, the two bounds g(x_k) <= x_i <= f(x_j) (walls filling
    any missing side, and clipping both) collapse into the comparison
    f' >= g', and the objective absorbs x_i at its optimum f'(x_j):
    anchored objectives multiply h_j by h_i(f'(x_j)); graph objectives
    reroute the unique edge at i to j, its term composed with f'.

    Substituting the top of the range is the maximum because the factor
    touching x_i is increasing and every other factor is nonnegative,
    as volume objectives are; callers own that invariant.
    """
    if mode not in ("anchored", "box"):
        raise ValueError(f"unknown mode {mode!r}")
    if i not in H.free:
        raise ValueError(f"dimension {i} is not free in the objective")
    if mode == "box" and not isinstance(H, GFunc):
        raise ValueError("box mode needs a graph objective")
    if mode == "box":
        for verts, eidx in H.components():
            if i in verts:
                if len(eidx) >= len(verts):
                    raise ValueError("free variable sits in a non-tree component")
                break
        if H.degree(i) > 1:
            raise ValueError("free variable is not a leaf")
    wall = e.wall(i)
    out = []
    for br in rewrite_normalize(e, i, budget):
        preds = list(br.expr.preds)
        up = next((p for p in preds if p.subject == i and p.op == "le"), None)
        dn = next((p for p in preds if p.subject == i and p.op == "ge"), None)
        rest = [p for p in preds if p.subject != i]
        f = _clamp(up.rhs if up else None, wall, "le")
        g = _clamp(dn.rhs if dn else None, wall, "ge")
        j = up.argument if up and f.complexity else None
        k = dn.argument if dn and g.complexity else None
        for alt in _compare(f, j, g, k):
            expr2 = br.expr.drop_dim(i, tuple(rest + alt))
            if mode == "anchored":
                H2 = _sub_anchored(H, i, f, j)
            else:
                H2 = _sub_box(H, i, f, j)
            out.append(Branch(expr2, H2, ((i, f, j),)))
    return BranchSet(tuple(out))


def _next_free(H, mode: str):
    if mode == "anchored":
        return min(H.free) if H.free else None
    best = None
    for verts, eidx in H.components():
        ne = len(eidx)
        if ne == 0 or ne != len(verts) - 1:
            continue  # isolated vertices and 1-trees are terminal
        leaves = sorted(v for v in verts if H.degree(v) == 1 and v in H.free)
        if not leaves:
            raise ValueError("tree component has no free leaf")
        key = (-len(verts), min(verts))
        if best is None or key < best[0]:
            best = (key, leaves[0])
    return None if best is None else best[1]


def eliminate_all(e: Expr, H, mode: str, budget: int | None = None) -> tuple:
    """Drive eliminate_free to exhaustion and assert the terminal shape.

    Anchored terminals keep at most floor(d/2) live dims; box terminals
    consist of 1-tree components (every surviving edge lies on a cycle,
    counting self-loops) with at most d/2 live dims overall.
    """
    d0 = len(e.dims)
    work = [Branch(e, H, ())]
    out = []
    while work:
        br = work.pop()
        nxt = _next_free(br.objective, mode)
        if nxt is None:
            if mode == "anchored":
                assert len(br.expr.dims) <= d0 // 2, "too many live dims at terminal"
            else:
                assert 2 * len(br.expr.dims) <= d0, "too many live dims at terminal"
                for verts, eidx in br.objective.components():
                    assert len(eidx) in (0, len(verts)), "non 1-tree terminal"
            out.append(br)
            continue
        for nb in eliminate_free(br.expr, br.objective, nxt, mode, budget):
            work.append(Branch(nb.expr, nb.objective, br.eliminated + nb.eliminated))
    return tuple(out)
