"""Monotone step functions over integer rank grids, and their algebra.

Everything here is a finitely described, right-continuous step function:
piece k covers the half-open interval [breakpoints[k-1], breakpoints[k])
and the new value applies AT its breakpoint.  Working over ranks keeps
every comparison exact, so the rewrite identities (pointwise envelopes,
the Galois inverse, composition) hold literally instead of up to an
epsilon.  Values may be +-infinity; breakpoints are always finite ranks.

The module also hosts the axis-parallel Orthant type, because the
staircase construction consumes orthants directly and the higher
dimensional solvers that produce them sit above this layer.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

__all__ = [
    "StepFn",
    "BiStepFn",
    "SuccessorFn",
    "Orthant",
    "envelope_minmax",
    "galois_inverse",
    "compose",
    "range_max",
    "staircase_of_orthants",
]

_DIRECTIONS = ("increasing", "decreasing", "unconstrained")


def _as_rank(v):
    """Coerce a finite value to the integer rank it must represent."""
    if getattr(v, "denominator", None) != 1:
        raise ValueError(f"rank values must be integers, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class StepFn:
    """A right-continuous step function with finitely many pieces.

    ``values`` has one entry more than ``breakpoints``; the function
    equals values[k] on [breakpoints[k-1], breakpoints[k]), with the
    outer pieces extending to -oo and +oo.  Construction canonicalizes:
    adjacent equal values are merged, after which a declared direction
    must hold strictly from piece to piece (a single piece is vacuously
    monotone, so constants may carry any direction).
    """

    direction: str
    breakpoints: tuple = ()
    values: tuple = (0,)

    def __post_init__(self):
        if self.direction not in _DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        bps = tuple(self.breakpoints)
        vals = tuple(self.values)
        if len(vals) != len(bps) + 1:
            raise ValueError("need exactly one more value than breakpoints")
        for b in bps:
            if b == math.inf or b == -math.inf:
                raise ValueError("breakpoints must be finite")
        if any(not a < b for a, b in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        mb, mv = [], [vals[0]]
        for b, v in zip(bps, vals[1:]):
            if v != mv[-1]:
                mb.append(b)
                mv.append(v)
        if self.direction == "increasing":
            ok = all(a < b for a, b in zip(mv, mv[1:]))
        elif self.direction == "decreasing":
            ok = all(a > b for a, b in zip(mv, mv[1:]))
        else:
            ok = True
        if not ok:
            raise ValueError(f"values are not {self.direction}")
        object.__setattr__(self, "breakpoints", tuple(mb))
        object.__setattr__(self, "values", tuple(mv))

    @classmethod
    def constant(cls, v, direction: str = "unconstrained") -> "StepFn":
        return cls(direction, (), (v,))

    @property
    def complexity(self) -> int:
        return len(self.breakpoints)

    def at(self, x):
        """Evaluate at x; bisection makes the right-continuity explicit."""
        return self.values[bisect_right(self.breakpoints, x)]

    def __call__(self, x):
        return self.at(x)


@dataclass(frozen=True)
class BiStepFn:
    """A bivariate step function, constant on the cells of a grid.

    Right-continuous in both coordinates: cell (k, l) covers
    [xs[k-1], xs[k]) x [ys[l-1], ys[l]) and holds values[k][l].
    """

    xs: tuple
    ys: tuple
    values: tuple

    def __post_init__(self):
        xs, ys = tuple(self.xs), tuple(self.ys)
        rows = tuple(tuple(r) for r in self.values)
        for grid in (xs, ys):
            if any(b == math.inf or b == -math.inf for b in grid):
                raise ValueError("grid lines must be finite")
            if any(not a < b for a, b in zip(grid, grid[1:])):
                raise ValueError("grid lines must be strictly increasing")
        if len(rows) != len(xs) + 1 or any(len(r) != len(ys) + 1 for r in rows):
            raise ValueError("value matrix does not match the grid")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", rows)

    @property
    def complexity(self) -> int:
        return len(self.xs) + len(self.ys)

    def at(self, x, y):
        return self.values[bisect_right(self.xs, x)][bisect_right(self.ys, y)]

    def __call__(self, x, y):
        return self.at(x, y)


@dataclass(frozen=True)
class SuccessorFn:
    """Successor lookup over a sorted coordinate table.

    sigma(x) is the least table value >= x, and +infinity past the end
    of the table.  The table is deduplicated and sorted on construction.
    """

    table: tuple

    def __post_init__(self):
        t = tuple(sorted(set(self.table)))
        if not t:
            raise ValueError("successor table must be nonempty")
        if any(v == math.inf or v == -math.inf for v in t):
            raise ValueError("table entries must be finite")
        object.__setattr__(self, "table", t)

    def at(self, x):
        k = bisect_left(self.table, x)
        return self.table[k] if k < len(self.table) else math.inf

    def __call__(self, x):
        return self.at(x)

    def compose(self, f: StepFn) -> StepFn:
        """Pointwise sigma(f(x)).

        The successor map is weakly increasing, so f's direction is
        preserved (normalization re-merges any pieces it flattens).
        """
        vals = tuple(self.at(v) for v in f.values)
        return StepFn(f.direction, f.breakpoints, vals)


@dataclass(frozen=True)
class Orthant:
    """An axis-parallel orthant: a conjunction of per-dimension rays.

    ``constraints[i]`` is None when dimension i is unconstrained, else a
    pair (op, a) with op in {"ge", "le"} for the closed condition
    x_i >= a or x_i <= a.  At least one dimension must be constrained;
    sidedness counts the constrained dimensions.
    """

    constraints: tuple

    def __post_init__(self):
        cs = tuple(self.constraints)
        for c in cs:
            if c is None:
                continue
            op, _a = c
            if op not in ("ge", "le"):
                raise ValueError(f"unknown orthant op {op!r}")
        if all(c is None for c in cs):
            raise ValueError("orthant constrains no dimension")
        object.__setattr__(self, "constraints", cs)

    @classmethod
    def of(cls, d: int, spec: dict) -> "Orthant":
        cs = [None] * d
        for i, (op, a) in spec.items():
            cs[i] = (op, a)
        return cls(tuple(cs))

    @property
    def d(self) -> int:
        return len(self.constraints)

    @property
    def sidedness(self) -> int:
        return sum(1 for c in self.constraints if c is not None)

    def constrained_dims(self) -> tuple:
        return tuple(i for i, c in enumerate(self.constraints) if c is not None)

    def contains(self, x) -> bool:
        """Closed membership test for a coordinate sequence."""
        for c, xi in zip(self.constraints, x):
            if c is None:
                continue
            op, a = c
            if op == "ge":
                if xi < a:
                    return False
            elif xi > a:
                return False
        return True


def envelope_minmax(f: StepFn, g: StepFn, kind: str) -> StepFn:
    """Pointwise min or max of two same-direction step functions.

    Mixed or unconstrained directions are rejected: the caller is
    expected to branch instead of taking an envelope there.  The result
    lives on the merged breakpoint grid, so its complexity is at most
    |f| + |g|.
    """
    if kind not in ("min", "max"):
        raise ValueError(f"kind must be 'min' or 'max', got {kind!r}")
    if f.direction == "unconstrained" or f.direction != g.direction:
        raise ValueError("envelope needs two increasing or two decreasing functions")
    pick = min if kind == "min" else max
    merged = sorted(set(f.breakpoints) | set(g.breakpoints))
    vals = [pick(f.values[0], g.values[0])]
    vals.extend(pick(f.at(b), g.at(b)) for b in merged)
    out = StepFn(f.direction, tuple(merged), tuple(vals))
    assert out.complexity <= f.complexity + g.complexity
    return out


def galois_inverse(f: StepFn) -> StepFn:
    """The adjoint inverse of a monotone step function on ranks.

    For increasing f:  finv(x) = min{y : f(y) >= x}, which is the unique
    function with  x <= f(y)  <=>  finv(x) <= y  at every rank pair.
    For decreasing f:  finv(x) = min{y : f(y) <= x}, satisfying the
    flipped law  x >= f(y)  <=>  finv(x) <= y.

    Finite values of f must be integer ranks (the inverse jumps at the
    grid point just past each value).  The result has at most |f| + 1
    breakpoints; the extreme pieces are +-infinity where no rank
    qualifies.
    """
    if f.direction == "unconstrained":
        raise ValueError("galois_inverse needs a declared direction")
    m = f.complexity
    starts = (-math.inf,) + f.breakpoints
    if f.direction == "increasing":
        bps: list = []
        vals: list = [starts[0]]
        for k in range(m + 1):
            v = f.values[k]
            nxt = starts[k + 1] if k < m else math.inf
            if v == -math.inf:
                # f(y) >= x fails for every finite x on this piece
                vals = [nxt]
            elif v == math.inf:
                break
            else:
                bps.append(_as_rank(v) + 1)
                vals.append(nxt)
        out = StepFn("increasing", tuple(bps), tuple(vals))
    else:
        bps = []
        vals = [math.inf]
        for k in range(m, -1, -1):
            v = f.values[k]
            if v == -math.inf:
                vals = [starts[k]]
            elif v == math.inf:
                break
            else:
                bps.append(_as_rank(v))
                vals.append(starts[k])
        out = StepFn("decreasing", tuple(bps), tuple(vals))
    assert out.complexity <= m + 1
    return out


def compose(f: StepFn, g: StepFn) -> StepFn:
    """Pointwise composition x -> f(g(x)).

    Breakpoints are a subset of g's, so complexity stays within
    |f| + |g|.  The direction multiplies (two like directions compose
    to increasing, unlike to decreasing); if either input is
    unconstrained the result is merely unconstrained, never an error.
    """
    if f.direction == "unconstrained" or g.direction == "unconstrained":
        direction = "unconstrained"
    elif f.direction == g.direction:
        direction = "increasing"
    else:
        direction = "decreasing"
    vals = tuple(f.at(v) for v in g.values)
    out = StepFn(direction, g.breakpoints, vals)
    assert out.complexity <= f.complexity + g.complexity
    return out


def range_max(h: StepFn, interval) -> object:
    """Exact maximum of h over a closed interval [lo, hi].

    A step function attains its supremum on any piece it meets, so the
    answer is the largest value among the pieces intersecting the
    interval.  An empty interval (lo > hi) is an error.
    """
    lo, hi = interval
    if lo > hi:
        raise ValueError("range_max over an empty interval")
    i = bisect_right(h.breakpoints, lo)
    j = bisect_right(h.breakpoints, hi)
    return max(h.values[i : j + 1])


def staircase_of_orthants(orths) -> StepFn:
    """Staircase bound of a union of same-pattern 2-sided orthants.

    All orthants must constrain exactly the same two dimensions i < j
    with identical inequality directions.  The returned f maps the rank
    of x_j to a rank bound on x_i such that the complement of the union
    is exactly

        {x : x_i <= f(x_j)}   when the i-constraints are "ge",
        {x : x_i >= f(x_j)}   when the i-constraints are "le".

    The +-1 closed-form shift is folded in here, which is what makes
    the complement a closed inequality on the integer rank grid.  The
    complexity never exceeds the orthant count.
    """
    orths = list(orths)
    if not orths:
        raise ValueError("need at least one orthant")
    dims = orths[0].constrained_dims()
    if len(dims) != 2:
        raise ValueError("staircase orthants must be 2-sided")
    i, j = dims
    pattern = (orths[0].constraints[i][0], orths[0].constraints[j][0])
    groups: dict = {}
    for o in orths:
        if o.constrained_dims() != dims:
            raise ValueError("orthants do not constrain the same dimensions")
        if (o.constraints[i][0], o.constraints[j][0]) != pattern:
            raise ValueError("orthants do not share an inequality pattern")
        a = _as_rank(o.constraints[i][1])
        b = _as_rank(o.constraints[j][1])
        if pattern[0] == "ge":
            groups[b] = min(groups.get(b, math.inf), a)
        else:
            groups[b] = max(groups.get(b, -math.inf), a)
    op_i, op_j = pattern
    agg = min if op_i == "ge" else max
    empty = math.inf if op_i == "ge" else -math.inf
    adj = -1 if op_i == "ge" else 1
    bs = sorted(groups)
    if op_j == "ge":
        # orthant with threshold b is active exactly for x_j >= b
        run = empty
        vals = [empty]
        for b in bs:
            run = agg(run, groups[b])
            vals.append(run)
        bps = bs
    else:
        # active for x_j <= b: aggregate suffixes, switch just past each b
        run = empty
        tail = []
        for b in reversed(bs):
            run = agg(run, groups[b])
            tail.append(run)
        tail.reverse()
        vals = tail + [empty]
        bps = [b + 1 for b in bs]
    fvals = tuple(v + adj for v in vals)
    direction = "decreasing" if op_i == op_j else "increasing"
    out = StepFn(direction, tuple(bps), fvals)
    assert out.complexity <= len(orths)
    return out
