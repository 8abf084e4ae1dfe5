"""Orthogonal quantile partitions of a box, with conflict lists.

Given n axis-parallel flats (each fixes some subset of coordinates), the
box is refined in d sequential rounds: round i splits every current cell
along dimension i at quantiles of the dim-i fixed values of the cell's
surviving conflict flats, into at most r slabs.  A flat fixing j
coordinates is thinned by a factor of roughly r in each of its j rounds,
which is what yields the n/r^j conflict cascade per codimension while
the cell count stays at most r^d.

Conflict lists hold flat ids only; a flat belongs to a cell's list
exactly when it meets the cell's open interior, so a cut placed exactly
on a flat removes it from both adjacent slabs.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import AABox, Rat

__all__ = [
    "AxisFlat",
    "Cell",
    "PartitionReport",
    "build_partition",
    "verify_partition",
]


@dataclass(frozen=True)
class AxisFlat:
    """An axis-parallel flat: the set {x : x_k = v for each fixed (k, v)}.

    ``fixed`` is a tuple of (dimension, value) pairs, sorted by
    dimension, with no dimension repeated.  The codimension is the
    number of fixed dimensions and must be at least 1.
    """

    fixed: tuple

    def __post_init__(self):
        fx = tuple(sorted(tuple(p) for p in self.fixed))
        if not fx:
            raise ValueError("a flat must fix at least one dimension")
        dims = [k for k, _v in fx]
        if len(set(dims)) != len(dims):
            raise ValueError("a flat fixes each dimension at most once")
        if any(k < 0 for k in dims):
            raise ValueError("negative dimension index")
        object.__setattr__(self, "fixed", fx)

    @classmethod
    def of(cls, spec: dict) -> "AxisFlat":
        return cls(tuple(spec.items()))

    @property
    def codim(self) -> int:
        return len(self.fixed)

    def value_in(self, dim: int):
        for k, v in self.fixed:
            if k == dim:
                return v
        return None

    def meets_open(self, box: AABox) -> bool:
        """Does the flat intersect the box's open interior?

        The free dimensions always span the box, so only the fixed
        values matter, and each must fall strictly inside.
        """
        return all(box.lo[k] < v < box.hi[k] for k, v in self.fixed)


@dataclass(frozen=True)
class Cell:
    """One cell of the partition with its per-codimension conflicts.

    ``conflicts[j-1]`` lists the ids of codimension-j flats meeting the
    cell's interior.
    """

    box: AABox
    conflicts: tuple

    def conflict_ids(self, codim: int) -> tuple:
        return self.conflicts[codim - 1]

    def all_conflicts(self) -> tuple:
        return tuple(i for part in self.conflicts for i in part)


def _quantile_cuts(vals: list, r: int) -> list:
    """Cut positions splitting sorted vals into <= r slabs of <= ceil(m/r).

    Cuts sit exactly on every q-th value (the lower neighbor of each
    quantile boundary), so slabs count only the values strictly between
    consecutive cuts.
    """
    m = len(vals)
    if m == 0 or r == 1:
        return []
    q = -(-m // r)
    cuts = []
    for t in range(q - 1, m - 1, q):
        c = vals[t]
        if not cuts or c > cuts[-1]:
            cuts.append(c)
    return cuts


def build_partition(flats: Sequence[AxisFlat], r: int, b0: AABox) -> tuple:
    """Partition b0 into cells, each meeting few flats per codimension.

    Round i (for i = 0..d-1) splits every cell along dimension i at
    quantiles of the dim-i fixed values of its surviving conflicts, so
    each slab inherits at most ceil(m_i / r) of the flats fixing that
    dimension; flats not fixing dimension i pass to every slab.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    d = b0.d
    for f in flats:
        if any(k >= d for k, _v in f.fixed):
            raise ValueError("flat fixes a dimension outside the box")
    live = [i for i, f in enumerate(flats) if f.meets_open(b0)]
    cells = [(list(b0.lo), list(b0.hi), live)]
    for dim in range(d):
        nxt = []
        for lo, hi, ids in cells:
            vals = sorted(
                v for i in ids for k, v in flats[i].fixed if k == dim
            )
            cuts = _quantile_cuts(vals, r)
            if not cuts:
                nxt.append((lo, hi, ids))
                continue
            edges = [lo[dim]] + cuts + [hi[dim]]
            kids = []
            for a, b in zip(edges, edges[1:]):
                klo, khi = list(lo), list(hi)
                klo[dim], khi[dim] = a, b
                kids.append((klo, khi, []))
            for i in ids:
                v = flats[i].value_in(dim)
                if v is None:
                    for kid in kids:
                        kid[2].append(i)
                    continue
                k = bisect_left(cuts, v)
                if k < len(cuts) and cuts[k] == v:
                    continue  # flat lies on a cut plane: no interior left
                kids[k][2].append(i)
            nxt.extend(kids)
        cells = nxt
    out = []
    for lo, hi, ids in cells:
        by_codim = [[] for _ in range(d)]
        for i in ids:
            by_codim[flats[i].codim - 1].append(i)
        out.append(
            Cell(AABox(tuple(lo), tuple(hi)), tuple(tuple(p) for p in by_codim))
        )
    return tuple(out)


@dataclass(frozen=True)
class PartitionReport:
    """Outcome of a full partition audit.

    ``cell_constant`` is the smallest c with cell count <= c * r^d;
    ``conflict_constant`` the smallest c bounding every per-codimension
    conflict count by c * max(1, n_j / r^j), where n_j counts the input
    flats of codimension j (the max(1, .) floor keeps the budget
    meaningful when r^j exceeds n_j).  ``failures`` lists every
    discrepancy found, as (reason, cell index, flat id) triples.
    """

    ok: bool
    cell_constant: Rat
    conflict_constant: Rat
    failures: tuple

    @property
    def constant(self) -> Rat:
        return max(self.cell_constant, self.conflict_constant)


def verify_partition(cells, flats, r: int) -> PartitionReport:
    """Audit a partition against its input flats from scratch.

    Every cell/flat interior intersection is recomputed directly and
    compared with the stored conflict lists; the cells must tile their
    hull exactly (pairwise disjoint interiors whose volumes add up to
    the hull volume, which for boxes forces a cover); cell count and
    conflict sizes must fit the r-budgets.

    All coordinates are rescaled onto one integer grid first, which
    keeps every comparison exact while avoiding rational arithmetic in
    the quadratically many disjointness tests.
    """
    cells = list(cells)
    failures = []
    if not cells:
        return PartitionReport(False, Fraction(0), Fraction(0), (("no cells", None, None),))
    d = cells[0].box.d
    scale = 1
    for f in flats:
        for _k, v in f.fixed:
            scale = math.lcm(scale, v.denominator)
    for c in cells:
        for v in c.box.lo + c.box.hi:
            scale = math.lcm(scale, v.denominator)
    los = [tuple(int(v * scale) for v in c.box.lo) for c in cells]
    his = [tuple(int(v * scale) for v in c.box.hi) for c in cells]
    fx = [tuple((k, int(v * scale)) for k, v in f.fixed) for f in flats]
    # conflict lists vs direct recount
    for ci, cell in enumerate(cells):
        listed = set(cell.all_conflicts())
        for j, part in enumerate(cell.conflicts, start=1):
            for i in part:
                if flats[i].codim != j:
                    failures.append(("flat filed under wrong codimension", ci, i))
        lo, hi = los[ci], his[ci]
        for i, pairs in enumerate(fx):
            hit = all(lo[k] < v < hi[k] for k, v in pairs)
            if hit and i not in listed:
                failures.append(("missing conflict", ci, i))
            elif not hit and i in listed:
                failures.append(("spurious conflict", ci, i))
    # tiling: disjoint interiors + volumes summing to the hull volume
    hull_lo = tuple(min(lo[k] for lo in los) for k in range(d))
    hull_hi = tuple(max(hi[k] for hi in his) for k in range(d))
    hull_vol = math.prod(b - a for a, b in zip(hull_lo, hull_hi))
    total = sum(
        math.prod(b - a for a, b in zip(lo, hi)) for lo, hi in zip(los, his)
    )
    if total != hull_vol:
        failures.append(("cell volumes do not sum to the hull volume", None, None))
    order = sorted(range(len(cells)), key=lambda i: los[i][0])
    for pos, a in enumerate(order):
        ahi, alo = his[a], los[a]
        for b in order[pos + 1 :]:
            if los[b][0] >= ahi[0]:
                break  # later cells start even further right in dim 0
            if all(
                alo[k] < his[b][k] and los[b][k] < ahi[k] for k in range(1, d)
            ):
                failures.append(("overlapping cell interiors", a, b))
    # budget constants
    cell_c = Fraction(len(cells), r**d)
    n_by_codim = [0] * (d + 1)
    for f in flats:
        if f.codim <= d:
            n_by_codim[f.codim] += 1
    conflict_c = Fraction(0)
    for cell in cells:
        for j, part in enumerate(cell.conflicts, start=1):
            if not part:
                continue
            budget = max(Fraction(1), Fraction(n_by_codim[j], r**j))
            conflict_c = max(conflict_c, Fraction(len(part)) / budget)
    return PartitionReport(not failures, cell_c, conflict_c, tuple(failures))
