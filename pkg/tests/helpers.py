"""Shared random generators for the test suite.

Everything is driven by an explicit random.Random so failures reproduce.
"""

from __future__ import annotations

import random
from fractions import Fraction as F

from emptybox.core import AABox, Instance, Point, Variant
from emptybox.rect2d import HSeg


def frac(rng: random.Random, lo: int = -16, hi: int = 16, dens=(1, 1, 1, 2, 3, 4, 8)) -> F:
    den = rng.choice(dens)
    return F(rng.randrange(lo * den, hi * den + 1), den)


def balanced_word(rng: random.Random, n: int) -> list[int]:
    """A Dyck word of length 2n (+1 = open, -1 = close) via cycle rotation."""
    seq = [1] * n + [-1] * n
    rng.shuffle(seq)
    run, best, best_pos = 0, 0, 0
    for i, v in enumerate(seq):
        run += v
        if run < best:
            best, best_pos = run, i + 1
    return seq[best_pos:] + seq[:best_pos]


def laminar_slots(rng: random.Random, n: int) -> list[tuple[int, int]]:
    """n spans over slot positions 0..2n-1, pairwise nested or disjoint."""
    spans: list[tuple[int, int]] = []
    stack: list[int] = []
    for pos, v in enumerate(balanced_word(rng, n)):
        if v == 1:
            stack.append(pos)
        else:
            spans.append((stack.pop(), pos))
    return spans


def gen_laminar_segments(
    rng: random.Random,
    n: int,
    *,
    x_lo: F = F(0),
    x_hi: F = F(64),
    y_lo: F = F(0),
    y_hi: F = F(32),
    ties: bool = False,
) -> list[HSeg]:
    """Random laminar family of HSegs with defining points strictly inside.

    With ties=True the 2n endpoint slots are mapped to coordinates with
    repetitions (any weakly monotone slot map preserves laminarity), so
    shared endpoints between nested spans and touching siblings show up;
    spans collapsing to a single coordinate are dropped, as the real
    segment construction drops them.
    """
    if n == 0:
        return []
    spans = laminar_slots(rng, n)
    if ties:
        pool = max(3, (2 * n) // 3)
        cuts = sorted(rng.choices(range(1, pool + 1), k=2 * n))
        denom = pool + 1
    else:
        cuts = sorted(rng.sample(range(1, 8 * n + 8), 2 * n))
        denom = 8 * n + 9
    width = x_hi - x_lo
    coord = [x_lo + width * F(c, denom) for c in cuts]
    out: list[HSeg] = []
    for a, b in spans:
        xm, xp = coord[a], coord[b]
        if xm >= xp:
            continue
        y = y_lo + (y_hi - y_lo) * F(rng.randrange(0, 257), 256)
        k = rng.randrange(1, 16)
        src_x = xm + (xp - xm) * F(k, 16)
        out.append(HSeg(xm, xp, y, source=(src_x, y)))
    out.sort(key=lambda s: (s.x_minus, -s.x_plus))
    return out


def gen_instance_2d(
    rng: random.Random,
    n: int,
    kind: str = "unrestricted",
    *,
    grid: int | None = None,
) -> Instance:
    """Random 2D instance; grid=k snaps coordinates to a k-step lattice so
    duplicate coordinates get exercised."""
    cx, cy = rng.randrange(-4, 5), rng.randrange(-4, 5)
    w, h = rng.randrange(8, 33), rng.randrange(8, 33)
    lo = (F(cx - w), F(cy - h))
    hi = (F(cx + w), F(cy + h))

    def coord(a: F, b: F) -> F:
        if grid:
            span = int(b - a)
            return a + F(rng.randrange(0, grid + 1) * span, grid)
        return a + (b - a) * F(rng.randrange(0, 2049), 2048)

    pts = tuple(
        Point((coord(lo[0], hi[0]), coord(lo[1], hi[1]))) for _ in range(n)
    )
    if kind == "unrestricted":
        variant = Variant.unrestricted()
    elif kind == "anchored":
        # shift the box so it contains the origin
        if not (lo[0] <= 0 <= hi[0] and lo[1] <= 0 <= hi[1]):
            dx, dy = -(lo[0] + hi[0]) / 2, -(lo[1] + hi[1]) / 2
            lo = (lo[0] + dx, lo[1] + dy)
            hi = (hi[0] + dx, hi[1] + dy)
            pts = tuple(Point((p[0] + dx, p[1] + dy)) for p in pts)
        variant = Variant.anchored()
    elif kind == "point":
        variant = Variant.point_restricted(Point((coord(lo[0], hi[0]), coord(lo[1], hi[1]))))
    elif kind in ("line", "plane"):
        axis = rng.randrange(2)
        variant = Variant(kind, fixed=((axis, coord(lo[axis], hi[axis])),))
    else:
        raise ValueError(kind)
    return Instance(d=2, b0=AABox(lo, hi), points=pts, variant=variant)


def gen_instance(rng: random.Random, d: int, n: int, kind: str = "unrestricted") -> Instance:
    """Random d-dimensional instance with smallish rational coordinates."""
    lo = tuple(F(rng.randrange(-8, 1)) for _ in range(d))
    hi = tuple(F(rng.randrange(1, 9)) + l for l in lo)

    def coord(i: int) -> F:
        return lo[i] + (hi[i] - lo[i]) * F(rng.randrange(0, 65), 64)

    pts = tuple(Point(tuple(coord(i) for i in range(d))) for _ in range(n))
    if kind == "unrestricted":
        variant = Variant.unrestricted()
    elif kind == "anchored":
        mid = tuple((a + b) / 2 for a, b in zip(lo, hi))
        lo = tuple(a - m for a, m in zip(lo, mid))
        hi = tuple(b - m for b, m in zip(hi, mid))
        pts = tuple(Point(tuple(c - m for c, m in zip(p, mid))) for p in pts)
        variant = Variant.anchored()
    elif kind == "point":
        variant = Variant.point_restricted(Point(tuple(coord(i) for i in range(d))))
    elif kind == "plane":
        axis = rng.randrange(d)
        variant = Variant.plane_restricted(axis, coord(axis))
    elif kind == "line":
        free = rng.randrange(d)
        variant = Variant.line_restricted(
            [(i, coord(i)) for i in range(d) if i != free]
        )
    else:
        raise ValueError(kind)
    return Instance(d=d, b0=AABox(lo, hi), points=pts, variant=variant)
