"""Exact lower envelopes of shifted hyperbolas, their rays and segments.

The curve family is x -> r/(x - a) + y0 on x > a (all curves sharing one
threshold r > 0), extended symbolically by an arbitrarily high stub for
x <= a.  Any two such curves cross at most once, so they behave like
pseudo-lines; clipping them on the right (or on both sides) gives
pseudo-rays and pseudo-segments whose lower envelopes are computed by
linear stack scans, provided the clip abscissae run monotonically along
the pseudo-slope order.

Envelope breakpoints are abscissae of curve crossings: quadratic surds,
kept exact as (u + v*sqrt(D))/w.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .core import Rat, ZERO

__all__ = [
    "AlgNum",
    "HyperbolaCurve",
    "PseudoRay",
    "Edge",
    "Envelope",
    "alg_cmp",
    "curve_above",
    "curve_intersection",
    "lower_envelope_rays",
    "lower_envelope_segments",
    "pseudo_slope_key",
]


# ---------------------------------------------------------------------------
# exact algebraic numbers of degree two


def _sqrt_exact(x: Rat) -> Rat | None:
    """sqrt(x) when rational, else None."""
    if x < 0:
        raise ValueError("negative radicand")
    p, q = x.numerator, x.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Rat(rp, rq)
    return None


@dataclass(frozen=True)
class AlgNum:
    """(u + v*sqrt(D))/w with rational u, v, w, D; w > 0, D > 0, v != 0.

    Construct through :meth:`make`, which collapses rational cases to a
    plain Rat.  Ordering against Rat and other AlgNum values is exact.
    """

    u: Rat
    v: Rat
    w: Rat
    D: Rat

    @staticmethod
    def make(u, v, w, D) -> "AlgNum | Rat":
        u, v, w, D = Rat(u), Rat(v), Rat(w), Rat(D)
        if w == 0:
            raise ZeroDivisionError("w = 0")
        if w < 0:
            u, v, w = -u, -v, -w
        if D < 0:
            raise ValueError("negative radicand")
        if v == 0 or D == 0:
            return u / w
        s = _sqrt_exact(D)
        if s is not None:
            return (u + v * s) / w
        return AlgNum(u, v, w, D)

    def __float__(self) -> float:
        return (float(self.u) + float(self.v) * math.sqrt(float(self.D))) / float(self.w)

    def __lt__(self, other):
        return alg_cmp(self, other) < 0

    def __le__(self, other):
        return alg_cmp(self, other) <= 0

    def __gt__(self, other):
        return alg_cmp(self, other) > 0

    def __ge__(self, other):
        return alg_cmp(self, other) >= 0

    def __repr__(self):
        return f"({self.u} + {self.v}*sqrt({self.D}))/{self.w}"


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign1(P: Rat, Q: Rat, D: Rat) -> int:
    """Exact sign of P + Q*sqrt(D), D >= 0."""
    if Q == 0 or D == 0:
        return _sign(P)
    if P == 0:
        return _sign(Q)
    sp, sq = _sign(P), _sign(Q)
    if sp == sq:
        return sp
    # opposite signs: the larger square carries the sign
    return sp * _sign(P * P - Q * Q * D)


def _sign2(A: Rat, B: Rat, D1: Rat, C: Rat, D2: Rat) -> int:
    """Exact sign of A + B*sqrt(D1) + C*sqrt(D2) with a float prefilter."""
    if B == 0 or D1 == 0:
        return _sign1(A, C, D2)
    if C == 0 or D2 == 0:
        return _sign1(A, B, D1)
    if D1 == D2:
        return _sign1(A, B + C, D1)
    fa, fb, fc = float(A), float(B), float(C)
    s1f, s2f = math.sqrt(float(D1)), math.sqrt(float(D2))
    approx = fa + fb * s1f + fc * s2f
    scale = abs(fa) + abs(fb) * s1f + abs(fc) * s2f
    if math.isfinite(scale) and abs(approx) > scale * 1e-9:
        return 1 if approx > 0 else -1
    # exact fallback: compare A + B*sqrt(D1) against -C*sqrt(D2) by squaring
    s1 = _sign1(A, B, D1)
    s2 = _sign(C)
    if s1 == 0:
        return s2
    if s1 == s2:
        return s1
    return s1 * _sign1(A * A + B * B * D1 - C * C * D2, 2 * A * B, D1)


def alg_cmp(x, y) -> int:
    """Exact three-way comparison of AlgNum | Rat | int values."""
    if isinstance(x, AlgNum):
        u1, v1, w1, d1 = x.u, x.v, x.w, x.D
    else:
        u1, v1, w1, d1 = Rat(x), ZERO, Rat(1), ZERO
    if isinstance(y, AlgNum):
        u2, v2, w2, d2 = y.u, y.v, y.w, y.D
    else:
        u2, v2, w2, d2 = Rat(y), ZERO, Rat(1), ZERO
    return _sign2(u1 / w1 - u2 / w2, v1 / w1, d1, -v2 / w2, d2)


# ---------------------------------------------------------------------------
# the curve family


@dataclass(frozen=True)
class HyperbolaCurve:
    """x -> r/(x - a) + y0 on x > a; symbolically high (stub) for x <= a.

    The stub stands for the near-vertical left piece of the pseudo-line;
    its height grows with the pole a, so stubs order by pole.  Neither
    the stub offset nor its height is ever materialized.
    """

    a: Rat
    y0: Rat
    r: Rat
    source: object = None

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("hyperbola threshold must be positive")

    def value_at(self, x: Rat) -> Rat | None:
        """Finite value at x, or None on the stub."""
        if x <= self.a:
            return None
        return self.r / (x - self.a) + self.y0


def pseudo_slope_key(c: HyperbolaCurve):
    """Sort key: increasing key = increasing pseudo-slope.

    Smaller pseudo-slope = above to the left of a crossing; for this
    family that is the curve with the larger pole (ties: larger y0).
    """
    return (-c.a, -c.y0)


def curve_above(pt: tuple, c: HyperbolaCurve) -> bool:
    """Is the point strictly above the curve?  False anywhere on the stub."""
    x, y = pt
    return x > c.a and (x - c.a) * (y - c.y0) > c.r


def curve_intersection(c1: HyperbolaCurve, c2: HyperbolaCurve):
    """The unique crossing abscissa right of both poles, or None.

    With a shared r the condition (x-a1)(x-a2) = K for
    K = -r(a1-a2)/(y1-y2) has its larger root in the domain exactly when
    K > 0, which is also exactly when the curves cross at all.
    """
    if c1.r != c2.r:
        raise ValueError("curves must share the threshold r")
    if c1.a == c2.a or c1.y0 == c2.y0:
        return None
    K = -c1.r * (c1.a - c2.a) / (c1.y0 - c2.y0)
    if K <= 0:
        return None
    disc = (c1.a - c2.a) ** 2 + 4 * K
    return AlgNum.make(c1.a + c2.a, 1, 2, disc)


def _cmp_at(c1: HyperbolaCurve, c2: HyperbolaCurve, x: Rat) -> int:
    """Order of the two curves at rational x, stubs included."""
    v1, v2 = c1.value_at(x), c2.value_at(x)
    if v1 is None and v2 is None:
        return _sign(c1.a - c2.a)  # stub heights grow with the pole
    if v1 is None:
        return 1
    if v2 is None:
        return -1
    return _sign(v1 - v2)


def _below_left(c1: HyperbolaCurve, c2: HyperbolaCurve) -> bool:
    """Strictly below near -infinity (stub order; ties fall to y0)."""
    return (c1.a, c1.y0) < (c2.a, c2.y0)


def _below_right(c1: HyperbolaCurve, c2: HyperbolaCurve) -> bool:
    """Strictly below near +infinity."""
    return (c1.y0, c1.a) < (c2.y0, c2.a)


# ---------------------------------------------------------------------------
# envelope scaffolding


@dataclass(frozen=True)
class PseudoRay:
    """A clipped curve: x <= right_clip and/or x >= left_clip.

    A missing clip leaves that side unbounded; at least one clip must be
    present, and a two-sided clip must leave a nonempty span.
    """

    curve: HyperbolaCurve
    right_clip: Rat | None
    left_clip: Rat | None = None

    def __post_init__(self):
        if self.right_clip is None and self.left_clip is None:
            raise ValueError("a pseudo-ray needs at least one clip")
        if (
            self.right_clip is not None
            and self.left_clip is not None
            and self.left_clip >= self.right_clip
        ):
            raise ValueError("need left_clip < right_clip")


@dataclass(frozen=True)
class Edge:
    """Active curve on [start, end]; start None = -inf, end None = +inf."""

    start: object
    end: object
    curve: HyperbolaCurve


def _cmp_start(p, q) -> int:
    """Compare two left boundaries (None = -inf)."""
    if p is None and q is None:
        return 0
    if p is None:
        return -1
    if q is None:
        return 1
    return alg_cmp(p, q)


def _cmp_end(p, q) -> int:
    """Compare two right boundaries (None = +inf)."""
    if p is None and q is None:
        return 0
    if p is None:
        return 1
    if q is None:
        return -1
    return alg_cmp(p, q)


class Envelope:
    """A lower envelope: ordered, possibly gapped edges, left to right."""

    def __init__(self, edges: list, input_count: int):
        merged: list[Edge] = []
        for e in edges:
            if e.start is not None and e.end is not None and alg_cmp(e.start, e.end) >= 0:
                continue  # degenerate sliver from a restriction
            if (
                merged
                and merged[-1].curve == e.curve
                and merged[-1].end is not None
                and e.start is not None
                and alg_cmp(merged[-1].end, e.start) == 0
            ):
                merged[-1] = Edge(merged[-1].start, e.end, e.curve)
            else:
                merged.append(e)
        for prev, nxt in zip(merged, merged[1:]):
            if prev.end is None or nxt.start is None or alg_cmp(prev.end, nxt.start) > 0:
                raise AssertionError("envelope edges out of order")
        self.edges = merged
        self.input_count = input_count
        if self.edge_count > 2 * max(input_count, 1):
            raise AssertionError(
                f"envelope has {self.edge_count} edges for {input_count} inputs"
            )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def breakpoints(self) -> list:
        return [e.start for e in self.edges[1:]]

    def edges_at(self, x: Rat) -> list:
        """The one or two edges whose closed span contains x."""
        lo, hi = 0, len(self.edges)
        while lo < hi:
            mid = (lo + hi) // 2
            e = self.edges[mid]
            if e.end is not None and alg_cmp(e.end, x) < 0:
                lo = mid + 1
            else:
                hi = mid
        out = []
        for k in (lo, lo + 1):
            if k < len(self.edges):
                e = self.edges[k]
                if _cmp_start(e.start, x) <= 0 and _cmp_end(e.end, x) >= 0:
                    out.append(e)
        return out

    def evaluate(self, x: Rat) -> Rat | None:
        """Exact envelope value at rational x; None when no covering curve
        is finite there."""
        vals = [e.curve.value_at(x) for e in self.edges_at(x)]
        vals = [v for v in vals if v is not None]
        return min(vals) if vals else None


def _dedupe_adjacent(rays: list) -> list:
    """Merge neighbours with identical curves when their spans overlap.

    For one-sided rays the spans are nested, so the merge keeps the wider
    clip; disjoint segment spans of one curve stay separate.
    """
    out: list[PseudoRay] = []
    for ray in rays:
        if out and (out[-1].curve.a, out[-1].curve.y0) == (ray.curve.a, ray.curve.y0):
            prev = out[-1]
            overlap = (
                prev.left_clip is None
                or ray.right_clip is None
                or prev.left_clip <= ray.right_clip
            ) and (
                ray.left_clip is None
                or prev.right_clip is None
                or ray.left_clip <= prev.right_clip
            )
            if overlap:
                left = (
                    None
                    if prev.left_clip is None or ray.left_clip is None
                    else min(prev.left_clip, ray.left_clip)
                )
                right = (
                    None
                    if prev.right_clip is None or ray.right_clip is None
                    else max(prev.right_clip, ray.right_clip)
                )
                out[-1] = PseudoRay(prev.curve, right, left)
                continue
        out.append(ray)
    return out


def _check_slope_sorted(rays: list, strict: bool) -> None:
    keys = [pseudo_slope_key(r.curve) for r in rays]
    for k1, k2 in zip(keys, keys[1:]):
        if k1 > k2 or (strict and k1 == k2):
            raise ValueError("rays must be sorted by pseudo-slope")
    if len({r.curve.r for r in rays}) > 1:
        raise ValueError("curves must share the threshold r")


def _monotone_dir(vals: list) -> str:
    """'inc', 'dec' or 'flat'; raises for non-monotone sequences."""
    inc = all(a <= b for a, b in zip(vals, vals[1:]))
    dec = all(a >= b for a, b in zip(vals, vals[1:]))
    if inc and dec:
        return "flat"
    if inc:
        return "inc"
    if dec:
        return "dec"
    raise ValueError("clip abscissae must be monotone in the pseudo-slope order")


# ---------------------------------------------------------------------------
# the four stack scans


def _scan_left_clips_inc(rays: list) -> list:
    """Leftward rays whose clips increase with pseudo-slope.

    Inserting by decreasing clip, each new ray has the smallest
    pseudo-slope so far, hence lies below the others to the right of its
    crossings: it claims a suffix of the envelope within its domain.
    The part of the envelope right of the new clip is final.
    """
    active: list[Edge] = []
    emitted: list[Edge] = []
    for ray in reversed(rays):
        c, xr = ray.curve, ray.right_clip
        while active and active[-1].start is not None and alg_cmp(active[-1].start, xr) >= 0:
            emitted.append(active.pop())
        if active and _cmp_end(active[-1].end, xr) > 0:
            top = active[-1]
            emitted.append(Edge(xr, top.end, top.curve))
            active[-1] = Edge(top.start, xr, top.curve)
        if not active:
            active.append(Edge(None, xr, c))
            continue
        if _cmp_at(c, active[-1].curve, xr) >= 0:
            continue  # never strictly below within its domain
        while True:
            top = active[-1]
            cr = curve_intersection(c, top.curve)
            if cr is not None and _cmp_start(top.start, cr) < 0:
                active[-1] = Edge(top.start, cr, top.curve)
                active.append(Edge(cr, xr, c))
                break
            active.pop()
            if not active:
                active.append(Edge(None, xr, c))
                break
    return active + emitted[::-1]


def _scan_left_clips_dec(rays: list) -> list:
    """Leftward rays whose clips decrease with pseudo-slope.

    Inserting by decreasing clip, each new ray has the largest
    pseudo-slope so far, hence lies below the others near -infinity: it
    claims a prefix of the envelope.
    """
    active: deque = deque()
    emitted: list[Edge] = []
    for ray in rays:
        c, xr = ray.curve, ray.right_clip
        while active and active[-1].start is not None and alg_cmp(active[-1].start, xr) >= 0:
            emitted.append(active.pop())
        if active and _cmp_end(active[-1].end, xr) > 0:
            top = active[-1]
            emitted.append(Edge(xr, top.end, top.curve))
            active[-1] = Edge(top.start, xr, top.curve)
        if active:
            assert _below_left(c, active[0].curve)
        claimed = False
        while active:
            head = active[0]
            cr = curve_intersection(c, head.curve)
            if cr is None or _cmp_end(cr, head.end) >= 0:
                active.popleft()
                continue
            if head.start is not None and alg_cmp(cr, head.start) <= 0:
                active.appendleft(Edge(None, head.start, c))
            else:
                active[0] = Edge(cr, head.end, head.curve)
                active.appendleft(Edge(None, cr, c))
            claimed = True
            break
        if not claimed:
            active.append(Edge(None, xr, c))
    return list(active) + emitted[::-1]


def _scan_right_clips_inc(rays: list) -> list:
    """Rightward rays whose left clips increase with pseudo-slope.

    Inserting by increasing clip, each new ray has the largest
    pseudo-slope so far, hence lies below the others to the left of its
    crossings: it claims a prefix of its own domain.  The part of the
    envelope left of the new clip is final.
    """
    active: deque = deque()
    emitted: list[Edge] = []
    for ray in rays:
        c, xl = ray.curve, ray.left_clip
        while active and active[0].end is not None and alg_cmp(active[0].end, xl) <= 0:
            emitted.append(active.popleft())
        if active and _cmp_start(active[0].start, xl) < 0:
            head = active[0]
            emitted.append(Edge(head.start, xl, head.curve))
            active[0] = Edge(xl, head.end, head.curve)
        if not active:
            active.append(Edge(xl, None, c))
            continue
        order = _cmp_at(c, active[0].curve, xl)
        if order > 0:
            continue
        if order == 0 and not (
            c.a == active[0].curve.a and c.y0 < active[0].curve.y0
        ):
            # A tie at xl only matters when both sit on equal-pole stubs
            # and c is the lower translate past the pole; forward order
            # guarantees later equal-pole rays have the smaller y0.
            continue
        while True:
            head = active[0]
            cr = curve_intersection(c, head.curve)
            if cr is not None and _cmp_end(cr, head.end) < 0:
                if alg_cmp(cr, head.start) <= 0:
                    active.appendleft(Edge(xl, head.start, c))
                else:
                    active[0] = Edge(cr, head.end, head.curve)
                    active.appendleft(Edge(xl, cr, c))
                break
            active.popleft()
            if not active:
                active.appendleft(Edge(xl, None, c))
                break
    return emitted + list(active)


def _scan_right_clips_dec(rays: list) -> list:
    """Rightward rays whose left clips decrease with pseudo-slope.

    Inserting by increasing clip, each new ray has the smallest
    pseudo-slope so far, hence lies below the others near +infinity: it
    claims a suffix of the envelope.
    """
    active: deque = deque()
    emitted: list[Edge] = []
    for ray in reversed(rays):
        c, xl = ray.curve, ray.left_clip
        while active and active[0].end is not None and alg_cmp(active[0].end, xl) <= 0:
            emitted.append(active.popleft())
        if active and _cmp_start(active[0].start, xl) < 0:
            head = active[0]
            emitted.append(Edge(head.start, xl, head.curve))
            active[0] = Edge(xl, head.end, head.curve)
        if not active:
            active.append(Edge(xl, None, c))
            continue
        if not _below_right(c, active[-1].curve):
            continue
        claimed = False
        while active:
            top = active[-1]
            cr = curve_intersection(c, top.curve)
            if cr is None or _cmp_start(cr, top.start) <= 0:
                active.pop()
                continue
            if top.end is not None and alg_cmp(cr, top.end) >= 0:
                active.append(Edge(top.end, None, c))
            else:
                active[-1] = Edge(top.start, cr, top.curve)
                active.append(Edge(cr, None, c))
            claimed = True
            break
        if not claimed:
            active.appendleft(Edge(xl, None, c))
    return emitted + list(active)


# ---------------------------------------------------------------------------
# public envelope constructions


def lower_envelope_rays(rays) -> Envelope:
    """Lower envelope of left-unbounded pseudo-rays in one stack scan.

    Input must be sorted by pseudo-slope with right clips monotone along
    that order (either direction); violations raise ValueError.
    """
    rays = list(rays)
    n = len(rays)
    for r in rays:
        if r.right_clip is None or r.left_clip is not None:
            raise ValueError("expected left-unbounded, right-clipped rays")
    rays = _dedupe_adjacent(rays)
    _check_slope_sorted(rays, strict=True)
    if not rays:
        return Envelope([], 0)
    if _monotone_dir([r.right_clip for r in rays]) == "dec":
        edges = _scan_left_clips_dec(rays)
    else:
        edges = _scan_left_clips_inc(rays)
    return Envelope(edges, n)


def _lower_envelope_rightward(rays: list) -> Envelope:
    """Mirror of lower_envelope_rays for right-unbounded rays.

    Right clips on the inputs, if any, are dropped; callers restrict the
    result to a region where every input is known to extend past it.
    """
    n = len(rays)
    rays = [PseudoRay(r.curve, None, r.left_clip) for r in rays]
    rays = _dedupe_adjacent(rays)
    _check_slope_sorted(rays, strict=True)
    if not rays:
        return Envelope([], 0)
    if _monotone_dir([r.left_clip for r in rays]) == "dec":
        edges = _scan_right_clips_dec(rays)
    else:
        edges = _scan_right_clips_inc(rays)
    return Envelope(edges, n)


def _restrict_edges(edges: list, lo, hi) -> list:
    """Clip an edge list to [lo, hi]; None leaves that side open."""
    out = []
    for e in edges:
        if lo is not None and e.end is not None and alg_cmp(e.end, lo) <= 0:
            continue
        if hi is not None and e.start is not None and alg_cmp(e.start, hi) >= 0:
            continue
        s, t = e.start, e.end
        if lo is not None and (s is None or alg_cmp(s, lo) < 0):
            s = lo
        if hi is not None and (t is None or alg_cmp(t, hi) > 0):
            t = hi
        out.append(Edge(s, t, e.curve))
    return out


def _min_pair_edges(c1: HyperbolaCurve, c2: HyperbolaCurve, start, end) -> list:
    """Edges of min(c1, c2) on [start, end].

    Decided from the crossing abscissa and the far-side orders alone, so
    no curve is ever evaluated at an algebraic position.
    """
    if (c1.a, c1.y0) == (c2.a, c2.y0):
        return [Edge(start, end, c1)]
    cr = curve_intersection(c1, c2)
    if cr is None:
        return [Edge(start, end, c1 if _below_left(c1, c2) else c2)]
    pre, post = (c1, c2) if _below_left(c1, c2) else (c2, c1)
    if _cmp_start(start, cr) >= 0:
        return [Edge(start, end, post)]
    if _cmp_end(end, cr) <= 0:
        return [Edge(start, end, pre)]
    return [Edge(start, cr, pre), Edge(cr, end, post)]


def _merge_edge_lists(ea: list, eb: list) -> list:
    """Pointwise minimum of two envelope edge lists.

    On any stretch where both sides keep a fixed curve the pair crosses
    at most once, so a single sweep with exact splits suffices; stretches
    covered by one side only pass through unchanged.
    """
    ea, eb = list(ea), list(eb)
    out: list[Edge] = []
    ia = ib = 0
    while ia < len(ea) and ib < len(eb):
        A, B = ea[ia], eb[ib]
        if A.end is not None and B.start is not None and alg_cmp(A.end, B.start) <= 0:
            out.append(A)
            ia += 1
            continue
        if B.end is not None and A.start is not None and alg_cmp(B.end, A.start) <= 0:
            out.append(B)
            ib += 1
            continue
        # overlapping: emit any one-sided lead-in, then the joint stretch
        cs = _cmp_start(A.start, B.start)
        if cs < 0:
            out.append(Edge(A.start, B.start, A.curve))
        elif cs > 0:
            out.append(Edge(B.start, A.start, B.curve))
        start = A.start if cs >= 0 else B.start
        ce = _cmp_end(A.end, B.end)
        end = A.end if ce <= 0 else B.end
        out.extend(_min_pair_edges(A.curve, B.curve, start, end))
        if ce <= 0:
            ia += 1
        else:
            ea[ia] = Edge(end, A.end, A.curve)
        if ce >= 0:
            ib += 1
        else:
            eb[ib] = Edge(end, B.end, B.curve)
    out.extend(ea[ia:])
    out.extend(eb[ib:])
    return out


def lower_envelope_segments(segs) -> Envelope:
    """Lower envelope of pseudo-segments with doubly monotone clips.

    Same-direction clips use the greedy stabbing construction: stab at
    the leftmost right endpoint among what remains, drop the stabbed,
    repeat.  Between consecutive stabs the segments behave like rays
    (a leftward family from the previous stab group and a rightward
    family starting inside), and every segment lives in at most two
    slabs.  Opposite-direction clips make the spans nested, and the
    envelope is a rightward-ray and a leftward-ray envelope concatenated
    at one known rational abscissa.
    """
    segs = list(segs)
    n = len(segs)
    for s in segs:
        if s.left_clip is None or s.right_clip is None:
            raise ValueError("segments need both clips")
    segs = _dedupe_adjacent(segs)
    _check_slope_sorted(segs, strict=False)
    if not segs:
        return Envelope([], 0)
    ldir = _monotone_dir([s.left_clip for s in segs])
    rdir = _monotone_dir([s.right_clip for s in segs])
    if "flat" in (ldir, rdir) or ldir == rdir:
        edges = _segments_same_direction(segs)
    else:
        if ldir == "dec":
            split = segs[0].left_clip  # spans grow along the order
        else:
            split = segs[-1].right_clip  # spans shrink along the order
        left_part = _lower_envelope_rightward(segs).edges
        right_part = lower_envelope_rays(
            [PseudoRay(s.curve, s.right_clip) for s in segs]
        ).edges
        edges = _restrict_edges(left_part, None, split) + _restrict_edges(
            right_part, split, None
        )
    return Envelope(edges, n)


def _segments_same_direction(segs: list) -> list:
    by_right = sorted(range(len(segs)), key=lambda i: segs[i].right_clip)
    by_left = sorted(range(len(segs)), key=lambda i: segs[i].left_clip)
    alive = [True] * len(segs)
    groups: list[list[int]] = []
    stabs: list[Rat] = []
    taken = 0
    ptr = 0
    while taken < len(segs):
        while not alive[by_right[ptr]]:
            ptr += 1
        v = segs[by_right[ptr]].right_clip
        stabs.append(v)
        grp = []
        for i in by_left:
            if alive[i] and segs[i].left_clip <= v:
                alive[i] = False
                grp.append(i)
        groups.append(grp)
        taken += len(grp)
    edges: list[Edge] = []
    bounds = [None] + stabs + [None]
    for slab in range(len(groups) + 1):
        lo, hi = bounds[slab], bounds[slab + 1]
        el: list[Edge] = []
        er: list[Edge] = []
        if slab > 0:
            lrays = sorted(
                (PseudoRay(segs[i].curve, segs[i].right_clip) for i in groups[slab - 1]),
                key=lambda r: pseudo_slope_key(r.curve),
            )
            el = lower_envelope_rays(lrays).edges
        if slab < len(groups):
            rrays = sorted(
                (PseudoRay(segs[i].curve, None, segs[i].left_clip) for i in groups[slab]),
                key=lambda r: pseudo_slope_key(r.curve),
            )
            er = _lower_envelope_rightward(rrays).edges
        merged = _merge_edge_lists(el, er) if el and er else (el or er)
        edges.extend(_restrict_edges(merged, lo, hi))
    return edges
