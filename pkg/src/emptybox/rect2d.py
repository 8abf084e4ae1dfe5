"""The 2D pipeline: segment reduction, nested case, fixed-line decision,
the interval-tree decision algorithm, and the optimization wrappers.

Horizontal segments are the currency here.  For points below a reference
line, s(p) is the widest horizontal segment through p that no input point
blocks from strictly above; the spans of these segments form a laminar
family, which is what the decision machinery exploits.
"""

from __future__ import annotations

import bisect
import math
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .core import (
    AABox,
    InfeasibleError,
    Instance,
    PairSearch,
    Rat,
    SolveResult,
    Stats,
    ZERO,
    chan_optimize,
)

__all__ = [
    "HSeg",
    "LaminarSet",
    "DecisionQuery",
    "Rect2DConfig",
    "PairResult",
    "cartesian_segments",
    "check_laminar",
    "solve_nested_case",
    "decide_fixed_line",
    "decide_good_pair",
    "maximize_good_pair",
    "solve_line_restricted",
    "solve_rect2d",
]


@dataclass(frozen=True)
class HSeg:
    """A horizontal segment [x_minus, x_plus] at height y.

    ``source`` is the defining point (x, y) for segments built from an
    input point, or None for wall sentinels that span everything.
    """

    x_minus: Rat
    x_plus: Rat
    y: Rat
    source: tuple[Rat, Rat] | None = None

    def __post_init__(self):
        if self.x_minus >= self.x_plus:
            raise ValueError("segment needs x_minus < x_plus")

    @property
    def width(self) -> Rat:
        return self.x_plus - self.x_minus


def check_laminar(segments: Sequence[HSeg]) -> None:
    """Raise ValueError unless every two spans are nested or have disjoint
    interiors (sharing an endpoint is fine - wall-blocked segments touch)."""
    order = sorted(segments, key=lambda s: (s.x_minus, -s.x_plus))
    stack: list[HSeg] = []
    for seg in order:
        while stack and stack[-1].x_plus <= seg.x_minus:
            stack.pop()
        if stack and seg.x_plus > stack[-1].x_plus:
            a, b = stack[-1], seg
            raise ValueError(
                f"spans cross: [{a.x_minus},{a.x_plus}] vs [{b.x_minus},{b.x_plus}]"
            )
        stack.append(seg)


@dataclass(frozen=True)
class LaminarSet:
    """A family of segments whose x-spans pairwise nest or do not overlap."""

    segments: tuple[HSeg, ...]

    def __post_init__(self):
        check_laminar(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)


def _segs(x: LaminarSet | Iterable[HSeg]) -> list[HSeg]:
    if isinstance(x, LaminarSet):
        return list(x.segments)
    return list(x)


@dataclass(frozen=True)
class DecisionQuery:
    """Threshold for the good-pair decision; must be positive."""

    r: Rat

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("decision threshold must be positive")


@dataclass(frozen=True)
class Rect2DConfig:
    b: int
    base_case_size: int = 64

    @staticmethod
    def for_size(n: int) -> "Rect2DConfig":
        return Rect2DConfig(b=max(_ceil_log2(n), 8))


def _ceil_log2(n: int) -> int:
    return max(1, (max(n, 1) - 1).bit_length())


# ---------------------------------------------------------------------------
# segment construction


def cartesian_segments(
    points: Sequence[tuple[Rat, Rat]], b0, side: str
) -> LaminarSet:
    """Support segments of all points via two nearest-blocker stack scans.

    side="below": a point q blocks iff q.y > p.y (strictly); the segment
    of p runs between the nearest blockers on each side, falling back to
    b0's vertical walls.  side="above" mirrors the blocking rule.
    Points with a blocker at their own x-coordinate get a degenerate
    segment, which cannot support any rectangle and is dropped.
    """
    if side not in ("below", "above"):
        raise ValueError("side must be 'below' or 'above'")
    lox, hix = b0.lo[0], b0.hi[0]
    sgn = 1 if side == "below" else -1

    # sort so that, at equal x, the blocking (higher for "below") point
    # is processed first and can block its colleagues at the same x
    pts = sorted(points, key=lambda p: (p[0], -sgn * p[1]))

    left: dict[int, Rat] = {}
    stack: list[int] = []
    for i, (px, py) in enumerate(pts):
        key = sgn * py
        while stack and sgn * pts[stack[-1]][1] <= key:
            stack.pop()
        left[i] = pts[stack[-1]][0] if stack else lox
        stack.append(i)

    right: dict[int, Rat] = {}
    stack.clear()
    order_r = sorted(range(len(pts)), key=lambda i: (-pts[i][0], -sgn * pts[i][1]))
    for i in order_r:
        key = sgn * pts[i][1]
        while stack and sgn * pts[stack[-1]][1] <= key:
            stack.pop()
        right[i] = pts[stack[-1]][0] if stack else hix
        stack.append(i)

    out = []
    for i, (px, py) in enumerate(pts):
        if left[i] < right[i]:
            out.append(HSeg(left[i], right[i], py, source=(px, py)))
    return LaminarSet(tuple(out))


# ---------------------------------------------------------------------------
# the nested case


def solve_nested_case(S, T):
    """Best "three supports on one side" candidate.

    For each s, the rectangle grown from s's full span is stopped by the
    lowest t whose defining point lies strictly inside the span (wall
    sentinels, source None, stop every span).  Returns (value, s, t)
    maximizing span * (y_t - y_s), or None.  Runs bottom-up over the
    laminar forest of S in linear time after sorting.
    """
    S = _segs(S)
    T = _segs(T)
    if not S or not T:
        return None

    sentinel_best = None  # lowest wall sentinel
    anchors = []
    for t in T:
        if t.source is None:
            if sentinel_best is None or t.y < sentinel_best.y:
                sentinel_best = t
        else:
            anchors.append((t.source[0], t))
    anchors.sort(key=lambda a: a[0])

    order = sorted(range(len(S)), key=lambda i: (S[i].x_minus, -S[i].x_plus))

    # one sweep assigns each anchor to the smallest strictly-containing
    # span and wires up the laminar forest
    own: list[list[HSeg]] = [[] for _ in S]
    children: list[list[int]] = [[] for _ in S]
    roots: list[int] = []
    stack: list[int] = []
    ai = 0
    m = len(anchors)
    for i in order:
        x = S[i].x_minus
        while ai < m and anchors[ai][0] <= x:
            _assign(anchors[ai], stack, own, S)
            ai += 1
        while stack and S[stack[-1]].x_plus <= x:
            stack.pop()
        if stack:
            children[stack[-1]].append(i)
        else:
            roots.append(i)
        stack.append(i)
    while ai < m:
        _assign(anchors[ai], stack, own, S)
        ai += 1

    best = None
    # iterative post-order: children's subtree minima flow upward
    sub_min: list[HSeg | None] = [None] * len(S)
    for root in roots:
        todo = [(root, False)]
        while todo:
            i, done = todo.pop()
            if not done:
                todo.append((i, True))
                todo.extend((c, False) for c in children[i])
                continue
            low = sentinel_best
            for t in own[i]:
                if low is None or t.y < low.y:
                    low = t
            for c in children[i]:
                t = sub_min[c]
                if t is not None and (low is None or t.y < low.y):
                    low = t
            sub_min[i] = low
            if low is not None:
                v = (S[i].x_plus - S[i].x_minus) * (low.y - S[i].y)
                if best is None or v > best[0]:
                    best = (v, S[i], low)
    return best


def _assign(anchor, stack, own, S):
    x, t = anchor
    # the innermost open span strictly containing x; spans whose right
    # end is <= x are dead but must stay for their still-open ancestors,
    # so scan down without popping
    for i in reversed(stack):
        if S[i].x_plus > x:
            if S[i].x_minus < x:
                own[i].append(t)
            return


# ---------------------------------------------------------------------------
# integer rescaling and endpoint positions

_SIGMA_C = 2  # frozen constant for the slab-coverage bound (measured)


def _log_star(n: int) -> int:
    """Iterated base-2 logarithm: applications of log2 until the value
    drops to 1 or below."""
    k = 0
    x = float(n)
    while x > 1.0:
        x = math.log2(x)
        k += 1
    return k


def _scaled(values: Sequence[Rat]) -> tuple[list[int], int]:
    """Clear denominators: returns (integer values, common multiplier)."""
    dens = {v.denominator for v in values}
    dens.discard(1)
    if not dens:
        return [v.numerator for v in values], 1
    d = math.lcm(*dens)
    return [v.numerator * (d // v.denominator) for v in values], d


def _shift_positions(
    sxm: list[int], sxp: list[int], txm: list[int], txp: list[int]
) -> tuple[list[int], list[int], list[int], list[int]]:
    """Distinct total positions for all 4n endpoint occurrences.

    Ties between equal coordinates are resolved so that every strict
    inequality of the pair predicate becomes false exactly on ties:
    rights sort before lefts (touching spans stay laminar), s-rights
    before t-rights, s-lefts before t-lefts.  Within a class, shared
    lefts put the outer span first and shared rights the inner first,
    so nested spans keep properly nested positions; identical spans
    nest by index.  Returns (slpos, srpos, tlpos, trpos).
    """
    ns, nt = len(sxm), len(txm)
    m = 2 * (ns + nt)
    xs = sxm + sxp + txm + txp
    vmin, vmax = min(xs), max(xs)
    span = vmax - vmin
    w2 = max(1, span.bit_length())  # secondary field width (endpoint values)
    w3 = max(1, (2 * max(ns, nt)).bit_length())  # index tiebreak width
    wid = max(1, (m - 1).bit_length())
    nmax = max(ns, nt)

    def key(x: int, delta: int, sec: int, ter: int, eid: int) -> int:
        k = (x - vmin) << 2 | delta
        k = k << w2 | (sec + vmax)
        k = k << w3 | (ter + nmax)
        return k << wid | eid

    arr = []
    for i in range(ns):
        arr.append(key(sxp[i], 0, -sxm[i], -i, i))  # s-right
        arr.append(key(sxm[i], 2, -sxp[i], i, ns + i))  # s-left
    for j in range(nt):
        arr.append(key(txp[j], 1, -txm[j], -j, 2 * ns + j))  # t-right
        arr.append(key(txm[j], 3, -txp[j], j, 2 * ns + nt + j))  # t-left
    arr.sort()
    mask = (1 << wid) - 1
    pos = [0] * m
    for rank, packed in enumerate(arr):
        pos[packed & mask] = rank
    srpos = pos[:ns]
    slpos = pos[ns : 2 * ns]
    trpos = pos[2 * ns : 2 * ns + nt]
    tlpos = pos[2 * ns + nt :]
    return slpos, srpos, tlpos, trpos


# ---------------------------------------------------------------------------
# lower envelopes of curve pieces over integer slots

# The decision machinery never compares curves at arbitrary rationals:
# every comparison happens at a query abscissa ("slot"), which keeps the
# arithmetic in plain integers after rescaling.  A piece is the curve
# gamma_i(x) = R/(x - A_i) + Y0_i restricted to a slot interval on which
# it is real (query x strictly right of the pole); an envelope is the
# slotwise argmin, reported as maximal runs (lo, hi, piece).


class _SlotEnv:
    __slots__ = ("xq", "A", "Y0", "RN", "RD")

    def __init__(self, xq: Sequence[int], A: Sequence[int], Y0: Sequence[int], RN: int, RD: int):
        self.xq = xq
        self.A = A
        self.Y0 = Y0
        self.RN = RN
        self.RD = RD

    def cmp(self, i: int, k: int, j: int) -> int:
        """Total order of pieces i, k at slot j: -1 if i is below.

        Exact value ties break toward the piece that is lower just right
        of the slot (larger pseudo-slope above), then by index; poles at
        or right of the query compare as +infinity ordered by pole.  The
        resulting sign sequence over slots is monotone for every pair.
        """
        x = self.xq[j]
        di = x - self.A[i]
        dk = x - self.A[k]
        if di <= 0 or dk <= 0:
            if di > 0:
                return -1
            if dk > 0:
                return 1
            a, b = (self.A[i], self.Y0[i], i), (self.A[k], self.Y0[k], k)
            return -1 if a < b else 1
        lhs = self.RN * (dk - di)
        rhs = self.RD * di * dk * (self.Y0[k] - self.Y0[i])
        if lhs != rhs:
            return -1 if lhs < rhs else 1
        si = (-self.A[i], -self.Y0[i])
        sk = (-self.A[k], -self.Y0[k])
        if si != sk:
            return 1 if si > sk else -1
        return 1 if i > k else -1

    def first_where(self, i: int, k: int, lo: int, hi: int, sign: int) -> int:
        """First slot in [lo, hi] where cmp(i, k, slot) == sign, else hi+1.

        Valid because the sign sequence of a pair is monotone in the slot.
        """
        if lo > hi or self.cmp(i, k, hi) != sign:
            return hi + 1
        if self.cmp(i, k, lo) == sign:
            return lo
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if self.cmp(i, k, mid) == sign:
                hi = mid
            else:
                lo = mid
        return hi

    def above_curve(self, piece: int, j: int, yq: Sequence[int]) -> bool:
        """Is the query point at slot j strictly above piece's curve?"""
        d = self.xq[j] - self.A[piece]
        return self.RD * d * (yq[j] - self.Y0[piece]) > self.RN


def _runs_rays_right_inc(env: _SlotEnv, pieces: list[int], lefts: list[int], hi: int):
    """Envelope of rays [left_i, hi], lefts weakly increasing in slope order.

    Each new ray has the largest pseudo-slope so far, so it is below any
    older piece exactly on a prefix of slots; it claims [l, flip) and the
    rest of the old envelope survives.
    """
    out: list[tuple[int, int, int]] = []
    active: deque[list[int]] = deque()
    for p, l in zip(pieces, lefts):
        if l > hi:
            continue
        while active and active[0][1] < l:
            e = active.popleft()
            out.append((e[0], e[1], e[2]))
        if active and active[0][0] < l:
            f = active[0]
            out.append((f[0], l - 1, f[2]))
            f[0] = l
        if not active:
            active.append([l, hi, p])
            continue
        if env.cmp(p, active[0][2], l) > 0:
            continue
        while active:
            f = active[0]
            if env.cmp(p, f[2], f[1]) < 0:
                active.popleft()
                continue
            x = env.first_where(p, f[2], f[0], f[1], 1)
            f[0] = x
            active.appendleft([l, x - 1, p])
            break
        else:
            active.append([l, hi, p])
    out.extend((e[0], e[1], e[2]) for e in active)
    return out


def _runs_rays_right_dec(env: _SlotEnv, pieces: list[int], lefts: list[int], hi: int):
    """Envelope of rays [left_i, hi], lefts weakly decreasing in slope order.

    Processed in reverse (increasing left): each new ray has the smallest
    slope so far and claims a suffix of the slots from its first win."""
    active: deque[list[int]] = deque()
    for idx in range(len(pieces) - 1, -1, -1):
        p, l = pieces[idx], lefts[idx]
        if l > hi:
            continue
        if not active:
            active.append([l, hi, p])
            continue
        if env.cmp(p, active[-1][2], hi) > 0:
            continue
        while active:
            g = active[-1]
            lo_eff = g[0] if g[0] >= l else l
            if env.cmp(p, g[2], lo_eff) < 0:
                if g[0] >= l:
                    active.pop()
                    if not active:
                        active.append([l, hi, p])
                        break
                    continue
                g[1] = l - 1
                active.append([l, hi, p])
                break
            x = env.first_where(p, g[2], lo_eff, g[1], -1)
            g[1] = x - 1
            active.append([x, hi, p])
            break
    return [(e[0], e[1], e[2]) for e in active]


def _runs_rays_left_inc(env: _SlotEnv, pieces: list[int], rights: list[int], lo: int):
    """Envelope of rays [lo, right_i], rights weakly increasing in slope order.

    Processed in reverse (decreasing right and slope): arcs right of the
    new clip are final, and within its span the new ray claims a suffix."""
    done_rev: list[tuple[int, int, int]] = []
    active: deque[list[int]] = deque()
    for idx in range(len(pieces) - 1, -1, -1):
        p, r = pieces[idx], rights[idx]
        if r < lo:
            continue
        while active and active[-1][0] > r:
            e = active.pop()
            done_rev.append((e[0], e[1], e[2]))
        if active and active[-1][1] > r:
            g = active[-1]
            done_rev.append((r + 1, g[1], g[2]))
            g[1] = r
        if not active:
            active.append([lo, r, p])
            continue
        if env.cmp(p, active[-1][2], r) > 0:
            continue
        while active:
            g = active[-1]
            if env.cmp(p, g[2], g[0]) < 0:
                active.pop()
                if not active:
                    active.append([lo, r, p])
                    break
                continue
            x = env.first_where(p, g[2], g[0], g[1], -1)
            g[1] = x - 1
            active.append([x, r, p])
            break
    out = [(e[0], e[1], e[2]) for e in active]
    out.extend(reversed(done_rev))
    return out


def _coalesce(runs):
    """Merge adjacent runs of the same piece; drop empty ones."""
    out: list[tuple[int, int, int]] = []
    for lo, hi, p in runs:
        if lo > hi:
            continue
        if out and out[-1][2] == p and out[-1][1] + 1 == lo:
            out[-1] = (out[-1][0], hi, p)
        else:
            out.append((lo, hi, p))
    return out


def _merge_runs(env: _SlotEnv, ra, rb):
    """Slotwise argmin of two run lists (each sorted and disjoint).

    Overlapping stretches belong to a single pair of pieces, whose sign
    sequence flips at most once; one binary search locates the flip.
    """
    out: list[tuple[int, int, int]] = []
    ia = ib = 0
    a = list(ra[0]) if ra else None
    b = list(rb[0]) if rb else None
    while a is not None and b is not None:
        if a[1] < b[0]:
            out.append((a[0], a[1], a[2]))
            ia += 1
            a = list(ra[ia]) if ia < len(ra) else None
            continue
        if b[1] < a[0]:
            out.append((b[0], b[1], b[2]))
            ib += 1
            b = list(rb[ib]) if ib < len(rb) else None
            continue
        if a[0] < b[0]:
            out.append((a[0], b[0] - 1, a[2]))
            a[0] = b[0]
        elif b[0] < a[0]:
            out.append((b[0], a[0] - 1, b[2]))
            b[0] = a[0]
        o2 = a[1] if a[1] < b[1] else b[1]
        s1 = env.cmp(a[2], b[2], a[0])
        s2 = env.cmp(a[2], b[2], o2)
        if s1 == s2:
            out.append((a[0], o2, a[2] if s1 < 0 else b[2]))
        else:
            x = env.first_where(a[2], b[2], a[0], o2, s2)
            out.append((a[0], x - 1, a[2] if s1 < 0 else b[2]))
            out.append((x, o2, a[2] if s2 < 0 else b[2]))
        if a[1] == o2:
            ia += 1
            a = list(ra[ia]) if ia < len(ra) else None
        else:
            a[0] = o2 + 1
        if b[1] == o2:
            ib += 1
            b = list(rb[ib]) if ib < len(rb) else None
        else:
            b[0] = o2 + 1
    while a is not None:
        out.append((a[0], a[1], a[2]))
        ia += 1
        a = list(ra[ia]) if ia < len(ra) else None
    while b is not None:
        out.append((b[0], b[1], b[2]))
        ib += 1
        b = list(rb[ib]) if ib < len(rb) else None
    return _coalesce(out)


def _runs_mixed_growing(env, pieces, lefts, rights, lo, hi):
    """Envelope of pieces with lefts weakly decreasing and rights weakly
    increasing in slope order (nested, growing spans).

    Left of the innermost span every right clip is irrelevant and the
    pieces behave as rightward rays; from there on every left clip is
    already open and they behave as leftward rays.
    """
    split = lefts[0]
    runs: list[tuple[int, int, int]] = []
    if split > lo:
        runs.extend(_runs_rays_right_dec(env, pieces, lefts, min(split - 1, hi)))
    if split <= hi:
        runs.extend(_runs_rays_left_inc(env, pieces, rights, max(split, lo)))
    return _coalesce(runs)


def _runs_same_inc(env, pieces, lefts, rights, lo, hi):
    """Envelope of pieces with lefts and rights both weakly increasing in
    slope order, via stabbing decomposition.

    Repeatedly stab at the leftmost right end among the remaining pieces;
    a stabbed group is a prefix and lives in at most two slabs, so each
    slab's envelope merges one leftward-ray and one rightward-ray family.
    """
    k = len(pieces)
    groups: list[tuple[int, int, int]] = []  # (start, end) piece index range + stab
    idx = 0
    while idx < k:
        stab = rights[idx]
        j = idx
        while j < k and lefts[j] <= stab:
            j += 1
        groups.append((idx, j, stab))
        idx = j
    out: list[tuple[int, int, int]] = []
    prev = None
    slab_lo = lo
    for gi, (g0, g1, stab) in enumerate(groups):
        slab_hi = min(stab, hi)
        if slab_lo <= slab_hi:
            right_runs = _runs_rays_right_inc(
                env, pieces[g0:g1], [max(l, slab_lo) for l in lefts[g0:g1]], slab_hi
            )
            if prev is not None:
                p0, p1 = prev
                left_runs = _runs_rays_left_inc(
                    env, pieces[p0:p1], [min(r, slab_hi) for r in rights[p0:p1]], slab_lo
                )
                out.extend(_merge_runs(env, left_runs, right_runs))
            else:
                out.extend(right_runs)
        prev = (g0, g1)
        slab_lo = slab_hi + 1
    if prev is not None and slab_lo <= hi:
        p0, p1 = prev
        out.extend(_runs_rays_left_inc(env, pieces[p0:p1], rights[p0:p1], slab_lo))
    return _coalesce(out)


# ---------------------------------------------------------------------------
# the fixed-line decision kernel

def _fixed_line_kernel(si, ti, sd, td, poses, RN, RD, stats):
    """Decide the good-pair question for nested families on a common line.

    si and ti hold indices in containment order (innermost first).  For
    each s the eligible t's form an index interval [max(a,b), c] computed
    by three monotone pointer scans; the curve pieces split into one
    growing-span family and one same-direction family, each enveloped on
    the slot domain of T's right endpoints, and every slot is tested once
    against the piece that attains the minimum there.  Returns local
    index pairs into si/ti, or None.
    """
    sxm, _sxp, sy, _ = sd
    _txm, txp, ty, _ = td
    slpos, srpos, tlpos, trpos = poses
    nt = len(ti)
    qx = [txp[t] for t in ti]
    qy = [ty[t] for t in ti]
    tl = [tlpos[t] for t in ti]
    tr = [trpos[t] for t in ti]
    A = [sxm[s] for s in si]
    Y0 = [sy[s] for s in si]
    env = _SlotEnv(qx, A, Y0, RN, RD)

    a = 0
    b = nt
    c = -1
    fams = ([], [], []), ([], [], [])  # growing, same-direction
    for ii, s in enumerate(si):
        sl, sr = slpos[s], srpos[s]
        while a < nt and tl[a] >= sl:
            a += 1
        while b > 0 and tr[b - 1] > sl:
            b -= 1
        while c + 1 < nt and tr[c + 1] < sr:
            c += 1
        m = a if a > b else b
        if m > c:
            continue
        fam = fams[1] if a >= b else fams[0]
        fam[0].append(ii)
        fam[1].append(m)
        fam[2].append(c)

    for fam, builder in zip(fams, (_runs_mixed_growing, _runs_same_inc)):
        pieces, lefts, rights = fam
        if not pieces:
            continue
        runs = builder(env, pieces, lefts, rights, 0, nt - 1)
        stats.inc("envelopes_built")
        stats.inc("envelope_pieces", len(pieces))
        stats.inc("envelope_runs", len(runs))
        assert len(runs) <= 2 * len(pieces), "envelope run bound violated"
        for lo, hi, pc in runs:
            for jj in range(lo, hi + 1):
                if env.above_curve(pc, jj, qy):
                    return (si[pc], ti[jj])
    return None


def _brute_scaled(sxm, sxp, sy, txm, txp, ty, RN, RD):
    """Base case: scan pairs on the rescaled integers, pre-filtered by a
    sorted-poles window so only x-ordered pairs are touched."""
    order = sorted(range(len(sxm)), key=lambda i: sxm[i])
    keys = [sxm[i] for i in order]
    for j in range(len(txm)):
        xl, xr, yt = txm[j], txp[j], ty[j]
        lo = bisect.bisect_right(keys, xl)
        hi = bisect.bisect_left(keys, xr)
        for ii in range(lo, hi):
            i = order[ii]
            if xr < sxp[i] and RD * (xr - sxm[i]) * (yt - sy[i]) > RN:
                return (i, j)
    return None


# ---------------------------------------------------------------------------
# the interval-tree decision

def _tree_cases(sd, td, poses, RN, RD, b, cfg, stats, depth, cap, run_case1):
    """One directed pass of the interval-tree algorithm.

    Case 1 handles pairs stored at the same node via the fixed-line
    kernel.  Case 2 handles pairs whose t sits at a proper ancestor of
    s's node: per node, the envelope of S_v's pieces over the t-right
    slots of its slab routes each s to the slabs sigma where it appears,
    and (T_sigma, block of S_sigma) subproblems recurse.  The mirrored
    pass run by the caller covers the remaining case.
    """
    sxm, sxp, sy, sids = sd
    txm, txp, ty, tids = td
    slpos, srpos, tlpos, trpos = poses
    ns, nt = len(sxm), len(txm)
    n = ns + nt
    m = 2 * n
    h = 1 << (m - 1).bit_length()
    hbits = h.bit_length() - 1

    s_by_node: dict[int, list[int]] = {}
    for i in range(ns):
        v = (h + slpos[i]) >> ((slpos[i] ^ srpos[i]).bit_length())
        s_by_node.setdefault(v, []).append(i)
    for lst in s_by_node.values():
        lst.sort(key=lambda i: -slpos[i])

    if run_case1:
        t_by_node: dict[int, list[int]] = {}
        for j in range(nt):
            v = (h + tlpos[j]) >> ((tlpos[j] ^ trpos[j]).bit_length())
            t_by_node.setdefault(v, []).append(j)
        for v, si in s_by_node.items():
            tv = t_by_node.get(v)
            if not tv:
                continue
            tv.sort(key=lambda j: -tlpos[j])
            w = _fixed_line_kernel(si, tv, sd, td, poses, RN, RD, stats)
            if w is not None:
                return (sids[w[0]], tids[w[1]])

    torder = sorted(range(nt), key=lambda j: trpos[j])
    trs = [trpos[j] for j in torder]
    xq = [txp[j] for j in torder]
    nsig = (nt + b - 1) // b
    s_sigma: list[list[int]] = [[] for _ in range(nsig)]
    for v, si in s_by_node.items():
        lev = v.bit_length() - 1
        kdown = hbits - lev
        plo = (v << kdown) - h
        phi = ((v + 1) << kdown) - 1 - h
        tlo = bisect.bisect_left(trs, plo)
        thi = bisect.bisect_right(trs, phi) - 1
        if tlo > thi:
            continue
        owner, lefts, rights, A, Y0 = [], [], [], [], []
        for i in si:
            li = bisect.bisect_right(trs, slpos[i])
            ri = bisect.bisect_left(trs, srpos[i]) - 1
            lo = li if li > tlo else tlo
            hi2 = ri if ri < thi else thi
            if lo > hi2:
                continue
            owner.append(i)
            lefts.append(lo)
            rights.append(hi2)
            A.append(sxm[i])
            Y0.append(sy[i])
        if not owner:
            continue
        env = _SlotEnv(xq, A, Y0, RN, RD)
        runs = _runs_mixed_growing(env, list(range(len(owner))), lefts, rights, tlo, thi)
        stats.inc("envelopes_built")
        stats.inc("envelope_pieces", len(owner))
        stats.inc("envelope_runs", len(runs))
        assert len(runs) <= 2 * len(owner), "envelope run bound violated"
        for lo, hi, pc in runs:
            for sig in range(lo // b, hi // b + 1):
                s_sigma[sig].append(owner[pc])

    sig_total = sum(len(x) for x in s_sigma)
    stats.inc("sigma_total", sig_total)
    assert sig_total <= 2 * n + _SIGMA_C * nsig * max(1, _ceil_log2(n)), (
        "slab coverage bound violated"
    )

    for sig in range(nsig):
        ss = s_sigma[sig]
        if not ss:
            continue
        t0 = sig * b
        tj = torder[t0 : t0 + b]
        sub_td = (
            [txm[j] for j in tj],
            [txp[j] for j in tj],
            [ty[j] for j in tj],
            [tids[j] for j in tj],
        )
        for blk in range(0, len(ss), b):
            ids = ss[blk : blk + b]
            sub_sd = (
                [sxm[i] for i in ids],
                [sxp[i] for i in ids],
                [sy[i] for i in ids],
                [sids[i] for i in ids],
            )
            w = _decide_scaled(sub_sd, sub_td, RN, RD, cfg, stats, depth + 1, cap)
            if w is not None:
                return w
    return None


def _decide_scaled(sd, td, RN, RD, cfg, stats, depth, cap):
    """The decision recursion on rescaled integer data.

    Returns a pair of caller-level ids (as carried in sd[3] / td[3]) of a
    good pair, or None.  The mirrored pass negates both axes and swaps
    the roles, reflecting positions across the padded power-of-two axis
    so that ancestor relations in the interval tree are preserved.
    """
    ns, nt = len(sd[0]), len(td[0])
    if ns == 0 or nt == 0:
        return None
    stats.inc("decide_calls")
    stats.peak("decision_depth", depth)
    assert depth <= cap, "decision recursion exceeded the log* depth bound"
    if ns + nt <= cfg.base_case_size or ns + nt <= 16:
        stats.inc("decide_base_cases")
        w = _brute_scaled(sd[0], sd[1], sd[2], td[0], td[1], td[2], RN, RD)
        if w is None:
            return None
        return (sd[3][w[0]], td[3][w[1]])
    # the top level uses the configured block size; deeper levels re-derive
    # it from the subproblem size, which is what makes the depth log-star
    b = cfg.b if depth == 1 else max(_ceil_log2(ns + nt), 8)
    poses = _shift_positions(sd[0], sd[1], td[0], td[1])
    w = _tree_cases(sd, td, poses, RN, RD, b, cfg, stats, depth, cap, True)
    if w is not None:
        return w
    m = 2 * (ns + nt)
    md = (1 << (m - 1).bit_length()) - 1
    msd = ([-v for v in td[1]], [-v for v in td[0]], [-v for v in td[2]], td[3])
    mtd = ([-v for v in sd[1]], [-v for v in sd[0]], [-v for v in sd[2]], sd[3])
    slpos, srpos, tlpos, trpos = poses
    mposes = (
        [md - p for p in trpos],
        [md - p for p in tlpos],
        [md - p for p in srpos],
        [md - p for p in slpos],
    )
    w = _tree_cases(msd, mtd, mposes, RN, RD, b, cfg, stats, depth, cap, False)
    if w is not None:
        return (w[1], w[0])
    return None


def _scale_pair(S_l, T_l, r):
    """Rescale two segment families and a threshold to shared integers."""
    ns, nt = len(S_l), len(T_l)
    xs = (
        [s.x_minus for s in S_l]
        + [s.x_plus for s in S_l]
        + [t.x_minus for t in T_l]
        + [t.x_plus for t in T_l]
    )
    ys = [s.y for s in S_l] + [t.y for t in T_l]
    xi, dx = _scaled(xs)
    yi, dy = _scaled(ys)
    rr = r * dx * dy
    sd = (xi[:ns], xi[ns : 2 * ns], yi[:ns], list(range(ns)))
    td = (xi[2 * ns : 2 * ns + nt], xi[2 * ns + nt :], yi[ns:], list(range(nt)))
    return sd, td, rr.numerator, rr.denominator


def decide_fixed_line(S_v, T_v, q: DecisionQuery, *, stats: Stats | None = None):
    """Find a good pair among nested families crossing a common vertical
    line, or None.

    A pair (s, t) is good when x_t^- < x_s^- < x_t^+ < x_s^+ (all strict)
    and (x_t^+ - x_s^-)(y_t - y_s) > q.r.  Raises ValueError when the
    spans do not all share a vertical line (with ties resolved the same
    way the strict predicate resolves them).
    """
    S_l, T_l = _segs(S_v), _segs(T_v)
    if not S_l or not T_l:
        return None
    check_laminar(S_l)
    check_laminar(T_l)
    if stats is None:
        stats = Stats()
    sd, td, RN, RD = _scale_pair(S_l, T_l, q.r)
    slpos, srpos, tlpos, trpos = _shift_positions(sd[0], sd[1], td[0], td[1])
    if max(max(slpos), max(tlpos)) > min(min(srpos), min(trpos)):
        raise ValueError("segments do not all cross one common vertical line")
    si = sorted(range(len(S_l)), key=lambda i: -slpos[i])
    ti = sorted(range(len(T_l)), key=lambda j: -tlpos[j])
    w = _fixed_line_kernel(si, ti, sd, td, (slpos, srpos, tlpos, trpos), RN, RD, stats)
    if w is None:
        return None
    s, t = S_l[w[0]], T_l[w[1]]
    assert t.x_minus < s.x_minus < t.x_plus < s.x_plus
    assert (t.x_plus - s.x_minus) * (t.y - s.y) > q.r
    return (s, t)


def decide_good_pair(
    S,
    T,
    q: DecisionQuery,
    cfg: Rect2DConfig | None = None,
    *,
    stats: Stats | None = None,
):
    """Find a good pair for threshold q.r among laminar families, or None.

    Runs the interval-tree decision: same-node pairs through the
    fixed-line kernel, cross-level pairs through per-node slot envelopes
    and slab recursion, the remaining direction through the reflected
    instance.  Every answer is exact; a returned witness always satisfies
    the four ordering inequalities and the strict product inequality.
    """
    S_l, T_l = _segs(S), _segs(T)
    if not S_l or not T_l:
        return None
    n = len(S_l) + len(T_l)
    if cfg is None:
        cfg = Rect2DConfig.for_size(n)
    if cfg.b < _ceil_log2(n):
        raise ValueError("cfg.b must be at least ceil(log2 n)")
    if stats is None:
        stats = Stats()
    sd, td, RN, RD = _scale_pair(S_l, T_l, q.r)
    cap = _log_star(n) + 5
    w = _decide_scaled(sd, td, RN, RD, cfg, stats, 1, cap)
    if w is None:
        return None
    s, t = S_l[w[0]], T_l[w[1]]
    assert t.x_minus < s.x_minus < t.x_plus < s.x_plus
    assert (t.x_plus - s.x_minus) * (t.y - s.y) > q.r
    return (s, t)


# ---------------------------------------------------------------------------
# optimization

@dataclass
class PairResult(SolveResult):
    """A solve result that also carries the optimal pair itself."""

    s: HSeg | None = None
    t: HSeg | None = None


def _pair_value(s: HSeg, t: HSeg) -> Rat | None:
    if t.x_minus < s.x_minus < t.x_plus < s.x_plus:
        return (t.x_plus - s.x_minus) * (t.y - s.y)
    return None


def maximize_good_pair(
    S,
    T,
    rng: random.Random | None = None,
    *,
    r0: Rat = ZERO,
    cfg: Rect2DConfig | None = None,
    stats: Stats | None = None,
) -> PairResult:
    """Maximize (x_t^+ - x_s^-)(y_t - y_s) over x-ordered pairs.

    Random grouping turns the decision procedure into an exact optimizer;
    the rng affects running time only, never the value.  When ``r0 > 0``
    only pairs of value > r0 count, and InfeasibleError means none beats
    the threshold.  With the default r0, pairs of nonpositive value are
    still admissible (the witness box is then degenerate or absent) and
    InfeasibleError means no x-ordered pair exists at all.
    """
    S_l, T_l = _segs(S), _segs(T)
    if rng is None:
        rng = random.Random(91)
    if stats is None:
        stats = Stats()

    def dec(Sa, Tb, best):
        if best <= 0:
            return True
        return decide_good_pair(Sa, Tb, DecisionQuery(best), cfg, stats=stats) is not None

    try:
        bp = chan_optimize(PairSearch(tuple(S_l), tuple(T_l), _pair_value), dec, rng, r0=r0, stats=stats)
    except InfeasibleError:
        if r0 > 0:
            raise
        fallback = None
        for s in S_l:
            for t in T_l:
                v = _pair_value(s, t)
                if v is not None and (fallback is None or v > fallback[0]):
                    fallback = (v, s, t)
        if fallback is None:
            raise InfeasibleError("no x-ordered pair exists") from None
        v, s, t = fallback
        box = AABox((s.x_minus, s.y), (t.x_plus, t.y)) if t.y >= s.y else None
        return PairResult(v, box, stats, s, t)
    s, t = bp.s, bp.t
    return PairResult(bp.value, AABox((s.x_minus, s.y), (t.x_plus, t.y)), stats, s, t)


# ---------------------------------------------------------------------------
# the line-restricted solver

def _flip_y(seg: HSeg) -> HSeg:
    src = seg.source
    return HSeg(seg.x_minus, seg.x_plus, -seg.y, None if src is None else (src[0], -src[1]))


def _flip_x(seg: HSeg) -> HSeg:
    src = seg.source
    return HSeg(-seg.x_plus, -seg.x_minus, seg.y, None if src is None else (-src[0], src[1]))


def solve_line_restricted(
    P,
    Q,
    l0: Rat,
    b0: AABox,
    rng: random.Random | None = None,
    *,
    stats: Stats | None = None,
) -> SolveResult:
    """Largest empty rectangle in b0 whose closure meets the horizontal
    line y = l0, with P strictly below the line and Q strictly above.

    Candidates fall into: full-height gaps between consecutive distinct
    x-coordinates (including against the walls of b0); rectangles pinned
    to the bottom or top edge of b0; rectangles whose top span nests
    inside the bottom span or vice versa (the nested case, once per
    direction, with the matching edge of b0 as a sentinel segment); and
    rectangles whose defining spans strictly cross, found by the pair
    optimizer under all four axis reflections.
    """
    if rng is None:
        rng = random.Random(17)
    if stats is None:
        stats = Stats()
    (lox, loy), (hix, hiy) = b0.lo, b0.hi
    if not (loy < l0 < hiy):
        raise ValueError("the reference line must cut the interior of b0")
    P = [(p[0], p[1]) for p in P]
    Q = [(p[0], p[1]) for p in Q]
    for x, y in P:
        if y >= l0:
            raise ValueError("P must lie strictly below the reference line")
    for x, y in Q:
        if y <= l0:
            raise ValueError("Q must lie strictly above the reference line")

    best_v: Rat | None = None
    best_box: AABox | None = None

    def consider(v: Rat, box: AABox) -> None:
        nonlocal best_v, best_box
        if best_v is None or v > best_v:
            best_v, best_box = v, box

    allpts = P + Q
    xs = sorted({x for x, _ in allpts})
    prev = lox
    for x in xs + [hix]:
        if x > prev:
            consider((x - prev) * (hiy - loy), AABox((prev, loy), (x, hiy)))
            prev = x
    for seg in cartesian_segments(allpts, b0, "above"):
        if seg.y > l0:
            consider(seg.width * (seg.y - loy), AABox((seg.x_minus, loy), (seg.x_plus, seg.y)))
    for seg in cartesian_segments(allpts, b0, "below"):
        if seg.y < l0:
            consider(seg.width * (hiy - seg.y), AABox((seg.x_minus, seg.y), (seg.x_plus, hiy)))

    S = _segs(cartesian_segments(P, b0, "below"))
    T = _segs(cartesian_segments(Q, b0, "above"))
    nested = solve_nested_case(S, T + [HSeg(lox, hix, hiy, None)])
    if nested is not None:
        v, s, t = nested
        consider(v, AABox((s.x_minus, s.y), (s.x_plus, t.y)))
    nested2 = solve_nested_case(
        [_flip_y(t) for t in T],
        [_flip_y(s) for s in S] + [HSeg(lox, hix, -loy, None)],
    )
    if nested2 is not None:
        v, s2, t2 = nested2
        consider(v, AABox((s2.x_minus, -t2.y), (s2.x_plus, -s2.y)))

    reflections = (
        (S, T, lambda s, t: AABox((s.x_minus, s.y), (t.x_plus, t.y))),
        (
            [_flip_x(s) for s in S],
            [_flip_x(t) for t in T],
            lambda s, t: AABox((-t.x_plus, s.y), (-s.x_minus, t.y)),
        ),
        (
            [_flip_y(t) for t in T],
            [_flip_y(s) for s in S],
            lambda s, t: AABox((s.x_minus, -t.y), (t.x_plus, -s.y)),
        ),
        (
            [_flip_x(_flip_y(t)) for t in T],
            [_flip_x(_flip_y(s)) for s in S],
            lambda s, t: AABox((-t.x_plus, -t.y), (-s.x_minus, -s.y)),
        ),
    )
    for Sr, Tr, unmap in reflections:
        hint = best_v if best_v is not None and best_v > 0 else ZERO
        try:
            pr = maximize_good_pair(Sr, Tr, rng, r0=hint, stats=stats)
        except InfeasibleError:
            continue
        if pr.value > 0:
            consider(pr.value, unmap(pr.s, pr.t))

    assert best_v is not None and best_box is not None
    return SolveResult(best_v, best_box, stats)


# ---------------------------------------------------------------------------
# the full 2D solver

def _split_value(vals: Sequence[Rat]):
    """Most balanced strict split of a sorted list: returns (balance,
    midpoint) where balance is the smaller side size, or (-1, None) when
    all values are equal."""
    best_bal, best_mid = -1, None
    n = len(vals)
    for i in range(n - 1):
        if vals[i] < vals[i + 1]:
            bal = min(i + 1, n - i - 1)
            if bal > best_bal:
                best_bal, best_mid = bal, (vals[i] + vals[i + 1]) / 2
    return best_bal, best_mid


def _rect2d_rec(pts, b0: AABox, rng, stats: Stats):
    """Recursive core: pts are distinct, x-sorted, strictly inside b0."""
    (lox, loy), (hix, hiy) = b0.lo, b0.hi
    n = len(pts)
    if n == 0:
        return b0.volume(), b0
    if n == 1:
        px, py = pts[0]
        return max(
            ((px - lox) * (hiy - loy), AABox((lox, loy), (px, hiy))),
            ((hix - px) * (hiy - loy), AABox((px, loy), (hix, hiy))),
            ((hix - lox) * (py - loy), AABox((lox, loy), (hix, py))),
            ((hix - lox) * (hiy - py), AABox((lox, py), (hix, hiy))),
            key=lambda c: c[0],
        )
    stats.inc("rect2d_nodes")
    bal_y, mid_y = _split_value(sorted(p[1] for p in pts))
    if bal_y >= 1:
        below = [p for p in pts if p[1] < mid_y]
        above = [p for p in pts if p[1] > mid_y]
        cross = solve_line_restricted(below, above, mid_y, b0, rng, stats=stats)
        best_v, best_box = cross.value, cross.witness
        for half, box in (
            (below, AABox((lox, loy), (hix, mid_y))),
            (above, AABox((lox, mid_y), (hix, hiy))),
        ):
            v, w = _rect2d_rec(half, box, rng, stats)
            if v > best_v:
                best_v, best_box = v, w
        return best_v, best_box
    # all y equal: split on x instead, solving the crossing subproblem in
    # transposed coordinates
    bal_x, mid_x = _split_value([p[0] for p in pts])
    assert bal_x >= 1, "distinct points must separate on some axis"
    left = [p for p in pts if p[0] < mid_x]
    right = [p for p in pts if p[0] > mid_x]
    cross = solve_line_restricted(
        sorted((y, x) for x, y in left),
        sorted((y, x) for x, y in right),
        mid_x,
        AABox((loy, lox), (hiy, hix)),
        rng,
        stats=stats,
    )
    cb = cross.witness
    best_v = cross.value
    best_box = AABox((cb.lo[1], cb.lo[0]), (cb.hi[1], cb.hi[0]))
    for half, box in (
        (left, AABox((lox, loy), (mid_x, hiy))),
        (right, AABox((mid_x, loy), (hix, hiy))),
    ):
        v, w = _rect2d_rec(half, box, rng, stats)
        if v > best_v:
            best_v, best_box = v, w
    return best_v, best_box


def solve_rect2d(inst: Instance, rng: random.Random | None = None) -> SolveResult:
    """Largest open axis-aligned empty rectangle in a 2D instance.

    Only the unrestricted variant is handled here.  Points on the
    boundary of b0 never block an open rectangle and are dropped up
    front; duplicates likewise.
    """
    if inst.d != 2:
        raise ValueError("solve_rect2d handles d = 2 only")
    if inst.variant.kind != "unrestricted":
        raise ValueError("solve_rect2d handles the unrestricted variant only")
    if rng is None:
        rng = random.Random(23)
    stats = Stats()
    pts = sorted({p.coords for p in inst.points if inst.b0.interior_contains(p)})
    value, box = _rect2d_rec(pts, inst.b0, rng, stats)
    return SolveResult(value, box, stats)
