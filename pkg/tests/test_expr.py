"""Tests for the predicate rewrite and free-variable elimination engine.

Semantic checks are exhaustive: regions live on small integer rank
grids, so branch unions, disjointness, and objective maxima are all
compared point by point against the direct reading of the expression.
"""

import itertools
import math
import random

import pytest

from emptybox.core import BudgetExceededError
from emptybox.expr import (
    Branch,
    BranchSet,
    Edge,
    Expr,
    GFunc,
    Pred,
    SimpleFunc,
    eliminate_all,
    eliminate_free,
    rewrite_normalize,
)
from emptybox.oracle import brute_region_max
from emptybox.stepfn import StepFn, envelope_minmax

INF = math.inf


def gen_monotone(rng, direction=None, lo=-4, hi=4, vlo=-6, vhi=6, min_bps=0):
    """Random strictly monotone step function with integer rank values."""
    direction = direction or rng.choice(["increasing", "decreasing"])
    nb = rng.randrange(min_bps, 3)
    bps = sorted(rng.sample(range(lo, hi + 1), nb))
    vals = sorted(rng.sample(range(vlo, vhi + 1), nb + 1))
    if direction == "decreasing":
        vals.reverse()
    if nb and rng.random() < 0.2:
        vals[0] = -INF if direction == "increasing" else INF
    if nb and rng.random() < 0.2:
        vals[-1] = INF if direction == "increasing" else -INF
    return StepFn(direction, tuple(bps), tuple(vals))


def gen_sigma(rng, lo=-4, hi=4):
    """Random nondecreasing nonnegative factor, volume-like."""
    nb = rng.randrange(0, 3)
    bps = sorted(rng.sample(range(lo, hi + 1), nb))
    vals = sorted(rng.sample(range(0, 9), nb + 1))
    return StepFn("increasing", tuple(bps), tuple(vals))


def gen_expr(rng, d, npreds, width=4):
    dims = tuple(range(d))
    walls = []
    for _ in range(d):
        lo = rng.randrange(-3, 1)
        walls.append((lo, lo + rng.randrange(2, width + 1)))
    preds = []
    for _ in range(npreds):
        s = rng.randrange(d)
        others = [k for k in range(d) if k != s]
        op = rng.choice(["le", "ge"])
        if others and rng.random() < 0.85:
            preds.append(Pred(s, op, gen_monotone(rng), rng.choice(others)))
        else:
            preds.append(Pred(s, op, StepFn.constant(rng.randrange(-4, 5)), None))
    return Expr(dims, tuple(preds), tuple(walls))


def grid(e):
    ranges = [range(lo, hi + 1) for lo, hi in e.walls]
    for combo in itertools.product(*ranges):
        yield dict(zip(e.dims, combo))


def region(e):
    return frozenset(tuple(x[d] for d in e.dims) for x in grid(e) if e.holds(x))


def best_over(branches):
    best = None
    for br in branches:
        v, _witness = brute_region_max(br.expr, br.objective)
        if v is not None and (best is None or v > best):
            best = v
    return best


class TestPredExpr:
    def test_pred_validation(self):
        f = StepFn("increasing", (0,), (1, 3))
        with pytest.raises(ValueError):
            Pred(1, "lt", f, 2)
        with pytest.raises(ValueError):
            Pred(1, "le", f, 1)
        with pytest.raises(ValueError):
            Pred(1, "le", StepFn("unconstrained", (0,), (1, 0)), 2)
        with pytest.raises(ValueError):
            Pred(1, "le", f, None)
        # constants need no argument
        Pred(1, "le", StepFn.constant(7), None)

    def test_pred_holds(self):
        f = StepFn("increasing", (0,), (1, 3))
        p = Pred(1, "le", f, 2)
        assert p.holds({1: 1, 2: -1})
        assert not p.holds({1: 2, 2: -1})
        assert p.holds({1: 3, 2: 0})
        q = Pred(1, "ge", StepFn.constant(2), None)
        assert q.holds({1: 2}) and not q.holds({1: 1})

    def test_expr_validation(self):
        f = StepFn("increasing", (0,), (1, 3))
        with pytest.raises(ValueError):
            Expr((2, 1), (), ((0, 1), (0, 1)))
        with pytest.raises(ValueError):
            Expr((1, 2), (), ((0, 1),))
        with pytest.raises(ValueError):
            Expr((1, 2), (), ((0, 1), (3, 2)))
        with pytest.raises(ValueError):
            Expr((1, 2), (Pred(3, "le", f, 2),), ((0, 1), (0, 1)))
        with pytest.raises(ValueError):
            Expr((1, 2), (Pred(1, "le", f, 3),), ((0, 1), (0, 1)))

    def test_objective_validation(self):
        s = StepFn.constant(1)
        with pytest.raises(ValueError):
            SimpleFunc((1, 2), [(3, s)], frozenset())
        with pytest.raises(ValueError):
            SimpleFunc((1, 2), [], frozenset({3}))
        with pytest.raises(ValueError):
            GFunc((1, 2), [], (Edge(1, 3, s, s),), frozenset())

    def test_gfunc_value_and_degree(self):
        up = StepFn("increasing", (0,), (1, 2))
        g = GFunc((1, 2), [(1, StepFn.constant(3))], (Edge(1, 2, up, up),), frozenset())
        assert g.value({1: 0, 2: 0}) == 3 * (2 + 2)
        assert g.degree(1) == 1 and g.degree(2) == 1
        loop = GFunc((1,), [], (Edge(1, 1, up, up),), frozenset())
        assert loop.degree(1) == 2
        assert loop.value({1: -1}) == 1 + 1
        (verts, eidx), = loop.components()
        assert verts == {1} and len(eidx) == 1


class TestRewriteNormalize:
    def test_already_normal_is_untouched(self):
        f = StepFn("increasing", (0,), (1, 3))
        e = Expr((1, 2), (Pred(1, "le", f, 2),), ((0, 4), (0, 4)))
        bs = rewrite_normalize(e, 1)
        assert len(bs) == 1
        assert next(iter(bs)).expr == e

    def test_dead_dimension_rejected(self):
        e = Expr((1,), (), ((0, 1),))
        with pytest.raises(ValueError):
            rewrite_normalize(e, 2)

    def test_argument_flip_frozen(self):
        # x2 <= f(x1) with increasing f becomes x1 >= f_inv(x2)
        f = StepFn("increasing", (0,), (1, 3))
        e = Expr((1, 2), (Pred(2, "le", f, 1),), ((-5, 5), (-5, 5)))
        (br,) = rewrite_normalize(e, 1)
        (p,) = br.expr.preds
        assert p == Pred(1, "ge", StepFn("increasing", (2, 4), (-INF, 0, INF)), 2)

    @pytest.mark.parametrize("op", ["le", "ge"])
    @pytest.mark.parametrize("direction", ["increasing", "decreasing"])
    def test_argument_flip_preserves_region(self, op, direction):
        rng = random.Random(f"flip {op} {direction}")
        for _ in range(40):
            f = gen_monotone(rng, direction, min_bps=1)
            e = Expr((1, 2), (Pred(2, op, f, 1),), ((-7, 7), (-7, 7)))
            bs = rewrite_normalize(e, 1)
            assert len(bs) == 1
            flipped = next(iter(bs)).expr
            (p,) = flipped.preds
            assert p.subject == 1
            assert p.argument == 2 or p.rhs.complexity == 0
            assert region(flipped) == region(e)

    def test_same_direction_bounds_merge(self):
        f = StepFn("increasing", (0,), (1, 3))
        g = StepFn("increasing", (1,), (0, 4))
        e = Expr(
            (1, 2),
            (Pred(1, "le", f, 2), Pred(1, "le", g, 2)),
            ((-5, 5), (-5, 5)),
        )
        (br,) = rewrite_normalize(e, 1)
        (p,) = br.expr.preds
        assert p.rhs == envelope_minmax(f, g, "min")
        assert p.rhs == StepFn("increasing", (1,), (0, 3))
        assert region(br.expr) == region(e)

    def test_constant_bound_merges_with_anything(self):
        f = StepFn("decreasing", (0,), (3, 1))
        e = Expr(
            (1, 2),
            (Pred(1, "ge", f, 2), Pred(1, "ge", StepFn.constant(2), None)),
            ((-5, 5), (-5, 5)),
        )
        (br,) = rewrite_normalize(e, 1)
        (p,) = br.expr.preds
        assert p.op == "ge" and p.rhs == StepFn("decreasing", (0,), (3, 2))
        assert region(br.expr) == region(e)

    def test_incomparable_bounds_split_disjointly(self):
        f = StepFn("increasing", (0,), (0, 2))
        g = StepFn("increasing", (1,), (-1, 1))
        e = Expr(
            (1, 2, 3),
            (Pred(1, "le", f, 2), Pred(1, "le", g, 3)),
            ((-2, 3), (-2, 3), (-2, 3)),
        )
        bs = rewrite_normalize(e, 1)
        assert len(bs) == 2
        regs = [region(br.expr) for br in bs]
        assert regs[0] & regs[1] == frozenset()
        assert regs[0] | regs[1] == region(e)

    def test_same_argument_opposite_directions_split(self):
        f = StepFn("increasing", (0,), (0, 2))
        g = StepFn("decreasing", (1,), (3, -1))
        e = Expr(
            (1, 2),
            (Pred(1, "le", f, 2), Pred(1, "le", g, 2)),
            ((-3, 4), (-3, 4)),
        )
        bs = rewrite_normalize(e, 1)
        assert len(bs) == 2
        regs = [region(br.expr) for br in bs]
        assert regs[0] & regs[1] == frozenset()
        assert regs[0] | regs[1] == region(e)
        for br in bs:
            les = [p for p in br.expr.preds if p.subject == 1 and p.op == "le"]
            assert len(les) == 1

    def test_budget_exceeded(self):
        f = StepFn("increasing", (0,), (0, 2))
        g = StepFn("increasing", (1,), (-1, 1))
        e = Expr(
            (1, 2, 3),
            (Pred(1, "le", f, 2), Pred(1, "le", g, 3)),
            ((-2, 3), (-2, 3), (-2, 3)),
        )
        with pytest.raises(BudgetExceededError):
            rewrite_normalize(e, 1, budget=1)

    def test_deterministic(self):
        rng = random.Random("rewrite deterministic")
        for _ in range(20):
            e = gen_expr(rng, 3, 3)
            assert rewrite_normalize(e, 0) == rewrite_normalize(e, 0)

    def test_random_regions_preserved(self):
        rng = random.Random("rewrite region suite")
        for trial in range(120):
            d = rng.randrange(2, 5)
            e = gen_expr(rng, d, rng.randrange(1, 5))
            i = rng.randrange(d)
            bs = rewrite_normalize(e, i)
            covered = set()
            total = 0
            for br in bs:
                assert br.expr.dims == e.dims and br.expr.walls == e.walls
                les = [p for p in br.expr.preds if p.subject == i and p.op == "le"]
                ges = [p for p in br.expr.preds if p.subject == i and p.op == "ge"]
                assert len(les) <= 1 and len(ges) <= 1
                assert not any(
                    p.argument == i and p.rhs.complexity > 0 for p in br.expr.preds
                )
                reg = region(br.expr)
                total += len(reg)
                covered |= reg
            assert total == len(covered), f"overlapping branches in trial {trial}"
            assert covered == region(e), f"region changed in trial {trial}"


def sigma_chain():
    return StepFn("increasing", (1, 2, 3), (0, 1, 2, 3))


class TestEliminateAnchored:
    def build(self):
        f = StepFn("increasing", (0,), (1, 5))
        e = Expr((1, 2), (Pred(1, "le", f, 2),), ((0, 4), (0, 4)))
        H = SimpleFunc(
            (1, 2),
            [(1, StepFn("increasing", (2,), (1, 3))), (2, StepFn.constant(2))],
            frozenset({1, 2}),
        )
        return e, H

    def test_single_bound_frozen(self):
        e, H = self.build()
        (br,) = eliminate_free(e, H, 1, "anchored")
        assert br.expr.dims == (2,) and br.expr.preds == ()
        dim, bound, arg = br.eliminated[0]
        assert (dim, arg) == (1, 2)
        # the logged bound is f clipped to the wall, evaluable at x_2
        assert bound.at(4) == 4
        H2 = br.objective
        assert H2.dims == (2,) and H2.scale == 1 and H2.free == frozenset()
        # h2 = 2 * h1(min(f, wall)(x2)): rank 1 below 0, rank 4 from 0 on
        assert H2.h_of(2) == StepFn("unconstrained", (0,), (2, 6))
        v0, _ = brute_region_max(e, H)
        assert best_over([br]) == v0 == 6

    def test_missing_bounds_use_walls(self):
        e = Expr((1, 2), (), ((0, 4), (0, 4)))
        H = self.build()[1]
        (br,) = eliminate_free(e, H, 1, "anchored")
        assert br.expr.preds == ()
        # optimum sits at the top wall rank 4, where h1 = 3
        assert br.objective.scale == 3
        assert best_over([br]) == brute_region_max(e, H)[0] == 6

    def test_infeasible_bounds_yield_no_branch(self):
        e = Expr(
            (1, 2),
            (
                Pred(1, "le", StepFn.constant(0), None),
                Pred(1, "ge", StepFn.constant(3), None),
            ),
            ((0, 4), (0, 4)),
        )
        H = self.build()[1]
        out = eliminate_free(e, H, 1, "anchored")
        assert len(out) == 0
        assert brute_region_max(e, H) == (None, None)

    def test_validation(self):
        e, H = self.build()
        with pytest.raises(ValueError):
            eliminate_free(e, H, 1, "sideways")
        with pytest.raises(ValueError):
            eliminate_free(e, SimpleFunc((1, 2), H.h, frozenset({2})), 1, "anchored")
        with pytest.raises(ValueError):
            eliminate_free(e, H, 1, "box")
        bad = SimpleFunc(
            (1, 2), [(1, StepFn("decreasing", (0,), (3, 1)))], frozenset({1, 2})
        )
        with pytest.raises(ValueError):
            eliminate_free(e, bad, 1, "anchored")

    def test_random_value_preserved(self):
        rng = random.Random("anchored elimination suite")
        for trial in range(100):
            d = rng.randrange(2, 5)
            e = gen_expr(rng, d, rng.randrange(0, 4))
            H = SimpleFunc(
                e.dims,
                [(k, gen_sigma(rng)) for k in e.dims],
                frozenset(e.dims),
            )
            i = rng.randrange(d)
            out = eliminate_free(e, H, i, "anchored")
            v0, _ = brute_region_max(e, H)
            assert best_over(out) == v0, f"value drifted in trial {trial}"

    def test_eliminate_all_terminal_shape_and_value(self):
        rng = random.Random("anchored full elimination")
        for d in range(2, 7):
            for trial in range(12):
                e = gen_expr(rng, d, rng.randrange(0, d + 1), width=3)
                H = SimpleFunc(
                    e.dims,
                    [(k, gen_sigma(rng)) for k in e.dims],
                    frozenset(e.dims),
                )
                out = eliminate_all(e, H, "anchored")
                for br in out:
                    assert len(br.expr.dims) <= d // 2
                    assert br.objective.free == frozenset()
                    assert len(br.eliminated) + len(br.expr.dims) == d
                v0, _ = brute_region_max(e, H)
                assert best_over(out) == v0, f"d={d} trial {trial}"


class TestEliminateBox:
    def matching(self, d, walls=(0, 3)):
        s = sigma_chain()
        dims = tuple(range(d))
        edges = tuple(Edge(2 * t, 2 * t + 1, s, s) for t in range(d // 2))
        H = GFunc(dims, [], edges, frozenset(dims))
        e = Expr(dims, (), tuple(walls for _ in dims))
        return e, H

    def test_splice_reroutes_edge(self):
        e, H = self.matching(4)
        f = StepFn("increasing", (2,), (1, 3))
        e = Expr(e.dims, (Pred(0, "le", f, 2),), e.walls)
        (br,) = eliminate_free(e, H, 0, "box")
        H2 = br.objective
        assert H2.dims == (1, 2, 3)
        assert sorted(tuple(sorted(ed.ends())) for ed in H2.edges) == [(1, 2), (2, 3)]
        assert H2.free == frozenset({1, 3})
        spliced = next(ed for ed in H2.edges if set(ed.ends()) == {1, 2})
        side = spliced.fu if spliced.u == 2 else spliced.fv
        assert side == StepFn("increasing", (2,), (1, 3))
        assert best_over([br]) == brute_region_max(e, H)[0]

    def test_partner_bound_folds_to_self_loop(self):
        e, H = self.matching(4)
        f = StepFn("increasing", (2,), (1, 3))
        e = Expr(e.dims, (Pred(0, "le", f, 1),), e.walls)
        (br,) = eliminate_free(e, H, 0, "box")
        H2 = br.objective
        loop = next(ed for ed in H2.edges if ed.u == ed.v)
        assert loop.u == 1 and H2.degree(1) == 2
        comps = {frozenset(v): len(ei) for v, ei in H2.components()}
        assert comps == {frozenset({1}): 1, frozenset({2, 3}): 1}
        assert H2.free == frozenset({2, 3})
        assert best_over([br]) == brute_region_max(e, H)[0]

    def test_constant_bound_folds_to_self_loop(self):
        e, H = self.matching(2)
        (br,) = eliminate_free(e, H, 0, "box")
        H2 = br.objective
        assert [ed.ends() for ed in H2.edges] == [(1, 1)]
        # x0 sits at its top wall rank 3, contributing sigma(3) = 3
        assert H2.value({1: 0}) == 3 + 0
        assert best_over([br]) == brute_region_max(e, H)[0] == 6

    def test_structural_preconditions(self):
        s = sigma_chain()
        e = Expr((0, 1, 2), (), ((0, 3),) * 3)
        windmill = GFunc((0, 1, 2), [], (Edge(0, 1, s, s), Edge(0, 2, s, s)), frozenset({0, 1, 2}))
        with pytest.raises(ValueError):
            eliminate_free(e, windmill, 0, "box")
        cyclic = GFunc((0, 1, 2), [], (Edge(0, 1, s, s), Edge(1, 0, s, s)), frozenset({0, 1, 2}))
        with pytest.raises(ValueError):
            eliminate_free(e, cyclic, 0, "box")
        carrying = GFunc((0, 1, 2), [(0, s)], (Edge(0, 1, s, s),), frozenset({0, 1, 2}))
        with pytest.raises(ValueError):
            eliminate_free(e, carrying, 0, "box")

    def test_tree_leaf_invariant_trap(self):
        s = sigma_chain()
        f = StepFn("increasing", (2,), (1, 3))
        e = Expr((0, 1, 2), (Pred(0, "le", f, 2),), ((0, 3),) * 3)
        H = GFunc((0, 1, 2), [], (Edge(0, 1, s, s),), frozenset({0}))
        with pytest.raises(ValueError, match="free leaves"):
            eliminate_free(e, H, 0, "box")

    def test_random_single_step_value_preserved(self):
        rng = random.Random("box elimination suite")
        for trial in range(80):
            d = rng.choice([2, 4])
            e, H = self.matching(d)
            e = gen_expr(rng, d, rng.randrange(0, 3))
            out = eliminate_free(e, H, rng.randrange(d), "box")
            v0, _ = brute_region_max(e, H)
            assert best_over(out) == v0, f"value drifted in trial {trial}"

    def test_eliminate_all_terminal_shape_and_value(self):
        rng = random.Random("box full elimination")
        for d in (2, 4, 6):
            for trial in range(10):
                e, H = self.matching(d)
                e = gen_expr(rng, d, rng.randrange(0, d), width=3)
                out = eliminate_all(e, H, "box")
                for br in out:
                    assert 2 * len(br.expr.dims) <= d
                    for verts, eidx in br.objective.components():
                        assert len(eidx) == len(verts)
                v0, _ = brute_region_max(e, H)
                assert best_over(out) == v0, f"d={d} trial {trial}"

    def test_no_predicates_reaches_all_wall_maxima(self):
        e, H = self.matching(4)
        out = eliminate_all(e, H, "box")
        # every variable tops out at rank 3 where sigma = 3
        assert best_over(out) == brute_region_max(e, H)[0] == (3 + 3) * (3 + 3)
