import numpy as np
import pytest

from skorokhod.cadlag import (
    CadlagFunction,
    ParamRep,
    TimeChange,
    completed_graph,
    incomplete_graph,
)
from skorokhod.metrics import (
    box_distance,
    d_j1,
    d_j2,
    d_m1_upper,
    d_m2,
    dense_hausdorff_oracle,
    hausdorff,
    m1_interval,
    metric_oracle,
    param_rep_from_matching,
    point_to_segment_distance,
    replay_j1,
    sup_norm_distance,
)

from conftest import random_piecewise_linear, random_step_function


def random_pair(rng, max_jumps=6):
    return (
        random_step_function(rng, dim=1, max_jumps=max_jumps),
        random_step_function(rng, dim=1, max_jumps=max_jumps),
    )


class TestBoxPrimitives:
    def test_box_distance(self):
        assert box_distance([0.0], 0.2, [3.0], 0.1) == 3.0
        assert box_distance([0.0], 0.2, [0.05], 0.9) == pytest.approx(0.7)

    def test_point_to_segment_vertical(self):
        # distance from (0.5, t) to the segment {1/2} x [[0,1]] is |t - 1/2|
        d = point_to_segment_distance([0.5], 0.3, [0.0], 0.5, [1.0], 0.5)
        assert d == pytest.approx(0.2)

    def test_point_to_segment_slanted(self, rng):
        for _ in range(200):
            p = rng.uniform(-1, 1, size=3)
            a = rng.uniform(-1, 1, size=3)
            b = rng.uniform(-1, 1, size=3)
            got = point_to_segment_distance(p[:2], p[2], a[:2], abs(a[2]), b[:2], abs(b[2]))
            phis = np.linspace(0, 1, 2001)
            pts_v = (1 - phis)[:, None] * a[:2] + phis[:, None] * b[:2]
            pts_t = (1 - phis) * abs(a[2]) + phis * abs(b[2])
            brute = np.maximum(
                np.linalg.norm(pts_v - p[:2], axis=1), np.abs(pts_t - p[2])
            ).min()
            assert got <= brute + 1e-12
            assert brute - got <= 2e-3


class TestHausdorff:
    def test_parallel_lines(self):
        A = completed_graph(CadlagFunction.constant([0.0]))
        B = completed_graph(CadlagFunction.constant([0.7]))
        assert hausdorff(A, B)[0] == 0.7

    def test_identity(self):
        A = completed_graph(CadlagFunction.indicator(0.3))
        assert hausdorff(A, A)[0] == 0.0

    def test_shifted_step(self):
        A = completed_graph(CadlagFunction.indicator(0.5))
        B = completed_graph(CadlagFunction.indicator(0.6))
        assert hausdorff(A, B)[0] == pytest.approx(0.1, abs=1e-12)

    def test_interior_supremum(self):
        # point moving on the diagonal against an L-shaped graph: the
        # directed supremum sits strictly inside the diagonal segment
        lin = CadlagFunction.linear([0.0], [1.0])
        late = CadlagFunction.indicator(0.999)
        val = hausdorff(completed_graph(lin), completed_graph(late))[0]
        assert val == pytest.approx((1.0 - 0.001) / 2.0, abs=1e-12)

    def test_dimension_mismatch(self):
        A = completed_graph(CadlagFunction.constant([0.0]))
        B = completed_graph(CadlagFunction.constant([0.0, 0.0]))
        with pytest.raises(ValueError):
            hausdorff(A, B)

    def test_matches_dense_oracle_steps(self, rng):
        for _ in range(60):
            f, g = random_pair(rng)
            for graph in (completed_graph, incomplete_graph):
                exact = hausdorff(graph(f), graph(g))[0]
                orc = dense_hausdorff_oracle(graph(f), graph(g), 1.0 / 400)
                assert orc <= exact + 1e-9
                assert exact - orc <= 1.0 / 400 + 1e-9

    def test_matches_dense_oracle_linear(self, rng):
        for _ in range(30):
            f = random_piecewise_linear(rng, dim=1, max_pieces=5)
            g = random_piecewise_linear(rng, dim=1, max_pieces=5)
            exact = hausdorff(completed_graph(f), completed_graph(g))[0]
            orc = dense_hausdorff_oracle(completed_graph(f), completed_graph(g), 1.0 / 500)
            assert orc <= exact + 1e-9
            assert exact - orc <= 1.0 / 500 + 1e-9

    def test_dim2_certified(self, rng):
        f = random_step_function(rng, dim=2, max_jumps=4)
        g = random_step_function(rng, dim=2, max_jumps=4)
        val = d_m2(f, g, gap=1e-6)
        orc = dense_hausdorff_oracle(completed_graph(f), completed_graph(g), 1.0 / 600)
        assert not val.exactness.exact
        assert orc <= val.value + 1e-9
        assert val.value - orc <= 1.0 / 600 + 1e-6


class TestJ2M2:
    def test_self_distance_zero(self, rng):
        f = random_step_function(rng, dim=1, max_jumps=6)
        assert d_m2(f, f).value == 0.0
        assert d_j2(f, f).value == 0.0

    def test_constant_pair_all_topologies(self):
        f = CadlagFunction.constant([1.0])
        g = CadlagFunction.constant([3.5])
        assert d_j2(f, g).value == 2.5
        assert d_m2(f, g).value == 2.5
        assert d_j1(f, g).value == pytest.approx(2.5, abs=1e-9)
        assert d_m1_upper(f, g, 2).value == pytest.approx(2.5, abs=1e-12)

    def test_family2_vs_limit_bound(self):
        from skorokhod.embeddings import counterexample_limit, counterexample_sequence, embed

        x = embed(counterexample_sequence(2, 8), "J1")
        d = d_j2(x, counterexample_limit()).value
        assert d <= 2.0 / 8 + 1e-12
        orc = metric_oracle("J2", x, counterexample_limit(), 400)
        assert abs(d - orc) <= 1.0 / 400 + 1e-9

    def test_metric_axioms_sampled(self, rng):
        for _ in range(60):
            f, g = random_pair(rng, max_jumps=4)
            h = random_step_function(rng, dim=1, max_jumps=4)
            for dist in (d_j2, d_m2):
                ab = dist(f, g).value
                ba = dist(g, f).value
                assert abs(ab - ba) <= 1e-9
                ac = dist(f, h).value
                cb = dist(h, g).value
                assert ab <= ac + cb + 1e-9

    def test_identity_of_indiscernibles(self, rng):
        f, g = random_pair(rng)
        if f != g:
            assert d_m2(f, g).value > 0.0
        assert d_m2(f, f).value == 0.0


class TestJ1:
    def test_shifted_jump(self):
        r = d_j1(CadlagFunction.indicator(0.5), CadlagFunction.indicator(0.6))
        assert r.value == pytest.approx(0.1, abs=1e-9)
        assert isinstance(r.certificate, TimeChange)

    def test_self_zero(self, rng):
        f = random_step_function(rng, dim=1, max_jumps=5)
        assert d_j1(f, f).value <= 1e-12

    def test_family1_stays_away(self):
        from skorokhod.embeddings import counterexample_limit, counterexample_sequence, embed

        lim = counterexample_limit()
        for n in (4, 8, 16, 32, 64):
            x = embed(counterexample_sequence(1, n), "J1")
            assert d_j1(x, lim).value >= 0.25

    def test_certificate_replay(self, rng):
        for _ in range(50):
            f, g = random_pair(rng)
            r = d_j1(f, g)
            assert abs(replay_j1(f, g, r.certificate) - r.value) <= 1e-9

    def test_oracle_agreement(self, rng):
        for _ in range(40):
            f, g = random_pair(rng, max_jumps=4)
            r = d_j1(f, g)
            orc = metric_oracle("J1", f, g, 200)
            assert r.value <= orc + 1e-9
            assert orc - r.value <= 2.0 / 200 + 1e-9

    def test_dominates_j2(self, rng):
        for _ in range(50):
            f, g = random_pair(rng)
            assert d_j2(f, g).value <= d_j1(f, g).value + 1e-9

    def test_linear_inputs_flagged_upper_bound(self):
        f = CadlagFunction.linear([0.0], [1.0])
        g = CadlagFunction.linear([0.0], [1.1])
        r = d_j1(f, g)
        assert not r.exactness.exact
        assert r.value >= sup_norm_distance(f, g) - 1e-9 or r.value <= 0.1 + 1e-9


class TestM1Upper:
    def test_identical_zero(self, rng):
        f = random_step_function(rng, dim=1, max_jumps=5)
        assert d_m1_upper(f, f, 2).value == 0.0

    def test_family1_tight(self):
        from skorokhod.embeddings import counterexample_limit, counterexample_sequence, embed

        lim = counterexample_limit()
        for n in (4, 8, 16, 32):
            x = embed(counterexample_sequence(1, n), "J1")
            assert d_m1_upper(x, lim, refinement=max(8, n)).value <= 2.0 / n + 1e-12

    def test_monotone_pair_bounded_by_time_offset(self):
        f = CadlagFunction.step([0.3, 0.6], [[0.0], [0.5], [1.0]])
        g = CadlagFunction.step([0.35, 0.7], [[0.0], [0.5], [1.0]])
        assert d_m1_upper(f, g, refinement=16).value <= 0.1 + 1e-12

    def test_sandwich(self, rng):
        for _ in range(40):
            f, g = random_pair(rng)
            lo, hi = m1_interval(f, g, refinement=8)
            assert lo <= hi + 1e-12
            assert lo == d_m2(f, g).value

    def test_nonincreasing_in_refinement(self, rng):
        for _ in range(20):
            f, g = random_pair(rng)
            v1 = d_m1_upper(f, g, 2).value
            v2 = d_m1_upper(f, g, 4).value
            v3 = d_m1_upper(f, g, 16).value
            assert v3 <= v2 + 1e-12 <= v1 + 2e-12

    def test_m1_below_j1(self, rng):
        # the monotone-matching bound converges from above towards d_M1,
        # which never exceeds d_J1
        for _ in range(25):
            f, g = random_pair(rng, max_jumps=4)
            assert d_m1_upper(f, g, 32).value <= d_j1(f, g).value + 5e-3

    def test_param_rep_certificate(self):
        f = CadlagFunction.indicator(0.5)
        g = CadlagFunction.indicator(0.55)
        r = d_m1_upper(f, g, refinement=4)
        u1, u2 = param_rep_from_matching(
            completed_graph(f), completed_graph(g), r.certificate, r.meta["level"]
        )
        assert u1.traces(completed_graph(f))
        assert u2.traces(completed_graph(g))
        cost = max(
            max(np.abs(u1.u[i] - u2.u[i]).max(), abs(u1.r[i] - u2.r[i]))
            for i in range(len(u1.r))
        )
        assert cost == pytest.approx(r.value, abs=1e-12)


class TestOracleGuards:
    def test_oracle_too_large(self, rng):
        f = random_step_function(rng, dim=1, max_jumps=15)
        while f.n_pieces <= 9:
            f = random_step_function(rng, dim=1, max_jumps=15)
        with pytest.raises(ValueError):
            metric_oracle("J2", f, CadlagFunction.constant([0.0]), 100)

    def test_sup_norm_exact(self, rng):
        for _ in range(50):
            f, g = random_pair(rng)
            grid = np.linspace(0, 1, 2001)
            brute = max(
                float(np.linalg.norm(f.evaluate(t) - g.evaluate(t))) for t in grid
            )
            assert sup_norm_distance(f, g) >= brute - 1e-12
