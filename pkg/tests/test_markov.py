import numpy as np
import pytest

from skorokhod.cadlag import CadlagFunction
from skorokhod.markov import (
    builtin_kernels,
    confidence_half_width,
    convergence_probe,
    estimate_extra_steps,
    estimate_global_bound,
    estimate_local_continuity,
    extra_steps_oracle,
    fixed_discontinuity_frequency,
    make_kernel,
    poisson_pmf,
    simulate_chain,
    simulate_paths,
    walk_exceedance_oracle,
    walk_max_exceedance_oracle,
)


class TestSimulation:
    def test_identity_constant(self):
        path = simulate_chain(make_kernel("identity", 8), [1.5], 10, 0)
        assert np.all(path == 1.5)

    def test_drift_path(self):
        path = simulate_chain(make_kernel("drift", 4), [0.0], 4, 0)
        assert np.allclose(path[:, 0], [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_seeded_reproducibility(self):
        k = make_kernel("srw", 64)
        a = simulate_chain(k, [0.0], 200, 12345)
        b = simulate_chain(k, [0.0], 200, 12345)
        assert np.array_equal(a, b)

    def test_replicas_order_insensitive(self):
        k = make_kernel("srw", 16)
        all3 = simulate_paths(k, [0.0], 50, 3, 7)
        # replica 2 alone must reproduce row 2 of the batch
        single = k.sample_path(np.zeros(1), 50, np.random.default_rng(np.random.SeedSequence(entropy=7, spawn_key=(2, 0))))
        assert np.array_equal(all3[2], single)

    def test_catalog(self):
        names = builtin_kernels()
        assert "srw" in names and "fixed-jump" in names
        with pytest.raises(ValueError):
            make_kernel("nope", 8)

    def test_srw_moments(self):
        k = make_kernel("srw", 64)
        finals = simulate_paths(k, [0.0], 64, 400, 3)[:, -1, 0]
        # variance after k steps is k/n = 1
        assert abs(finals.mean()) < 0.2
        assert abs(finals.var() - 1.0) < 0.25

    def test_fixed_jump_crossing(self):
        n = 16
        k = make_kernel("fixed-jump", n)
        path = simulate_chain(k, [-0.5], n, 0)[:, 0]
        # climbs by 1/n until it would cross zero, then kicks up by 1
        assert path[0] == -0.5
        crossing = np.nonzero(np.diff(path) > 0.5)[0]
        assert len(crossing) == 1 and abs(crossing[0] - n / 2) <= 1
        assert path[-1] > 1.0


class TestLocalContinuity:
    def test_identity_zero(self):
        est = estimate_local_continuity(make_kernel("identity", 16), 16, 0.25, 1.0, 0.2, replicas=50, seed=0)
        assert est.sup_estimate == 0.0

    def test_fixed_jump_detected(self):
        for h in (0.2, 0.1, 0.05):
            est = estimate_local_continuity(
                make_kernel("fixed-jump", 64), 64, 0.5, 2.0, h, replicas=20, seed=0
            )
            assert est.sup_estimate >= 0.5

    def test_srw_tail_matches_convolution_oracle(self):
        n, eps, h = 256, 0.5, 0.05
        est = estimate_local_continuity(
            make_kernel("srw", n), n, eps, 2.0, h, x_grid=[0.0], replicas=3000, seed=4
        )
        steps = int(np.floor(h * n))
        oracle = max(walk_exceedance_oracle(n, k, eps) for k in range(steps + 1))
        hw = confidence_half_width(oracle, 3000)
        assert abs(est.sup_estimate - oracle) <= hw + 1e-12

    def test_monotone_in_h_from_shared_paths(self):
        n = 128
        ests = [
            estimate_local_continuity(
                make_kernel("srw", n), n, 0.25, 1.0, h, x_grid=[0.0], replicas=500, seed=9
            ).sup_estimate
            for h in (0.05, 0.1, 0.2)
        ]
        assert ests[0] <= ests[1] + 1e-12 <= ests[2] + 2e-12

    def test_probability_matrix_shape(self):
        est = estimate_local_continuity(make_kernel("srw", 32), 32, 0.3, 1.0, 0.1, replicas=40, seed=0)
        assert est.probabilities.shape == (len(est.grid), int(0.1 * 32) + 1)
        assert np.all((0 <= est.probabilities) & (est.probabilities <= 1))
        assert np.all(est.half_widths > 0)


class TestGlobalBound:
    def test_identity_zero(self):
        est = estimate_global_bound(make_kernel("identity", 16), 16, 2, [0.5, 1.0], replicas=30, seed=0)
        assert est.sup_estimate == 0.0

    def test_drift_threshold(self):
        est = estimate_global_bound(make_kernel("drift", 16), 16, 2, [1.9, 2.1], replicas=10, seed=0)
        assert est.probabilities[0, 0] == 1.0  # path max is exactly 2
        assert est.probabilities[1, 0] == 0.0

    def test_srw_reflection_oracle(self):
        n = 64
        est = estimate_global_bound(make_kernel("srw", n), n, 1, [3.0], replicas=4000, seed=1)
        oracle = walk_max_exceedance_oracle(n, int(np.floor(3.0 * np.sqrt(n))) + 1)
        assert oracle < 0.01
        assert abs(est.probabilities[0, 0] - oracle) <= confidence_half_width(oracle, 4000) + 1e-12

    def test_monotone_in_radius(self):
        est = estimate_global_bound(make_kernel("srw", 32), 32, 2, [0.5, 1.0, 2.0, 4.0], replicas=200, seed=2)
        p = est.probabilities[:, 0]
        assert np.all(np.diff(p) <= 0)


class TestExtraSteps:
    def test_identity_zero(self):
        assert estimate_extra_steps(make_kernel("identity", 64), 64, 0.25, replicas=100, seed=0) == 0.0

    def test_srw_matches_exact_oracle(self):
        for n in (16, 64):
            est = estimate_extra_steps(make_kernel("srw", n), n, 0.25, replicas=3000, seed=11)
            oracle = extra_steps_oracle(n, 0.25)
            assert abs(est - oracle) <= confidence_half_width(oracle, 3000) + 1e-12

    def test_unit_jump_poisson_oracle(self):
        n = 64
        est = estimate_extra_steps(make_kernel("unit-jump", n), n, 0.25, replicas=3000, seed=3)
        pmf = poisson_pmf(n, 4 * n)
        # a wander happens exactly when at least two extra indices exist
        oracle = 1.0 - pmf[n - 2 : n + 1].sum()
        assert abs(est - oracle) <= confidence_half_width(oracle, 3000) + 1e-12


class TestFixedDiscontinuities:
    def test_srw_jumps_vanish(self):
        freqs = [
            fixed_discontinuity_frequency(make_kernel("srw", n), n, 0.2, replicas=50, seed=0)
            for n in (16, 64)
        ]
        assert freqs[0] in (0.0, 1.0)  # steps are 1/4 > 0.2 at n=16
        assert freqs[1] == 0.0  # steps 1/8 < 0.2

    def test_fixed_jump_persists(self):
        freq = fixed_discontinuity_frequency(
            make_kernel("fixed-jump", 64), 64, 0.5, replicas=10, seed=0, start=[-0.5]
        )
        assert freq == 1.0


class TestConvergenceProbe:
    def test_drift_vs_line(self):
        res = convergence_probe(
            lambda n: make_kernel("drift", n),
            CadlagFunction.linear([0.0], [1.0]),
            "J1",
            [8, 16, 32],
            epsilon=0.2,
            replicas=1,
            seed=0,
        )
        # d_J1(step staircase, line) = 1/n exactly
        assert res.quantiles[0.5] == pytest.approx([1 / 8, 1 / 16, 1 / 32], abs=1e-9)
        assert res.exceedance == [0.0, 0.0, 0.0]

    def test_embedding_switch_j2_trend(self):
        res = convergence_probe(
            lambda n: make_kernel("srw", n), "m1", "J2", [8, 32, 96], epsilon=0.1, replicas=25, seed=5
        )
        assert res.exceedance[-1] <= 0.05
        assert res.exceedance[0] >= res.exceedance[-1]

    def test_markov_embedding_j1_trend_with_bound(self):
        from skorokhod.embeddings import PoissonPath, clock_discrepancy

        res = convergence_probe(
            lambda n: make_kernel("drift", n), "markov", "J1", [8, 24, 64], epsilon=0.25, replicas=25, seed=7
        )
        assert res.exceedance[-1] <= res.exceedance[0]
        assert res.exceedance[-1] <= 0.1
        # cross-check one replica against the clock + wander bound
        n = 64
        kernel = make_kernel("drift", n)
        clock = PoissonPath.sample(n, np.random.SeedSequence(entropy=7, spawn_key=(0, 1)))
        from skorokhod.embeddings import SequenceData, embed, embed_markov
        from skorokhod.metrics import d_j1

        steps = max(n - 1, clock.count_before(n))
        path = kernel.sample_path(np.zeros(1), steps, np.random.default_rng(np.random.SeedSequence(entropy=7, spawn_key=(0, 0))))
        f = embed(SequenceData(n, path[:n]), "J1")
        z = embed_markov(path, clock, n)
        disc = clock_discrepancy(clock, n)
        n_before = clock.count_before(n)
        base = min(n - 1, n_before)
        extra = abs(n - 1 - n_before)
        wander = 0.0
        if extra > 1:
            seg = path[base : base + extra]
            wander = float(np.abs(seg - path[base]).max())
        assert d_j1(f, z).value <= disc + wander + 1e-9

    def test_reproducible(self):
        a = convergence_probe(lambda n: make_kernel("srw", n), "j2", "J2", [8, 16], 0.1, replicas=20, seed=3)
        b = convergence_probe(lambda n: make_kernel("srw", n), "j2", "J2", [8, 16], 0.1, replicas=20, seed=3)
        assert a.exceedance == b.exceedance and a.quantiles == b.quantiles

    def test_bad_recipe(self):
        with pytest.raises(ValueError):
            convergence_probe(lambda n: make_kernel("srw", n), "nope", "J2", [8], 0.1, replicas=1, seed=0)


class TestOracles:
    def test_walk_exceedance_small_cases(self):
        # one step of size 1/sqrt(4) = 0.5: |S_1|/2 = 0.5 > 0.4 always
        assert walk_exceedance_oracle(4, 1, 0.4) == 1.0
        assert walk_exceedance_oracle(4, 1, 0.6) == 0.0
        # two steps: |S_2| in {0, 2}, P(|S_2|=2) = 1/2
        assert walk_exceedance_oracle(4, 2, 0.75) == pytest.approx(0.5)

    def test_walk_max_monotone(self):
        vals = [walk_max_exceedance_oracle(20, a) for a in (1, 2, 3, 5)]
        assert all(x >= y for x, y in zip(vals, vals[1:]))
        assert walk_max_exceedance_oracle(5, 1) == 1.0

    def test_poisson_pmf_sums(self):
        pmf = poisson_pmf(16, 200)
        assert pmf.sum() == pytest.approx(1.0, abs=1e-12)

    def test_half_width_floor(self):
        # degenerate estimates still get a usable interval
        assert confidence_half_width(0.0, 100) > 0.01
        assert confidence_half_width(0.5, 100) > confidence_half_width(0.5, 10000)
