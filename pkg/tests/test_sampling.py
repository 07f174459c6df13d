"""Samplers: determinism, region membership, and distribution checks against
independent oracles.  All Monte Carlo assertions run on frozen substreams."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metriclaw.errors import RejectionBudgetError
from metriclaw.sampling import (
    DeltaSchedule,
    SamplerConfig,
    generator,
    hit_and_run_chain,
    metric_fraction,
    rejection_batch,
    sample_cube,
    sample_D_n,
    sample_M_n_hitandrun,
    sample_M_n_rejection,
    sample_S_like,
)
from metriclaw.spaces import in_D_n, is_metric


class TestDeltaSchedule:
    def test_direct_formula(self):
        assert DeltaSchedule(scale=1.0, exponent=1 / 3).delta_at(1000) == pytest.approx(0.1)

    def test_cap_engaged(self):
        assert DeltaSchedule(scale=1.0, exponent=1 / 3).delta_at(2) == 0.49

    def test_half_scale(self):
        assert DeltaSchedule(scale=0.5, exponent=0.5).delta_at(25) == pytest.approx(0.1)

    def test_validation(self):
        with pytest.raises(ValueError):
            DeltaSchedule(scale=-1.0)
        with pytest.raises(ValueError):
            DeltaSchedule(exponent=0.0)
        with pytest.raises(ValueError):
            DeltaSchedule(cap=0.5)

    @settings(max_examples=50, deadline=None)
    @given(
        st.floats(min_value=0.01, max_value=5.0),
        st.floats(min_value=0.05, max_value=1.0),
        st.integers(min_value=1, max_value=500),
    )
    def test_nonincreasing_and_in_range(self, scale, exponent, n):
        sched = DeltaSchedule(scale=scale, exponent=exponent)
        d1, d2 = sched.delta_at(n), sched.delta_at(n + 1)
        assert 0.0 < d2 <= d1 < 0.5


class TestCube:
    def test_range(self, rng0):
        vec = sample_cube(4, rng0)
        assert vec.coords.min() >= 0.0 and vec.coords.max() <= 1.0

    def test_determinism(self):
        a = sample_cube(4, generator(9, 3))
        b = sample_cube(4, generator(9, 3))
        assert np.array_equal(a.coords, b.coords)
        c = sample_cube(4, generator(9, 4))
        assert not np.array_equal(a.coords, c.coords)

    def test_mean_half(self):
        # law of large numbers: per-coordinate mean over 1e5 draws
        rng = generator(1, 0)
        draws = rng.random((100_000, 3))
        assert abs(draws.mean() - 0.5) < 0.01


class TestMnRejection:
    def test_two_points_accepts_everything(self):
        vec, attempts = sample_M_n_rejection(2, generator(2, 0))
        assert attempts == 1 and is_metric(vec)

    def test_outputs_metric(self):
        for trial in range(50):
            vec, _ = sample_M_n_rejection(4, generator(3, trial))
            assert is_metric(vec)

    def test_n3_acceptance_half(self):
        # analytic: the metric region fills exactly half the cube at n=3
        frac = metric_fraction(3, 200_000, generator(4, 0))
        assert abs(frac - 0.5) < 0.01

    def test_budget_error(self):
        with pytest.raises(RejectionBudgetError, match="n=7"):
            rows, _ = rejection_batch(7, 1, generator(5, 0), max_rejections=10)


class TestDn:
    def test_member(self):
        for trial in range(30):
            vec, _ = sample_D_n(3, 0.2, generator(6, trial))
            assert in_D_n(vec, 0.2)

    def test_delta_validation(self):
        with pytest.raises(ValueError):
            sample_D_n(3, 0.0, generator(0))
        with pytest.raises(ValueError):
            sample_D_n(3, 0.6, generator(0))

    def test_acceptance_vs_box_oracle(self):
        # sampler acceptance at n=3, delta=0.25 against an independently
        # written brute-force Monte Carlo on the box, and the closed form
        count = 50_000
        _, attempts = rejection_batch(3, count, generator(7, 0), lo=0.25)
        est = count / attempts

        oracle_rng = np.random.default_rng(123)
        u = 0.25 + oracle_rng.random((400_000, 3)) * 0.75
        ok = (
            (u[:, 0] <= u[:, 1] + u[:, 2])
            & (u[:, 1] <= u[:, 0] + u[:, 2])
            & (u[:, 2] <= u[:, 0] + u[:, 1])
        )
        oracle = float(ok.mean())
        analytic = 1.0 - 3.0 * ((0.5**3) / 6.0) / 0.75**3
        assert abs(est - oracle) < 0.01
        assert abs(est - analytic) < 0.01
        assert abs(oracle - analytic) < 0.005


class TestSLike:
    def test_always_in_Dn(self):
        for trial in range(30):
            for k in (1, 2, 3):
                vec, _ = sample_S_like(k, 4, 0.1, generator(8, trial, k))
                assert in_D_n(vec, 0.1)

    def test_cross_block_above_half_plus_delta(self):
        from metriclaw.indexing import pair_index

        delta = 0.15
        for trial in range(20):
            vec, _ = sample_S_like(2, 5, delta, generator(9, trial))
            for i in (1, 2):
                for j in (3, 4, 5):
                    assert vec.coords[pair_index(i, j, 5)] >= 0.5 + delta

    def test_marginal_mean(self):
        # k=1, n=3: d_12 is a cross pair, uniform on [0.6, 1], mean 0.8
        rng = generator(10, 0)
        vals = [sample_S_like(1, 3, 0.1, rng)[0].coords[0] for _ in range(100_000)]
        assert abs(np.mean(vals) - 0.8) < 0.01

    def test_k_range(self):
        with pytest.raises(ValueError):
            sample_S_like(0, 3, 0.1, generator(0))
        with pytest.raises(ValueError):
            sample_S_like(3, 3, 0.1, generator(0))


class TestHitAndRun:
    def test_states_feasible(self):
        rows, retries = hit_and_run_chain(4, SamplerConfig(), generator(11, 0), 200)
        assert rows.shape == (200, 6)
        for row in rows:
            assert is_metric(row, 1e-12, n=4)
            assert row.min() >= 0.0 and row.max() <= 1.0
        assert retries == 0

    def test_starting_point_interior(self):
        # 0.6 + 0.6 > 1 >= any coordinate, strictly, for every n
        assert 0.6 + 0.6 > 1.0
        vec = sample_M_n_hitandrun(6, SamplerConfig(), generator(12, 0))
        assert is_metric(vec, 1e-12)

    def test_determinism(self):
        a, _ = hit_and_run_chain(3, SamplerConfig(), generator(13, 5), 50)
        b, _ = hit_and_run_chain(3, SamplerConfig(), generator(13, 5), 50)
        assert np.array_equal(a, b)

    def test_agrees_with_rejection_on_min_coordinate(self):
        # two-sample check on the min-coordinate statistic at n=3
        rej, _ = rejection_batch(3, 20_000, generator(14, 0))
        har, _ = hit_and_run_chain(3, SamplerConfig(), generator(14, 1), 20_000)
        p_rej = float((rej.min(axis=1) >= 0.3).mean())
        p_har = float((har.min(axis=1) >= 0.3).mean())
        assert abs(p_rej - p_har) < 0.02

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(method="bogus")
        with pytest.raises(ValueError):
            SamplerConfig(thinning=0)
        with pytest.raises(ValueError):
            SamplerConfig(burn_in=-1)


class TestSubstreams:
    def test_independent_substreams(self):
        a = generator(42, 0).random(8)
        b = generator(42, 1).random(8)
        assert not np.array_equal(a, b)
        again = generator(42, 0).random(8)
        assert np.array_equal(a, again)

    def test_counter_based_generator(self):
        gen = generator(0)
        assert type(gen.bit_generator).__name__ == "Philox"
