"""Space builders, grid axiom families, verification, and sentence-value
estimation on built spaces."""
import numpy as np
import pytest

from metriclaw.logic import (
    Const,
    Dist,
    Sup,
    build_extension_axiom,
    build_phi_geq_half,
    eval_formula,
)
from metriclaw.models import (
    AxiomFamily,
    GridSpec,
    build_circulant,
    build_random_class_C,
    build_random_grid,
    enumerate_grid_tasks,
    estimate_sigma_AS,
    load_tasks,
    save_tasks,
    task_value,
    verify_axioms,
)
from metriclaw.sampling import generator
from metriclaw.spaces import FiniteMetricSpace, in_class_C, is_metric


class TestGridSpec:
    def test_quarter_grid(self):
        assert GridSpec(0.25).values == (0.5, 0.75, 1.0)

    def test_clamped_last_value(self):
        vals = GridSpec(0.3).values
        assert vals[0] == 0.5 and vals[-1] == 1.0
        assert all(b - a <= 0.3 + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_half_step(self):
        assert GridSpec(0.5).values == (0.5, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridSpec(0.0)
        with pytest.raises(ValueError):
            GridSpec(0.6)


class TestCirculant:
    def test_equilateral(self):
        space = build_circulant(3, [0.5])
        assert np.array_equal(
            space.dist, np.array([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])
        )

    def test_class_c_and_metric(self):
        space = build_circulant(7, [0.5, 0.75, 1.0])
        assert in_class_C(space)
        assert is_metric(space.to_vector())

    def test_every_point_realizes_every_ring_value(self):
        space = build_circulant(7, [0.5, 0.75, 1.0])
        for i in range(1, 8):
            seen = {space.distance(i, j) for j in range(1, 8) if j != i}
            assert seen == {0.5, 0.75, 1.0}

    def test_singleton_grid_axioms_exactly_zero_at_every_epsilon(self):
        space = build_circulant(7, [0.5, 0.75, 1.0])
        for eps in (0.01, 0.05, 0.2, 0.7, 1.0):
            fam = enumerate_grid_tasks(GridSpec(0.25), 1, eps)
            assert verify_axioms(space, fam).max_value == 0.0

    def test_ring_length_checked(self):
        with pytest.raises(ValueError, match="floor"):
            build_circulant(7, [0.5, 0.75])

    def test_ring_range_checked(self):
        with pytest.raises(ValueError, match="outside"):
            build_circulant(5, [0.4, 0.75])


class TestRandomBuilders:
    def test_class_c_and_metric(self):
        for seed in range(5):
            space = build_random_class_C(16, generator(seed))
            assert in_class_C(space)
            assert is_metric(space.to_vector())

    def test_mean_distance(self):
        space = build_random_class_C(64, generator(7))
        coords = space.to_vector().coords
        assert abs(coords.mean() - 0.75) < 0.01

    def test_singleton_axioms_zero_at_n64(self):
        # a missing witness needs all 63 distances outside a 0.2-band,
        # which is vanishingly unlikely; checked across 20 seeds
        fam = enumerate_grid_tasks(GridSpec(0.25), 1, 0.2)
        for seed in range(20):
            space = build_random_class_C(64, generator(seed, 64))
            assert verify_axioms(space, fam).max_value == 0.0

    def test_grid_builder_values(self):
        space = build_random_grid(12, (0.5, 0.75, 1.0), generator(3))
        coords = set(space.to_vector().coords.tolist())
        assert coords <= {0.5, 0.75, 1.0}
        assert in_class_C(space)

    def test_grid_builder_range_checked(self):
        with pytest.raises(ValueError):
            build_random_grid(5, (0.4, 1.0), generator(0))


class TestEnumerateGridTasks:
    def test_singleton_count(self):
        fam = enumerate_grid_tasks(GridSpec(0.25), 1, 0.1)
        assert len(fam.tasks) == 3

    def test_kmax2_count(self):
        # 3 singleton tasks plus 3 bases times 9 extension pairs
        fam = enumerate_grid_tasks(GridSpec(0.25), 2, 0.2)
        assert len(fam.tasks) == 30

    def test_tasks_valid(self):
        fam = enumerate_grid_tasks(GridSpec(0.5), 2, 0.2)
        for task in fam.tasks:
            assert task.epsilon == 0.2
            assert in_class_C(task.ext.base)
            assert in_class_C(task.ext.extension)

    def test_budget_guard(self):
        with pytest.raises(ValueError, match="budget"):
            enumerate_grid_tasks(GridSpec(0.05), 4, 0.1, max_tasks=1000)


class TestVerifyAxioms:
    def test_circulant_singletons(self):
        space = build_circulant(7, [0.5, 0.75, 1.0])
        fam = enumerate_grid_tasks(GridSpec(0.25), 1, 0.2)
        report = verify_axioms(space, fam)
        assert report.max_value == 0.0
        assert report.values == [0.0, 0.0, 0.0]

    def test_single_point_against_singleton_task(self):
        from metriclaw.logic import AxiomTask
        from metriclaw.spaces import OnePointExtension

        x = FiniteMetricSpace(1, np.zeros((1, 1)))
        y = FiniteMetricSpace(2, np.array([[0.0, 0.6], [0.6, 0.0]]))
        fam = AxiomFamily((AxiomTask(OnePointExtension(x, y), 0.1),), "one")
        single = FiniteMetricSpace(1, np.zeros((1, 1)))
        report = verify_axioms(single, fam)
        assert report.max_value == 0.1

    def test_epsilon_one_family_vacuous(self):
        fam = enumerate_grid_tasks(GridSpec(0.25), 2, 1.0)
        space = build_random_class_C(10, generator(1))
        assert verify_axioms(space, fam).max_value == 0.0

    def test_values_agree_with_formula_evaluator(self):
        # kernel route vs direct AST evaluation, exact equality
        fam = enumerate_grid_tasks(GridSpec(0.25), 2, 0.2)
        space = build_random_class_C(12, generator(9))
        report = verify_axioms(space, fam)
        for task, value in zip(fam.tasks, report.values):
            assert value == eval_formula(build_extension_axiom(task), space)

    def test_saturation_trend_over_sizes(self):
        # fraction of seeds with exact family satisfaction is nondecreasing
        # over sizes {32, 64, 128} and reaches 1 at 128
        fam = enumerate_grid_tasks(GridSpec(0.25), 2, 0.2)
        fracs = []
        for size in (32, 64, 128):
            zero = sum(
                verify_axioms(
                    build_random_class_C(size, generator(seed, size)), fam
                ).max_value
                == 0.0
                for seed in range(20)
            )
            fracs.append(zero / 20)
        assert fracs[0] <= fracs[1] <= fracs[2]
        assert fracs[2] == 1.0


class TestTaskFiles:
    def test_roundtrip(self, tmp_path):
        fam = enumerate_grid_tasks(GridSpec(0.25), 2, 0.2)
        path = tmp_path / "tasks.json"
        save_tasks(fam, path)
        back = load_tasks(path)
        assert len(back.tasks) == len(fam.tasks)
        for a, b in zip(fam.tasks, back.tasks):
            assert a.epsilon == b.epsilon
            assert np.array_equal(a.ext.extension.dist, b.ext.extension.dist)

    def test_task_value_matches_after_roundtrip(self, tmp_path):
        fam = enumerate_grid_tasks(GridSpec(0.25), 1, 0.3)
        path = tmp_path / "tasks.json"
        save_tasks(fam, path)
        back = load_tasks(path)
        space = build_random_class_C(10, generator(2))
        for a, b in zip(fam.tasks, back.tasks):
            assert task_value(space, a) == task_value(space, b)


class TestSigmaEstimation:
    def test_phi_is_exactly_zero(self):
        est = estimate_sigma_AS(
            build_phi_geq_half(), [8, 16], list(range(5)), builder="random"
        )
        for row in est.rows:
            assert row["mean"] == 0.0 and row["max"] == 0.0
        assert est.point_estimate == 0.0

    def test_phi_zero_on_circulants(self):
        est = estimate_sigma_AS(
            build_phi_geq_half(), [6, 7], [0], builder="circulant"
        )
        assert est.point_estimate == 0.0

    def test_constant_sentence(self):
        est = estimate_sigma_AS(Const(0.3), [4, 8], [0, 1], builder="random")
        assert est.point_estimate == 0.3
        for row in est.rows:
            assert row["std"] == 0.0

    def test_sup_distance_order_statistic(self):
        # max of 2016 i.i.d. uniforms on [1/2, 1]: mean 1 - 0.5/2017
        sigma = Sup("x", Sup("y", Dist("x", "y")))
        est = estimate_sigma_AS(sigma, [64], list(range(30)), builder="random")
        expected = 1.0 - 0.5 / 2017.0
        assert abs(est.point_estimate - expected) < 0.002

    def test_builder_validation(self):
        with pytest.raises(ValueError):
            estimate_sigma_AS(Const(0.5), [4], [0], builder="nope")
