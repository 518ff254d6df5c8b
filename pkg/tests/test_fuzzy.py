"""Membership shapes, gradients vs finite differences, and Mamdani inference."""

import json

import numpy as np
import pytest

from softdss.fuzzy import (
    GaussianMF,
    GBellMF,
    LinguisticVariable,
    MamdaniModel,
    MamdaniRule,
    TrapezoidMF,
    TriangleMF,
    firing_strength,
    grid_partition,
    mamdani_infer,
    mf_eval,
    mf_grad,
)


def finite_difference_grad(mf, x, h=1e-6):
    """Central finite differences over the shape parameters (test oracle)."""
    params = np.array(mf.params, dtype=float)
    out = np.zeros(params.shape)
    for k in range(params.shape[0]):
        up, down = params.copy(), params.copy()
        up[k] += h
        down[k] -= h
        out[k] = (mf.with_params(up).evaluate(x) - mf.with_params(down).evaluate(x)) / (2 * h)
    return out


def random_mf(shape, rng):
    if shape == "gaussian":
        return GaussianMF(rng.uniform(-2, 2), rng.uniform(0.3, 3.0))
    if shape == "gbell":
        return GBellMF(rng.uniform(0.5, 3.0), rng.uniform(1.0, 5.0), rng.uniform(-2, 2))
    knots = np.sort(rng.uniform(-3, 3, size=4))
    if shape == "trapezoid":
        return TrapezoidMF(*knots)
    return TriangleMF(*knots[:3])


SHAPES = ("gaussian", "gbell", "trapezoid", "triangle")


class TestEvaluation:
    def test_gaussian_center(self):
        assert mf_eval(GaussianMF(5.0, 2.0), 5.0) == 1.0

    def test_triangle_ramp_midpoint(self):
        assert mf_eval(TriangleMF(0.0, 1.0, 2.0), 0.5) == 0.5

    def test_gbell_center(self):
        assert mf_eval(GBellMF(2.0, 4.0, 6.0), 6.0) == 1.0

    def test_trapezoid_plateau_and_ramps(self):
        mf = TrapezoidMF(0.0, 1.0, 2.0, 4.0)
        assert mf_eval(mf, 1.5) == 1.0
        assert mf_eval(mf, 0.5) == 0.5
        assert mf_eval(mf, 3.0) == 0.5
        assert mf_eval(mf, -1.0) == 0.0
        assert mf_eval(mf, 5.0) == 0.0

    def test_range_invariant_random_draws(self):
        rng = np.random.default_rng(0)
        for shape in SHAPES:
            for _ in range(2500):
                mf = random_mf(shape, rng)
                v = float(mf.evaluate(rng.uniform(-10, 10)))
                assert 0.0 <= v <= 1.0

    def test_invalid_parameters_rejected(self):
        with pytest.raises(ValueError):
            GaussianMF(0.0, 0.0)
        with pytest.raises(ValueError):
            GBellMF(-1.0, 2.0, 0.0)
        with pytest.raises(ValueError):
            TrapezoidMF(0.0, 2.0, 1.0, 3.0)
        with pytest.raises(ValueError):
            TriangleMF(1.0, 0.0, 2.0)


class TestGradients:
    def test_gaussian_center_symmetry(self):
        grad = mf_grad(GaussianMF(3.0, 1.5), 3.0)
        assert grad[0] == 0.0

    def test_gaussian_matches_finite_difference(self):
        mf = GaussianMF(5.0, 2.0)
        np.testing.assert_allclose(
            mf_grad(mf, 6.0), finite_difference_grad(mf, 6.0), rtol=1e-5
        )

    def test_triangle_endpoint_left_sided(self):
        # at the left support endpoint the derivative from the left is zero
        grad = mf_grad(TriangleMF(0.0, 1.0, 2.0), 0.0)
        assert np.all(np.isfinite(grad))
        np.testing.assert_array_equal(grad, [0.0, 0.0, 0.0])
        # at the peak the left-sided (rising) branch applies
        peak = mf_grad(TriangleMF(0.0, 1.0, 2.0), 1.0)
        assert peak[1] == pytest.approx(-1.0)

    def test_all_shapes_match_finite_difference(self):
        rng = np.random.default_rng(1)
        for shape in SHAPES:
            checked = 0
            while checked < 1000:
                mf = random_mf(shape, rng)
                x = rng.uniform(-4, 4)
                if shape in ("trapezoid", "triangle"):
                    # stay away from kinks where one-sided values differ
                    if min(abs(x - p) for p in mf.params) < 1e-3:
                        continue
                if shape == "gbell" and abs(x - mf.center) < 1e-3:
                    continue
                analytic = mf_grad(mf, x)
                numeric = finite_difference_grad(mf, x)
                scale = max(np.abs(numeric).max(), 1e-8)
                assert np.abs(analytic - numeric).max() <= 1e-4 * max(scale, 1.0)
                checked += 1

    def test_center_gradient_is_translation_derivative(self):
        rng = np.random.default_rng(2)
        h = 1e-6
        for shape in SHAPES:
            for _ in range(200):
                mf = random_mf(shape, rng)
                x = rng.uniform(-4, 4)
                if shape in ("trapezoid", "triangle") and min(
                    abs(x - p) for p in mf.params
                ) < 1e-3:
                    continue
                numeric = (
                    float(mf.translate(h).evaluate(x)) - float(mf.translate(-h).evaluate(x))
                ) / (2 * h)
                assert float(mf.center_gradient(x)) == pytest.approx(numeric, abs=2e-4)


class TestLinguisticVariable:
    def test_validation(self):
        with pytest.raises(ValueError):
            LinguisticVariable("v", 1.0, 0.0, [GaussianMF(0.5, 1.0)])
        with pytest.raises(ValueError):
            LinguisticVariable("v", 0.0, 1.0, [])
        with pytest.raises(ValueError):
            LinguisticVariable("v", 0.0, 1.0, [GaussianMF(2.0, 1.0)])

    def test_uniform_initializer_crossings(self):
        # adjacent MFs intersect near degree 0.5 at grid midpoints
        for shape in SHAPES:
            var = LinguisticVariable.uniform("v", 0.0, 1.0, 3, shape=shape)
            mid = 0.25  # midpoint between centers 0.0 and 0.5
            a = float(var.mfs[0].evaluate(mid))
            b = float(var.mfs[1].evaluate(mid))
            assert a == pytest.approx(0.5, abs=0.01)
            assert b == pytest.approx(0.5, abs=0.01)

    def test_fuzzify_clips_out_of_range(self):
        var = LinguisticVariable.uniform("v", 0.0, 1.0, 3)
        np.testing.assert_array_equal(var.fuzzify(-5.0), var.fuzzify(0.0))
        np.testing.assert_array_equal(var.fuzzify(7.0), var.fuzzify(1.0))

    def test_json_roundtrip(self):
        var = LinguisticVariable.uniform("fuel", 0.0, 1000.0, 3, shape="gbell")
        blob = json.dumps(var.to_dict())
        back = LinguisticVariable.from_dict(json.loads(blob))
        assert back.name == var.name
        for mf, mf2 in zip(var.mfs, back.mfs):
            assert mf.params == mf2.params


class TestGridPartition:
    def test_four_by_three_gives_81(self):
        variables = [LinguisticVariable.uniform(f"v{i}", 0, 1, 3) for i in range(4)]
        assert len(grid_partition(variables)) == 81

    def test_three_squared(self):
        variables = [LinguisticVariable.uniform(f"v{i}", 0, 1, 3) for i in range(2)]
        rules = grid_partition(variables)
        assert len(rules) == 9
        assert rules[0] == (0, 0)
        assert rules[-1] == (2, 2)

    def test_single(self):
        assert grid_partition([LinguisticVariable.uniform("v", 0, 1, 1)]) == [(0,)]

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            grid_partition([])

    def test_size_is_product_of_counts(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            counts = rng.integers(1, 5, size=int(rng.integers(1, 4)))
            variables = [
                LinguisticVariable.uniform(f"v{i}", 0, 1, int(c)) for i, c in enumerate(counts)
            ]
            assert len(grid_partition(variables)) == int(np.prod(counts))


class TestFiringStrength:
    def _vars(self):
        return [LinguisticVariable.uniform(f"v{i}", 0.0, 1.0, 3, shape="triangle") for i in range(2)]

    def test_product_identity(self):
        variables = self._vars()
        # both inputs at MF centers: degrees (1, 1)
        assert firing_strength(variables, (1, 1), [0.5, 0.5]) == 1.0

    def test_annihilator(self):
        variables = self._vars()
        assert firing_strength(variables, (0, 0), [1.0, 0.5]) == 0.0

    def test_arithmetic(self):
        v = LinguisticVariable("v", 0.0, 1.0, [TriangleMF(0.0, 0.5, 1.0)])
        w = LinguisticVariable("w", 0.0, 1.0, [TriangleMF(0.0, 0.5, 1.0)])
        # degrees 0.8 and 0.2 multiply to 0.16
        got = firing_strength([v, w], (0, 0), [0.4, 0.1])
        assert got == pytest.approx(0.16, abs=1e-12)

    def test_monotone_in_member_degree(self):
        variables = self._vars()
        x = [0.3, 0.6]
        base = firing_strength(variables, (1, 1), x)
        # moving one coordinate away from its MF center lowers that degree only
        assert firing_strength(variables, (1, 1), [0.2, 0.6]) <= base

    def test_min_tnorm_evaluation_option(self):
        v = LinguisticVariable("v", 0.0, 1.0, [TriangleMF(0.0, 0.5, 1.0)])
        w = LinguisticVariable("w", 0.0, 1.0, [TriangleMF(0.0, 0.5, 1.0)])
        x = [0.4, 0.1]  # degrees 0.8 and 0.2
        assert firing_strength([v, w], (0, 0), x, tnorm="min") == pytest.approx(0.2)
        assert firing_strength([v, w], (0, 0), x) == pytest.approx(0.16)
        with pytest.raises(ValueError):
            firing_strength([v, w], (0, 0), x, tnorm="lukasiewicz")


class TestMamdaniInference:
    def _model(self, rules, output_mfs=None, n_inputs=1):
        inputs = [
            LinguisticVariable.uniform(f"x{i}", 0.0, 1.0, 3, shape="triangle")
            for i in range(n_inputs)
        ]
        if output_mfs is None:
            output = LinguisticVariable.uniform("y", 0.0, 1.0, 3, shape="triangle")
        else:
            output = LinguisticVariable("y", 0.0, 1.0, output_mfs)
        return MamdaniModel(inputs=inputs, output=output, rules=rules)

    def test_single_rule_symmetric_consequent(self):
        output = [TriangleMF(0.4, 0.6, 0.8)]
        model = self._model([MamdaniRule((1,), 0, 1.0)], output_mfs=output)
        result = mamdani_infer(model, [0.5])  # center of middle MF: activation 1
        assert result.fired
        assert result.output == pytest.approx(0.6, abs=1e-9)

    def test_no_rule_fires_returns_midpoint_with_flag(self):
        # triangle MFs leave x=1.0 uncovered by the first MF
        model = self._model([MamdaniRule((0,), 0, 1.0)])
        result = mamdani_infer(model, [1.0])
        assert not result.fired
        assert result.output == pytest.approx(0.5)

    def test_two_symmetric_consequents_balance(self):
        output = [TriangleMF(0.1, 0.2, 0.3), TriangleMF(0.7, 0.8, 0.9)]
        rules = [MamdaniRule((1,), 0, 1.0), MamdaniRule((1,), 1, 1.0)]
        model = self._model(rules, output_mfs=output)
        result = mamdani_infer(model, [0.5])
        assert result.output == pytest.approx(0.5, abs=1e-3)

    def test_output_stays_in_range(self):
        rng = np.random.default_rng(4)
        inputs = [LinguisticVariable.uniform(f"x{i}", 0.0, 1.0, 3) for i in range(2)]
        output = LinguisticVariable.uniform("y", 0.0, 1.0, 3, shape="triangle")
        rules = [
            MamdaniRule(ant, int(rng.integers(0, 3)), float(rng.uniform(0.2, 1)))
            for ant in grid_partition(inputs)
        ]
        model = MamdaniModel(inputs=inputs, output=output, rules=rules)
        for _ in range(300):
            result = model.infer(rng.uniform(0, 1, size=2))
            assert 0.0 <= result.output <= 1.0

    def test_batch_matches_single(self):
        rng = np.random.default_rng(5)
        inputs = [LinguisticVariable.uniform(f"x{i}", 0.0, 1.0, 3, shape="triangle") for i in range(2)]
        output = LinguisticVariable.uniform("y", 0.0, 1.0, 3, shape="triangle")
        rules = [
            MamdaniRule(ant, int(rng.integers(0, 3)), float(rng.uniform(0.2, 1)))
            for ant in grid_partition(inputs)
        ]
        model = MamdaniModel(inputs=inputs, output=output, rules=rules)
        X = rng.uniform(0, 1, size=(50, 2))
        batch, fired = model.infer_batch(X)
        for i in range(X.shape[0]):
            single = model.infer(X[i])
            assert fired[i] == single.fired
            assert batch[i] == pytest.approx(single.output, abs=1e-12)

    def test_model_json_roundtrip(self):
        inputs = [LinguisticVariable.uniform("x", 0.0, 1.0, 2, shape="gaussian")]
        output = LinguisticVariable.uniform("y", 0.0, 1.0, 2, shape="triangle")
        rules = [MamdaniRule((0,), 1, 0.5), MamdaniRule((1,), 0, 0.25)]
        model = MamdaniModel(inputs=inputs, output=output, rules=rules)
        back = MamdaniModel.from_dict(json.loads(json.dumps(model.to_dict())))
        assert back.rules == model.rules
        x = [0.3]
        assert back.infer(x).output == model.infer(x).output
