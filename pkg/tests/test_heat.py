"""Heat kernel: normalization, symmetry, semigroup law, bounds, maximal op."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankellab.grid import Grid, GridFunction, integrate, norm
from hankellab.heat import (HeatKernelEval, TimeGrid, gaussian_bound_check,
                            heat_apply, heat_kernel, heat_lipschitz_check,
                            heat_lipschitz_pointwise, maximal_function)
from hankellab.specfun import MultiIndex
from hankellab.transform import hankel_transform, inverse_hankel

from conftest import gaussian_bump


@pytest.fixture(scope="module")
def hk_half():
    return HeatKernelEval(MultiIndex((0.5,)))


@pytest.fixture(scope="module")
def grid16():
    return Grid.build(MultiIndex((0.5,)), R=16.0, n=768)


class TestNormalization:
    def test_analytic_candidate_is_half(self, hk_half):
        # the numerically solved constant agrees with the closed form 1/2
        assert hk_half.normalization[0] == pytest.approx(0.5, rel=1e-10)

    @pytest.mark.parametrize("a", [-0.25, 0.0, 1.0, 2.0])
    def test_mass_one_at_sample_centers(self, a, grid16=None):
        hk = HeatKernelEval(MultiIndex((a,)))
        g = Grid.build(MultiIndex((a,)), R=24.0, n=768)
        x = g.axes[0].nodes
        for y in (0.2, 0.7, 1.3, 2.5, 4.0, 6.5):
            for t in (0.25, 1.0, 2.0):
                mass = float(np.sum(
                    heat_kernel(hk, t, x[:, None], np.array([y])) *
                    g.axes[0].quad_weights))
                assert mass == pytest.approx(1.0, abs=1e-7)

    def test_timezero_rejected(self, hk_half):
        with pytest.raises(ValueError):
            heat_kernel(hk_half, 0.0, np.array([1.0]), np.array([1.0]))


class TestKernelStructure:
    def test_symmetry_in_x_y(self, hk_half):
        for t in (0.3, 1.7):
            a = float(heat_kernel(hk_half, t, np.array([1.2]), np.array([3.4])))
            b = float(heat_kernel(hk_half, t, np.array([3.4]), np.array([1.2])))
            assert a == pytest.approx(b, rel=1e-13)

    def test_positivity(self, hk_half):
        rng = np.random.default_rng(3)
        for _ in range(200):
            t = float(np.exp(rng.uniform(-4, 4)))
            x = rng.uniform(0.01, 10.0, 1)
            y = rng.uniform(0.01, 10.0, 1)
            assert float(heat_kernel(hk_half, t, x, y)) > 0.0

    def test_product_over_axes(self):
        hk2 = HeatKernelEval(MultiIndex((0.5, 1.5)))
        hka = HeatKernelEval(MultiIndex((0.5,)))
        hkb = HeatKernelEval(MultiIndex((1.5,)))
        x, y = np.array([1.0, 2.0]), np.array([0.7, 2.5])
        got = float(heat_kernel(hk2, 0.8, x, y))
        want = (float(heat_kernel(hka, 0.8, x[:1], y[:1])) *
                float(heat_kernel(hkb, 0.8, x[1:], y[1:])))
        assert got == pytest.approx(want, rel=1e-12)

    def test_no_overflow_small_time(self, hk_half):
        v = float(heat_kernel(hk_half, 1e-8, np.array([5.0]), np.array([5.0])))
        assert np.isfinite(v) and v > 0


class TestSemigroup:
    def test_composition(self, hk_half, grid16):
        f = gaussian_bump(grid16, 5.0, 1.0)
        one = heat_apply(hk_half, 1.5, f)
        two = heat_apply(hk_half, 1.0, heat_apply(hk_half, 0.5, f))
        assert norm(one - two, np.inf) <= 1e-8 * norm(one, np.inf)

    def test_matches_spectral_multiplier(self, hk_half, plan_half):
        # kernel route against H(e^{-t lambda^2} Hf) on a compact interior
        f = gaussian_bump(plan_half.grid, 5.0, 1.0)
        spec = hankel_transform(plan_half, f)
        lam = plan_half.dual_grid.axes[0].nodes
        x = plan_half.grid.axes[0].nodes
        for t in (0.25, 1.0):
            kern = heat_apply(hk_half, t, f).values
            spect = inverse_hankel(plan_half, GridFunction(
                plan_half.dual_grid, np.exp(-t * lam**2) * spec.values)).values
            interior = x < 16.0 - 6.0 * np.sqrt(t)
            assert np.max(np.abs((kern - spect)[interior])) <= 1e-6

    def test_contraction_in_l1(self, hk_half, grid16):
        f = gaussian_bump(grid16, 5.0, 1.0)
        assert norm(heat_apply(hk_half, 1.0, f), 1.0) <= norm(f, 1.0) * (1 + 1e-10)


class TestBounds:
    def test_gaussian_bound_and_regime_bands(self, hk_half):
        rng = np.random.default_rng(11)
        samples = [(float(np.exp(rng.uniform(-2, 2))),
                    rng.uniform(0.3, 5.0, 1), rng.uniform(0.3, 5.0, 1))
                   for _ in range(80)]
        rep = gaussian_bound_check(hk_half, samples, band_tol=10.0)
        assert rep.verdict == "pass"
        assert rep.fitted_constants["min_kernel_value"] >= 0.0

    def test_lipschitz_band(self, hk_half):
        grid = Grid.build(MultiIndex((0.5,)), R=24.0, n=512)
        pairs = [([2.0], [2.0 + s]) for s in np.geomspace(1e-1, 1e-4, 7)]
        rep = heat_lipschitz_check(hk_half, grid, pairs, band_factor=2.0)
        assert rep.verdict == "pass"

    def test_lipschitz_pointwise_finite(self, hk_half):
        rng = np.random.default_rng(5)
        samples = [(1.0, rng.uniform(0.5, 4.0, 1), np.array([2.0]),
                    np.array([2.0 + s]))
                   for s in np.geomspace(1e-1, 1e-3, 5)]
        C = heat_lipschitz_pointwise(hk_half, samples, delta=1.0)
        assert np.isfinite(C) and C > 0


class TestMaximalFunction:
    def test_routes_agree(self, hk_half, plan_half):
        f = gaussian_bump(plan_half.grid, 5.0, 1.0)
        tg = TimeGrid(np.geomspace(0.1, 10.0, 12))
        kern = maximal_function(hk_half, tg, f)
        spec = maximal_function(hk_half, tg, f, plan=plan_half)
        x = plan_half.grid.axes[0].nodes
        interior = x < 10.0
        dev = np.max(np.abs((kern.values - spec.values)[interior]))
        assert dev <= 1e-6 * norm(kern, np.inf)

    def test_dominates_single_time(self, hk_half, plan_half):
        f = gaussian_bump(plan_half.grid, 5.0, 1.0)
        tg = TimeGrid(np.geomspace(0.1, 10.0, 12))
        m = maximal_function(hk_half, tg, f)
        one = heat_apply(hk_half, float(tg.t_values[5]), f)
        assert np.all(m.values + 1e-12 >= np.abs(one.values))

    def test_timegrid_validation(self):
        with pytest.raises(ValueError):
            TimeGrid(np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            TimeGrid(np.array([-1.0, 1.0]))


@given(t=st.floats(0.1, 10.0), y=st.floats(0.5, 6.0))
@settings(max_examples=20, deadline=None)
def test_mass_one_property(t, y):
    hk = HeatKernelEval(MultiIndex((0.5,)), normalization=(0.5,))
    g = Grid.build(MultiIndex((0.5,)), R=40.0, n=512)
    x = g.axes[0].nodes
    mass = float(np.sum(heat_kernel(hk, t, x[:, None], np.array([y])) *
                        g.axes[0].quad_weights))
    assert mass == pytest.approx(1.0, abs=1e-6)
