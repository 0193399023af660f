"""Experiment harness: atoms, probes, adapted plans, resolution comparison."""

import warnings

import numpy as np
import pytest

from hankellab.dyadic import make_partition
from hankellab.grid import Grid, GridFunction, integrate, norm
from hankellab.report import EstimateReport, FAIL, INCONCLUSIVE, PASS
from hankellab.specfun import MultiIndex
from hankellab.symbols import constant_symbol, laplace_type_symbol
from hankellab.verify import (Atom, adapted_plan, association_check,
                              check_atom, compare_resolutions,
                              default_atom_family, default_cz_pairs,
                              lp_norm_probe, make_atom, make_battery,
                              weak11_probe)

from conftest import gaussian_bump


class TestAtoms:
    def test_atom_satisfies_all_three_conditions(self):
        grid = Grid.build(MultiIndex((0.5,)), R=12.0, n=768)
        atom = make_atom(grid, [4.0], 1.0)
        assert check_atom(atom)

    def test_atom_mean_zero(self):
        grid = Grid.build(MultiIndex((0.5,)), R=12.0, n=768)
        atom = make_atom(grid, [4.0], 1.0)
        sup = norm(atom.values, np.inf)
        assert abs(complex(integrate(atom.values)).real) <= \
            1e-10 * sup * atom.ball_measure

    def test_atom_sup_bound(self):
        grid = Grid.build(MultiIndex((0.5,)), R=12.0, n=768)
        atom = make_atom(grid, [4.0], 1.0)
        assert norm(atom.values, np.inf) <= (1 + 1e-12) / atom.ball_measure

    def test_broken_atom_rejected(self):
        grid = Grid.build(MultiIndex((0.5,)), R=12.0, n=768)
        atom = make_atom(grid, [4.0], 1.0)
        # shift the values so the mean is visibly nonzero
        bad = Atom(GridFunction(grid, atom.values.values + 1e-3),
                   atom.center, atom.radius, atom.ball_measure)
        with pytest.raises(ValueError):
            check_atom(bad)

    def test_unresolvable_radius_rejected(self):
        grid = Grid.build(MultiIndex((0.5,)), R=12.0, n=128)
        with pytest.raises(ValueError):
            make_atom(grid, [6.0], 1e-7)

    def test_default_family_is_covariant(self):
        fam = default_atom_family()
        assert len(fam) == 24
        ratios = sorted({y0 / r for y0, r in fam})
        assert ratios == pytest.approx([1.2, 5.0, 20.0])


class TestAdaptedPlans:
    def test_node_budget_clipped(self):
        pl = adapted_plan(MultiIndex((0.5,)), R=10.0, Lam=2.0, n_min=256,
                          n_max=512)
        assert pl.grid.axes[0].n >= 256
        pl2 = adapted_plan(MultiIndex((0.5,)), R=1000.0, Lam=50.0, n_max=512)
        assert pl2.grid.axes[0].n <= 512 + 16  # panel rounding slack

    def test_default_pairs_span_decades(self):
        pairs = default_cz_pairs()
        seps = [float(np.linalg.norm(b - a)) for a, b in pairs]
        assert max(seps) / min(seps) > 100.0


class TestProbes:
    def test_battery_is_deterministic(self, plan_half):
        a = make_battery(plan_half, count=4, seed=9)
        b = make_battery(plan_half, count=4, seed=9)
        for fa, fb in zip(a, b):
            assert np.array_equal(fa.values, fb.values)

    def test_lp_probe_respects_plancherel_budget(self, plan_half):
        m = laplace_type_symbol(1, "imag_power", gamma=1.0)
        battery = make_battery(plan_half, count=12)
        rep = lp_norm_probe(plan_half, m, 2.0, battery=battery)
        assert rep.verdict == PASS
        assert rep.fitted_constants["max_ratio"] <= m.sup_norm * (1 + 1e-6)

    def test_lp_probe_rejects_bad_p(self, plan_half):
        with pytest.raises(ValueError):
            lp_norm_probe(plan_half, constant_symbol(1, 1.0), 1.0)

    def test_lp_probe_declared_bound_enforced(self, plan_half):
        battery = make_battery(plan_half, count=6)
        rep = lp_norm_probe(plan_half, constant_symbol(1, 1.0), 2.0,
                            battery=battery, bound=1e-6)
        assert rep.verdict == FAIL

    def test_weak11_probe_stable_for_identity(self, plan_half):
        rep = weak11_probe(plan_half, constant_symbol(1, 1.0),
                           centers=[2.0, 5.0], n_levels=16)
        assert rep.verdict == PASS


class TestAssociation:
    def test_spectral_route_matches_kernel_integral(self, plan_half):
        m = laplace_type_symbol(1, "imag_power", gamma=1.0)
        f = gaussian_bump(plan_half.grid, 3.0, 0.5)
        rep = association_check(plan_half, m, f, x_samples=[[8.0], [11.0]],
                                tol=1e-3)
        assert rep.verdict == PASS


class TestCompareResolutions:
    def _rep(self, c, verdict=PASS):
        r = EstimateReport(name="demo")
        r.fitted_constants["C"] = c
        r.verdict = verdict
        return r

    def test_small_drift_keeps_verdict(self):
        merged = compare_resolutions(self._rep(1.00), self._rep(1.05))
        assert merged.verdict == PASS

    def test_large_drift_downgrades(self):
        merged = compare_resolutions(self._rep(1.0), self._rep(2.0))
        assert merged.verdict == INCONCLUSIVE

    def test_verdict_disagreement_downgrades(self):
        merged = compare_resolutions(self._rep(1.0), self._rep(1.0, FAIL))
        assert merged.verdict == INCONCLUSIVE
