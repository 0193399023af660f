"""Symbol families and the config mini-language."""

import numpy as np
import pytest

from hankellab.symbols import (Symbol, bump_symbol, divergent_symbol,
                               heat_symbol, laplace_type_symbol,
                               oscillatory_symbol, parse_symbol)

import mpmath

mpmath.mp.dps = 25


class TestFamilies:
    def test_const_phi_is_indicator(self):
        n = laplace_type_symbol(1, "const")
        u = np.array([[0.5], [2.0], [7.0]])
        assert np.allclose(n(u), 1.0)

    def test_imag_power_modulus(self):
        # |Gamma(1+i gamma) s^{-i gamma}| = |Gamma(1+i gamma)| on s > 0
        g = 1.0
        n = laplace_type_symbol(1, "imag_power", gamma=g)
        want = float(abs(mpmath.gamma(1 + 1j * g)))
        u = np.array([[0.3], [1.0], [42.0]])
        assert np.allclose(np.abs(n(u)), want, rtol=1e-12)
        assert n.sup_norm == pytest.approx(want, rel=1e-12)

    def test_imag_power_oracle_value(self):
        # n(s) = Gamma(1+i) s^{-i} against mpmath at s = 2
        n = laplace_type_symbol(1, "imag_power", gamma=1.0)
        got = complex(n(np.array([[2.0]]))[0])
        want = complex(mpmath.gamma(1 + 1j) * mpmath.mpf(2) ** (-1j))
        assert got == pytest.approx(want, rel=1e-12)

    def test_bump_support(self):
        n = bump_symbol(1)
        assert n.support_annulus == (0.5, 2.0)
        assert abs(n(np.array([[3.0]]))[0]) == 0.0

    def test_oscillatory_reduces_to_bump_modulus(self):
        n = oscillatory_symbol(1, 8)
        b = bump_symbol(1)
        u = np.array([[0.7], [1.3]])
        assert np.allclose(np.abs(n(u)), np.abs(b(u)))

    def test_divergent_bounded(self):
        n = divergent_symbol(1)
        u = np.geomspace(1e-6, 20.0, 200).reshape(-1, 1)
        assert np.max(np.abs(n(u))) <= 1.0 + 1e-12

    def test_heat_symbol(self):
        n = heat_symbol(1, t=2.0)
        assert complex(n(np.array([[3.0]]))[0]) == pytest.approx(np.exp(-6.0))

    def test_sup_norm_guard_trips(self):
        lying = Symbol(lambda u: 2.0 * np.ones(np.asarray(u).shape[:-1]),
                       1, sup_norm=1.0)
        with pytest.raises(RuntimeError):
            lying(np.array([[1.0]]))

    def test_dimension_guard(self):
        n = bump_symbol(2)
        with pytest.raises(ValueError):
            n(np.array([[1.0]]))


class TestMiniLanguage:
    @pytest.mark.parametrize("spec_str,name", [
        ("bump", "bump"),
        ("laplace_type{phi=const}", "laplace_type{phi=const}"),
        ("laplace_type{phi=imag_power:gamma=2.0}",
         "laplace_type{phi=imag_power:gamma=2.0}"),
        ("oscillatory{k=4}", "oscillatory{k=4.0}"),
        ("divergent", "divergent"),
        ("heat{t=0.5}", "heat{t=0.5}"),
        ("const{value=3.0}", "const{3.0}"),
    ])
    def test_parse_families(self, spec_str, name):
        n = parse_symbol(spec_str, 1)
        assert n.name == name
        assert n.d == 1

    def test_parse_potential_family(self):
        n = parse_symbol("potential{s=2.0,h=bump}", 1)
        vals = n(np.linspace(-4, 4, 64).reshape(-1, 1))
        assert np.all(np.isfinite(vals))

    @pytest.mark.parametrize("bad", ["", "nope", "oscillatory{}",
                                     "bump}{", "laplace_type{phi=cubic}"])
    def test_parse_rejects(self, bad):
        with pytest.raises((ValueError, KeyError)):
            parse_symbol(bad, 1)

    def test_tabulated_roundtrip(self, tmp_path):
        u = np.linspace(-2, 2, 41)
        vals = np.exp(-u * u)
        path = tmp_path / "tab.csv"
        rows = ["u1,re_n,im_n"] + [f"{x},{v},0.0" for x, v in zip(u, vals)]
        path.write_text("\n".join(rows) + "\n")
        n = parse_symbol(f"tabulated{{path={path}}}", 1)
        probe = np.array([[0.0], [1.0], [3.0]])
        got = n(probe)
        assert abs(got[0] - 1.0) < 1e-12      # on a table node
        assert abs(got[2]) == 0.0             # outside the table
