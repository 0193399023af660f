"""Dyadic partition of unity: support, telescoping, smoothness."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hankellab.dyadic import make_partition, smooth_chi, smoothstep


class TestSmoothstep:
    def test_endpoints_and_monotonicity(self):
        t = np.linspace(-1.0, 2.0, 400)
        v = smoothstep(t)
        assert np.all(v[t <= 0] == 0.0)
        assert np.all(v[t >= 1] == 1.0)
        assert np.all(np.diff(v) >= -1e-15)

    def test_chi_plateau(self):
        r = np.array([0.0, 0.5, 1.0, 1.5, 2.0, 3.0])
        v = smooth_chi(r)
        assert v[0] == 1.0 and v[1] == 1.0 and v[2] == 1.0
        assert v[4] == 0.0 and v[5] == 0.0
        assert 0.0 < v[3] < 1.0


class TestPartition:
    @pytest.mark.parametrize("variant", ["plain", "squared"])
    def test_support_annulus(self, variant):
        psi = make_partition(variant)
        r = np.geomspace(1e-3, 1e3, 2001)
        v = psi.radial(r)
        assert np.all(v[(r < 0.5) | (r > 2.0)] == 0.0)
        assert np.all(v >= 0.0)
        assert np.max(v) > 0.5

    def test_plain_telescopes_to_one(self):
        psi = make_partition("plain")
        r = np.geomspace(2.0**-6, 2.0**6, 5001)
        s = psi.sum_over(-10, 10, r)
        assert np.max(np.abs(s - 1.0)) < 1e-14

    def test_squared_telescopes_to_one(self):
        psi = make_partition("squared")
        r = np.geomspace(2.0**-6, 2.0**6, 5001)
        s = psi.sum_over(-10, 10, r)
        assert np.max(np.abs(s - 1.0)) < 1e-14

    def test_dilated_is_rescaled(self):
        psi = make_partition("plain")
        u = np.array([[0.9], [1.7]])
        assert np.allclose(psi.dilated(2, u), psi(u / 4.0))

    def test_vector_argument_is_radial(self):
        psi = make_partition("plain")
        u = np.array([0.6, 0.8])  # |u| = 1.0
        assert float(psi(u)) == pytest.approx(float(psi.radial(np.array([1.0]))[0]))

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            make_partition("cubed")

    @given(logr=st.floats(-12.0, 12.0))
    @settings(max_examples=80, deadline=None)
    def test_pointwise_partition_property(self, logr):
        r = float(2.0**logr)
        plain = make_partition("plain").sum_over(-25, 25, np.array([r]))[0]
        sq = make_partition("squared").sum_over(-25, 25, np.array([r]))[0]
        assert plain == pytest.approx(1.0, abs=1e-12)
        assert sq == pytest.approx(1.0, abs=1e-12)
