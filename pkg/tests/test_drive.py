import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from floquet_pt.drive import (
    DriveProtocol,
    Regime,
    SegmentParams,
    ValidationError,
    derived_quantities,
    segment_propagator,
    spectrum,
    validate,
)
from floquet_pt.su2 import expm_series

from conftest import protocols


def test_fig1_protocol_is_valid():
    p = validate(DriveProtocol.from_values(1, 1, 0.2, 0, math.pi, math.pi))
    assert p.omega == pytest.approx(1.0)
    assert not p.is_static


@pytest.mark.parametrize("t1", [0.0, -1.0])
def test_nonpositive_duration_names_segment(t1):
    with pytest.raises(ValidationError, match="seg1"):
        DriveProtocol.from_values(1, 1, 0, 0, 1.0, t1)


@pytest.mark.parametrize("bad", [math.nan, math.inf, "1"])
def test_non_finite_parameter_rejected(bad):
    with pytest.raises(ValidationError, match="seg0"):
        DriveProtocol(SegmentParams(bad, 0, 1), SegmentParams(1, 0, 1))


def test_static_flag():
    assert DriveProtocol.from_values(1, 1, 0.3, 0.3, 0.7, 1.1).is_static


def test_from_omega_validation():
    with pytest.raises(ValidationError):
        DriveProtocol.from_omega(1, 1, 0, 0, -1.0, 0.5)
    with pytest.raises(ValidationError):
        DriveProtocol.from_omega(1, 1, 0, 0, 1.0, 1.0)


@pytest.mark.parametrize(
    "delta, gamma, h2, regime",
    [
        (1.0, 0.0, 0.25, Regime.RealSpectrum),
        (0.2, 1.0, -0.24, Regime.ImaginarySpectrum),
        (0.5, 0.5, 0.0, Regime.ExceptionalStatic),
    ],
)
def test_spectrum(delta, gamma, h2, regime):
    s = spectrum(SegmentParams(delta, gamma, 1.0))
    assert s.h_squared == pytest.approx(h2, abs=1e-15)
    assert s.regime is regime


def test_real_spectrum_energies():
    e_plus, e_minus = spectrum(SegmentParams(1.0, 0.6, 1.0)).energies
    assert e_plus == pytest.approx(0.4) and e_minus == pytest.approx(-0.4)


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_regime_flips_under_exchange(delta, gamma):
    a = spectrum(SegmentParams(delta, gamma, 1.0)).regime
    b = spectrum(SegmentParams(gamma, delta, 1.0)).regime
    flip = {
        Regime.RealSpectrum: Regime.ImaginarySpectrum,
        Regime.ImaginarySpectrum: Regime.RealSpectrum,
        Regime.ExceptionalStatic: Regime.ExceptionalStatic,
    }
    assert b is flip[a]


def test_segment_propagator_examples():
    u = segment_propagator(SegmentParams(1.0, 0.0, math.pi)).to_array()
    assert np.allclose(u, [[0, -1j], [-1j, 0]], rtol=0, atol=1e-15)

    u = segment_propagator(SegmentParams(0.0, 0.4, 1.0)).to_array()
    assert np.allclose(u, np.diag([math.exp(0.2), math.exp(-0.2)]), rtol=1e-14, atol=0)

    s = SegmentParams(1.0, 0.2, math.pi)
    v = expm_series(s.hamiltonian.scale(-1j * s.duration))
    assert np.abs(segment_propagator(s).to_array() - v.to_array()).max() < 1e-11


def test_derived_quantities():
    T, omega, d_eff, g_eff = derived_quantities(DriveProtocol.from_values(1, 0, 0, 0, 2.0, 2.0))
    assert (T, d_eff) == (4.0, 0.5)
    assert omega == pytest.approx(math.pi / 2)
    assert DriveProtocol.from_values(1, 1, 0, 0, 0.3, 2.9).delta_eff == pytest.approx(1.0, abs=1e-15)
    assert DriveProtocol.from_values(1, 1, 0.4, -0.4, 1.5, 1.5).gamma_eff == 0.0


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 5), st.floats(0.05, 5))
def test_effective_values_reproduce_constant_parameters(delta, gamma, t0, t1):
    p = DriveProtocol.from_values(delta, delta, gamma, gamma, t0, t1)
    assert p.delta_eff == pytest.approx(delta, rel=1e-14, abs=1e-15)
    assert p.gamma_eff == pytest.approx(gamma, rel=1e-14, abs=1e-15)


@given(protocols())
def test_effective_values_swap_invariant(p):
    q = p.swapped()
    assert q.delta_eff == pytest.approx(p.delta_eff, rel=1e-14, abs=1e-14)
    assert q.gamma_eff == pytest.approx(p.gamma_eff, rel=1e-14, abs=1e-14)


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.05, 5), st.floats(0.05, 5))
def test_static_square_wave_reduces_to_static_evolution(delta, gamma, t0, t1):
    p = DriveProtocol.from_values(delta, delta, gamma, gamma, t0, t1)
    u = (segment_propagator(p.seg1) @ segment_propagator(p.seg0)).to_array()
    v = expm_series(p.seg0.hamiltonian.scale(-1j * p.period)).to_array()
    assert np.abs(u - v).max() <= 1e-10 * max(1.0, np.abs(v).max())
