import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floquet_pt.analysis import (
    Axis,
    Boundary,
    BracketError,
    PhotonKind,
    SweepGrid,
    find_ep,
    hf_boundary,
    hf_effective_hamiltonian,
    hf_pi_approx,
    predict_resonances,
    row_profile,
    scan_brackets,
    sweep,
)
from floquet_pt.drive import DriveProtocol
from floquet_pt.engine import Phase, classify, effective_hamiltonian, pi_closed_form, quasi_energies
from floquet_pt.presets import PRESETS

from conftest import fig1, protocols


def test_resonances_fig1():
    res = predict_resonances(fig1(), 6)
    assert [r.k for r in res] == [1, 2, 3, 4, 5, 6]
    assert [r.omega_resonant for r in res] == pytest.approx([1 / k for k in range(1, 7)])
    assert all(r.breaking_expected for r in res)
    assert res[1].kind is PhotonKind.EvenPhoton and res[1].reason == "gamma-imbalance"


def test_even_resonances_suppressed_when_balanced():
    p = DriveProtocol.from_omega(1, 1, 0.2, -0.2, 1.0, 0.5)
    res = predict_resonances(p, 4)
    assert [r.breaking_expected for r in res] == [True, False, True, False]
    assert res[1].reason == "balanced"


def test_duration_imbalance_reason():
    p = DriveProtocol.from_omega(1, 1, 0.2, -0.2, 1.0, 0.55)
    assert predict_resonances(p, 2)[1].reason == "duration-imbalance"
    p = DriveProtocol.from_omega(1, 1, 0.2, 0.0, 1.0, 0.55)
    assert predict_resonances(p, 2)[1].reason == "gamma-and-duration-imbalance"


def test_resonances_use_modulus_of_delta_eff():
    p = DriveProtocol.from_omega(-1, -0.5, 0, 0, 1.0, 0.5)
    assert predict_resonances(p, 1)[0].omega_resonant == pytest.approx(0.75)


def test_resonances_vanishing_coupling_warns():
    p = DriveProtocol.from_omega(1, -1, 0.1, 0, 1.0, 0.5)
    with pytest.warns(UserWarning):
        assert predict_resonances(p, 3) == []
    with pytest.raises(ValueError):
        predict_resonances(fig1(), 0)


def test_resonance_sits_at_minus_one_without_dissipation():
    p = DriveProtocol.from_omega(1, 1, 0, 0, 1 / 3, 0.5)
    assert pi_closed_form(p) == pytest.approx(-1.0, abs=1e-12)


def test_hf_pi_matches_small_period():
    p = DriveProtocol.from_omega(1, 1, 0.5, 0.2, 200.0, 0.4)
    exact = pi_closed_form(p)
    assert exact - 1 == pytest.approx(hf_pi_approx(p) - 1, rel=1e-3)


def test_hf_boundary_rule():
    b = hf_boundary(DriveProtocol.from_omega(1, 1, 0.5, 0.2, 50.0, 0.4))
    assert b.gamma_eff_boundary == (-1.0, 1.0)
    assert b.predicted_phase() is Phase.PTSymmetric
    assert hf_boundary(DriveProtocol.from_omega(1, 1, 3, 0.2, 50.0, 0.4)).predicted_phase() is Phase.BrokenN0
    assert hf_boundary(DriveProtocol.from_omega(1, 1, 1, 1, 50.0, 0.4)).predicted_phase() is Phase.ExceptionalPoint


def test_hf_effective_hamiltonian_approaches_exact():
    p = DriveProtocol.from_omega(1, 0.4, 0.5, -0.3, 200.0, 0.4)
    approx = hf_effective_hamiltonian(p)
    exact = effective_hamiltonian(p)
    for a, b in ((approx.j, exact.j), (approx.gamma_y, exact.gamma_y), (approx.gamma_z, exact.gamma_z)):
        assert abs(a - b) < 2e-3


def test_axis_validation_and_apply():
    with pytest.raises(ValueError):
        Axis.single("omega_bogus")
    with pytest.raises(ValueError):
        Axis("empty", ())
    ax = Axis.linked("gamma", {"gamma0": 1.0, "gamma1": -1.0})
    out = ax.apply({"gamma0": 0, "gamma1": 0, "omega": 2}, 0.3)
    assert out == {"gamma0": 0.3, "gamma1": -0.3, "omega": 2}
    assert Axis.single("omega", 2.0, 0.5).apply({}, 1.0) == {"omega": 2.5}
    assert ax.keys == frozenset({"gamma0", "gamma1"})


def test_find_ep_fig5_ray():
    ray = Axis.single("gamma0").ray(DriveProtocol.from_omega(1, 1, 0, 0, 3.0, 0.4))
    ep = find_ep(ray, Boundary.PlusOne, (2.0, 3.5))
    assert abs(ep.pi_at_root - 1) <= 1e-10
    assert ep.ray_parameter == pytest.approx(2.6903634747813, abs=1e-9)
    # one side symmetric, the other broken
    assert classify(pi_closed_form(ray(ep.ray_parameter - 1e-4))).variant is Phase.PTSymmetric
    assert classify(pi_closed_form(ray(ep.ray_parameter + 1e-4))).variant is Phase.BrokenN0


def test_find_ep_rejects_bad_bracket():
    ray = Axis.single("gamma0").ray(DriveProtocol.from_omega(1, 1, 0, 0, 3.0, 0.4))
    with pytest.raises(BracketError) as err:
        find_ep(ray, Boundary.PlusOne, (0.0, 1.0))
    assert err.value.g_a < 0 and err.value.g_b < 0


def test_find_ep_minus_one_boundary():
    ray = Axis.single("gamma0").ray(fig1(omega=1.05))
    ep = find_ep(ray, Boundary.MinusOne, (0.1, 0.2))
    assert abs(ep.pi_at_root + 1) <= 1e-10
    assert 0.1 < ep.ray_parameter < 0.2


def test_scan_brackets_finds_both_edges_of_lobe():
    ray = Axis.single("omega").ray(fig1(gamma=0.2))
    brackets = scan_brackets(ray, Boundary.MinusOne, 0.8, 1.25, num=50)
    assert len(brackets) == 2
    roots = [find_ep(ray, Boundary.MinusOne, b).ray_parameter for b in brackets]
    assert roots[0] < 1 < roots[1]


def test_scan_brackets_subdivides_fast_oscillation():
    ray = Axis.single("omega").ray(fig1(gamma=0.0))
    coarse = scan_brackets(ray, Boundary.MinusOne, 0.1, 0.5, num=3, max_depth=0)
    fine = scan_brackets(ray, Boundary.MinusOne, 0.1, 0.5, num=3)
    assert len(fine) >= len(coarse)


def small_grid(name="fig1", n=41, **kw):
    pre = PRESETS[name]
    base = DriveProtocol.from_omega(**pre.protocol)
    return SweepGrid(pre.x, (*pre.x_range, n), pre.y, (*pre.y_range, n), base, **kw)


def test_sweep_grid_validation():
    pre = PRESETS["fig1"]
    base = DriveProtocol.from_omega(**pre.protocol)
    with pytest.raises(ValueError):
        SweepGrid(pre.x, (0.8, 1.2, 1), pre.y, (0, 0.5, 10), base)
    with pytest.raises(ValueError):
        SweepGrid(pre.y, (0.8, 1.2, 5), pre.y, (0, 0.5, 10), base)
    with pytest.raises(ValueError):
        SweepGrid(pre.x, (0.8, math.inf, 5), pre.y, (0, 0.5, 10), base)


def test_sweep_matches_pointwise_evaluation():
    grid = small_grid(n=21)
    res = sweep(grid)
    assert len(res) == 21 * 21
    for rec in res:
        p = grid.protocol_at(rec.x, rec.y)
        pi = pi_closed_form(p)
        assert rec.pi_value == pytest.approx(pi, abs=1e-13)
        assert rec.label.variant is classify(pi).variant
        q = quasi_energies(pi, p.omega)
        assert rec.im_quasi == pytest.approx(abs(q.e_plus.imag), abs=1e-12)
        assert rec.re_quasi == pytest.approx(q.e_plus.real, abs=1e-12)


def test_sweep_iteration_order_and_threads():
    grid = small_grid(n=17)
    a = sweep(grid, threads=1)
    b = sweep(grid, threads=5)
    assert np.array_equal(a.pi, b.pi)
    recs = list(a)
    assert (recs[0].x, recs[0].y) == (a.xs[0], a.ys[0])
    assert (recs[1].x, recs[1].y) == (a.xs[1], a.ys[0])


def test_sweep_marks_invalid_points():
    pre = PRESETS["fig1"]
    base = DriveProtocol.from_omega(**pre.protocol)
    grid = SweepGrid(pre.x, (-0.5, 0.5, 5), pre.y, (0, 0.5, 3), base)
    res = sweep(grid)
    recs = list(res)
    assert any(not r.valid for r in recs)
    assert all(r.label is None for r in recs if not r.valid)
    assert res.summary()["invalid_points"] == 9


def test_sweep_fig1_single_lobe():
    res = sweep(small_grid(n=81))
    assert res.lobes(Phase.BrokenN1) == 1
    assert res.lobes(Phase.BrokenN0) == 0


def test_sweep_summary_keys():
    s = sweep(small_grid(n=9)).summary()
    assert s["points"] == 81
    assert set(s["lobes"]) == {"BrokenN0", "BrokenN1"}
    assert len(s["boundary_crossings_per_row"]) == 9


def test_row_profile():
    ray = Axis.single("omega").ray(fig1())
    prof = row_profile(ray, [0.9, 1.0])
    assert prof[1] == pytest.approx(-1.0201067809382698, abs=1e-13)


@settings(max_examples=100, deadline=None)
@given(protocols(), st.floats(-1, 1))
def test_axis_ray_round_trip(p, shift):
    q = Axis.single("gamma1", 2.0, p.seg1.gamma).ray(p)(shift)
    assert q.seg1.gamma == pytest.approx(p.seg1.gamma + 2 * shift, abs=1e-12)
    q = Axis.single("gamma1").ray(p)(p.seg1.gamma + shift)
    assert q.seg1.gamma == pytest.approx(p.seg1.gamma + shift, abs=1e-12)
    assert q.period == pytest.approx(p.period, rel=1e-12)


def test_extracted_hamiltonian_first_order_sigma_y_term():
    # Gamma_y carries the first-order commutator term and halves with the period
    gaps = []
    for omega in (100.0, 200.0, 400.0):
        p = DriveProtocol.from_omega(1, -1, 1, 1, omega, 0.5)
        h = effective_hamiltonian(p)
        t0, t1 = p.seg0.duration, p.seg1.duration
        first_order = (1 * 1 - (-1) * 1) * t0 * t1 / (2 * p.period)
        assert h.gamma_y == pytest.approx(first_order, rel=1e-3)
        gaps.append(h.gamma_y)
    assert gaps[0] / gaps[1] == pytest.approx(2, rel=1e-3)
    assert gaps[1] / gaps[2] == pytest.approx(2, rel=1e-3)


def test_fig5_ep_approaches_hf_boundary_with_frequency():
    gaps = []
    for omega in (3.0, 10.0, 30.0, 100.0):
        ray = Axis.single("gamma0").ray(DriveProtocol.from_omega(1, 1, 0, 0, omega, 0.4))
        (bracket,) = scan_brackets(ray, Boundary.PlusOne, 0.0, 4.0, num=200)
        gaps.append(abs(0.4 * find_ep(ray, Boundary.PlusOne, bracket).ray_parameter - 1))
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[0] > 0.03
    assert gaps[-1] < 1e-4
