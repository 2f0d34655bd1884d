"""One-period propagator, phase classification and the effective Hamiltonian.

The central scalar is ``Pi = Re tr(U_1 U_0) / 2``. ``|Pi| < 1`` means real
quasi-energies (PT-symmetric), ``Pi > 1`` a broken phase with branch index
``n = 0`` and ``Pi < -1`` a broken phase with ``n = 1`` whose quasi-energies
sit at ``omega/2``. Quasi-energies are reported on the principal branch only;
every ``E + l*omega`` with integer ``l`` describes the same Floquet state.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .drive import DriveProtocol, segment_propagator
from .su2 import (
    Mat2,
    cos_even,
    cos_even_array,
    det,
    sinc_even,
    sinc_even_array,
    trace,
)

EP_TOL = 1e-9
SINC_FLOOR = 1e-6


class ConsistencyError(RuntimeError):
    """Two independent evaluations of the same quantity disagree."""


class Phase(enum.Enum):
    PTSymmetric = "PTSymmetric"
    BrokenN0 = "BrokenN0"
    BrokenN1 = "BrokenN1"
    ExceptionalPoint = "ExceptionalPoint"

    @property
    def code(self) -> int:
        return _PHASE_CODES[self]


_PHASE_CODES = {
    Phase.PTSymmetric: 0,
    Phase.BrokenN0: 1,
    Phase.BrokenN1: 2,
    Phase.ExceptionalPoint: 3,
}
PHASE_BY_CODE = {v: k for k, v in _PHASE_CODES.items()}


@dataclass(frozen=True)
class MonodromyResult:
    u_eff: Mat2
    pi_value: float
    trace_imag_residual: float


@dataclass(frozen=True)
class PhaseLabel:
    variant: Phase
    n: int
    margin: float

    @property
    def broken(self) -> bool:
        return self.variant in (Phase.BrokenN0, Phase.BrokenN1)


@dataclass(frozen=True)
class QuasiEnergies:
    """Principal-branch quasi-energies ``E+-  = +-h + n*omega/2``.

    Quasi-energies are only defined modulo ``omega``: every ``E + l*omega``
    labels the same Floquet state. The copy index ``l`` is fixed to zero here.
    """

    e_plus: complex
    e_minus: complex
    h_value: complex
    label: PhaseLabel


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """``H_eff = J/2 sx + i (Gy/2 sy + Gz/2 sz) + n*omega/2 I``."""

    j: float
    gamma_y: float
    gamma_z: float
    n: int
    well_conditioned: bool
    omega: float
    ht_squared: float = 0.0

    def as_matrix(self) -> Mat2:
        return Mat2(
            self.n * self.omega / 2 + 0j,
            self.j / 2 + 0j,
            0.5j * self.gamma_y,
            0.5j * self.gamma_z,
        )

    @property
    def h_squared_times_4(self) -> float:
        """``J^2 - Gy^2 - Gz^2``, which equals ``(2h)^2``."""
        return self.j**2 - self.gamma_y**2 - self.gamma_z**2


def pi_closed_form(p: DriveProtocol) -> float:
    s0, s1 = p.seg0, p.seg1
    q0 = s0.h_squared * s0.duration**2
    q1 = s1.h_squared * s1.duration**2
    return cos_even(q1) * cos_even(q0) + 0.25 * (s1.gamma * s0.gamma - s1.delta * s0.delta) * (
        s1.duration * s0.duration
    ) * sinc_even(q1) * sinc_even(q0)


def pi_closed_form_arrays(delta0, delta1, gamma0, gamma1, t0, t1) -> np.ndarray:
    """Vectorised ``Pi`` over broadcastable parameter arrays."""
    delta0, delta1, gamma0, gamma1, t0, t1 = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (delta0, delta1, gamma0, gamma1, t0, t1))
    )
    q0 = (delta0**2 - gamma0**2) / 4 * t0**2
    q1 = (delta1**2 - gamma1**2) / 4 * t1**2
    with np.errstate(over="ignore", invalid="ignore"):
        return cos_even_array(q1) * cos_even_array(q0) + 0.25 * (
            gamma1 * gamma0 - delta1 * delta0
        ) * t1 * t0 * sinc_even_array(q1) * sinc_even_array(q0)


def monodromy(p: DriveProtocol, check: bool = True) -> MonodromyResult:
    """``U_eff = U_1(T_1) U_0(T_0)`` together with ``Pi``.

    With ``check`` the trace route is compared against :func:`pi_closed_form`.
    """
    u = segment_propagator(p.seg1) @ segment_propagator(p.seg0)
    tr = trace(u)
    pi_value = tr.real / 2
    residual = abs(tr.imag)
    if check:
        scale = max(1.0, abs(pi_value))
        if residual >= 1e-10 * scale:
            raise ConsistencyError(f"Im tr U_eff = {tr.imag:.3e} should vanish")
        closed = pi_closed_form(p)
        if abs(closed - pi_value) > 1e-11 * scale:
            raise ConsistencyError(f"trace Pi {pi_value!r} != closed-form Pi {closed!r}")
        if abs(det(u) - 1) > 1e-10 * scale**2:
            raise ConsistencyError(f"det U_eff = {det(u)!r} should be 1")
    return MonodromyResult(u, pi_value, residual)


def classify(pi_value: float, ep_tol: float = EP_TOL) -> PhaseLabel:
    if not math.isfinite(pi_value):
        raise ValueError(f"cannot classify non-finite Pi={pi_value!r}")
    if ep_tol <= 0:
        raise ValueError("ep_tol must be positive")
    margin = abs(pi_value) - 1.0
    if abs(margin) <= ep_tol:
        return PhaseLabel(Phase.ExceptionalPoint, 0 if pi_value > 0 else 1, margin)
    if pi_value > 1:
        return PhaseLabel(Phase.BrokenN0, 0, margin)
    if pi_value < -1:
        return PhaseLabel(Phase.BrokenN1, 1, margin)
    return PhaseLabel(Phase.PTSymmetric, 0, margin)


def classify_array(pi: np.ndarray, ep_tol: float = EP_TOL) -> np.ndarray:
    """Phase codes (see :attr:`Phase.code`); ``-1`` marks non-finite ``Pi``."""
    pi = np.asarray(pi, dtype=float)
    margin = np.abs(pi) - 1.0
    codes = np.select(
        [~np.isfinite(pi), np.abs(margin) <= ep_tol, pi > 1, pi < -1],
        [-1, Phase.ExceptionalPoint.code, Phase.BrokenN0.code, Phase.BrokenN1.code],
        default=Phase.PTSymmetric.code,
    )
    return codes.astype(np.int8)


def quasi_energies(pi_value: float, omega: float, ep_tol: float = EP_TOL) -> QuasiEnergies:
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    period = 2 * math.pi / omega
    label = classify(pi_value, ep_tol)
    if label.variant is Phase.PTSymmetric:
        h = complex(math.acos(pi_value) / period)
    elif label.variant is Phase.BrokenN0:
        h = 1j * math.acosh(pi_value) / period
    elif label.variant is Phase.BrokenN1:
        h = 1j * math.acosh(-pi_value) / period
    else:
        h = 0j
    offset = label.n * omega / 2
    return QuasiEnergies(h + offset, -h + offset, h, label)


def quasi_energies_array(pi: np.ndarray, omega, ep_tol: float = EP_TOL):
    """Vectorised ``(Re E+, Im E+)`` on the principal branch."""
    pi = np.asarray(pi, dtype=float)
    omega = np.broadcast_to(np.asarray(omega, dtype=float), pi.shape)
    period = 2 * np.pi / omega
    codes = classify_array(pi, ep_tol)
    with np.errstate(invalid="ignore"):
        re_h = np.where(codes == Phase.PTSymmetric.code, np.arccos(np.clip(pi, -1, 1)) / period, 0.0)
        im_h = np.where(
            (codes == Phase.BrokenN0.code) | (codes == Phase.BrokenN1.code),
            np.arccosh(np.maximum(np.abs(pi), 1.0)) / period,
            0.0,
        )
    n = (codes == Phase.BrokenN1.code) | ((codes == Phase.ExceptionalPoint.code) & (pi < 0))
    re_e = re_h + n * omega / 2
    bad = codes < 0
    return np.where(bad, np.nan, re_e), np.where(bad, np.nan, im_h)


def _branch_ht_squared(pi_value: float, label: PhaseLabel, n: int) -> float:
    """``(hT)^2`` on the requested branch; negative when ``h`` is imaginary."""
    if label.variant is Phase.PTSymmetric:
        ht = math.acos(pi_value)
        return (ht + math.pi) ** 2 if n == 1 else ht**2
    if label.variant is Phase.BrokenN0:
        return -math.acosh(pi_value) ** 2
    if label.variant is Phase.BrokenN1:
        return -math.acosh(-pi_value) ** 2
    return 0.0


def effective_hamiltonian(
    p: DriveProtocol, ep_tol: float = EP_TOL, n: int | None = None
) -> EffectiveHamiltonian:
    """Extract ``J``, ``Gamma_y``, ``Gamma_z`` by matching Pauli coefficients.

    ``n`` may only be overridden in the PT-symmetric phase, where ``n = 1`` with
    ``h -> h + omega/2`` is an equivalent description of the same propagator.
    Extraction divides by ``sinc(hT)``; when that is below ``1e-6`` the result
    is returned with ``well_conditioned = False``.
    """
    s0, s1 = p.seg0, p.seg1
    t0, t1 = s0.duration, s1.duration
    period = p.period
    pi_value = pi_closed_form(p)
    label = classify(pi_value, ep_tol)
    if n is None:
        n = label.n
    elif n != label.n and label.variant is not Phase.PTSymmetric:
        raise ValueError(f"branch n={n} is not available in phase {label.variant.value}")

    ht2 = _branch_ht_squared(pi_value, label, n)
    sinc_ht = sinc_even(ht2)
    q0 = s0.h_squared * t0**2
    q1 = s1.h_squared * t1**2
    c0, c1 = cos_even(q0), cos_even(q1)
    sn0, sn1 = sinc_even(q0), sinc_even(q1)

    sign = -1.0 if n == 1 else 1.0
    well = abs(sinc_ht) >= SINC_FLOOR
    pref = sign / (period * sinc_ht) if sinc_ht != 0 else math.nan
    j = pref * (s0.delta * t0 * c1 * sn0 + s1.delta * t1 * c0 * sn1)
    gamma_y = pref / 2 * (s0.delta * s1.gamma - s1.delta * s0.gamma) * t0 * t1 * sn1 * sn0
    gamma_z = pref * (s0.gamma * t0 * c1 * sn0 + s1.gamma * t1 * c0 * sn1)
    return EffectiveHamiltonian(j, gamma_y, gamma_z, n, well, p.omega, ht2)


def reconstruct_monodromy(heff: EffectiveHamiltonian) -> Mat2:
    """``exp(-i H_eff T)`` in closed form from the extracted couplings."""
    period = 2 * math.pi / heff.omega
    sign = -1.0 if heff.n == 1 else 1.0
    c = cos_even(heff.ht_squared)
    s = sinc_even(heff.ht_squared) * period / 2 * sign
    return Mat2(sign * c + 0j, -1j * s * heff.j, s * heff.gamma_y + 0j, s * heff.gamma_z + 0j)


def eigenvalues(u: Mat2) -> tuple[complex, complex]:
    """Roots of ``l^2 - tr(u) l + det(u)``."""
    tr = trace(u)
    disc = (tr * tr - 4 * det(u)) ** 0.5
    return (tr + disc) / 2, (tr - disc) / 2

