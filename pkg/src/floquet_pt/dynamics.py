"""Brute-force stroboscopic dynamics used as an independent check.

Segment propagators here come only from :func:`expm_series`; no closed-form
trigonometry is shared with the engine.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .drive import DriveProtocol, SegmentParams
from .engine import monodromy
from .su2 import Mat2, expm_series, mat_power

log = logging.getLogger(__name__)

NORM_LIMIT = 1e150


@dataclass(frozen=True)
class StateVector:
    a: complex
    b: complex

    @property
    def norm_sq(self) -> float:
        return abs(self.a) ** 2 + abs(self.b) ** 2

    def apply(self, m: Mat2) -> StateVector:
        e = m.to_array()
        return StateVector(e[0, 0] * self.a + e[0, 1] * self.b, e[1, 0] * self.a + e[1, 1] * self.b)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)


BASIS_STATES = (
    StateVector(1 + 0j, 0j),
    StateVector(0j, 1 + 0j),
    StateVector(1 / math.sqrt(2) + 0j, 1 / math.sqrt(2) + 0j),
    StateVector(1 / math.sqrt(2) + 0j, 1j / math.sqrt(2)),
)


@dataclass
class Trajectory:
    """States at ``t = m T``. ``norms`` holds the squared norm ``|a|^2 + |b|^2``."""

    times: list[float] = field(default_factory=list)
    norms: list[float] = field(default_factory=list)
    states: list[StateVector] = field(default_factory=list)
    truncated: bool = False


def substep_propagator(seg: SegmentParams, substeps: int) -> Mat2:
    dt = seg.duration / substeps
    return expm_series(seg.hamiltonian.scale(-1j * dt))


def period_propagator_series(p: DriveProtocol, substeps_per_segment: int) -> Mat2:
    u0 = mat_power(substep_propagator(p.seg0, substeps_per_segment), substeps_per_segment)
    u1 = mat_power(substep_propagator(p.seg1, substeps_per_segment), substeps_per_segment)
    return u1 @ u0


def propagate_periods(
    p: DriveProtocol, psi0: StateVector, m: int, substeps_per_segment: int = 8
) -> Trajectory:
    """Apply ``m`` periods of sub-stepped evolution, recording each period boundary.

    Stops early (``truncated = True``) once the squared norm passes 1e150.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if substeps_per_segment < 4:
        raise ValueError(f"substeps_per_segment must be >= 4, got {substeps_per_segment}")
    steps0 = substep_propagator(p.seg0, substeps_per_segment).to_array()
    steps1 = substep_propagator(p.seg1, substeps_per_segment).to_array()

    period = p.period
    psi = psi0.as_array()
    traj = Trajectory([0.0], [psi0.norm_sq], [psi0])
    for k in range(1, m + 1):
        for _ in range(substeps_per_segment):
            psi = steps0 @ psi
        for _ in range(substeps_per_segment):
            psi = steps1 @ psi
        norm_sq = float(np.vdot(psi, psi).real)
        traj.times.append(k * period)
        traj.norms.append(norm_sq)
        traj.states.append(StateVector(complex(psi[0]), complex(psi[1])))
        if not norm_sq < NORM_LIMIT:
            log.warning("norm overflow after %d periods, trajectory truncated", k)
            traj.truncated = True
            break
    return traj


def stroboscopic_check(p: DriveProtocol, m: int, substeps_per_segment: int = 8) -> float:
    """Largest relative gap between sub-stepped propagation and ``U_eff^m psi0`` over a fixed basis."""
    u_m = mat_power(monodromy(p).u_eff, m)
    worst = 0.0
    for psi0 in BASIS_STATES:
        traj = propagate_periods(p, psi0, m, substeps_per_segment)
        if traj.truncated:
            raise OverflowError("trajectory overflowed before reaching m periods")
        got = traj.states[-1].as_array()
        want = psi0.apply(u_m).as_array()
        worst = max(worst, float(np.linalg.norm(got - want) / np.linalg.norm(want)))
    return worst


def growth_rate(traj: Trajectory, discard: int = 100) -> float:
    """Least-squares slope of ``log |psi|^2`` against time after dropping ``discard`` points.

    Converges to ``2 |Im E+|`` in a broken phase and to zero in the symmetric phase.
    """
    if len(traj.times) <= discard + 10:
        raise ValueError(
            f"trajectory of length {len(traj.times)} too short for discard={discard}"
        )
    t = np.asarray(traj.times[discard:])
    y = np.log(np.asarray(traj.norms[discard:]))
    if np.ptp(y) == 0:
        return 0.0
    slope, _ = np.polyfit(t, y, 1)
    return float(slope)
