"""Two-segment square-wave drive.

Within one period the system evolves under ``H_0`` for ``T_0`` and then under
``H_1`` for ``T_1``, with ``H_j = (delta_j/2) sx + i (gamma_j/2) sz``. Segment 0 is
centred on ``t = 0``, so the one-period propagator is ``U_1 U_0``; shifting the
time origin only conjugates it, which leaves the trace and the quasi-energies
unchanged.

Parameters are dimensionless (energies in units of a reference coupling, times
in inverse units).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields

from .su2 import Mat2, segment_propagator_closed

STATIC_TOL = 1e-12


class ValidationError(ValueError):
    pass


class Regime(enum.Enum):
    RealSpectrum = "RealSpectrum"
    ImaginarySpectrum = "ImaginarySpectrum"
    ExceptionalStatic = "ExceptionalStatic"


@dataclass(frozen=True)
class SegmentParams:
    delta: float
    gamma: float
    duration: float

    @property
    def h_squared(self) -> float:
        return (self.delta**2 - self.gamma**2) / 4.0

    @property
    def hamiltonian(self) -> Mat2:
        return Mat2(c_x=self.delta / 2 + 0j, c_z=0.5j * self.gamma)


@dataclass(frozen=True)
class SegmentSpectrum:
    h_squared: float
    regime: Regime

    @property
    def energies(self) -> tuple[complex, complex]:
        """``(E+, E-) = (+h, -h)``; imaginary in the broken regime."""
        if self.h_squared >= 0:
            h = complex(math.sqrt(self.h_squared))
        else:
            h = 1j * math.sqrt(-self.h_squared)
        return h, -h


def _check_segment(s: SegmentParams, label: str) -> None:
    for f in fields(s):
        v = getattr(s, f.name)
        try:
            finite = math.isfinite(v)
        except TypeError:
            finite = False
        if not finite:
            raise ValidationError(f"{label}: {f.name} must be a finite number, got {v!r}")
    if s.duration <= 0:
        raise ValidationError(f"{label}: duration must be positive, got {s.duration!r}")


@dataclass(frozen=True)
class DriveProtocol:
    seg0: SegmentParams
    seg1: SegmentParams

    def __post_init__(self):
        _check_segment(self.seg0, "seg0")
        _check_segment(self.seg1, "seg1")

    @classmethod
    def from_values(
        cls,
        delta0: float,
        delta1: float,
        gamma0: float,
        gamma1: float,
        t0: float,
        t1: float,
    ) -> DriveProtocol:
        return cls(SegmentParams(delta0, gamma0, t0), SegmentParams(delta1, gamma1, t1))

    @classmethod
    def from_omega(
        cls,
        delta0: float,
        delta1: float,
        gamma0: float,
        gamma1: float,
        omega: float,
        t0_fraction: float,
    ) -> DriveProtocol:
        """Build from the drive frequency and the fraction of the period spent in segment 0."""
        if not (omega > 0 and math.isfinite(omega)):
            raise ValidationError(f"omega must be positive and finite, got {omega!r}")
        if not 0 < t0_fraction < 1:
            raise ValidationError(f"t0_fraction must lie in (0, 1), got {t0_fraction!r}")
        period = 2 * math.pi / omega
        return cls.from_values(
            delta0, delta1, gamma0, gamma1, t0_fraction * period, (1 - t0_fraction) * period
        )

    def as_dict(self) -> dict[str, float]:
        return {
            "delta0": self.seg0.delta,
            "delta1": self.seg1.delta,
            "gamma0": self.seg0.gamma,
            "gamma1": self.seg1.gamma,
            "t0": self.seg0.duration,
            "t1": self.seg1.duration,
        }

    @property
    def period(self) -> float:
        return self.seg0.duration + self.seg1.duration

    @property
    def omega(self) -> float:
        return 2 * math.pi / self.period

    @property
    def t0_fraction(self) -> float:
        return self.seg0.duration / self.period

    @property
    def delta_eff(self) -> float:
        return (self.seg0.delta * self.seg0.duration + self.seg1.delta * self.seg1.duration) / self.period

    @property
    def gamma_eff(self) -> float:
        return (self.seg0.gamma * self.seg0.duration + self.seg1.gamma * self.seg1.duration) / self.period

    @property
    def is_static(self) -> bool:
        """Both segments share coupling and dissipation, i.e. the drive is trivial."""
        return self.seg0.delta == self.seg1.delta and self.seg0.gamma == self.seg1.gamma

    def swapped(self) -> DriveProtocol:
        return DriveProtocol(self.seg1, self.seg0)


def validate(p: DriveProtocol) -> DriveProtocol:
    _check_segment(p.seg0, "seg0")
    _check_segment(p.seg1, "seg1")
    return p


def spectrum(s: SegmentParams) -> SegmentSpectrum:
    h2 = s.h_squared
    if h2 > STATIC_TOL:
        regime = Regime.RealSpectrum
    elif h2 < -STATIC_TOL:
        regime = Regime.ImaginarySpectrum
    else:
        regime = Regime.ExceptionalStatic
    return SegmentSpectrum(h2, regime)


def segment_propagator(s: SegmentParams) -> Mat2:
    """``exp(-i H_j T_j)`` in closed form."""
    return segment_propagator_closed(s.h_squared * s.duration**2, s.duration, s.hamiltonian)


def derived_quantities(p: DriveProtocol) -> tuple[float, float, float, float]:
    """``(T, omega, delta_eff, gamma_eff)``."""
    return p.period, p.omega, p.delta_eff, p.gamma_eff
