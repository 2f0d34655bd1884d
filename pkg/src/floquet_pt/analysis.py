"""Resonance prediction, high-frequency limit, EP root finding and phase-diagram sweeps."""

from __future__ import annotations

import enum
import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy import ndimage

from .drive import DriveProtocol
from .engine import (
    EP_TOL,
    PHASE_BY_CODE,
    EffectiveHamiltonian,
    Phase,
    PhaseLabel,
    classify_array,
    pi_closed_form,
    pi_closed_form_arrays,
    quasi_energies_array,
)

log = logging.getLogger(__name__)

PARAM_KEYS = ("delta0", "delta1", "gamma0", "gamma1", "omega", "t0_fraction")
BALANCE_TOL = 1e-12
ROOT_TOL = 1e-10


class BracketError(ValueError):
    def __init__(self, g_a: float, g_b: float):
        super().__init__(f"no sign change in bracket: g(a)={g_a!r}, g(b)={g_b!r}")
        self.g_a = g_a
        self.g_b = g_b


# ---------------------------------------------------------------------------
# multiphoton resonances


class PhotonKind(enum.Enum):
    OddPhoton = "OddPhoton"
    EvenPhoton = "EvenPhoton"


@dataclass(frozen=True)
class ResonancePrediction:
    k: int
    kind: PhotonKind
    omega_resonant: float
    breaking_expected: bool
    reason: str


def predict_resonances(p: DriveProtocol, k_max: int) -> list[ResonancePrediction]:
    """Drive frequencies ``|delta_eff|/k`` where weak dissipation can break PT symmetry.

    Odd ``k`` always can (``Pi`` sits at -1 without dissipation). Even ``k``
    needs an imbalance: ``gamma0 != -gamma1`` or ``T0 != T1``.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    delta_eff = p.delta_eff
    if delta_eff == 0:
        warnings.warn("delta_eff = 0: no multiphoton resonances", stacklevel=2)
        return []

    gamma_imbalanced = abs(p.seg0.gamma + p.seg1.gamma) > BALANCE_TOL
    time_imbalanced = abs(p.seg0.duration - p.seg1.duration) > BALANCE_TOL
    if gamma_imbalanced and time_imbalanced:
        even_reason = "gamma-and-duration-imbalance"
    elif gamma_imbalanced:
        even_reason = "gamma-imbalance"
    elif time_imbalanced:
        even_reason = "duration-imbalance"
    else:
        even_reason = "balanced"

    out = []
    for k in range(1, k_max + 1):
        omega_k = abs(delta_eff) / k
        if k % 2:
            out.append(ResonancePrediction(k, PhotonKind.OddPhoton, omega_k, True, "odd-photon"))
        else:
            out.append(
                ResonancePrediction(
                    k, PhotonKind.EvenPhoton, omega_k, even_reason != "balanced", even_reason
                )
            )
    return out


# ---------------------------------------------------------------------------
# high-frequency limit


def hf_pi_approx(p: DriveProtocol) -> float:
    """``Pi`` to second order in the period: ``1 + (gamma_eff^2 - delta_eff^2) T^2 / 8``."""
    return 1.0 + (p.gamma_eff**2 - p.delta_eff**2) * p.period**2 / 8.0


@dataclass(frozen=True)
class HighFrequencyBoundary:
    delta_eff: float
    gamma_eff: float

    rule = "|gamma_eff| < |delta_eff| => PTSymmetric; otherwise broken with n=0"

    @property
    def gamma_eff_boundary(self) -> tuple[float, float]:
        return (-abs(self.delta_eff), abs(self.delta_eff))

    def predicted_phase(self, tol: float = BALANCE_TOL) -> Phase:
        gap = abs(self.gamma_eff) - abs(self.delta_eff)
        if abs(gap) <= tol:
            return Phase.ExceptionalPoint
        return Phase.PTSymmetric if gap < 0 else Phase.BrokenN0


def hf_boundary(p: DriveProtocol) -> HighFrequencyBoundary:
    return HighFrequencyBoundary(p.delta_eff, p.gamma_eff)


def hf_effective_hamiltonian(p: DriveProtocol) -> EffectiveHamiltonian:
    """Leading-order effective Hamiltonian: a static one with time-averaged parameters.

    Deviates from the exact extraction at first order in the period.
    """
    d, g = p.delta_eff, p.gamma_eff
    return EffectiveHamiltonian(
        j=d,
        gamma_y=0.0,
        gamma_z=g,
        n=0,
        well_conditioned=True,
        omega=p.omega,
        ht_squared=(d * d - g * g) / 4 * p.period**2,
    )


# ---------------------------------------------------------------------------
# parameter axes


@dataclass(frozen=True)
class Axis:
    """Affine selector: setting the axis to ``x`` sets ``key = scale*x + offset`` per target.

    Targets address the sweep coordinates ``delta0, delta1, gamma0, gamma1,
    omega, t0_fraction``.
    """

    name: str
    targets: tuple[tuple[str, float, float], ...]

    def __post_init__(self):
        if not self.targets:
            raise ValueError(f"axis {self.name!r} drives no parameter")
        for key, scale, offset in self.targets:
            if key not in PARAM_KEYS:
                raise ValueError(f"axis {self.name!r}: unknown parameter {key!r}")
            if not (math.isfinite(scale) and math.isfinite(offset)):
                raise ValueError(f"axis {self.name!r}: non-finite affine map for {key!r}")

    @classmethod
    def single(cls, key: str, scale: float = 1.0, offset: float = 0.0) -> Axis:
        return cls(key, ((key, scale, offset),))

    @classmethod
    def linked(cls, name: str, scales: dict[str, float]) -> Axis:
        return cls(name, tuple((k, s, 0.0) for k, s in scales.items()))

    @property
    def keys(self) -> frozenset[str]:
        return frozenset(k for k, _, _ in self.targets)

    def apply(self, params: dict, x) -> dict:
        out = dict(params)
        for key, scale, offset in self.targets:
            out[key] = scale * x + offset
        return out

    def ray(self, base: DriveProtocol) -> Callable[[float], DriveProtocol]:
        """Map a scalar position along this axis to a protocol."""
        params = protocol_params(base)

        def at(x: float) -> DriveProtocol:
            return build_protocol(self.apply(params, x))

        return at

    def to_dict(self) -> dict:
        return {"name": self.name, "targets": {k: [s, o] for k, s, o in self.targets}}


def protocol_params(p: DriveProtocol) -> dict[str, float]:
    return {
        "delta0": p.seg0.delta,
        "delta1": p.seg1.delta,
        "gamma0": p.seg0.gamma,
        "gamma1": p.seg1.gamma,
        "omega": p.omega,
        "t0_fraction": p.t0_fraction,
    }


def build_protocol(params: dict[str, float]) -> DriveProtocol:
    return DriveProtocol.from_omega(*(float(params[k]) for k in PARAM_KEYS))


# ---------------------------------------------------------------------------
# exceptional points


class Boundary(enum.Enum):
    PlusOne = 1
    MinusOne = -1


@dataclass(frozen=True)
class EpLocation:
    ray_parameter: float
    pi_at_root: float
    boundary: Boundary
    residual: float
    iterations: int


def find_ep(
    ray: Callable[[float], DriveProtocol],
    boundary: Boundary,
    bracket: tuple[float, float],
    root_tol: float = ROOT_TOL,
    width_tol: float = 1e-12,
    max_iter: int = 200,
) -> EpLocation:
    """Root of ``Pi(ray(x)) - (+-1)`` inside ``bracket``.

    Bisection, with one regula-falsi step per iteration when it lands strictly
    inside the current bracket.
    """
    target = float(boundary.value)

    def g(x: float) -> float:
        return pi_closed_form(ray(x)) - target

    a, b = map(float, bracket)
    if a > b:
        a, b = b, a
    ga, gb = g(a), g(b)
    best = min(((abs(ga), a, ga), (abs(gb), b, gb)))
    if best[0] <= root_tol:
        return EpLocation(best[1], best[2] + target, boundary, best[0], 0)
    if np.sign(ga) == np.sign(gb):
        raise BracketError(ga, gb)

    it = 0
    for it in range(1, max_iter + 1):
        candidates = []
        if gb != ga:
            c = b - gb * (b - a) / (gb - ga)
            if a < c < b:
                candidates.append(c)
        for x in candidates + [None]:
            if x is None:
                x = 0.5 * (a + b)
            gx = g(x)
            if abs(gx) < best[0]:
                best = (abs(gx), x, gx)
            if abs(gx) <= root_tol:
                return EpLocation(x, gx + target, boundary, abs(gx), it)
            if np.sign(gx) == np.sign(ga):
                a, ga = x, gx
            else:
                b, gb = x, gx
        if b - a <= width_tol:
            break
    return EpLocation(best[1], best[2] + target, boundary, best[0], it)


def scan_brackets(
    ray: Callable[[float], DriveProtocol],
    boundary: Boundary,
    lo: float,
    hi: float,
    num: int = 200,
    max_step: float = 0.5,
    max_depth: int = 12,
) -> list[tuple[float, float]]:
    """Coarse pre-scan for sign changes of ``Pi - (+-1)``.

    Intervals over which ``Pi`` moves by ``max_step`` or more are subdivided
    so that fast oscillations at low frequency are not stepped over.
    """
    target = float(boundary.value)

    def g(x):
        return pi_closed_form(ray(x)) - target

    xs = np.linspace(lo, hi, num)
    pts = [(float(x), g(float(x))) for x in xs]
    out = []

    def walk(x0, g0, x1, g1, depth):
        if abs(g1 - g0) >= max_step and depth < max_depth:
            xm = 0.5 * (x0 + x1)
            gm = g(xm)
            walk(x0, g0, xm, gm, depth + 1)
            walk(xm, gm, x1, g1, depth + 1)
        elif g0 == 0 or np.sign(g0) != np.sign(g1):
            out.append((x0, x1))

    for (x0, g0), (x1, g1) in zip(pts, pts[1:]):
        walk(x0, g0, x1, g1, 0)
    return out


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class SweepGrid:
    x: Axis
    x_range: tuple[float, float, int]
    y: Axis
    y_range: tuple[float, float, int]
    base: DriveProtocol
    ep_tol: float = EP_TOL

    def __post_init__(self):
        for name, (lo, hi, count) in (("x", self.x_range), ("y", self.y_range)):
            if int(count) != count or count < 2:
                raise ValueError(f"{name} axis needs an integer count >= 2, got {count!r}")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"{name} range must be finite, got ({lo!r}, {hi!r})")
        if self.x.keys & self.y.keys:
            shared = sorted(self.x.keys & self.y.keys)
            raise ValueError(f"x and y axes both drive {shared}")
        if self.ep_tol <= 0:
            raise ValueError("ep_tol must be positive")

    @property
    def xs(self) -> np.ndarray:
        lo, hi, n = self.x_range
        return np.linspace(lo, hi, int(n))

    @property
    def ys(self) -> np.ndarray:
        lo, hi, n = self.y_range
        return np.linspace(lo, hi, int(n))

    def protocol_at(self, x: float, y: float) -> DriveProtocol:
        params = self.y.apply(self.x.apply(protocol_params(self.base), x), y)
        return build_protocol(params)


@dataclass(frozen=True)
class SweepRecord:
    x: float
    y: float
    pi_value: float
    label: PhaseLabel | None
    im_quasi: float
    re_quasi: float
    valid: bool = True


@dataclass
class SweepResult:
    """Grid-shaped sweep output; rows are indexed by ``y``, columns by ``x``."""

    grid: SweepGrid
    xs: np.ndarray
    ys: np.ndarray
    pi: np.ndarray
    codes: np.ndarray
    re_e: np.ndarray
    im_e: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.pi.size

    def __iter__(self) -> Iterator[SweepRecord]:
        for i, y in enumerate(self.ys):
            for j, x in enumerate(self.xs):
                yield self.record(i, j)

    def record(self, i: int, j: int) -> SweepRecord:
        code = int(self.codes[i, j])
        pi = float(self.pi[i, j])
        if code < 0:
            return SweepRecord(float(self.xs[j]), float(self.ys[i]), pi, None, math.nan, math.nan, False)
        variant = PHASE_BY_CODE[code]
        n = 1 if variant is Phase.BrokenN1 or (variant is Phase.ExceptionalPoint and pi < 0) else 0
        label = PhaseLabel(variant, n, abs(pi) - 1.0)
        return SweepRecord(
            float(self.xs[j]),
            float(self.ys[i]),
            pi,
            label,
            abs(float(self.im_e[i, j])),
            float(self.re_e[i, j]),
        )

    def mask(self, phase: Phase) -> np.ndarray:
        return self.codes == phase.code

    def lobes(self, phase: Phase) -> int:
        """Number of 4-connected regions carrying ``phase``."""
        _, count = ndimage.label(self.mask(phase))
        return int(count)

    def boundary_crossings(self) -> list[int]:
        """Per row, the number of label changes along ``x``."""
        return [int(np.count_nonzero(np.diff(row) != 0)) for row in self.codes]

    def summary(self) -> dict:
        counts = {ph.value: int(np.count_nonzero(self.mask(ph))) for ph in Phase}
        return {
            "x_axis": self.grid.x.to_dict(),
            "y_axis": self.grid.y.to_dict(),
            "x_range": list(self.grid.x_range),
            "y_range": list(self.grid.y_range),
            "points": len(self),
            "invalid_points": int(np.count_nonzero(self.codes < 0)),
            "phase_counts": counts,
            "lobes": {ph.value: self.lobes(ph) for ph in (Phase.BrokenN0, Phase.BrokenN1)},
            "boundary_crossings_per_row": self.boundary_crossings(),
        }


def sweep_threads() -> int:
    """Worker count from ``FLOQUET_PT_THREADS`` (0 or unset: one per CPU)."""
    raw = os.environ.get("FLOQUET_PT_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring malformed FLOQUET_PT_THREADS=%r", raw)
        n = 0
    return n if n > 0 else (os.cpu_count() or 1)


def _evaluate_rows(grid: SweepGrid, xs: np.ndarray, ys: np.ndarray):
    X, Y = np.meshgrid(xs, ys)
    params = {k: np.full_like(X, v) for k, v in protocol_params(grid.base).items()}
    params = grid.y.apply(grid.x.apply(params, X), Y)
    omega = params["omega"]
    frac = params["t0_fraction"]
    with np.errstate(divide="ignore", invalid="ignore"):
        period = 2 * np.pi / omega
        ok = (omega > 0) & (frac > 0) & (frac < 1)
        pi = pi_closed_form_arrays(
            params["delta0"],
            params["delta1"],
            params["gamma0"],
            params["gamma1"],
            frac * period,
            (1 - frac) * period,
        )
    pi = np.where(ok, pi, np.nan)
    re_e, im_e = quasi_energies_array(pi, np.where(ok, omega, 1.0), grid.ep_tol)
    return pi, re_e, im_e


def sweep(grid: SweepGrid, threads: int | None = None) -> SweepResult:
    """Evaluate ``Pi``, the phase label and the principal quasi-energy on every grid point.

    Points are independent; row blocks are farmed out to a thread pool and
    reassembled in canonical order (``y`` outer, ``x`` inner). Points whose
    ``Pi`` is not finite are kept and marked invalid.
    """
    xs, ys = grid.xs, grid.ys
    threads = sweep_threads() if threads is None else max(1, threads)
    blocks = np.array_split(np.arange(len(ys)), min(threads, len(ys)))
    if len(blocks) == 1:
        parts = [_evaluate_rows(grid, xs, ys)]
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = list(pool.map(lambda idx: _evaluate_rows(grid, xs, ys[idx]), blocks))
    pi = np.vstack([p[0] for p in parts])
    re_e = np.vstack([p[1] for p in parts])
    im_e = np.vstack([p[2] for p in parts])
    codes = classify_array(pi, grid.ep_tol)
    invalid = int(np.count_nonzero(codes < 0))
    if invalid:
        log.warning("%d grid points produced non-finite Pi", invalid)
    return SweepResult(grid, xs, ys, pi, codes, re_e, im_e)


def row_profile(ray: Callable[[float], DriveProtocol], xs: Sequence[float]) -> np.ndarray:
    """``Pi`` along a one-dimensional ray, point by point."""
    return np.array([pi_closed_form(ray(float(x))) for x in xs])
