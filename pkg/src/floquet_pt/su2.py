"""Complex 2x2 matrices in the Pauli basis.

A matrix is stored as four complex coefficients ``M = c_id I + c_x sx + c_y sy + c_z sz``.
Everything a two-level propagator needs (products, trace, determinant,
closed-form exponentials) is cheap and exact in this representation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

TAYLOR_CROSSOVER = 1e-8


class PrecisionError(ArithmeticError):
    """Raised when a truncated series did not reach its accuracy target."""


@dataclass(frozen=True, slots=True)
class Mat2:
    c_id: complex = 0j
    c_x: complex = 0j
    c_y: complex = 0j
    c_z: complex = 0j

    def __matmul__(self, other: Mat2) -> Mat2:
        return mat_mul(self, other)

    def __add__(self, other: Mat2) -> Mat2:
        return Mat2(
            self.c_id + other.c_id,
            self.c_x + other.c_x,
            self.c_y + other.c_y,
            self.c_z + other.c_z,
        )

    def scale(self, s: complex) -> Mat2:
        return Mat2(s * self.c_id, s * self.c_x, s * self.c_y, s * self.c_z)

    @property
    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        return (self.c_id, self.c_x, self.c_y, self.c_z)

    def to_array(self) -> np.ndarray:
        """Element form as a 2x2 complex ndarray."""
        return np.array(
            [
                [self.c_id + self.c_z, self.c_x - 1j * self.c_y],
                [self.c_x + 1j * self.c_y, self.c_id - self.c_z],
            ],
            dtype=complex,
        )

    @classmethod
    def from_array(cls, a) -> Mat2:
        a = np.asarray(a, dtype=complex)
        if a.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
        return cls(
            complex((a[0, 0] + a[1, 1]) / 2),
            complex((a[0, 1] + a[1, 0]) / 2),
            complex((a[1, 0] - a[0, 1]) / 2j),
            complex((a[0, 0] - a[1, 1]) / 2),
        )

    def max_abs(self) -> float:
        """Largest element modulus of the element form."""
        return float(np.max(np.abs(self.to_array())))

    def norm(self) -> float:
        """Frobenius norm, ``sqrt(2 * sum |c|^2)`` in Pauli coordinates."""
        return math.sqrt(2.0 * sum(abs(c) ** 2 for c in self.coefficients))


IDENTITY = Mat2(1 + 0j)
SIGMA_X = Mat2(c_x=1 + 0j)
SIGMA_Y = Mat2(c_y=1 + 0j)
SIGMA_Z = Mat2(c_z=1 + 0j)


def pauli_compose(c_id: complex, c_x: complex, c_y: complex, c_z: complex) -> Mat2:
    coeffs = (complex(c_id), complex(c_x), complex(c_y), complex(c_z))
    for name, c in zip(("c_id", "c_x", "c_y", "c_z"), coeffs):
        if not cmath.isfinite(c):
            raise ValueError(f"non-finite Pauli coefficient {name}={c!r}")
    return Mat2(*coeffs)


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    """Matrix product ``a @ b``.

    Uses ``(a0 + a.s)(b0 + b.s) = a0 b0 + a.b + (a0 b + b0 a + i a x b).s``.
    """
    a0, ax, ay, az = a.c_id, a.c_x, a.c_y, a.c_z
    b0, bx, by, bz = b.c_id, b.c_x, b.c_y, b.c_z
    return Mat2(
        a0 * b0 + ax * bx + ay * by + az * bz,
        a0 * bx + b0 * ax + 1j * (ay * bz - az * by),
        a0 * by + b0 * ay + 1j * (az * bx - ax * bz),
        a0 * bz + b0 * az + 1j * (ax * by - ay * bx),
    )


def trace(m: Mat2) -> complex:
    return 2 * m.c_id


def det(m: Mat2) -> complex:
    return m.c_id**2 - m.c_x**2 - m.c_y**2 - m.c_z**2


def _check_q(q: float) -> float:
    q = float(q)
    if not math.isfinite(q):
        raise ValueError(f"non-finite argument q={q!r}")
    return q


def cos_even(q: float) -> float:
    """``cos(sqrt(q))`` continued to ``cosh(sqrt(-q))`` for negative ``q``."""
    q = _check_q(q)
    if abs(q) < TAYLOR_CROSSOVER:
        return 1.0 - q / 2.0 + q * q / 24.0
    if q > 0:
        return math.cos(math.sqrt(q))
    return math.cosh(math.sqrt(-q))


def sinc_even(q: float) -> float:
    """``sin(x)/x`` with ``x = sqrt(q)``; ``sinh(y)/y`` with ``y = sqrt(-q)`` for ``q < 0``."""
    q = _check_q(q)
    if abs(q) < TAYLOR_CROSSOVER:
        return 1.0 - q / 6.0 + q * q / 120.0
    if q > 0:
        x = math.sqrt(q)
        return math.sin(x) / x
    y = math.sqrt(-q)
    return math.sinh(y) / y


def cos_even_array(q: np.ndarray) -> np.ndarray:
    """Vectorised :func:`cos_even`; non-finite entries propagate as NaN."""
    q = np.asarray(q, dtype=float)
    r = np.sqrt(np.abs(q))
    out = np.where(q > 0, np.cos(r), np.cosh(r))
    small = np.abs(q) < TAYLOR_CROSSOVER
    return np.where(small, 1.0 - q / 2.0 + q * q / 24.0, out)


def sinc_even_array(q: np.ndarray) -> np.ndarray:
    """Vectorised :func:`sinc_even`."""
    q = np.asarray(q, dtype=float)
    small = np.abs(q) < TAYLOR_CROSSOVER
    r = np.sqrt(np.abs(q))
    safe_r = np.where(small, 1.0, r)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.where(q > 0, np.sin(safe_r), np.sinh(safe_r)) / safe_r
    return np.where(small, 1.0 - q / 6.0 + q * q / 120.0, out)


def segment_propagator_closed(h_sq_t_sq: float, t: float, hamiltonian: Mat2) -> Mat2:
    """``exp(-i H t)`` for traceless ``H`` with ``H^2 = h^2 I``.

    ``h_sq_t_sq`` is ``(h t)^2``, real even when ``h`` is imaginary. Consistency
    with ``hamiltonian`` is the caller's responsibility.
    """
    c = cos_even(h_sq_t_sq)
    s = -1j * sinc_even(h_sq_t_sq) * t
    return Mat2(
        c + s * hamiltonian.c_id,
        s * hamiltonian.c_x,
        s * hamiltonian.c_y,
        s * hamiltonian.c_z,
    )


def default_substeps(m: Mat2) -> int:
    n = m.norm()
    return 2 ** math.ceil(math.log2(max(1.0, n)))


def _mul(a: tuple, b: tuple) -> tuple:
    a0, ax, ay, az = a
    b0, bx, by, bz = b
    return (
        a0 * b0 + ax * bx + ay * by + az * bz,
        a0 * bx + b0 * ax + 1j * (ay * bz - az * by),
        a0 * by + b0 * ay + 1j * (az * bx - ax * bz),
        a0 * bz + b0 * az + 1j * (ax * by - ay * bx),
    )


def expm_series(m: Mat2, terms: int = 30, substeps: int | None = None) -> Mat2:
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    ``m`` is divided by ``substeps`` (a norm-adaptive power of two by default),
    exponentiated with ``terms`` series terms, then raised back to the
    ``substeps`` power by repeated squaring (binary powering when ``substeps``
    is not a power of two). Independent of any closed-form trigonometry.
    """
    if terms < 20:
        raise ValueError(f"terms must be >= 20, got {terms}")
    if substeps is None:
        substeps = default_substeps(m)
    if substeps < 1:
        raise ValueError(f"substeps must be >= 1, got {substeps}")

    inv = 1.0 / substeps
    a = (m.c_id * inv, m.c_x * inv, m.c_y * inv, m.c_z * inv)
    result = [1 + 0j, 0j, 0j, 0j]
    term = (1 + 0j, 0j, 0j, 0j)
    for k in range(1, terms + 1):
        t = _mul(term, a)
        term = (t[0] / k, t[1] / k, t[2] / k, t[3] / k)
        for i in range(4):
            result[i] += term[i]
    last = math.sqrt(sum(abs(c) ** 2 for c in term))
    scale = max(1.0, math.sqrt(sum(abs(c) ** 2 for c in result)))
    if last > 1e-13 * scale:
        raise PrecisionError(f"series not converged: last term {last:.3e} vs result {scale:.3e}")
    return mat_power(Mat2(*result), substeps)


def mat_power(m: Mat2, k: int) -> Mat2:
    if k < 0:
        raise ValueError("negative powers are not supported")
    out = IDENTITY.coefficients
    base = m.coefficients
    while k:
        if k & 1:
            out = _mul(out, base)
        k >>= 1
        if k:
            base = _mul(base, base)
    return Mat2(*out)


def _mul_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a0, ax, ay, az = np.moveaxis(a, -1, 0)
    b0, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            a0 * b0 + ax * bx + ay * by + az * bz,
            a0 * bx + b0 * ax + 1j * (ay * bz - az * by),
            a0 * by + b0 * ay + 1j * (az * bx - ax * bz),
            a0 * bz + b0 * az + 1j * (ax * by - ay * bx),
        ],
        axis=-1,
    )


def expm_series_batch(coeffs: np.ndarray, terms: int = 30) -> np.ndarray:
    """:func:`expm_series` over a stack of Pauli coefficient rows, shape ``(..., 4)``.

    Each matrix gets its own norm-adaptive power-of-two scaling, exactly as in
    the scalar routine.
    """
    if terms < 20:
        raise ValueError(f"terms must be >= 20, got {terms}")
    c = np.asarray(coeffs, dtype=complex)
    norms = np.sqrt(2.0 * np.sum(np.abs(c) ** 2, axis=-1))
    squarings = np.ceil(np.log2(np.maximum(1.0, norms))).astype(int)
    a = c / (2.0**squarings)[..., None]

    result = np.zeros_like(a)
    result[..., 0] = 1.0
    term = result.copy()
    for k in range(1, terms + 1):
        term = _mul_batch(term, a) / k
        result = result + term
    last = np.sqrt(np.sum(np.abs(term) ** 2, axis=-1))
    scale = np.maximum(1.0, np.sqrt(np.sum(np.abs(result) ** 2, axis=-1)))
    if np.any(last > 1e-13 * scale):
        raise PrecisionError("series not converged for at least one matrix in the batch")
    for step in range(int(squarings.max(initial=0))):
        sq = _mul_batch(result, result)
        result = np.where((squarings > step)[..., None], sq, result)
    return result
