"""Two-level states, operators, Hermitian eigendecomposition and entropy.

Everything here works on plain Python ``complex`` scalars so results are
reproducible and cheap to reason about. Vectorized counterparts used by the
Monte Carlo engine live next to their callers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidDensityMatrix, InvalidState, NonUnitaryEvolution

# Shared tolerances; tests import these instead of repeating literals.
EXACT_TOL = 1e-12
EVOLVE_TOL = 1e-9
ZERO_EIGENVALUE = 1e-15


def _finite(*values: complex) -> bool:
    return all(cmath.isfinite(v) for v in values)


@dataclass(frozen=True)
class StateVector2:
    """Normalized amplitude pair over the path basis ``(|L>, |R>)``."""

    a_L: complex
    a_R: complex

    def __post_init__(self):
        object.__setattr__(self, "a_L", complex(self.a_L))
        object.__setattr__(self, "a_R", complex(self.a_R))
        if not _finite(self.a_L, self.a_R):
            raise InvalidState(f"non-finite amplitudes ({self.a_L}, {self.a_R})")
        if abs(self.norm_squared - 1.0) > EXACT_TOL:
            raise InvalidState(f"state not normalized: |a|^2 = {self.norm_squared!r}")

    @classmethod
    def _unchecked(cls, a_L: complex, a_R: complex) -> "StateVector2":
        # Result of an evolution step; norm was already checked against EVOLVE_TOL.
        obj = object.__new__(cls)
        object.__setattr__(obj, "a_L", complex(a_L))
        object.__setattr__(obj, "a_R", complex(a_R))
        return obj

    @classmethod
    def normalized(cls, a_L: complex, a_R: complex) -> "StateVector2":
        n = math.hypot(abs(a_L), abs(a_R))
        if n == 0.0 or not math.isfinite(n):
            raise InvalidState("cannot normalize a zero or non-finite vector")
        return cls(a_L / n, a_R / n)

    @property
    def norm_squared(self) -> float:
        return abs(self.a_L) ** 2 + abs(self.a_R) ** 2

    def inner(self, other: "StateVector2") -> complex:
        """``<self|other>``."""
        return self.a_L.conjugate() * other.a_L + self.a_R.conjugate() * other.a_R

    def fidelity(self, other: "StateVector2") -> float:
        """``|<self|other>|^2``; insensitive to global phase."""
        return abs(self.inner(other)) ** 2

    def same_ray(self, other: "StateVector2", tol: float = EXACT_TOL) -> bool:
        return abs(self.fidelity(other) - 1.0) <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.a_L, self.a_R], dtype=complex)


KET_L = StateVector2(1.0, 0.0)
KET_R = StateVector2(0.0, 1.0)


@dataclass(frozen=True)
class Matrix2:
    """Row-major 2x2 complex operator over basis order ``(L, R)``."""

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    def __post_init__(self):
        for name in ("m00", "m01", "m10", "m11"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if not _finite(self.m00, self.m01, self.m10, self.m11):
            raise ValueError("matrix entries must be finite")

    @classmethod
    def identity(cls) -> "Matrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def diag(cls, d0: complex, d1: complex) -> "Matrix2":
        return cls(d0, 0, 0, d1)

    @classmethod
    def from_array(cls, a) -> "Matrix2":
        a = np.asarray(a, dtype=complex)
        if a.shape != (2, 2):
            raise ValueError(f"expected shape (2, 2), got {a.shape}")
        return cls(a[0, 0], a[0, 1], a[1, 0], a[1, 1])

    def as_array(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]], dtype=complex)

    @property
    def trace(self) -> complex:
        return self.m00 + self.m11

    @property
    def det(self) -> complex:
        return self.m00 * self.m11 - self.m01 * self.m10

    def transpose(self) -> "Matrix2":
        return Matrix2(self.m00, self.m10, self.m01, self.m11)

    def __matmul__(self, other):
        if isinstance(other, Matrix2):
            return matmul(self, other)
        if isinstance(other, StateVector2):
            return apply(self, other)
        return NotImplemented

    def max_abs_diff(self, other: "Matrix2") -> float:
        return max(
            abs(self.m00 - other.m00),
            abs(self.m01 - other.m01),
            abs(self.m10 - other.m10),
            abs(self.m11 - other.m11),
        )


def _hermitian_eigenvalues(m00: complex, m01: complex, m11: complex) -> tuple[float, float]:
    # tr^2 - 4 det == (a - d)^2 + 4|b|^2 for Hermitian input; the hypot form
    # avoids cancellation near degeneracy.
    a, d = m00.real, m11.real
    half_tr = 0.5 * (a + d)
    half_gap = 0.5 * math.hypot(a - d, 2.0 * abs(m01))
    return half_tr + half_gap, half_tr - half_gap


@dataclass(frozen=True)
class DensityMatrix2(Matrix2):
    """Hermitian, unit-trace, positive semidefinite 2x2 matrix."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.m10 - self.m01.conjugate()) > EXACT_TOL:
            raise InvalidDensityMatrix("matrix is not Hermitian")
        if abs(self.m00.imag) > EXACT_TOL or abs(self.m11.imag) > EXACT_TOL:
            raise InvalidDensityMatrix("diagonal entries must be real")
        if abs(self.trace - 1.0) > EXACT_TOL:
            raise InvalidDensityMatrix(f"trace {self.trace!r} != 1")
        _, lam_minus = _hermitian_eigenvalues(self.m00, self.m01, self.m11)
        if lam_minus < -EXACT_TOL:
            raise InvalidDensityMatrix(f"negative eigenvalue {lam_minus!r}")

    @classmethod
    def from_matrix(cls, m: Matrix2) -> "DensityMatrix2":
        return cls(m.m00, m.m01, m.m10, m.m11)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix2":
        return cls(0.5, 0, 0, 0.5)

    def purity(self) -> float:
        """``Tr(rho^2)``."""
        return (abs(self.m00) ** 2 + abs(self.m11) ** 2 + 2 * abs(self.m01) ** 2)


@dataclass(frozen=True)
class EigenPair2:
    lambda_plus: float
    lambda_minus: float
    v_plus: StateVector2
    v_minus: StateVector2

    @property
    def eigenvalues(self) -> tuple[float, float]:
        return (self.lambda_plus, self.lambda_minus)

    def reconstruct(self) -> Matrix2:
        """``lambda_+ |v+><v+| + lambda_- |v-><v-|``."""
        p, q = _outer(self.v_plus), _outer(self.v_minus)
        lp, lm = self.lambda_plus, self.lambda_minus
        return Matrix2(
            lp * p[0] + lm * q[0],
            lp * p[1] + lm * q[1],
            lp * p[2] + lm * q[2],
            lp * p[3] + lm * q[3],
        )


def matmul(a: Matrix2, b: Matrix2) -> Matrix2:
    return Matrix2(
        a.m00 * b.m00 + a.m01 * b.m10,
        a.m00 * b.m01 + a.m01 * b.m11,
        a.m10 * b.m00 + a.m11 * b.m10,
        a.m10 * b.m01 + a.m11 * b.m11,
    )


def apply(m: Matrix2, s: StateVector2) -> StateVector2:
    """Matrix-vector product without renormalization.

    Raises :class:`NonUnitaryEvolution` if the norm moves by more than
    ``EVOLVE_TOL``.
    """
    a_L = m.m00 * s.a_L + m.m01 * s.a_R
    a_R = m.m10 * s.a_L + m.m11 * s.a_R
    before = s.norm_squared
    after = abs(a_L) ** 2 + abs(a_R) ** 2
    if abs(after - before) > EVOLVE_TOL:
        raise NonUnitaryEvolution(f"norm changed from {before!r} to {after!r}")
    return StateVector2._unchecked(a_L, a_R)


def adjoint(m: Matrix2) -> Matrix2:
    return Matrix2(
        m.m00.conjugate(), m.m10.conjugate(), m.m01.conjugate(), m.m11.conjugate()
    )


def is_unitary(m: Matrix2, tol: float = EXACT_TOL) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return matmul(adjoint(m), m).max_abs_diff(Matrix2.identity()) <= tol


def _outer(s: StateVector2) -> tuple[complex, complex, complex, complex]:
    a, b = s.a_L, s.a_R
    # Diagonal entries are exactly real; m10 is exactly conj(m01).
    off = a * b.conjugate()
    return (complex(abs(a) ** 2), off, off.conjugate(), complex(abs(b) ** 2))


def projector(s: StateVector2) -> DensityMatrix2:
    """Rank-one density matrix ``|s><s|``."""
    return DensityMatrix2(*_outer(s))


def _phase_fix(x: complex, y: complex) -> StateVector2:
    """Normalize and rotate so the first non-negligible component is real positive."""
    n = math.hypot(abs(x), abs(y))
    x, y = x / n, y / n
    lead = x if abs(x) > EXACT_TOL else y
    rot = abs(lead) / lead
    return StateVector2._unchecked(x * rot, y * rot)


def eig_hermitian(d: DensityMatrix2) -> EigenPair2:
    """Closed-form eigendecomposition of a Hermitian 2x2 matrix.

    Eigenvalues are sorted descending. Each eigenvector has its first
    non-zero component real and positive; a degenerate spectrum returns
    ``|L>, |R>``.
    """
    lam_plus, lam_minus = _hermitian_eigenvalues(d.m00, d.m01, d.m11)
    if lam_plus - lam_minus <= EXACT_TOL:
        return EigenPair2(lam_plus, lam_minus, KET_L, KET_R)

    a, b, dd = d.m00.real, d.m01, d.m11.real
    # Two candidate null vectors of (d - lam I); use the longer one.
    c1 = (b, lam_plus - a)
    c2 = (lam_plus - dd, b.conjugate())
    x, y = c1 if abs(c1[0]) ** 2 + abs(c1[1]) ** 2 >= abs(c2[0]) ** 2 + abs(c2[1]) ** 2 else c2
    v_plus = _phase_fix(complex(x), complex(y))
    v_minus = _phase_fix(-v_plus.a_R.conjugate(), v_plus.a_L.conjugate())
    return EigenPair2(lam_plus, lam_minus, v_plus, v_minus)


def shannon_entropy(probs: Iterable[float]) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    total = 0.0
    for p in probs:
        if p > 0.0:
            total -= p * math.log2(p)
    return total


def _clamp_eigenvalue(lam: float) -> float:
    if lam < ZERO_EIGENVALUE:
        return 0.0
    return min(lam, 1.0)


def von_neumann_entropy(d: DensityMatrix2) -> float:
    """Von Neumann entropy in bits (log base 2, never nats)."""
    pair = eig_hermitian(d)
    return shannon_entropy(_clamp_eigenvalue(lam) for lam in pair.eigenvalues)


def frobenius_distance(a: Matrix2, b: Matrix2) -> float:
    return math.sqrt(
        abs(a.m00 - b.m00) ** 2
        + abs(a.m01 - b.m01) ** 2
        + abs(a.m10 - b.m10) ** 2
        + abs(a.m11 - b.m11) ** 2
    )


def conjugate_by(u: Matrix2, d: DensityMatrix2) -> DensityMatrix2:
    """``U d U^dagger``."""
    return DensityMatrix2.from_matrix(matmul(matmul(u, d), adjoint(u)))
