"""Beamsplitters, phase shifters and the composed Mach-Zehnder device.

A lossless splitter is fixed by two coefficients::

    S = [[ r_LL,          t_LR        ],
         [ -conj(t_LR),   conj(r_LL)  ]]       det S = |r_LL|^2 + |t_LR|^2 = 1

The device acts as ``S2' . Phi . S1`` where ``S2'`` is ``S2`` or, when the
second splitter is flipped around, its transpose.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import InvalidSplitter
from .qmath import EXACT_TOL, KET_L, Matrix2, StateVector2

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class BeamSplitter:
    r_LL: complex
    t_LR: complex

    def __post_init__(self):
        object.__setattr__(self, "r_LL", complex(self.r_LL))
        object.__setattr__(self, "t_LR", complex(self.t_LR))
        if not (cmath.isfinite(self.r_LL) and cmath.isfinite(self.t_LR)):
            raise InvalidSplitter("coefficients must be finite")
        det = abs(self.r_LL) ** 2 + abs(self.t_LR) ** 2
        if abs(det - 1.0) > EXACT_TOL:
            raise InvalidSplitter(f"|r|^2 + |t|^2 = {det!r}, expected 1")

    @property
    def r_RR(self) -> complex:
        return self.r_LL.conjugate()

    @property
    def t_RL(self) -> complex:
        return -self.t_LR.conjugate()

    def matrix(self) -> Matrix2:
        return Matrix2(self.r_LL, self.t_LR, self.t_RL, self.r_RR)

    @classmethod
    def from_matrix(cls, m: Matrix2) -> "BeamSplitter":
        """Recover a splitter from its matrix, checking the lossless structure."""
        if abs(m.m11 - m.m00.conjugate()) > EXACT_TOL or abs(m.m10 + m.m01.conjugate()) > EXACT_TOL:
            raise InvalidSplitter("matrix does not have lossless splitter structure")
        return cls(m.m00, m.m01)

    @classmethod
    def identity(cls) -> "BeamSplitter":
        return cls(1.0, 0.0)


@dataclass(frozen=True)
class PhaseShifter:
    """Phase shifts along each path; only ``phi = theta_R - theta_L`` is observable."""

    theta_L: float = 0.0
    theta_R: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta_L) and math.isfinite(self.theta_R)):
            raise ValueError("phases must be finite")

    @classmethod
    def from_phi(cls, phi: float, theta_L: float = 0.0) -> "PhaseShifter":
        return cls(theta_L, theta_L + phi)

    @property
    def phi(self) -> float:
        return self.theta_R - self.theta_L

    def matrix(self) -> Matrix2:
        return Matrix2.diag(cmath.exp(1j * self.theta_L), cmath.exp(1j * self.theta_R))


def standard_s1() -> BeamSplitter:
    """``(1/sqrt2) [[1, 1], [-1, 1]]``."""
    return BeamSplitter(_INV_SQRT2, _INV_SQRT2)


def standard_s2() -> BeamSplitter:
    """``(1/sqrt2) [[1, -1], [1, 1]]``, the inverse of :func:`standard_s1`."""
    return BeamSplitter(_INV_SQRT2, -_INV_SQRT2)


def reverse_orientation(b: BeamSplitter) -> BeamSplitter:
    """Splitter whose matrix is the transpose of ``b``'s."""
    return BeamSplitter.from_matrix(b.matrix().transpose())


@dataclass(frozen=True)
class DeviceConfig:
    splitter_1: BeamSplitter
    phase: PhaseShifter
    splitter_2: BeamSplitter
    splitter_2_reversed: bool = False

    @classmethod
    def heads(cls, phi: float, theta_L: float = 0.0) -> "DeviceConfig":
        """The intended apparatus with phase difference ``phi``."""
        return cls(standard_s1(), PhaseShifter.from_phi(phi, theta_L), standard_s2(), False)

    @classmethod
    def tails(cls, phi: float, theta_L: float = 0.0) -> "DeviceConfig":
        """Same apparatus with the second splitter flipped."""
        return cls(standard_s1(), PhaseShifter.from_phi(phi, theta_L), standard_s2(), True)


def device_matrix(cfg: DeviceConfig) -> Matrix2:
    s2 = cfg.splitter_2.matrix()
    if cfg.splitter_2_reversed:
        s2 = s2.transpose()
    return qmath.matmul(qmath.matmul(s2, cfg.phase.matrix()), cfg.splitter_1.matrix())


def final_state(cfg: DeviceConfig, input: StateVector2 = KET_L) -> StateVector2:
    return qmath.apply(device_matrix(cfg), input)


def detection_probabilities(s: StateVector2) -> tuple[float, float]:
    """``(P(D_L), P(D_R))`` for a state arriving at the detectors."""
    return abs(s.a_L) ** 2, abs(s.a_R) ** 2


def psi_heads(phi: float) -> StateVector2:
    return final_state(DeviceConfig.heads(phi))


def psi_tails(phi: float) -> StateVector2:
    return final_state(DeviceConfig.tails(phi))


# -- batch evaluation ---------------------------------------------------------

def final_states_batch(
    phi,
    reversed_s2=False,
    theta_L: float = 0.0,
    splitter_1: BeamSplitter | None = None,
    splitter_2: BeamSplitter | None = None,
    input: StateVector2 = KET_L,
) -> np.ndarray:
    """Output amplitudes for many devices at once, shape ``(n, 2)``.

    Each row is ``S2' . Phi(theta_L, theta_L + phi[k]) . S1 . input`` with the
    transpose of ``S2`` used wherever ``reversed_s2`` is true.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    rev = np.broadcast_to(np.asarray(reversed_s2, dtype=bool), phi.shape)
    s1 = (splitter_1 or standard_s1()).matrix().as_array()
    s2 = (splitter_2 or standard_s2()).matrix().as_array()

    v = s1 @ input.as_array()
    theta_R = theta_L + phi
    w = np.empty(phi.shape + (2,), dtype=complex)
    w[:, 0] = np.exp(1j * theta_L) * v[0]
    w[:, 1] = np.exp(1j * theta_R) * v[1]

    out = np.einsum("ij,nj->ni", s2, w)
    if rev.any():
        out[rev] = np.einsum("ij,nj->ni", s2.T, w[rev])
    return out


def detection_probabilities_batch(phi, reversed_s2=False, theta_L: float = 0.0) -> np.ndarray:
    """``P(D_L)`` for each device, launched from ``|L>``."""
    amps = final_states_batch(phi, reversed_s2, theta_L)
    return amps[:, 0].real ** 2 + amps[:, 0].imag ** 2
