"""Density matrices for trials the experimenter cannot tell apart.

Coin mixture: equal weights on the heads and tails final states give
``(1/2) [[1, i sin phi], [-i sin phi, 1]]`` with eigenvalues
``(1 +- sin phi) / 2``.

Gaussian phase noise: averaging the heads projector over
``phi ~ Normal(mu, sigma^2)`` only touches the ``cos phi`` and ``sin phi``
entries, and both follow from the characteristic function of the normal
distribution, ``E[exp(i phi)] = exp(i mu) exp(-sigma^2 / 2)``. Hence::

    rho(mu, sigma) = (1/2) (I + exp(-sigma^2/2) [[cos mu, i sin mu],
                                                 [-i sin mu, -cos mu]])

The interference term shrinks by ``exp(-sigma^2 / 2)`` while the populations
stay on the unit trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import InvalidWeights
from .interferometer import final_states_batch, psi_heads
from .qmath import EXACT_TOL, DensityMatrix2, StateVector2, projector
from .streams import SLOT_PHASE, gaussian_from_uniforms_arr, stream_keys, uniforms_at


@dataclass(frozen=True)
class WeightedEnsemble:
    members: tuple[tuple[float, StateVector2], ...]

    def __init__(self, members: Iterable[tuple[float, StateVector2]]):
        members = tuple((float(w), s) for w, s in members)
        if not members:
            raise InvalidWeights("ensemble is empty")
        for w, _ in members:
            if not (0.0 <= w <= 1.0):
                raise InvalidWeights(f"weight {w!r} outside [0, 1]")
        total = math.fsum(w for w, _ in members)
        if abs(total - 1.0) > EXACT_TOL:
            raise InvalidWeights(f"weights sum to {total!r}, expected 1")
        object.__setattr__(self, "members", members)


@dataclass(frozen=True)
class NoiseModel:
    """Phase difference drawn i.i.d. from ``Normal(mu, sigma**2)`` each trial."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise ValueError("mu and sigma must be finite")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")


def mix(e: WeightedEnsemble) -> DensityMatrix2:
    m00 = m01 = m11 = 0j
    for w, s in e.members:
        p = projector(s)
        m00 += w * p.m00
        m01 += w * p.m01
        m11 += w * p.m11
    return DensityMatrix2(m00, m01, m01.conjugate(), m11)


def rho_bar_coin(phi: float) -> DensityMatrix2:
    half_sin = 0.5 * math.sin(phi)
    return DensityMatrix2(0.5, 1j * half_sin, -1j * half_sin, 0.5)


def lambda_pm(phi: float) -> tuple[float, float]:
    s = math.sin(phi)
    return 0.5 * (1 + s), 0.5 * (1 - s)


def fringe_contrast(n: NoiseModel) -> float:
    return math.exp(-0.5 * n.sigma ** 2)


def rho_bar_gaussian(n: NoiseModel) -> DensityMatrix2:
    c = fringe_contrast(n)
    cos_t = 0.5 * c * math.cos(n.mu)
    off = 0.5j * c * math.sin(n.mu)
    return DensityMatrix2(0.5 + cos_t, off, off.conjugate(), 0.5 - cos_t)


def monte_carlo_mixture(n: NoiseModel, samples: int, seed: int) -> DensityMatrix2:
    """Sample average of heads projectors with ``phi_k ~ Normal(mu, sigma^2)``.

    Sample ``k`` draws its phase from ``rng_stream(seed, 0, k)`` at the
    phase-noise slots, so results are fixed by ``(n, samples, seed)``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if n.sigma == 0:
        return projector(psi_heads(n.mu))
    keys = stream_keys(seed, 0, np.arange(samples, dtype=np.int64))
    z = gaussian_from_uniforms_arr(uniforms_at(keys, SLOT_PHASE), uniforms_at(keys, SLOT_PHASE + 1))
    amps = final_states_batch(n.mu + n.sigma * z)
    a, b = amps[:, 0], amps[:, 1]
    m00 = float(np.mean(a.real ** 2 + a.imag ** 2))
    m11 = float(np.mean(b.real ** 2 + b.imag ** 2))
    m01 = complex(np.mean(a * b.conj()))
    return DensityMatrix2(m00, m01, m01.conjugate(), m11)


def detection_probs_from_density(d: DensityMatrix2) -> tuple[float, float]:
    return d.m00.real, d.m11.real
