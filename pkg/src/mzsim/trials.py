"""Seeded Monte Carlo runs of the interferometer, trial by trial.

Every trial owns the stream ``rng_stream(plan.seed, setting_index,
trial_index)`` and reads it in a fixed order: coin, then phase noise, then the
detector uniform. The detector fires ``L`` iff ``u < P(D_L)``. Slots that a
mode does not need are skipped rather than shifted, so a trial's detector
draw is the same uniform in every mode.

Runs are evaluated in numpy batches over whole settings; splitting the
settings across worker threads changes nothing in the output.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import MixedPlans
from .interferometer import detection_probabilities_batch
from .streams import (
    MASK64,
    SLOT_COIN,
    SLOT_DETECTOR,
    SLOT_PHASE,
    gaussian_from_uniforms_arr,
    rng_stream,
    sample_coin,
    sample_phase,
    stream_keys,
    uniforms_at,
)

__all__ = [
    "Coin",
    "CountsRow",
    "CountsTable",
    "ExperimentPlan",
    "Mode",
    "Outcome",
    "TrialArrays",
    "TrialRecord",
    "aggregate",
    "fit_cosine",
    "rng_stream",
    "run_experiment",
    "run_trial",
    "sample_coin",
    "sample_phase",
    "simulate",
]

DEFAULT_TRIALS = 1000
DEFAULT_PHI_STEP = 2 * math.pi / 32


class Mode(str, enum.Enum):
    IDEAL = "ideal"
    RANDOMIZED = "randomized"
    NOISY = "noisy"
    RANDOMIZED_NOISY = "randomized-noisy"

    @property
    def randomized(self) -> bool:
        return self in (Mode.RANDOMIZED, Mode.RANDOMIZED_NOISY)

    @property
    def noisy(self) -> bool:
        return self in (Mode.NOISY, Mode.RANDOMIZED_NOISY)


class Coin(str, enum.Enum):
    H = "H"
    T = "T"
    NONE = "-"


class Outcome(str, enum.Enum):
    D_L = "L"
    D_R = "R"


_COIN_CODES = {1: Coin.H, 0: Coin.T, -1: Coin.NONE}


@dataclass(frozen=True)
class ExperimentPlan:
    """A phase sweep: ``n_settings`` values ``phi_start + k * phi_step``."""

    mode: Mode
    phi_start: float = 0.0
    phi_step: float = DEFAULT_PHI_STEP
    n_settings: int = 33
    trials_per_setting: int = DEFAULT_TRIALS
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        for name in ("phi_start", "phi_step", "sigma"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.n_settings < 1:
            raise ValueError(f"n_settings must be >= 1, got {self.n_settings}")
        if self.trials_per_setting < 1:
            raise ValueError(f"trials_per_setting must be >= 1, got {self.trials_per_setting}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.sigma > 0 and not self.mode.noisy:
            raise ValueError(f"sigma is only meaningful in noisy modes, not {self.mode.value!r}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {self.seed}")

    @property
    def n_trials(self) -> int:
        return self.n_settings * self.trials_per_setting

    def phi_nominal(self, setting_index: int) -> float:
        return self.phi_start + setting_index * self.phi_step

    def phis(self) -> np.ndarray:
        return self.phi_start + np.arange(self.n_settings) * self.phi_step


@dataclass(frozen=True)
class TrialRecord:
    setting_index: int
    trial_index: int
    phi_nominal: float
    coin: Coin
    phi_realized: float
    outcome: Outcome


class CountsRow(NamedTuple):
    phi_nominal: float
    n_L: int
    n_R: int

    @property
    def n(self) -> int:
        return self.n_L + self.n_R

    @property
    def fraction_L(self) -> float:
        return self.n_L / self.n


@dataclass(frozen=True)
class CountsTable:
    rows: tuple[CountsRow, ...] = ()

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i) -> CountsRow:
        return self.rows[i]

    def phis(self) -> np.ndarray:
        return np.array([r.phi_nominal for r in self.rows], dtype=float)

    def n_L(self) -> np.ndarray:
        return np.array([r.n_L for r in self.rows], dtype=np.int64)

    def n_R(self) -> np.ndarray:
        return np.array([r.n_R for r in self.rows], dtype=np.int64)

    def fractions_L(self) -> np.ndarray:
        n_L, n_R = self.n_L(), self.n_R()
        return n_L / (n_L + n_R)


@dataclass(frozen=True)
class TrialArrays:
    """Column-oriented trial data; ``coin`` is 1/0/-1 for H/T/none, ``outcome`` 0/1 for L/R."""

    setting_index: np.ndarray
    trial_index: np.ndarray
    phi_nominal: np.ndarray
    coin: np.ndarray
    phi_realized: np.ndarray
    outcome: np.ndarray

    def __len__(self):
        return len(self.setting_index)

    @classmethod
    def concat(cls, parts: Sequence["TrialArrays"]) -> "TrialArrays":
        return cls(
            *(np.concatenate([getattr(p, f) for p in parts]) for f in cls.__dataclass_fields__)
        )

    def records(self) -> list[TrialRecord]:
        coins = [_COIN_CODES[c] for c in self.coin.tolist()]
        outcomes = [Outcome.D_R if o else Outcome.D_L for o in self.outcome.tolist()]
        return [
            TrialRecord(s, t, pn, c, pr, o)
            for s, t, pn, c, pr, o in zip(
                self.setting_index.tolist(),
                self.trial_index.tolist(),
                self.phi_nominal.tolist(),
                coins,
                self.phi_realized.tolist(),
                outcomes,
            )
        ]


def _simulate_indices(plan: ExperimentPlan, s: np.ndarray, t: np.ndarray) -> TrialArrays:
    keys = stream_keys(plan.seed, s, t)
    phi_nominal = plan.phi_start + s.astype(np.float64) * plan.phi_step

    if plan.mode.randomized:
        coin = np.where(uniforms_at(keys, SLOT_COIN) < 0.5, 1, 0).astype(np.int8)
    else:
        coin = np.full(s.shape, -1, dtype=np.int8)

    if plan.mode.noisy and plan.sigma > 0:
        z = gaussian_from_uniforms_arr(
            uniforms_at(keys, SLOT_PHASE), uniforms_at(keys, SLOT_PHASE + 1)
        )
        phi_realized = phi_nominal + plan.sigma * z
    else:
        phi_realized = phi_nominal.copy()

    p_L = detection_probabilities_batch(phi_realized, coin == 0)
    outcome = np.where(uniforms_at(keys, SLOT_DETECTOR) < p_L, 0, 1).astype(np.int8)
    return TrialArrays(s, t, phi_nominal, coin, phi_realized, outcome)


def _simulate_settings(plan: ExperimentPlan, settings: range) -> TrialArrays:
    n = plan.trials_per_setting
    s = np.repeat(np.arange(settings.start, settings.stop, dtype=np.int64), n)
    t = np.tile(np.arange(n, dtype=np.int64), len(settings))
    return _simulate_indices(plan, s, t)


def simulate(plan: ExperimentPlan, workers: int = 1) -> TrialArrays:
    """Run every trial of ``plan`` and return column arrays in (setting, trial) order."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    n_chunks = min(workers, plan.n_settings)
    bounds = np.linspace(0, plan.n_settings, n_chunks + 1).astype(int)
    chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if len(chunks) == 1:
        return _simulate_settings(plan, chunks[0])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda r: _simulate_settings(plan, r), chunks))
    return TrialArrays.concat(parts)


def run_trial(plan: ExperimentPlan, setting_index: int, trial_index: int) -> TrialRecord:
    if not 0 <= setting_index < plan.n_settings:
        raise IndexError(f"setting_index {setting_index} out of range")
    if not 0 <= trial_index < plan.trials_per_setting:
        raise IndexError(f"trial_index {trial_index} out of range")
    arrays = _simulate_indices(
        plan, np.array([setting_index], dtype=np.int64), np.array([trial_index], dtype=np.int64)
    )
    return arrays.records()[0]


def run_experiment(
    plan: ExperimentPlan, workers: int = 1
) -> tuple[list[TrialRecord], CountsTable]:
    records = simulate(plan, workers).records()
    return records, aggregate(records)


def aggregate(records: Iterable[TrialRecord]) -> CountsTable:
    """Detector counts per setting, ordered by setting index.

    Raises :class:`MixedPlans` when one setting index carries two different
    nominal phases or a (setting, trial) pair appears twice.
    """
    groups: dict[int, list] = {}
    seen: set[tuple[int, int]] = set()
    for rec in records:
        key = (rec.setting_index, rec.trial_index)
        if key in seen:
            raise MixedPlans(f"duplicate trial {key}")
        seen.add(key)
        g = groups.get(rec.setting_index)
        if g is None:
            groups[rec.setting_index] = g = [rec.phi_nominal, 0, 0]
        elif g[0] != rec.phi_nominal:
            raise MixedPlans(
                f"setting {rec.setting_index} has phases {g[0]!r} and {rec.phi_nominal!r}"
            )
        if rec.outcome is Outcome.D_L:
            g[1] += 1
        else:
            g[2] += 1
    return CountsTable(tuple(CountsRow(*groups[k]) for k in sorted(groups)))


def fit_cosine(phis, fractions) -> tuple[float, float]:
    """Least-squares ``(a, b)`` for ``fraction ~ a + b cos(phi)``."""
    phis = np.asarray(phis, dtype=float)
    design = np.column_stack([np.ones_like(phis), np.cos(phis)])
    (a, b), *_ = np.linalg.lstsq(design, np.asarray(fractions, dtype=float), rcond=None)
    return float(a), float(b)
