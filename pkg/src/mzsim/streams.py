"""Counter-based random streams keyed by ``(seed, setting_index, trial_index)``.

Each key is hashed to a 64-bit state with the SplitMix64 finalizer and the
stream is then the SplitMix64 sequence started from that state. Because a
draw depends only on ``(seed, setting, trial, draw_index)`` it can be
evaluated in any order, on any thread, scalar or vectorized, and give the
same bits.

Uniforms use the top 53 bits: ``u = (x >> 11) * 2**-53`` in ``[0, 1)``.
Normal deviates use the cosine branch of Box-Muller on two consecutive
uniforms ``u1, u2``::

    z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)

Draw slots inside one trial are fixed: 0 = coin, 1-2 = phase noise,
3 = detector.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M53 = 2.0 ** -53

SLOT_COIN = 0
SLOT_PHASE = 1  # uses SLOT_PHASE and SLOT_PHASE + 1
SLOT_DETECTOR = 3


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, setting_index: int, trial_index: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    k = _mix((seed + GAMMA) & MASK64)
    k = _mix(((k ^ (setting_index & MASK64)) + GAMMA) & MASK64)
    return _mix(((k ^ (trial_index & MASK64)) + GAMMA) & MASK64)


def draw_u64(key: int, index: int) -> int:
    return _mix((key + (index + 1) * GAMMA) & MASK64)


def to_uniform(x: int) -> float:
    return (x >> 11) * _TWO_M53


class TrialStream:
    """Sequential view of one keyed stream.

    >>> a, b = rng_stream(7, 0, 0), rng_stream(7, 0, 0)
    >>> [a.uniform() for _ in range(3)] == [b.uniform() for _ in range(3)]
    True
    """

    __slots__ = ("seed", "setting_index", "trial_index", "key", "position")

    def __init__(self, seed: int, setting_index: int, trial_index: int, position: int = 0):
        self.seed = seed
        self.setting_index = setting_index
        self.trial_index = trial_index
        self.key = stream_key(seed, setting_index, trial_index)
        self.position = position

    def next_u64(self) -> int:
        x = draw_u64(self.key, self.position)
        self.position += 1
        return x

    def uniform(self) -> float:
        return to_uniform(self.next_u64())

    def skip_to(self, position: int) -> "TrialStream":
        self.position = position
        return self

    def __repr__(self):
        return (
            f"TrialStream(seed={self.seed}, setting_index={self.setting_index}, "
            f"trial_index={self.trial_index}, position={self.position})"
        )


def rng_stream(seed: int, setting_index: int, trial_index: int) -> TrialStream:
    return TrialStream(seed, setting_index, trial_index)


def gaussian_from_uniforms(u1: float, u2: float) -> float:
    # Routed through numpy so scalar and batch draws agree to the last bit;
    # libm and numpy's SIMD log/cos can differ by one ulp.
    return float(gaussian_from_uniforms_arr(np.array([u1]), np.array([u2]))[0])


def sample_coin(stream: TrialStream) -> str:
    """Fair coin: ``'H'`` when the next uniform is below one half."""
    return "H" if stream.uniform() < 0.5 else "T"


def sample_phase(stream: TrialStream, mu: float, sigma: float) -> float:
    """Draw from ``Normal(mu, sigma**2)``; consumes two uniforms, returns ``mu`` when ``sigma == 0``."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    u1, u2 = stream.uniform(), stream.uniform()
    if sigma == 0:
        return mu
    return mu + sigma * gaussian_from_uniforms(u1, u2)


# -- vectorized ---------------------------------------------------------------

def _mix_arr(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_keys(seed: int, setting_index, trial_index) -> np.ndarray:
    """Vectorized :func:`stream_key`; index arguments broadcast together."""
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    s, t = np.broadcast_arrays(
        np.atleast_1d(np.asarray(setting_index, dtype=np.uint64)),
        np.atleast_1d(np.asarray(trial_index, dtype=np.uint64)),
    )
    k = np.uint64(_mix((seed + GAMMA) & MASK64))
    g = np.uint64(GAMMA)
    k = _mix_arr((np.full(s.shape, k, dtype=np.uint64) ^ s) + g)
    return _mix_arr((k ^ t) + g)


def uniforms_at(keys: np.ndarray, index: int) -> np.ndarray:
    """The ``index``-th uniform of every stream in ``keys``."""
    offset = np.uint64(((index + 1) * GAMMA) & MASK64)
    x = _mix_arr(keys + offset)
    return (x >> np.uint64(11)).astype(np.float64) * _TWO_M53


def gaussian_from_uniforms_arr(u1: np.ndarray, u2: np.ndarray) -> np.ndarray:
    return np.sqrt(-2.0 * np.log(1.0 - u1)) * np.cos(2.0 * np.pi * u2)
