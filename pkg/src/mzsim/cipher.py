"""One-time-pad view of a coin-randomized run.

Label each final state 1 for the heads device and 0 for the tails device.
The experimenter who believes every trial used the heads device holds the
all-ones plaintext; the labels that actually occurred are the ciphertext.
Solving ``ciphertext = plaintext XOR key`` against the 8-trial example::

    plaintext   1 1 1 1 1 1 1 1
    coins       T H H T T H T H
    ciphertext  0 1 1 0 0 1 0 1

gives ``key = 1 0 0 1 1 0 1 0``, i.e. T -> 1 and H -> 0.

Coin histories serialize as a line of ``H``/``T`` characters and bit strings
as ``0``/``1`` characters.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from .errors import LengthMismatch

T = TypeVar("T")


class BitString(tuple):
    """Immutable sequence of 0/1 ints; ``str()`` gives the ASCII form."""

    def __new__(cls, bits: Iterable[int] | str = ()):
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits if not ch.isspace()]
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        return super().__new__(cls, bits)

    def __str__(self):
        return "".join("1" if b else "0" for b in self)

    def __repr__(self):
        return f"BitString('{self}')"

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls((1,) * n)

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls((0,) * n)


class CoinHistory(tuple):
    """Immutable sequence of ``'H'``/``'T'``; whitespace is ignored on input."""

    def __new__(cls, coins: Iterable[str] | str = ()):
        coins = tuple(str(c).upper() for c in coins if not str(c).isspace())
        if any(c not in ("H", "T") for c in coins):
            raise ValueError("coin history may only contain 'H' and 'T'")
        return super().__new__(cls, coins)

    def __str__(self):
        return "".join(self)

    def __repr__(self):
        return f"CoinHistory('{self}')"


def encode_states(coins: CoinHistory) -> BitString:
    """Final-state labels: heads device -> 1, tails device -> 0."""
    return BitString(1 if c == "H" else 0 for c in coins)


def key_bits(coins: CoinHistory) -> BitString:
    """Pad bits: T -> 1 (device flipped), H -> 0."""
    return BitString(1 if c == "T" else 0 for c in coins)


def vernam(text: BitString, key: BitString) -> BitString:
    """Bitwise XOR; applying the same key twice restores the input."""
    if len(text) != len(key):
        raise LengthMismatch(f"text has {len(text)} bits, key has {len(key)}")
    return BitString(a ^ b for a, b in zip(text, key))


def partition_by_coins(
    records: Sequence[T], coins: CoinHistory
) -> tuple[list[T], list[T]]:
    """Split trial records into (heads, tails) by the matching coin, keeping order."""
    if len(records) != len(coins):
        raise LengthMismatch(f"{len(records)} records but {len(coins)} coins")
    heads: list[T] = []
    tails: list[T] = []
    for rec, c in zip(records, coins):
        (heads if c == "H" else tails).append(rec)
    return heads, tails


def coins_from_records(records) -> CoinHistory:
    """Coin history recorded alongside a randomized run."""
    return CoinHistory(rec.coin.value for rec in records)


def write_coin_file(path: str | Path, coins: CoinHistory) -> None:
    Path(path).write_text(str(coins) + "\n", encoding="utf-8")


def read_coin_file(path: str | Path) -> CoinHistory:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if len(lines) > 1 and any(line.strip() for line in lines[1:]):
        raise ValueError(f"{path}: coin file must be a single line")
    return CoinHistory(lines[0] if lines else "")
