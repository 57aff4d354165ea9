import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mzsim.cipher import (
    BitString,
    CoinHistory,
    coins_from_records,
    encode_states,
    key_bits,
    partition_by_coins,
    read_coin_file,
    vernam,
    write_coin_file,
)
from mzsim.errors import LengthMismatch
from mzsim.trials import ExperimentPlan, Mode, aggregate, run_experiment

TABLE_COINS = CoinHistory("THHT THTH")

coin_histories = st.text(alphabet="HT", max_size=200).map(CoinHistory)


@st.composite
def text_and_key(draw):
    n = draw(st.integers(0, 128))
    bits = st.lists(st.integers(0, 1), min_size=n, max_size=n)
    return BitString(draw(bits)), BitString(draw(bits))


class TestEncodeStates:
    def test_table(self):
        assert str(encode_states(TABLE_COINS)) == "01100101"

    def test_empty(self):
        assert encode_states(CoinHistory("")) == BitString()

    def test_all_heads(self):
        assert str(encode_states(CoinHistory("HHHH"))) == "1111"


class TestKeyBits:
    def test_table(self):
        assert str(key_bits(TABLE_COINS)) == "10011010"

    def test_all_heads_is_zero_key(self):
        coins = CoinHistory("H" * 12)
        assert key_bits(coins) == BitString.zeros(12)
        assert vernam(BitString.ones(12), key_bits(coins)) == BitString.ones(12)

    def test_all_tails_complements(self):
        coins = CoinHistory("TTTTT")
        assert key_bits(coins) == BitString.ones(5)
        assert str(vernam(BitString("10110"), key_bits(coins))) == "01001"


class TestVernam:
    def test_table(self):
        assert str(vernam(BitString("11111111"), BitString("10011010"))) == "01100101"

    def test_zero_key(self):
        x = BitString("1011001")
        assert vernam(x, BitString.zeros(7)) == x

    @given(text_and_key())
    def test_involution(self, tk):
        text, key = tk
        assert vernam(vernam(text, key), key) == text

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            vernam(BitString("101"), BitString("10"))

    @given(coin_histories)
    def test_ciphertext_is_plaintext_xor_key(self, coins):
        assert encode_states(coins) == vernam(BitString.ones(len(coins)), key_bits(coins))

    def test_ciphertext_bits_uniform_under_random_keys(self, rng):
        plaintext = np.array([1, 0, 1, 1, 0, 0, 1, 0])
        keys = rng.integers(0, 2, size=(100_000, plaintext.size))
        cipher = plaintext ^ keys
        freq = cipher.mean(axis=0)
        assert np.all(np.abs(freq - 0.5) <= 4 * 0.5 / math.sqrt(100_000))


class TestTypes:
    def test_bitstring_parse(self):
        assert BitString("0110 0101") == BitString([0, 1, 1, 0, 0, 1, 0, 1])

    def test_bitstring_rejects(self):
        with pytest.raises(ValueError):
            BitString([0, 2])

    def test_coin_history_rejects(self):
        with pytest.raises(ValueError):
            CoinHistory("HTX")

    def test_coin_file_roundtrip(self, tmp_path):
        path = tmp_path / "coins.txt"
        write_coin_file(path, TABLE_COINS)
        assert path.read_text() == "THHTTHTH\n"
        assert read_coin_file(path) == TABLE_COINS

    def test_coin_file_without_newline(self, tmp_path):
        path = tmp_path / "coins.txt"
        path.write_text("HHT")
        assert read_coin_file(path) == CoinHistory("HHT")


class TestPartition:
    def test_table(self):
        records = list(range(1, 9))
        heads, tails = partition_by_coins(records, TABLE_COINS)
        assert heads == [2, 3, 6, 8]
        assert tails == [1, 4, 5, 7]

    def test_all_heads(self):
        assert partition_by_coins([1, 2, 3], CoinHistory("HHH")) == ([1, 2, 3], [])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            partition_by_coins([1, 2], CoinHistory("H"))

    @given(coin_histories)
    def test_is_stable_partition(self, coins):
        records = list(range(len(coins)))
        heads, tails = partition_by_coins(records, coins)
        assert len(heads) + len(tails) == len(records)
        assert sorted(heads + tails) == records
        assert heads == sorted(heads) and tails == sorted(tails)

    def test_decrypts_randomized_run(self):
        plan = ExperimentPlan(Mode.RANDOMIZED, n_settings=17, phi_step=2 * math.pi / 16, seed=3)
        records, _ = run_experiment(plan)
        heads, tails = partition_by_coins(records, coins_from_records(records))
        phis = plan.phis()
        h, t = aggregate(heads), aggregate(tails)
        assert np.all(np.abs(h.fractions_L() - 0.5 * (1 + np.cos(phis))) <= 0.09)
        assert np.all(np.abs(t.fractions_L() - 0.5 * (1 - np.cos(phis))) <= 0.09)
