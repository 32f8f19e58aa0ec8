import numpy as np
import pytest

from capbench.mock import MOCK_DIM, mock_encode, mock_encode_many


class TestMockEncode:
    def test_empty_caption_is_zero_vector(self):
        vec = mock_encode("")
        assert vec.shape == (MOCK_DIM,)
        assert vec.dtype == np.float32
        assert not vec.any()

    def test_unit_norm_when_nonzero(self):
        vec = mock_encode("a guy wearing a red shirt")
        assert np.linalg.norm(vec.astype(np.float64)) == pytest.approx(1.0, abs=1e-6)

    def test_repetition_scale_invariance(self):
        assert np.array_equal(mock_encode("dog"), mock_encode("dog dog"))

    def test_known_hash_coordinates(self):
        # FNV-1a 64: "a" -> index 140, sign bit set (negative);
        #            "guy" -> index 80, negative. Frozen from the reference.
        vec = mock_encode("a guy")
        nonzero = np.flatnonzero(vec)
        assert list(nonzero) == [80, 140]
        inv = -1.0 / np.sqrt(2.0)
        assert vec[80] == pytest.approx(inv)
        assert vec[140] == pytest.approx(inv)

    def test_case_folding(self):
        assert np.array_equal(mock_encode("DOG Runs"), mock_encode("dog runs"))

    def test_token_order_invariance(self):
        a = mock_encode("a guy wearing a red shirt drives a car while talking")
        b = mock_encode("talking while car a drives shirt red a wearing guy a")
        assert np.array_equal(a, b)

    def test_punctuation_is_a_token(self):
        assert not np.array_equal(mock_encode("dog runs"), mock_encode("dog runs !"))

    def test_many_stacks_rows(self):
        rows = mock_encode_many(["dog", "cat", ""])
        assert rows.shape == (3, MOCK_DIM)
        assert np.array_equal(rows[0], mock_encode("dog"))
        assert not rows[2].any()

    def test_many_empty(self):
        assert mock_encode_many([]).shape == (0, MOCK_DIM)
