"""Deterministic bag-of-words mock encoder.

Stands in for a real dual encoder so the whole pipeline runs self-contained.
Each lowercased token hashes (FNV-1a 64) to one of 256 coordinates with a
sign taken from hash bit 63; the signed one-hots are summed in float64 and
L2-normalized (the zero vector stays zero). Accumulation is over small
integers, so the result is exact and bit-reproducible in any language that
follows the same recipe; the stored rows are float32.

Being a pure bag of words, the encoder is token-order-invariant: shuffled
or reversed captions embed identically to the original.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from .rng import fnv1a_64
from .textproc import tokenize

MOCK_DIM = 256


def mock_encode(text: str) -> np.ndarray:
    """Embed one caption; returns a float32 vector of MOCK_DIM entries."""
    vec = [0.0] * MOCK_DIM
    for token in tokenize(text):
        h = fnv1a_64(token.lower().encode("utf-8"))
        sign = 1.0 if (h >> 63) == 0 else -1.0
        vec[h % MOCK_DIM] += sign
    norm_sq = 0.0
    for value in vec:
        norm_sq += value * value
    if norm_sq > 0.0:
        norm = math.sqrt(norm_sq)
        vec = [value / norm for value in vec]
    return np.asarray(vec, dtype=np.float32)


def mock_encode_many(texts: Iterable[str]) -> np.ndarray:
    rows = [mock_encode(text) for text in texts]
    if not rows:
        return np.zeros((0, MOCK_DIM), dtype=np.float32)
    return np.stack(rows)
