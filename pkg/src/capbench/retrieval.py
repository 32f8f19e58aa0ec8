"""Embedding files, cosine scoring, and ranking metrics.

The model boundary is a binary embedding file (CEVB) or a raw similarity
CSV; nothing in here knows how vectors were produced. Ranks use pessimistic
tie handling (candidates tied with the ground truth count against it) so
degenerate or mock encoders are never flattered, and the median is the
lower median for even counts. Similarities accumulate in float64 and are
stored as float32.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

CEVB_MAGIC = b"CEVB"
CEVB_VERSION = 1
DIRECTIONS = ("t2v", "v2t")


class CevbError(ValueError):
    """Malformed CEVB embedding file."""


class EvalError(ValueError):
    """Inconsistent inputs to the metric harness."""


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Ordered ids plus one float32 row per id."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"embedding values must be 2-D, got shape {values.shape}")
        if len(self.ids) != values.shape[0]:
            raise ValueError(
                f"{len(self.ids)} ids but {values.shape[0]} embedding rows"
            )
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ids in embedding matrix")
        if not np.isfinite(values).all():
            raise ValueError("non-finite values in embedding matrix")
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    def row(self, id_: str) -> np.ndarray:
        return self.values[self.ids.index(id_)]


def write_cevb(path: Path | str, emb: EmbeddingMatrix) -> None:
    """Write the bit-exact CEVB format (little-endian throughout)."""
    n, dim = emb.values.shape
    with open(path, "wb") as handle:
        handle.write(CEVB_MAGIC)
        handle.write(struct.pack("<I", CEVB_VERSION))
        handle.write(struct.pack("<Q", n))
        handle.write(struct.pack("<I", dim))
        handle.write(struct.pack("<B", 0))  # dtype 0 = f32
        for id_ in emb.ids:
            raw = id_.encode("utf-8")
            if len(raw) > 0xFFFF:
                raise CevbError(f"id too long for CEVB: {id_[:32]!r}...")
            handle.write(struct.pack("<H", len(raw)))
            handle.write(raw)
        handle.write(emb.values.astype("<f4", copy=False).tobytes(order="C"))


def load_embeddings(path: Path | str) -> EmbeddingMatrix:
    """Read a CEVB file back into an EmbeddingMatrix."""
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:4] != CEVB_MAGIC:
        raise CevbError(f"bad magic in {path}: {data[:4]!r}")
    offset = 4
    (version,) = struct.unpack_from("<I", data, offset)
    offset += 4
    if version != CEVB_VERSION:
        raise CevbError(f"unsupported CEVB version: {version}")
    (count,) = struct.unpack_from("<Q", data, offset)
    offset += 8
    (dim,) = struct.unpack_from("<I", data, offset)
    offset += 4
    (dtype,) = struct.unpack_from("<B", data, offset)
    offset += 1
    if dtype != 0:
        raise CevbError(f"unsupported CEVB dtype: {dtype}")
    ids = []
    for _ in range(count):
        (length,) = struct.unpack_from("<H", data, offset)
        offset += 2
        ids.append(data[offset : offset + length].decode("utf-8"))
        offset += length
    if len(set(ids)) != len(ids):
        raise CevbError("duplicate ids in CEVB file")
    expected = count * dim * 4
    payload = data[offset : offset + expected]
    if len(payload) != expected:
        raise CevbError(f"truncated CEVB payload: {len(payload)} of {expected} bytes")
    values = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    if not np.isfinite(values).all():
        raise CevbError("non-finite values in CEVB file")
    return EmbeddingMatrix(tuple(ids), values.copy())


@dataclass(frozen=True)
class SimilarityMatrix:
    query_ids: tuple[str, ...]
    candidate_ids: tuple[str, ...]
    scores: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float32)
        if scores.shape != (len(self.query_ids), len(self.candidate_ids)):
            raise ValueError(
                f"score shape {scores.shape} does not match "
                f"{len(self.query_ids)} queries x {len(self.candidate_ids)} candidates"
            )
        if not np.isfinite(scores).all():
            raise ValueError("non-finite similarity scores")
        object.__setattr__(self, "scores", scores)

    def row(self, query_id: str) -> np.ndarray:
        try:
            return self.scores[self.query_ids.index(query_id)]
        except ValueError:
            raise EvalError(f"query id not in similarity matrix: {query_id!r}") from None

    def transposed(self) -> "SimilarityMatrix":
        return SimilarityMatrix(self.candidate_ids, self.query_ids, self.scores.T.copy())


def cosine_similarity(queries: EmbeddingMatrix, candidates: EmbeddingMatrix) -> SimilarityMatrix:
    """Cosine scores accumulated in float64; zero-norm rows score 0."""
    if queries.dim != candidates.dim:
        raise EvalError(
            f"embedding dim mismatch: {queries.dim} vs {candidates.dim}"
        )
    q = queries.values.astype(np.float64)
    c = candidates.values.astype(np.float64)
    qn = np.linalg.norm(q, axis=1)
    cn = np.linalg.norm(c, axis=1)
    qn[qn == 0.0] = np.inf  # zero rows divide to 0
    cn[cn == 0.0] = np.inf
    scores = (q / qn[:, None]) @ (c / cn[:, None]).T
    return SimilarityMatrix(queries.ids, candidates.ids, scores.astype(np.float32))


@dataclass(frozen=True)
class GroundTruth:
    """Map from query id to the set of correct candidate ids."""

    truths: Mapping[str, frozenset[str]]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], direction: str) -> "GroundTruth":
        """Orient (caption_id, video_id) pairs for one retrieval direction."""
        if direction not in DIRECTIONS:
            raise EvalError(f"unknown direction: {direction!r}")
        truths: dict[str, set[str]] = {}
        for caption_id, video_id in pairs:
            if direction == "t2v":
                truths.setdefault(caption_id, set()).add(video_id)
            else:
                truths.setdefault(video_id, set()).add(caption_id)
        return cls({query: frozenset(t) for query, t in truths.items()})

    def __len__(self) -> int:
        return len(self.truths)


def rank_of_truth(sim: SimilarityMatrix, gt: GroundTruth, query_id: str) -> int:
    """1-based rank of the best ground-truth candidate (pessimistic ties).

    rank = 1 + |{scores strictly above the truth}| + |{non-truth candidates
    tied with it}|; with several truths the best-ranked one counts.
    """
    truth_ids = gt.truths.get(query_id)
    if not truth_ids:
        raise EvalError(f"query id not in ground truth: {query_id!r}")
    row = sim.row(query_id)
    truth_mask = np.fromiter(
        (cand in truth_ids for cand in sim.candidate_ids), dtype=bool, count=len(row)
    )
    if not truth_mask.any():
        missing = sorted(truth_ids)
        raise EvalError(f"ground-truth candidates missing from matrix: {missing}")
    best = float(row[truth_mask].max())
    above = int((row > best).sum())
    tied_non_truth = int(((row == best) & ~truth_mask).sum())
    return 1 + above + tied_non_truth


def ranks_for(sim: SimilarityMatrix, gt: GroundTruth) -> list[int]:
    """Ranks for every ground-truth query, in sorted query-id order."""
    return [rank_of_truth(sim, gt, query) for query in sorted(gt.truths)]


def recall_at_k(ranks: Sequence[int], k: int) -> float:
    if not len(ranks):
        raise EvalError("no ranks to aggregate")
    hits = sum(1 for rank in ranks if rank <= k)
    return 100.0 * hits / len(ranks)


def median_rank(ranks: Sequence[int]) -> float:
    """Lower median (element at index (n-1)//2 of the sorted ranks)."""
    if not len(ranks):
        raise EvalError("no ranks to aggregate")
    ordered = sorted(ranks)
    return float(ordered[(len(ordered) - 1) // 2])


def mean_rank(ranks: Sequence[int]) -> float:
    if not len(ranks):
        raise EvalError("no ranks to aggregate")
    return float(sum(ranks)) / len(ranks)


@dataclass(frozen=True)
class MetricsReport:
    task_id: str
    direction: str
    r1: float
    r5: float
    r10: float
    median_rank: float
    mean_rank: float
    query_count: int

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "direction": self.direction,
            "r1": self.r1,
            "r5": self.r5,
            "r10": self.r10,
            "median_rank": self.median_rank,
            "mean_rank": self.mean_rank,
            "query_count": self.query_count,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "MetricsReport":
        return cls(
            task_id=payload["task_id"],
            direction=payload["direction"],
            r1=payload["r1"],
            r5=payload["r5"],
            r10=payload["r10"],
            median_rank=payload["median_rank"],
            mean_rank=payload["mean_rank"],
            query_count=payload["query_count"],
        )


def report_from_ranks(ranks: Sequence[int], task_id: str, direction: str) -> MetricsReport:
    return MetricsReport(
        task_id=task_id,
        direction=direction,
        r1=recall_at_k(ranks, 1),
        r5=recall_at_k(ranks, 5),
        r10=recall_at_k(ranks, 10),
        median_rank=median_rank(ranks),
        mean_rank=mean_rank(ranks),
        query_count=len(ranks),
    )


def evaluate_run(
    texts: EmbeddingMatrix,
    videos: EmbeddingMatrix,
    gt: GroundTruth,
    direction: str,
    task_id: str,
) -> MetricsReport:
    """Rank videos per caption (t2v) or captions per video (v2t)."""
    if direction not in DIRECTIONS:
        raise EvalError(f"unknown direction: {direction!r}")
    queries, candidates = (texts, videos) if direction == "t2v" else (videos, texts)
    query_ids = set(queries.ids)
    candidate_ids = set(candidates.ids)
    missing_queries = sorted(q for q in gt.truths if q not in query_ids)
    missing_candidates = sorted(
        {c for t in gt.truths.values() for c in t if c not in candidate_ids}
    )
    if missing_queries or missing_candidates:
        raise EvalError(
            "ground-truth ids missing from embeddings: "
            f"queries={missing_queries} candidates={missing_candidates}"
        )
    sim = cosine_similarity(queries, candidates)
    return report_from_ranks(ranks_for(sim, gt), task_id, direction)


def evaluate_similarity(
    sim: SimilarityMatrix,
    gt: GroundTruth,
    direction: str,
    task_id: str,
) -> MetricsReport:
    """Metrics straight from a precomputed similarity matrix."""
    return report_from_ranks(ranks_for(sim, gt), task_id, direction)


# -- similarity CSV ---------------------------------------------------------------


def write_similarity_csv(sim: SimilarityMatrix, path: Path | str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["query_id", *sim.candidate_ids])
        for query_id, row in zip(sim.query_ids, sim.scores):
            writer.writerow([query_id, *(repr(float(value)) for value in row)])


def read_similarity_csv(path: Path | str) -> SimilarityMatrix:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EvalError(f"empty similarity CSV: {path}") from None
        candidate_ids = tuple(header[1:])
        query_ids: list[str] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(candidate_ids) + 1:
                raise EvalError(
                    f"{path}: line {line_no}: expected {len(candidate_ids) + 1} fields, got {len(row)}"
                )
            query_ids.append(row[0])
            rows.append([float(value) for value in row[1:]])
    return SimilarityMatrix(tuple(query_ids), candidate_ids, np.asarray(rows, dtype=np.float32))
