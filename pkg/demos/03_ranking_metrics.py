"""
Cosine scoring and ranking metrics with pessimistic ties
========================================================

The metric harness consumes embedding matrices (or a raw similarity
matrix), ranks the ground truth per query, and aggregates R@K, median rank
(lower median), and mean rank. Ties count against retrieval, so a constant
similarity row cannot score well by accident.
"""

import numpy as np

from capbench.retrieval import (
    EmbeddingMatrix,
    GroundTruth,
    SimilarityMatrix,
    evaluate_run,
    rank_of_truth,
    report_from_ranks,
)

rng = np.random.default_rng(0)

# ten captions, ten videos; video i's vector is caption i's vector plus noise
dim = 8
caption_vecs = rng.normal(size=(10, dim)).astype(np.float32)
video_vecs = (caption_vecs + 1.2 * rng.normal(size=(10, dim))).astype(np.float32)

texts = EmbeddingMatrix(tuple(f"cap{i}" for i in range(10)), caption_vecs)
videos = EmbeddingMatrix(tuple(f"vid{i}" for i in range(10)), video_vecs)
pairs = [(f"cap{i}", f"vid{i}") for i in range(10)]

for direction in ("t2v", "v2t"):
    gt = GroundTruth.from_pairs(pairs, direction)
    report = evaluate_run(texts, videos, gt, direction, "noisy")
    print(
        f"{direction}: R@1 {report.r1:5.1f}  R@5 {report.r5:5.1f}  "
        f"R@10 {report.r10:5.1f}  MdR {report.median_rank:.0f}  MnR {report.mean_rank:.2f}"
    )

# pessimistic tie handling in isolation
sim = SimilarityMatrix(("q",), ("truth", "tied", "low"),
                       np.array([[0.5, 0.5, 0.1]], dtype=np.float32))
gt = GroundTruth({"q": frozenset({"truth"})})
print(f"\nrank with a tied non-truth candidate: {rank_of_truth(sim, gt, 'q')} (not 1)")

# ranks in, report out
report = report_from_ranks([1, 2, 3, 4], "demo", "t2v")
print(f"ranks [1,2,3,4] -> R@1 {report.r1}, MdR {report.median_rank} (lower median)")
