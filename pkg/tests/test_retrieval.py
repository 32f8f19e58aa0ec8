import numpy as np
import pytest

from capbench.retrieval import (
    CevbError,
    EmbeddingMatrix,
    EvalError,
    GroundTruth,
    SimilarityMatrix,
    cosine_similarity,
    evaluate_run,
    evaluate_similarity,
    load_embeddings,
    mean_rank,
    median_rank,
    rank_of_truth,
    ranks_for,
    read_similarity_csv,
    recall_at_k,
    write_cevb,
    write_similarity_csv,
)
from capbench.rng import SeededRng


def oracle_rank(scores, truth_indices) -> int:
    """Brute-force rank: full sort, non-truth candidates ahead on ties."""
    order = sorted(
        range(len(scores)),
        key=lambda j: (-scores[j], j in truth_indices),
    )
    return 1 + min(order.index(j) for j in truth_indices)


def emb(ids, rows) -> EmbeddingMatrix:
    return EmbeddingMatrix(tuple(ids), np.asarray(rows, dtype=np.float32))


class TestEmbeddingMatrix:
    def test_validates_shape_and_ids(self):
        with pytest.raises(ValueError, match="ids"):
            emb(["a"], [[1, 0], [0, 1]])
        with pytest.raises(ValueError, match="duplicate"):
            emb(["a", "a"], [[1, 0], [0, 1]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            emb(["a"], [[np.nan, 0.0]])


class TestCevb:
    def test_round_trip(self, tmp_path):
        matrix = emb(["cap#1", "cap#2"], [[1.0, 2.0, 3.0, 4.0], [0.5, -0.5, 0.25, 8.0]])
        path = tmp_path / "emb.cevb"
        write_cevb(path, matrix)
        loaded = load_embeddings(path)
        assert loaded.ids == ("cap#1", "cap#2")
        assert loaded.dim == 4
        assert np.array_equal(loaded.values, matrix.values)

    def test_layout_is_bit_exact(self, tmp_path):
        matrix = emb(["ab"], [[1.0]])
        path = tmp_path / "one.cevb"
        write_cevb(path, matrix)
        data = path.read_bytes()
        expected = (
            b"CEVB"
            + (1).to_bytes(4, "little")
            + (1).to_bytes(8, "little")
            + (1).to_bytes(4, "little")
            + b"\x00"
            + (2).to_bytes(2, "little")
            + b"ab"
            + np.float32(1.0).tobytes()
        )
        assert data == expected

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.cevb"
        path.write_bytes(b"NOPE" + b"\x00" * 32)
        with pytest.raises(CevbError, match="bad magic"):
            load_embeddings(path)

    def test_unsupported_version(self, tmp_path):
        matrix = emb(["a"], [[1.0]])
        path = tmp_path / "v2.cevb"
        write_cevb(path, matrix)
        data = bytearray(path.read_bytes())
        data[4] = 2
        path.write_bytes(bytes(data))
        with pytest.raises(CevbError, match="version"):
            load_embeddings(path)

    def test_nan_payload_rejected(self, tmp_path):
        matrix = emb(["a"], [[1.0]])
        path = tmp_path / "nan.cevb"
        write_cevb(path, matrix)
        data = bytearray(path.read_bytes())
        data[-4:] = np.float32(np.nan).tobytes()
        path.write_bytes(bytes(data))
        with pytest.raises(CevbError, match="non-finite"):
            load_embeddings(path)

    def test_truncated_payload_rejected(self, tmp_path):
        matrix = emb(["a", "b"], [[1.0, 2.0], [3.0, 4.0]])
        path = tmp_path / "cut.cevb"
        write_cevb(path, matrix)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(CevbError, match="truncated"):
            load_embeddings(path)

    def test_unicode_ids(self, tmp_path):
        matrix = emb(["vidéo_クリップ"], [[0.0, 1.0]])
        path = tmp_path / "uni.cevb"
        write_cevb(path, matrix)
        assert load_embeddings(path).ids == ("vidéo_クリップ",)


class TestCosine:
    def test_identical_unit_vectors(self):
        sim = cosine_similarity(emb(["t"], [[1.0, 0.0]]), emb(["v"], [[1.0, 0.0]]))
        assert sim.scores[0, 0] == pytest.approx(1.0)

    def test_orthogonal(self):
        sim = cosine_similarity(emb(["t"], [[1.0, 0.0]]), emb(["v"], [[0.0, 1.0]]))
        assert sim.scores[0, 0] == pytest.approx(0.0)

    def test_hand_computed_angle(self):
        inv = 1.0 / np.sqrt(2.0)
        sim = cosine_similarity(emb(["t"], [[inv, inv]]), emb(["v"], [[1.0, 0.0]]))
        assert sim.scores[0, 0] == pytest.approx(0.7071, abs=1e-4)

    def test_zero_rows_score_zero(self):
        sim = cosine_similarity(emb(["t"], [[0.0, 0.0]]), emb(["v"], [[1.0, 0.0]]))
        assert sim.scores[0, 0] == 0.0

    def test_dim_mismatch(self):
        with pytest.raises(EvalError, match="dim mismatch"):
            cosine_similarity(emb(["t"], [[1.0]]), emb(["v"], [[1.0, 0.0]]))


class TestRanks:
    def sim(self, rows, queries=None, candidates=None):
        rows = np.asarray(rows, dtype=np.float32)
        queries = queries or tuple(f"q{i}" for i in range(rows.shape[0]))
        candidates = candidates or tuple(f"c{j}" for j in range(rows.shape[1]))
        return SimilarityMatrix(tuple(queries), tuple(candidates), rows)

    def test_truth_on_top(self):
        sim = self.sim([[0.9, 0.1]])
        gt = GroundTruth({"q0": frozenset({"c0"})})
        assert rank_of_truth(sim, gt, "q0") == 1

    def test_truth_second(self):
        sim = self.sim([[0.8, 0.2]])
        gt = GroundTruth({"q0": frozenset({"c1"})})
        assert rank_of_truth(sim, gt, "q0") == 2

    def test_pessimistic_tie(self):
        sim = self.sim([[0.5, 0.5]])
        gt = GroundTruth({"q0": frozenset({"c0"})})
        assert rank_of_truth(sim, gt, "q0") == 2

    def test_multi_truth_uses_best(self):
        sim = self.sim([[0.1, 0.9, 0.5]])
        gt = GroundTruth({"q0": frozenset({"c0", "c1"})})
        assert rank_of_truth(sim, gt, "q0") == 1

    def test_tied_truths_do_not_penalize_each_other(self):
        sim = self.sim([[0.5, 0.5, 0.1]])
        gt = GroundTruth({"q0": frozenset({"c0", "c1"})})
        assert rank_of_truth(sim, gt, "q0") == 1

    def test_missing_query_rejected(self):
        sim = self.sim([[0.5]])
        gt = GroundTruth({"q9": frozenset({"c0"})})
        with pytest.raises(EvalError, match="not in ground truth.*q0"):
            rank_of_truth(sim, gt, "q0")
        with pytest.raises(EvalError, match="similarity matrix"):
            rank_of_truth(sim, GroundTruth({"ghost": frozenset({"c0"})}), "ghost")


class TestMetricFunctions:
    def test_identity_matrix_is_perfect(self):
        sim = SimilarityMatrix(
            ("q0", "q1", "q2"), ("c0", "c1", "c2"), np.eye(3, dtype=np.float32)
        )
        gt = GroundTruth({f"q{i}": frozenset({f"c{i}"}) for i in range(3)})
        ranks = ranks_for(sim, gt)
        assert recall_at_k(ranks, 1) == 100.0
        assert median_rank(ranks) == 1

    def test_hand_computed_aggregates(self):
        ranks = [1, 2, 3, 4]
        assert recall_at_k(ranks, 1) == 25.0
        assert median_rank(ranks) == 2  # lower median
        assert mean_rank(ranks) == 2.5

    def test_empty_ranks_rejected(self):
        for fn in (lambda r: recall_at_k(r, 1), median_rank, mean_rank):
            with pytest.raises(EvalError):
                fn([])


class TestOracleEquivalence:
    def test_random_matrices_match_brute_force(self):
        rng = SeededRng(4242)
        trials = 300
        for _ in range(trials):
            m = 1 + rng.below(16)
            n = 1 + rng.below(16)
            # quantized scores force plenty of ties
            scores = np.array(
                [[rng.below(5) / 4.0 for _ in range(n)] for _ in range(m)],
                dtype=np.float32,
            )
            queries = tuple(f"q{i}" for i in range(m))
            candidates = tuple(f"c{j}" for j in range(n))
            sim = SimilarityMatrix(queries, candidates, scores)
            truths = {
                f"q{i}": frozenset(
                    f"c{rng.below(n)}" for _ in range(1 + rng.below(min(3, n)))
                )
                for i in range(m)
            }
            gt = GroundTruth(truths)
            for i, query in enumerate(sorted(truths)):
                truth_idx = {candidates.index(c) for c in truths[query]}
                row = scores[queries.index(query)]
                assert rank_of_truth(sim, gt, query) == oracle_rank(list(row), truth_idx)


class TestEvaluateRun:
    def test_perfect_embeddings_score_100_both_ways(self):
        values = np.eye(4, dtype=np.float32)
        texts = emb([f"cap{i}" for i in range(4)], values)
        videos = emb([f"vid{i}" for i in range(4)], values)
        pairs = [(f"cap{i}", f"vid{i}") for i in range(4)]
        for direction in ("t2v", "v2t"):
            report = evaluate_run(
                texts, videos, GroundTruth.from_pairs(pairs, direction), direction, "original"
            )
            assert report.r1 == 100.0
            assert report.median_rank == 1
            assert report.query_count == 4

    def test_multi_caption_video_best_truth_v2t(self):
        texts = emb(["capA", "capB"], [[1.0, 0.0], [0.0, 1.0]])
        videos = emb(["vid"], [[1.0, 0.0]])
        gt = GroundTruth.from_pairs([("capA", "vid"), ("capB", "vid")], "v2t")
        report = evaluate_run(texts, videos, gt, "v2t", "original")
        assert report.r1 == 100.0  # capA ranks first, so the video scores rank 1

    def test_missing_ids_listed(self):
        texts = emb(["capA"], [[1.0, 0.0]])
        videos = emb(["vid0"], [[1.0, 0.0]])
        gt = GroundTruth.from_pairs([("capA", "vid0"), ("capZ", "vid9")], "t2v")
        with pytest.raises(EvalError, match="capZ") as err:
            evaluate_run(texts, videos, gt, "t2v", "original")
        assert "vid9" in str(err.value)

    def test_fixture_matrix_matches_hand_ranks(self):
        scores = np.array(
            [
                [0.9, 0.8, 0.1, 0.0],
                [0.2, 0.3, 0.4, 0.1],
                [0.5, 0.5, 0.5, 0.5],
                [0.0, 0.1, 0.2, 0.9],
            ],
            dtype=np.float32,
        )
        sim = SimilarityMatrix(
            ("q0", "q1", "q2", "q3"), ("c0", "c1", "c2", "c3"), scores
        )
        gt = GroundTruth({f"q{i}": frozenset({f"c{i}"}) for i in range(4)})
        # hand ranks: q0 -> 1; q1 truth c1=0.3 behind 0.4 -> 2;
        # q2 all tied -> 4 (pessimistic); q3 -> 1
        report = evaluate_similarity(sim, gt, "t2v", "fixture")
        assert ranks_for(sim, gt) == [1, 2, 4, 1]
        assert report.r1 == 50.0
        assert report.median_rank == 1  # lower median of [1, 1, 2, 4]
        assert report.mean_rank == 2.0


class TestMetricInvariances:
    def test_candidate_permutation_invariance(self):
        rng = SeededRng(11)
        scores = np.array(
            [[rng.below(100) / 10.0 for _ in range(8)] for _ in range(5)],
            dtype=np.float32,
        )
        queries = tuple(f"q{i}" for i in range(5))
        candidates = tuple(f"c{j}" for j in range(8))
        gt = GroundTruth({f"q{i}": frozenset({f"c{i}"}) for i in range(5)})
        base = ranks_for(SimilarityMatrix(queries, candidates, scores), gt)
        perm = rng.shuffled(range(8))
        shuffled = SimilarityMatrix(
            queries,
            tuple(candidates[j] for j in perm),
            scores[:, perm],
        )
        assert ranks_for(shuffled, gt) == base

    def test_raising_truth_score_never_worsens_rank(self):
        rng = SeededRng(13)
        scores = np.array([[rng.below(10) / 3.0 for _ in range(10)]], dtype=np.float32)
        candidates = tuple(f"c{j}" for j in range(10))
        gt = GroundTruth({"q0": frozenset({"c4"})})
        before = rank_of_truth(SimilarityMatrix(("q0",), candidates, scores), gt, "q0")
        boosted = scores.copy()
        boosted[0, 4] += 1.0
        after = rank_of_truth(SimilarityMatrix(("q0",), candidates, boosted), gt, "q0")
        assert after <= before

    def test_row_scaling_leaves_reports_unchanged(self):
        rng = SeededRng(17)
        values = np.array(
            [[rng.below(1000) / 250.0 - 2.0 for _ in range(6)] for _ in range(6)],
            dtype=np.float32,
        )
        texts = emb([f"cap{i}" for i in range(6)], values)
        videos = emb([f"vid{i}" for i in range(6)], values[::-1].copy())
        pairs = [(f"cap{i}", f"vid{i}") for i in range(6)]
        gt = GroundTruth.from_pairs(pairs, "t2v")
        base = evaluate_run(texts, videos, gt, "t2v", "x")
        scaled_rows = values * np.array([[3.0], [1.0], [0.5], [7.0], [2.0], [1.25]], dtype=np.float32)
        scaled = emb([f"cap{i}" for i in range(6)], scaled_rows)
        assert evaluate_run(scaled, videos, gt, "t2v", "x") == base


class TestSimilarityCsv:
    def test_round_trip(self, tmp_path):
        scores = np.array([[0.125, -1.5], [2.0, 0.0]], dtype=np.float32)
        sim = SimilarityMatrix(("qa", "qb"), ("c1", "c2"), scores)
        path = tmp_path / "sim.csv"
        write_similarity_csv(sim, path)
        loaded = read_similarity_csv(path)
        assert loaded.query_ids == sim.query_ids
        assert loaded.candidate_ids == sim.candidate_ids
        assert np.array_equal(loaded.scores, sim.scores)

    def test_transposed(self):
        sim = SimilarityMatrix(("q",), ("a", "b"), np.array([[1.0, 2.0]], dtype=np.float32))
        t = sim.transposed()
        assert t.query_ids == ("a", "b")
        assert t.scores.shape == (2, 1)

    def test_ragged_row_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("query_id,c1,c2\nq0,1.0\n", encoding="utf-8")
        with pytest.raises(EvalError, match="line 2"):
            read_similarity_csv(path)
