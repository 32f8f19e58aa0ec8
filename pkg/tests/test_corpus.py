import json

import pytest

from capbench.corpus import (
    CaptionRecord,
    CorpusError,
    index_by_caption_id,
    load_adapter_config,
    load_dataset,
    load_didemo,
    load_msrvtt,
    load_msvd,
    read_corpus,
    write_corpus,
)


class TestMsrvtt:
    def test_train_split_loads_all_captions(self, data_dir):
        records = load_msrvtt(
            data_dir / "msrvtt_mini.json", data_dir / "msrvtt_train_mini.csv", "train"
        )
        assert len(records) == 8  # every caption of the 4 train videos
        assert {r.video_id for r in records} == {"video1", "video2", "video3", "video4"}
        assert all(r.dataset == "msrvtt" and r.split == "train" for r in records)

    def test_test_split_is_one_caption_per_video(self, data_dir):
        records = load_msrvtt(
            data_dir / "msrvtt_mini.json", data_dir / "msrvtt_test_mini.csv", "test"
        )
        assert len(records) == 2
        assert len({r.video_id for r in records}) == 2
        by_vid = {r.video_id: r.text for r in records}
        assert by_vid["video5"] == "a guy wearing a red shirt drives a car while talking"

    def test_unknown_split_rejected(self, data_dir):
        with pytest.raises(CorpusError, match="unknown split"):
            load_msrvtt(
                data_dir / "msrvtt_mini.json", data_dir / "msrvtt_test_mini.csv", "dev"
            )

    def test_empty_annotation_rejected(self, tmp_path, data_dir):
        path = tmp_path / "empty.json"
        path.write_text('{"sentences": []}', encoding="utf-8")
        with pytest.raises(CorpusError, match="no records"):
            load_msrvtt(path, data_dir / "msrvtt_train_mini.csv", "train")

    def test_caption_for_unlisted_video_rejected(self, tmp_path, data_dir):
        payload = {
            "videos": [{"video_id": "video1"}],
            "sentences": [
                {"video_id": "video1", "caption": "a", "sen_id": 0},
                {"video_id": "ghost", "caption": "b", "sen_id": 1},
            ],
        }
        path = tmp_path / "ann.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(CorpusError, match="missing video"):
            load_msrvtt(path, data_dir / "msrvtt_train_mini.csv", "train")

    def test_split_video_without_captions_rejected(self, tmp_path, data_dir):
        split = tmp_path / "split.csv"
        split.write_text("video_id\nvideo1\nvideo99\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="video99"):
            load_msrvtt(data_dir / "msrvtt_mini.json", split, "train")


class TestMsvd:
    def split_lists(self, data_dir):
        return {
            "train": data_dir / "msvd_train_mini.txt",
            "test": data_dir / "msvd_test_mini.txt",
        }

    def test_test_split_covers_videos_with_all_captions(self, data_dir):
        records = load_msvd(data_dir / "msvd_mini.tsv", self.split_lists(data_dir), "test")
        assert {r.video_id for r in records} == {"vidC", "vidD"}
        per_video = {}
        for r in records:
            per_video.setdefault(r.video_id, []).append(r)
        assert len(per_video["vidC"]) == 1
        assert len(per_video["vidD"]) == 2  # multi-caption video preserved

    def test_train_split(self, data_dir):
        records = load_msvd(data_dir / "msvd_mini.tsv", self.split_lists(data_dir), "train")
        assert {r.video_id for r in records} == {"vidA", "vidB"}
        assert len(records) == 5

    def test_multi_caption_video_shares_video_id(self, data_dir):
        records = load_msvd(data_dir / "msvd_mini.tsv", self.split_lists(data_dir), "train")
        vid_a = [r for r in records if r.video_id == "vidA"]
        assert len(vid_a) == 3
        assert len({r.caption_id for r in vid_a}) == 3

    def test_missing_split_list_rejected(self, data_dir):
        with pytest.raises(CorpusError, match="no split list"):
            load_msvd(data_dir / "msvd_mini.tsv", {"train": data_dir / "msvd_train_mini.txt"}, "test")


class TestDidemo:
    def test_sentences_concatenated_in_order(self, data_dir):
        records = load_didemo(data_dir / "didemo_mini.json", "test")
        by_vid = {r.video_id: r.text for r in records}
        assert by_vid["d1"] == (
            "a dog runs into the water. the dog shakes itself dry. it fetches a stick."
        )

    def test_single_sentence_video_unchanged(self, data_dir):
        records = load_didemo(data_dir / "didemo_mini.json", "test")
        by_vid = {r.video_id: r.text for r in records}
        assert by_vid["d2"] == "a girl waves at the camera."

    def test_one_record_per_video(self, data_dir):
        records = load_didemo(data_dir / "didemo_mini.json", "test")
        assert len(records) == 3
        assert len({r.video_id for r in records}) == 3

    def test_empty_annotation_rejected(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text("[]", encoding="utf-8")
        with pytest.raises(CorpusError, match="no records"):
            load_didemo(path, "test")


class TestCanonicalCorpus:
    def records(self):
        return [
            CaptionRecord("b#0", "vb", "second text", "test", "msvd"),
            CaptionRecord("a#0", "va", "first text", "test", "msvd"),
            CaptionRecord("a#1", "va", "also first video", "test", "msvd"),
        ]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        manifest = write_corpus(self.records(), path)
        assert manifest.record_count == 3
        assert manifest.video_count == 2
        loaded = read_corpus(path)
        assert set(loaded) == set(self.records())
        assert [r.caption_id for r in loaded] == ["a#0", "a#1", "b#0"]  # sorted on write

    def test_corrupt_file_detected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_corpus(self.records(), path)
        data = bytearray(path.read_bytes())
        data[len(data) // 2] ^= 0xFF
        path.write_bytes(bytes(data))
        with pytest.raises(CorpusError, match="digest mismatch"):
            read_corpus(path)

    def test_duplicate_caption_ids_rejected(self, tmp_path):
        records = [
            CaptionRecord("a#0", "va", "x", "test", "msvd"),
            CaptionRecord("a#0", "vb", "y", "test", "msvd"),
        ]
        with pytest.raises(CorpusError, match="duplicate"):
            write_corpus(records, tmp_path / "corpus.jsonl")

    def test_index_by_caption_id(self):
        index = index_by_caption_id(self.records())
        assert index["a#1"].text == "also first video"


class TestAdapterConfig:
    def test_parse_and_dispatch(self, tmp_path, data_dir):
        config_path = tmp_path / "msrvtt.conf"
        config_path.write_text(
            "# adapter for the mini fixture\n"
            "dataset = msrvtt\n"
            f"annotations = {data_dir}/msrvtt_mini.json\n"
            f"split_train = {data_dir}/msrvtt_train_mini.csv\n"
            f"split_test = {data_dir}/msrvtt_test_mini.csv\n"
            'caption_field = "caption"\n',
            encoding="utf-8",
        )
        config = load_adapter_config(config_path)
        assert config["dataset"] == "msrvtt"
        assert config["caption_field"] == "caption"  # quotes stripped
        records = load_dataset(config, "test", base_dir=tmp_path)
        assert len(records) == 2

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("dataset msrvtt\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="line 1"):
            load_adapter_config(path)

    def test_unknown_dataset_rejected(self, tmp_path):
        path = tmp_path / "odd.conf"
        path.write_text("dataset = pets\n", encoding="utf-8")
        with pytest.raises(CorpusError, match="unknown dataset"):
            load_dataset(load_adapter_config(path), "test")
