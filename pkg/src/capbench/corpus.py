"""Dataset loaders and the canonical caption-corpus format.

Three annotation schemas are supported: MSRVTT-style (one JSON file of
sentences plus a split CSV), MSVD-style (a TSV of video/caption pairs plus
per-split video-id lists), and DiDeMo-style (per-split JSON of sentence
descriptions, concatenated into one paragraph per video). Videos are never
read; only ids flow through.

The canonical corpus is JSON Lines sorted by caption_id, with a sidecar
manifest carrying counts and a SHA-256 content digest so corrupt files are
caught on read.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

DATASETS = ("msrvtt", "msvd", "didemo")
SPLITS = ("train", "test")


class CorpusError(ValueError):
    pass


@dataclass(frozen=True)
class CaptionRecord:
    caption_id: str
    video_id: str
    text: str
    split: str
    dataset: str


@dataclass(frozen=True)
class CorpusManifest:
    dataset: str
    split: str
    record_count: int
    video_count: int
    digest: str


def _check_split(split: str) -> None:
    if split not in SPLITS:
        raise CorpusError(f"unknown split name: {split!r} (expected one of {SPLITS})")


def _check_unique(records: Sequence[CaptionRecord]) -> None:
    seen: dict[str, str] = {}
    for record in records:
        if record.caption_id in seen:
            raise CorpusError(f"duplicate caption_id: {record.caption_id!r}")
        seen[record.caption_id] = record.video_id


# -- MSRVTT --------------------------------------------------------------------


def load_msrvtt(
    annotation_path: Path | str,
    split_path: Path | str,
    split: str,
    all_test_captions: bool = False,
    caption_field: str = "caption",
    video_field: str = "video_id",
) -> list[CaptionRecord]:
    """Load MSRVTT captions for one split of the 9k protocol.

    ``annotation_path`` is the dataset JSON with a ``sentences`` array;
    ``split_path`` is a CSV of the split's video ids. A test CSV may carry a
    ``sentence`` column (the standard one-caption-per-video pairing), in
    which case exactly those pairs are returned; otherwise the first caption
    of each test video is used unless ``all_test_captions`` is set.
    """
    _check_split(split)
    with open(annotation_path, encoding="utf-8") as handle:
        annotation = json.load(handle)
    sentences = annotation.get("sentences", [])
    if not sentences:
        raise CorpusError(f"no records in annotation file: {annotation_path}")

    known_videos: set[str] | None = None
    if "videos" in annotation:
        known_videos = {video[video_field] for video in annotation["videos"]}

    by_video: dict[str, list[str]] = {}
    for entry in sentences:
        video_id = entry[video_field]
        if known_videos is not None and video_id not in known_videos:
            raise CorpusError(f"caption references missing video: {video_id!r}")
        by_video.setdefault(video_id, []).append(entry[caption_field])

    with open(split_path, encoding="utf-8", newline="") as handle:
        rows = list(csv.DictReader(handle))
    if not rows:
        raise CorpusError(f"empty split file: {split_path}")

    records: list[CaptionRecord] = []
    paired = split == "test" and not all_test_captions and "sentence" in rows[0]
    for row in rows:
        video_id = row[video_field]
        if paired:
            records.append(
                CaptionRecord(f"{video_id}#t", video_id, row["sentence"], split, "msrvtt")
            )
            continue
        captions = by_video.get(video_id)
        if not captions:
            raise CorpusError(f"split video has no captions: {video_id!r}")
        if split == "test" and not all_test_captions:
            captions = captions[:1]
        for i, text in enumerate(captions):
            records.append(
                CaptionRecord(f"{video_id}#{i}", video_id, text, split, "msrvtt")
            )
    _check_unique(records)
    return records


# -- MSVD ----------------------------------------------------------------------


def load_msvd(
    caption_path: Path | str,
    split_lists: Mapping[str, Path | str],
    split: str,
) -> list[CaptionRecord]:
    """Load MSVD captions (``video_id<TAB>caption`` lines, multi-caption videos)."""
    _check_split(split)
    if split not in split_lists:
        raise CorpusError(f"no split list supplied for {split!r}")

    by_video: dict[str, list[str]] = {}
    with open(caption_path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise CorpusError(
                    f"{caption_path}: line {line_no}: expected 'video_id<TAB>caption'"
                )
            by_video.setdefault(parts[0], []).append(parts[1])
    if not by_video:
        raise CorpusError(f"no records in caption file: {caption_path}")

    with open(split_lists[split], encoding="utf-8") as handle:
        video_ids = [line.strip() for line in handle if line.strip()]

    records: list[CaptionRecord] = []
    for video_id in video_ids:
        captions = by_video.get(video_id)
        if not captions:
            raise CorpusError(f"split video has no captions: {video_id!r}")
        for i, text in enumerate(captions):
            records.append(CaptionRecord(f"{video_id}#{i}", video_id, text, split, "msvd"))
    _check_unique(records)
    return records


# -- DiDeMo --------------------------------------------------------------------


def load_didemo(
    annotation_path: Path | str,
    split: str,
    video_field: str = "video",
    description_field: str = "description",
) -> list[CaptionRecord]:
    """Load DiDeMo descriptions, concatenated into one paragraph per video.

    The annotation JSON is a list of ``{video, description}`` entries; all of
    a video's sentences are joined with single spaces in annotation order
    (paragraph-to-video protocol), yielding exactly one record per video.
    """
    _check_split(split)
    with open(annotation_path, encoding="utf-8") as handle:
        entries = json.load(handle)
    if not entries:
        raise CorpusError(f"no records in annotation file: {annotation_path}")

    by_video: dict[str, list[str]] = {}
    for entry in entries:
        by_video.setdefault(entry[video_field], []).append(entry[description_field])

    records = [
        CaptionRecord(
            f"{video_id}#p",
            video_id,
            " ".join(sentence.strip() for sentence in sentences),
            split,
            "didemo",
        )
        for video_id, sentences in by_video.items()
    ]
    _check_unique(records)
    return records


# -- canonical corpus format -----------------------------------------------------


def _manifest_path(path: Path) -> Path:
    return path.with_name(path.name + ".manifest.json")


def write_corpus(records: Sequence[CaptionRecord], path: Path | str) -> CorpusManifest:
    """Write the canonical JSONL corpus plus its digest manifest."""
    path = Path(path)
    _check_unique(records)
    ordered = sorted(records, key=lambda r: r.caption_id)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in ordered:
            payload = {
                "caption_id": record.caption_id,
                "video_id": record.video_id,
                "text": record.text,
                "split": record.split,
                "dataset": record.dataset,
            }
            handle.write(json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":")))
            handle.write("\n")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    manifest = CorpusManifest(
        dataset="|".join(sorted({r.dataset for r in ordered})) or "empty",
        split="|".join(sorted({r.split for r in ordered})) or "empty",
        record_count=len(ordered),
        video_count=len({r.video_id for r in ordered}),
        digest=digest,
    )
    with open(_manifest_path(path), "w", encoding="utf-8", newline="\n") as handle:
        json.dump(manifest.__dict__, handle, ensure_ascii=False, sort_keys=True)
        handle.write("\n")
    return manifest


def read_corpus(path: Path | str, verify: bool = True) -> list[CaptionRecord]:
    """Read a canonical corpus, checking the digest manifest when present."""
    path = Path(path)
    manifest_path = _manifest_path(path)
    if verify and manifest_path.exists():
        with open(manifest_path, encoding="utf-8") as handle:
            manifest = json.load(handle)
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        if digest != manifest["digest"]:
            raise CorpusError(f"corpus digest mismatch (corrupt file?): {path}")
    records: list[CaptionRecord] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {line_no}: {exc}") from exc
            records.append(
                CaptionRecord(
                    payload["caption_id"],
                    payload["video_id"],
                    payload["text"],
                    payload["split"],
                    payload["dataset"],
                )
            )
    _check_unique(records)
    return records


def index_by_caption_id(records: Iterable[CaptionRecord]) -> dict[str, CaptionRecord]:
    return {record.caption_id: record for record in records}


# -- dataset adapter configs ------------------------------------------------------


def load_adapter_config(path: Path | str) -> dict[str, str]:
    """Parse a flat ``key = value`` adapter config (TOML-style, strings only)."""
    config: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CorpusError(f"{path}: line {line_no}: expected 'key = value'")
            key, _, value = line.partition("=")
            value = value.strip()
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "'\"":
                value = value[1:-1]
            config[key.strip()] = value
    return config


def load_dataset(config: Mapping[str, str], split: str, base_dir: Path | str = ".") -> list[CaptionRecord]:
    """Load a dataset as described by an adapter config."""
    base = Path(base_dir)
    dataset = config.get("dataset")
    if dataset == "msrvtt":
        return load_msrvtt(
            base / config["annotations"],
            base / config[f"split_{split}"],
            split,
            all_test_captions=config.get("all_test_captions", "") == "true",
            caption_field=config.get("caption_field", "caption"),
            video_field=config.get("video_field", "video_id"),
        )
    if dataset == "msvd":
        split_lists = {
            name: base / config[f"split_{name}"]
            for name in SPLITS
            if f"split_{name}" in config
        }
        return load_msvd(base / config["captions"], split_lists, split)
    if dataset == "didemo":
        return load_didemo(
            base / config[f"annotations_{split}"],
            split,
            video_field=config.get("video_field", "video"),
            description_field=config.get("description_field", "description"),
        )
    raise CorpusError(f"unknown dataset in adapter config: {dataset!r}")
