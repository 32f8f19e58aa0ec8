"""Regenerate the adapter's mock-parity fixtures.

Writes a small manifest of varied captions plus the CEVB file the primary
mock encoder produces for it. The adapter test suite re-encodes the same
manifest and must match the CEVB byte for byte.
"""

import json
from pathlib import Path

from capbench.mock import mock_encode_many
from capbench.retrieval import EmbeddingMatrix, write_cevb

FIXTURES = Path(__file__).resolve().parent.parent / "adapter" / "test" / "fixtures"

CAPTIONS = [
    ("parity#00", "vid00", "a guy wearing a red shirt drives a car while talking"),
    ("parity#01", "vid01", ""),
    ("parity#02", "vid02", "man, running!"),
    ("parity#03", "vid03", "it's the dog's ball"),
    ("parity#04", "vid04", "café naïve 猫 🐱 2cats"),
    ("parity#05", "vid05", "dog dog dog runs"),
    ("parity#06", "vid06", "THE Quick BROWN fox"),
    ("parity#07", "vid07", "numbers 123 and 456 , with (brackets)"),
]


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    manifest_path = FIXTURES / "parity_manifest.jsonl"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as handle:
        for caption_id, video_id, text in CAPTIONS:
            record = {
                "caption_id": caption_id,
                "video_id": video_id,
                "task_id": "original",
                "text": text,
                "provenance": list(range(len(text.split()))),
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":")))
            handle.write("\n")

    matrix = EmbeddingMatrix(
        tuple(c[0] for c in CAPTIONS),
        mock_encode_many(c[2] for c in CAPTIONS),
    )
    write_cevb(FIXTURES / "parity_expected.cevb", matrix)
    print(f"wrote {manifest_path} and parity_expected.cevb ({len(CAPTIONS)} rows)")


if __name__ == "__main__":
    main()
