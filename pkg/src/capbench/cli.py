"""Command-line pipeline: ingest, tag, perturb, evaluate, report.

Subcommands: ``perturb``, ``eval``, ``report``, ``tag-train``, ``vocab``.
Exit codes: 0 success, 1 usage error, 2 data/alignment error, 3 I/O error.
Each successful command writes a ``run.json`` provenance record into its
output directory; failures leave an ``errors.json`` summary there instead.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import (
    CorpusError,
    index_by_caption_id,
    load_adapter_config,
    load_dataset,
    read_corpus,
)
from .mock import mock_encode_many
from .perturb import (
    ALL_KINDS,
    ORIGINAL_TASK_ID,
    REPLACEMENT_KINDS,
    Lexicon,
    PerturbationKind,
    PerturbError,
    ReplacementVocab,
    apply_suite,
    build_vocab,
    load_lexicon,
    read_manifest,
)
from .report import FORMATS, RunComparison, emit, emit_deltas
from .retrieval import (
    EmbeddingMatrix,
    EvalError,
    GroundTruth,
    MetricsReport,
    evaluate_run,
    evaluate_similarity,
    load_embeddings,
    read_similarity_csv,
)
from .tagger import PerceptronTagger, TaggerError, read_treebank, train_tagger
from .textproc import SidecarError, TaggedCaption, read_sidecar, tokenize

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

_FORMAT_EXT = {"markdown": "md", "csv": "csv", "json": "json"}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage problems; remap to the documented code 1."""

    def error(self, message):
        raise CliError(EXIT_USAGE, message)


def _parse_tasks(spec: str) -> list[PerturbationKind]:
    if spec == "all":
        return list(ALL_KINDS)
    by_id = {kind.task_id: kind for kind in ALL_KINDS}
    kinds = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if part not in by_id:
            raise CliError(EXIT_USAGE, f"unknown task id: {part!r}")
        kinds.append(by_id[part])
    if not kinds:
        raise CliError(EXIT_USAGE, "no tasks selected")
    return kinds


def _config_dict(args: argparse.Namespace) -> dict:
    def plain(value):
        if isinstance(value, Path):
            return str(value)
        if isinstance(value, list):
            return [plain(v) for v in value]
        return value

    return {
        key: plain(value)
        for key, value in sorted(vars(args).items())
        if key not in ("func", "command")
    }


def _write_run_record(out_dir: Path, command: str, args, warnings: list[str]) -> None:
    config = _config_dict(args)
    canonical = json.dumps(config, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    record = {
        "command": command,
        "config": config,
        "config_digest": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
        "seed": config.get("seed"),
        "versions": {
            "capbench": __version__,
            "numpy": np.__version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
        },
        "warnings": warnings,
    }
    with open(out_dir / "run.json", "w", encoding="utf-8", newline="\n") as handle:
        json.dump(record, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def _write_error_summary(out_dir: Path | None, command: str, code: int, message: str) -> None:
    if out_dir is None:
        return
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "errors.json", "w", encoding="utf-8", newline="\n") as handle:
            json.dump(
                {"command": command, "exit_code": code, "error": message},
                handle,
                ensure_ascii=False,
                sort_keys=True,
                indent=2,
            )
            handle.write("\n")
    except OSError:
        pass  # the exit code still reports the failure


# -- corpus + tagging glue ------------------------------------------------------


def _load_records(args) -> list:
    sources = [s for s in (args.corpus, args.dataset) if s is not None]
    if len(sources) != 1:
        raise CliError(EXIT_USAGE, "need exactly one of --corpus or --dataset")
    if args.corpus is not None:
        return read_corpus(args.corpus)
    if args.split is None:
        raise CliError(EXIT_USAGE, "--dataset requires --split")
    config = load_adapter_config(args.dataset)
    return load_dataset(config, args.split, base_dir=Path(args.dataset).parent)


def _tag_records(args, records) -> list[TaggedCaption]:
    sources = [s for s in (args.tags, args.tagger) if s is not None]
    if len(sources) != 1:
        raise CliError(EXIT_USAGE, "need exactly one tag source: --tags or --tagger")
    index = index_by_caption_id(records)
    if args.tags is not None:
        captions = read_sidecar(args.tags, corpus=index)
        covered = {cap.caption_id for cap in captions}
        missing = sorted(set(index) - covered)
        if missing:
            raise CliError(
                EXIT_DATA,
                f"sidecar missing {len(missing)} corpus captions (first: {missing[:5]})",
            )
        return captions
    model = PerceptronTagger.load(args.tagger)
    captions = []
    for record in records:
        surfaces = tokenize(record.text)
        tags = model.tag(surfaces) if surfaces else []
        captions.append(
            TaggedCaption.build(record.caption_id, record.video_id, surfaces, tags)
        )
    return captions


# -- subcommands -----------------------------------------------------------------


def cmd_perturb(args) -> int:
    out_dir = Path(args.out)
    records = _load_records(args)
    captions = _tag_records(args, records)
    kinds = _parse_tasks(args.tasks)
    warnings: list[str] = []

    vocab: ReplacementVocab | None = None
    lexicon: Lexicon | None = None
    needs_vocab = any(kind in REPLACEMENT_KINDS for kind in kinds)
    if args.vocab is not None:
        vocab = ReplacementVocab.load(args.vocab)
    elif needs_vocab:
        vocab = build_vocab(captions)
        warnings.append("no --vocab supplied; inventories built from the input corpus")
    if args.lexicon is not None:
        lexicon = load_lexicon(args.lexicon)
    elif needs_vocab:
        warnings.append(
            "no --lexicon supplied; replacement exclusion falls back to surface inequality"
        )

    out_dir.mkdir(parents=True, exist_ok=True)
    apply_suite(
        captions,
        kinds,
        run_seed=args.seed,
        vocab=vocab,
        lexicon=lexicon,
        partial_mode=args.partial_mode,
        out_dir=out_dir,
    )
    _write_run_record(out_dir, "perturb", args, warnings)
    return EXIT_OK


def _manifest_paths(args) -> list[Path]:
    if (args.run_dir is None) == (not args.manifest):
        raise CliError(EXIT_USAGE, "need exactly one of --run-dir or --manifest")
    if args.run_dir is not None:
        paths = sorted(Path(args.run_dir).glob("*.jsonl"))
        if not paths:
            raise CliError(EXIT_DATA, f"no manifests found in {args.run_dir}")
        return paths
    return [Path(p) for p in args.manifest]


def _good_records(records: list[dict], path: Path) -> list[dict]:
    good = [r for r in records if "error" not in r]
    if not good:
        raise EvalError(f"manifest has no usable records: {path}")
    return good


def _directions(args) -> list[str]:
    return ["t2v", "v2t"] if args.direction == "both" else [args.direction]


def _write_report(out_dir: Path, report: MetricsReport) -> None:
    metrics_dir = out_dir / "metrics"
    metrics_dir.mkdir(parents=True, exist_ok=True)
    path = metrics_dir / f"{report.task_id}.{report.direction}.json"
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(report.to_dict(), handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def cmd_eval(args) -> int:
    out_dir = Path(args.out)
    modes = [
        bool(args.mock),
        args.text_emb is not None or args.video_emb is not None,
        args.sim_csv is not None,
    ]
    if sum(modes) != 1:
        raise CliError(
            EXIT_USAGE, "need exactly one of --mock, --text-emb/--video-emb, --sim-csv"
        )
    paths = _manifest_paths(args)
    manifests = {p: read_manifest(p) for p in paths}
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.mock:
        originals = [
            records
            for records in manifests.values()
            if records and records[0].get("task_id") == ORIGINAL_TASK_ID
        ]
        if not originals:
            raise EvalError("--mock needs the 'original' manifest among the inputs")
        base = [r for r in originals[0] if "error" not in r]
        first_caption: dict[str, dict] = {}
        for record in base:
            current = first_caption.get(record["video_id"])
            if current is None or record["caption_id"] < current["caption_id"]:
                first_caption[record["video_id"]] = record
        video_ids = tuple(sorted(first_caption))
        videos = EmbeddingMatrix(
            video_ids,
            mock_encode_many(first_caption[v]["text"] for v in video_ids),
        )
        for path, records in sorted(manifests.items()):
            good = _good_records(records, path)
            task_id = good[0]["task_id"]
            texts = EmbeddingMatrix(
                tuple(r["caption_id"] for r in good),
                mock_encode_many(r["text"] for r in good),
            )
            pairs = [(r["caption_id"], r["video_id"]) for r in good]
            for direction in _directions(args):
                gt = GroundTruth.from_pairs(pairs, direction)
                _write_report(
                    out_dir, evaluate_run(texts, videos, gt, direction, task_id)
                )
    elif args.sim_csv is not None:
        if len(paths) != 1:
            raise CliError(EXIT_USAGE, "--sim-csv evaluates exactly one manifest")
        good = _good_records(manifests[paths[0]], paths[0])
        task_id = good[0]["task_id"]
        pairs = [(r["caption_id"], r["video_id"]) for r in good]
        sim = read_similarity_csv(args.sim_csv)
        for direction in _directions(args):
            gt = GroundTruth.from_pairs(pairs, direction)
            oriented = sim if direction == "t2v" else sim.transposed()
            _write_report(
                out_dir, evaluate_similarity(oriented, gt, direction, task_id)
            )
    else:
        if args.text_emb is None or args.video_emb is None:
            raise CliError(EXIT_USAGE, "embedding mode needs both --text-emb and --video-emb")
        if len(paths) != 1:
            raise CliError(EXIT_USAGE, "embedding mode evaluates exactly one manifest")
        good = _good_records(manifests[paths[0]], paths[0])
        task_id = good[0]["task_id"]
        pairs = [(r["caption_id"], r["video_id"]) for r in good]
        texts = load_embeddings(args.text_emb)
        videos = load_embeddings(args.video_emb)
        for direction in _directions(args):
            gt = GroundTruth.from_pairs(pairs, direction)
            _write_report(out_dir, evaluate_run(texts, videos, gt, direction, task_id))

    _write_run_record(out_dir, "eval", args, [])
    return EXIT_OK


def cmd_report(args) -> int:
    out_dir = Path(args.out)
    comparisons = []
    for spec in args.metrics:
        label, _, path_part = spec.partition("=")
        if not path_part:
            path_part, label = spec, Path(spec).name or spec
        metrics_dir = Path(path_part)
        if (metrics_dir / "metrics").is_dir():
            metrics_dir = metrics_dir / "metrics"
        files = sorted(metrics_dir.glob("*.json"))
        if not files:
            raise CliError(EXIT_DATA, f"no metric reports found in {metrics_dir}")
        comp = RunComparison(label)
        for file in files:
            with open(file, encoding="utf-8") as handle:
                comp.add(MetricsReport.from_dict(json.load(handle)))
        comparisons.append(comp)

    ext = _FORMAT_EXT[args.format]
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"report.{ext}").write_text(emit(comparisons, args.format), encoding="utf-8")
    (out_dir / f"deltas.{ext}").write_text(emit_deltas(comparisons, args.format), encoding="utf-8")
    _write_run_record(out_dir, "report", args, [])
    return EXIT_OK


def cmd_tag_train(args) -> int:
    sentences = read_treebank(args.treebank)
    held_out = []
    training = sentences
    if args.held_out > 0:
        if args.held_out >= len(sentences):
            raise CliError(EXIT_DATA, "--held-out leaves no training sentences")
        training = sentences[: -args.held_out]
        held_out = sentences[-args.held_out :]
    model = train_tagger(training, iterations=args.iterations, seed=args.seed)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    model.save(out_path)
    print(f"trained on {len(training)} sentences; model written to {out_path}")
    if held_out:
        print(f"held-out accuracy: {model.accuracy(held_out):.4f}")
    return EXIT_OK


def cmd_vocab(args) -> int:
    records = _load_records(args)
    captions = _tag_records(args, records)
    vocab = build_vocab(captions)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    vocab.save(out_path)
    print(
        f"vocabulary written to {out_path} "
        f"({len(vocab.nouns)} nouns, {len(vocab.verbs)} verbs)"
    )
    return EXIT_OK


# -- wiring ----------------------------------------------------------------------


def _add_corpus_options(parser):
    parser.add_argument("--corpus", type=Path, help="canonical corpus JSONL")
    parser.add_argument("--dataset", type=Path, help="dataset adapter config")
    parser.add_argument("--split", choices=("train", "test"), help="dataset split")
    parser.add_argument("--tags", type=Path, help="external tag sidecar")
    parser.add_argument("--tagger", type=Path, help="trained tagger model")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perturb", help="write perturbation manifests for a corpus")
    _add_corpus_options(p)
    p.add_argument("--tasks", default="all", help="comma-separated task ids or 'all'")
    p.add_argument("--seed", type=int, default=0, help="run seed")
    p.add_argument("--vocab", type=Path, help="replacement vocabulary JSON")
    p.add_argument("--lexicon", type=Path, help="synonym/antonym lexicon TSV")
    p.add_argument(
        "--partial-mode",
        default="random",
        choices=("random", "keep-first", "keep-last"),
        help="which nouns obj_partial keeps",
    )
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("eval", help="score manifests with embeddings, a matrix, or the mock")
    p.add_argument("--run-dir", type=Path, help="directory of perturbation manifests")
    p.add_argument("--manifest", type=Path, action="append", default=[], help="manifest file")
    p.add_argument("--mock", action="store_true", help="use the bag-of-words mock encoder")
    p.add_argument("--text-emb", type=Path, help="caption embeddings (CEVB)")
    p.add_argument("--video-emb", type=Path, help="video embeddings (CEVB)")
    p.add_argument("--sim-csv", type=Path, help="precomputed similarity matrix CSV")
    p.add_argument("--direction", default="both", choices=("both", "t2v", "v2t"))
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="aggregate metric reports into tables")
    p.add_argument(
        "--metrics",
        action="append",
        required=True,
        help="metrics directory, optionally LABEL=DIR",
    )
    p.add_argument("--format", default="markdown", choices=FORMATS)
    p.add_argument("--out", type=Path, required=True, help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("tag-train", help="train the averaged-perceptron tagger")
    p.add_argument("--treebank", type=Path, required=True, help="token<TAB>UPOS sentences")
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--held-out", type=int, default=0, help="sentences reserved for accuracy check")
    p.add_argument("--out", type=Path, required=True, help="model output path")
    p.set_defaults(func=cmd_tag_train)

    p = sub.add_parser("vocab", help="build replacement inventories from a corpus")
    _add_corpus_options(p)
    p.add_argument("--out", type=Path, required=True, help="vocabulary output path")
    p.set_defaults(func=cmd_vocab)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        code, message = exc.code, str(exc)
    except (CorpusError, EvalError, PerturbError, SidecarError, TaggerError, ValueError) as exc:
        code, message = EXIT_DATA, str(exc)
    except OSError as exc:
        code, message = EXIT_IO, str(exc)
    print(f"capbench: error: {message}", file=sys.stderr)
    out = getattr(args, "out", None) if args is not None else None
    command = getattr(args, "command", "unknown") if args is not None else "unknown"
    _write_error_summary(Path(out) if out else None, command, code, message)
    return code


if __name__ == "__main__":
    sys.exit(main())
