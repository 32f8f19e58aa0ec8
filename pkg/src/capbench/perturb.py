"""The ten caption perturbation tasks, replacement vocabularies, and
corpus-scale manifest runs.

Every operation consumes a :class:`~capbench.textproc.TaggedCaption` and
returns a :class:`PerturbedCaption` whose provenance records, per output
token, where it came from: a plain int is a copied source index,
``{"ins": surface}`` an inserted token, and ``{"rep": i}`` a replacement
of source index ``i``.

Noun-targeted tasks (shift, replacement, partial) act on NOUN/PROPN tokens
only; object & attribute removal drops the whole object_attribute category
(so adjectives/adverbs go too). Degenerate captions (nothing to act on)
pass through unchanged instead of erroring, so corpus-scale runs never
abort on outliers.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .rng import SeededRng
from .textproc import Category, TaggedCaption, Token

NEGATION_TOKEN = "not"
NEGATION_POS = "PART"


class PerturbationKind(Enum):
    OBJ_ATTR_REMOVAL = "obj_attr_removal"
    OBJ_SHIFT = "obj_shift"
    OBJ_REPLACEMENT = "obj_replacement"
    OBJ_PARTIAL = "obj_partial"
    ACT_REMOVAL = "act_removal"
    ACT_NEGATION = "act_negation"
    ACT_REPLACEMENT = "act_replacement"
    SYN_REMOVAL = "syn_removal"
    SHUFFLE = "shuffle"
    REVERSE = "reverse"

    @property
    def task_id(self) -> str:
        return self.value


#: All ten kinds in the canonical reporting order.
ALL_KINDS: tuple[PerturbationKind, ...] = tuple(PerturbationKind)

#: Tasks that draw replacement words from a vocabulary.
REPLACEMENT_KINDS = frozenset(
    {PerturbationKind.OBJ_REPLACEMENT, PerturbationKind.ACT_REPLACEMENT}
)

#: Tasks whose output depends on the seeded random stream.
RANDOM_KINDS = frozenset(
    {
        PerturbationKind.OBJ_REPLACEMENT,
        PerturbationKind.OBJ_PARTIAL,
        PerturbationKind.ACT_REPLACEMENT,
        PerturbationKind.SHUFFLE,
    }
)

ORIGINAL_TASK_ID = "original"


class PerturbError(ValueError):
    pass


@dataclass(frozen=True)
class PerturbedCaption:
    caption_id: str
    video_id: str
    kind: PerturbationKind
    tokens: tuple[Token, ...]
    provenance: tuple[object, ...]

    @property
    def text(self) -> str:
        return " ".join(tok.surface for tok in self.tokens)

    def to_tagged(self) -> TaggedCaption:
        """View the output as a tagged caption (tags carried through the op)."""
        return TaggedCaption(self.caption_id, self.video_id, self.tokens)


def _result(
    cap: TaggedCaption,
    kind: PerturbationKind,
    picked: Sequence[tuple[Token, object]],
) -> PerturbedCaption:
    tokens = tuple(
        Token(tok.surface, tok.pos, i) for i, (tok, _) in enumerate(picked)
    )
    provenance = tuple(prov for _, prov in picked)
    return PerturbedCaption(cap.caption_id, cap.video_id, kind, tokens, provenance)


def _keep(cap: TaggedCaption, kind: PerturbationKind, keep) -> PerturbedCaption:
    picked = [(tok, tok.index) for tok in cap.tokens if keep(tok)]
    return _result(cap, kind, picked)


# -- object & attribute tasks ------------------------------------------------


def object_attribute_removal(cap: TaggedCaption) -> PerturbedCaption:
    """Drop every object & attribute token, preserving order."""
    return _keep(
        cap,
        PerturbationKind.OBJ_ATTR_REMOVAL,
        lambda tok: tok.category is not Category.OBJECT_ATTRIBUTE,
    )


def object_shift(cap: TaggedCaption) -> PerturbedCaption:
    """Cyclic left shift of the nouns by one position; everything else fixed."""
    positions = [tok.index for tok in cap.tokens if tok.is_noun]
    picked: list[tuple[Token, object]] = [(tok, tok.index) for tok in cap.tokens]
    k = len(positions)
    if k > 1:
        for i, pos in enumerate(positions):
            source = cap.tokens[positions[(i + 1) % k]]
            picked[pos] = (source, source.index)
    return _result(cap, PerturbationKind.OBJ_SHIFT, picked)


def object_replacement(
    cap: TaggedCaption,
    vocab: "ReplacementVocab",
    rng: SeededRng,
    lexicon: "Lexicon | None" = None,
) -> PerturbedCaption:
    """Replace every noun with a random different noun from the vocabulary."""
    return _replace(
        cap,
        PerturbationKind.OBJ_REPLACEMENT,
        lambda tok: tok.is_noun,
        vocab.noun_surfaces(),
        rng,
        lexicon,
    )


def object_partial(
    cap: TaggedCaption,
    rng: SeededRng,
    mode: str = "random",
) -> PerturbedCaption:
    """Keep floor(k/2) of the k nouns, dropping the rest.

    ``mode`` picks the kept nouns: "random" (seeded, default), "keep-first",
    or "keep-last".
    """
    positions = [tok.index for tok in cap.tokens if tok.is_noun]
    count = len(positions) // 2
    if mode == "random":
        kept = set(rng.shuffled(positions)[:count])
    elif mode == "keep-first":
        kept = set(positions[:count])
    elif mode == "keep-last":
        kept = set(positions[len(positions) - count :])
    else:
        raise ValueError(f"unknown object_partial mode: {mode!r}")
    return _keep(
        cap,
        PerturbationKind.OBJ_PARTIAL,
        lambda tok: not tok.is_noun or tok.index in kept,
    )


# -- action tasks -------------------------------------------------------------


def action_removal(cap: TaggedCaption) -> PerturbedCaption:
    """Drop every action token, preserving order."""
    return _keep(
        cap,
        PerturbationKind.ACT_REMOVAL,
        lambda tok: tok.category is not Category.ACTION,
    )


def action_negation(cap: TaggedCaption) -> PerturbedCaption:
    """Insert "not" immediately before every action token."""
    picked: list[tuple[Token, object]] = []
    for tok in cap.tokens:
        if tok.category is Category.ACTION:
            picked.append(
                (Token(NEGATION_TOKEN, NEGATION_POS, 0), {"ins": NEGATION_TOKEN})
            )
        picked.append((tok, tok.index))
    return _result(cap, PerturbationKind.ACT_NEGATION, picked)


def action_replacement(
    cap: TaggedCaption,
    vocab: "ReplacementVocab",
    rng: SeededRng,
    lexicon: "Lexicon | None" = None,
) -> PerturbedCaption:
    """Replace every action with a random different verb from the vocabulary."""
    return _replace(
        cap,
        PerturbationKind.ACT_REPLACEMENT,
        lambda tok: tok.category is Category.ACTION,
        vocab.verb_surfaces(),
        rng,
        lexicon,
    )


# -- syntax tasks -------------------------------------------------------------


def syntax_removal(cap: TaggedCaption) -> PerturbedCaption:
    """Keep only objects & attributes and actions, in order."""
    return _keep(
        cap,
        PerturbationKind.SYN_REMOVAL,
        lambda tok: tok.category is not Category.SYNTAX,
    )


def shuffle(cap: TaggedCaption, rng: SeededRng) -> PerturbedCaption:
    """Fisher-Yates permutation of all tokens."""
    order = rng.shuffled(range(len(cap.tokens)))
    picked = [(cap.tokens[i], i) for i in order]
    return _result(cap, PerturbationKind.SHUFFLE, picked)


def reverse(cap: TaggedCaption) -> PerturbedCaption:
    """Emit the tokens in exact reverse order."""
    picked = [(tok, tok.index) for tok in reversed(cap.tokens)]
    return _result(cap, PerturbationKind.REVERSE, picked)


# -- replacement machinery -----------------------------------------------------


def _replace(
    cap: TaggedCaption,
    kind: PerturbationKind,
    target,
    inventory: Sequence[str],
    rng: SeededRng,
    lexicon: "Lexicon | None",
) -> PerturbedCaption:
    lex = lexicon if lexicon is not None else Lexicon()
    picked: list[tuple[Token, object]] = []
    for tok in cap.tokens:
        if not target(tok):
            picked.append((tok, tok.index))
            continue
        original = tok.lower
        excluded = {original} | lex.synonyms(original) | lex.antonyms(original)
        pool = [word for word in inventory if word not in excluded]
        if not pool:
            raise PerturbError(
                f"caption {cap.caption_id!r}: no replacement candidates for "
                f"{tok.surface!r} at index {tok.index}"
            )
        replacement = pool[rng.below(len(pool))]
        picked.append((Token(replacement, tok.pos, 0), {"rep": tok.index}))
    return _result(cap, kind, picked)


@dataclass(frozen=True)
class ReplacementVocab:
    """Corpus-derived noun and verb inventories with frequencies."""

    nouns: Mapping[str, int]
    verbs: Mapping[str, int]
    source_digest: str = ""

    def noun_surfaces(self) -> tuple[str, ...]:
        return tuple(sorted(self.nouns))

    def verb_surfaces(self) -> tuple[str, ...]:
        return tuple(sorted(self.verbs))

    def save(self, path) -> None:
        payload = {
            "format": "capbench-vocab",
            "version": 1,
            "source_digest": self.source_digest,
            "nouns": dict(sorted(self.nouns.items())),
            "verbs": dict(sorted(self.verbs.items())),
        }
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(payload, handle, ensure_ascii=False, sort_keys=True)
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "ReplacementVocab":
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        if payload.get("format") != "capbench-vocab":
            raise ValueError(f"not a capbench vocabulary file: {path}")
        return cls(payload["nouns"], payload["verbs"], payload.get("source_digest", ""))


def build_vocab(corpus: Iterable[TaggedCaption]) -> ReplacementVocab:
    """Count noun (NOUN/PROPN) and verb surfaces over a tagged corpus."""
    nouns: dict[str, int] = {}
    verbs: dict[str, int] = {}
    digest = hashlib.sha256()
    for cap in corpus:
        digest.update(f"{cap.caption_id}\t{cap.text}\n".encode("utf-8"))
        for tok in cap.tokens:
            if tok.is_noun:
                nouns[tok.lower] = nouns.get(tok.lower, 0) + 1
            elif tok.category is Category.ACTION:
                verbs[tok.lower] = verbs.get(tok.lower, 0) + 1
    return ReplacementVocab(nouns, verbs, digest.hexdigest())


@dataclass(frozen=True)
class Lexicon:
    """Synonym/antonym lookups used to widen replacement exclusions."""

    synonym_map: Mapping[str, frozenset[str]] = field(default_factory=dict)
    antonym_map: Mapping[str, frozenset[str]] = field(default_factory=dict)

    def synonyms(self, word: str) -> frozenset[str]:
        return self.synonym_map.get(word, frozenset())

    def antonyms(self, word: str) -> frozenset[str]:
        return self.antonym_map.get(word, frozenset())


def load_lexicon(path) -> Lexicon:
    """Read a ``lemma<TAB>syn:<comma-list><TAB>ant:<comma-list>`` TSV file."""
    synonym_map: dict[str, frozenset[str]] = {}
    antonym_map: dict[str, frozenset[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not parts[1].startswith("syn:") or not parts[2].startswith("ant:"):
                raise ValueError(
                    f"lexicon line {line_no}: expected 'lemma<TAB>syn:...<TAB>ant:...', got {line!r}"
                )
            lemma = parts[0]
            syns = frozenset(w for w in parts[1][4:].split(",") if w)
            ants = frozenset(w for w in parts[2][4:].split(",") if w)
            synonym_map[lemma] = syns
            antonym_map[lemma] = ants
    return Lexicon(synonym_map, antonym_map)


# -- corpus-scale runs ---------------------------------------------------------


_OPS_BY_KIND = {
    PerturbationKind.OBJ_ATTR_REMOVAL: object_attribute_removal,
    PerturbationKind.OBJ_SHIFT: object_shift,
    PerturbationKind.ACT_REMOVAL: action_removal,
    PerturbationKind.ACT_NEGATION: action_negation,
    PerturbationKind.SYN_REMOVAL: syntax_removal,
    PerturbationKind.REVERSE: reverse,
}


def apply_task(
    cap: TaggedCaption,
    kind: PerturbationKind,
    run_seed: int = 0,
    vocab: ReplacementVocab | None = None,
    lexicon: Lexicon | None = None,
    partial_mode: str = "random",
) -> PerturbedCaption:
    """Run one task on one caption, deriving the task's random stream."""
    rng = SeededRng.for_task(run_seed, cap.caption_id, kind.task_id)
    if kind in _OPS_BY_KIND:
        return _OPS_BY_KIND[kind](cap)
    if kind is PerturbationKind.SHUFFLE:
        return shuffle(cap, rng)
    if kind is PerturbationKind.OBJ_PARTIAL:
        return object_partial(cap, rng, mode=partial_mode)
    if kind is PerturbationKind.OBJ_REPLACEMENT:
        if vocab is None:
            raise PerturbError("object replacement requires a vocabulary")
        return object_replacement(cap, vocab, rng, lexicon)
    if kind is PerturbationKind.ACT_REPLACEMENT:
        if vocab is None:
            raise PerturbError("action replacement requires a vocabulary")
        return action_replacement(cap, vocab, rng, lexicon)
    raise ValueError(f"unhandled perturbation kind: {kind}")


def _record(perturbed: PerturbedCaption) -> dict:
    return {
        "caption_id": perturbed.caption_id,
        "video_id": perturbed.video_id,
        "task_id": perturbed.kind.task_id,
        "text": perturbed.text,
        "provenance": list(perturbed.provenance),
    }


def apply_suite(
    corpus: Sequence[TaggedCaption],
    tasks: Iterable[PerturbationKind] = ALL_KINDS,
    run_seed: int = 0,
    vocab: ReplacementVocab | None = None,
    lexicon: Lexicon | None = None,
    partial_mode: str = "random",
    out_dir: Path | str | None = None,
) -> dict[str, list[dict]]:
    """Perturb a whole corpus, one manifest per task plus the original.

    A caption failing one task is recorded in that task's manifest as an
    error record and does not abort the other tasks. Records are sorted by
    caption_id; with ``out_dir`` each manifest is written as
    ``<task_id>.jsonl``.
    """
    tasks = list(tasks)
    if vocab is None and any(kind in REPLACEMENT_KINDS for kind in tasks):
        raise PerturbError("replacement tasks requested without a vocabulary")

    manifests: dict[str, list[dict]] = {ORIGINAL_TASK_ID: []}
    for kind in tasks:
        manifests[kind.task_id] = []

    for cap in sorted(corpus, key=lambda c: c.caption_id):
        manifests[ORIGINAL_TASK_ID].append(
            {
                "caption_id": cap.caption_id,
                "video_id": cap.video_id,
                "task_id": ORIGINAL_TASK_ID,
                "text": cap.text,
                "provenance": list(range(len(cap.tokens))),
            }
        )
        for kind in tasks:
            try:
                record = _record(
                    apply_task(cap, kind, run_seed, vocab, lexicon, partial_mode)
                )
            except PerturbError as exc:
                record = {
                    "caption_id": cap.caption_id,
                    "video_id": cap.video_id,
                    "task_id": kind.task_id,
                    "error": str(exc),
                }
            manifests[kind.task_id].append(record)

    if out_dir is not None:
        write_manifests(manifests, out_dir)
    return manifests


def write_manifests(manifests: Mapping[str, list[dict]], out_dir: Path | str) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for task_id in sorted(manifests):
        path = out / f"{task_id}.jsonl"
        write_manifest(manifests[task_id], path)
        paths.append(path)
    return paths


def write_manifest(records: Sequence[dict], path: Path | str) -> None:
    records = sorted(records, key=lambda r: r["caption_id"])
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True, separators=(",", ":")))
            handle.write("\n")


def read_manifest(path: Path | str) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {line_no}: {exc}") from exc
    return records
