"""Averaged-perceptron UPOS tagger with greedy left-to-right decoding.

Self-contained substitute for an external tagger so the toolkit has no
model dependencies. The feature template is the classic averaged-perceptron
one: surface word, lowercased word, 1-3 character prefixes and suffixes,
previous tag, previous tag bigram, and the neighbouring words. Weights are
averaged over every update, which is what makes the greedy decoder stable.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import defaultdict
from typing import Iterable, Sequence

from .textproc import UPOS_TAGS

TaggedSentence = tuple[Sequence[str], Sequence[str]]

_START = ("-START2-", "-START-")
_END = ("-END-", "-END2-")


class TaggerError(ValueError):
    pass


def _features(i: int, word: str, context: Sequence[str], prev: str, prev2: str) -> list[str]:
    """Feature names for token ``i``; ``context`` is the padded lowercase sentence."""
    lower = word.lower()
    feats = [
        "bias",
        f"w={word}",
        f"lw={lower}",
        f"t-1={prev}",
        f"t-2,t-1={prev2}+{prev}",
        f"w-1={context[i + 1]}",
        f"w+1={context[i + 3]}",
    ]
    for k in (1, 2, 3):
        feats.append(f"pre{k}={lower[:k]}")
        feats.append(f"suf{k}={lower[-k:]}")
    return feats


def corpus_digest(corpus: Iterable[TaggedSentence]) -> str:
    """SHA-256 over a canonical rendering of the training sentences."""
    h = hashlib.sha256()
    for words, tags in corpus:
        for word, tag in zip(words, tags):
            h.update(f"{word}\t{tag}\n".encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


class PerceptronTagger:
    """Trained tagger; immutable once built, safe to share across workers."""

    def __init__(
        self,
        weights: dict[str, dict[str, float]],
        classes: Sequence[str],
        iterations: int = 0,
        seed: int = 0,
        digest: str = "",
    ):
        self.weights = weights
        self.classes = tuple(sorted(classes))
        self.iterations = iterations
        self.seed = seed
        self.digest = digest

    # -- decoding ---------------------------------------------------------

    def _score(self, feats: Sequence[str]) -> str:
        scores: defaultdict[str, float] = defaultdict(float)
        for feat in feats:
            for tag, weight in self.weights.get(feat, {}).items():
                scores[tag] += weight
        # classes are sorted, so max() resolves ties to the smallest tag
        return max(self.classes, key=lambda tag: scores[tag])

    def tag(self, tokens: Sequence[str]) -> list[str]:
        """One tag per token, greedy left to right."""
        if not self.classes:
            raise TaggerError("tagger has no trained classes")
        if not tokens:
            raise TaggerError("cannot tag an empty token sequence")
        context = list(_START) + [t.lower() for t in tokens] + list(_END)
        prev, prev2 = _START[1], _START[0]
        tags: list[str] = []
        for i, word in enumerate(tokens):
            guess = self._score(_features(i, word, context, prev, prev2))
            tags.append(guess)
            prev2, prev = prev, guess
        return tags

    def accuracy(self, corpus: Iterable[TaggedSentence]) -> float:
        """Token-level tag accuracy over a corpus."""
        hits = total = 0
        for words, gold in corpus:
            guessed = self.tag(words)
            hits += sum(g == t for g, t in zip(guessed, gold))
            total += len(gold)
        if total == 0:
            raise TaggerError("empty evaluation corpus")
        return hits / total

    # -- persistence ------------------------------------------------------

    def save(self, path) -> None:
        payload = {
            "format": "capbench-tagger",
            "version": 1,
            "iterations": self.iterations,
            "seed": self.seed,
            "corpus_digest": self.digest,
            "classes": list(self.classes),
            "weights": self.weights,
        }
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            json.dump(payload, handle, ensure_ascii=False, sort_keys=True)
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "PerceptronTagger":
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        if payload.get("format") != "capbench-tagger" or payload.get("version") != 1:
            raise TaggerError(f"not a capbench tagger model: {path}")
        return cls(
            weights=payload["weights"],
            classes=payload["classes"],
            iterations=payload["iterations"],
            seed=payload["seed"],
            digest=payload["corpus_digest"],
        )


def train_tagger(
    corpus: Sequence[TaggedSentence],
    iterations: int = 5,
    seed: int = 0,
) -> PerceptronTagger:
    """Train an averaged perceptron on UPOS-annotated sentences.

    Instance order is reshuffled every epoch from ``seed``; the previous-tag
    features use the decoder's own predictions, matching inference.
    """
    if not corpus:
        raise TaggerError("empty training corpus")
    classes: set[str] = set()
    for words, tags in corpus:
        if len(words) != len(tags):
            raise TaggerError("token/tag length mismatch in training corpus")
        for tag in tags:
            if tag not in UPOS_TAGS:
                raise TaggerError(f"unknown UPOS tag in training corpus: {tag!r}")
            classes.add(tag)
    sorted_classes = tuple(sorted(classes))

    weights: dict[str, dict[str, float]] = {}
    totals: defaultdict[tuple[str, str], float] = defaultdict(float)
    stamps: defaultdict[tuple[str, str], int] = defaultdict(int)
    updates = 0

    def adjust(feats: Sequence[str], truth: str, guess: str):
        nonlocal updates
        updates += 1
        if truth == guess:
            return
        for feat in feats:
            per_tag = weights.setdefault(feat, {})
            for tag, delta in ((truth, 1.0), (guess, -1.0)):
                key = (feat, tag)
                totals[key] += (updates - stamps[key]) * per_tag.get(tag, 0.0)
                stamps[key] = updates
                per_tag[tag] = per_tag.get(tag, 0.0) + delta

    model = PerceptronTagger(weights, sorted_classes)
    shuffler = random.Random(seed)
    order = list(range(len(corpus)))
    for _ in range(iterations):
        shuffler.shuffle(order)
        for idx in order:
            words, tags = corpus[idx]
            context = list(_START) + [w.lower() for w in words] + list(_END)
            prev, prev2 = _START[1], _START[0]
            for i, word in enumerate(words):
                feats = _features(i, word, context, prev, prev2)
                guess = model._score(feats)
                adjust(feats, tags[i], guess)
                prev2, prev = prev, guess

    averaged: dict[str, dict[str, float]] = {}
    for feat, per_tag in weights.items():
        for tag, weight in per_tag.items():
            key = (feat, tag)
            total = totals[key] + (updates - stamps[key]) * weight
            value = total / updates
            if value:
                averaged.setdefault(feat, {})[tag] = value

    return PerceptronTagger(
        averaged,
        sorted_classes,
        iterations=iterations,
        seed=seed,
        digest=corpus_digest(corpus),
    )


def read_treebank(path) -> list[TaggedSentence]:
    """Read ``token<TAB>UPOS`` lines with blank-line sentence breaks."""
    sentences: list[TaggedSentence] = []
    words: list[str] = []
    tags: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                if words:
                    sentences.append((tuple(words), tuple(tags)))
                    words, tags = [], []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TaggerError(f"line {line_no}: expected 'token<TAB>UPOS', got {line!r}")
            words.append(parts[0])
            tags.append(parts[1])
    if words:
        sentences.append((tuple(words), tuple(tags)))
    return sentences
