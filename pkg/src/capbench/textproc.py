"""Tokenization, UPOS tag handling, and the object/action/syntax partition.

Captions are split into word and punctuation tokens, each token carries a
tag from the 17-tag universal POS set, and the tag alone decides which of
the three perturbation categories the token belongs to:

* NOUN, PROPN, ADJ, ADV -> objects & attributes
* VERB                  -> actions
* everything else       -> syntax

AUX is deliberately syntax, not action: copulas like "is" survive action
removal. Category decisions never look at the surface form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from .corpus import CaptionRecord

UPOS_TAGS = frozenset(
    {
        "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
        "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
    }
)

#: Tags that count as nouns for the noun-targeted perturbations.
NOUN_TAGS = frozenset({"NOUN", "PROPN"})


class Category(Enum):
    OBJECT_ATTRIBUTE = "object_attribute"
    ACTION = "action"
    SYNTAX = "syntax"


_CATEGORY_BY_TAG: dict[str, Category] = {tag: Category.SYNTAX for tag in UPOS_TAGS}
for _tag in ("NOUN", "PROPN", "ADJ", "ADV"):
    _CATEGORY_BY_TAG[_tag] = Category.OBJECT_ATTRIBUTE
_CATEGORY_BY_TAG["VERB"] = Category.ACTION


def categorize(pos: str) -> Category:
    """Map a UPOS tag to its perturbation category."""
    try:
        return _CATEGORY_BY_TAG[pos]
    except KeyError:
        raise ValueError(f"unknown UPOS tag: {pos!r}") from None


# Maximal runs of letters/digits/apostrophes; any other non-space character
# stands alone. Underscore is excluded from word characters on purpose.
_TOKEN_RE = re.compile(r"(?:[^\W_]|')+|\S")


def tokenize(text: str) -> list[str]:
    """Split raw caption text into surface tokens (whitespace discarded)."""
    return _TOKEN_RE.findall(text)


@dataclass(frozen=True)
class Token:
    """One caption token with its tag and 0-based position."""

    surface: str
    pos: str
    index: int

    def __post_init__(self):
        if self.pos not in UPOS_TAGS:
            raise ValueError(f"unknown UPOS tag: {self.pos!r}")

    @property
    def lower(self) -> str:
        return self.surface.lower()

    @property
    def category(self) -> Category:
        return categorize(self.pos)

    @property
    def is_noun(self) -> bool:
        return self.pos in NOUN_TAGS


@dataclass(frozen=True)
class TaggedCaption:
    caption_id: str
    video_id: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError(
                    f"caption {self.caption_id!r}: token index {tok.index} at position {i}"
                )

    @classmethod
    def build(
        cls,
        caption_id: str,
        video_id: str,
        surfaces: Sequence[str],
        tags: Sequence[str],
    ) -> "TaggedCaption":
        if len(surfaces) != len(tags):
            raise ValueError(
                f"caption {caption_id!r}: {len(surfaces)} tokens but {len(tags)} tags"
            )
        tokens = tuple(Token(s, t, i) for i, (s, t) in enumerate(zip(surfaces, tags)))
        return cls(caption_id, video_id, tokens)

    @property
    def text(self) -> str:
        return " ".join(tok.surface for tok in self.tokens)

    def surfaces(self) -> list[str]:
        return [tok.surface for tok in self.tokens]

    def tags(self) -> list[str]:
        return [tok.pos for tok in self.tokens]


class SidecarError(ValueError):
    """Malformed tag sidecar file."""


def read_sidecar(
    path,
    corpus: Mapping[str, "CaptionRecord"] | None = None,
) -> list[TaggedCaption]:
    """Load externally produced tags from a sidecar file.

    Format: a caption starts with ``# id = <caption_id>``, followed by one
    ``surface<TAB>UPOS`` line per token; captions are separated by a blank
    line. When ``corpus`` (caption_id -> CaptionRecord) is given, each
    caption's token count is checked against ``tokenize`` of the caption
    text and the record's video_id is attached.
    """
    captions: list[TaggedCaption] = []
    current_id: str | None = None
    surfaces: list[str] = []
    tags: list[str] = []

    def flush(line_no: int):
        nonlocal current_id, surfaces, tags
        if current_id is None:
            return
        video_id = ""
        if corpus is not None:
            record = corpus.get(current_id)
            if record is None:
                raise SidecarError(
                    f"sidecar caption {current_id!r} not present in corpus"
                )
            expected = tokenize(record.text)
            if len(expected) != len(surfaces):
                raise SidecarError(
                    f"caption {current_id!r}: sidecar has {len(surfaces)} tokens "
                    f"but caption text tokenizes to {len(expected)}"
                )
            video_id = record.video_id
        try:
            captions.append(TaggedCaption.build(current_id, video_id, surfaces, tags))
        except ValueError as exc:
            raise SidecarError(f"line {line_no}: {exc}") from exc
        current_id, surfaces, tags = None, [], []

    with open(path, encoding="utf-8") as handle:
        line_no = 0
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                flush(line_no)
                continue
            if line.startswith("#"):
                match = re.fullmatch(r"#\s*id\s*=\s*(\S+)\s*", line)
                if match is None:
                    raise SidecarError(f"line {line_no}: malformed header: {line!r}")
                flush(line_no)
                current_id = match.group(1)
                continue
            if current_id is None:
                raise SidecarError(f"line {line_no}: token line before any '# id =' header")
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise SidecarError(f"line {line_no}: expected 'surface<TAB>UPOS', got {line!r}")
            surface, tag = parts
            if tag not in UPOS_TAGS:
                raise SidecarError(f"line {line_no}: unknown UPOS tag: {tag!r}")
            surfaces.append(surface)
            tags.append(tag)
        flush(line_no + 1)
    return captions


def write_sidecar(path, captions: Iterable[TaggedCaption]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for cap in captions:
            handle.write(f"# id = {cap.caption_id}\n")
            for tok in cap.tokens:
                handle.write(f"{tok.surface}\t{tok.pos}\n")
            handle.write("\n")
