from pathlib import Path

import pytest

from capbench.rng import SeededRng
from capbench.textproc import TaggedCaption

DATA_DIR = Path(__file__).parent / "data"

TABLE1_SURFACES = "a guy wearing a red shirt drives a car while talking".split()
TABLE1_TAGS = ["DET", "NOUN", "VERB", "DET", "ADJ", "NOUN", "VERB", "DET", "NOUN", "SCONJ", "VERB"]


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def table1() -> TaggedCaption:
    """The running example caption with gold UPOS tags."""
    return TaggedCaption.build("msr9770#t", "video5", TABLE1_SURFACES, TABLE1_TAGS)


# Vocabulary pools for random caption generation in property tests.
_POOLS = (
    ("NOUN", "dog cat man woman car shirt ball river house tree bird song road".split()),
    ("PROPN", "mary john paris tokyo".split()),
    ("VERB", "runs walks eats sings drives wearing talking holds throws reads".split()),
    ("ADJ", "red big small old loud quiet green".split()),
    ("ADV", "quickly slowly often never".split()),
    ("DET", "a the this every".split()),
    ("ADP", "in on near with under".split()),
    ("AUX", "is are was".split()),
    ("PRON", "he she they it".split()),
    ("SCONJ", "while because when".split()),
    ("CCONJ", "and but or".split()),
    ("PART", "to not".split()),
    ("NUM", "two three".split()),
    ("PUNCT", [".", ",", "!"]),
)


def random_caption(rng: SeededRng, caption_id: str, min_len: int = 0, max_len: int = 20) -> TaggedCaption:
    """Seeded random caption covering all categories, possibly empty."""
    n = min_len + rng.below(max_len - min_len + 1)
    surfaces, tags = [], []
    for _ in range(n):
        tag, pool = _POOLS[rng.below(len(_POOLS))]
        surfaces.append(pool[rng.below(len(pool))])
        tags.append(tag)
    return TaggedCaption.build(caption_id, f"vid-{caption_id}", surfaces, tags)
