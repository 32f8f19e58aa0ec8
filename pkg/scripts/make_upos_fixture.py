"""Regenerate tests/data/upos_fixture.tsv, the frozen UPOS treebank fixture.

Template-generated English sentences with hand-assigned universal POS tags,
including genuinely ambiguous surfaces (watch/play/paint/... as both NOUN
and VERB) so the tagger has to use context. Output is token<TAB>tag lines
with blank-line sentence breaks, ~6.5k tokens. The file is checked in; run
this only when the generator changes.
"""

from __future__ import annotations

import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "upos_fixture.tsv"

NOUNS = """dog cat man woman guy girl boy child car truck bike shirt hat ball river
house tree bird fish song road table chair phone book horse train boat garden door
window street market teacher doctor player band crowd beach kitchen guitar piano
engine wheel camera movie game park school store coffee bread apple water music
friend family team city town""".split()

PLURALS = """dogs cats cars birds books songs kids boys girls trees boats horses
games friends players teachers doors windows phones guitars""".split()

# Surfaces used as both NOUN and VERB depending on the slot.
AMBIG = "watch play walk run paint dance cook drive smile jump".split()

VERBS_3SG = """runs walks eats sees holds drives sings plays watches kicks throws
carries paints opens closes pushes pulls rides reads writes cooks washes cleans
builds fixes makes takes finds likes wants smiles dances jumps""".split()

VERBS_ING = """running walking eating singing playing watching kicking throwing
carrying painting opening closing pushing pulling riding reading writing cooking
washing cleaning building driving talking wearing smiling jumping dancing""".split()

VERBS_PLAIN = """run walk eat see hold drive sing play watch kick throw carry paint
open close push pull ride read write cook wash clean build fix make take find like
want dance jump smile""".split()

ADJS = """red blue green big small old young happy loud quiet fast slow tall short
bright dark clean dirty new warm""".split()

ADVS = "quickly slowly loudly quietly happily often never always carefully gently outside today".split()

AUX = "is are was were".split()
DETS = "the a this that every some".split()
ADPS = "in on under near behind with over across by at".split()
PRONS = "he she they it we i you".split()
CCONJ = "and but or".split()
SCONJ = "while because before after when".split()
PROPN = "mary john paris london tom anna sam lily".split()
INTJ = "oh wow hey".split()
NUMS = "two three four five six".split()

VOWELS = set("aeiou")


def build_templates():
    """Each template is a list of (pool, tag) slots."""
    n = (NOUNS, "NOUN")
    npl = (PLURALS, "NOUN")
    nf = (NOUNS + AMBIG, "NOUN")  # noun slot that may take an ambiguous surface
    v3 = (VERBS_3SG, "VERB")
    ving = (VERBS_ING, "VERB")
    vpl = (VERBS_PLAIN + AMBIG, "VERB")
    adj = (ADJS, "ADJ")
    adv = (ADVS, "ADV")
    aux = (AUX, "AUX")
    det = (DETS, "DET")
    adp = (ADPS, "ADP")
    pron = (PRONS, "PRON")
    cc = (CCONJ, "CCONJ")
    sc = (SCONJ, "SCONJ")
    prop = (PROPN, "PROPN")
    intj = (INTJ, "INTJ")
    num = (NUMS, "NUM")
    to = (["to"], "PART")
    neg = (["not"], "PART")
    dot = ([".", "!"], "PUNCT")
    comma = ([","], "PUNCT")
    qmark = (["?"], "PUNCT")

    return [
        [det, adj, n, v3, adp, det, n, dot],
        [det, n, aux, ving, det, n, adv, dot],
        [pron, vpl, det, adj, n, sc, pron, vpl, adv, dot],
        [prop, v3, det, n, cc, det, n, dot],
        [num, npl, vpl, adp, det, n, dot],
        [det, n, adp, det, adj, n, v3, adv, dot],
        [pron, aux, adv, ving, det, n, dot],
        [det, nf, aux, adj, dot],
        [pron, vpl, to, vpl, det, n, dot],
        [intj, comma, det, n, aux, adj, dot],
        [det, adj, n, cc, det, adj, n, aux, ving, adp, det, n, dot],
        [prop, cc, prop, vpl, adp, det, n, sc, det, n, v3, dot],
        [det, n, v3, det, nf, dot],
        [pron, vpl, det, n, adp, det, n, cc, vpl, det, n, dot],
        [aux, det, n, ving, qmark],
        [det, n, adv, v3, det, adj, n, adp, det, n, dot],
        [sc, pron, vpl, comma, det, n, v3, adv, dot],
        [det, n, aux, neg, adj, dot],
        [pron, aux, ving, adp, num, npl, dot],
        [det, adj, nf, v3, adp, det, n, adv, dot],
    ]


def fix_article(words: list[str], tags: list[str]) -> None:
    """Swap "a" for "an" before vowel-initial words (both tagged DET)."""
    for i in range(len(words) - 1):
        if words[i] == "a" and words[i + 1][0] in VOWELS:
            words[i] = "an"


def main():
    rng = random.Random(20240613)
    templates = build_templates()
    sentences = []
    for k in range(800):
        template = templates[k % len(templates)]
        words, tags = [], []
        for pool, tag in template:
            words.append(rng.choice(pool))
            tags.append(tag)
        fix_article(words, tags)
        sentences.append((words, tags))

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8", newline="\n") as handle:
        for words, tags in sentences:
            for word, tag in zip(words, tags):
                handle.write(f"{word}\t{tag}\n")
            handle.write("\n")
    total = sum(len(words) for words, _ in sentences)
    print(f"wrote {len(sentences)} sentences / {total} tokens to {OUT}")


if __name__ == "__main__":
    main()
