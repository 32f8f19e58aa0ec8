"""
Tokenizing captions, training the tagger, and the three-way token partition
============================================================================

Every perturbation task needs captions split into tokens, each token carrying
a universal POS tag, and each tag mapped into one of three buckets:
objects & attributes (NOUN/PROPN/ADJ/ADV), actions (VERB), or syntax
(everything else, including auxiliaries).
"""

from capbench.tagger import read_treebank, train_tagger
from capbench.textproc import TaggedCaption, categorize, tokenize

# tokenization keeps apostrophe words together and isolates punctuation
for text in ("a guy wearing a red shirt drives a car while talking",
             "man, running!",
             "it's the dog's ball"):
    print(f"{text!r:55} -> {tokenize(text)}")

# train a tagger on the bundled fixture treebank (800 template sentences)
sentences = read_treebank("tests/data/upos_fixture.tsv")
model = train_tagger(sentences[:680], iterations=5, seed=13)
print(f"\nheld-out accuracy: {model.accuracy(sentences[680:]):.3f}")

# tag a fresh caption and show the category of every token
surfaces = tokenize("a quiet girl watches a small dog near the river")
tags = model.tag(surfaces)
caption = TaggedCaption.build("demo#0", "vid0", surfaces, tags)
print()
for token in caption.tokens:
    print(f"  {token.surface:8} {token.pos:6} {categorize(token.pos).value}")
