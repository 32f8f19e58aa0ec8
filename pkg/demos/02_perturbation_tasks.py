"""
The ten caption perturbation tasks
==================================

Gold-tagging the running example caption and applying every task once.
Deterministic tasks always produce the same string; the seeded tasks
(replacements, partial, shuffle) are reproducible functions of
(run_seed, caption_id, task_id).
"""

from capbench.perturb import ALL_KINDS, apply_task, build_vocab
from capbench.textproc import TaggedCaption

caption = TaggedCaption.build(
    "msr9770#t",
    "video5",
    "a guy wearing a red shirt drives a car while talking".split(),
    ["DET", "NOUN", "VERB", "DET", "ADJ", "NOUN", "VERB", "DET", "NOUN", "SCONJ", "VERB"],
)

# replacement tasks draw from corpus-derived inventories; widen the pools a
# little so the example caption's own words are not the whole vocabulary
extra = TaggedCaption.build(
    "pool#0",
    "vid0",
    "a surfer holds a channel near mars and keeps smiling".split(),
    ["DET", "NOUN", "VERB", "DET", "NOUN", "ADP", "PROPN", "CCONJ", "VERB", "VERB"],
)
vocab = build_vocab([caption, extra])

print(f"original          : {caption.text}\n")
for kind in ALL_KINDS:
    out = apply_task(caption, kind, run_seed=7, vocab=vocab)
    print(f"{kind.task_id:18}: {out.text}")

# provenance records where every output token came from
negated = apply_task(caption, ALL_KINDS[5], run_seed=7)  # act_negation
print(f"\nact_negation provenance: {list(negated.provenance)}")
