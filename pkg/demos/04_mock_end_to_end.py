"""
Self-contained end-to-end run with the bag-of-words mock encoder
================================================================

Builds a small templated corpus where gold tags are known by construction,
perturbs it, scores every manifest with the deterministic mock encoder
(video vector := its caption's vector), and prints the R@1 ladder. Because
the mock is a bag of words, shuffle and reverse score exactly like the
original, while removing objects & attributes hurts most -- the qualitative
ordering the perturbations were designed to expose.
"""

import json
import tempfile
from pathlib import Path

from capbench.cli import main
from capbench.corpus import CaptionRecord, write_corpus
from capbench.textproc import TaggedCaption, write_sidecar

DETS = ["a", "the"]
ADJS = ["red", "small", "tall", "quiet"]
NOUNS = ["dog", "cat", "woman", "guy", "car", "boat", "shirt", "ball"]
VERBS = ["holds", "kicks", "pushes", "rides"]
GERUNDS = ["talking", "singing", "smiling", "waving"]
PREPS = ["near", "behind", "under", "beside"]
TAGS = ["DET", "ADJ", "NOUN", "VERB", "DET", "NOUN", "ADP", "VERB"]

captions = []
index = 0
for adj in ADJS:
    for noun1 in NOUNS:
        for noun2 in NOUNS:
            if noun1 == noun2 or index >= 120:
                continue
            surfaces = [
                DETS[index % 2], adj, noun1, VERBS[index % 3],
                "a", noun2, PREPS[index % 3], GERUNDS[index % 2],
            ]
            captions.append(
                TaggedCaption.build(f"demo-{index:03d}", f"vid-{index:03d}", surfaces, TAGS)
            )
            index += 1

workdir = Path(tempfile.mkdtemp(prefix="capbench-demo-"))
corpus_path = workdir / "corpus.jsonl"
write_corpus(
    [CaptionRecord(c.caption_id, c.video_id, c.text, "test", "msrvtt") for c in captions],
    corpus_path,
)
write_sidecar(workdir / "tags.tsv", captions)

main(["perturb", "--corpus", str(corpus_path), "--tags", str(workdir / "tags.tsv"),
      "--seed", "11", "--out", str(workdir / "run")])
main(["eval", "--run-dir", str(workdir / "run"), "--mock", "--out", str(workdir / "eval")])

print(f"{len(captions)} captions; outputs under {workdir}\n")
print(f"{'task':18} {'R@1 t2v':>8} {'R@1 v2t':>8}")
for path in sorted((workdir / "eval" / "metrics").glob("*.t2v.json")):
    t2v = json.loads(path.read_text())
    v2t = json.loads(path.with_name(path.name.replace(".t2v.", ".v2t.")).read_text())
    print(f"{t2v['task_id']:18} {t2v['r1']:8.1f} {v2t['r1']:8.1f}")
