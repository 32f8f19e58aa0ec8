"""Caption perturbation toolkit and ranking-metric harness for
text-video retrieval robustness studies."""

__version__ = "0.1.0"

from .perturb import (
    ALL_KINDS,
    ORIGINAL_TASK_ID,
    Lexicon,
    PerturbationKind,
    PerturbedCaption,
    ReplacementVocab,
    action_negation,
    action_removal,
    action_replacement,
    apply_suite,
    apply_task,
    build_vocab,
    object_attribute_removal,
    object_partial,
    object_replacement,
    object_shift,
    reverse,
    shuffle,
    syntax_removal,
)
from .retrieval import (
    EmbeddingMatrix,
    GroundTruth,
    MetricsReport,
    SimilarityMatrix,
    cosine_similarity,
    evaluate_run,
    load_embeddings,
    write_cevb,
)
from .rng import SeededRng, fnv1a_64, stable_seed
from .textproc import Category, TaggedCaption, Token, categorize, tokenize

__all__ = [
    "ALL_KINDS",
    "ORIGINAL_TASK_ID",
    "Category",
    "EmbeddingMatrix",
    "GroundTruth",
    "Lexicon",
    "MetricsReport",
    "PerturbationKind",
    "PerturbedCaption",
    "ReplacementVocab",
    "SeededRng",
    "SimilarityMatrix",
    "TaggedCaption",
    "Token",
    "action_negation",
    "action_removal",
    "action_replacement",
    "apply_suite",
    "apply_task",
    "build_vocab",
    "categorize",
    "cosine_similarity",
    "evaluate_run",
    "fnv1a_64",
    "load_embeddings",
    "object_attribute_removal",
    "object_partial",
    "object_replacement",
    "object_shift",
    "reverse",
    "shuffle",
    "stable_seed",
    "syntax_removal",
    "tokenize",
    "write_cevb",
]
