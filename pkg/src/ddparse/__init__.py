"""Discourse dependency parsing toolkit.

Core pieces: a treebank data model and corpus format (`treebank`), an
arc-standard transition system with a static oracle (`transition`), sparse
feature extraction (`features`), a deterministic linear classifier
(`classifier`), the two-stage parser (`parser`), the zero-shot cross-lingual
pipeline (`pipeline`), and evaluation tooling (`evaluation`).
"""

from .treebank import (
    Arc,
    CorpusStats,
    DiscourseTree,
    Edu,
    build_tree,
    corpus_stats,
    is_projective,
    load_corpus,
    save_corpus,
    validate_tree,
)
from .transition import Action, ParserState, apply, initial_state, legal_actions, oracle_actions
from .classifier import LinearModel, TrainConfig, load_model, predict, save_model, scores, train
from .parser import (
    ParserModel,
    label_relations,
    load_parser_model,
    parse,
    parse_structure,
    random_parse,
    save_parser_model,
    train_parser,
)
from .pipeline import (
    PipelineConfig,
    adjust_punctuation,
    adjust_relative_pronouns,
    detect_topic_sentence,
    run_pipeline,
    translate_edus,
    two_part_parse,
)
from .evaluation import EvalReport, ablation_report, agreement, las, topic_edu_accuracy, uas

__version__ = "0.1.0"
