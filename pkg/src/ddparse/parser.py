"""The two-stage parser: train action/relation models, greedily decode trees.

Stage 1 predicts arc-standard actions along the derivation; stage 2 assigns
relation labels to the finished arcs.  Non-projective gold trees cannot be
derived by the oracle, so they contribute stage-2 examples only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path

from . import classifier, features, transition
from .classifier import LinearModel, TrainConfig
from .errors import FormatError, InvalidCount, NonProjective, NoTrainableTrees
from .transition import ACTION_LABELS, ACTION_ORDER, Action
from .treebank import (
    Arc,
    DiscourseTree,
    FINE_RELATIONS,
    COARSE_RELATIONS,
    ROOT_RELATION,
    build_tree,
    is_projective,
    to_coarse,
    validate_tree,
)

PARSER_HEADER = "ddparse-parser v1"


@dataclass
class TrainSummary:
    n_docs: int = 0
    n_projective: int = 0
    n_nonprojective_skipped: int = 0
    n_action_examples: int = 0
    n_relation_examples: int = 0
    n_relation_labels: int = 0


@dataclass
class ParserModel:
    action_model: LinearModel
    relation_model: LinearModel
    granularity: str = "fine"  # "fine" (26 labels) or "coarse" (17)
    summary: TrainSummary = field(default_factory=TrainSummary)


def _inventory_order(labels, granularity: str) -> list[str]:
    inventory = FINE_RELATIONS if granularity == "fine" else COARSE_RELATIONS
    rank = {name: i for i, name in enumerate(inventory)}
    return sorted(labels, key=lambda l: rank.get(l, len(rank)))


def oracle_examples(tree: DiscourseTree):
    """(state features, action label) pairs along the gold derivation."""
    actions = transition.oracle_actions(tree)
    state = transition.initial_state(tree.k)
    out = []
    for action in actions:
        out.append((features.extract_structure_features(state, tree.edus), action.value))
        state = transition.apply(state, action)
    return out


def relation_examples(tree: DiscourseTree, granularity: str = "fine"):
    out = []
    for arc in tree.arcs:
        if not arc.relation:
            continue
        label = to_coarse(arc.relation) if granularity == "coarse" else arc.relation
        out.append((features.extract_relation_features(arc, tree.edus, tree), label))
    return out


def train_parser(corpus, config: TrainConfig | None = None,
                 granularity: str = "fine") -> ParserModel:
    """Train both stages from a treebank.

    Stage 1 uses projective trees only (the oracle cannot derive the rest);
    stage 2 uses every annotated tree.  Raises NoTrainableTrees when no
    projective tree exists.
    """
    config = config or TrainConfig()
    corpus = list(corpus)
    summary = TrainSummary(n_docs=len(corpus))
    action_ex = []
    relation_ex = []
    for tree in corpus:
        if tree.arcs and tree.is_annotated() and not validate_tree(tree):
            if is_projective(tree):
                action_ex.extend(oracle_examples(tree))
                summary.n_projective += 1
            else:
                summary.n_nonprojective_skipped += 1
        relation_ex.extend(relation_examples(tree, granularity))
    if summary.n_projective == 0:
        raise NoTrainableTrees("no projective annotated trees in the corpus")
    summary.n_action_examples = len(action_ex)
    summary.n_relation_examples = len(relation_ex)

    action_model = classifier.train(action_ex, config, labels=list(ACTION_LABELS))
    rel_labels = _inventory_order({label for _, label in relation_ex}, granularity)
    relation_model = classifier.train(relation_ex, config, labels=rel_labels)
    summary.n_relation_labels = len(rel_labels)
    return ParserModel(action_model, relation_model, granularity, summary)


def _best_legal_action(score_by_label, legal) -> Action:
    best, best_score = None, None
    for action in ACTION_ORDER:  # fixed order makes ties deterministic
        if action not in legal:
            continue
        score = score_by_label[action.value]
        if best_score is None or score > best_score:
            best, best_score = action, score
    return best


def parse_structure(edus, model: ParserModel, forced_root: int | None = None) -> DiscourseTree:
    """Greedy decoding: argmax of action scores restricted to legal actions.

    ``forced_root`` pins one EDU as the root's dependent: that EDU may head
    others but never attaches below another EDU (used by two-part parsing).
    """
    tree = build_tree("", edus)
    if tree.k < 1:
        raise InvalidCount("cannot parse a document with no real EDUs")
    state = transition.initial_state(tree.k)
    while not state.is_terminal:
        legal = transition.legal_actions(state)
        if forced_root is not None:
            if state.second() == forced_root:
                legal.discard(Action.LEFT_ARC)
            if state.top() == forced_root and state.second() != 0:
                legal.discard(Action.RIGHT_ARC)
        fv = features.extract_structure_features(state, tree.edus)
        action = _best_legal_action(classifier.scores(model.action_model, fv), legal)
        state = transition.apply(state, action)
    arcs = tuple(Arc(h, d) for h, d in sorted(state.arcs, key=lambda p: p[1]))
    return tree.with_arcs(arcs)


def label_relations(tree: DiscourseTree, model: ParserModel) -> DiscourseTree:
    """Assign a relation to every arc; the root arc is forced to ROOT."""
    labeled = []
    for arc in tree.arcs:
        if arc.head == 0:
            relation = ROOT_RELATION
        else:
            fv = features.extract_relation_features(arc, tree.edus, tree)
            relation = classifier.predict(model.relation_model, fv)
        labeled.append(Arc(arc.head, arc.dependent, relation))
    return tree.with_arcs(labeled)


def parse(edus, model: ParserModel) -> DiscourseTree:
    structure = parse_structure(edus, model)
    return label_relations(structure, model)


def random_parse(edus, seed: int = 42) -> DiscourseTree:
    """Baseline: uniformly random legal actions, every relation elab-addition."""
    tree = build_tree("", edus)
    if tree.k < 1:
        raise InvalidCount("cannot parse a document with no real EDUs")
    rng = random.Random(seed)
    state = transition.initial_state(tree.k)
    while not state.is_terminal:
        ordered = [a for a in ACTION_ORDER if a in transition.legal_actions(state)]
        state = transition.apply(state, rng.choice(ordered))
    arcs = tuple(
        Arc(h, d, ROOT_RELATION if h == 0 else "elab-addition")
        for h, d in sorted(state.arcs, key=lambda p: p[1])
    )
    return tree.with_arcs(arcs)


# ---------------------------------------------------------------------------
# Serialization: a granularity header plus two classifier blocks.


def save_parser_model(model: ParserModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{PARSER_HEADER}\tgranularity={model.granularity}\n")
        classifier.write_model(model.action_model, fh)
        classifier.write_model(model.relation_model, fh)


def load_parser_model(path) -> ParserModel:
    with open(path, "r", encoding="utf-8") as fh:
        lines = iter(fh)
        try:
            header = next(lines).rstrip("\n")
        except StopIteration:
            raise FormatError("empty parser model file") from None
        parts = header.split("\t")
        if parts[0] != PARSER_HEADER:
            raise FormatError(f"not a parser model file (header {header!r})")
        fields = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        granularity = fields.get("granularity", "fine")
        action_model = classifier.read_model(lines)
        relation_model = classifier.read_model(lines)
    return ParserModel(action_model, relation_model, granularity)
