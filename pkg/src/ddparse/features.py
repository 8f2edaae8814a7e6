"""Deterministic sparse feature extraction for both classifier stages.

Stage 1 reads parser states (stack top s0, stack second s1, buffer front b0);
stage 2 reads attached arcs.  All features are indicators with weight 1.0.
Feature names are pure functions of the input and never contain tabs (the
model-file record separator), since tokens come from whitespace splitting.
"""

from __future__ import annotations

import unicodedata

from .treebank import Arc, DiscourseTree, Edu
from .transition import ParserState

NONE = "NONE"

FeatureVector = dict[str, float]


def tokenize(text: str) -> list[str]:
    """Split on unicode whitespace; trailing punctuation becomes separate tokens."""
    tokens = []
    for chunk in text.split():
        tail = []
        while chunk and unicodedata.category(chunk[-1]).startswith("P"):
            tail.append(chunk[-1])
            chunk = chunk[:-1]
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(tail))
    return tokens


def _len_bucket(n: int) -> str:
    if n <= 3:
        return str(n)
    if n <= 6:
        return "4-6"
    if n <= 10:
        return "7-10"
    return "11+"


def _dist_bucket(delta: int) -> str:
    sign = "-" if delta < 0 else "+"
    return sign + _len_bucket(abs(delta))


def _edu_templates(prefix: str, edu: Edu | None, out: FeatureVector) -> None:
    if edu is None:
        for name in ("first", "last", "first2", "len", "eop", "is_root"):
            out[f"{prefix}.{name}={NONE}"] = 1.0
        return
    tokens = [t.lower() for t in tokenize(edu.text)] if not edu.is_root else []
    out[f"{prefix}.first={tokens[0] if tokens else NONE}"] = 1.0
    out[f"{prefix}.last={tokens[-1] if tokens else NONE}"] = 1.0
    out[f"{prefix}.first2={'_'.join(tokens[:2]) if tokens else NONE}"] = 1.0
    out[f"{prefix}.len={_len_bucket(len(tokens)) if tokens else NONE}"] = 1.0
    out[f"{prefix}.eop={str(edu.ends_with_period).lower()}"] = 1.0
    out[f"{prefix}.is_root={str(edu.is_root).lower()}"] = 1.0


def _first_token(edu: Edu | None) -> str:
    if edu is None or edu.is_root:
        return NONE
    tokens = tokenize(edu.text)
    return tokens[0].lower() if tokens else NONE


def _pair_templates(name_a: str, name_b: str, a: Edu | None, b: Edu | None,
                    out: FeatureVector) -> None:
    pair = f"({name_a},{name_b})"
    if a is None or b is None or a.is_root or b.is_root:
        out[f"same_sent{pair}={NONE}"] = 1.0
        out[f"dist{pair}={NONE}"] = 1.0
        return
    out[f"same_sent{pair}={str(a.sentence_index == b.sentence_index).lower()}"] = 1.0
    out[f"dist{pair}={_dist_bucket(b.id - a.id)}"] = 1.0


def extract_structure_features(state: ParserState, edus) -> FeatureVector:
    """Features for the transition-action classifier.

    ``edus`` is indexable by EDU id (artificial root at index 0).
    """
    def at(idx: int | None) -> Edu | None:
        return edus[idx] if idx is not None else None

    s0, s1, b0 = at(state.top()), at(state.second()), at(state.front())
    fv: FeatureVector = {}
    _edu_templates("s0", s0, fv)
    _edu_templates("s1", s1, fv)
    _edu_templates("b0", b0, fv)
    _pair_templates("s0", "s1", s0, s1, fv)
    _pair_templates("s0", "b0", s0, b0, fv)
    fv[f"first(s0,s1)={_first_token(s0)}|{_first_token(s1)}"] = 1.0
    fv[f"first(s0,b0)={_first_token(s0)}|{_first_token(b0)}"] = 1.0
    fv[f"first(s1,b0)={_first_token(s1)}|{_first_token(b0)}"] = 1.0
    return fv


def extract_relation_features(arc: Arc, edus, tree: DiscourseTree | None = None) -> FeatureVector:
    """Features for the relation-label classifier, over one attached arc."""
    head, dep = edus[arc.head], edus[arc.dependent]
    fv: FeatureVector = {}
    _edu_templates("head", head, fv)
    _edu_templates("dep", dep, fv)
    fv[f"direction={'right' if arc.head < arc.dependent else 'left'}"] = 1.0
    fv[f"dist={_len_bucket(abs(arc.dependent - arc.head))}"] = 1.0
    if head.is_root:
        fv[f"same_sentence={NONE}"] = 1.0
    else:
        same = head.sentence_index == dep.sentence_index
        fv[f"same_sentence={str(same).lower()}"] = 1.0
    fv[f"first(head,dep)={_first_token(head)}|{_first_token(dep)}"] = 1.0
    if tree is not None:
        n_children = sum(1 for a in tree.arcs if a.head == arc.dependent)
        fv[f"dep.n_children={_len_bucket(n_children) if n_children else '0'}"] = 1.0
    return fv
