"""Shared test helpers: tree builders and independent brute-force oracles.

The oracles here (pairwise crossing check, exhaustive tree enumerator,
per-EDU score comparison) are deliberately separate from the library code
they are used to verify.
"""

from __future__ import annotations

import itertools
import random

from ddparse.treebank import Arc, DiscourseTree, Edu, build_tree, FINE_RELATIONS, ROOT_RELATION


def make_edu(i, text="", sentence=0, eop=False):
    return Edu(id=i, text=text or f"edu {i}", sentence_index=sentence,
               ends_with_period=eop)


def tree_from_heads(heads, relations=None, doc_id="doc", texts=None, sentences=None):
    """heads[i] is the head of EDU i+1; relations/texts/sentences optional."""
    k = len(heads)
    edus = []
    for i in range(1, k + 1):
        text = texts[i - 1] if texts else f"edu {i}"
        sentence = sentences[i - 1] if sentences else 0
        edus.append(make_edu(i, text, sentence))
    arcs = []
    for i, head in enumerate(heads, start=1):
        rel = relations[i - 1] if relations else (
            ROOT_RELATION if head == 0 else "elab-addition"
        )
        arcs.append(Arc(head, i, rel))
    return build_tree(doc_id, edus, arcs)


def arcs_cross(a: Arc, b: Arc) -> bool:
    """Strict interleaving of endpoints (shared endpoints never cross)."""
    lo1, hi1 = sorted((a.head, a.dependent))
    lo2, hi2 = sorted((b.head, b.dependent))
    return lo1 < lo2 < hi1 < hi2 or lo2 < lo1 < hi2 < hi1


def projective_by_crossing(tree: DiscourseTree) -> bool:
    """Independent projectivity oracle: O(n^2) pairwise crossing test."""
    return not any(
        arcs_cross(a, b) for a, b in itertools.combinations(tree.arcs, 2)
    )


def is_valid_head_function(heads) -> bool:
    """heads maps EDU 1..k to a head in 0..k: acyclic and connected to 0."""
    k = len(heads)
    for i in range(1, k + 1):
        node, seen = i, set()
        while node != 0:
            if node in seen:
                return False
            seen.add(node)
            node = heads[node - 1]
    return True


def enumerate_valid_trees(k, single_root=True, projective_only=False):
    """Exhaustively enumerate trees over k EDUs by brute force.

    Candidate head functions are filtered by validity, the single-root
    property (the artificial root heads exactly one EDU), and optionally by
    the pairwise crossing test.  Completely independent of the oracle.
    """
    out = []
    for heads in itertools.product(*(
        [h for h in range(k + 1) if h != i] for i in range(1, k + 1)
    )):
        if single_root and sum(1 for h in heads if h == 0) != 1:
            continue
        if not is_valid_head_function(heads):
            continue
        tree = tree_from_heads(list(heads))
        if projective_only and not projective_by_crossing(tree):
            continue
        out.append(tree)
    return out


def random_projective_tree(k, rng: random.Random, doc_id="doc"):
    """Random projective single-root tree built from a random legal-action walk."""
    from ddparse import transition

    state = transition.initial_state(k)
    while not state.is_terminal:
        ordered = sorted(transition.legal_actions(state), key=lambda a: a.value)
        state = transition.apply(state, rng.choice(ordered))
    heads = [0] * k
    for head, dep in state.arcs:
        heads[dep - 1] = head
    return tree_from_heads(heads, doc_id=doc_id)


def random_valid_tree(k, rng: random.Random, projective=None, single_root=True,
                      doc_id="doc", random_relations=False):
    """Rejection-sample a valid tree; optionally constrain projectivity."""
    while True:
        heads = [rng.choice([h for h in range(k + 1) if h != i])
                 for i in range(1, k + 1)]
        if single_root and sum(1 for h in heads if h == 0) != 1:
            continue
        if not is_valid_head_function(heads):
            continue
        relations = None
        if random_relations:
            relations = [
                ROOT_RELATION if heads[i] == 0 else rng.choice(FINE_RELATIONS[1:])
                for i in range(k)
            ]
        tree = tree_from_heads(heads, relations, doc_id=doc_id)
        if projective is not None and projective_by_crossing(tree) != projective:
            continue
        return tree
