"""Domain types, corpus file format, structural validation, and corpus statistics.

A corpus is a directory of UTF-8 JSON files, one document per file.  Each file
holds a ``doc_id`` and an ``edus`` array; the artificial root (id 0) is
implicit and never serialized.  EDU entries carry ``parent``/``relation``
annotation fields which are ``-1``/``""`` for unannotated input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus, ParseError, ValidationError

# Designated relation for the arc from the artificial root to the topic EDU.
ROOT_RELATION = "ROOT"

# Fine-grained inventory (26 types) and its mapping onto the 17 coarse classes.
_FINE_TO_COARSE = {
    "ROOT": "ROOT",
    "attribution": "attribution",
    "bg-compare": "background",
    "bg-general": "background",
    "bg-goal": "background",
    "cause": "cause-affect",
    "result": "cause-affect",
    "comparison": "comparison",
    "condition": "condition",
    "contrast": "contrast",
    "elab-addition": "elaboration",
    "elab-aspect": "elaboration",
    "elab-definition": "elaboration",
    "elab-enum_member": "elaboration",
    "elab-example": "elaboration",
    "elab-process_step": "elaboration",
    "enablement": "enablement",
    "evaluation": "evaluation",
    "exp-evidence": "explain",
    "exp-reason": "explain",
    "joint": "joint",
    "manner-means": "manner-means",
    "progression": "progression",
    "same-unit": "same-unit",
    "summary": "summary",
    "temporal": "temporal",
}

# Inventory order: root relation first, then alphabetical.  The order is the
# tie-break order for relation classifiers, so it must stay fixed.
FINE_RELATIONS = (ROOT_RELATION,) + tuple(
    sorted(r for r in _FINE_TO_COARSE if r != ROOT_RELATION)
)
COARSE_RELATIONS = (ROOT_RELATION,) + tuple(
    sorted(set(_FINE_TO_COARSE.values()) - {ROOT_RELATION})
)


def to_coarse(relation: str) -> str:
    """Map a fine-grained relation to its coarse class (coarse names pass through)."""
    if relation in _FINE_TO_COARSE:
        return _FINE_TO_COARSE[relation]
    if relation in COARSE_RELATIONS or relation == "":
        return relation
    raise KeyError(f"unknown relation {relation!r}")


def is_known_relation(relation: str) -> bool:
    return relation in _FINE_TO_COARSE or relation in COARSE_RELATIONS


@dataclass(frozen=True)
class Edu:
    """One elementary discourse unit.  Id 0 is the artificial root."""

    id: int
    text: str
    sentence_index: int
    ends_with_period: bool

    @property
    def is_root(self) -> bool:
        return self.id == 0


def artificial_root() -> Edu:
    return Edu(id=0, text="", sentence_index=-1, ends_with_period=False)


@dataclass(frozen=True)
class Arc:
    head: int
    dependent: int
    relation: str = ""


@dataclass(frozen=True)
class DiscourseTree:
    """A dependency tree over EDUs.  ``edus[0]`` is always the artificial root."""

    doc_id: str
    edus: tuple[Edu, ...]
    arcs: tuple[Arc, ...] = ()

    @property
    def k(self) -> int:
        """Number of real EDUs (excluding the artificial root)."""
        return len(self.edus) - 1

    def real_edus(self) -> tuple[Edu, ...]:
        return self.edus[1:]

    def head_map(self) -> dict[int, int]:
        """dependent id -> head id, over the annotated arcs."""
        return {a.dependent: a.head for a in self.arcs}

    def relation_map(self) -> dict[int, str]:
        """dependent id -> relation, over the annotated arcs."""
        return {a.dependent: a.relation for a in self.arcs}

    def is_annotated(self) -> bool:
        return len(self.arcs) == self.k

    def with_arcs(self, arcs) -> "DiscourseTree":
        return DiscourseTree(self.doc_id, self.edus, tuple(arcs))


def build_tree(doc_id: str, edus, arcs=()) -> DiscourseTree:
    """Assemble a tree, prepending the artificial root when absent."""
    edus = tuple(edus)
    if not edus or edus[0].id != 0:
        edus = (artificial_root(),) + edus
    return DiscourseTree(doc_id, edus, tuple(arcs))


def validate_tree(tree: DiscourseTree) -> list[str]:
    """Return structural violations (empty list = valid).

    Checks, in order: EDU id numbering, arc endpoint sanity (dependent is a
    real EDU, no self-loops, ids in range), one head per real EDU, acyclicity,
    and connectivity to the root.
    """
    violations = []
    ids = [e.id for e in tree.edus]
    if ids != list(range(len(ids))):
        violations.append(f"bad-edu-numbering({ids})")
        return violations
    if tree.edus[0].text != "":
        violations.append("root-has-text(0)")
    known = set(ids)

    heads: dict[int, list[int]] = {}
    for arc in tree.arcs:
        if arc.dependent == 0:
            violations.append("root-as-dependent(0)")
            continue
        if arc.head == arc.dependent:
            violations.append(f"self-head({arc.dependent})")
            continue
        if arc.head not in known or arc.dependent not in known:
            violations.append(f"unknown-edu({arc.head}->{arc.dependent})")
            continue
        heads.setdefault(arc.dependent, []).append(arc.head)

    for dep in sorted(heads):
        if len(heads[dep]) > 1:
            violations.append(f"multiple-heads({dep})")
    for i in range(1, len(ids)):
        if i not in heads:
            violations.append(f"headless({i})")
    if violations:
        return violations

    # Single head everywhere: check every EDU climbs to the root.
    head_of = {dep: hs[0] for dep, hs in heads.items()}
    for i in range(1, len(ids)):
        seen = {i}
        node = i
        while node != 0:
            node = head_of[node]
            if node in seen:
                violations.append(f"cycle({i})")
                break
            seen.add(node)
    return violations


def is_projective(tree: DiscourseTree) -> bool:
    """True iff no two arcs cross when EDUs are laid out in id order.

    Implemented via the arc condition: for every arc, each node strictly
    between its endpoints must be a descendant of the arc's head.  (The
    pairwise crossing test is kept as an independent oracle in the tests.)
    """
    head_of = tree.head_map()

    def is_descendant_of(node: int, ancestor: int) -> bool:
        while node != 0:
            node = head_of[node]
            if node == ancestor:
                return True
        return ancestor == 0

    for arc in tree.arcs:
        lo, hi = sorted((arc.head, arc.dependent))
        for between in range(lo + 1, hi):
            if not is_descendant_of(between, arc.head):
                return False
    return True


# ---------------------------------------------------------------------------
# Corpus file format


_EDU_FIELDS = ("id", "text", "parent", "relation", "sentence", "ends_with_period")


def document_from_record(record, source="<memory>") -> DiscourseTree:
    if not isinstance(record, dict):
        raise ParseError(source, "top-level value is not an object")
    for key in ("doc_id", "edus"):
        if key not in record:
            raise ParseError(source, f"missing field {key!r}")
    doc_id = record["doc_id"]
    if not isinstance(doc_id, str) or not doc_id:
        raise ParseError(source, "doc_id must be a non-empty string")
    if not isinstance(record["edus"], list) or not record["edus"]:
        raise ParseError(source, "edus must be a non-empty array")

    edus = [artificial_root()]
    arcs = []
    for pos, entry in enumerate(record["edus"], start=1):
        if not isinstance(entry, dict):
            raise ParseError(source, f"edu #{pos} is not an object")
        for key in _EDU_FIELDS:
            if key not in entry:
                raise ParseError(source, f"edu #{pos} missing field {key!r}")
        if entry["id"] != pos:
            raise ValidationError(doc_id, f"non-consecutive-id({entry['id']} at {pos})")
        if not isinstance(entry["text"], str):
            raise ParseError(source, f"edu #{pos} text is not a string")
        edus.append(
            Edu(
                id=pos,
                text=entry["text"],
                sentence_index=int(entry["sentence"]),
                ends_with_period=bool(entry["ends_with_period"]),
            )
        )
        parent = entry["parent"]
        relation = entry["relation"]
        if not isinstance(parent, int) or isinstance(parent, bool):
            raise ParseError(source, f"edu #{pos} parent is not an integer")
        if not isinstance(relation, str):
            raise ParseError(source, f"edu #{pos} relation is not a string")
        if parent != -1:
            arcs.append(Arc(head=parent, dependent=pos, relation=relation))
        elif relation != "":
            raise ValidationError(doc_id, f"relation-without-parent({pos})")

    tree = DiscourseTree(doc_id, tuple(edus), tuple(arcs))
    for arc in arcs:
        if arc.relation and not is_known_relation(arc.relation):
            raise ValidationError(doc_id, f"unknown-relation({arc.relation})")
    if arcs:
        subset = validate_tree(tree) if tree.is_annotated() else _partial_violations(tree)
        if subset:
            raise ValidationError(doc_id, subset[0])
    return tree


def _partial_violations(tree: DiscourseTree) -> list[str]:
    """Arc-level checks for partially annotated documents (headless EDUs allowed)."""
    return [v for v in validate_tree(tree) if not v.startswith("headless(")]


def load_document(path) -> DiscourseTree:
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
        record = json.loads(raw)
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(path, str(exc)) from exc
    return document_from_record(record, path)


def load_corpus(path) -> list[DiscourseTree]:
    """Load every ``*.json`` document under ``path``, sorted by filename."""
    root = Path(path)
    if not root.is_dir():
        raise ParseError(root, "not a directory")
    files = sorted(root.glob("*.json"))
    return [load_document(f) for f in files]


def document_to_record(tree: DiscourseTree) -> dict:
    head_of = tree.head_map()
    rel_of = tree.relation_map()
    return {
        "doc_id": tree.doc_id,
        "edus": [
            {
                "id": e.id,
                "text": e.text,
                "parent": head_of.get(e.id, -1),
                "relation": rel_of.get(e.id, ""),
                "sentence": e.sentence_index,
                "ends_with_period": e.ends_with_period,
            }
            for e in tree.real_edus()
        ],
    }


def dumps_document(tree: DiscourseTree) -> str:
    """Canonical serialization: 2-space indent, raw unicode, trailing newline."""
    return json.dumps(document_to_record(tree), ensure_ascii=False, indent=2) + "\n"


def save_document(tree: DiscourseTree, path) -> None:
    Path(path).write_text(dumps_document(tree), encoding="utf-8")


def save_corpus(corpus, directory) -> list[Path]:
    """Write one ``<doc_id>.json`` per document; returns the written paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for tree in corpus:
        target = out / f"{tree.doc_id}.json"
        save_document(tree, target)
        written.append(target)
    return written


# ---------------------------------------------------------------------------
# Corpus statistics


@dataclass(frozen=True)
class CorpusStats:
    n_docs: int
    n_edus: int  # includes one artificial root per document
    n_relations: int
    avg_edus_per_doc: float
    avg_edus_per_sentence: float
    avg_chars_per_edu: float
    relation_freq: tuple[tuple[str, int, float], ...] = field(default=())


def corpus_stats(corpus) -> CorpusStats:
    corpus = list(corpus)
    if not corpus:
        raise EmptyCorpus("corpus is empty")
    n_docs = len(corpus)
    n_real = sum(t.k for t in corpus)
    n_sentences = sum(len({e.sentence_index for e in t.real_edus()}) for t in corpus)
    n_chars = sum(len(e.text.strip()) for t in corpus for e in t.real_edus())

    counts: dict[str, int] = {}
    for tree in corpus:
        for arc in tree.arcs:
            counts[arc.relation] = counts.get(arc.relation, 0) + 1
    n_relations = sum(counts.values())
    freq = tuple(
        (rel, count, 100.0 * count / n_relations)
        for rel, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    )
    return CorpusStats(
        n_docs=n_docs,
        n_edus=n_real + n_docs,
        n_relations=n_relations,
        avg_edus_per_doc=n_real / n_docs,
        avg_edus_per_sentence=n_real / n_sentences if n_sentences else 0.0,
        avg_chars_per_edu=n_chars / n_real if n_real else 0.0,
        relation_freq=freq,
    )
