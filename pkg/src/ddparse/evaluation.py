"""Attachment metrics, inter-annotator agreement, and the ablation harness.

Corpus-level UAS/LAS are micro-averaged (all real EDUs pooled); per-document
values are reported alongside for macro analysis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import Mismatch
from .pipeline import PipelineConfig, run_pipeline
from .treebank import Arc, DiscourseTree, to_coarse


def _check_aligned(pred: DiscourseTree, gold: DiscourseTree) -> None:
    if [e.id for e in pred.edus] != [e.id for e in gold.edus]:
        raise Mismatch(gold.doc_id, "EDU sets differ")
    if not pred.is_annotated() or not gold.is_annotated():
        raise Mismatch(gold.doc_id, "tree is not fully annotated")


def _counts(pred: DiscourseTree, gold: DiscourseTree) -> tuple[int, int, int]:
    """(correct heads, correct head+relation, real EDU count)."""
    _check_aligned(pred, gold)
    pred_head, gold_head = pred.head_map(), gold.head_map()
    pred_rel, gold_rel = pred.relation_map(), gold.relation_map()
    head_ok = rel_ok = 0
    for i in range(1, len(gold.edus)):
        if pred_head[i] == gold_head[i]:
            head_ok += 1
            if pred_rel[i] == gold_rel[i]:
                rel_ok += 1
    return head_ok, rel_ok, gold.k


def uas(pred: DiscourseTree, gold: DiscourseTree) -> float:
    """Fraction of real EDUs whose predicted head matches gold."""
    head_ok, _, n = _counts(pred, gold)
    return head_ok / n


def las(pred: DiscourseTree, gold: DiscourseTree) -> float:
    """Fraction of real EDUs with both head and relation correct."""
    _, rel_ok, n = _counts(pred, gold)
    return rel_ok / n


def coarsen_tree(tree: DiscourseTree) -> DiscourseTree:
    """Map every relation onto the coarse inventory (for coarse-grained LAS)."""
    return tree.with_arcs(
        Arc(arc.head, arc.dependent, to_coarse(arc.relation)) for arc in tree.arcs
    )


def topic_edu_accuracy(preds, golds) -> float:
    """Fraction of documents whose root dependents match gold exactly."""
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise Mismatch("<corpus>", f"{len(preds)} predictions vs {len(golds)} golds")
    correct = 0
    for pred, gold in zip(preds, golds):
        _check_aligned(pred, gold)
        pred_roots = {a.dependent for a in pred.arcs if a.head == 0}
        gold_roots = {a.dependent for a in gold.arcs if a.head == 0}
        if pred_roots == gold_roots:
            correct += 1
    return correct / len(golds) if golds else 0.0


@dataclass(frozen=True)
class EvalReport:
    uas: float
    las: float
    topic_acc: float
    n_edus_scored: int
    per_doc: tuple[tuple[str, float, float, int], ...]  # (doc_id, uas, las, k)

    def to_dict(self) -> dict:
        return {
            "uas": self.uas,
            "las": self.las,
            "topic_acc": self.topic_acc,
            "n_edus_scored": self.n_edus_scored,
            "averaging": "micro",
            "per_doc": [
                {"doc_id": d, "uas": u, "las": l, "n_edus": k}
                for d, u, l, k in self.per_doc
            ],
        }


def evaluate_corpus(preds, golds) -> EvalReport:
    """Micro-averaged corpus report; documents are paired in order."""
    preds, golds = list(preds), list(golds)
    if len(preds) != len(golds):
        raise Mismatch("<corpus>", f"{len(preds)} predictions vs {len(golds)} golds")
    head_total = rel_total = n_total = 0
    per_doc = []
    for pred, gold in zip(preds, golds):
        head_ok, rel_ok, n = _counts(pred, gold)
        head_total += head_ok
        rel_total += rel_ok
        n_total += n
        per_doc.append((gold.doc_id, head_ok / n, rel_ok / n, n))
    return EvalReport(
        uas=head_total / n_total,
        las=rel_total / n_total,
        topic_acc=topic_edu_accuracy(preds, golds),
        n_edus_scored=n_total,
        per_doc=tuple(per_doc),
    )


def agreement(annotation_a, annotation_b) -> tuple[float, float]:
    """Micro-averaged (UAS, LAS) between two annotations of the same corpus."""
    report = evaluate_corpus(annotation_a, annotation_b)
    return report.uas, report.las


# Cumulative toggle grid in presentation order: each row enables one more
# modification on top of the previous row.
ABLATION_GRID = (
    ("direct", ()),
    ("+pronoun-fix", ("pronoun",)),
    ("+punct-fix", ("pronoun", "punct")),
    ("+two-part", ("pronoun", "punct", "two_part")),
)


def ablation_report(golds, model, adapter, config: PipelineConfig | None = None,
                    toggle_grid=ABLATION_GRID):
    """Run the pipeline once per cumulative configuration and tabulate UAS/LAS.

    ``golds`` are annotated source-language trees; predictions are evaluated
    against them.  Returns a list of (row label, uas, las) triples.
    """
    base = config or PipelineConfig()
    rows = []
    for label, enabled in toggle_grid:
        row_config = PipelineConfig(
            adapter=base.adapter,
            endpoint=base.endpoint,
            dict_file=base.dict_file,
            api_key_env=base.api_key_env,
            cache_path=base.cache_path,
            enable_punct_fix="punct" in enabled,
            enable_pronoun_fix="pronoun" in enabled,
            enable_two_part="two_part" in enabled,
            topic_cues=base.topic_cues,
            source_lang=base.source_lang,
            target_lang=base.target_lang,
        )
        preds = [run_pipeline(g, row_config, model, adapter=adapter) for g in golds]
        report = evaluate_corpus(preds, golds)
        rows.append((label, report.uas, report.las))
    return rows


def format_report(report: EvalReport) -> str:
    lines = [
        f"{'doc_id':<24} {'UAS':>7} {'LAS':>7} {'EDUs':>6}",
        "-" * 48,
    ]
    for doc_id, u, l, k in report.per_doc:
        lines.append(f"{doc_id:<24} {u:>7.3f} {l:>7.3f} {k:>6}")
    lines.append("-" * 48)
    lines.append(
        f"{'micro average':<24} {report.uas:>7.3f} {report.las:>7.3f} "
        f"{report.n_edus_scored:>6}"
    )
    lines.append(f"topic EDU accuracy: {report.topic_acc:.4f}")
    return "\n".join(lines)


def format_ablation(rows) -> str:
    lines = [f"{'configuration':<16} {'UAS':>7} {'LAS':>7}", "-" * 32]
    for label, u, l in rows:
        lines.append(f"{label:<16} {u:>7.3f} {l:>7.3f}")
    return "\n".join(lines)
