"""HTTP service wrapping the parser for long-running, multi-client use.

The app loads one trained model at startup (path argument or the
``DDPARSE_MODEL`` environment variable) and exposes document-level parsing,
the zero-shot pipeline, validation, evaluation, and corpus statistics.
Documents on the wire mirror the on-disk JSON schema exactly.
"""

from __future__ import annotations

import os

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import evaluation, parser, treebank
from .errors import AdapterError, DdparseError
from .pipeline import DEFAULT_TOPIC_CUES, DictionaryAdapter, IdentityAdapter, \
    PipelineConfig, run_pipeline


class EduIn(BaseModel):
    id: int
    text: str
    parent: int = -1
    relation: str = ""
    sentence: int = 0
    ends_with_period: bool = False


class DocumentIn(BaseModel):
    doc_id: str
    edus: list[EduIn]


class ArcOut(BaseModel):
    head: int
    dependent: int
    relation: str


class DocumentOut(BaseModel):
    doc_id: str
    edus: list[EduIn]


class PipelineOptions(BaseModel):
    punct_fix: bool = False
    pronoun_fix: bool = False
    two_part: bool = False
    topic_cues: list[str] = Field(default_factory=lambda: list(DEFAULT_TOPIC_CUES))
    translations: dict[str, str] | None = None  # exact-match lookup; None = identity


class PipelineRequest(BaseModel):
    doc: DocumentIn
    options: PipelineOptions = Field(default_factory=PipelineOptions)


class ValidateResponse(BaseModel):
    doc_id: str
    violations: list[str]
    projective: bool | None = None


class EvaluateRequest(BaseModel):
    preds: list[DocumentIn]
    golds: list[DocumentIn]


class EvaluateResponse(BaseModel):
    uas: float
    las: float
    topic_acc: float
    n_edus_scored: int


class StatsRequest(BaseModel):
    docs: list[DocumentIn]


class StatsResponse(BaseModel):
    n_docs: int
    n_edus: int
    n_relations: int
    avg_edus_per_doc: float
    avg_edus_per_sentence: float
    avg_chars_per_edu: float
    relation_freq: list[tuple[str, int, float]]


def _to_tree(doc: DocumentIn) -> treebank.DiscourseTree:
    try:
        return treebank.document_from_record(
            doc.model_dump(), f"<request:{doc.doc_id}>"
        )
    except DdparseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _to_document(tree: treebank.DiscourseTree) -> DocumentOut:
    record = treebank.document_to_record(tree)
    return DocumentOut(doc_id=record["doc_id"],
                       edus=[EduIn(**e) for e in record["edus"]])


def create_app(model_path: str | None = None) -> FastAPI:
    model_path = model_path or os.environ.get("DDPARSE_MODEL", "")
    model: parser.ParserModel | None = None
    if model_path:
        model = parser.load_parser_model(model_path)

    app = FastAPI(title="ddparse", version="0.1.0")

    def require_model() -> parser.ParserModel:
        if model is None:
            raise HTTPException(status_code=503, detail="no model loaded")
        return model

    @app.get("/health")
    def health():
        return {"status": "ok", "model_loaded": model is not None}

    @app.post("/parse", response_model=DocumentOut)
    def parse_document(doc: DocumentIn):
        m = require_model()
        tree = _to_tree(doc)
        parsed = parser.parse(list(tree.real_edus()), m)
        return _to_document(treebank.build_tree(tree.doc_id, tree.real_edus(),
                                                parsed.arcs))

    @app.post("/pipeline", response_model=DocumentOut)
    def pipeline_document(request: PipelineRequest):
        m = require_model()
        tree = _to_tree(request.doc)
        opts = request.options
        config = PipelineConfig(
            enable_punct_fix=opts.punct_fix,
            enable_pronoun_fix=opts.pronoun_fix,
            enable_two_part=opts.two_part,
            topic_cues=tuple(opts.topic_cues),
        )
        adapter = (
            DictionaryAdapter(opts.translations)
            if opts.translations is not None
            else IdentityAdapter()
        )
        try:
            result = run_pipeline(tree, config, m, adapter=adapter)
        except AdapterError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return _to_document(result)

    @app.post("/validate", response_model=ValidateResponse)
    def validate_document(doc: DocumentIn):
        tree = _to_tree(doc)
        violations = treebank.validate_tree(tree)
        projective = treebank.is_projective(tree) if not violations else None
        return ValidateResponse(doc_id=tree.doc_id, violations=violations,
                                projective=projective)

    @app.post("/evaluate", response_model=EvaluateResponse)
    def evaluate_documents(request: EvaluateRequest):
        preds = [_to_tree(d) for d in request.preds]
        golds = [_to_tree(d) for d in request.golds]
        try:
            report = evaluation.evaluate_corpus(preds, golds)
        except DdparseError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return EvaluateResponse(uas=report.uas, las=report.las,
                                topic_acc=report.topic_acc,
                                n_edus_scored=report.n_edus_scored)

    @app.post("/stats", response_model=StatsResponse)
    def stats_documents(request: StatsRequest):
        try:
            s = treebank.corpus_stats([_to_tree(d) for d in request.docs])
        except DdparseError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return StatsResponse(
            n_docs=s.n_docs, n_edus=s.n_edus, n_relations=s.n_relations,
            avg_edus_per_doc=s.avg_edus_per_doc,
            avg_edus_per_sentence=s.avg_edus_per_sentence,
            avg_chars_per_edu=s.avg_chars_per_edu,
            relation_freq=list(s.relation_freq),
        )

    return app
