"""Command-line entry point: train, parse, pipeline, evaluate, stats, serve.

Every option has a config-file twin (flat ``key=value`` lines); explicit
flags override config values, which override defaults.  All randomness flows
from the ``--seed`` flag (default 42), so identical inputs give byte-identical
outputs.
"""

from __future__ import annotations

import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from . import evaluation, parser, pipeline as pipeline_mod, treebank
from .classifier import TrainConfig
from .errors import AdapterError, DdparseError
from .pipeline import DEFAULT_TOPIC_CUES, PipelineConfig, build_adapter


def _read_config_file(path) -> dict[str, str]:
    values = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise click.ClickException(f"bad config line (expected key=value): {raw!r}")
        values[key.strip()] = value.strip()
    return values


def _resolve(flag, config: dict, key: str, default, cast=str):
    """Flag beats config file beats default."""
    if flag is not None:
        return flag
    if key in config:
        raw = config[key]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _load_corpus_or_die(path):
    try:
        corpus = treebank.load_corpus(path)
    except DdparseError as exc:
        raise click.ClickException(str(exc)) from exc
    if not corpus:
        raise click.ClickException(f"no documents found in {path}")
    return corpus


def _read_cues(path) -> tuple[str, ...]:
    cues = [
        line.strip()
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    return tuple(cues) or DEFAULT_TOPIC_CUES


config_option = click.option("--config", "config_path", type=click.Path(exists=True),
                             default=None, help="Flat key=value config file.")


@click.group()
def main():
    """Discourse dependency parsing toolkit."""


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(), default=None)
@click.option("--model", "model_out", type=click.Path(), default=None)
@click.option("--granularity", type=click.Choice(["coarse", "fine"]), default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--l2", type=float, default=None)
@click.option("--seed", type=int, default=None)
@config_option
def train(corpus_dir, model_out, granularity, epochs, learning_rate, l2, seed,
          config_path):
    """Train a two-stage parser model from an annotated corpus."""
    cfg = _read_config_file(config_path) if config_path else {}
    corpus_dir = _resolve(corpus_dir, cfg, "corpus", None)
    model_out = _resolve(model_out, cfg, "model", None)
    if not corpus_dir or not model_out:
        raise click.ClickException("--corpus and --model are required")
    train_config = TrainConfig(
        epochs=_resolve(epochs, cfg, "epochs", 10, int),
        learning_rate=_resolve(learning_rate, cfg, "learning_rate", 0.1, float),
        l2=_resolve(l2, cfg, "l2", 1e-5, float),
        seed=_resolve(seed, cfg, "seed", 42, int),
    )
    granularity = _resolve(granularity, cfg, "granularity", "fine")

    corpus = _load_corpus_or_die(corpus_dir)
    try:
        model = parser.train_parser(corpus, train_config, granularity)
    except DdparseError as exc:
        raise click.ClickException(str(exc)) from exc
    parser.save_parser_model(model, model_out)
    s = model.summary
    click.echo(f"documents: {s.n_docs}")
    click.echo(f"projective trees (stage 1): {s.n_projective}")
    click.echo(f"non-projective trees skipped for stage 1: {s.n_nonprojective_skipped}")
    click.echo(f"stage-1 action examples: {s.n_action_examples}")
    click.echo(f"stage-2 relation examples: {s.n_relation_examples}")
    click.echo(f"relation labels: {s.n_relation_labels}")
    click.echo(f"model written: {model_out}")


def _parse_documents(corpus, model, jobs):
    def one(tree):
        parsed = parser.parse(list(tree.real_edus()), model)
        return treebank.build_tree(tree.doc_id, tree.real_edus(), parsed.arcs)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, corpus))
    return [one(tree) for tree in corpus]


@main.command("parse")
@click.option("--corpus", "corpus_dir", type=click.Path(), default=None)
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--jobs", type=int, default=None)
@config_option
def parse_cmd(corpus_dir, model_path, out_dir, jobs, config_path):
    """Parse documents with a trained model; writes one file per input."""
    cfg = _read_config_file(config_path) if config_path else {}
    corpus_dir = _resolve(corpus_dir, cfg, "corpus", None)
    model_path = _resolve(model_path, cfg, "model", None)
    out_dir = _resolve(out_dir, cfg, "out", None)
    jobs = _resolve(jobs, cfg, "jobs", 1, int)
    if not corpus_dir or not model_path or not out_dir:
        raise click.ClickException("--corpus, --model and --out are required")

    corpus = _load_corpus_or_die(corpus_dir)
    try:
        model = parser.load_parser_model(model_path)
    except (DdparseError, OSError) as exc:
        raise click.ClickException(f"cannot load model: {exc}") from exc
    parsed = _parse_documents(corpus, model, jobs)
    written = treebank.save_corpus(parsed, out_dir)
    click.echo(f"parsed {len(written)} documents into {out_dir}")


@main.command("pipeline")
@click.option("--corpus", "corpus_dir", type=click.Path(), default=None)
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--adapter", type=click.Choice(["http", "dict", "identity"]), default=None)
@click.option("--endpoint", default=None)
@click.option("--dict-file", default=None)
@click.option("--cache", "cache_path", default=None)
@click.option("--punct-fix/--no-punct-fix", "punct_fix", default=None)
@click.option("--pronoun-fix/--no-pronoun-fix", "pronoun_fix", default=None)
@click.option("--two-part/--no-two-part", "two_part", default=None)
@click.option("--topic-cues", "cues_file", type=click.Path(exists=True), default=None)
@click.option("--jobs", type=int, default=None)
@config_option
def pipeline_cmd(corpus_dir, model_path, out_dir, adapter, endpoint, dict_file,
                 cache_path, punct_fix, pronoun_fix, two_part, cues_file, jobs,
                 config_path):
    """Zero-shot parse source-language documents via translation."""
    cfg = _read_config_file(config_path) if config_path else {}
    corpus_dir = _resolve(corpus_dir, cfg, "corpus", None)
    model_path = _resolve(model_path, cfg, "model", None)
    out_dir = _resolve(out_dir, cfg, "out", None)
    jobs = _resolve(jobs, cfg, "jobs", 1, int)
    if not corpus_dir or not model_path or not out_dir:
        raise click.ClickException("--corpus, --model and --out are required")
    cues = _read_cues(cues_file) if cues_file else (
        tuple(cfg["topic_cues"].split(",")) if "topic_cues" in cfg else DEFAULT_TOPIC_CUES
    )
    pipe_config = PipelineConfig(
        adapter=_resolve(adapter, cfg, "adapter", "identity"),
        endpoint=_resolve(endpoint, cfg, "endpoint", ""),
        dict_file=_resolve(dict_file, cfg, "dict_file", ""),
        api_key_env=cfg.get("api_key_env", ""),
        cache_path=_resolve(cache_path, cfg, "cache", ""),
        enable_punct_fix=_resolve(punct_fix, cfg, "punct_fix", False, bool),
        enable_pronoun_fix=_resolve(pronoun_fix, cfg, "pronoun_fix", False, bool),
        enable_two_part=_resolve(two_part, cfg, "two_part", False, bool),
        topic_cues=cues,
    )

    corpus = _load_corpus_or_die(corpus_dir)
    try:
        model = parser.load_parser_model(model_path)
        shared_adapter = build_adapter(pipe_config)
    except (DdparseError, OSError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc

    def one(tree):
        return pipeline_mod.run_pipeline(tree, pipe_config, model, adapter=shared_adapter)

    results, skipped = [], []
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {tree.doc_id: pool.submit(one, tree) for tree in corpus}
        for tree in corpus:
            try:
                results.append(futures[tree.doc_id].result())
            except AdapterError as exc:
                skipped.append(tree.doc_id)
                click.echo(f"skipped {tree.doc_id}: {exc}", err=True)
    else:
        for tree in corpus:
            try:
                results.append(one(tree))
            except AdapterError as exc:
                skipped.append(tree.doc_id)
                click.echo(f"skipped {tree.doc_id}: {exc}", err=True)

    treebank.save_corpus(results, out_dir)
    click.echo(f"parsed {len(results)} documents into {out_dir}"
               + (f" ({len(skipped)} skipped)" if skipped else ""))
    if skipped:
        sys.exit(1)


@main.command()
@click.option("--pred", "pred_dir", type=click.Path(), default=None)
@click.option("--gold", "gold_dir", type=click.Path(), default=None)
@click.option("--granularity", type=click.Choice(["coarse", "fine"]), default=None)
@click.option("--out", "out_file", type=click.Path(), default=None)
@click.option("--ablate", is_flag=True, default=False,
              help="Run the cumulative pipeline ablation over the gold corpus.")
@click.option("--model", "model_path", type=click.Path(), default=None)
@click.option("--adapter", type=click.Choice(["http", "dict", "identity"]), default=None)
@click.option("--endpoint", default=None)
@click.option("--dict-file", default=None)
@click.option("--cache", "cache_path", default=None)
@click.option("--topic-cues", "cues_file", type=click.Path(exists=True), default=None)
@config_option
def evaluate(pred_dir, gold_dir, granularity, out_file, ablate, model_path,
             adapter, endpoint, dict_file, cache_path, cues_file, config_path):
    """Score predictions against gold (UAS/LAS/topic accuracy)."""
    cfg = _read_config_file(config_path) if config_path else {}
    gold_dir = _resolve(gold_dir, cfg, "gold", None)
    granularity = _resolve(granularity, cfg, "granularity", "fine")
    if not gold_dir:
        raise click.ClickException("--gold is required")
    golds = _load_corpus_or_die(gold_dir)

    if ablate:
        model_path = _resolve(model_path, cfg, "model", None)
        if not model_path:
            raise click.ClickException("--ablate requires --model")
        cues = _read_cues(cues_file) if cues_file else DEFAULT_TOPIC_CUES
        pipe_config = PipelineConfig(
            adapter=_resolve(adapter, cfg, "adapter", "identity"),
            endpoint=_resolve(endpoint, cfg, "endpoint", ""),
            dict_file=_resolve(dict_file, cfg, "dict_file", ""),
            api_key_env=cfg.get("api_key_env", ""),
            cache_path=_resolve(cache_path, cfg, "cache", ""),
            topic_cues=cues,
        )
        try:
            model = parser.load_parser_model(model_path)
            shared_adapter = build_adapter(pipe_config)
            if granularity == "coarse":
                golds = [evaluation.coarsen_tree(g) for g in golds]
            rows = evaluation.ablation_report(golds, model, shared_adapter, pipe_config)
        except (DdparseError, OSError, ValueError) as exc:
            raise click.ClickException(str(exc)) from exc
        click.echo(evaluation.format_ablation(rows))
        if out_file:
            payload = [{"config": c, "uas": u, "las": l} for c, u, l in rows]
            Path(out_file).write_text(json.dumps(payload, indent=2) + "\n",
                                      encoding="utf-8")
        return

    pred_dir = _resolve(pred_dir, cfg, "pred", None)
    if not pred_dir:
        raise click.ClickException("--pred is required")
    preds = _load_corpus_or_die(pred_dir)
    by_id = {t.doc_id: t for t in preds}
    if sorted(by_id) != sorted(t.doc_id for t in golds):
        raise click.ClickException("prediction and gold corpora hold different doc_ids")
    ordered_preds = [by_id[g.doc_id] for g in golds]
    if granularity == "coarse":
        ordered_preds = [evaluation.coarsen_tree(t) for t in ordered_preds]
        golds = [evaluation.coarsen_tree(t) for t in golds]
    try:
        report = evaluation.evaluate_corpus(ordered_preds, golds)
    except DdparseError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(evaluation.format_report(report))
    if out_file:
        Path(out_file).write_text(json.dumps(report.to_dict(), indent=2) + "\n",
                                  encoding="utf-8")


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(), default=None)
@config_option
def stats(corpus_dir, config_path):
    """Corpus statistics: document/EDU counts and relation frequencies."""
    cfg = _read_config_file(config_path) if config_path else {}
    corpus_dir = _resolve(corpus_dir, cfg, "corpus", None)
    if not corpus_dir:
        raise click.ClickException("--corpus is required")
    corpus = _load_corpus_or_die(corpus_dir)
    s = treebank.corpus_stats(corpus)
    click.echo(f"documents: {s.n_docs}")
    click.echo(f"EDUs (incl. artificial roots): {s.n_edus}")
    click.echo(f"relations: {s.n_relations}")
    click.echo(f"avg EDUs per document: {s.avg_edus_per_doc:.2f}")
    click.echo(f"avg EDUs per sentence: {s.avg_edus_per_sentence:.2f}")
    click.echo(f"avg chars per EDU: {s.avg_chars_per_edu:.2f}")
    click.echo(f"{'relation':<20} {'count':>7} {'percent':>8}")
    for rel, count, pct in s.relation_freq:
        click.echo(f"{rel:<20} {count:>7} {pct:>7.2f}%")


@main.command()
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(model_path, host, port):
    """Run the HTTP parsing service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(model_path), host=host, port=port)


if __name__ == "__main__":
    main()
