"""Command-line driver for the pipeline stages and the query service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from .agreement import agreement_report
from .annotate import load_gazetteers, read_annotated, write_annotated, AnnotatedDocument
from .evaluation import evaluate_corpus
from .pipeline import (
    ConfigError,
    PipelineConfig,
    load_corpus,
    run_pipeline,
    tokenize_document,
    write_diagnostics,
    _bundled_gazetteers,
)
from .records import write_records
from .store import (
    QueryFilter,
    RecordStore,
    export_histogram_csv,
    export_scatter_csv,
    export_yearly_csv,
)
from .tag import GazetteerTagger
from .values import load_registry
from .wordpiece import load_vocab


@click.group()
def main():
    """polyrec: material property records from tagged polymer abstracts."""


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--relevant-only/--all", default=False,
              help="Keep only polymer-relevant abstracts with numeric info.")
def preprocess(input_path, out_path, relevant_only):
    """Strip markup, normalize Unicode, and split sentences."""
    docs = []
    for raw in corpus_mod.read_raw_documents(input_path):
        doc = corpus_mod.preprocess(raw)
        if relevant_only and not (
            corpus_mod.is_polymer_relevant(doc) and corpus_mod.has_numeric_info(doc)
        ):
            continue
        docs.append(doc)
    count = corpus_mod.write_documents(docs, out_path)
    click.echo(f"wrote {count} documents to {out_path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", type=click.Path(exists=True))
@click.option("--gazetteers", "gazetteers_path", type=click.Path(exists=True))
@click.option("--vocab", "vocab_path", type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def tag(config_path, corpus_path, gazetteers_path, vocab_path, out_path):
    """Label a corpus with the built-in gazetteer tagger."""
    if config_path:
        config = PipelineConfig.from_file(config_path)
        corpus_path = corpus_path or config.corpus
        gazetteers_path = gazetteers_path or config.gazetteers
        vocab_path = vocab_path or config.vocab
    if not corpus_path:
        raise click.UsageError("need --corpus or --config")
    gaz = (
        load_gazetteers(gazetteers_path)
        if gazetteers_path
        else _bundled_gazetteers()
    )
    vocab = load_vocab(vocab_path) if vocab_path else None
    tagger = GazetteerTagger(gaz)
    annotated = []
    for doc in load_corpus(corpus_path):
        tokens = tokenize_document(doc, vocab)
        labels = tagger.tag(doc, tokens)
        annotated.append(
            AnnotatedDocument(doc_id=doc.doc_id, tokens=tokens, labels=labels)
        )
    count = write_annotated(annotated, out_path)
    click.echo(f"tagged {count} documents into {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--workers", type=int, default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def extract(config_path, workers, out_path):
    """Run the full extraction pipeline over a corpus."""
    try:
        config = PipelineConfig.from_file(config_path)
    except ConfigError as exc:
        raise click.ClickException(str(exc))
    if workers is not None:
        config = PipelineConfig(**{**_config_dict(config), "workers": workers})
    if out_path is not None:
        config = PipelineConfig(**{**_config_dict(config), "output": out_path})

    run = run_pipeline(config)
    write_records(run.records, config.output)
    if config.diagnostics:
        write_diagnostics(run.diagnostics, config.diagnostics)
    click.echo(run.summary.line())
    click.echo(f"records written to {config.output}")


def _config_dict(config: PipelineConfig) -> dict:
    return {name: getattr(config, name) for name in config.__dataclass_fields__}


@main.command("eval")
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None)
def eval_cmd(pred_path, gold_path, out_path):
    """Strict entity-level evaluation of predictions against gold labels."""
    gold = {doc.doc_id: doc for doc in read_annotated(gold_path)}
    pairs = []
    for pred in read_annotated(pred_path):
        if pred.doc_id not in gold:
            raise click.ClickException(
                f"predictions for unknown doc_id {pred.doc_id!r}"
            )
        pairs.append((pred, gold[pred.doc_id]))
    report = evaluate_corpus(pairs)

    def fmt(x):
        return "-" if x is None else f"{x:.1f}"

    click.echo(f"{'label':<22} {'tp':>5} {'fp':>5} {'fn':>5} "
               f"{'P':>6} {'R':>6} {'F1':>6}")
    for name in sorted(report.per_label):
        s = report.per_label[name]
        click.echo(
            f"{name:<22} {s.tp:>5} {s.fp:>5} {s.fn:>5} "
            f"{fmt(s.precision):>6} {fmt(s.recall):>6} {fmt(s.f1):>6}"
        )
    overall = report.overall
    click.echo(
        f"{'overall':<22} {overall.tp:>5} {overall.fp:>5} {overall.fn:>5} "
        f"{fmt(overall.precision):>6} {fmt(overall.recall):>6} {fmt(overall.f1):>6}"
    )
    if out_path:
        Path(out_path).write_text(
            json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8"
        )


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(exists=True))
def kappa(files):
    """Inter-annotator agreement across annotation files (2+ annotators)."""
    if len(files) < 2:
        raise click.UsageError("need at least two annotation files")
    annotations = {}
    common = None
    per_file = []
    for path in files:
        docs = {doc.doc_id: doc for doc in read_annotated(path)}
        per_file.append((path, docs))
        common = set(docs) if common is None else common & set(docs)
    if not common:
        raise click.ClickException("annotation files share no documents")
    ordered = sorted(common)
    for i, (path, docs) in enumerate(per_file):
        labels = []
        for doc_id in ordered:
            labels.extend(label.value for label in docs[doc_id].labels)
        name = Path(path).name
        if name in annotations:
            name = f"{name}#{i}"
        annotations[name] = labels
    lengths = {len(seq) for seq in annotations.values()}
    if len(lengths) != 1:
        raise click.ClickException(
            "annotators disagree on tokenization of the shared documents"
        )
    report = agreement_report(annotations)
    for (a, b), value in report.cohen_pairwise.items():
        click.echo(f"cohen {a} vs {b}: {value:.4f}")
    click.echo(f"fleiss: {report.fleiss:.4f} (p_o={report.p_o:.4f}, "
               f"p_e={report.p_e:.4f}) over {len(ordered)} shared documents")


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--units", "units_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.option("--csv-dir", type=click.Path(), default=None,
              help="Also write histogram.csv and yearly.csv here.")
@click.option("--min-count", type=int, default=0)
def stats(records_path, corpus_path, units_path, out_path, csv_dir, min_count):
    """Composition, unique-polymer, histogram, and yearly statistics."""
    store = _open_store(records_path, corpus_path, units_path)
    payload = {
        "total_records": len(store),
        "composition": store.composition_counts(),
        "unique_neat_polymers": store.count_unique_polymers(),
        "property_histogram": store.property_histogram(min_count=min_count),
        "yearly_counts": {str(k): v for k, v in store.yearly_counts().items()},
    }
    text = json.dumps(payload, indent=2, ensure_ascii=False)
    if out_path:
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)
    if csv_dir:
        Path(csv_dir).mkdir(parents=True, exist_ok=True)
        export_histogram_csv(
            store.property_histogram(min_count=min_count),
            Path(csv_dir) / "histogram.csv",
        )
        export_yearly_csv(store.yearly_counts(), Path(csv_dir) / "yearly.csv")


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--x", "prop_x", required=True)
@click.option("--y", "prop_y", required=True)
@click.option("--scope", type=click.Choice(["SAME_RECORD_MATERIALS", "SAME_DOCUMENT"]),
              default="SAME_RECORD_MATERIALS")
@click.option("--units", "units_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
def scatter(records_path, prop_x, prop_y, scope, units_path, out_path):
    """Export property-pair scatter data as CSV."""
    store = _open_store(records_path, None, units_path)
    pairs = store.scatter_pairs(prop_x, prop_y, scope)
    export_scatter_csv(pairs, prop_x, prop_y, out_path)
    click.echo(f"wrote {len(pairs)} pairs to {out_path}")


@main.command()
@click.option("--records", "records_path", required=True, type=click.Path(exists=True))
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None)
@click.option("--units", "units_path", type=click.Path(exists=True), default=None)
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
def serve(records_path, corpus_path, units_path, port, host):
    """Serve the read-only query API over a records file."""
    import uvicorn

    from .server import create_app

    app = create_app(records_path, corpus_path=corpus_path, units_path=units_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def _open_store(records_path, corpus_path, units_path) -> RecordStore:
    registry = load_registry(units_path) if units_path else None
    doc_texts = None
    if corpus_path:
        doc_texts = {doc.doc_id: doc.text for doc in load_corpus(corpus_path)}
    return RecordStore.from_file(records_path, registry=registry, doc_texts=doc_texts)


if __name__ == "__main__":
    main()
