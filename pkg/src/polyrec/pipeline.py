"""End-to-end corpus runs: configuration, tokenization choice, tagger
choice, and serial or multi-process execution with deterministic output
order (parallel runs produce byte-identical record files)."""

from __future__ import annotations

import json
import multiprocessing
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from . import corpus as corpus_mod
from .annotate import load_gazetteers
from .coref import CorefConfig
from .corpus import Document, RawDocument
from .extract import (
    Diagnostic,
    ExtractConfig,
    ExtractionResult,
    extract_records,
    load_normalization,
)
from .labels import EntityLabel
from .records import MaterialPropertyRecord
from .tag import GazetteerTagger, load_predictions
from .values import PropertyRegistry, load_registry
from .wordpiece import Vocabulary, load_vocab, whitespace_tokenize, wordpiece_tokenize


class ConfigError(ValueError):
    """Unusable pipeline configuration."""


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str
    output: str = "records.jsonl"
    diagnostics: Optional[str] = None
    vocab: Optional[str] = None
    gazetteers: Optional[str] = None  # None -> bundled seed gazetteers
    normalization: Optional[str] = None  # None -> bundled dictionary
    units: Optional[str] = None  # None -> bundled registry
    predictions: Optional[str] = None
    pair_window: int = 10
    amount_window: int = 10
    max_levenshtein: int = 1
    use_abbreviations: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for name in ("corpus", "vocab", "gazetteers", "normalization",
                     "units", "predictions"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise ConfigError(f"{name} file does not exist: {path}")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "PipelineConfig":
        base = Path(path).parent
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")

        def resolve(value):
            if isinstance(value, str) and not Path(value).is_absolute():
                return str(base / value)
            return value

        for key in ("corpus", "output", "diagnostics", "vocab", "gazetteers",
                    "normalization", "units", "predictions"):
            if raw.get(key) is not None:
                raw[key] = resolve(raw[key])
        return cls(**raw)

    def extract_config(self) -> ExtractConfig:
        return ExtractConfig(
            pair_window=self.pair_window,
            amount_window=self.amount_window,
            coref=CorefConfig(
                max_levenshtein=self.max_levenshtein,
                use_abbreviations=self.use_abbreviations,
            ),
        )


def load_corpus(path: Union[str, Path]) -> List[Document]:
    """Load a corpus file, accepting both raw and preprocessed shapes."""
    docs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if "text" in obj:
                docs.append(corpus_mod.document_from_json(obj))
            else:
                raw = RawDocument(
                    doc_id=obj.get("doc_id", ""),
                    title=obj.get("title") or "",
                    abstract_markup=obj.get("abstract") or "",
                    year=obj.get("year"),
                    doi=obj.get("doi"),
                )
                docs.append(corpus_mod.preprocess(raw))
    return docs


def tokenize_document(doc: Document, vocab: Optional[Vocabulary]):
    if vocab is None:
        return whitespace_tokenize(doc.text)
    return wordpiece_tokenize(doc.text, vocab)


@dataclass
class PipelineSummary:
    documents_in: int = 0
    polymer_relevant: int = 0
    passed_entity_filter: int = 0
    records_out: int = 0
    parse_failures: int = 0

    def line(self) -> str:
        return (
            f"{self.documents_in} in / {self.polymer_relevant} polymer-relevant / "
            f"{self.passed_entity_filter} passed filter / "
            f"{self.records_out} records / {self.parse_failures} parse failures"
        )


@dataclass
class PipelineRun:
    records: List[MaterialPropertyRecord]
    diagnostics: List[Diagnostic]
    summary: PipelineSummary


# per-worker state for multiprocessing (initialized once per process)
_WORKER_STATE: dict = {}


def _init_worker(config: PipelineConfig, labels_by_doc, vocab_entries):
    _WORKER_STATE["config"] = config
    _WORKER_STATE["extract_config"] = config.extract_config()
    _WORKER_STATE["registry"] = load_registry(config.units)
    _WORKER_STATE["normalization"] = load_normalization(config.normalization)
    _WORKER_STATE["labels_by_doc"] = labels_by_doc
    _WORKER_STATE["vocab"] = (
        Vocabulary(entries=vocab_entries) if vocab_entries else None
    )
    if labels_by_doc is None:
        gaz = (
            load_gazetteers(config.gazetteers)
            if config.gazetteers
            else _bundled_gazetteers()
        )
        _WORKER_STATE["tagger"] = GazetteerTagger(gaz)


def _bundled_gazetteers():
    from importlib import resources

    with resources.files("polyrec.data").joinpath("gazetteers.json").open(
        encoding="utf-8"
    ) as fh:
        raw = json.load(fh)
    return {
        EntityLabel.parse(name): set(surfaces) for name, surfaces in raw.items()
    }


def _process_document(doc: Document) -> Tuple[str, list, list, bool]:
    tokens = tokenize_document(doc, _WORKER_STATE["vocab"])
    labels_by_doc = _WORKER_STATE["labels_by_doc"]
    if labels_by_doc is not None:
        label_names = labels_by_doc.get(doc.doc_id)
        if label_names is None:
            return doc.doc_id, [], [
                Diagnostic(doc.doc_id, "tag", "no predictions for document")
            ], False
        labels = [EntityLabel.parse(name) for name in label_names]
        if len(labels) != len(tokens):
            raise ValueError(
                f"{doc.doc_id}: {len(labels)} predicted labels vs "
                f"{len(tokens)} tokens"
            )
    else:
        labels = _WORKER_STATE["tagger"].tag(doc, tokens)
    result = extract_records(
        doc,
        tokens,
        labels,
        config=_WORKER_STATE["extract_config"],
        registry=_WORKER_STATE["registry"],
        normalization=_WORKER_STATE["normalization"],
    )
    passed = not any(d.stage == "filter" for d in result.diagnostics)
    return doc.doc_id, result.records, result.diagnostics, passed


def run_pipeline(
    config: PipelineConfig,
    documents: Optional[Sequence[Document]] = None,
) -> PipelineRun:
    """Extract records for every polymer-relevant document in the corpus."""
    docs = list(documents) if documents is not None else load_corpus(config.corpus)
    summary = PipelineSummary(documents_in=len(docs))
    diagnostics: List[Diagnostic] = []

    relevant = []
    for doc in docs:
        if corpus_mod.is_polymer_relevant(doc):
            relevant.append(doc)
        else:
            diagnostics.append(
                Diagnostic(doc.doc_id, "polymer_filter", "no 'poly' substring")
            )
    summary.polymer_relevant = len(relevant)

    labels_by_doc = None
    if config.predictions:
        vocab = load_vocab(config.vocab) if config.vocab else None
        expected = {
            doc.doc_id: len(tokenize_document(doc, vocab)) for doc in relevant
        }
        predictions = load_predictions(config.predictions, expected)
        labels_by_doc = {
            doc_id: [label.value for label in labels]
            for doc_id, labels in predictions.items()
        }

    vocab_entries = None
    if config.vocab:
        vocab_entries = load_vocab(config.vocab).entries

    if config.workers == 1:
        _init_worker(config, labels_by_doc, vocab_entries)
        results = [_process_document(doc) for doc in relevant]
    else:
        with multiprocessing.Pool(
            processes=config.workers,
            initializer=_init_worker,
            initargs=(config, labels_by_doc, vocab_entries),
        ) as pool:
            results = pool.map(_process_document, relevant, chunksize=64)

    records: List[MaterialPropertyRecord] = []
    for _doc_id, doc_records, doc_diagnostics, passed in results:
        records.extend(doc_records)
        diagnostics.extend(doc_diagnostics)
        if passed:
            summary.passed_entity_filter += 1
    summary.records_out = len(records)
    summary.parse_failures = sum(
        1 for d in diagnostics if d.stage in ("parse_value", "parse_amount")
    )
    return PipelineRun(records=records, diagnostics=diagnostics, summary=summary)


def write_diagnostics(
    diagnostics: Iterable[Diagnostic], path: Union[str, Path]
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for diag in diagnostics:
            fh.write(json.dumps(diag.to_json(), ensure_ascii=False) + "\n")
            count += 1
    return count
