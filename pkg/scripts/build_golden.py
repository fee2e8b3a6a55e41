#!/usr/bin/env python3
"""Regenerate the committed golden corpus artifacts from the declarative
source fixture.

Reads tests/data/golden_source.json and writes:
  tests/data/golden_corpus.jsonl      raw documents (markup intact)
  tests/data/golden_predictions.jsonl gold token labels in the shared
                                      predictions format (polymer-relevant
                                      documents only, mirroring the
                                      pipeline's filter order)

The entity spans in the source fixture are declared on the PREPROCESSED
text as (surface, occurrence) pairs; this script locates them, checks that
they align with token boundaries, and paints the token labels.
"""

import json
import sys
from pathlib import Path

from polyrec.annotate import AnnotatedDocument, annotated_to_json
from polyrec.corpus import RawDocument, is_polymer_relevant, preprocess
from polyrec.labels import EntityLabel
from polyrec.wordpiece import whitespace_tokenize

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def locate(text: str, surface: str, occurrence: int) -> int:
    start = -1
    for _ in range(occurrence + 1):
        start = text.index(surface, start + 1)
    return start


def paint_labels(doc_id, text, tokens, entities):
    labels = [EntityLabel.OTHER] * len(tokens)
    starts = {t.start: i for i, t in enumerate(tokens)}
    ends = {t.end: i for i, t in enumerate(tokens)}
    for entity in entities:
        surface = entity["surface"]
        start = locate(text, surface, entity.get("occurrence", 0))
        end = start + len(surface)
        if start not in starts or end not in ends:
            raise SystemExit(
                f"{doc_id}: span {surface!r} [{start}:{end}] does not align "
                f"with token boundaries"
            )
        label = EntityLabel.parse(entity["label"])
        for i in range(starts[start], ends[end] + 1):
            if labels[i] is not EntityLabel.OTHER:
                raise SystemExit(f"{doc_id}: overlapping span {surface!r}")
            labels[i] = label
    return labels


def main():
    source = json.loads((DATA / "golden_source.json").read_text("utf-8"))

    with open(DATA / "golden_corpus.jsonl", "w", encoding="utf-8") as fh:
        for doc in source:
            fh.write(
                json.dumps(
                    {
                        "doc_id": doc["doc_id"],
                        "title": doc["title"],
                        "abstract": doc["abstract"],
                        "year": doc["year"],
                        "doi": doc["doi"],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    n_predictions = 0
    with open(DATA / "golden_predictions.jsonl", "w", encoding="utf-8") as fh:
        for doc in source:
            raw = RawDocument(
                doc_id=doc["doc_id"],
                title=doc["title"],
                abstract_markup=doc["abstract"],
                year=doc["year"],
                doi=doc["doi"],
            )
            processed = preprocess(raw)
            if not is_polymer_relevant(processed):
                continue
            tokens = whitespace_tokenize(processed.text)
            labels = paint_labels(
                doc["doc_id"], processed.text, tokens, doc["entities"]
            )
            annotated = AnnotatedDocument(
                doc_id=doc["doc_id"], tokens=tokens, labels=labels
            )
            fh.write(json.dumps(annotated_to_json(annotated), ensure_ascii=False) + "\n")
            n_predictions += 1

    print(f"wrote {len(source)} corpus documents, {n_predictions} prediction rows")


if __name__ == "__main__":
    sys.exit(main())
