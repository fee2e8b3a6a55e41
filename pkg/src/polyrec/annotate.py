"""Annotated-corpus handling: the token/label document type, its JSON-lines
format (shared with external-tagger predictions), dataset splitting, and
dictionary pre-annotation."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Set, Tuple, Union

from .labels import EntityLabel
from .wordpiece import TokenSpan

Gazetteers = Mapping[EntityLabel, Set[str]]


@dataclass
class AnnotatedDocument:
    doc_id: str
    tokens: List[TokenSpan]
    labels: List[EntityLabel]

    def __post_init__(self):
        if len(self.tokens) != len(self.labels):
            raise ValueError(
                f"{self.doc_id}: {len(self.tokens)} tokens vs "
                f"{len(self.labels)} labels"
            )


def annotated_to_json(doc: AnnotatedDocument) -> dict:
    return {
        "doc_id": doc.doc_id,
        "tokens": [
            {"surface": t.surface, "start": t.start, "end": t.end}
            for t in doc.tokens
        ],
        "labels": [label.value for label in doc.labels],
    }


def annotated_from_json(obj: dict) -> AnnotatedDocument:
    tokens = [
        TokenSpan(
            surface=t["surface"],
            start=t["start"],
            end=t["end"],
            is_continuation=t["surface"].startswith("##"),
        )
        for t in obj["tokens"]
    ]
    labels = [EntityLabel.parse(name) for name in obj["labels"]]
    return AnnotatedDocument(doc_id=obj["doc_id"], tokens=tokens, labels=labels)


def read_annotated(path: Union[str, Path]) -> Iterator[AnnotatedDocument]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield annotated_from_json(json.loads(line))
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None


def write_annotated(docs: Iterable[AnnotatedDocument], path: Union[str, Path]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(annotated_to_json(doc), ensure_ascii=False) + "\n")
            count += 1
    return count


def split_dataset(
    docs: Sequence,
    ratios: Sequence[float] = (0.8, 0.1, 0.1),
    seed: int = 0,
) -> Tuple[list, ...]:
    """Deterministic shuffled partition; floor allocations, remainder to
    the first split."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"ratios must sum to 1, got {sum(ratios)}")
    if any(r < 0 for r in ratios):
        raise ValueError("ratios must be non-negative")
    if len(docs) < len(ratios):
        raise ValueError(
            f"cannot split {len(docs)} documents into {len(ratios)} partitions"
        )
    shuffled = list(docs)
    random.Random(seed).shuffle(shuffled)
    sizes = [int(math.floor(len(docs) * r + 1e-9)) for r in ratios]
    sizes[0] += len(docs) - sum(sizes)
    parts = []
    offset = 0
    for size in sizes:
        parts.append(shuffled[offset : offset + size])
        offset += size
    return tuple(parts)


def _lower_preserving_length(text: str) -> str:
    # str.lower() can change string length for a few codepoints, which
    # would corrupt offsets; skip those characters instead.
    return "".join(c.lower() if len(c.lower()) == 1 else c for c in text)


def match_gazetteer_spans(
    text: str,
    tokens: Sequence[TokenSpan],
    gazetteers: Gazetteers,
) -> List[EntityLabel]:
    """Token labels from longest-match, non-overlapping, case-insensitive
    dictionary hits aligned to token boundaries."""
    labels = [EntityLabel.OTHER] * len(tokens)
    if not tokens:
        return labels
    lower = _lower_preserving_length(text)
    # word-aligned boundaries only: a match may not start or end inside a
    # wordpiece-segmented word
    starts = {
        t.start: i for i, t in enumerate(tokens) if not t.is_continuation
    }
    ends = {
        t.end: i
        for i, t in enumerate(tokens)
        if i + 1 == len(tokens) or not tokens[i + 1].is_continuation
    }

    label_rank = {label: i for i, label in enumerate(EntityLabel)}
    candidates = []
    for label, surfaces in gazetteers.items():
        if not isinstance(label, EntityLabel):
            label = EntityLabel.parse(label)
        for surface in surfaces:
            needle = _lower_preserving_length(surface)
            if not needle:
                continue
            pos = lower.find(needle)
            while pos != -1:
                end = pos + len(needle)
                if pos in starts and end in ends:
                    candidates.append((pos, end, label))
                pos = lower.find(needle, pos + 1)

    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], label_rank[c[2]]))
    taken = []
    for start, end, label in candidates:
        if any(start < t_end and end > t_start for t_start, t_end in taken):
            continue
        taken.append((start, end))
        for i in range(starts[start], ends[end] + 1):
            labels[i] = label
    return labels


def dictionary_preannotate(
    doc_id: str,
    text: str,
    tokens: Sequence[TokenSpan],
    gazetteers: Gazetteers,
) -> AnnotatedDocument:
    """Pre-annotate a tokenized document from entity dictionaries."""
    return AnnotatedDocument(
        doc_id=doc_id,
        tokens=list(tokens),
        labels=match_gazetteer_spans(text, tokens, gazetteers),
    )


def load_gazetteers(path: Union[str, Path]) -> Dict[EntityLabel, Set[str]]:
    """Gazetteer file: JSON object mapping label name -> list of surfaces."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    out: Dict[EntityLabel, Set[str]] = {}
    for name, surfaces in raw.items():
        label = EntityLabel.parse(name)
        if label is EntityLabel.OTHER:
            raise ValueError("gazetteers may not assign the OTHER label")
        out.setdefault(label, set()).update(surfaces)
    return out
