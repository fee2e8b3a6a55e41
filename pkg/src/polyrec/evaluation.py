"""Strict entity-level NER evaluation.

Entities are maximal runs of one non-OTHER label (IO scheme). A predicted
entity counts as a true positive only when its span and label both match a
gold entity exactly; partial overlaps score as one false positive plus one
false negative. Scores are percentages; a precision or recall whose
denominator is zero is reported as None rather than 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .annotate import AnnotatedDocument
from .labels import EntityLabel

Entity = Tuple[int, int, EntityLabel]  # token span [start, end) and label


def entities_from_labels(labels: Sequence[EntityLabel]) -> List[Entity]:
    """Maximal same-label runs, OTHER excluded."""
    entities = []
    start = None
    current = EntityLabel.OTHER
    for i, label in enumerate(labels):
        if label != current:
            if current != EntityLabel.OTHER:
                entities.append((start, i, current))
            start = i
            current = label
    if current != EntityLabel.OTHER:
        entities.append((start, len(labels), current))
    return entities


@dataclass
class LabelScore:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> Optional[float]:
        if self.tp + self.fp == 0:
            return None
        return 100.0 * self.tp / (self.tp + self.fp)

    @property
    def recall(self) -> Optional[float]:
        if self.tp + self.fn == 0:
            return None
        return 100.0 * self.tp / (self.tp + self.fn)

    @property
    def f1(self) -> Optional[float]:
        p, r = self.precision, self.recall
        if p is None or r is None:
            return None
        if p + r == 0:
            return 0.0
        return 2.0 * p * r / (p + r)

    def add(self, other: "LabelScore") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }


@dataclass
class EvaluationReport:
    per_label: Dict[str, LabelScore] = field(default_factory=dict)

    @property
    def overall(self) -> LabelScore:
        total = LabelScore()
        for score in self.per_label.values():
            total.add(score)
        return total

    def merge(self, other: "EvaluationReport") -> None:
        for name, score in other.per_label.items():
            self.per_label.setdefault(name, LabelScore()).add(score)

    def to_json(self) -> dict:
        return {
            "per_label": {
                name: self.per_label[name].to_json()
                for name in sorted(self.per_label)
            },
            "overall": self.overall.to_json(),
        }


def evaluate_ner(
    pred: AnnotatedDocument, gold: AnnotatedDocument
) -> EvaluationReport:
    """Strict entity-level scores for one document."""
    if len(pred.tokens) != len(gold.tokens) or any(
        (p.start, p.end) != (g.start, g.end)
        for p, g in zip(pred.tokens, gold.tokens)
    ):
        raise ValueError(
            f"{pred.doc_id}: predicted and gold token sequences differ"
        )
    pred_entities = set(entities_from_labels(pred.labels))
    gold_entities = set(entities_from_labels(gold.labels))

    report = EvaluationReport()
    for entity in pred_entities | gold_entities:
        score = report.per_label.setdefault(entity[2].value, LabelScore())
        in_pred = entity in pred_entities
        in_gold = entity in gold_entities
        if in_pred and in_gold:
            score.tp += 1
        elif in_pred:
            score.fp += 1
        else:
            score.fn += 1
    return report


def evaluate_corpus(
    pairs: Iterable[Tuple[AnnotatedDocument, AnnotatedDocument]]
) -> EvaluationReport:
    """Micro-averaged scores over (pred, gold) document pairs."""
    report = EvaluationReport()
    for pred, gold in pairs:
        report.merge(evaluate_ner(pred, gold))
    return report
