"""Material property records: the pipeline's output unit, its composition
classification, and the JSON-lines serialization shared by the store, the
CLI, and the HTTP service."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Tuple, Union

from .labels import EntityLabel
from .values import ParsedValue


class RelationMode(Enum):
    SAME_SENTENCE = "SAME_SENTENCE"
    WHOLE_ABSTRACT = "WHOLE_ABSTRACT"


class CompositionClass(Enum):
    NEAT = "NEAT"
    BLEND = "BLEND"
    COMPOSITE = "COMPOSITE"


@dataclass(frozen=True)
class MaterialEntry:
    """One coreference cluster as it appears in a record."""

    surface: str
    label: EntityLabel
    normalized: Optional[str]
    cluster: int

    @property
    def name(self) -> str:
        return self.normalized or self.surface

    def to_json(self) -> dict:
        return {
            "surface": self.surface,
            "label": self.label.value,
            "normalized": self.normalized,
            "cluster": self.cluster,
        }


@dataclass(frozen=True)
class AmountEntry:
    material: str  # cluster name the amount is attached to
    cluster: int
    value: ParsedValue

    def to_json(self) -> dict:
        return {
            "material": self.material,
            "cluster": self.cluster,
            "value": self.value.to_json(),
        }


@dataclass(frozen=True)
class MaterialPropertyRecord:
    doc_id: str
    year: Optional[int]
    doi: Optional[str]
    materials: Tuple[MaterialEntry, ...]
    property_raw: str
    property_canonical: str
    value: ParsedValue
    amount: Optional[AmountEntry]
    relation_mode: RelationMode
    composition_class: CompositionClass

    def __post_init__(self):
        if not self.materials:
            raise ValueError("a record must reference at least one material")


def classify_materials(materials: Iterable[MaterialEntry]) -> CompositionClass:
    """COMPOSITE when any cluster is not POLYMER/POLYMER_CLASS; otherwise
    BLEND for two or more POLYMER clusters; otherwise NEAT."""
    labels = [m.label for m in materials]
    if any(
        lb not in (EntityLabel.POLYMER, EntityLabel.POLYMER_CLASS) for lb in labels
    ):
        return CompositionClass.COMPOSITE
    if sum(lb is EntityLabel.POLYMER for lb in labels) >= 2:
        return CompositionClass.BLEND
    return CompositionClass.NEAT


def classify_record(record: MaterialPropertyRecord) -> CompositionClass:
    return classify_materials(record.materials)


def record_to_json(record: MaterialPropertyRecord) -> dict:
    return {
        "doc_id": record.doc_id,
        "year": record.year,
        "doi": record.doi,
        "materials": [m.to_json() for m in record.materials],
        "property_raw": record.property_raw,
        "property_canonical": record.property_canonical,
        "value": record.value.to_json(),
        "amount": record.amount.to_json() if record.amount else None,
        "relation_mode": record.relation_mode.value,
        "composition_class": record.composition_class.value,
    }


def record_from_json(obj: dict) -> MaterialPropertyRecord:
    value = obj["value"]
    parsed = ParsedValue(
        numeric=value["numeric"],
        unit_raw=value["unit_raw"],
        error=value.get("error"),
        value_range=tuple(value["range"]) if value.get("range") else None,
        unit_canonical=value.get("unit_canonical"),
        canonical_numeric=value.get("canonical_numeric"),
    )
    amount = None
    if obj.get("amount"):
        av = obj["amount"]["value"]
        amount = AmountEntry(
            material=obj["amount"]["material"],
            cluster=obj["amount"]["cluster"],
            value=ParsedValue(
                numeric=av["numeric"],
                unit_raw=av["unit_raw"],
                error=av.get("error"),
                value_range=tuple(av["range"]) if av.get("range") else None,
                unit_canonical=av.get("unit_canonical"),
                canonical_numeric=av.get("canonical_numeric"),
            ),
        )
    return MaterialPropertyRecord(
        doc_id=obj["doc_id"],
        year=obj.get("year"),
        doi=obj.get("doi"),
        materials=tuple(
            MaterialEntry(
                surface=m["surface"],
                label=EntityLabel.parse(m["label"]),
                normalized=m.get("normalized"),
                cluster=m["cluster"],
            )
            for m in obj["materials"]
        ),
        property_raw=obj["property_raw"],
        property_canonical=obj["property_canonical"],
        value=parsed,
        amount=amount,
        relation_mode=RelationMode(obj["relation_mode"]),
        composition_class=CompositionClass(obj["composition_class"]),
    )


def record_line(record: MaterialPropertyRecord) -> str:
    return json.dumps(record_to_json(record), ensure_ascii=False)


def read_records(path: Union[str, Path]) -> Iterator[MaterialPropertyRecord]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield record_from_json(json.loads(line))


def write_records(
    records: Iterable[MaterialPropertyRecord], path: Union[str, Path]
) -> int:
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(record_line(record) + "\n")
            count += 1
    return count


def effective_value(record: MaterialPropertyRecord) -> float:
    """Canonical value when the unit converted, raw numeric otherwise."""
    if record.value.canonical_numeric is not None:
        return record.value.canonical_numeric
    return record.value.numeric
