"""Append-only record store with in-memory indexes, the record-composition
analytics, trend/scatter exports, and the query engine behind the HTTP
service. Storage is plain JSON-lines; indexes are rebuilt deterministically
on load, so there is no database to manage."""

from __future__ import annotations

import csv
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .labels import EntityLabel
from .records import (
    CompositionClass,
    MaterialPropertyRecord,
    classify_record,
    effective_value,
    read_records,
)
from .values import PropertyRegistry, default_registry

YearKey = Union[int, str]  # calendar year or "unknown"

SCOPE_SAME_RECORD_MATERIALS = "SAME_RECORD_MATERIALS"
SCOPE_SAME_DOCUMENT = "SAME_DOCUMENT"


class UnknownProperty(KeyError):
    """Property name known neither to the registry nor to the store."""


@dataclass(frozen=True)
class QueryFilter:
    property: Optional[str] = None
    material: Optional[str] = None
    value_range: Optional[Tuple[float, float]] = None
    year_range: Optional[Tuple[Optional[int], Optional[int]]] = None
    composition_class: Optional[CompositionClass] = None
    keyword: Optional[str] = None

    def __post_init__(self):
        if self.value_range is not None and self.value_range[0] > self.value_range[1]:
            raise ValueError(
                f"malformed value range: {self.value_range[0]} > {self.value_range[1]}"
            )
        if (
            self.year_range is not None
            and self.year_range[0] is not None
            and self.year_range[1] is not None
            and self.year_range[0] > self.year_range[1]
        ):
            raise ValueError(
                f"malformed year range: {self.year_range[0]} > {self.year_range[1]}"
            )


@dataclass
class QueryPage:
    records: List[MaterialPropertyRecord]
    total: int
    page: int
    page_size: int


def _searchable_text(record: MaterialPropertyRecord) -> str:
    parts = [record.doc_id, record.property_raw, record.property_canonical]
    for m in record.materials:
        parts.append(m.surface)
        if m.normalized:
            parts.append(m.normalized)
    if record.doi:
        parts.append(record.doi)
    return " ".join(parts).casefold()


def record_matches(
    record: MaterialPropertyRecord,
    flt: QueryFilter,
    doc_text: Optional[str] = None,
) -> bool:
    """The predicate behind query(); also used as the linear-scan oracle."""
    if flt.property is not None:
        if record.property_canonical.casefold() != flt.property.casefold():
            return False
    if flt.material is not None:
        needle = flt.material.casefold()
        if not any(
            needle == m.surface.casefold()
            or (m.normalized is not None and needle == m.normalized.casefold())
            for m in record.materials
        ):
            return False
    if flt.value_range is not None:
        lo, hi = flt.value_range
        if not (lo <= effective_value(record) <= hi):
            return False
    if flt.year_range is not None:
        lo, hi = flt.year_range
        if record.year is None:
            return False
        if lo is not None and record.year < lo:
            return False
        if hi is not None and record.year > hi:
            return False
    if flt.composition_class is not None:
        if record.composition_class is not flt.composition_class:
            return False
    if flt.keyword is not None:
        needle = flt.keyword.casefold()
        haystack = _searchable_text(record)
        if doc_text:
            haystack = haystack + " " + doc_text.casefold()
        if needle not in haystack:
            return False
    return True


class RecordStore:
    """Records plus rebuildable indexes; single writer, many readers."""

    def __init__(
        self,
        records: Iterable[MaterialPropertyRecord] = (),
        registry: Optional[PropertyRegistry] = None,
        doc_texts: Optional[Mapping[str, str]] = None,
    ):
        self.registry = registry if registry is not None else default_registry()
        self.doc_texts = dict(doc_texts) if doc_texts else {}
        self._records: List[MaterialPropertyRecord] = []
        self._by_property: Dict[str, List[int]] = defaultdict(list)
        self._by_material: Dict[str, List[int]] = defaultdict(list)
        self._by_year: Dict[YearKey, List[int]] = defaultdict(list)
        self.append(records)

    @classmethod
    def from_file(
        cls,
        path: Union[str, Path],
        registry: Optional[PropertyRegistry] = None,
        doc_texts: Optional[Mapping[str, str]] = None,
    ) -> "RecordStore":
        return cls(read_records(path), registry=registry, doc_texts=doc_texts)

    def __len__(self) -> int:
        return len(self._records)

    @property
    def records(self) -> Sequence[MaterialPropertyRecord]:
        return self._records

    def append(self, records: Iterable[MaterialPropertyRecord]) -> int:
        added = 0
        for record in records:
            idx = len(self._records)
            self._records.append(record)
            self._by_property[record.property_canonical.casefold()].append(idx)
            keys = {m.surface.casefold() for m in record.materials} | {
                m.normalized.casefold() for m in record.materials if m.normalized
            }
            for key in keys:
                self._by_material[key].append(idx)
            year = record.year if record.year is not None else "unknown"
            self._by_year[year].append(idx)
            added += 1
        return added

    def knows_property(self, name: str) -> bool:
        return (
            name.casefold() in self._by_property
            or self.registry.knows(name)
        )

    # ---- analytics -----------------------------------------------------

    def composition_counts(
        self, records: Optional[Sequence[MaterialPropertyRecord]] = None
    ) -> Dict[str, int]:
        records = self._records if records is None else records
        counts = {cls.value: 0 for cls in CompositionClass}
        for record in records:
            counts[record.composition_class.value] += 1
        return counts

    def count_unique_polymers(
        self, records: Optional[Sequence[MaterialPropertyRecord]] = None
    ) -> int:
        """Unique neat-polymer names: distinct normalized names, plus
        distinct case-folded raw names among unnormalized ones."""
        records = self._records if records is None else records
        normalized = set()
        unnormalized = set()
        for record in records:
            if record.composition_class is not CompositionClass.NEAT:
                continue
            for m in record.materials:
                if m.label is not EntityLabel.POLYMER:
                    continue
                if m.normalized:
                    normalized.add(m.normalized)
                else:
                    unnormalized.add(m.surface.casefold())
        return len(normalized) + len(unnormalized)

    def property_histogram(
        self,
        records: Optional[Sequence[MaterialPropertyRecord]] = None,
        min_count: int = 0,
    ) -> Dict[str, int]:
        records = self._records if records is None else records
        counts = Counter(r.property_canonical for r in records)
        ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return {name: n for name, n in ordered if n >= min_count}

    def yearly_counts(
        self, flt: Optional[QueryFilter] = None
    ) -> Dict[YearKey, int]:
        counts: Dict[YearKey, int] = {}
        for record in self._records:
            if flt is not None and not record_matches(
                record, flt, self.doc_texts.get(record.doc_id)
            ):
                continue
            year = record.year if record.year is not None else "unknown"
            counts[year] = counts.get(year, 0) + 1
        known = sorted(k for k in counts if isinstance(k, int))
        ordered: Dict[YearKey, int] = {y: counts[y] for y in known}
        if "unknown" in counts:
            ordered["unknown"] = counts["unknown"]
        return ordered

    def scatter_pairs(
        self,
        prop_x: str,
        prop_y: str,
        scope: str = SCOPE_SAME_RECORD_MATERIALS,
    ) -> List[Tuple[float, float, str, Optional[int]]]:
        """(x, y, doc_id, year) canonical-value pairs for records sharing
        the scope key; one pair per (doc, material-set) combination."""
        if scope not in (SCOPE_SAME_RECORD_MATERIALS, SCOPE_SAME_DOCUMENT):
            raise ValueError(f"unknown scatter scope: {scope!r}")
        for name in (prop_x, prop_y):
            if not self.knows_property(name):
                raise UnknownProperty(name)
        x_key = prop_x.casefold()
        y_key = prop_y.casefold()

        def scope_key(record: MaterialPropertyRecord):
            if scope == SCOPE_SAME_DOCUMENT:
                return (record.doc_id,)
            return (
                record.doc_id,
                frozenset(m.name.casefold() for m in record.materials),
            )

        def canonical(record: MaterialPropertyRecord) -> Optional[float]:
            spec = self.registry.lookup(record.property_canonical)
            if spec is not None and record.value.canonical_numeric is None:
                return None  # known property, unconverted unit: not comparable
            return effective_value(record)

        groups: Dict[tuple, Dict[str, MaterialPropertyRecord]] = {}
        order: List[tuple] = []
        for record in self._records:
            prop = record.property_canonical.casefold()
            if prop not in (x_key, y_key):
                continue
            key = scope_key(record)
            if key not in groups:
                groups[key] = {}
                order.append(key)
            groups[key].setdefault(prop, record)  # first record wins

        pairs = []
        for key in order:
            bucket = groups[key]
            rx = bucket.get(x_key)
            ry = bucket.get(y_key)
            if rx is None or ry is None:
                continue
            x = canonical(rx)
            y = canonical(ry)
            if x is None or y is None:
                continue
            pairs.append((x, y, rx.doc_id, rx.year))
        return pairs

    # ---- query ---------------------------------------------------------

    def filtered_indexes(self, flt: QueryFilter) -> List[int]:
        """Indexes of matching records, in insertion order."""
        return [
            i
            for i in self._candidate_indexes(flt)
            if record_matches(
                self._records[i], flt, self.doc_texts.get(self._records[i].doc_id)
            )
        ]

    def filtered(self, flt: QueryFilter) -> List[MaterialPropertyRecord]:
        return [self._records[i] for i in self.filtered_indexes(flt)]

    def query(
        self,
        flt: QueryFilter = QueryFilter(),
        page: int = 1,
        page_size: int = 50,
    ) -> QueryPage:
        """Conjunctive filtering; (year desc, doc_id, insertion order)
        ordering; stable pagination."""
        if not (1 <= page_size <= 1000):
            raise ValueError(f"page_size must be in [1, 1000], got {page_size}")
        if page < 1:
            raise ValueError(f"page must be >= 1, got {page}")

        matches = self.filtered_indexes(flt)
        matches.sort(
            key=lambda i: (
                -(self._records[i].year if self._records[i].year is not None else -(10**9)),
                self._records[i].doc_id,
                i,
            )
        )
        start = (page - 1) * page_size
        selected = [self._records[i] for i in matches[start : start + page_size]]
        return QueryPage(
            records=selected, total=len(matches), page=page, page_size=page_size
        )

    def _candidate_indexes(self, flt: QueryFilter) -> Sequence[int]:
        if flt.property is not None:
            return self._by_property.get(flt.property.casefold(), [])
        if flt.material is not None:
            return self._by_material.get(flt.material.casefold(), [])
        return range(len(self._records))


def export_histogram_csv(
    histogram: Mapping[str, int], path: Union[str, Path]
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["property", "count"])
        for name, count in histogram.items():
            writer.writerow([name, count])


def export_yearly_csv(
    yearly: Mapping[YearKey, int], path: Union[str, Path]
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["year", "count"])
        for year, count in yearly.items():
            writer.writerow([year, count])


def export_scatter_csv(
    pairs: Sequence[Tuple[float, float, str, Optional[int]]],
    prop_x: str,
    prop_y: str,
    path: Union[str, Path],
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([prop_x, prop_y, "doc_id", "year"])
        for x, y, doc_id, year in pairs:
            writer.writerow([x, y, doc_id, year if year is not None else ""])
