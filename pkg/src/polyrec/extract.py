"""Record extraction: the heuristic stages that turn one labeled document
into material property records.

Stage order: assemble mentions, entity filter, abbreviation detection,
coreference, name normalization, value parsing, name/value pairing, unit
conversion (needs the paired property), amount association, relation. A
stage failure never aborts the document; it lands in the diagnostics
sidecar instead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .abbrev import detect_abbreviations
from .coref import Cluster, CorefConfig, coreference
from .corpus import Document
from .labels import MATERIAL_LABELS, POLYMER_FAMILY_LABELS, EntityLabel
from .records import (
    AmountEntry,
    CompositionClass,
    MaterialEntry,
    MaterialPropertyRecord,
    RelationMode,
    classify_materials,
)
from .tag import EntityMention, assemble_mentions
from .values import (
    ParseFailure,
    PropertyRegistry,
    UnconvertedUnit,
    default_registry,
    parse_property_value,
)
from .wordpiece import TokenSpan


@dataclass(frozen=True)
class ExtractConfig:
    pair_window: int = 10  # tokens between a value and its property name
    amount_window: int = 10  # tokens between an amount and its material
    coref: CorefConfig = field(default_factory=CorefConfig)


@dataclass(frozen=True)
class Diagnostic:
    doc_id: str
    stage: str
    reason: str

    def to_json(self) -> dict:
        return {"doc_id": self.doc_id, "stage": self.stage, "reason": self.reason}


@dataclass
class ExtractionResult:
    records: List[MaterialPropertyRecord]
    diagnostics: List[Diagnostic]


def filter_by_entities(mentions: Sequence[EntityMention]) -> bool:
    """A document is extractable when it has a polymer-ish material, a
    property name, and a property value."""
    labels = {m.label for m in mentions}
    return (
        bool(labels & POLYMER_FAMILY_LABELS)
        and EntityLabel.PROPERTY_NAME in labels
        and EntityLabel.PROPERTY_VALUE in labels
    )


@lru_cache(maxsize=1)
def default_normalization() -> Mapping[str, str]:
    with resources.files("polyrec.data").joinpath(
        "polymer_normalization.json"
    ).open(encoding="utf-8") as fh:
        return load_normalization_dict(json.load(fh))


def load_normalization(path: Union[str, Path, None] = None) -> Mapping[str, str]:
    if path is None:
        return default_normalization()
    with open(path, encoding="utf-8") as fh:
        return load_normalization_dict(json.load(fh))


def load_normalization_dict(raw: Mapping[str, str]) -> Dict[str, str]:
    return {_name_key(variant): canonical for variant, canonical in raw.items()}


def _name_key(surface: str) -> str:
    return " ".join(surface.split()).casefold()


def normalize_name(
    surface: str, dictionary: Mapping[str, str]
) -> Tuple[str, bool]:
    """Dictionary hit -> (canonical, True); miss -> (surface, False)."""
    canonical = dictionary.get(_name_key(surface))
    if canonical is None:
        return surface, False
    return canonical, True


def _normalize_clusters(
    clusters: Sequence[Cluster], dictionary: Mapping[str, str]
) -> None:
    for cluster in clusters:
        name, hit = normalize_name(cluster.representative, dictionary)
        if not hit:
            # any member may carry the dictionary form; prefer longer ones
            for member in sorted(
                {m.collapsed_surface() for m in cluster.mentions},
                key=lambda s: (-len(s), s),
            ):
                name, hit = normalize_name(member, dictionary)
                if hit:
                    break
        cluster.normalized_name = name if hit else None
        for mention in cluster.mentions:
            mention.normalized_name = cluster.normalized_name


def token_distance(a: EntityMention, b: EntityMention) -> int:
    """Tokens strictly between two mentions; 0 when adjacent or overlapping."""
    if a.end_token <= b.start_token:
        return b.start_token - a.end_token
    if b.end_token <= a.start_token:
        return a.start_token - b.end_token
    return 0


def _nearest(
    target: EntityMention,
    candidates: Sequence[EntityMention],
    window: int,
) -> Optional[EntityMention]:
    """Closest candidate within the window; ties go to the preceding one."""
    best = None
    best_key = None
    for cand in candidates:
        distance = token_distance(target, cand)
        if distance > window:
            continue
        precedes = 0 if cand.start_token < target.start_token else 1
        key = (distance, precedes, cand.start_token)
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def pair_property(
    mentions: Sequence[EntityMention],
    window: int = 10,
    diagnostics: Optional[List[Diagnostic]] = None,
    parsed: Optional[Mapping[int, object]] = None,
) -> List[Tuple[EntityMention, EntityMention]]:
    """Pair each PROPERTY_VALUE with its nearest same-sentence
    PROPERTY_NAME; unpaired values are dropped (and counted)."""
    names = [m for m in mentions if m.label is EntityLabel.PROPERTY_NAME]
    values = [m for m in mentions if m.label is EntityLabel.PROPERTY_VALUE]
    if parsed is not None:
        values = [v for v in values if v.start in parsed]
    pairs = []
    used: Dict[int, int] = {}
    for value in sorted(values, key=lambda m: m.start):
        candidates = [
            n for n in names if n.sentence_index == value.sentence_index
        ]
        name = _nearest(value, candidates, window)
        if name is None:
            if diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        value.doc_id,
                        "pair_property",
                        f"value {value.surface!r} has no property name within "
                        f"{window} tokens",
                    )
                )
            continue
        used[name.start] = used.get(name.start, 0) + 1
        if used[name.start] == 2 and diagnostics is not None:
            diagnostics.append(
                Diagnostic(
                    value.doc_id,
                    "pair_property",
                    f"property name {name.surface!r} serves multiple values",
                )
            )
        pairs.append((name, value))
    return pairs


def associate_amount(
    amounts: Sequence[EntityMention],
    materials: Sequence[EntityMention],
    window: int = 10,
    diagnostics: Optional[List[Diagnostic]] = None,
) -> List[Tuple[EntityMention, EntityMention]]:
    """Link each MATERIAL_AMOUNT to its nearest material mention."""
    links = []
    for amount in sorted(amounts, key=lambda m: m.start):
        material = _nearest(amount, materials, window)
        if material is None:
            if diagnostics is not None:
                diagnostics.append(
                    Diagnostic(
                        amount.doc_id,
                        "associate_amount",
                        f"amount {amount.surface!r} has no material within "
                        f"{window} tokens",
                    )
                )
            continue
        links.append((amount, material))
    return links


def relate(
    doc: Document,
    clusters: Sequence[Cluster],
    materials: Sequence[EntityMention],
    pv_pairs: Sequence[Tuple[EntityMention, EntityMention]],
    parsed_values: Mapping[int, object],
    amount_links: Sequence[Tuple[EntityMention, EntityMention]],
    parsed_amounts: Mapping[int, object],
    registry: PropertyRegistry,
    diagnostics: List[Diagnostic],
) -> List[MaterialPropertyRecord]:
    """Attach material clusters to each property-value pair: the closest
    same-sentence material's cluster, else every cluster in the abstract."""
    by_id = {c.cluster_id: c for c in clusters}
    records = []
    for name_m, value_m in pv_pairs:
        parsed = parsed_values[value_m.start]
        in_sentence = [
            m for m in materials if m.sentence_index == value_m.sentence_index
        ]
        closest = _nearest(value_m, in_sentence, window=10**9)
        if closest is not None:
            mode = RelationMode.SAME_SENTENCE
            chosen = [by_id[closest.cluster_id]]
        else:
            mode = RelationMode.WHOLE_ABSTRACT
            chosen = list(clusters)

        spec = registry.lookup(name_m.surface)
        property_canonical = (
            spec.canonical_name if spec else _name_key(name_m.surface)
        )
        if spec is not None and parsed.canonical_numeric is None:
            try:
                parsed = spec.convert(parsed)
            except UnconvertedUnit as exc:
                diagnostics.append(
                    Diagnostic(doc.doc_id, "convert_units", str(exc))
                )

        entries = tuple(
            MaterialEntry(
                surface=c.representative,
                label=c.label,
                normalized=c.normalized_name,
                cluster=c.cluster_id,
            )
            for c in sorted(chosen, key=lambda c: c.cluster_id)
        )
        amount = _amount_for(
            entries, value_m, amount_links, parsed_amounts, by_id
        )
        records.append(
            MaterialPropertyRecord(
                doc_id=doc.doc_id,
                year=doc.year,
                doi=doc.doi,
                materials=entries,
                property_raw=name_m.surface,
                property_canonical=property_canonical,
                value=parsed,
                amount=amount,
                relation_mode=mode,
                composition_class=classify_materials(entries),
            )
        )
    return records


def _amount_for(
    entries: Sequence[MaterialEntry],
    value_m: EntityMention,
    amount_links: Sequence[Tuple[EntityMention, EntityMention]],
    parsed_amounts: Mapping[int, object],
    clusters_by_id: Mapping[int, Cluster],
) -> Optional[AmountEntry]:
    cluster_ids = {e.cluster for e in entries}
    best = None
    best_key = None
    for amount_m, material_m in amount_links:
        if material_m.cluster_id not in cluster_ids:
            continue
        if amount_m.start not in parsed_amounts:
            continue
        same_sentence = 0 if amount_m.sentence_index == value_m.sentence_index else 1
        key = (same_sentence, abs(amount_m.start - value_m.start), amount_m.start)
        if best_key is None or key < best_key:
            best_key = key
            cluster = clusters_by_id[material_m.cluster_id]
            best = AmountEntry(
                material=cluster.name,
                cluster=cluster.cluster_id,
                value=parsed_amounts[amount_m.start],
            )
    return best


def extract_records(
    doc: Document,
    tokens: Sequence[TokenSpan],
    labels: Sequence[EntityLabel],
    config: ExtractConfig = ExtractConfig(),
    registry: Optional[PropertyRegistry] = None,
    normalization: Optional[Mapping[str, str]] = None,
) -> ExtractionResult:
    """Run the extraction stages over one labeled document."""
    registry = registry if registry is not None else default_registry()
    normalization = (
        normalization if normalization is not None else default_normalization()
    )
    diagnostics: List[Diagnostic] = []
    mentions = assemble_mentions(doc, tokens, labels)

    if not filter_by_entities(mentions):
        diagnostics.append(
            Diagnostic(
                doc.doc_id,
                "filter",
                "missing a polymer-ish material, property name, or property value",
            )
        )
        return ExtractionResult([], diagnostics)

    materials = [m for m in mentions if m.label in MATERIAL_LABELS]

    abbrev_pairs = []
    for idx, (s_start, s_end) in enumerate(doc.sentences):
        in_sentence = [m for m in materials if m.sentence_index == idx]
        if len(in_sentence) < 2:
            continue
        abbrev_pairs.extend(
            detect_abbreviations(doc.text[s_start:s_end], in_sentence, s_start)
        )

    clusters = coreference(materials, config.coref, abbrev_pairs)
    _normalize_clusters(clusters, normalization)

    parsed_values: Dict[int, object] = {}
    for m in mentions:
        if m.label is EntityLabel.PROPERTY_VALUE:
            try:
                parsed_values[m.start] = parse_property_value(m.surface)
            except ParseFailure as exc:
                diagnostics.append(Diagnostic(doc.doc_id, "parse_value", str(exc)))

    parsed_amounts: Dict[int, object] = {}
    amounts = [m for m in mentions if m.label is EntityLabel.MATERIAL_AMOUNT]
    for m in amounts:
        try:
            parsed_amounts[m.start] = parse_property_value(m.surface)
        except ParseFailure as exc:
            diagnostics.append(Diagnostic(doc.doc_id, "parse_amount", str(exc)))

    pv_pairs = pair_property(
        mentions, config.pair_window, diagnostics, parsed_values
    )
    amount_links = associate_amount(
        amounts, materials, config.amount_window, diagnostics
    )
    records = relate(
        doc,
        clusters,
        materials,
        pv_pairs,
        parsed_values,
        amount_links,
        parsed_amounts,
        registry,
        diagnostics,
    )
    return ExtractionResult(records, diagnostics)
