"""Tagging seam: anything that labels a document's tokens can drive the
extraction pipeline. Ships a deterministic gazetteer tagger (dictionary
spans plus a numeric value rule) and a loader for external predictions in
the annotated-corpus format; also assembles labeled tokens into entity
mentions."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Protocol, Sequence, Set, Tuple, Union

from .annotate import Gazetteers, match_gazetteer_spans, read_annotated
from .corpus import Document
from .labels import EntityLabel
from .wordpiece import TokenSpan

# Units that mark a quantity as a material amount rather than a property
# value (compared with internal spaces removed).
DEFAULT_AMOUNT_UNITS = frozenset({
    "wt%", "wt.%", "wt", "mol%", "mol.%", "vol%", "vol.%", "at%", "at.%",
    "phr", "pph", "mass%",
})


class Tagger(Protocol):
    def tag(self, doc: Document, tokens: Sequence[TokenSpan]) -> List[EntityLabel]:
        """One label per token."""


@dataclass
class EntityMention:
    """A contiguous non-OTHER span, the unit the extraction rules work on."""

    doc_id: str
    label: EntityLabel
    surface: str
    start: int
    end: int
    sentence_index: int
    start_token: int
    end_token: int  # exclusive
    cluster_id: Optional[int] = None
    normalized_name: Optional[str] = None

    def __post_init__(self):
        if self.label is EntityLabel.OTHER:
            raise ValueError("mentions must carry a non-OTHER label")
        if self.start >= self.end:
            raise ValueError(f"empty mention span ({self.start}, {self.end})")

    def collapsed_surface(self) -> str:
        return " ".join(self.surface.split())


_DIGITS = re.compile(r"\d+$")
_NUMBER_START = re.compile(r"(?:\d+(?:\.\d+)?|\.\d+)(?:\^\{[+-]?\d+\})?$")
_UNIT_SHAPE = re.compile(
    r"([A-Za-zµμΩ°%]+)(\d*)(\^\{[+-]?\d+\})?$"
)
_UNIT_SYMBOL = re.compile(r"[°%µμΩ]")
_UNIT_CONNECTORS = frozenset("/·.")

# Lowercase alphabetic tokens accepted as unit words; anything else
# alphabetic must look like a unit structurally (SI prefix casing, an
# exponent, or a symbol character) to avoid eating prose.
_LOWER_UNIT_WORDS = frozenset({
    "m", "cm", "mm", "nm", "km", "dm", "g", "kg", "mg", "ng", "s", "ms",
    "h", "hr", "min", "mol", "mmol", "l", "ml", "wt", "vol", "at", "phr",
    "pph", "psi", "bar", "atm", "cal", "kcal", "ppm", "ppb", "rpm", "deg",
    "mil", "mesh", "cycles",
})


def _is_number_token(surface: str) -> bool:
    return bool(_NUMBER_START.match(surface))


def _is_unit_word(surface: str) -> bool:
    if _is_number_token(surface):
        return False
    m = _UNIT_SHAPE.match(surface)
    if not m:
        return False
    if m.group(2):
        # trailing digits are an exponent only on short SI symbols (cm2,
        # m3); longer letter runs are formulas like SiO2
        return len(m.group(1)) <= 2
    if _UNIT_SYMBOL.search(surface) or m.group(3):
        return True  # °C, %, µm, cm^{-1}
    word = m.group(1)
    if any(c.isupper() for c in word[1:]):
        return True  # MPa, eV, mAh
    if len(word) <= 2 and not word.islower():
        return True  # K, V, Pa, Da
    return word.lower() in _LOWER_UNIT_WORDS


def _contiguous(tokens: Sequence[TokenSpan], i: int, j: int) -> bool:
    return tokens[j].start == tokens[i].end


class GazetteerTagger:
    """Dictionary spans plus a numeric rule: number tokens followed by a
    unit run become PROPERTY_VALUE, or MATERIAL_AMOUNT when the unit is in
    the amount-unit table."""

    def __init__(
        self,
        gazetteers: Gazetteers,
        amount_units: Iterable[str] = DEFAULT_AMOUNT_UNITS,
    ):
        self.gazetteers = {k: frozenset(v) for k, v in gazetteers.items()}
        self.amount_units = frozenset(
            u.replace(" ", "") for u in amount_units
        )

    def tag(self, doc: Document, tokens: Sequence[TokenSpan]) -> List[EntityLabel]:
        labels = match_gazetteer_spans(doc.text, tokens, self.gazetteers)
        self._apply_numeric_rule(tokens, labels)
        return labels

    def _apply_numeric_rule(
        self, tokens: Sequence[TokenSpan], labels: List[EntityLabel]
    ) -> None:
        n = len(tokens)
        i = 0
        while i < n:
            if labels[i] is not EntityLabel.OTHER or not _is_number_token(
                tokens[i].surface
            ):
                i += 1
                continue
            j = self._consume_number(tokens, labels, i)
            # optional "± number" / range / "× 10^{b}" continuations
            while j < n and labels[j] is EntityLabel.OTHER:
                surf = tokens[j].surface
                if surf in {"±", "-", "~", "to"} or surf in {"×", "x", "*"}:
                    if j + 1 < n and labels[j + 1] is EntityLabel.OTHER and (
                        _is_number_token(tokens[j + 1].surface)
                    ):
                        j = self._consume_number(tokens, labels, j + 1)
                        continue
                break
            unit_end, unit_text = self._consume_unit(tokens, labels, j)
            if unit_end > j and unit_text:
                label = (
                    EntityLabel.MATERIAL_AMOUNT
                    if unit_text.replace(" ", "") in self.amount_units
                    else EntityLabel.PROPERTY_VALUE
                )
                for k in range(i, unit_end):
                    labels[k] = label
                i = unit_end
            else:
                i = j if j > i else i + 1

    def _consume_number(
        self, tokens: Sequence[TokenSpan], labels: Sequence[EntityLabel], i: int
    ) -> int:
        """Index just past the number starting at token i; handles decimal
        points split into their own tokens ("3", ".", "5")."""
        n = len(tokens)
        j = i + 1
        if (
            j + 1 < n
            and tokens[j].surface == "."
            and labels[j] is EntityLabel.OTHER
            and labels[j + 1] is EntityLabel.OTHER
            and _DIGITS.match(tokens[j + 1].surface)
            and _contiguous(tokens, i, j)
            and _contiguous(tokens, j, j + 1)
        ):
            j += 2
        return j

    def _consume_unit(
        self, tokens: Sequence[TokenSpan], labels: Sequence[EntityLabel], i: int
    ) -> Tuple[int, str]:
        """Greedily take a trailing unit run; returns (end index, joined
        unit text). Trailing connectors (a sentence period) are dropped."""
        n = len(tokens)
        j = i
        parts: List[str] = []
        while j < n and len(parts) < 8 and labels[j] is EntityLabel.OTHER:
            surf = tokens[j].surface
            if _is_unit_word(surf) and not _is_number_token(surf):
                parts.append(surf)
                j += 1
                continue
            if surf in _UNIT_CONNECTORS and j > i:
                parts.append(surf)
                j += 1
                continue
            break
        # drop trailing connectors so "100 K." does not swallow the period
        while parts and parts[-1] in _UNIT_CONNECTORS:
            parts.pop()
            j -= 1
        if not parts:
            return i, ""
        unit = "".join(parts)
        if not re.search(r"[A-Za-zµμΩ%°]", unit):
            return i, ""
        return j, unit


def load_predictions(
    path: Union[str, Path],
    expected_tokens: Mapping[str, int],
) -> Dict[str, List[EntityLabel]]:
    """Label sequences from an external-tagger predictions file.

    ``expected_tokens`` maps known doc_ids to the pipeline's token count
    for that document; any unknown id or length mismatch is a hard error.
    """
    out: Dict[str, List[EntityLabel]] = {}
    for doc in read_annotated(path):
        if doc.doc_id not in expected_tokens:
            raise ValueError(f"predictions for unknown doc_id {doc.doc_id!r}")
        expected = expected_tokens[doc.doc_id]
        if len(doc.labels) != expected:
            raise ValueError(
                f"{doc.doc_id}: predictions carry {len(doc.labels)} labels "
                f"but the document tokenizes to {expected} tokens"
            )
        out[doc.doc_id] = doc.labels
    return out


def assemble_mentions(
    doc: Document,
    tokens: Sequence[TokenSpan],
    labels: Sequence[EntityLabel],
) -> List[EntityMention]:
    """Maximal same-label runs become mentions; runs that cross a sentence
    boundary are split at it."""
    if len(tokens) != len(labels):
        raise ValueError(
            f"{doc.doc_id}: {len(tokens)} tokens vs {len(labels)} labels"
        )
    sentence_of = [
        doc.sentence_index_at((t.start + t.end) // 2) for t in tokens
    ]
    mentions = []
    i = 0
    n = len(tokens)
    while i < n:
        label = labels[i]
        if label is EntityLabel.OTHER:
            i += 1
            continue
        j = i + 1
        while j < n and labels[j] == label and sentence_of[j] == sentence_of[i]:
            j += 1
        start = tokens[i].start
        end = tokens[j - 1].end
        mentions.append(
            EntityMention(
                doc_id=doc.doc_id,
                label=label,
                surface=doc.text[start:end],
                start=start,
                end=end,
                sentence_index=sentence_of[i],
                start_token=i,
                end_token=j,
            )
        )
        i = j
    return mentions
