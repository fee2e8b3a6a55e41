"""Property-value parsing and unit conversion.

The grammar covers plain decimals, scientific notation in both the
``a × 10^{b}`` and ``aE±b`` spellings, ``x ± e`` error forms, and ranges
(``a - b`` / ``a to b``, reduced to their midpoint with the endpoints
kept). The trailing unit is whatever suffix scans as unit tokens; units
are compared by a normalized signature so ``S cm^{-1}`` and ``S/cm``
convert identically.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union


class ParseFailure(ValueError):
    """No parseable number in a property-value surface."""


class UnconvertedUnit(Exception):
    """The parsed unit has no conversion for the property at hand."""


@dataclass(frozen=True)
class ParsedValue:
    numeric: float
    unit_raw: str
    error: Optional[float] = None
    value_range: Optional[Tuple[float, float]] = None
    unit_canonical: Optional[str] = None
    canonical_numeric: Optional[float] = None
    canonical_error: Optional[float] = None
    canonical_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.value_range is not None:
            lo, hi = self.value_range
            if lo > hi:
                raise ValueError(f"range lower bound {lo} above upper {hi}")
            mid = (lo + hi) / 2.0
            if abs(self.numeric - mid) > 1e-9 * max(1.0, abs(mid)):
                raise ValueError("numeric must be the range midpoint")

    def to_json(self) -> dict:
        return {
            "numeric": self.numeric,
            "unit_raw": self.unit_raw,
            "canonical_numeric": self.canonical_numeric,
            "unit_canonical": self.unit_canonical,
            "error": self.error,
            "range": list(self.value_range) if self.value_range else None,
        }


_DEC = r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)"
_NUM = (
    rf"(?:{_DEC}\s*[×x*]\s*10\^\{{[+-]?\d+\}}"
    rf"|{_DEC}[eE][+-]?\d+"
    rf"|10\^\{{[+-]?\d+\}}"
    rf"|{_DEC})"
)
_NUM_SEARCH = re.compile(_NUM)
_SCI = re.compile(rf"({_DEC})\s*[×x*]\s*10\^\{{([+-]?\d+)\}}$")
_POW = re.compile(r"10\^\{([+-]?\d+)\}$")
_ERROR_FORM = re.compile(rf"(?P<a>{_NUM})\s*±\s*(?P<b>{_NUM})\s*(?P<rest>.*)$", re.DOTALL)
_RANGE_FORM = re.compile(
    rf"(?P<a>{_NUM})\s*(?:-|–|—|~|to|through)\s*(?P<b>{_NUM})\s*(?P<rest>.*)$",
    re.DOTALL,
)
_SINGLE_FORM = re.compile(rf"(?P<a>{_NUM})\s*(?P<rest>.*)$", re.DOTALL)


def _parse_number(text: str) -> float:
    text = text.strip()
    m = _SCI.match(text)
    if m:
        return float(m.group(1)) * 10.0 ** int(m.group(2))
    m = _POW.match(text)
    if m:
        return 10.0 ** int(m.group(1))
    return float(text)


_UNIT_PIECE = re.compile(r"(?:[A-Za-z°µμΩ]+|%)(?:\^\{[+-]?\d+\}|\d+)?|[/·*.]|\s+")


def _extract_unit(rest: str) -> str:
    """Longest prefix of ``rest`` that scans as unit tokens, cleaned up."""
    pos = 0
    while pos < len(rest):
        m = _UNIT_PIECE.match(rest, pos)
        if not m:
            break
        pos = m.end()
    unit = rest[:pos].strip()
    unit = re.sub(r"\s+", " ", unit)
    while unit and unit[-1] in "/·*.":
        unit = unit[:-1].rstrip()
    return unit


def parse_property_value(surface: str) -> ParsedValue:
    """Parse a PROPERTY_VALUE (or MATERIAL_AMOUNT) mention surface."""
    anchor = _NUM_SEARCH.search(surface)
    if not anchor:
        raise ParseFailure(f"no numeric value in {surface!r}")
    tail = surface[anchor.start():]

    m = _ERROR_FORM.match(tail)
    if m:
        return ParsedValue(
            numeric=_parse_number(m.group("a")),
            unit_raw=_extract_unit(m.group("rest")),
            error=abs(_parse_number(m.group("b"))),
        )
    m = _RANGE_FORM.match(tail)
    if m:
        lo = _parse_number(m.group("a"))
        hi = _parse_number(m.group("b"))
        lo, hi = min(lo, hi), max(lo, hi)
        return ParsedValue(
            numeric=(lo + hi) / 2.0,
            unit_raw=_extract_unit(m.group("rest")),
            value_range=(lo, hi),
        )
    m = _SINGLE_FORM.match(tail)
    return ParsedValue(
        numeric=_parse_number(m.group("a")),
        unit_raw=_extract_unit(m.group("rest")),
    )


UnitSignature = Tuple[Tuple[str, int], ...]

_SIG_TOKEN = re.compile(
    r"([A-Za-z°Ωμ]+|%)(?:\^\{([+-]?\d+)\}|(\d+))?|([/·*.])|(\s+)"
)


def unit_signature(unit: str) -> Optional[UnitSignature]:
    """Normalized (symbol, exponent) form of a unit string, or None when
    the string does not scan as a unit. '/' sends everything after it to
    the denominator; '·', '*', '.' and whitespace separate factors."""
    unit = unit.replace("µ", "μ")
    exps: Dict[str, int] = {}
    sign = 1
    pos = 0
    while pos < len(unit):
        m = _SIG_TOKEN.match(unit, pos)
        if not m:
            return None
        pos = m.end()
        if m.group(4) == "/":
            sign = -1
            continue
        symbol = m.group(1)
        if symbol is None:
            continue
        exp = 1
        if m.group(2):
            exp = int(m.group(2))
        elif m.group(3):
            exp = int(m.group(3))
        exps[symbol] = exps.get(symbol, 0) + sign * exp
    return tuple(sorted((s, e) for s, e in exps.items() if e != 0))


@dataclass(frozen=True)
class PropertySpec:
    canonical_name: str
    synonyms: frozenset
    canonical_unit: str
    conversions: Mapping[UnitSignature, Tuple[float, float]]

    def convert(self, parsed: ParsedValue) -> ParsedValue:
        """Fill the canonical fields; raises UnconvertedUnit when the raw
        unit has no registered conversion."""
        sig = unit_signature(parsed.unit_raw)
        if sig is None or sig not in self.conversions:
            raise UnconvertedUnit(
                f"no conversion from {parsed.unit_raw!r} to "
                f"{self.canonical_unit!r} for {self.canonical_name}"
            )
        scale, offset = self.conversions[sig]
        canonical_range = None
        if parsed.value_range is not None:
            endpoints = sorted(scale * v + offset for v in parsed.value_range)
            canonical_range = (endpoints[0], endpoints[1])
        return replace(
            parsed,
            unit_canonical=self.canonical_unit,
            canonical_numeric=scale * parsed.numeric + offset,
            canonical_error=(
                abs(scale) * parsed.error if parsed.error is not None else None
            ),
            canonical_range=canonical_range,
        )

    def inverse(self, canonical_value: float, unit: str) -> float:
        """Map a canonical value back into ``unit`` (used by tests)."""
        sig = unit_signature(unit)
        scale, offset = self.conversions[sig]
        return (canonical_value - offset) / scale


def convert_units(parsed: ParsedValue, spec: PropertySpec) -> ParsedValue:
    return spec.convert(parsed)


def _normalize_name_key(surface: str) -> str:
    key = " ".join(surface.split()).casefold()
    return key.strip(" .,:;")


class PropertyRegistry:
    """Known properties: canonical names, synonym lookup, conversions."""

    def __init__(self, specs: List[PropertySpec]):
        self.specs = specs
        self._by_name: Dict[str, PropertySpec] = {}
        for spec in specs:
            for name in {spec.canonical_name, *spec.synonyms}:
                key = _normalize_name_key(name)
                if key in self._by_name and self._by_name[key] is not spec:
                    raise ValueError(
                        f"synonym {name!r} claimed by two properties"
                    )
                self._by_name[key] = spec

    def lookup(self, surface: str) -> Optional[PropertySpec]:
        key = _normalize_name_key(surface)
        spec = self._by_name.get(key)
        if spec is None and key.endswith("s"):
            spec = self._by_name.get(key[:-1])
        return spec

    def canonical_property(self, surface: str) -> str:
        spec = self.lookup(surface)
        return spec.canonical_name if spec else _normalize_name_key(surface)

    def knows(self, name: str) -> bool:
        return self.lookup(name) is not None


def _spec_from_json(obj: dict) -> PropertySpec:
    conversions: Dict[UnitSignature, Tuple[float, float]] = {}
    for unit, (scale, offset) in obj["conversions"].items():
        if scale == 0:
            raise ValueError(
                f"{obj['name']}: conversion for {unit!r} has zero scale"
            )
        sig = unit_signature(unit)
        if sig is None:
            raise ValueError(f"{obj['name']}: unparseable unit {unit!r}")
        existing = conversions.get(sig)
        if existing is not None and existing != (scale, offset):
            raise ValueError(
                f"{obj['name']}: unit {unit!r} conflicts with an equivalent form"
            )
        conversions[sig] = (float(scale), float(offset))
    canonical_sig = unit_signature(obj["canonical_unit"])
    if conversions.get(canonical_sig) != (1.0, 0.0):
        raise ValueError(
            f"{obj['name']}: canonical unit must convert to itself with (1, 0)"
        )
    return PropertySpec(
        canonical_name=obj["name"],
        synonyms=frozenset(obj.get("synonyms", [])),
        canonical_unit=obj["canonical_unit"],
        conversions=conversions,
    )


def load_registry(path: Union[str, Path, None] = None) -> PropertyRegistry:
    """Load the unit registry; with no path, the bundled seed registry."""
    if path is None:
        with resources.files("polyrec.data").joinpath(
            "property_registry.json"
        ).open(encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    return PropertyRegistry([_spec_from_json(obj) for obj in raw["properties"]])


@lru_cache(maxsize=1)
def default_registry() -> PropertyRegistry:
    return load_registry(None)
