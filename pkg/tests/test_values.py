import json
import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyrec.values import (
    ParsedValue,
    ParseFailure,
    PropertyRegistry,
    UnconvertedUnit,
    convert_units,
    default_registry,
    load_registry,
    parse_property_value,
    unit_signature,
)

GOLDEN = json.loads(
    (Path(__file__).parent / "data" / "values_golden.json").read_text("utf-8")
)


def rel_close(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class TestParsing:
    @pytest.mark.parametrize("case", GOLDEN, ids=lambda c: c["input"])
    def test_golden(self, case):
        parsed = parse_property_value(case["input"])
        assert rel_close(parsed.numeric, case["numeric"])
        assert parsed.unit_raw == case["unit"]
        if case.get("error") is not None:
            assert rel_close(parsed.error, case["error"])
        else:
            assert parsed.error is None
        if case.get("range") is not None:
            lo, hi = case["range"]
            assert parsed.value_range is not None
            assert rel_close(parsed.value_range[0], lo)
            assert rel_close(parsed.value_range[1], hi)
        else:
            assert parsed.value_range is None

    def test_golden_file_has_fifty_cases(self):
        assert len(GOLDEN) == 50

    @pytest.mark.parametrize("surface", ["", "no numbers here", "°C", "±"])
    def test_parse_failure(self, surface):
        with pytest.raises(ParseFailure):
            parse_property_value(surface)

    def test_range_midpoint_invariant(self):
        parsed = parse_property_value("10 - 30 MPa")
        lo, hi = parsed.value_range
        assert parsed.numeric == (lo + hi) / 2

    def test_parsed_value_validation(self):
        with pytest.raises(ValueError):
            ParsedValue(numeric=5.0, unit_raw="", value_range=(10.0, 2.0))
        with pytest.raises(ValueError):
            ParsedValue(numeric=5.0, unit_raw="", value_range=(1.0, 2.0))


class TestSignatures:
    @pytest.mark.parametrize(
        "a,b",
        [
            ("S/cm", "S cm^{-1}"),
            ("mW/cm^{2}", "mW cm^{-2}"),
            ("g/mol", "g mol^{-1}"),
            ("cm^{2}/s", "cm^{2} s^{-1}"),
            ("cm2/s", "cm^{2}/s"),
            ("W/kg", "W kg^{-1}"),
            ("wt%", "wt %"),
            ("µS/cm", "μS/cm"),
        ],
    )
    def test_equivalent_forms(self, a, b):
        assert unit_signature(a) == unit_signature(b)

    @pytest.mark.parametrize(
        "a,b",
        [
            ("S/cm", "S/m"),
            ("MPa", "GPa"),
            ("mW/cm^{2}", "W/cm^{2}"),
            ("°C", "K"),
        ],
    )
    def test_distinct_forms(self, a, b):
        assert unit_signature(a) != unit_signature(b)

    def test_dimensionless(self):
        assert unit_signature("") == ()

    def test_slash_applies_to_all_following(self):
        # denominator convention: everything after '/' is inverted
        assert unit_signature("cm^{2}/V s") == unit_signature("cm^{2} V^{-1} s^{-1}")

    def test_garbage_is_none(self):
        assert unit_signature("@@@") is None


class TestConversion:
    def test_gpa_to_mpa(self):
        spec = default_registry().lookup("tensile strength")
        parsed = spec.convert(parse_property_value("0.1 GPa"))
        assert parsed.canonical_numeric == pytest.approx(100.0, abs=1e-9)
        assert parsed.unit_canonical == "MPa"

    def test_kelvin_to_celsius(self):
        spec = default_registry().lookup("Tg")
        parsed = spec.convert(parse_property_value("433.15 K"))
        assert parsed.canonical_numeric == pytest.approx(160.0, abs=1e-9)

    def test_solidus_equivalence(self):
        spec = default_registry().lookup("conductivity")
        a = spec.convert(parse_property_value("0.1 S cm^{-1}"))
        b = spec.convert(parse_property_value("0.1 S/cm"))
        assert a.canonical_numeric == b.canonical_numeric == pytest.approx(0.1)

    def test_error_scaled(self):
        spec = default_registry().lookup("tensile strength")
        parsed = spec.convert(parse_property_value("1 ± 0.2 GPa"))
        assert parsed.canonical_error == pytest.approx(200.0)
        assert parsed.error == pytest.approx(0.2)  # raw value untouched

    def test_range_endpoints_transformed(self):
        spec = default_registry().lookup("Tg")
        parsed = spec.convert(parse_property_value("373.15 - 473.15 K"))
        assert parsed.canonical_range[0] == pytest.approx(100.0)
        assert parsed.canonical_range[1] == pytest.approx(200.0)

    def test_unknown_unit(self):
        spec = default_registry().lookup("Tg")
        with pytest.raises(UnconvertedUnit):
            convert_units(parse_property_value("10 furlongs"), spec)

    @given(
        value=st.floats(
            min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
        ),
        unit=st.sampled_from(["°C", "K", "°F"]),
    )
    @settings(max_examples=300, deadline=None)
    def test_round_trip(self, value, unit):
        spec = default_registry().lookup("glass transition temperature")
        parsed = spec.convert(ParsedValue(numeric=value, unit_raw=unit))
        back = spec.inverse(parsed.canonical_numeric, unit)
        assert rel_close(back, value, tol=1e-9)


class TestRegistry:
    def test_synonym_lookup(self):
        reg = default_registry()
        assert reg.lookup("Tg").canonical_name == "glass transition temperature"
        assert reg.lookup("T_{g}").canonical_name == "glass transition temperature"
        assert reg.lookup("PCE").canonical_name == "power conversion efficiency"
        assert reg.lookup("GLASS TRANSITION TEMPERATURE") is not None

    def test_plural_fallback(self):
        reg = default_registry()
        assert reg.lookup("glass transition temperatures") is not None

    def test_unknown_passthrough(self):
        reg = default_registry()
        assert reg.lookup("frobnication index") is None
        assert reg.canonical_property("Frobnication  Index") == "frobnication index"

    def test_canonical_must_convert_identity(self, tmp_path):
        bad = {
            "properties": [
                {
                    "name": "x",
                    "synonyms": [],
                    "canonical_unit": "m",
                    "conversions": {"m": [2, 0]},
                }
            ]
        }
        path = tmp_path / "reg.json"
        path.write_text(json.dumps(bad), encoding="utf-8")
        with pytest.raises(ValueError, match="canonical"):
            load_registry(path)

    def test_zero_scale_rejected(self, tmp_path):
        bad = {
            "properties": [
                {
                    "name": "x",
                    "synonyms": [],
                    "canonical_unit": "m",
                    "conversions": {"m": [1, 0], "km": [0, 0]},
                }
            ]
        }
        path = tmp_path / "reg.json"
        path.write_text(json.dumps(bad), encoding="utf-8")
        with pytest.raises(ValueError, match="zero scale"):
            load_registry(path)

    def test_duplicate_synonym_rejected(self):
        with pytest.raises(ValueError, match="claimed"):
            PropertyRegistry(
                [
                    _tiny_spec("a", ["shared"]),
                    _tiny_spec("b", ["shared"]),
                ]
            )


def _tiny_spec(name, synonyms):
    from polyrec.values import PropertySpec

    return PropertySpec(
        canonical_name=name,
        synonyms=frozenset(synonyms),
        canonical_unit="m",
        conversions={unit_signature("m"): (1.0, 0.0)},
    )
