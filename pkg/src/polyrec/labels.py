"""Entity label ontology for token-level annotation.

Eight content labels plus OTHER, the default for everything else.
Files produced by older annotation rounds may use alternate spellings
(POLYMER_FAMILY, ORGANIC, ...); ``EntityLabel.parse`` accepts those.
"""

from __future__ import annotations

from enum import Enum


class EntityLabel(Enum):
    POLYMER = "POLYMER"
    POLYMER_CLASS = "POLYMER_CLASS"
    MONOMER = "MONOMER"
    ORGANIC_MATERIAL = "ORGANIC_MATERIAL"
    INORGANIC_MATERIAL = "INORGANIC_MATERIAL"
    MATERIAL_AMOUNT = "MATERIAL_AMOUNT"
    PROPERTY_NAME = "PROPERTY_NAME"
    PROPERTY_VALUE = "PROPERTY_VALUE"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, name: str) -> "EntityLabel":
        """Parse a label string, accepting the known aliases."""
        key = name.strip().upper()
        key = _ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown entity label: {name!r}") from None

    def __str__(self) -> str:
        return self.value


_ALIASES = {
    "POLYMER_FAMILY": "POLYMER_CLASS",
    "ORGANIC": "ORGANIC_MATERIAL",
    "INORGANIC": "INORGANIC_MATERIAL",
    "MATERIAL_AMT": "MATERIAL_AMOUNT",
}

# Labels that denote a material taking part in a formulation.
MATERIAL_LABELS = frozenset({
    EntityLabel.POLYMER,
    EntityLabel.POLYMER_CLASS,
    EntityLabel.MONOMER,
    EntityLabel.ORGANIC_MATERIAL,
    EntityLabel.INORGANIC_MATERIAL,
})

# Labels that satisfy the "polymer-ish material present" filter.
POLYMER_FAMILY_LABELS = frozenset({
    EntityLabel.POLYMER,
    EntityLabel.POLYMER_CLASS,
    EntityLabel.MONOMER,
})
