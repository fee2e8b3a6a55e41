"""polyrec: material property records from tagged polymer abstracts."""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Document,
    RawDocument,
    has_numeric_info,
    is_polymer_relevant,
    preprocess,
    split_sentences,
    strip_markup,
)
from .labels import EntityLabel  # noqa: F401
from .records import (  # noqa: F401
    CompositionClass,
    MaterialPropertyRecord,
    RelationMode,
    classify_record,
)
from .values import ParsedValue, parse_property_value  # noqa: F401
