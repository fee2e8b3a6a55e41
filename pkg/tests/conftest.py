import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from polyrec.corpus import Document, split_sentences
from polyrec.wordpiece import whitespace_tokenize


@pytest.fixture
def make_document():
    """Document factory: text in, sentence spans computed."""

    def build(text: str, doc_id: str = "doc-1", year=2020, doi=None) -> Document:
        return Document(
            doc_id=doc_id,
            text=text,
            sentences=tuple(split_sentences(text)),
            year=year,
            doi=doi,
        )

    return build


@pytest.fixture
def tokenize():
    return whitespace_tokenize
