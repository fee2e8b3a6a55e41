"""Document ingestion: markup stripping, Unicode normalization, sentence
splitting, and the two corpus-level relevance filters.

Markup handling is best-effort: well-formed tags are removed, ``<sup>`` /
``<sub>`` become ``^{...}`` / ``_{...}``, and anything tag-like that is
malformed loses its angle brackets but keeps its text. The Unicode
normalization table ships as ``data/unicode_map.json`` so its behavior is
bit-exact and editable.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union


@dataclass(frozen=True)
class RawDocument:
    """One abstract as ingested, markup and all."""

    doc_id: str
    title: str
    abstract_markup: str
    year: Optional[int] = None
    doi: Optional[str] = None

    def __post_init__(self):
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if self.year is not None and not (1800 <= self.year <= 2100):
            raise ValueError(f"year out of range: {self.year}")


@dataclass(frozen=True)
class Document:
    """A cleaned abstract with sentence offsets."""

    doc_id: str
    text: str
    sentences: tuple  # of (start, end) char offsets, sorted, non-overlapping
    title: str = ""
    year: Optional[int] = None
    doi: Optional[str] = None

    def __post_init__(self):
        prev_end = 0
        for start, end in self.sentences:
            if not (0 <= start < end <= len(self.text)):
                raise ValueError(f"sentence span ({start}, {end}) out of bounds")
            if start < prev_end:
                raise ValueError("sentence spans overlap or are unsorted")
            prev_end = end

    def sentence_texts(self) -> list:
        return [self.text[s:e] for s, e in self.sentences]

    def sentence_index_at(self, pos: int) -> int:
        """Index of the sentence containing char ``pos`` (nearest if between)."""
        for i, (start, end) in enumerate(self.sentences):
            if pos < end:
                return i
        return max(len(self.sentences) - 1, 0)


@lru_cache(maxsize=1)
def unicode_map() -> dict:
    with resources.files("polyrec.data").joinpath("unicode_map.json").open(
        encoding="utf-8"
    ) as fh:
        return {k: v for k, v in json.load(fh).items()}


@lru_cache(maxsize=1)
def protected_abbreviations() -> frozenset:
    entries = set()
    with resources.files("polyrec.data").joinpath("sentence_abbreviations.txt").open(
        encoding="utf-8"
    ) as fh:
        for line in fh:
            line = line.strip().lower()
            if line and not line.startswith("#"):
                entries.add(line)
    return frozenset(entries)


_SUP_TAG = re.compile(r"<sup\b[^<>]*>(.*?)</sup\s*>", re.IGNORECASE | re.DOTALL)
_SUB_TAG = re.compile(r"<sub\b[^<>]*>(.*?)</sub\s*>", re.IGNORECASE | re.DOTALL)
_COMMENT = re.compile(r"<!--.*?-->", re.DOTALL)
_TAG = re.compile(r"</?[a-zA-Z][^<>]*>|<![^<>]*>|<\?[^<>]*>")

# Closed entity set: '&' never decodes ("&amp;amp;" would otherwise need a
# second pass), which keeps strip_markup idempotent. '<' and '>' decode and
# are then removed with the other stray angle brackets.
_NAMED_ENTITIES = {
    "lt": "<", "gt": ">",
    "nbsp": " ", "thinsp": " ", "ensp": " ", "emsp": " ",
    "ndash": "-", "mdash": "-", "minus": "-", "hyphen": "-",
    "times": "×", "middot": "·", "sdot": "·",
    "plusmn": "±", "deg": "°", "micro": "μ",
    "prime": "'", "Prime": '"', "sim": "~", "asymp": "~",
    "lsquo": "'", "rsquo": "'", "ldquo": '"', "rdquo": '"',
    "alpha": "α", "beta": "β", "gamma": "γ",
    "delta": "δ", "epsilon": "ε", "eta": "η",
    "theta": "θ", "kappa": "κ", "lambda": "λ",
    "mu": "μ", "nu": "ν", "pi": "π", "rho": "ρ",
    "sigma": "σ", "tau": "τ", "phi": "φ",
    "chi": "χ", "psi": "ψ", "omega": "ω",
    "Delta": "Δ", "Omega": "Ω",
}
_ENTITY = re.compile(r"&(#x?[0-9a-fA-F]+|[a-zA-Z]+);")
_MARKUP_CODEPOINTS = {38}  # '&' stays encoded; see note above

_SUPERSCRIPT_RUN = re.compile("[⁰¹²³⁴-⁹⁺⁻ⁿ]+")
_SUBSCRIPT_RUN = re.compile("[₀-₉₊₋]+")
_SUPERSCRIPT_CHARS = dict(zip("⁰¹²³⁴⁵⁶⁷⁸⁹⁺⁻ⁿ", "0123456789+-n"))
_SUBSCRIPT_CHARS = dict(zip("₀₁₂₃₄₅₆₇₈₉₊₋", "0123456789+-"))


def _decode_entity(match: "re.Match") -> str:
    body = match.group(1)
    if body.startswith("#"):
        try:
            code = int(body[2:], 16) if body[1] in "xX" else int(body[1:])
        except ValueError:
            return match.group(0)
        if code in _MARKUP_CODEPOINTS or not (0 < code <= 0x10FFFF):
            return match.group(0)
        return chr(code)
    return _NAMED_ENTITIES.get(body, match.group(0))


def _balance_script_groups(text: str) -> str:
    """Close any ``^{`` / ``_{`` left open so downstream slicing is safe."""
    depth = 0
    i = 0
    while i < len(text):
        if text[i] in "^_" and text.startswith("{", i + 1):
            depth += 1
            i += 2
        elif text[i] == "{" and depth:
            depth += 1
            i += 1
        elif text[i] == "}" and depth:
            depth -= 1
            i += 1
        else:
            i += 1
    return text + "}" * depth


def strip_markup(markup: str) -> str:
    """Markup to plain text: tags removed, sup/sub as ``^{}``/``_{}``,
    Unicode normalized, whitespace collapsed."""
    text = markup
    for _ in range(10):  # innermost-first; nesting deeper than this is noise
        replaced = _SUP_TAG.sub(lambda m: "^{%s}" % m.group(1), text)
        replaced = _SUB_TAG.sub(lambda m: "_{%s}" % m.group(1), replaced)
        if replaced == text:
            break
        text = replaced
    text = _COMMENT.sub(" ", text)
    text = _TAG.sub(" ", text)  # a space, so "GPa<br/>at" cannot glue words
    text = _ENTITY.sub(_decode_entity, text)
    text = _SUPERSCRIPT_RUN.sub(
        lambda m: "^{%s}" % "".join(_SUPERSCRIPT_CHARS[c] for c in m.group(0)), text
    )
    text = _SUBSCRIPT_RUN.sub(
        lambda m: "_{%s}" % "".join(_SUBSCRIPT_CHARS[c] for c in m.group(0)), text
    )
    cmap = unicode_map()
    text = "".join(cmap.get(c, c) for c in text)
    text = text.replace("<", "").replace(">", "")
    text = _balance_script_groups(text)
    return re.sub(r"\s+", " ", text).strip()


_TERMINATOR = re.compile(r"[.?!]")


def _token_ending_at(text: str, period_pos: int) -> str:
    """The whitespace-delimited token whose last char is text[period_pos]."""
    start = period_pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : period_pos + 1]


def split_sentences(text: str) -> list:
    """Sentence spans: split at ., ?, ! followed by whitespace and an
    uppercase letter or digit, with abbreviation and initial protection."""
    if not text.strip():
        return []
    abbrevs = protected_abbreviations()
    breaks = []
    for match in _TERMINATOR.finditer(text):
        pos = match.start()
        after = pos + 1
        if after >= len(text) or not text[after].isspace():
            continue
        nxt = after
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        if nxt >= len(text) or not (text[nxt].isupper() or text[nxt].isdigit()):
            continue
        if match.group(0) == ".":
            token = _token_ending_at(text, pos).lower().lstrip("([{\"'")
            if token in abbrevs:
                continue
            # single-letter initials ("J. Smith")
            if len(token) == 2 and token[0].isalpha():
                continue
        breaks.append(pos + 1)

    spans = []
    start = 0
    while start < len(text) and text[start].isspace():
        start += 1
    for brk in breaks:
        spans.append((start, brk))
        start = brk
        while start < len(text) and text[start].isspace():
            start += 1
    end = len(text)
    while end > start and text[end - 1].isspace():
        end -= 1
    if end > start:
        spans.append((start, end))
    return spans


def _text_of(doc: Union[Document, str]) -> str:
    return doc.text if isinstance(doc, Document) else doc


def is_polymer_relevant(doc: Union[Document, str]) -> bool:
    """Proxy rule for polymer relevance: the substring 'poly', any case."""
    return "poly" in _text_of(doc).lower()


_NUMBER_TOKEN = re.compile(
    r"[+-]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+|\^\{[+-]?\d+\})?$"
)
_LETTER_BEARING = re.compile(r"[A-Za-zµμ°%]")
_EDGE_PUNCT = ".,;:!?()[]\"'"


def has_numeric_info(doc: Union[Document, str]) -> bool:
    """True iff a numeric token sits within two tokens of a letter-bearing
    token (the unit-adjacency proxy for 'contains property data')."""
    tokens = [t.strip(_EDGE_PUNCT) for t in _text_of(doc).split()]
    numbers = []
    units = []
    for i, tok in enumerate(tokens):
        if not tok:
            continue
        if _NUMBER_TOKEN.match(tok):
            numbers.append(i)
        elif _LETTER_BEARING.search(tok):
            units.append(i)
    if not numbers or not units:
        return False
    ui = 0
    for n in numbers:
        while ui < len(units) and units[ui] < n - 2:
            ui += 1
        if ui < len(units) and abs(units[ui] - n) <= 2:
            return True
    return False


def preprocess(raw: RawDocument) -> Document:
    """RawDocument -> Document: strip markup, split sentences."""
    text = strip_markup(raw.abstract_markup)
    return Document(
        doc_id=raw.doc_id,
        text=text,
        sentences=tuple(split_sentences(text)),
        title=strip_markup(raw.title) if raw.title else "",
        year=raw.year,
        doi=raw.doi,
    )


def read_raw_documents(path: Union[str, Path]) -> Iterator[RawDocument]:
    """Stream RawDocuments from a JSON-lines corpus file."""
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            doc_id = obj.get("doc_id", "")
            if doc_id in seen:
                raise ValueError(f"{path}:{lineno}: duplicate doc_id {doc_id!r}")
            seen.add(doc_id)
            yield RawDocument(
                doc_id=doc_id,
                title=obj.get("title") or "",
                abstract_markup=obj.get("abstract") or "",
                year=obj.get("year"),
                doi=obj.get("doi"),
            )


def document_to_json(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "title": doc.title,
        "year": doc.year,
        "doi": doc.doi,
        "text": doc.text,
        "sentences": [list(span) for span in doc.sentences],
    }


def document_from_json(obj: dict) -> Document:
    return Document(
        doc_id=obj["doc_id"],
        text=obj["text"],
        sentences=tuple(tuple(span) for span in obj.get("sentences", [])),
        title=obj.get("title") or "",
        year=obj.get("year"),
        doi=obj.get("doi"),
    )


def read_documents(path: Union[str, Path]) -> Iterator[Document]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield document_from_json(json.loads(line))


def write_documents(docs: Iterable[Document], path: Union[str, Path]) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(document_to_json(doc), ensure_ascii=False) + "\n")
            count += 1
    return count
