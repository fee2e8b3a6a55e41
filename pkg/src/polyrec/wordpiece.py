"""Wordpiece tokenization with character-offset tracking.

Text is first split into words (whitespace and punctuation boundaries;
``^{...}`` / ``_{...}`` script groups stay glued to the word they follow),
then each word is segmented greedily, longest vocabulary prefix first,
with continuation pieces carrying the ``##`` prefix. A word with no
segmentation becomes the unknown token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

MAX_WORD_CHARS = 100  # longer words are forced to the unknown token


class VocabularyError(ValueError):
    """Raised for unusable vocabulary files."""


@dataclass(frozen=True)
class Vocabulary:
    entries: tuple
    unk_token: str = "[UNK]"

    def __post_init__(self):
        object.__setattr__(self, "_index", frozenset(self.entries))

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TokenSpan:
    """One token with its character span in the source text.

    ``surface`` equals ``text[start:end]`` (continuations keep a ``##``
    prefix on top of that), except for unknown-token spans, whose surface
    is the vocabulary's unk token.
    """

    surface: str
    start: int
    end: int
    is_continuation: bool = False

    def __post_init__(self):
        if self.start >= self.end:
            raise ValueError(f"empty token span ({self.start}, {self.end})")


def load_vocab(path: Union[str, Path], unk_token: str = "[UNK]") -> Vocabulary:
    """Load a one-token-per-line vocabulary file, order preserved."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            token = line.rstrip("\n")
            if not token:
                continue
            if token in seen:
                raise VocabularyError(
                    f"{path}:{lineno}: duplicate vocabulary entry {token!r}"
                )
            seen.add(token)
            entries.append(token)
    if not entries:
        raise VocabularyError(f"{path}: vocabulary file is empty")
    if unk_token not in seen:
        raise VocabularyError(f"{path}: unk token {unk_token!r} not in vocabulary")
    return Vocabulary(entries=tuple(entries), unk_token=unk_token)


_SCRIPT_OPEN = re.compile(r"[\^_]\{")


def _script_group_end(text: str, start: int) -> int:
    """End offset (exclusive) of the ``^{...}``/``_{...}`` group at start,
    or -1 if unbalanced."""
    depth = 0
    i = start + 1  # at the '{'
    while i < len(text):
        c = text[i]
        if c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return i + 1
        i += 1
    return -1


def basic_tokenize(text: str) -> List[Tuple[int, int]]:
    """Word spans: alphanumeric runs (with attached script groups) and
    single punctuation characters."""
    spans: List[Tuple[int, int]] = []
    n = len(text)

    def glueable_at(pos: int) -> bool:
        # previous span touches pos and ends in a word char or a '}' group
        if not spans or spans[-1][1] != pos:
            return False
        last = text[spans[-1][1] - 1]
        return last.isalnum() or last == "}"

    i = 0
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "^_" and text.startswith("{", i + 1):
            end = _script_group_end(text, i)
            if end == -1:  # stray marker, treat as punctuation
                spans.append((i, i + 1))
                i += 1
                continue
            if glueable_at(i):
                spans[-1] = (spans[-1][0], end)
            else:
                spans.append((i, end))
            i = end
            continue
        if c.isalnum():
            start = i
            while i < n and text[i].isalnum():
                i += 1
            if glueable_at(start):  # word continues after a script group
                spans[-1] = (spans[-1][0], i)
            else:
                spans.append((start, i))
            continue
        spans.append((i, i + 1))
        i += 1
    return spans


def _segment_word(word: str, vocab: Vocabulary) -> list:
    """Greedy longest-prefix pieces of ``word``, or None when stuck."""
    pieces = []
    start = 0
    while start < len(word):
        end = len(word)
        found = None
        while start < end:
            piece = word[start:end]
            if start > 0:
                piece = "##" + piece
            if piece in vocab:
                found = piece
                break
            end -= 1
        if found is None:
            return None
        pieces.append((found, start, end))
        start = end
    return pieces


def wordpiece_tokenize(text: str, vocab: Vocabulary) -> List[TokenSpan]:
    """Tokenize preprocessed text against a vocabulary."""
    tokens = []
    for wstart, wend in basic_tokenize(text):
        word = text[wstart:wend]
        pieces = None
        if len(word) <= MAX_WORD_CHARS:
            pieces = _segment_word(word, vocab)
        if pieces is None:
            tokens.append(TokenSpan(vocab.unk_token, wstart, wend))
            continue
        for piece, pstart, pend in pieces:
            tokens.append(
                TokenSpan(
                    surface=piece,
                    start=wstart + pstart,
                    end=wstart + pend,
                    is_continuation=pstart > 0,
                )
            )
    return tokens


def whitespace_tokenize(text: str) -> List[TokenSpan]:
    """Vocabulary-free tokenization: each basic word is one token.

    This is what the extraction pipeline uses when no vocabulary is
    configured; offsets behave exactly like the wordpiece output.
    """
    return [
        TokenSpan(surface=text[s:e], start=s, end=e) for s, e in basic_tokenize(text)
    ]
