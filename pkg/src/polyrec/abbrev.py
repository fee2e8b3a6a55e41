"""Abbreviation pair detection around parentheses.

Character-matching procedure: a parenthesized candidate short form is
accepted when every alphanumeric character of it appears, in order and
case-insensitively, in the text to its left, with the first character
landing on a word start. The matched text span is then the long form.
"""

from __future__ import annotations

import re
from typing import List, Optional, Sequence, Tuple

from .tag import EntityMention

MIN_SHORT_CHARS = 2
MAX_SHORT_CHARS = 10

_PAREN = re.compile(r"\(([^()]{%d,%d})\)" % (MIN_SHORT_CHARS, MAX_SHORT_CHARS))


def _match_long_form(text: str, end: int, short: str) -> Optional[int]:
    """Start offset of the long form for ``short`` in ``text[:end]``,
    or None when the characters cannot be matched."""
    chars = [c for c in short.lower() if c.isalnum()]
    if not chars:
        return None
    si = len(chars) - 1
    ti = end - 1
    while ti >= 0:
        c = text[ti].lower()
        if si == 0:
            # first character must also sit at a word start
            at_word_start = ti == 0 or not text[ti - 1].isalnum()
            if c == chars[0] and at_word_start:
                return ti
        elif c == chars[si]:
            si -= 1
        ti -= 1
    return None


def candidate_short_forms(text: str) -> List[Tuple[int, int]]:
    """Spans (inside the parentheses) of plausible short forms."""
    spans = []
    for m in _PAREN.finditer(text):
        content = m.group(1)
        if not any(c.isalpha() for c in content):
            continue
        if _looks_like_citation(content):
            continue
        spans.append((m.start(1), m.end(1)))
    return spans


def _looks_like_citation(content: str) -> bool:
    # "(Fig. 2)" / "(e.g. PVA)" style parentheticals are not short forms
    return content.strip().lower().startswith(("fig", "eq", "ref", "e.g", "i.e", "see "))


def detect_abbreviations(
    sentence_text: str,
    mentions: Sequence[EntityMention],
    sentence_start: int = 0,
) -> List[Tuple[EntityMention, EntityMention]]:
    """(long form, short form) mention pairs found in one sentence.

    ``mentions`` carry document-level offsets; ``sentence_start`` is the
    sentence's offset into the document text.
    """
    pairs = []
    for cand_start, cand_end in candidate_short_forms(sentence_text):
        short_mention = _mention_inside(
            mentions, sentence_start + cand_start, sentence_start + cand_end
        )
        if short_mention is None:
            continue
        short_text = sentence_text[cand_start:cand_end]
        open_paren = cand_start - 1
        left_end = open_paren
        while left_end > 0 and sentence_text[left_end - 1].isspace():
            left_end -= 1
        match_start = _match_long_form(sentence_text, left_end, short_text)
        if match_start is None:
            continue
        long_mention = _best_overlap(
            mentions,
            sentence_start + match_start,
            sentence_start + left_end,
            exclude=short_mention,
        )
        if long_mention is not None:
            pairs.append((long_mention, short_mention))
    return pairs


def _mention_inside(
    mentions: Sequence[EntityMention], start: int, end: int
) -> Optional[EntityMention]:
    best = None
    for m in mentions:
        if m.start >= start and m.end <= end:
            if best is None or (m.end - m.start) > (best.end - best.start):
                best = m
    return best


def _best_overlap(
    mentions: Sequence[EntityMention],
    start: int,
    end: int,
    exclude: EntityMention,
) -> Optional[EntityMention]:
    best = None
    best_overlap = 0
    for m in mentions:
        if m is exclude:
            continue
        overlap = min(m.end, end) - max(m.start, start)
        if overlap > best_overlap or (
            overlap == best_overlap and best is not None and m.start < best.start
        ):
            if overlap > 0:
                best = m
                best_overlap = overlap
    return best
