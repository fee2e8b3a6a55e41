import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyrec.wordpiece import (
    MAX_WORD_CHARS,
    TokenSpan,
    Vocabulary,
    VocabularyError,
    basic_tokenize,
    load_vocab,
    whitespace_tokenize,
    wordpiece_tokenize,
)
from oracles import greedy_wordpiece_reference


def vocab_of(*entries):
    return Vocabulary(entries=tuple(entries))


class TestLoadVocab:
    def test_load_preserves_order(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("[UNK]\nab\na\nb\n##c\n", encoding="utf-8")
        vocab = load_vocab(path)
        assert vocab.entries == ("[UNK]", "ab", "a", "b", "##c")
        assert len(vocab) == 5
        assert "ab" in vocab

    def test_empty_file(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(VocabularyError, match="empty"):
            load_vocab(path)

    def test_duplicate_named(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("[UNK]\nab\nab\n", encoding="utf-8")
        with pytest.raises(VocabularyError, match="'ab'"):
            load_vocab(path)

    def test_missing_unk(self, tmp_path):
        path = tmp_path / "vocab.txt"
        path.write_text("ab\ncd\n", encoding="utf-8")
        with pytest.raises(VocabularyError, match=r"\[UNK\]"):
            load_vocab(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_vocab(tmp_path / "nope.txt")


class TestWordpiece:
    def test_paper_example_resultant(self):
        vocab = vocab_of("[UNK]", "result", "##ant")
        pieces = [t.surface for t in wordpiece_tokenize("resultant", vocab)]
        assert pieces == ["result", "##ant"]

    def test_whole_word_wins(self):
        vocab = vocab_of("[UNK]", "ab", "a", "##b")
        assert [t.surface for t in wordpiece_tokenize("ab", vocab)] == ["ab"]

    def test_greedy_and_unk(self):
        vocab = vocab_of("[UNK]", "ab", "a", "##c")
        assert [t.surface for t in wordpiece_tokenize("abc", vocab)] == ["ab", "##c"]
        assert [t.surface for t in wordpiece_tokenize("abd", vocab)] == ["[UNK]"]

    def test_offsets_and_continuations(self):
        vocab = vocab_of("[UNK]", "result", "##ant")
        text = "a resultant b"
        tokens = wordpiece_tokenize(text, vocab)
        for t in tokens:
            if t.surface != "[UNK]":
                body = t.surface[2:] if t.is_continuation else t.surface
                assert body == text[t.start : t.end]
        ant = [t for t in tokens if t.surface == "##ant"][0]
        assert ant.is_continuation

    def test_hyphen_splits_off(self):
        vocab = vocab_of("[UNK]", "P", "##LL", "##A", "rich", "-")
        tokens = wordpiece_tokenize("PLLA-rich", vocab)
        assert [t.surface for t in tokens] == ["P", "##LL", "##A", "-", "rich"]

    def test_long_word_forced_unk(self):
        vocab = vocab_of("[UNK]", "a", "##a")
        word = "a" * (MAX_WORD_CHARS + 1)
        assert [t.surface for t in wordpiece_tokenize(word, vocab)] == ["[UNK]"]

    def test_determinism(self):
        vocab = vocab_of("[UNK]", "poly", "##mer", "##s")
        text = "polymers polymers"
        assert wordpiece_tokenize(text, vocab) == wordpiece_tokenize(text, vocab)

    @given(
        words=st.lists(
            st.text(alphabet="abcd", min_size=1, max_size=8), min_size=1, max_size=4
        ),
        vocab_pieces=st.sets(
            st.text(alphabet="abcd", min_size=1, max_size=4), min_size=1, max_size=12
        ),
        data=st.data(),
    )
    @settings(max_examples=400, deadline=None)
    def test_oracle_equivalence(self, words, vocab_pieces, data):
        continuations = data.draw(
            st.sets(st.text(alphabet="abcd", min_size=1, max_size=4), max_size=12)
        )
        entries = ["[UNK]"] + sorted(vocab_pieces) + sorted(
            "##" + p for p in continuations
        )
        vocab = Vocabulary(entries=tuple(entries))
        text = " ".join(words)
        got = [t.surface for t in wordpiece_tokenize(text, vocab)]
        expected = []
        for word in words:
            expected.extend(greedy_wordpiece_reference(word, entries))
        assert got == expected

    @given(
        word=st.text(alphabet="abcd", min_size=1, max_size=10),
        vocab_pieces=st.sets(
            st.text(alphabet="abcd", min_size=1, max_size=3), min_size=1, max_size=10
        ),
    )
    @settings(max_examples=300, deadline=None)
    def test_reconstruction(self, word, vocab_pieces):
        entries = ("[UNK]",) + tuple(sorted(vocab_pieces)) + tuple(
            sorted("##" + p for p in vocab_pieces)
        )
        vocab = Vocabulary(entries=entries)
        pieces = [t.surface for t in wordpiece_tokenize(word, vocab)]
        if pieces != ["[UNK]"]:
            joined = "".join(p[2:] if p.startswith("##") else p for p in pieces)
            assert joined == word


class TestBasicTokenize:
    def test_script_groups_stay_whole(self):
        text = "10^{-6} S/cm and T_{g}"
        spans = basic_tokenize(text)
        surfaces = [text[s:e] for s, e in spans]
        assert "10^{-6}" in surfaces
        assert "T_{g}" in surfaces
        assert "/" in surfaces

    def test_punctuation_single_chars(self):
        text = "poly(vinyl alcohol), PVA."
        surfaces = [text[s:e] for s, e in basic_tokenize(text)]
        assert surfaces == [
            "poly", "(", "vinyl", "alcohol", ")", ",", "PVA", ".",
        ]

    def test_word_after_script_group_glues(self):
        text = "PC_{61}BM"
        surfaces = [text[s:e] for s, e in basic_tokenize(text)]
        assert surfaces == ["PC_{61}BM"]

    def test_whitespace_tokenize_surfaces(self):
        text = "Tg of 100 °C"
        tokens = whitespace_tokenize(text)
        assert [t.surface for t in tokens] == ["Tg", "of", "100", "°", "C"]
        for t in tokens:
            assert t.surface == text[t.start : t.end]

    def test_token_span_validation(self):
        with pytest.raises(ValueError):
            TokenSpan(surface="x", start=3, end=3)
