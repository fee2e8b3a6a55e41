import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyrec.agreement import (
    agreement_report,
    cohen_kappa,
    fleiss_kappa,
    label_matrix,
)
from oracles import cohen_kappa_reference, fleiss_kappa_reference


class TestCohen:
    def test_perfect_agreement(self):
        assert cohen_kappa(["X", "Y", "X"], ["X", "Y", "X"]) == 1.0

    def test_zero_kappa_case(self):
        # hand contingency: p_o = 0.5, p_e = 0.5 -> kappa = 0
        assert cohen_kappa(list("XXYY"), list("XYXY")) == pytest.approx(0.0)

    def test_hand_case_matches_oracle(self):
        a = list("XXXY")
        b = list("XXYY")
        expected = cohen_kappa_reference(a, b)
        assert abs(cohen_kappa(a, b) - float(expected)) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            cohen_kappa(["X"], ["X", "Y"])

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            cohen_kappa([], [])

    def test_degenerate_single_category(self):
        assert cohen_kappa(["X", "X"], ["X", "X"]) == 1.0

    @given(
        st.lists(
            st.tuples(st.sampled_from("ABC"), st.sampled_from("ABC")),
            min_size=1,
            max_size=40,
        )
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_oracle(self, pairs):
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        assert abs(cohen_kappa(a, b) - float(cohen_kappa_reference(a, b))) < 1e-9

    @given(
        st.lists(
            st.tuples(st.sampled_from("ABC"), st.sampled_from("ABC")),
            min_size=2,
            max_size=30,
        ),
        st.randoms(),
    )
    @settings(max_examples=150, deadline=None)
    def test_permutation_invariant(self, pairs, rng):
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        before = cohen_kappa(a, b)
        order = list(range(len(pairs)))
        rng.shuffle(order)
        after = cohen_kappa([a[i] for i in order], [b[i] for i in order])
        assert after == pytest.approx(before)

    @given(
        st.lists(
            st.tuples(st.sampled_from("AB"), st.sampled_from("AB")),
            min_size=1,
            max_size=30,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_bounded_above_and_one_iff_perfect(self, pairs):
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        kappa = cohen_kappa(a, b)
        assert kappa <= 1.0 + 1e-12
        if a == b:
            assert kappa == 1.0
        else:
            assert kappa < 1.0


def random_counts(rng, items, cats, raters):
    counts = []
    for _ in range(items):
        row = [0] * cats
        for _ in range(raters):
            row[rng.randrange(cats)] += 1
        counts.append(row)
    return counts


class TestFleiss:
    def test_all_agree(self):
        counts = [[3, 0], [0, 3], [3, 0]]
        assert fleiss_kappa(counts, 3) == 1.0

    def test_hand_matrix_matches_oracle(self):
        counts = [[3, 0], [0, 3], [2, 1]]
        expected = fleiss_kappa_reference(counts, 3)
        assert abs(fleiss_kappa(counts, 3) - float(expected)) < 1e-12

    def test_single_category_everywhere(self):
        counts = [[3], [3], [3]]
        assert fleiss_kappa(counts, 3) == 1.0

    def test_row_sum_violation(self):
        with pytest.raises(ValueError, match="sums to"):
            fleiss_kappa([[2, 0], [1, 1], [3, 0]], 3)

    def test_needs_two_raters(self):
        with pytest.raises(ValueError, match="raters"):
            fleiss_kappa([[1]], 1)

    def test_empty(self):
        with pytest.raises(ValueError, match="empty"):
            fleiss_kappa([], 3)

    @given(
        items=st.integers(min_value=1, max_value=20),
        cats=st.integers(min_value=1, max_value=5),
        raters=st.integers(min_value=2, max_value=6),
        seed=st.integers(min_value=0, max_value=10**6),
    )
    @settings(max_examples=300, deadline=None)
    def test_matches_oracle(self, items, cats, raters, seed):
        counts = random_counts(random.Random(seed), items, cats, raters)
        got = fleiss_kappa(counts, raters)
        expected = float(fleiss_kappa_reference(counts, raters))
        assert abs(got - expected) < 1e-9
        assert got <= 1.0 + 1e-12


class TestReport:
    def test_three_annotators(self):
        annotations = {
            "ann1": list("XXYYZ"),
            "ann2": list("XXYZZ"),
            "ann3": list("XYYYZ"),
        }
        report = agreement_report(annotations)
        assert set(report.cohen_pairwise) == {
            ("ann1", "ann2"), ("ann1", "ann3"), ("ann2", "ann3"),
        }
        counts, cats = label_matrix(annotations)
        assert cats == ["X", "Y", "Z"]
        expected = float(fleiss_kappa_reference(counts, 3))
        assert report.fleiss == pytest.approx(expected)
        # report invariant: kappa = (p_o - p_e) / (1 - p_e)
        assert report.fleiss == pytest.approx(
            (report.p_o - report.p_e) / (1 - report.p_e)
        )

    def test_report_json_shape(self):
        report = agreement_report({"a": list("XY"), "b": list("XY")})
        payload = report.to_json()
        assert payload["fleiss"] == 1.0
        assert payload["cohen_pairwise"] == {"a|b": 1.0}
