import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyrec.annotate import AnnotatedDocument
from polyrec.evaluation import (
    EvaluationReport,
    LabelScore,
    entities_from_labels,
    evaluate_corpus,
    evaluate_ner,
)
from polyrec.labels import EntityLabel
from polyrec.wordpiece import TokenSpan

O = EntityLabel.OTHER
POLY = EntityLabel.POLYMER
PROP = EntityLabel.PROPERTY_NAME
VAL = EntityLabel.PROPERTY_VALUE


def doc_of(*labels, doc_id="d"):
    tokens = [
        TokenSpan(surface=f"t{i}", start=i * 3, end=i * 3 + 2)
        for i in range(len(labels))
    ]
    return AnnotatedDocument(doc_id=doc_id, tokens=tokens, labels=list(labels))


class TestEntityAssembly:
    def test_maximal_runs(self):
        entities = entities_from_labels([O, POLY, POLY, O, PROP, O])
        assert entities == [(1, 3, POLY), (4, 5, PROP)]

    def test_adjacent_different_labels(self):
        entities = entities_from_labels([POLY, PROP])
        assert entities == [(0, 1, POLY), (1, 2, PROP)]

    def test_all_other(self):
        assert entities_from_labels([O, O]) == []


class TestEvaluateNer:
    def test_partial_entity_is_fp_plus_fn(self):
        # gold: "polyvinyl ethylene" both POLYMER; pred labels only the first
        gold = doc_of(POLY, POLY)
        pred = doc_of(POLY, O)
        report = evaluate_ner(pred, gold)
        score = report.per_label[POLY.value]
        assert (score.tp, score.fp, score.fn) == (0, 1, 1)

    def test_perfect_prediction(self):
        gold = doc_of(POLY, O, PROP, VAL)
        report = evaluate_ner(gold, gold)
        overall = report.overall
        assert overall.precision == 100.0
        assert overall.recall == 100.0
        assert overall.f1 == 100.0

    def test_counts_fixture(self):
        # tp=2 (POLY, PROP), fp=1 (spurious VAL), fn=1 (missed VAL)
        gold = doc_of(POLY, O, PROP, O, VAL, O)
        pred = doc_of(POLY, O, PROP, VAL, O, O)
        report = evaluate_ner(pred, gold)
        overall = report.overall
        assert (overall.tp, overall.fp, overall.fn) == (2, 1, 1)
        assert overall.precision == pytest.approx(200 / 3)
        assert overall.recall == pytest.approx(200 / 3)
        assert overall.f1 == pytest.approx(200 / 3)

    def test_token_mismatch_rejected(self):
        gold = doc_of(POLY, POLY)
        pred = AnnotatedDocument(
            doc_id="d",
            tokens=[
                TokenSpan(surface="a", start=0, end=1),
                TokenSpan(surface="b", start=1, end=2),
            ],
            labels=[POLY, POLY],
        )
        with pytest.raises(ValueError, match="differ"):
            evaluate_ner(pred, gold)

    def test_undefined_precision_is_none(self):
        gold = doc_of(POLY, O)
        pred = doc_of(O, O)
        report = evaluate_ner(pred, gold)
        score = report.per_label[POLY.value]
        assert score.precision is None
        assert score.recall == 0.0
        assert score.f1 is None

    def test_micro_tp_equals_per_label_sum(self):
        gold = doc_of(POLY, O, PROP, O, VAL)
        pred = doc_of(POLY, O, PROP, O, O)
        report = evaluate_ner(pred, gold)
        assert report.overall.tp == sum(
            s.tp for s in report.per_label.values()
        )

    @given(
        labels=st.lists(
            st.tuples(
                st.sampled_from([O, POLY, PROP, VAL]),
                st.sampled_from([O, POLY, PROP, VAL]),
            ),
            min_size=1,
            max_size=25,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_swap_symmetry(self, labels):
        gold = doc_of(*[pair[0] for pair in labels])
        pred = doc_of(*[pair[1] for pair in labels])
        forward = evaluate_ner(pred, gold).overall
        backward = evaluate_ner(gold, pred).overall
        assert forward.precision == backward.recall
        assert forward.recall == backward.precision
        assert forward.tp == backward.tp
        assert forward.fp == backward.fn
        assert forward.fn == backward.fp


class TestCorpusEvaluation:
    def test_merge_across_documents(self):
        gold1, pred1 = doc_of(POLY, O), doc_of(POLY, O)
        gold2, pred2 = doc_of(O, PROP, doc_id="e"), doc_of(PROP, O, doc_id="e")
        report = evaluate_corpus([(pred1, gold1), (pred2, gold2)])
        assert report.overall.tp == 1
        assert report.overall.fp == 1
        assert report.overall.fn == 1

    def test_score_json(self):
        score = LabelScore(tp=1, fp=0, fn=0)
        payload = score.to_json()
        assert payload["precision"] == 100.0
        report = EvaluationReport(per_label={"POLYMER": score})
        assert "overall" in report.to_json()
