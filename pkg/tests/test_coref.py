import random

import pytest

from polyrec.coref import Cluster, CorefConfig, coreference
from polyrec.labels import EntityLabel
from polyrec.tag import EntityMention

POLY = EntityLabel.POLYMER
INORG = EntityLabel.INORGANIC_MATERIAL


def mention(surface, start, label=POLY, sentence=0):
    return EntityMention(
        doc_id="d",
        label=label,
        surface=surface,
        start=start,
        end=start + len(surface),
        sentence_index=sentence,
        start_token=start,
        end_token=start + 1,
    )


class TestClustering:
    def test_levenshtein_one_clusters(self):
        a = mention("PLA", 0)
        b = mention("PLAs", 10)
        clusters = coreference([a, b])
        assert len(clusters) == 1
        assert a.cluster_id == b.cluster_id == 0

    def test_distant_names_stay_apart(self):
        a = mention("polyethylene", 0)
        b = mention("polypropylene", 20)
        clusters = coreference([a, b])
        assert len(clusters) == 2
        assert a.cluster_id != b.cluster_id

    def test_abbreviation_pair_links(self):
        long_m = mention("poly(vinyl alcohol)", 0)
        short_m = mention("PVA", 21)
        clusters = coreference(
            [long_m, short_m], abbreviation_pairs=[(long_m, short_m)]
        )
        assert len(clusters) == 1

    def test_abbreviations_can_be_disabled(self):
        long_m = mention("poly(vinyl alcohol)", 0)
        short_m = mention("PVA", 21)
        clusters = coreference(
            [long_m, short_m],
            CorefConfig(use_abbreviations=False),
            abbreviation_pairs=[(long_m, short_m)],
        )
        assert len(clusters) == 2

    def test_transitive_closure(self):
        a = mention("PLA", 0)
        b = mention("PLAs", 10)
        c = mention("PLAss", 20)  # distance 1 from b, 2 from a
        clusters = coreference([a, b, c])
        assert len(clusters) == 1

    def test_whitespace_collapse_before_distance(self):
        a = mention("poly  lactic acid", 0)
        b = mention("poly lactic acid", 30)
        clusters = coreference([a, b])
        assert len(clusters) == 1

    def test_case_sensitive_distance(self):
        a = mention("PVA", 0)
        b = mention("pva", 10)
        clusters = coreference([a, b])
        assert len(clusters) == 2

    def test_representative_most_frequent(self):
        mentions = [
            mention("PVA", 0),
            mention("PVA", 10),
            mention("PVAs", 20),
        ]
        clusters = coreference(mentions)
        assert clusters[0].representative == "PVA"

    def test_representative_tie_prefers_longest(self):
        mentions = [mention("PLA", 0), mention("PLAs", 10)]
        clusters = coreference(mentions)
        assert clusters[0].representative == "PLAs"

    def test_majority_label(self):
        mentions = [
            mention("SiO2", 0, INORG),
            mention("SiO2", 10, INORG),
            mention("SiO", 20, POLY),  # distance 1, mislabeled member
        ]
        clusters = coreference(mentions)
        assert len(clusters) == 1
        assert clusters[0].label is INORG

    def test_cluster_ids_follow_document_order(self):
        a = mention("zeta", 50)
        b = mention("alpha", 0)
        clusters = coreference([a, b])
        assert b.cluster_id == 0
        assert a.cluster_id == 1

    def test_order_invariance(self):
        surfaces = ["PVA", "PVAs", "PEO", "poly(vinyl alcohol)", "PEOs", "PLA"]
        base = [mention(s, i * 25) for i, s in enumerate(surfaces)]
        pairs = [(base[3], base[0])]
        reference = coreference(base, abbreviation_pairs=pairs)
        ref_assignment = [(m.start, m.cluster_id) for m in base]
        ref_reps = [(c.cluster_id, c.representative) for c in reference]

        rng = random.Random(11)
        for _ in range(50):
            shuffled = base[:]
            rng.shuffle(shuffled)
            clusters = coreference(shuffled, abbreviation_pairs=pairs)
            assert [(m.start, m.cluster_id) for m in base] == ref_assignment
            assert [(c.cluster_id, c.representative) for c in clusters] == ref_reps

    def test_config_validation(self):
        with pytest.raises(ValueError):
            CorefConfig(max_levenshtein=-1)

    def test_partition(self):
        mentions = [mention(s, i * 10) for i, s in enumerate(
            ["PVA", "PVAs", "PEO", "SiO2", "SiO2"]
        )]
        clusters = coreference(mentions)
        seen = [m for c in clusters for m in c.mentions]
        assert len(seen) == len(mentions)
        assert {id(m) for m in seen} == {id(m) for m in mentions}
        for cluster in clusters:
            for m in cluster.mentions:
                assert m.cluster_id == cluster.cluster_id
