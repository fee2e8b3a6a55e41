"""Inter-annotator agreement: pairwise Cohen's kappa and Fleiss' kappa.

Both use the convention that total agreement scores exactly 1.0, even in
the degenerate case where expected agreement is also 1 (every rating in a
single category) and the ratio form would be 0/0.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Mapping, Sequence, Tuple


@dataclass
class AgreementReport:
    cohen_pairwise: Dict[Tuple[str, str], float]
    fleiss: float
    p_o: float  # observed agreement underlying the Fleiss score
    p_e: float  # expected agreement underlying the Fleiss score

    def to_json(self) -> dict:
        return {
            "cohen_pairwise": {
                f"{a}|{b}": kappa for (a, b), kappa in self.cohen_pairwise.items()
            },
            "fleiss": self.fleiss,
            "p_o": self.p_o,
            "p_e": self.p_e,
        }


def cohen_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Cohen's kappa between two equal-length label sequences."""
    if len(labels_a) != len(labels_b):
        raise ValueError(
            f"label sequences differ in length: {len(labels_a)} vs {len(labels_b)}"
        )
    if not labels_a:
        raise ValueError("cannot compute kappa on empty sequences")
    n = len(labels_a)
    p_o = sum(a == b for a, b in zip(labels_a, labels_b)) / n
    if p_o == 1.0:
        return 1.0
    freq_a = Counter(labels_a)
    freq_b = Counter(labels_b)
    p_e = sum(freq_a[c] * freq_b.get(c, 0) for c in freq_a) / (n * n)
    return (p_o - p_e) / (1.0 - p_e)


def fleiss_kappa(counts: Sequence[Sequence[int]], raters: int) -> float:
    """Fleiss' kappa from an items x categories count matrix."""
    if raters < 2:
        raise ValueError("fleiss_kappa needs at least 2 raters")
    if not counts:
        raise ValueError("cannot compute kappa on an empty matrix")
    n_items = len(counts)
    n_cats = len(counts[0])
    for i, row in enumerate(counts):
        if len(row) != n_cats:
            raise ValueError(f"row {i} has {len(row)} categories, expected {n_cats}")
        if any(c < 0 for c in row):
            raise ValueError(f"row {i} has a negative count")
        if sum(row) != raters:
            raise ValueError(f"row {i} sums to {sum(row)}, expected {raters}")

    total = n_items * raters
    p_cat = [sum(row[j] for row in counts) / total for j in range(n_cats)]
    p_items = [
        (sum(c * c for c in row) - raters) / (raters * (raters - 1)) for row in counts
    ]
    p_o = sum(p_items) / n_items
    p_e = sum(p * p for p in p_cat)
    if p_o == 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def label_matrix(annotations: Mapping[str, Sequence]) -> Tuple[list, list]:
    """Items x categories counts from per-annotator label sequences.

    Returns (counts, categories); categories are sorted by string form so
    the matrix layout is deterministic.
    """
    sequences = list(annotations.values())
    if not sequences:
        raise ValueError("no annotators given")
    length = len(sequences[0])
    for name, seq in annotations.items():
        if len(seq) != length:
            raise ValueError(f"annotator {name!r} labeled {len(seq)} items, "
                             f"expected {length}")
    categories = sorted({label for seq in sequences for label in seq}, key=str)
    index = {c: j for j, c in enumerate(categories)}
    counts = []
    for i in range(length):
        row = [0] * len(categories)
        for seq in sequences:
            row[index[seq[i]]] += 1
        counts.append(row)
    return counts, categories


def agreement_report(annotations: Mapping[str, Sequence]) -> AgreementReport:
    """Pairwise Cohen plus Fleiss over the same items."""
    names = list(annotations)
    if len(names) < 2:
        raise ValueError("agreement needs at least 2 annotators")
    pairwise = {
        (a, b): cohen_kappa(annotations[a], annotations[b])
        for a, b in combinations(names, 2)
    }
    counts, _ = label_matrix(annotations)
    raters = len(names)
    n_items = len(counts)
    total = n_items * raters
    p_cat = [sum(row[j] for row in counts) / total for j in range(len(counts[0]))]
    p_o = sum(
        (sum(c * c for c in row) - raters) / (raters * (raters - 1)) for row in counts
    ) / n_items
    p_e = sum(p * p for p in p_cat)
    return AgreementReport(
        cohen_pairwise=pairwise,
        fleiss=fleiss_kappa(counts, raters),
        p_o=p_o,
        p_e=p_e,
    )
