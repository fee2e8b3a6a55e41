"""Coreference of material mentions within one document.

Mentions join the same cluster when their whitespace-collapsed surfaces
are within a small Levenshtein distance (case-sensitive; default 1), or
when they form a detected abbreviation pair. Clusters are the connected
components of that graph, and every output is derived from a canonical
mention ordering so the clustering is invariant to input order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import kernels
from .labels import EntityLabel
from .tag import EntityMention


@dataclass(frozen=True)
class CorefConfig:
    max_levenshtein: int = 1
    use_abbreviations: bool = True

    def __post_init__(self):
        if self.max_levenshtein < 0:
            raise ValueError("max_levenshtein must be >= 0")


@dataclass
class Cluster:
    cluster_id: int
    mentions: List[EntityMention]
    representative: str
    label: EntityLabel
    normalized_name: Optional[str] = None

    @property
    def name(self) -> str:
        return self.normalized_name or self.representative


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


_LABEL_RANK = {label: i for i, label in enumerate(EntityLabel)}


def coreference(
    mentions: Sequence[EntityMention],
    config: CorefConfig = CorefConfig(),
    abbreviation_pairs: Iterable[Tuple[EntityMention, EntityMention]] = (),
) -> List[Cluster]:
    """Cluster mentions; assigns ``cluster_id`` on the mention objects and
    returns the clusters ordered by first appearance in the document."""
    ordered = sorted(mentions, key=lambda m: (m.start, m.end, m.label.value))
    index = {(m.start, m.end, m.label): i for i, m in enumerate(ordered)}
    uf = _UnionFind(len(ordered))

    surfaces = [m.collapsed_surface() for m in ordered]
    k = config.max_levenshtein
    for i in range(len(ordered)):
        for j in range(i + 1, len(ordered)):
            if surfaces[i] == surfaces[j] or kernels.within_distance(
                surfaces[i], surfaces[j], k
            ):
                uf.union(i, j)

    if config.use_abbreviations:
        for long_m, short_m in abbreviation_pairs:
            i = index.get((long_m.start, long_m.end, long_m.label))
            j = index.get((short_m.start, short_m.end, short_m.label))
            if i is not None and j is not None:
                uf.union(i, j)

    groups: Dict[int, List[int]] = {}
    for i in range(len(ordered)):
        groups.setdefault(uf.find(i), []).append(i)

    clusters = []
    for cluster_id, root in enumerate(sorted(groups)):
        members = [ordered[i] for i in groups[root]]
        clusters.append(
            Cluster(
                cluster_id=cluster_id,
                mentions=members,
                representative=_representative(members),
                label=_majority_label(members),
            )
        )
        for m in members:
            m.cluster_id = cluster_id
    return clusters


def _representative(members: Sequence[EntityMention]) -> str:
    """Most frequent surface; ties prefer the longest, then lexicographic."""
    counts = Counter(m.collapsed_surface() for m in members)
    return min(counts, key=lambda s: (-counts[s], -len(s), s))


def _majority_label(members: Sequence[EntityMention]) -> EntityLabel:
    counts = Counter(m.label for m in members)
    return min(counts, key=lambda lb: (-counts[lb], _LABEL_RANK[lb]))
