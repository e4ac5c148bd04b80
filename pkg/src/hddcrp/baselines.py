"""Deterministic comparison systems: lemma matching and agglomerative linking.

The lemma baseline clusters mentions corpus-wide by exact head lemma.  The
agglomerative baseline runs single-link clustering in two phases: first over
mentions inside each document, then over the resulting within-document
clusters across documents.  Single-link with a stopping threshold equals the
transitive closure of the "similarity at or above threshold" graph, so the
merge order affects only the trace, not the result; merges still happen in
descending similarity order with ties broken by the smallest witness pair so
the sequence is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

from .links import ClusterAssignment, canonical_order


@dataclass(frozen=True)
class AgglomerativeConfig:
    """Stopping thresholds; merging stops once the best pair drops below."""

    wd_threshold: float = 0.5
    cd_threshold: float = 0.5

    def __post_init__(self):
        for v in (self.wd_threshold, self.cd_threshold):
            if not 0.0 <= v <= 1.0:
                raise ValueError("thresholds must lie in [0, 1]")


def lemma_baseline(corpus):
    """Group mentions corpus-wide by exact head lemma equality."""
    groups = {}
    for m in corpus.mentions_in_order():
        groups.setdefault(m.head_lemma, []).append(m.mention_id)
    return ClusterAssignment.from_partition(canonical_order(corpus), groups.values())


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        self.parent[max(ri, rj)] = min(ri, rj)
        return True


def _single_link(n, scored_edges, threshold):
    """Union-find over edges with similarity >= threshold, highest first.

    scored_edges: iterable of (similarity, i, j) with i < j.  Returns the
    partition of 0..n-1 and the merge trace as (similarity, i, j) tuples.
    """
    uf = _UnionFind(n)
    trace = []
    for sim, i, j in sorted(scored_edges, key=lambda e: (-e[0], e[1], e[2])):
        if sim < threshold:
            break
        if uf.union(i, j):
            trace.append((sim, i, j))
    groups = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(i)
    return [groups[r] for r in sorted(groups)], trace


def agglomerative(corpus, model, resources, config=None):
    """Two-phase single-link clustering under the trained pairwise model.

    Phase 1 merges mentions within each document while the best inter-cluster
    pair similarity stays at or above wd_threshold.  Phase 2 merges the phase-1
    clusters across documents by the best truncated pair similarity against
    cd_threshold; no document-similarity weighting is applied there.
    """
    if config is None:
        config = AgglomerativeConfig()
    docs = sorted(corpus.documents, key=lambda d: d.doc_id)
    wd_clusters = []
    for d in docs:
        edges = [
            (model.pair_similarity(d.mentions[i], d.mentions[j], resources), j, i)
            for i in range(len(d.mentions))
            for j in range(i)
        ]
        parts, _ = _single_link(len(d.mentions), edges, config.wd_threshold)
        for part in parts:
            wd_clusters.append([d.mentions[i] for i in part])

    def cluster_pair_sim(ca, cb):
        return max(
            model.truncated_similarity(a, b, resources) for a in ca for b in cb
        )

    edges = [
        (cluster_pair_sim(wd_clusters[i], wd_clusters[j]), j, i)
        for i in range(len(wd_clusters))
        for j in range(i)
        if wd_clusters[i][0].doc_id != wd_clusters[j][0].doc_id
    ]
    parts, _ = _single_link(len(wd_clusters), edges, config.cd_threshold)
    partition = [
        [m.mention_id for k in part for m in wd_clusters[k]] for part in parts
    ]
    return ClusterAssignment.from_partition(canonical_order(corpus), partition)
