"""Link representations and their induced partitions.

Every mention owns a within-document customer link pointing at an earlier
mention of the same document or at itself.  Mentions whose customer link is a
self-loop head a table; every mention also carries a table link pointing at a
mention of another document or at itself, but only the table links of heads
are active.  Coreference clusters are the connected components of the
undirected graph over customer links plus active table links; tables are the
components over customer links alone.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError


def _components(n, edges):
    """Connected components of vertices 0..n-1, in first-vertex order."""
    adj = [[] for _ in range(n)]
    for i, j in edges:
        if i != j:
            adj[i].append(j)
            adj[j].append(i)
    comp = [-1] * n
    out = []
    for start in range(n):
        if comp[start] >= 0:
            continue
        k = len(out)
        comp[start] = k
        stack = [start]
        members = [start]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if comp[v] < 0:
                    comp[v] = k
                    stack.append(v)
                    members.append(v)
        out.append(sorted(members))
    return out


def tables_from_customer_links(customer_link):
    """Partition of mention indices induced by customer links alone."""
    n = len(customer_link)
    return _components(n, ((i, customer_link[i]) for i in range(n)))


def clusters_from_links(customer_link, table_link):
    """Partition induced by customer links plus active table links.

    A table link is active only for mentions whose customer link is a
    self-loop; the others are carried along but do not join anything.
    """
    n = len(customer_link)

    def edges():
        for i in range(n):
            yield i, customer_link[i]
            if customer_link[i] == i:
                yield i, table_link[i]

    return _components(n, edges())


@dataclass(frozen=True)
class LinkState:
    """A full link configuration over the mentions of a corpus.

    Mentions are indexed in canonical order: documents by doc_id, mentions by
    order_index within each document.
    """

    mention_ids: tuple[str, ...]
    doc_of: tuple[int, ...]
    customer_link: tuple[int, ...]
    table_link: tuple[int, ...]

    def validate(self):
        n = len(self.mention_ids)
        if not (len(self.doc_of) == len(self.customer_link) == len(self.table_link) == n):
            raise InputError("link arrays have inconsistent lengths")
        for i in range(n):
            j = self.customer_link[i]
            if j != i and (self.doc_of[j] != self.doc_of[i] or j > i):
                raise InputError(
                    f"customer link {i} -> {j} must stay within the document "
                    "and point backwards"
                )
            k = self.table_link[i]
            if k != i and self.doc_of[k] == self.doc_of[i]:
                raise InputError(f"table link {i} -> {k} must leave the document")

    def tables(self):
        return tables_from_customer_links(self.customer_link)

    def clusters(self):
        return clusters_from_links(self.customer_link, self.table_link)

    def assignment(self):
        return ClusterAssignment.from_index_partition(self.mention_ids, self.clusters())


@dataclass(frozen=True)
class ClusterAssignment:
    """A clustering of mentions with canonical labels.

    Labels form a restricted growth string over the canonical mention order:
    the first mention gets cluster 0, and each later mention gets either an
    existing label or the smallest unused one.  Two assignments over the same
    mentions are equal iff they induce the same partition.
    """

    mention_ids: tuple[str, ...]
    labels: tuple[int, ...]

    @staticmethod
    def from_index_partition(mention_ids, parts):
        raw = [0] * len(mention_ids)
        for k, members in enumerate(parts):
            for i in members:
                raw[i] = k
        return ClusterAssignment(tuple(mention_ids), _canonical(raw))

    @staticmethod
    def from_mapping(mention_ids_in_order, mapping):
        """Build from a mention_id -> label mapping (labels of any type)."""
        ids = tuple(mention_ids_in_order)
        missing = [m for m in ids if m not in mapping]
        if missing:
            raise InputError(f"clustering lacks labels for mentions {missing[:5]}")
        extra = set(mapping) - set(ids)
        if extra:
            raise InputError(f"clustering labels unknown mentions {sorted(extra)[:5]}")
        return ClusterAssignment(ids, _canonical([mapping[m] for m in ids]))

    @staticmethod
    def from_partition(mention_ids_in_order, parts):
        """Build from an iterable of collections of mention ids."""
        mapping = {}
        for k, part in enumerate(parts):
            for mid in part:
                if mid in mapping:
                    raise InputError(f"mention {mid!r} appears in two clusters")
                mapping[mid] = k
        return ClusterAssignment.from_mapping(mention_ids_in_order, mapping)

    def as_mapping(self):
        return dict(zip(self.mention_ids, self.labels))

    def partition(self):
        """Clusters as frozensets of mention ids, in label order."""
        parts = [set() for _ in range(max(self.labels) + 1)] if self.labels else []
        for mid, k in zip(self.mention_ids, self.labels):
            parts[k].add(mid)
        return [frozenset(p) for p in parts]

    def n_clusters(self):
        return max(self.labels) + 1 if self.labels else 0

    def restrict(self, keep_ids):
        """Assignment over a subset of mentions, relabeled canonically."""
        keep = set(keep_ids)
        ids = tuple(m for m in self.mention_ids if m in keep)
        labels = [l for m, l in zip(self.mention_ids, self.labels) if m in keep]
        return ClusterAssignment(ids, _canonical(labels))


def _canonical(labels):
    seen = {}
    out = []
    for l in labels:
        if l not in seen:
            seen[l] = len(seen)
        out.append(seen[l])
    return tuple(out)


def canonical_order(corpus):
    """Mention ids in canonical (doc_id, order_index) order."""
    return tuple(m.mention_id for m in corpus.mentions_in_order())
