"""Data model and ingestion for documents, event mentions, and lexical resources.

A corpus file is JSON lines, one document object per line:

    {"doc_id": ..., "seminal_event_id": ..., "mentions": [{"mention_id": ...,
     "head_lemma": ..., "head_pos": ..., "span_lemmas": [...],
     "context_lemmas": [...], "arguments": {"participant": [["..."], ...]}}, ...]}

Gold coreference chains may appear as a footer line ``{"gold_chains":
[[mention_id, ...], ...]}`` or in a sidecar file with the same object.

All types are immutable after loading and safe to share across sampler chains.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InputError

ARGUMENT_ROLES = ("participant", "time", "location", "srl_arg0", "srl_arg1", "srl_arg2")


@dataclass(frozen=True)
class Mention:
    """One event mention: the head of an event action plus its argument spans."""

    mention_id: str
    doc_id: str
    order_index: int
    head_lemma: str
    head_pos: str
    span_lemmas: tuple[str, ...]
    context_lemmas: tuple[str, ...]
    # role -> tuple of argument mentions, each a tuple of lemmas
    arguments: dict[str, tuple[tuple[str, ...], ...]] = field(default_factory=dict)

    def validate(self):
        if not self.span_lemmas:
            raise InputError(f"mention {self.mention_id!r}: span_lemmas is empty")
        if self.head_lemma not in self.span_lemmas:
            raise InputError(
                f"mention {self.mention_id!r}: head lemma {self.head_lemma!r} "
                "does not occur in span_lemmas"
            )
        if self.order_index < 0:
            raise InputError(f"mention {self.mention_id!r}: negative order_index")
        for role in self.arguments:
            if role not in ARGUMENT_ROLES:
                raise InputError(
                    f"mention {self.mention_id!r}: unknown argument role {role!r}"
                )

    def argument_lemmas(self, role):
        """All lemmas of the given role, flattened over its argument mentions."""
        return [tok for span in self.arguments.get(role, ()) for tok in span]


@dataclass(frozen=True)
class Document:
    """An ordered sequence of event mentions from one source document."""

    doc_id: str
    seminal_event_id: str
    mentions: tuple[Mention, ...]
    # token -> count over all mention spans and argument spans in the document
    tf_vector: dict[str, int] = field(default_factory=dict, compare=False)

    @staticmethod
    def build(doc_id, seminal_event_id, mentions):
        mentions = tuple(sorted(mentions, key=lambda m: m.order_index))
        return Document(doc_id, seminal_event_id, mentions, _doc_tf(mentions))

    def validate(self):
        orders = [m.order_index for m in self.mentions]
        if orders != list(range(len(self.mentions))):
            raise InputError(
                f"document {self.doc_id!r}: mention order_index values must be "
                f"0..{len(self.mentions) - 1} without gaps, got {orders}"
            )
        for m in self.mentions:
            if m.doc_id != self.doc_id:
                raise InputError(
                    f"mention {m.mention_id!r} carries doc_id {m.doc_id!r} "
                    f"inside document {self.doc_id!r}"
                )
            m.validate()
        if self.tf_vector != _doc_tf(self.mentions):
            raise InputError(f"document {self.doc_id!r}: stale tf_vector")


def _doc_tf(mentions):
    tf = {}
    for m in mentions:
        for tok in m.span_lemmas:
            tf[tok] = tf.get(tok, 0) + 1
        for role in m.arguments:
            for span in m.arguments[role]:
                for tok in span:
                    tf[tok] = tf.get(tok, 0) + 1
    return tf


@dataclass(frozen=True)
class GoldChains:
    """Gold coreference chains: disjoint sets of mention ids."""

    chains: tuple[frozenset[str], ...]

    def chain_of(self):
        """Map mention_id -> chain index for all mentions inside a chain."""
        out = {}
        for k, chain in enumerate(self.chains):
            for mid in chain:
                out[mid] = k
        return out


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    gold: GoldChains | None = None

    def __post_init__(self):
        seen = set()
        for d in self.documents:
            if d.doc_id in seen:
                raise InputError(f"duplicate doc_id {d.doc_id!r}")
            seen.add(d.doc_id)

    def validate(self):
        seen_mentions = set()
        for d in self.documents:
            d.validate()
            for m in d.mentions:
                if m.mention_id in seen_mentions:
                    raise InputError(f"duplicate mention_id {m.mention_id!r}")
                seen_mentions.add(m.mention_id)
        if self.gold is not None:
            covered = set()
            for chain in self.gold.chains:
                for mid in chain:
                    if mid not in seen_mentions:
                        raise InputError(f"gold chain references unknown mention {mid!r}")
                    if mid in covered:
                        raise InputError(f"mention {mid!r} appears in two gold chains")
                    covered.add(mid)

    def doc(self, doc_id) -> Document:
        return self._doc_index[doc_id]

    def mention(self, mention_id) -> Mention:
        return self._mention_index[mention_id]

    @property
    def _doc_index(self):
        idx = getattr(self, "_doc_idx_cache", None)
        if idx is None:
            idx = {d.doc_id: d for d in self.documents}
            object.__setattr__(self, "_doc_idx_cache", idx)
        return idx

    @property
    def _mention_index(self):
        idx = getattr(self, "_mention_idx_cache", None)
        if idx is None:
            idx = {m.mention_id: m for d in self.documents for m in d.mentions}
            object.__setattr__(self, "_mention_idx_cache", idx)
        return idx

    def mentions_in_order(self):
        """All mentions sorted by (doc_id, order_index); the canonical order."""
        return [
            m
            for d in sorted(self.documents, key=lambda d: d.doc_id)
            for m in d.mentions
        ]

    def n_mentions(self):
        return sum(len(d.mentions) for d in self.documents)

    def span_vocabulary(self):
        """Distinct span lemmas across the corpus (the likelihood vocabulary)."""
        return sorted({tok for d in self.documents for m in d.mentions for tok in m.span_lemmas})


def gold_partition(corpus: Corpus):
    """Gold clustering over all mentions: chains plus implicit singletons."""
    if corpus.gold is None:
        raise InputError("corpus has no gold chains")
    covered = set()
    parts = []
    for chain in corpus.gold.chains:
        parts.append(frozenset(chain))
        covered |= chain
    for d in corpus.documents:
        for m in d.mentions:
            if m.mention_id not in covered:
                parts.append(frozenset([m.mention_id]))
    return parts


# ---------------------------------------------------------------------------
# Loading / saving
# ---------------------------------------------------------------------------


def _parse_mention(obj, doc_id, fallback_order, line_no):
    try:
        arguments = {
            role: tuple(tuple(span) for span in spans)
            for role, spans in obj.get("arguments", {}).items()
        }
        return Mention(
            mention_id=obj["mention_id"],
            doc_id=doc_id,
            order_index=int(obj.get("order_index", fallback_order)),
            head_lemma=obj["head_lemma"],
            head_pos=obj["head_pos"],
            span_lemmas=tuple(obj["span_lemmas"]),
            context_lemmas=tuple(obj.get("context_lemmas", ())),
            arguments=arguments,
        )
    except (KeyError, TypeError) as exc:
        raise InputError(f"line {line_no}: malformed mention object ({exc})") from exc


def load_corpus(path, gold_path=None) -> Corpus:
    """Load a JSON-lines corpus file, validating all invariants."""
    documents = []
    gold_chains = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}: line {line_no}: not valid JSON ({exc.msg})") from exc
            if "doc_id" in obj:
                doc_id = obj["doc_id"]
                if "seminal_event_id" not in obj:
                    raise InputError(f"line {line_no}: document {doc_id!r} lacks seminal_event_id")
                mentions = [
                    _parse_mention(mobj, doc_id, k, line_no)
                    for k, mobj in enumerate(obj.get("mentions", []))
                ]
                documents.append(
                    Document.build(doc_id, obj["seminal_event_id"], mentions)
                )
            elif "gold_chains" in obj:
                if gold_chains is not None:
                    raise InputError(f"line {line_no}: duplicate gold_chains entry")
                gold_chains = obj["gold_chains"]
            else:
                raise InputError(f"line {line_no}: object is neither a document nor gold_chains")
    if gold_path is not None:
        with open(gold_path, encoding="utf-8") as fh:
            obj = json.load(fh)
        gold_chains = obj["gold_chains"] if isinstance(obj, dict) else obj
    gold = None
    if gold_chains is not None:
        gold = GoldChains(tuple(frozenset(chain) for chain in gold_chains))
    corpus = Corpus(tuple(documents), gold)
    corpus.validate()
    return corpus


def _mention_to_obj(m: Mention):
    return {
        "mention_id": m.mention_id,
        "order_index": m.order_index,
        "head_lemma": m.head_lemma,
        "head_pos": m.head_pos,
        "span_lemmas": list(m.span_lemmas),
        "context_lemmas": list(m.context_lemmas),
        "arguments": {role: [list(s) for s in m.arguments[role]] for role in sorted(m.arguments)},
    }


def save_corpus(corpus: Corpus, path):
    """Write a corpus in the canonical JSON-lines form (round-trip stable)."""
    with open(path, "w", encoding="utf-8") as fh:
        for d in corpus.documents:
            obj = {
                "doc_id": d.doc_id,
                "seminal_event_id": d.seminal_event_id,
                "mentions": [_mention_to_obj(m) for m in d.mentions],
            }
            fh.write(json.dumps(obj) + "\n")
        if corpus.gold is not None:
            chains = sorted(sorted(chain) for chain in corpus.gold.chains)
            fh.write(json.dumps({"gold_chains": chains}) + "\n")


def load_embeddings(path):
    """Word vectors, one line per lemma: lemma followed by the vector entries."""
    vectors = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            lemma, values = parts[0], parts[1:]
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise InputError(f"{path}: line {line_no}: bad vector entry") from exc
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise InputError(
                    f"{path}: line {line_no}: vector length {vec.shape[0]} != {dim}"
                )
            vectors[lemma] = vec
    return vectors


def load_synonyms(path):
    """Synonym sets, one line per lemma: lemma TAB comma-separated synonyms."""
    synonyms = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            lemma, _, rest = line.partition("\t")
            synonyms[lemma] = frozenset(s for s in rest.split(",") if s)
    return synonyms


@dataclass(frozen=True)
class LexicalResources:
    """Static lookup tables: word embeddings and synonym sets for head lemmas."""

    embeddings: dict[str, np.ndarray] = field(default_factory=dict)
    synonyms: dict[str, frozenset[str]] = field(default_factory=dict)
    dimension: int = 300

    @staticmethod
    def load(embeddings_path=None, synonyms_path=None):
        embeddings = load_embeddings(embeddings_path) if embeddings_path else {}
        synonyms = load_synonyms(synonyms_path) if synonyms_path else {}
        dims = {v.shape[0] for v in embeddings.values()}
        if len(dims) > 1:
            raise InputError(f"embedding vectors have mixed dimensions {sorted(dims)}")
        dim = dims.pop() if dims else 300
        return LexicalResources(embeddings, synonyms, dim)

    def vector(self, lemma):
        """Embedding for a lemma; zero vector when the lemma is unknown."""
        vec = self.embeddings.get(lemma)
        if vec is None:
            return np.zeros(self.dimension)
        return vec

    def synonym_set(self, lemma):
        """Synonyms of a lemma, always including the lemma itself."""
        return self.synonyms.get(lemma, frozenset()) | {lemma}


# ---------------------------------------------------------------------------
# Document similarity and meta-documents
# ---------------------------------------------------------------------------


def doc_similarity(d: Document, d2: Document) -> float:
    """Cosine similarity of the document term-frequency vectors, in [0, 1]."""
    if not d.tf_vector or not d2.tf_vector:
        return 0.0
    a, b = d.tf_vector, d2.tf_vector
    if len(b) < len(a):
        a, b = b, a
    dot = sum(c * b[tok] for tok, c in a.items() if tok in b)
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(c * c for c in a.values()))
    nb = math.sqrt(sum(c * c for c in b.values()))
    return min(1.0, dot / (na * nb))


def build_meta_documents(corpus: Corpus) -> Corpus:
    """Merge documents sharing a seminal event into meta-documents.

    Mentions are concatenated in (doc_id, order_index) order with order_index
    reassigned; gold chains carry over untouched.  Meta-documents exist for
    cross-document scoring only and are never visible to inference.
    """
    groups = {}
    for d in corpus.documents:
        if not d.seminal_event_id:
            raise InputError(f"document {d.doc_id!r} lacks a seminal_event_id")
        groups.setdefault(d.seminal_event_id, []).append(d)
    metas = []
    for event_id in sorted(groups):
        docs = sorted(groups[event_id], key=lambda d: d.doc_id)
        mentions = []
        for d in docs:
            for m in sorted(d.mentions, key=lambda m: m.order_index):
                mentions.append(
                    replace(m, doc_id=event_id, order_index=len(mentions))
                )
        metas.append(Document.build(event_id, event_id, mentions))
    return Corpus(tuple(metas), corpus.gold)
