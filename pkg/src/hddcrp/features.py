"""Pairwise feature vectors for mention pairs.

Every feature is a nonnegative similarity in [0, 1] or a 0/1 indicator, so a
learned positive weight always means "more alike".  The POS-pair block is a
one-hot over unordered tag pairs observed when the extractor was built, with
an extra bucket for pairs never seen there.  Role features come with a
companion both-present indicator because a 0 cosine is ambiguous between
"dissimilar arguments" and "no arguments at all".
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .corpus import ARGUMENT_ROLES

_SIM_FEATURES = ("head_embedding_cosine", "span_tf_cosine", "synonym_jaccard", "context_tf_cosine")


def _tf_cosine(a_tokens, b_tokens):
    if not a_tokens or not b_tokens:
        return 0.0
    a, b = Counter(a_tokens), Counter(b_tokens)
    if len(b) < len(a):
        a, b = b, a
    dot = sum(c * b[tok] for tok, c in a.items() if tok in b)
    if dot == 0:
        return 0.0
    na = math.sqrt(sum(c * c for c in a.values()))
    nb = math.sqrt(sum(c * c for c in b.values()))
    return min(1.0, dot / (na * nb))


def _embedding_cosine(resources, a_lemma, b_lemma):
    va, vb = resources.vector(a_lemma), resources.vector(b_lemma)
    na, nb = np.linalg.norm(va), np.linalg.norm(vb)
    if na == 0 or nb == 0:
        return 0.0
    return min(1.0, max(0.0, float(np.dot(va, vb) / (na * nb))))


def _jaccard(a_set, b_set):
    union = len(a_set | b_set)
    if union == 0:
        return 0.0
    return len(a_set & b_set) / union


def pos_pair_key(pos_a, pos_b):
    """Canonical name for an unordered POS tag pair."""
    lo, hi = sorted((pos_a, pos_b))
    return f"{lo}|{hi}"


class FeatureExtractor:
    """Maps a mention pair to a fixed-length similarity feature vector."""

    def __init__(self, pos_pairs):
        self.pos_pairs = tuple(sorted(set(pos_pairs)))
        names = ["head_match"]
        names += [f"pos_pair={p}" for p in self.pos_pairs]
        names.append("pos_pair=other")
        names += list(_SIM_FEATURES)
        for role in ARGUMENT_ROLES:
            names.append(f"{role}_tf_cosine")
            names.append(f"{role}_both_present")
        names.append("bias")
        self.feature_names = tuple(names)
        self.feature_index = {name: k for k, name in enumerate(names)}

    @staticmethod
    def from_corpus(corpus):
        """Collect the POS-pair vocabulary from all mention pairs of a corpus."""
        tags = sorted({m.head_pos for d in corpus.documents for m in d.mentions})
        pairs = {pos_pair_key(a, b) for a in tags for b in tags}
        return FeatureExtractor(pairs)

    @staticmethod
    def from_feature_index(feature_index):
        """Rebuild an extractor from a saved feature name -> index map."""
        pairs = [
            name.split("=", 1)[1]
            for name in feature_index
            if name.startswith("pos_pair=") and name != "pos_pair=other"
        ]
        extractor = FeatureExtractor(pairs)
        if extractor.feature_index != dict(feature_index):
            raise ValueError("feature index map does not match this extractor layout")
        return extractor

    def __len__(self):
        return len(self.feature_names)

    def extract(self, a, b, resources):
        """Symmetric feature vector for mentions a and b."""
        out = np.zeros(len(self.feature_names))
        idx = self.feature_index
        if a.head_lemma == b.head_lemma:
            out[idx["head_match"]] = 1.0
        key = f"pos_pair={pos_pair_key(a.head_pos, b.head_pos)}"
        out[idx.get(key, idx["pos_pair=other"])] = 1.0
        out[idx["head_embedding_cosine"]] = _embedding_cosine(resources, a.head_lemma, b.head_lemma)
        out[idx["span_tf_cosine"]] = _tf_cosine(a.span_lemmas, b.span_lemmas)
        out[idx["synonym_jaccard"]] = _jaccard(
            resources.synonym_set(a.head_lemma), resources.synonym_set(b.head_lemma)
        )
        out[idx["context_tf_cosine"]] = _tf_cosine(a.context_lemmas, b.context_lemmas)
        for role in ARGUMENT_ROLES:
            la, lb = a.argument_lemmas(role), b.argument_lemmas(role)
            if la and lb:
                out[idx[f"{role}_both_present"]] = 1.0
                out[idx[f"{role}_tf_cosine"]] = _tf_cosine(la, lb)
        out[idx["bias"]] = 1.0
        return out
