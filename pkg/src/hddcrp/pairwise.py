"""Log-linear mention-pair similarity model and the distances built from it.

The model scores a pair as the logistic value of a weighted feature sum.
Within one document the distance between a mention and an earlier one is that
similarity, truncated to 0 below a threshold (inclusive passthrough at the
threshold itself).  Across documents the truncated similarity is additionally
scaled by exp(gamma * document cosine similarity).

Training maximizes sum_i log sigmoid(y_i * theta . x_i) - l2 * ||theta||^2
over labeled pairs with y in {+1, -1}; the objective is strictly concave, so
the optimum is unique and the fit deterministic from a zero start.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit

from .corpus import doc_similarity
from .errors import InputError
from .features import FeatureExtractor


@dataclass(frozen=True)
class TrainingPair:
    a: str
    b: str
    coreferent: bool

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("a training pair needs two distinct mentions")


def build_training_pairs(corpus, sigma=0.4):
    """Labeled mention pairs: all within-document ordered pairs (each later
    mention against each earlier one) plus every cross-document pair once,
    restricted to document pairs with cosine similarity at least sigma."""
    if corpus.gold is None:
        raise InputError("training requires gold chains")
    chain_of = corpus.gold.chain_of()

    def coreferent(a, b):
        ka = chain_of.get(a.mention_id)
        return ka is not None and ka == chain_of.get(b.mention_id)

    pairs = []
    for d in sorted(corpus.documents, key=lambda d: d.doc_id):
        for i, a in enumerate(d.mentions):
            for b in d.mentions[:i]:
                pairs.append(TrainingPair(a.mention_id, b.mention_id, coreferent(a, b)))
    docs = sorted(corpus.documents, key=lambda d: d.doc_id)
    for i, d in enumerate(docs):
        for d2 in docs[i + 1 :]:
            if doc_similarity(d, d2) < sigma:
                continue
            for a in d.mentions:
                for b in d2.mentions:
                    pairs.append(TrainingPair(a.mention_id, b.mention_id, coreferent(a, b)))
    return pairs


def penalized_loglik(theta, features, labels, l2):
    """sum log sigmoid(y * theta . x) - l2 * ||theta||^2."""
    margins = labels * (features @ theta)
    return float(-np.logaddexp(0.0, -margins).sum() - l2 * theta @ theta)


def penalized_grad(theta, features, labels, l2):
    margins = labels * (features @ theta)
    return features.T @ (labels * expit(-margins)) - 2.0 * l2 * theta


def fit_theta(features, labels, l2, gtol=1e-6, max_iter=10000):
    """Maximize the penalized log likelihood from a zero start."""

    def objective(theta):
        return -penalized_loglik(theta, features, labels, l2), -penalized_grad(
            theta, features, labels, l2
        )

    result = minimize(
        objective,
        np.zeros(features.shape[1]),
        jac=True,
        method="L-BFGS-B",
        options={"gtol": gtol, "ftol": 1e-14, "maxiter": max_iter, "maxfun": 10 * max_iter},
    )
    return result.x


@dataclass(frozen=True)
class PairwiseModel:
    """Trained weights plus the extractor and distance hyperparameters."""

    theta: np.ndarray
    extractor: FeatureExtractor
    l2_strength: float = 1.0
    truncation_threshold: float = 0.5
    gamma: float = 1.0

    def __post_init__(self):
        if self.theta.shape != (len(self.extractor),):
            raise InputError(
                f"weight vector has {self.theta.shape[0]} entries, "
                f"feature map has {len(self.extractor)}"
            )
        if not np.isfinite(self.theta).all():
            raise InputError("weight vector contains non-finite values")

    def pair_similarity(self, a, b, resources):
        """Logistic similarity in (0, 1); symmetric in a and b."""
        return float(expit(self.theta @ self.extractor.extract(a, b, resources)))

    def truncated_similarity(self, a, b, resources):
        sim = self.pair_similarity(a, b, resources)
        return sim if sim >= self.truncation_threshold else 0.0

    def within_doc_distance(self, a, b, resources):
        """Prior weight for linking mention a to the earlier mention b."""
        if a.doc_id != b.doc_id:
            raise ValueError("within-document distance across documents")
        if b.order_index >= a.order_index:
            raise ValueError("antecedent must precede the linking mention")
        return self.truncated_similarity(a, b, resources)

    def cross_doc_distance(self, a, b, doc_a, doc_b, resources):
        """Prior weight for a table link between mentions of two documents."""
        if a.doc_id == b.doc_id:
            raise ValueError("cross-document distance within one document")
        sim = self.truncated_similarity(a, b, resources)
        if sim == 0.0:
            return 0.0
        return float(np.exp(self.gamma * doc_similarity(doc_a, doc_b))) * sim


def train(
    corpus,
    resources,
    l2=1.0,
    sigma=0.4,
    truncation_threshold=0.5,
    gamma=1.0,
    extractor=None,
    pairs=None,
    gtol=1e-6,
    max_iter=10000,
):
    """Fit a PairwiseModel on a gold-annotated corpus."""
    if extractor is None:
        extractor = FeatureExtractor.from_corpus(corpus)
    if pairs is None:
        pairs = build_training_pairs(corpus, sigma)
    if not pairs:
        raise InputError("no training pairs (corpus too small or sigma too high)")
    features = np.array(
        [
            extractor.extract(corpus.mention(p.a), corpus.mention(p.b), resources)
            for p in pairs
        ]
    )
    labels = np.array([1.0 if p.coreferent else -1.0 for p in pairs])
    if not np.isfinite(features).all():
        raise InputError("non-finite feature values in training data")
    if len(np.unique(labels)) < 2:
        raise InputError("training pairs all carry the same label")
    theta = fit_theta(features, labels, l2, gtol, max_iter)
    return PairwiseModel(theta, extractor, l2, truncation_threshold, gamma)


def pair_accuracy(model, corpus, resources, pairs):
    """Fraction of pairs whose 0.5-thresholded similarity matches the label."""
    good = 0
    for p in pairs:
        sim = model.pair_similarity(corpus.mention(p.a), corpus.mention(p.b), resources)
        good += (sim >= 0.5) == p.coreferent
    return good / len(pairs)


def save_model(model, path, config=None):
    obj = {
        "theta": [float(v) for v in model.theta],
        "feature_index": {k: model.extractor.feature_index[k] for k in model.extractor.feature_names},
        "l2": model.l2_strength,
        "truncation_threshold": model.truncation_threshold,
        "gamma": model.gamma,
    }
    if config is not None:
        obj["config"] = config
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        obj = json.load(fh)
    try:
        extractor = FeatureExtractor.from_feature_index(obj["feature_index"])
        theta = np.array([float(v) for v in obj["theta"]])
        return PairwiseModel(
            theta,
            extractor,
            float(obj.get("l2", 1.0)),
            float(obj.get("truncation_threshold", 0.5)),
            float(obj.get("gamma", 1.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed model file ({exc})") from exc
