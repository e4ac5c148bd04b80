import math

import numpy as np
import pytest
from scipy.special import expit

from hddcrp.corpus import Corpus, Document, Mention, doc_similarity
from hddcrp.errors import InputError
from hddcrp.pairwise import (
    PairwiseModel,
    build_training_pairs,
    fit_theta,
    load_model,
    pair_accuracy,
    penalized_grad,
    penalized_loglik,
    save_model,
    train,
)


class TestTrainingPairs:
    def test_pair_counts_on_the_synthetic_corpus(self, synthetic_corpus):
        pairs = build_training_pairs(synthetic_corpus, sigma=0.4)
        by_doc = {d.doc_id: len(d.mentions) for d in synthetic_corpus.documents}
        within = sum(n * (n - 1) // 2 for n in by_doc.values())
        assert within == 114
        # cross-document pairs survive only inside a topic: 7*6 + 7*6 + 7*7
        assert len(pairs) == within + 42 + 42 + 49 == 247
        assert sum(p.coreferent for p in pairs) == 62

    def test_within_pairs_are_ordered_later_to_earlier(self, synthetic_corpus):
        pairs = build_training_pairs(synthetic_corpus, sigma=0.4)
        mentions = {m.mention_id: m for m in synthetic_corpus.mentions_in_order()}
        for p in pairs:
            a, b = mentions[p.a], mentions[p.b]
            if a.doc_id == b.doc_id:
                assert a.order_index > b.order_index

    def test_cross_pairs_appear_once_and_respect_sigma(self, synthetic_corpus):
        pairs = build_training_pairs(synthetic_corpus, sigma=0.4)
        mentions = {m.mention_id: m for m in synthetic_corpus.mentions_in_order()}
        docs = {d.doc_id: d for d in synthetic_corpus.documents}
        seen = set()
        for p in pairs:
            a, b = mentions[p.a], mentions[p.b]
            key = frozenset((p.a, p.b))
            assert key not in seen
            seen.add(key)
            if a.doc_id != b.doc_id:
                assert doc_similarity(docs[a.doc_id], docs[b.doc_id]) >= 0.4

    def test_raising_sigma_drops_all_cross_pairs(self, synthetic_corpus):
        pairs = build_training_pairs(synthetic_corpus, sigma=1.1)
        assert len(pairs) == 114

    def test_gold_chains_are_required(self, synthetic_corpus):
        bare = Corpus(synthetic_corpus.documents)
        with pytest.raises(InputError):
            build_training_pairs(bare, sigma=0.4)


class TestObjective:
    def rand_problem(self, rng, n=40, d=6):
        x = rng.normal(size=(n, d))
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        return x, y

    def test_gradient_matches_central_differences(self):
        rng = np.random.default_rng(41)
        x, y = self.rand_problem(rng)
        for _ in range(5):
            theta = rng.normal(scale=0.8, size=x.shape[1])
            grad = penalized_grad(theta, x, y, l2=0.7)
            h = 1e-6
            for k in range(len(theta)):
                step = np.zeros_like(theta)
                step[k] = h
                fd = (
                    penalized_loglik(theta + step, x, y, 0.7)
                    - penalized_loglik(theta - step, x, y, 0.7)
                ) / (2 * h)
                assert math.isclose(grad[k], fd, rel_tol=1e-5, abs_tol=1e-8)

    def test_l2_penalty_shrinks_the_optimum(self):
        rng = np.random.default_rng(42)
        x, y = self.rand_problem(rng)
        loose = fit_theta(x, y, l2=0.01)
        tight = fit_theta(x, y, l2=10.0)
        assert np.linalg.norm(tight) < np.linalg.norm(loose)

    def test_fit_is_deterministic(self):
        rng = np.random.default_rng(43)
        x, y = self.rand_problem(rng)
        assert np.array_equal(fit_theta(x, y, 1.0), fit_theta(x, y, 1.0))


class TestTrainedModel:
    def test_separable_fixture_reaches_high_accuracy(
        self, synthetic_corpus, resources, trained_model
    ):
        pairs = build_training_pairs(synthetic_corpus, sigma=0.4)
        acc = pair_accuracy(trained_model, synthetic_corpus, resources, pairs)
        assert acc >= 0.99

    def test_similarities_separate_coreferent_from_ambiguous(
        self, synthetic_corpus, resources, trained_model
    ):
        m = {x.mention_id: x for x in synthetic_corpus.mentions_in_order()}
        coref = trained_model.pair_similarity(m["doc01-m0"], m["doc01-m2"], resources)
        ambiguous = trained_model.pair_similarity(m["doc01-m0"], m["doc01-m1"], resources)
        assert coref > 0.9 and ambiguous < 0.1

    def test_truncation_zeroes_low_similarities(
        self, synthetic_corpus, resources, trained_model
    ):
        order = synthetic_corpus.mentions_in_order()
        rng = np.random.default_rng(44)
        for _ in range(50):
            i, j = rng.choice(len(order), 2, replace=False)
            sim = trained_model.pair_similarity(order[i], order[j], resources)
            got = trained_model.truncated_similarity(order[i], order[j], resources)
            assert got == (sim if sim >= 0.5 else 0.0)

    def test_zero_weights_sit_exactly_on_the_threshold(
        self, synthetic_corpus, resources, trained_model
    ):
        # theta = 0 gives similarity 0.5 everywhere, which the cutoff keeps
        flat = PairwiseModel(
            np.zeros_like(trained_model.theta), trained_model.extractor
        )
        order = synthetic_corpus.mentions_in_order()
        assert flat.truncated_similarity(order[0], order[1], resources) == 0.5

    def test_within_doc_distance_requires_later_to_earlier(
        self, synthetic_corpus, resources, trained_model
    ):
        m = {x.mention_id: x for x in synthetic_corpus.mentions_in_order()}
        ok = trained_model.within_doc_distance(m["doc01-m2"], m["doc01-m0"], resources)
        assert 0.0 <= ok <= 1.0
        with pytest.raises(ValueError):
            trained_model.within_doc_distance(m["doc01-m0"], m["doc01-m2"], resources)
        with pytest.raises(ValueError):
            trained_model.within_doc_distance(m["doc01-m0"], m["doc02-m0"], resources)

    def test_cross_doc_distance_combines_doc_similarity_and_truncation(
        self, synthetic_corpus, resources, trained_model
    ):
        m = {x.mention_id: x for x in synthetic_corpus.mentions_in_order()}
        docs = {d.doc_id: d for d in synthetic_corpus.documents}
        a, b = m["doc01-m0"], m["doc02-m0"]
        got = trained_model.cross_doc_distance(a, b, docs["doc01"], docs["doc02"], resources)
        trunc = trained_model.truncated_similarity(a, b, resources)
        want = math.exp(
            trained_model.gamma * doc_similarity(docs["doc01"], docs["doc02"])
        ) * trunc
        assert math.isclose(got, want, rel_tol=1e-12)
        with pytest.raises(ValueError):
            trained_model.cross_doc_distance(a, m["doc01-m1"], docs["doc01"], docs["doc01"], resources)

    def test_pair_similarity_is_the_logistic_of_the_score(
        self, synthetic_corpus, resources, trained_model
    ):
        order = synthetic_corpus.mentions_in_order()
        f = trained_model.extractor.extract(order[0], order[1], resources)
        want = float(expit(trained_model.theta @ f))
        got = trained_model.pair_similarity(order[0], order[1], resources)
        assert math.isclose(got, want, rel_tol=1e-12)


class TestPersistence:
    def test_save_load_round_trip_is_exact(
        self, synthetic_corpus, resources, trained_model, tmp_path
    ):
        path = tmp_path / "model.json"
        save_model(trained_model, path)
        again = load_model(path)
        assert np.array_equal(again.theta, trained_model.theta)
        assert again.extractor.feature_names == trained_model.extractor.feature_names
        assert again.l2_strength == trained_model.l2_strength
        assert again.truncation_threshold == trained_model.truncation_threshold
        assert again.gamma == trained_model.gamma
        order = synthetic_corpus.mentions_in_order()
        assert again.pair_similarity(order[0], order[3], resources) == (
            trained_model.pair_similarity(order[0], order[3], resources)
        )

    def test_malformed_model_file_reports_input_error(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"theta": "oops"}', encoding="utf-8")
        with pytest.raises(InputError):
            load_model(path)


class TestTrainValidation:
    def test_single_class_corpus_rejected(self):
        mentions = [
            Mention("d-m0", "d", 0, "x", "NN", ("x",), (), {}),
            Mention("d-m1", "d", 1, "x", "NN", ("x",), (), {}),
        ]
        doc = Document.build("d", "ev", mentions)
        from hddcrp.corpus import GoldChains, LexicalResources

        corpus = Corpus((doc,), GoldChains((frozenset({"d-m0", "d-m1"}),)))
        with pytest.raises(InputError):
            train(corpus, LexicalResources())
