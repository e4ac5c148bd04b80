import json

import pytest

from hddcrp.cli import main
from hddcrp.corpus import Corpus, Document, GoldChains, Mention, save_corpus
from hddcrp.data import (
    synthetic_corpus_path,
    synthetic_embeddings_path,
    synthetic_synonyms_path,
    tiny_corpus_path,
)
from hddcrp.pairwise import load_model


@pytest.fixture(autouse=True)
def scrub_seed_env(monkeypatch):
    monkeypatch.delenv("HDDCRP_SEED", raising=False)


@pytest.fixture(scope="module")
def model_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("model") / "model.json"
    code = main(
        [
            "train-distance",
            "--corpus", str(synthetic_corpus_path()),
            "--embeddings", str(synthetic_embeddings_path()),
            "--synonyms", str(synthetic_synonyms_path()),
            "-o", str(out),
        ]
    )
    assert code == 0
    return out


def run(argv):
    return main([str(a) for a in argv])


class TestTrainDistance:
    def test_writes_model_and_feature_sidecar(self, model_file, capsys):
        model = load_model(model_file)
        assert len(model.theta) == len(model.extractor.feature_names)
        sidecar = model_file.with_suffix(".features.json")
        obj = json.loads(sidecar.read_text(encoding="utf-8"))
        assert obj["feature_index"] == {
            name: k for k, name in enumerate(model.extractor.feature_names)
        }
        assert obj["config"]["command"] == "train-distance"

    def test_logs_sigma_and_held_out_accuracy(self, tmp_path, capsys):
        code = run(
            [
                "train-distance",
                "--corpus", synthetic_corpus_path(),
                "--embeddings", synthetic_embeddings_path(),
                "--synonyms", synthetic_synonyms_path(),
                "-o", tmp_path / "m.json",
            ]
        )
        out = capsys.readouterr().out
        assert code == 0
        assert "sigma=0.4" in out
        assert "held-out pair accuracy" in out

    def test_missing_gold_exits_with_input_error(self, tmp_path, capsys):
        mentions = [Mention("d-m0", "d", 0, "x", "NN", ("x",), (), {})]
        corpus = Corpus((Document.build("d", "ev", mentions),))
        path = tmp_path / "nogold.jsonl"
        save_corpus(corpus, path)
        code = run(["train-distance", "--corpus", path, "-o", tmp_path / "m.json"])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_reruns_are_byte_identical(self, tmp_path):
        argv = [
            "train-distance",
            "--corpus", synthetic_corpus_path(),
            "--embeddings", synthetic_embeddings_path(),
            "--synonyms", synthetic_synonyms_path(),
            "-o", tmp_path / "m.json",
        ]
        assert run(argv) == 0
        first = (tmp_path / "m.json").read_bytes()
        assert run(argv) == 0
        assert (tmp_path / "m.json").read_bytes() == first


class TestSample:
    def test_writes_clusterings_and_traces_per_chain(self, model_file, tmp_path, capsys):
        out = tmp_path / "run"
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--embeddings", synthetic_embeddings_path(),
                "--synonyms", synthetic_synonyms_path(),
                "--distance-model", model_file,
                "--model", "hddcrp",
                "--iterations", 20,
                "--chains", 2,
                "--seed", 5,
                "--output-dir", out,
            ]
        )
        assert code == 0
        for k in range(2):
            clustering = json.loads((out / f"chain-0{k}.clustering.json").read_text())
            assert clustering["chain"] == k
            assert len(clustering["assignment"]) == 40
            assert clustering["config"]["seed"] == 5
            assert clustering["config"]["alpha_0"] == 0.001
            trace = (out / f"chain-0{k}.trace.csv").read_text().splitlines()
            assert trace[0].startswith("# config: ")
            assert trace[1] == "iteration,joint_log_score"
            assert len(trace) == 2 + 20

    def test_embedded_alpha_0_tracks_the_model_default(self, model_file, tmp_path):
        for name, alpha in (("hddcrp-star", 1.0), ("ddcrp", 0.1)):
            out = tmp_path / name
            code = run(
                [
                    "sample",
                    "--corpus", synthetic_corpus_path(),
                    "--embeddings", synthetic_embeddings_path(),
                    "--synonyms", synthetic_synonyms_path(),
                    "--distance-model", model_file,
                    "--model", name,
                    "--iterations", 5,
                    "--chains", 1,
                    "--output-dir", out,
                ]
            )
            assert code == 0
            clustering = json.loads((out / "chain-00.clustering.json").read_text())
            assert clustering["config"]["alpha_0"] == alpha

    def test_hdp_lex_runs_without_a_distance_model(self, tmp_path):
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--model", "hdp-lex",
                "--iterations", 5,
                "--chains", 1,
                "--output-dir", tmp_path / "hdp",
            ]
        )
        assert code == 0

    def test_distance_based_models_require_a_model_file(self, tmp_path, capsys):
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--model", "hddcrp",
                "--output-dir", tmp_path / "x",
            ]
        )
        assert code == 2
        assert "--distance-model" in capsys.readouterr().err

    def test_uniform_distances_escape_hatch(self, tmp_path):
        code = run(
            [
                "sample",
                "--corpus", tiny_corpus_path(),
                "--model", "hddcrp",
                "--uniform-distances",
                "--iterations", 10,
                "--chains", 1,
                "--output-dir", tmp_path / "u",
            ]
        )
        assert code == 0

    def test_unknown_model_name_is_a_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run(["sample", "--corpus", synthetic_corpus_path(), "--model", "bogus"])
        assert err.value.code == 2


class TestConfigPrecedence:
    def test_config_file_fills_unset_options(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps({"iterations": 7, "seed": 3, "model": "hdp-lex"}),
            encoding="utf-8",
        )
        out = tmp_path / "out"
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--config", cfg,
                "--chains", 1,
                "--output-dir", out,
            ]
        )
        assert code == 0
        clustering = json.loads((out / "chain-00.clustering.json").read_text())
        assert clustering["config"]["iterations"] == 7
        assert clustering["config"]["seed"] == 3

    def test_flags_beat_the_config_file(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"iterations": 7, "model": "hdp-lex"}), encoding="utf-8")
        out = tmp_path / "out"
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--config", cfg,
                "--iterations", 4,
                "--chains", 1,
                "--output-dir", out,
            ]
        )
        assert code == 0
        clustering = json.loads((out / "chain-00.clustering.json").read_text())
        assert clustering["config"]["iterations"] == 4

    def test_seed_env_var_sits_between_flag_and_config(self, tmp_path, monkeypatch):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"seed": 3, "model": "hdp-lex"}), encoding="utf-8")
        monkeypatch.setenv("HDDCRP_SEED", "11")
        out = tmp_path / "env"
        run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--config", cfg,
                "--iterations", 3, "--chains", 1,
                "--output-dir", out,
            ]
        )
        clustering = json.loads((out / "chain-00.clustering.json").read_text())
        assert clustering["config"]["seed"] == 11
        out2 = tmp_path / "flag"
        run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--config", cfg,
                "--seed", 4,
                "--iterations", 3, "--chains", 1,
                "--output-dir", out2,
            ]
        )
        clustering = json.loads((out2 / "chain-00.clustering.json").read_text())
        assert clustering["config"]["seed"] == 4

    def test_non_integer_seed_env_is_an_input_error(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("HDDCRP_SEED", "pi")
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--model", "hdp-lex",
                "--output-dir", tmp_path / "x",
            ]
        )
        assert code == 2

    def test_unknown_config_keys_are_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"iterationz": 7}), encoding="utf-8")
        code = run(
            [
                "sample",
                "--corpus", synthetic_corpus_path(),
                "--config", cfg,
                "--model", "hdp-lex",
            ]
        )
        assert code == 2
        assert "iterationz" in capsys.readouterr().err


class TestBaselineAndScore:
    def gold_equals_lemma_corpus(self, tmp_path):
        """Chains follow head lemmas exactly, so the lemma baseline is perfect."""
        docs = []
        chains = {"x": [], "y": []}
        for d, heads in (("d1", ["x", "y", "x"]), ("d2", ["x", "y", "y"])):
            mentions = []
            for k, head in enumerate(heads):
                mid = f"{d}-m{k}"
                mentions.append(Mention(mid, d, k, head, "NN", (head,), (), {}))
                chains[head].append(mid)
            docs.append(Document.build(d, "ev", mentions))
        corpus = Corpus(
            tuple(docs), GoldChains(tuple(frozenset(c) for c in chains.values()))
        )
        path = tmp_path / "lemma_gold.jsonl"
        save_corpus(corpus, path)
        return path

    def test_lemma_baseline_scores_perfectly_when_gold_matches(self, tmp_path, capsys):
        corpus = self.gold_equals_lemma_corpus(tmp_path)
        clustering = tmp_path / "lemma.json"
        assert run(["baseline", "--corpus", corpus, "--method", "lemma", "-o", clustering]) == 0
        report_path = tmp_path / "report.json"
        assert run(["score", "--corpus", corpus, clustering, "-o", report_path]) == 0
        report = json.loads(report_path.read_text(encoding="utf-8"))
        assert report["reports"]["WD"]["conll_f1"] == 1.0
        assert report["reports"]["CD"]["conll_f1"] == 1.0

    def test_scoring_identical_clusterings_averages_to_the_same_report(
        self, model_file, tmp_path
    ):
        corpus = self.gold_equals_lemma_corpus(tmp_path)
        clustering = tmp_path / "lemma.json"
        run(["baseline", "--corpus", corpus, "--method", "lemma", "-o", clustering])
        single = tmp_path / "one.json"
        run(["score", "--corpus", corpus, clustering, "-o", single])
        five = tmp_path / "five.json"
        run(["score", "--corpus", corpus] + [clustering] * 5 + ["-o", five])
        one = json.loads(single.read_text())["reports"]
        many = json.loads(five.read_text())["reports"]
        assert one == many

    def test_agglomerative_baseline_requires_a_distance_model(self, tmp_path, capsys):
        code = run(
            [
                "baseline",
                "--corpus", synthetic_corpus_path(),
                "--method", "agglomerative",
                "-o", tmp_path / "agg.json",
            ]
        )
        assert code == 2

    def test_agglomerative_baseline_runs_with_a_model(self, model_file, tmp_path):
        out = tmp_path / "agg.json"
        code = run(
            [
                "baseline",
                "--corpus", synthetic_corpus_path(),
                "--method", "agglomerative",
                "--distance-model", model_file,
                "--embeddings", synthetic_embeddings_path(),
                "--synonyms", synthetic_synonyms_path(),
                "-o", out,
            ]
        )
        assert code == 0
        obj = json.loads(out.read_text(encoding="utf-8"))
        assert obj["method"] == "agglomerative"
        assert len(obj["assignment"]) == 40

    def test_score_accepts_bare_mapping_files(self, tmp_path):
        corpus = self.gold_equals_lemma_corpus(tmp_path)
        bare = tmp_path / "bare.json"
        bare.write_text(
            json.dumps(
                {"d1-m0": 0, "d1-m2": 0, "d2-m0": 0, "d1-m1": 1, "d2-m1": 1, "d2-m2": 1}
            ),
            encoding="utf-8",
        )
        report = tmp_path / "report.json"
        assert run(["score", "--corpus", corpus, bare, "-o", report]) == 0
        got = json.loads(report.read_text(encoding="utf-8"))
        assert got["reports"]["CD"]["conll_f1"] == 1.0

    def test_universe_mismatch_exits_three(self, tmp_path, capsys):
        corpus = self.gold_equals_lemma_corpus(tmp_path)
        foreign = tmp_path / "foreign.json"
        foreign.write_text(json.dumps({"z-m0": 0}), encoding="utf-8")
        assert run(["score", "--corpus", corpus, foreign]) == 3

    def test_single_setting_flag_limits_the_report(self, tmp_path):
        corpus = self.gold_equals_lemma_corpus(tmp_path)
        clustering = tmp_path / "lemma.json"
        run(["baseline", "--corpus", corpus, "--method", "lemma", "-o", clustering])
        report = tmp_path / "cd_only.json"
        run(["score", "--corpus", corpus, clustering, "--setting", "CD", "-o", report])
        got = json.loads(report.read_text(encoding="utf-8"))
        assert list(got["reports"]) == ["CD"]


class TestOraclePosterior:
    def test_posterior_file_sums_to_one_and_is_sorted(self, tmp_path):
        out = tmp_path / "posterior.json"
        code = run(
            [
                "oracle-posterior",
                "--corpus", tiny_corpus_path(),
                "--uniform-distances",
                "--top", 3,
                "-o", out,
            ]
        )
        assert code == 0
        obj = json.loads(out.read_text(encoding="utf-8"))
        probs = [row["probability"] for row in obj["posterior"]]
        assert abs(sum(probs) - 1.0) < 1e-9
        assert probs == sorted(probs, reverse=True)
        assert obj["config"]["alpha_0"] == 0.001

    def test_rejects_models_without_exact_enumeration(self, tmp_path, capsys):
        code = run(
            [
                "oracle-posterior",
                "--corpus", tiny_corpus_path(),
                "--uniform-distances",
                "--model", "hdp-lex",
            ]
        )
        assert code == 2
