"""Tests for the cli module."""

import json
from unittest.mock import patch

import pytest

from src.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from src.config import CONFIG_ENV_VAR
from src.corpus_io import read_jsonl
from src.errors import TrainingDivergedError
from src.relevance_nn import load_model
from src.schemas import MergedRecord, PremiseRecord, QAPair, RelevanceExample


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def pfv(toy_a, tmp_path):
    return toy_a.write_features(tmp_path)


def corpus_args(corpus, pfv):
    return [
        "--objects", str(corpus.objects_path),
        "--attributes", str(corpus.attributes_path),
        "--features", str(pfv),
    ]


def build(corpus, pfv, out, *extra):
    argv = ["build-qrpe", "--in", str(corpus.questions_path), *corpus_args(corpus, pfv)]
    return main([*argv, "--out", str(out), *extra])


def table_row(text, label):
    """Cells of the box-table row whose first cell is ``label``."""
    row = next(line for line in text.splitlines() if f"│ {label}" in line)
    return [cell.strip() for cell in row.strip().strip("│").split("│")]


class TestUsage:
    """Tests for argument errors."""

    def test_unknown_command(self, capsys):
        assert main(["bogus"]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err

    def test_missing_required_flag(self, toy_a):
        assert main(["extract", "--in", str(toy_a.questions_path)]) == EXIT_USAGE

    def test_bad_choice(self, tmp_path):
        argv = ["augment", "--in", "a", "--source", "b", "--strategy", "most", "--out", "c"]
        assert main(argv) == EXIT_USAGE


class TestDataErrors:
    """Tests for data errors mapped to exit code 2."""

    def test_missing_input(self, tmp_path, capsys):
        absent = tmp_path / "absent.jsonl"
        code = main(["extract", "--in", str(absent), "--out", str(tmp_path / "o")])
        assert code == EXIT_DATA
        assert "Error:" in capsys.readouterr().err

    def test_missing_feature_file(self, toy_a, tmp_path):
        code = build(toy_a, tmp_path / "absent.pfv", tmp_path / "tuples.jsonl")
        assert code == EXIT_DATA

    def test_malformed_corpus(self, write_lines, tmp_path, capsys):
        path = write_lines("q.jsonl", ['{"question_id": 1}'])
        assert main(["extract", "--in", str(path), "--out", str(tmp_path / "o")]) == EXIT_DATA
        assert "q.jsonl:1" in capsys.readouterr().err

    def test_invalid_threshold(self, toy_a, tmp_path):
        argv = ["generate", "--in", str(toy_a.questions_path), "--out", str(tmp_path / "qa.jsonl")]
        assert main([*argv, "--threshold", "1.5"]) == EXIT_DATA

    def test_stats_needs_input(self):
        assert main(["stats"]) == EXIT_DATA

    def test_unknown_question_id(self, toy_a, pfv, write_lines, tmp_path, capsys):
        examples = write_lines(
            "examples.jsonl", ['{"question_id": 999999, "image_id": 1, "label": 1}']
        )
        argv = ["train", "--kind", "RelQ", "--in", str(examples), "--questions"]
        argv += [str(toy_a.questions_path), "--features", str(pfv)]
        assert main([*argv, "--model", str(tmp_path / "relq.pmlp")]) == EXIT_DATA
        assert "unknown question id 999999" in capsys.readouterr().err

    def test_caption_kind_without_caption(self, toy_a, write_lines, tmp_path, capsys):
        question = toy_a.questions[0]
        record = {"question_id": question.question_id, "image_id": question.image_id, "label": 1}
        examples = write_lines("examples.jsonl", [json.dumps(record)])
        argv = ["train", "--kind", "CapQC", "--in", str(examples)]
        argv += ["--questions", str(toy_a.questions_path)]
        assert main([*argv, "--model", str(tmp_path / "capqc.pmlp")]) == EXIT_DATA
        assert f"no caption for image {question.image_id}" in capsys.readouterr().err


class TestExtract:
    """Tests for the extract command."""

    def test_writes_premises(self, toy_a, tmp_path):
        out = tmp_path / "premises.jsonl"
        assert main(["extract", "--in", str(toy_a.questions_path), "--out", str(out)]) == EXIT_OK
        records = read_jsonl(out, PremiseRecord)
        assert [p.canonical() for p in records[1].premises] == ["<car>", "<car, red>"]

    def test_non_strict(self, toy_b, tmp_path):
        out = tmp_path / "premises.jsonl"
        argv = ["extract", "--in", str(toy_b.questions_path), "--out", str(out), "--no-strict"]
        assert main(argv) == EXIT_OK
        by_id = {r.question_id: r for r in read_jsonl(out, PremiseRecord)}
        assert [p.canonical() for p in by_id[12].premises] == ["<kite>"]


class TestBuildQrpe:
    """Tests for the build-qrpe command."""

    @pytest.mark.parametrize("name", ["toy_a", "toy_b", "toy_c"])
    def test_output_matches_expected_file(self, name, request, tmp_path):
        corpus = request.getfixturevalue(name)
        features = corpus.write_features(tmp_path)
        out = tmp_path / "tuples.jsonl"
        assert build(corpus, features, out) == EXIT_OK
        assert out.read_text(encoding="utf-8") == corpus.expected_path.read_text(encoding="utf-8")

    def test_workers_give_identical_bytes(self, toy_a, pfv, tmp_path):
        single, threaded = tmp_path / "one.jsonl", tmp_path / "two.jsonl"
        assert build(toy_a, pfv, single) == EXIT_OK
        assert build(toy_a, pfv, threaded, "--workers", "2") == EXIT_OK
        assert single.read_bytes() == threaded.read_bytes()

    def test_report_and_example_files(self, toy_a, pfv, tmp_path, capsys):
        stats = tmp_path / "stats.txt"
        examples = tmp_path / "examples.jsonl"
        fpd = tmp_path / "fpd.jsonl"
        code = build(
            toy_a, pfv, tmp_path / "tuples.jsonl",
            "--out-stats", str(stats), "--examples-out", str(examples), "--fpd-out", str(fpd),
        )
        assert code == EXIT_OK
        assert "Total tuples: 5" in capsys.readouterr().out
        assert "Total tuples: 5" in stats.read_text(encoding="utf-8")
        relevance = read_jsonl(examples, RelevanceExample)
        assert len(relevance) == 10
        assert sum(e.label for e in relevance) == 5
        assert all(e.premise is not None for e in read_jsonl(fpd, RelevanceExample))

    def test_single_question_text(self, toy_a, pfv, tmp_path):
        out = tmp_path / "tuples.jsonl"
        argv = ["build-qrpe", "--text", "Where is the bird?", "--image-id", "4"]
        assert main([*argv, *corpus_args(toy_a, pfv), "--out", str(out)]) == EXIT_OK
        (record,) = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert (record["premise"], record["neg_image"]) == ("<bird>", 1)


class TestGenerateAndStats:
    """Tests for generate, stats and augment."""

    @pytest.fixture
    def qa(self, toy_a, tmp_path):
        out = tmp_path / "qa.jsonl"
        assert main(["generate", "--in", str(toy_a.questions_path), "--out", str(out)]) == EXIT_OK
        return out

    def test_generated_pairs_never_answered_no(self, qa, capsys):
        capsys.readouterr()
        assert main(["stats", "--answer-types", str(qa)]) == EXIT_OK
        cells = table_row(capsys.readouterr().out, "Premise")
        assert cells[4] == "0"
        assert int(cells[5]) == len(read_jsonl(qa, QAPair))

    def test_tuple_stats_with_histogram(self, toy_a, pfv, tmp_path, capsys):
        histogram = tmp_path / "hist.txt"
        argv = [
            "stats", "--tuples", str(toy_a.expected_path), "--questions",
            str(toy_a.questions_path), "--histogram", str(histogram), "--features", str(pfv),
        ]
        assert main(argv) == EXIT_OK
        output = capsys.readouterr().out
        assert "Train / val tuples: 4 / 1" in output
        assert "PAIR DISTANCE COMPARISON" in output
        assert histogram.read_text(encoding="utf-8").startswith("# pairs=5")

    def test_augment(self, qa, toy_a, tmp_path):
        out = tmp_path / "merged.jsonl"
        argv = ["augment", "--in", str(qa), "--source", str(toy_a.questions_path)]
        assert main([*argv, "--strategy", "only-binary", "--out", str(out)]) == EXIT_OK
        merged = read_jsonl(out, MergedRecord)
        generated = [r for r in merged if r.provenance is not None]
        assert len(merged) - len(generated) == 4
        assert all(r.answer == "yes" for r in generated)
        assert [r.question_id for r in generated] == list(range(5, 5 + len(generated)))


class TestTrainEvalExplain:
    """Tests for the classifier commands."""

    @pytest.fixture
    def examples(self, toy_a, pfv, tmp_path):
        relevance, fpd = tmp_path / "examples.jsonl", tmp_path / "fpd.jsonl"
        code = build(
            toy_a, pfv, tmp_path / "tuples.jsonl",
            "--examples-out", str(relevance), "--fpd-out", str(fpd),
        )
        assert code == EXIT_OK
        return relevance, fpd

    def test_train_and_eval(self, toy_a, pfv, examples, tmp_path, capsys):
        relevance, _ = examples
        model = tmp_path / "relqp.pmlp"
        common = ["--in", str(relevance), "--questions", str(toy_a.questions_path)]
        argv = ["train", "--kind", "RelQP", *common, "--features", str(pfv), "--model", str(model)]
        assert main([*argv, "--epochs", "5", "--hidden", "8", "--seed", "3"]) == EXIT_OK
        _, card = load_model(model)
        assert card.layer_sizes[1:] == [8, 1]
        assert card.seed == 3

        report = tmp_path / "report.json"
        argv = ["eval", "--model", str(model), *common, "--features", str(pfv)]
        assert main([*argv, "--out", str(report)]) == EXIT_OK
        assert "EVALUATION REPORT (RelQP)" in capsys.readouterr().out
        data = json.loads(report.read_text(encoding="utf-8"))
        assert data["count"] == 10
        assert data["first_order_count"] == 6

    def test_training_reproducible(self, toy_a, pfv, examples, tmp_path):
        relevance, _ = examples
        paths = [tmp_path / "a.pmlp", tmp_path / "b.pmlp"]
        for path in paths:
            argv = ["train", "--kind", "RelQ", "--in", str(relevance), "--questions"]
            argv += [str(toy_a.questions_path), "--features", str(pfv), "--model", str(path)]
            assert main([*argv, "--epochs", "3", "--optimizer", "adam", "--lr", "0.01"]) == EXIT_OK
        assert paths[0].read_bytes() == paths[1].read_bytes()

    @patch("src.cli.train", side_effect=TrainingDivergedError(3, 0))
    def test_divergence_is_a_data_error(self, mock_train, pfv, examples, tmp_path, capsys):
        _, fpd = examples
        argv = ["train", "--kind", "FPD", "--in", str(fpd), "--features", str(pfv)]
        assert main([*argv, "--model", str(tmp_path / "fpd.pmlp")]) == EXIT_DATA
        assert mock_train.called
        assert "epoch 3" in capsys.readouterr().err
        assert not (tmp_path / "fpd.pmlp").exists()

    def test_config_file(self, toy_a, pfv, examples, tmp_path, write_lines):
        _, fpd = examples
        config = write_lines("run.cfg", ["training.epochs=2", "training.hidden=4"])
        model = tmp_path / "fpd.pmlp"
        argv = ["train", "--kind", "FPD", "--in", str(fpd), "--features", str(pfv)]
        assert main([*argv, "--model", str(model), "--config", str(config)]) == EXIT_OK
        _, card = load_model(model)
        assert card.layer_sizes[1:] == [4, 1]

    def test_explain_with_detector(self, toy_a, pfv, examples, tmp_path, capsys):
        _, fpd = examples
        model = tmp_path / "fpd.pmlp"
        argv = ["train", "--kind", "FPD", "--in", str(fpd), "--features", str(pfv)]
        assert main([*argv, "--model", str(model), "--epochs", "2"]) == EXIT_OK
        capsys.readouterr()
        argv = ["explain", "--model", str(model), "--features", str(pfv)]
        assert main([*argv, "--text", "Where is the dog?", "--image-id", "6"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines in (["relevant"], ["There is no dog in the image."])

    def test_explain_rejects_relevance_model(self, toy_a, pfv, examples, tmp_path):
        relevance, _ = examples
        model = tmp_path / "relq.pmlp"
        argv = ["train", "--kind", "RelQ", "--in", str(relevance), "--questions"]
        argv += [str(toy_a.questions_path), "--features", str(pfv), "--model", str(model)]
        assert main([*argv, "--epochs", "1"]) == EXIT_OK
        argv = ["explain", "--model", str(model), "--features", str(pfv)]
        assert main([*argv, "--text", "Where is the dog?", "--image-id", "6"]) == EXIT_DATA


class TestExplainWithAnnotations:
    """Tests for ground-truth explanations from the command line."""

    def test_plain_lines(self, toy_a, capsys):
        argv = ["explain", "--text", "Why is the big red dog old?", "--image-id", "5"]
        argv += ["--objects", str(toy_a.objects_path), "--attributes", str(toy_a.attributes_path)]
        assert main(argv) == EXIT_OK
        assert capsys.readouterr().out.splitlines() == [
            "The dog is not big.",
            "The dog is not old.",
        ]

    def test_jsonl_records(self, toy_a, tmp_path):
        out = tmp_path / "explanations.jsonl"
        argv = ["explain", "--in", str(toy_a.questions_path), "--jsonl", "--out", str(out)]
        argv += ["--objects", str(toy_a.objects_path), "--attributes", str(toy_a.attributes_path)]
        assert main(argv) == EXIT_OK
        # Every question is asked about its own image, where no premise is false.
        assert out.read_text(encoding="utf-8").strip() == ""


class TestNearest:
    """Tests for the nearest command."""

    def test_prints_best_match(self, toy_a, write_lines, capsys):
        embeddings = write_lines("emb.txt", ["red 1 0 0", "car 0 1 0", "dog 0 0 1"])
        argv = ["nearest", "--in", str(toy_a.questions_path), "--embeddings", str(embeddings)]
        assert main([*argv, "--text", "Where is the red car?"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "2\tWhere is the red car?"

    def test_needs_embeddings(self, toy_a):
        argv = ["nearest", "--in", str(toy_a.questions_path), "--text", "Where is the car?"]
        assert main(argv) == EXIT_DATA
