import pytest

from checkworthy.cli import main
from conftest import synthetic_corpus, write_tsv


@pytest.fixture
def corpus(tmp_path):
    return synthetic_corpus(tmp_path)


def test_preprocess_appends_clean_column(tmp_path, corpus):
    train, _, _ = corpus
    out = tmp_path / "clean.tsv"
    assert main(["preprocess", "--lang", "english",
                 "--in", str(train), "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].endswith("\tclean_text")
    first = lines[1].split("\t")
    assert "https://" not in first[-1]
    assert "#" not in first[-1]
    assert len(lines) == len(train.read_text(encoding="utf-8").splitlines())


def test_freq_report_writes_tsv_and_figure(tmp_path, corpus, capsys):
    train, _, _ = corpus
    out_tsv = tmp_path / "freq.tsv"
    out_png = tmp_path / "freq.png"
    code = main(["freq-report", "--lang", "english", "--in", str(train),
                 "--top-k", "5", "--out", str(out_tsv), "--figure", str(out_png)])
    assert code == 0
    captured = capsys.readouterr().out.strip().splitlines()
    assert len(captured) == 5
    token, count = captured[0].split("\t")
    assert int(count) >= 1
    assert out_tsv.read_text(encoding="utf-8").startswith("token\tcount\n")
    assert out_png.stat().st_size > 0


def test_train_predict_evaluate_round_trip(tmp_path, corpus):
    train, dev, test = corpus
    config = tmp_path / "config.cfg"
    config.write_text(
        "language=english\nmodel=svm\nseed=2814\n"
        "features.ngram_max=2\nfeatures.max_features=300\n"
        "balance.k_neighbors=3\n",
        encoding="utf-8",
    )
    bundle = tmp_path / "bundle"
    assert main(["train", str(config), "--train", str(train),
                 "--dev", str(dev), "--model-out", str(bundle)]) == 0
    assert (bundle / "bundle.cfg").exists()
    assert (bundle / "tfidf.tsv").exists()
    assert (bundle / "model.txt").exists()

    pred = tmp_path / "pred.tsv"
    assert main(["predict", "--model", str(bundle),
                 "--in", str(test), "--out", str(pred)]) == 0
    assert len(pred.read_text(encoding="utf-8").splitlines()) == 7  # header + 6

    out_dir = tmp_path / "report"
    assert main(["evaluate", "--lang", "english", "--gold", str(test),
                 "--pred", str(pred), "--out-dir", str(out_dir),
                 "--model-name", "SVM"]) == 0
    assert (out_dir / "report.txt").exists()
    assert (out_dir / "confusion_matrix.png").exists()
    assert (out_dir / "class_metrics.png").exists()


def test_experiment_run_with_bundled_recipe(tmp_path, corpus, capsys):
    train, dev, test = corpus
    out_dir = tmp_path / "run"
    code = main(["experiment", "run", "english_svm",
                 "--train", str(train), "--dev", str(dev), "--test", str(test),
                 "--out-dir", str(out_dir)])
    assert code == 0
    assert (out_dir / "predictions.tsv").exists()
    assert (out_dir / "manifest.txt").exists()
    out = capsys.readouterr().out
    assert "predictions:" in out


def test_experiment_list(capsys):
    assert main(["experiment", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert "dutch_svm" in names and "spanish_rf" in names
    assert len(names) == 6


def test_error_paths_exit_nonzero(tmp_path, capsys):
    bad = tmp_path / "bad.tsv"
    bad.write_text("tweet_id\ttweet_text\tclass_label\nx\ty\tMaybe\n",
                   encoding="utf-8")
    good = write_tsv(tmp_path / "good.tsv", [("1", "text", "Yes")])
    code = main(["experiment", "run", "english_svm",
                 "--train", str(bad), "--dev", str(good), "--test", str(good),
                 "--out-dir", str(tmp_path / "o")])
    assert code == 1
    err = capsys.readouterr().err
    assert "corpus:" in err

    assert main(["experiment", "run", "no_such_recipe",
                 "--train", str(good), "--dev", str(good),
                 "--test", str(good)]) == 1


def test_evaluate_alignment_failure_exit_code(tmp_path, corpus, capsys):
    _, _, test = corpus
    pred = tmp_path / "pred.tsv"
    pred.write_text("tweet_id\tlabel\tscore\nwrong\tYes\t0.9\n", encoding="utf-8")
    code = main(["evaluate", "--lang", "english",
                 "--gold", str(test), "--pred", str(pred)])
    assert code == 1
    assert "missing" in capsys.readouterr().err
