import subprocess
import sys

import pytest

from scmforest.cli import main


@pytest.fixture(scope="module")
def planted(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "planted.csv"
    assert main(["synth", "--n", "40", "--p", "150", "--seed", "2", "--out", str(path)]) == 0
    return path


def data_args(path):
    return ["--data", str(path), "--label-col", "label", "--id-col", "sample_id"]


def test_train_is_byte_identical(planted, tmp_path):
    outs = []
    for i, workers in enumerate(["1", "1", "3"]):
        out = tmp_path / f"m{i}.json"
        args = ["train", "--model", "randomscm", *data_args(planted), "--n-estimators", "20",
                "--seed", "7", "--workers", workers, "--out", str(out)]
        assert main(args) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_default_seed_is_reported(planted, tmp_path, capsys):
    assert main(["train", "--model", "scm", *data_args(planted), "--out", str(tmp_path / "s.json")]) == 0
    assert "seed: 42" in capsys.readouterr().err


def test_predict_and_missing_feature(planted, tmp_path):
    model = tmp_path / "m.json"
    main(["train", "--model", "forest", *data_args(planted), "--n-trees", "5", "--out", str(model)])
    pred = tmp_path / "p.csv"
    assert main(["predict", "--model-file", str(model), *data_args(planted), "--out", str(pred)]) == 0
    lines = pred.read_text().splitlines()
    assert lines[0] == "sample_id,prediction,proba" and len(lines) == 41
    narrow = tmp_path / "narrow.csv"
    narrow.write_text("\n".join(",".join(l.split(",")[:6]) for l in planted.read_text().splitlines()) + "\n")
    assert main(["predict", "--model-file", str(model), *data_args(narrow), "--out", str(pred)]) == 3


def test_exit_codes(planted, tmp_path):
    assert main(["train", *data_args(tmp_path / "none.csv"), "--out", "x.json"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"format_version": 99}')
    assert main(["inspect", "--model-file", str(bad)]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["train", "--model", "svm"])
    assert exc.value.code == 1
    assert main(["train", "--model", "scm", *data_args(planted), "--p", "-1", "--out", "x.json"]) == 1


def test_console_script_exit_code(tmp_path):
    r = subprocess.run([sys.executable, "-m", "scmforest.cli", "inspect", "--model-file", str(tmp_path / "x")],
                       capture_output=True, text=True)
    assert r.returncode == 3 and r.stderr.count("\n") == 1


def test_cv_inspect_project_benchmark(planted, tmp_path, capsys):
    prefix = tmp_path / "cv"
    assert main(["cv", "--model", "scm", *data_args(planted), "--folds", "3", "--seed", "1",
                 "--out-prefix", str(prefix)]) == 0
    assert (tmp_path / "cv.folds.tsv").exists() and (tmp_path / "cv.summary.tsv").exists()
    model = tmp_path / "r.json"
    main(["train", "--model", "randomscm", *data_args(planted), "--n-estimators", "15", "--out", str(model)])
    capsys.readouterr()
    assert main(["inspect", "--model-file", str(model)]) == 0
    text = capsys.readouterr().out
    assert all(f"size {k}" in text for k in (1, 2, 3))
    proj = tmp_path / "proj.tsv"
    assert main(["project", "--model-file", str(model), *data_args(planted), "--k", "2", "--out", str(proj)]) == 0
    assert proj.read_text().startswith("sample_id\tfeat:")
    assert (tmp_path / "proj.tsv.thresholds.tsv").read_text().startswith("feature\tthreshold\tdirection")
    assert main(["project", "--model-file", str(model), *data_args(planted), "--rank", "999",
                 "--out", str(proj)]) == 3
    capsys.readouterr()
    assert main(["benchmark", *data_args(planted), "--folds", "3", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    for name in ("scm", "randomscm", "tree", "forest"):
        assert any(line.startswith(name + " ") for line in out.splitlines())
    assert "plsda" in out and "not implemented" in out
