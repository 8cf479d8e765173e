import json
import subprocess

import jsonschema
import pytest

import trajsim


def run(cli, *args, cwd=None):
    return subprocess.run([cli, *map(str, args)], capture_output=True, text=True, cwd=cwd)


def check_report(path, schema):
    with open(path) as f:
        text = f.read()
    doc = json.loads(text)
    jsonschema.validate(doc, schema)
    assert trajsim.validate_report(text) == []
    return doc


def test_gen_is_deterministic(cli, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        r = run(cli, "gen", "--count", 50, "--n-range", "20,40", "--seed", 3, "--timestamped", "--out", p)
        assert r.returncode == 0, r.stderr
    assert a.read_bytes() == b.read_bytes()
    ds = trajsim.load_csv(str(a))
    assert len(ds) == 50 and ds[0].timestamped


def test_sim_report_and_scores(cli, tmp_path, schema):
    outs = []
    for i in range(2):
        out = tmp_path / f"sim{i}"
        r = run(cli, "sim", "--measure", "dtw", "--synthetic", 200, "--pairs", 300, "--mode", "batched",
                "--workers", 2, "--seed", 7, "--reps", 2, "--out", out)
        assert r.returncode == 0, r.stderr
        outs.append(out)
    doc = check_report(outs[0] / "report.json", schema)
    assert doc["experiment"] == "sim"
    assert doc["mode"] == "batched"
    assert len(doc["runs"]) == 2
    for f in ("pre_s", "emb_s", "cmp_s", "total_s"):
        assert doc["timing"][f] >= 0
    lines = (outs[0] / "scores.csv").read_text().splitlines()
    assert len(lines) == 301
    assert (outs[0] / "scores.csv").read_bytes() == (outs[1] / "scores.csv").read_bytes()

    single = tmp_path / "single"
    r = run(cli, "sim", "--measure", "dtw", "--synthetic", 200, "--pairs", 300, "--mode", "single",
            "--workers", 2, "--seed", 7, "--reps", 1, "--out", single)
    assert r.returncode == 0, r.stderr
    assert (single / "scores.csv").read_bytes() == (outs[0] / "scores.csv").read_bytes()
    assert check_report(single / "report.json", schema)["mode"] == "single"


def test_exit_codes(cli, tmp_path):
    r = run(cli, "sim", "--measure", "stedr", "--synthetic", 20, "--pairs", 5, "--out", tmp_path / "x")
    assert r.returncode == 1
    assert "pair" in r.stderr
    assert run(cli, "sim", "--measure", "dtw", "--eps", 1, "--synthetic", 20, "--out", tmp_path / "y").returncode == 2
    assert run(cli, "sim", "--bogus").returncode == 2
    assert run(cli, "cluster", "--k", 0, "--synthetic", 20, "--out", tmp_path / "z").returncode == 2
    assert run(cli, "knn", "--synthetic", 30, "--queries", 2, "--k", 50, "--out", tmp_path / "w").returncode == 2
    assert run(cli, "embed", "--synthetic", 10, "--out", tmp_path / "v").returncode == 2


def test_pipeline_and_index_equivalence(cli, tmp_path, schema):
    data = tmp_path / "data.csv"
    assert run(cli, "gen", "--count", 400, "--seed", 2, "--out", data).returncode == 0
    r = run(cli, "embed", "--data", data, "--weights-seed", 5, "--out", tmp_path / "emb")
    assert r.returncode == 0, r.stderr
    check_report(tmp_path / "emb" / "report.json", schema)
    r = run(cli, "index", "--embeddings", tmp_path / "emb" / "embeddings.csv", "--index", "ivf", "--nlist", 8,
            "--out", tmp_path / "idx")
    assert r.returncode == 0, r.stderr
    r = run(cli, "knn", "--data", data, "--index-dir", tmp_path / "idx", "--weights-seed", 5, "--k", 10,
            "--queries", 4, "--reps", 1, "--out", tmp_path / "knn")
    assert r.returncode == 0, r.stderr
    doc = check_report(tmp_path / "knn" / "report.json", schema)
    assert 0.0 <= doc["accuracy"]["hr_at_k"] <= 1.0

    common = ["--data", data, "--weights-seed", 5, "--k", 10, "--queries", 4, "--reps", 1, "--metric", "l1"]
    r1 = run(cli, "knn", *common, "--index", "flat", "--out", tmp_path / "flat")
    r2 = run(cli, "knn", *common, "--index", "ivf", "--nlist", 8, "--nprobe", 8, "--out", tmp_path / "ivf")
    assert r1.returncode == 0 and r2.returncode == 0, r1.stderr + r2.stderr
    a = check_report(tmp_path / "flat" / "report.json", schema)
    b = check_report(tmp_path / "ivf" / "report.json", schema)
    assert a["accuracy"]["hr_per_query"] == b["accuracy"]["hr_per_query"]
    assert (tmp_path / "flat" / "knn.csv").read_bytes() == (tmp_path / "ivf" / "knn.csv").read_bytes()

    r = run(cli, "knn", "--data", data, "--truth-only", "--k", 5, "--queries", 3, "--reps", 1,
            "--out", tmp_path / "truth")
    assert r.returncode == 0, r.stderr
    assert (tmp_path / "truth" / "truth.csv").read_text().startswith("query_id,rank,id,score\n")


def test_cluster(cli, tmp_path, schema):
    r = run(cli, "cluster", "--synthetic", 60, "--k", 4, "--weights-seed", 1, "--reps", 1, "--save-matrix",
            "--out", tmp_path / "c")
    assert r.returncode == 0, r.stderr
    doc = check_report(tmp_path / "c" / "report.json", schema)
    assert 0.0 <= doc["accuracy"]["rand_index"] <= 1.0
    assert (tmp_path / "c" / "clusters_raw.csv").read_text().startswith("id,cluster\n")
    assert (tmp_path / "c" / "distances.csv").read_text().startswith("i,j,value\n")


def test_timeout_records_ot(cli, tmp_path, schema):
    r = run(cli, "sim", "--measure", "dtw", "--synthetic", 500, "--pairs", 20000, "--timeout-s", 0.01,
            "--out", tmp_path / "ot")
    assert r.returncode == 0, r.stderr
    assert check_report(tmp_path / "ot" / "report.json", schema)["status"] == "OT"
