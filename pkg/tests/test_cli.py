import json
import math

from hypnn import cli


def _run(argv):
    return cli.main(argv)


def test_volume_forward(capsys):
    assert _run(["volume", "--d", "2", "--r", "1.0"]) == 0
    out = float(capsys.readouterr().out)
    assert math.isclose(out, 3.412283, abs_tol=1e-5)


def test_volume_inverse(capsys):
    assert _run(["volume", "--d", "2", "--V", "3.412283"]) == 0
    out = float(capsys.readouterr().out)
    assert math.isclose(out, 1.0, abs_tol=1e-5)


def test_volume_threshold(capsys):
    assert _run(["volume", "--d", "2", "--k", "1", "--R", "10.0"]) == 0
    out = float(capsys.readouterr().out)
    assert math.isclose(out, 11.1447299, abs_tol=1e-4)


def test_volume_requires_an_operand(capsys):
    assert _run(["volume", "--d", "2"]) == 2


def test_rejects_bad_dimension(capsys):
    assert _run(["simulate", "--d", "1", "--R", "4.0", "--reps", "1"]) == 2


def _simulate(out_dir, seed=3, threads="1"):
    return _run(["simulate", "--d", "2", "--R", "4.0", "--reps", "5",
                 "--u-cap", "3.0", "--seed", str(seed),
                 "--threads", threads, "--out-dir", str(out_dir)])


def test_simulate_outputs_and_determinism(tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _simulate(a) == 0
    assert _simulate(b) == 0
    assert _simulate(c, threads="2") == 0
    for name in ("records.jsonl", "summaries.csv"):
        ref = (a / name).read_bytes()
        assert (b / name).read_bytes() == ref
        assert (c / name).read_bytes() == ref
    manifest = json.loads((a / "manifest.json").read_text())
    assert manifest["command"] == "simulate"
    assert manifest["config"]["seed"] == 3
    assert sorted(manifest["outputs"]) == ["records.jsonl", "summaries.csv"]
    header = (a / "summaries.csv").read_text().splitlines()[0]
    assert header == ("replication_id,n_points_in_BR,n_records,"
                      "max_height,n_censored")
    for line in (a / "records.jsonl").read_text().splitlines():
        rec = json.loads(line)
        assert set(rec) == {"replication_id", "height", "censored", "radial"}
        assert rec["height"] > 0.0


def test_simulate_different_seeds_differ(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _simulate(a, seed=3) == 0
    assert _simulate(b, seed=4) == 0
    assert (a / "records.jsonl").read_bytes() != \
        (b / "records.jsonl").read_bytes()


def test_intensity_run(tmp_path):
    code = _run(["intensity", "--d", "2", "--R", "5.0", "--reps", "400",
                 "--u-cap", "3.0", "--u-grid", "0,1,2", "--seed", "1",
                 "--out-dir", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "intensity.csv").read_text().splitlines()
    assert rows[0] == "u,exact,empirical_mean,ci_halfwidth,pass"
    assert len(rows) == 4
    assert (tmp_path / "intensity_gof.csv").exists()


def test_intensity_bad_grid(tmp_path):
    code = _run(["intensity", "--d", "2", "--R", "5.0", "--reps", "10",
                 "--u-cap", "3.0", "--u-grid", "0,5", "--seed", "1",
                 "--out-dir", str(tmp_path)])
    assert code == 2


def test_gumbel_needs_enough_reps(tmp_path):
    code = _run(["gumbel", "--d", "2", "--R", "5.0", "--reps", "10",
                 "--out-dir", str(tmp_path)])
    assert code == 2


def test_gumbel_run(tmp_path):
    code = _run(["gumbel", "--d", "2", "--R", "5.0", "--reps", "150",
                 "--u-cap", "8.0", "--seed", "2", "--ks-threshold", "1.0",
                 "--out-dir", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "gumbel_gof.csv").read_text().splitlines()
    assert rows[0] == "name,value,n,threshold,pass"
    assert rows[1].startswith("ks-max-height,")
    assert rows[2].startswith("below-threshold-replications,")
    curve = (tmp_path / "gumbel.csv").read_text().splitlines()
    assert curve[0] == "c,empirical_cdf,gumbel_cdf,abs_diff"
    assert len(curve) == 34


def test_lemma_check_run(tmp_path):
    code = _run(["lemma-check", "--d-range", "2,3,4", "--r-max", "6.0",
                 "--r-step", "1.0", "--s-max", "4.0", "--s-step", "1.0",
                 "--out-dir", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "lemmas.csv").read_text().splitlines()
    assert rows[0] == "lemma,d,r,s,value,lower,upper,status"
    assert any(",not-applicable" in r for r in rows)
    assert all(",fail" not in r for r in rows)
