import json

import pytest

from cmhide import SUMMARY_COLUMNS, load_fixture, pagerank
from cmhide.cli import main


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_detect_emits_partition_json(capsys):
    rc, out, _ = run_cli(capsys, "detect", "--graph", "kar")
    assert rc == 0
    obj = json.loads(out)
    assert obj["algo"] == "greedy" and obj["seed"] == 0
    assert len(obj["communities"]) == 3
    labels = [lab for comm in obj["communities"] for lab in comm]
    assert sorted(labels) == sorted(load_fixture("kar").labels)


def test_detect_output_file_is_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(capsys, "detect", "--graph", "kar", "--out", str(a))[0] == 0
    assert run_cli(capsys, "detect", "--graph", "kar", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_detect_accepts_labelprop_alias(capsys):
    rc, out, _ = run_cli(capsys, "detect", "--graph", "cliques", "--algo", "labelprop")
    assert rc == 0
    assert json.loads(out)["algo"] == "label_propagation"


def test_detect_verbose_digest_goes_to_stderr(capsys):
    rc, out, err = run_cli(capsys, "detect", "--graph", "kar", "--verbose")
    assert rc == 0
    assert "3 communities" in err
    json.loads(out)  # stdout stays machine-readable


def test_hide_gradient_regression(capsys):
    rc, out, _ = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--preset", "kar",
        "--tau", "0.5", "--beta", "3", "--seed", "7",
    )
    assert rc == 0
    obj = json.loads(out)
    assert obj["method"] == "gradient" and obj["target"] == "9"
    assert obj["success"] is True
    assert obj["similarity"] == 0.0
    assert obj["used_budget"] == 2
    assert obj["added"] == [["31", "9"], ["8", "9"]]
    assert obj["removed"] == []
    assert obj["tau"] == 0.5 and obj["beta"] == 3
    assert obj["wall_ms"] > 0


def test_hide_exhaust_budget_spends_everything(capsys):
    rc, out, _ = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--preset", "kar",
        "--tau", "0.5", "--beta", "3", "--seed", "7", "--exhaust-budget",
    )
    assert rc == 0
    obj = json.loads(out)
    assert obj["used_budget"] == 3
    assert obj["added"] == [["30", "9"], ["31", "9"], ["8", "9"]]


def test_hide_dice_reports_mixed_rewiring(capsys):
    rc, out, _ = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--method", "dice",
        "--beta", "3",
    )
    assert rc == 0
    obj = json.loads(out)
    assert obj["success"] is True
    assert obj["added"] == [["0", "9"], ["32", "9"]]
    assert obj["removed"] == [["2", "9"]]


def test_hide_roam_reports_edges_off_the_target_row(capsys):
    rc, out, _ = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--method", "roam",
        "--beta", "3",
    )
    assert rc == 0
    obj = json.loads(out)
    assert obj["removed"] == [["33", "9"]]
    assert obj["added"] == [["2", "33"]]  # rewiring lands on the detached node
    assert obj["used_budget"] == 2
    assert obj["success"] is False


def test_hide_strict_flag_turns_failure_into_exit_1(capsys):
    argv = (
        "hide", "--graph", "kar", "--target", "9", "--preset", "kar",
        "--tau", "0.01", "--beta", "3", "--seed", "3", "--max-iter", "3",
    )
    rc, out, _ = run_cli(capsys, *argv)
    assert rc == 0
    assert json.loads(out)["success"] is False
    rc, _, _ = run_cli(capsys, *argv, "--strict")
    assert rc == 1


def test_hide_unknown_target_exits_2(capsys):
    rc, _, err = run_cli(capsys, "hide", "--graph", "kar", "--target", "zz")
    assert rc == 2
    assert "cmhide: error:" in err


def test_missing_graph_exits_2(capsys):
    rc, _, err = run_cli(capsys, "detect", "--graph", "no-such-file.txt")
    assert rc == 2
    assert "not found" in err


def test_bad_master_seed_env_exits_2(capsys, monkeypatch):
    monkeypatch.setenv("CMH_SEED", "abc")
    rc, _, err = run_cli(capsys, "detect", "--graph", "kar")
    assert rc == 2
    assert "CMH_SEED" in err


def test_master_seed_env_sets_seed_default(capsys, monkeypatch):
    argv = (
        "hide", "--graph", "kar", "--target", "9", "--preset", "kar",
        "--tau", "0.5", "--beta", "3",
    )
    monkeypatch.setenv("CMH_SEED", "7")
    _, out_env, _ = run_cli(capsys, *argv)
    monkeypatch.delenv("CMH_SEED")
    _, out_flag, _ = run_cli(capsys, *argv, "--seed", "7")
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "wall_ms"}
    assert strip(out_env) == strip(out_flag)


def test_config_file_applies_and_flags_beat_it(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tau": 0.8, "beta": 2}), "utf-8")
    base = ("hide", "--graph", "kar", "--target", "9", "--config", str(cfg))
    _, out, _ = run_cli(capsys, *base)
    obj = json.loads(out)
    assert obj["tau"] == 0.8 and obj["beta"] == 2
    _, out, _ = run_cli(capsys, *base, "--tau", "0.3")
    obj = json.loads(out)
    assert obj["tau"] == 0.3 and obj["beta"] == 2


def test_preset_accepts_a_json_file(capsys, tmp_path):
    preset = tmp_path / "mine.json"
    preset.write_text(
        json.dumps(
            {"eta": 0.079, "lam": 1.71, "max_iter": 120,
             "weights": [0.33, 0.20, 0.21, 0.24]}
        ),
        "utf-8",
    )
    argv = ("hide", "--graph", "kar", "--target", "9",
            "--tau", "0.5", "--beta", "3", "--seed", "7")
    _, from_file, _ = run_cli(capsys, *argv, "--preset", str(preset))
    _, from_name, _ = run_cli(capsys, *argv, "--preset", "kar")
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "wall_ms"}
    assert strip(from_file) == strip(from_name)


def test_unknown_preset_exits_2(capsys):
    rc, _, err = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--preset", "zachary"
    )
    assert rc == 2
    assert "unknown preset" in err


def test_unknown_config_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"step": 1}), "utf-8")
    rc, _, err = run_cli(
        capsys, "hide", "--graph", "kar", "--target", "9", "--config", str(cfg)
    )
    assert rc == 2
    assert "unknown config keys" in err


def test_loader_notes_dropped_lines(capsys, tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("a b\nb b\na b\nb c\n", "utf-8")
    rc, out, err = run_cli(capsys, "detect", "--graph", str(path))
    assert rc == 0
    assert "dropped 1 self-loop line(s)" in err
    assert "collapsed 1 duplicate line(s)" in err


def test_analyze_pagerank_matches_library(capsys):
    rc, out, _ = run_cli(capsys, "analyze", "pagerank", "--graph", "kar")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "node,value"
    kar = load_fixture("kar")
    assert len(lines) == kar.n + 1
    values = {row.split(",")[0]: float(row.split(",")[1]) for row in lines[1:]}
    pr = pagerank(kar)
    assert sum(values.values()) == pytest.approx(1.0)
    assert values["33"] == pytest.approx(pr[kar.id_of("33")], abs=1e-12)


def test_analyze_scores_needs_partition(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "scores", "--graph", "kar"])
    assert exc.value.code == 2


def test_analyze_scores_renormalises_weights(capsys, tmp_path):
    part = tmp_path / "part.json"
    assert run_cli(capsys, "detect", "--graph", "kar", "--out", str(part))[0] == 0

    def scores(weight_text):
        rc, out, _ = run_cli(
            capsys, "analyze", "scores", "--graph", "kar",
            "--partition", str(part), "--weights", weight_text,
        )
        assert rc == 0
        rows = out.strip().splitlines()[1:]
        return [float(r.split(",")[1]) for r in rows]

    plain = scores("0.33,0.20,0.21,0.24")
    scaled = scores("33,20,21,24")  # same proportions, different scale
    assert plain == pytest.approx(scaled, abs=1e-12)
    assert all(0.0 <= v <= 1.0 for v in plain)


def test_benchmark_writes_the_three_artifacts(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(
        json.dumps(
            {
                "graph": "cliques",
                "preset": "kar",
                "methods": ["dice", "random"],
                "taus": [0.5],
                "beta_factors": [1.0],
                "runs": 1,
                "seed": 0,
            }
        ),
        "utf-8",
    )
    out_dir = tmp_path / "bench"
    rc, out, _ = run_cli(
        capsys, "benchmark", "--spec", str(spec), "--out", str(out_dir), "--jobs", "1"
    )
    assert rc == 0
    assert out.strip() == str(out_dir / "summary.csv")
    summary = (out_dir / "summary.csv").read_text("utf-8").splitlines()
    assert summary[0] == ",".join(SUMMARY_COLUMNS)
    assert len(summary) == 3  # one row per method
    report = json.loads((out_dir / "report.json").read_text("utf-8"))
    assert report["meta"]["seed"] == 0
    assert (out_dir / "records.csv").exists()
    rc2, _, _ = run_cli(
        capsys, "benchmark", "--spec", str(spec), "--out", str(tmp_path / "b2"),
        "--jobs", "1", "--seed", "5",
    )
    assert rc2 == 0
    report2 = json.loads((tmp_path / "b2" / "report.json").read_text("utf-8"))
    assert report2["meta"]["seed"] == 5  # flag overrides the spec file
