"""Orchestration-layer tests: metrics frames, plot exports, command runner, CLI."""

import json
import os

import numpy as np
import pytest

from adaptnet.cli import main
from adaptnet.config import ConfigError, load_config
from adaptnet.harness import (
    COMMANDS,
    PLOT_SCHEMAS,
    TRUNCATION_COMMENT,
    JsonlWriter,
    MetricsFrame,
    SchemaError,
    emit_plot_data,
    run_scenario,
    train_mode1,
)
from adaptnet.learning import load_checkpoint

SIM_DOC = {
    "seed": 3,
    "uav_count": 2,
    "target_count": 4,
    "sim_steps": 6,
    "cluster_refresh": 3,
    "comparison_length": 8,
    "min_track_points": 2,
    "traffic_every": 2,
    "radar_active_fraction": 1.0,
    "radar_range_max": 400.0,
}

TRAIN_DOC = {
    "seed": 1,
    "uav_count": 2,
    "target_count": 4,
    "episodes": 12,
    "episode_steps": 5,
    "warmup_steps": 2,
    "train_every": 2,
    "batch_size": 4,
    "layer_sizes": [8],
    "cluster_refresh": 3,
    "comparison_length": 8,
    "min_track_points": 2,
    "radar_active_fraction": 1.0,
    "radar_range_max": 400.0,
}


def read(path):
    with open(path, "rb") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# MetricsFrame


def test_frame_rejects_duplicate_columns():
    with pytest.raises(SchemaError, match="duplicate column"):
        MetricsFrame(["a", "b", "a"])


def test_frame_append_validates_shape():
    frame = MetricsFrame(["a", "b"])
    frame.append({"a": 1, "b": 2})
    with pytest.raises(SchemaError, match="missing: b"):
        frame.append({"a": 1})
    with pytest.raises(SchemaError, match="extra: c"):
        frame.append({"a": 1, "b": 2, "c": 3})
    assert len(frame) == 1


def test_frame_column_access():
    frame = MetricsFrame(["a", "b"])
    frame.extend([{"a": 1, "b": 10}, {"a": 2, "b": 20}])
    assert frame.column("b") == [10, 20]
    with pytest.raises(SchemaError, match="no such column"):
        frame.column("z")


def test_frame_csv_formatting(tmp_path):
    frame = MetricsFrame(["i", "f", "flag", "s"])
    frame.append({"i": np.int64(7), "f": 1.0 / 3.0, "flag": np.bool_(True), "s": "x"})
    path = frame.to_csv(tmp_path / "m.csv")
    lines = read(path).decode().splitlines()
    assert lines[0] == "i,f,flag,s"
    # full round-trip float repr, numpy scalars collapsed to plain values
    assert lines[1] == "7,%s,True,x" % repr(1.0 / 3.0)


def test_frame_truncation_marker(tmp_path):
    frame = MetricsFrame(["a"])
    frame.append({"a": 1})
    path = frame.to_csv(tmp_path / "t.csv", truncated=True)
    assert read(path).decode().splitlines()[-1] == TRUNCATION_COMMENT


# ---------------------------------------------------------------------------
# plot-data export


def test_emit_plot_data_unknown_kind(tmp_path):
    with pytest.raises(ValueError, match="unknown plot kind"):
        emit_plot_data(MetricsFrame(["a"]), "pie_chart", tmp_path / "p.csv")


def test_emit_plot_data_missing_columns(tmp_path):
    frame = MetricsFrame(["episode", "agent"])
    with pytest.raises(SchemaError, match="cum_reward"):
        emit_plot_data(frame, "training_curves", tmp_path / "p.csv")


def test_emit_plot_data_projects_and_sorts(tmp_path):
    frame = MetricsFrame(["episode", "agent", "cum_reward", "junk"])
    frame.extend(
        [
            {"episode": 1, "agent": 0, "cum_reward": 5.0, "junk": "z"},
            {"episode": 0, "agent": 1, "cum_reward": 2.0, "junk": "z"},
            {"episode": 0, "agent": 0, "cum_reward": 1.0, "junk": "z"},
        ]
    )
    path = emit_plot_data(frame, "training_curves", tmp_path / "p.csv")
    lines = read(path).decode().splitlines()
    assert lines[0] == "episode,agent,cum_reward"
    assert [l.split(",")[:2] for l in lines[1:]] == [
        ["0", "0"],
        ["0", "1"],
        ["1", "0"],
    ]
    assert "junk" not in lines[0]


def test_plot_schemas_cover_known_kinds():
    assert set(PLOT_SCHEMAS) == {
        "aoi_curves",
        "training_curves",
        "cluster_map",
        "trajectory_compare",
    }


# ---------------------------------------------------------------------------
# JsonlWriter


def test_jsonl_writer_compact_lines(tmp_path):
    path = tmp_path / "log.jsonl"
    w = JsonlWriter(path)
    w.write({"a": 1, "b": [1, 2]})
    w.close()
    assert read(path).decode() == '{"a":1,"b":[1,2]}\n'


def test_jsonl_writer_truncation_sentinel(tmp_path):
    path = tmp_path / "log.jsonl"
    w = JsonlWriter(path)
    w.write({"a": 1})
    w.close(truncated=True)
    lines = read(path).decode().splitlines()
    assert json.loads(lines[-1]) == {"truncated": True}


# ---------------------------------------------------------------------------
# run_scenario commands


def test_run_scenario_rejects_unknown_command(tmp_path):
    with pytest.raises(ValueError, match="unknown command"):
        run_scenario(SIM_DOC, "fly", tmp_path)


def test_simulate_artifacts(tmp_path):
    arts = run_scenario(SIM_DOC, "simulate", tmp_path)
    for name in ("snapshots", "aoi_metrics", "detections", "clusters", "summary"):
        assert os.path.exists(arts[name])
    snaps = [json.loads(l) for l in read(arts["snapshots"]).decode().splitlines()]
    assert len(snaps) == SIM_DOC["sim_steps"] + 1
    assert len(snaps[0]["uavs"]) == 2 and len(snaps[0]["targets"]) == 4
    aoi = read(arts["aoi_metrics"]).decode().splitlines()
    assert len(aoi) == 1 + SIM_DOC["sim_steps"] * SIM_DOC["uav_count"]
    summary = json.loads(read(arts["summary"]))
    assert summary["command"] == "simulate"
    assert summary["steps"] == SIM_DOC["sim_steps"]
    assert summary["truncated"] is False
    # two UAVs -> pairwise trajectory comparison is emitted
    compare = read(arts["trajectory_compare"]).decode().splitlines()
    assert compare[0] == ",".join(PLOT_SCHEMAS["trajectory_compare"])
    assert len(compare) > 1


def test_simulate_rerun_is_byte_identical(tmp_path):
    a = run_scenario(SIM_DOC, "simulate", tmp_path / "a")
    b = run_scenario(SIM_DOC, "simulate", tmp_path / "b")
    assert set(a) == set(b)
    for name in a:
        assert read(a[name]) == read(b[name]), name


def test_train_mode1_artifacts(tmp_path):
    arts = run_scenario(TRAIN_DOC, "train-mode1", tmp_path)
    curves = read(arts["curves"]).decode().splitlines()
    assert curves[0] == "episode,agent_id,cum_reward,loss"
    assert len(curves) == 1 + TRAIN_DOC["episodes"] * TRAIN_DOC["uav_count"]
    eps = read(arts["episodes"]).decode().splitlines()
    assert len(eps) == TRAIN_DOC["episodes"] * TRAIN_DOC["episode_steps"]
    first = json.loads(eps[0])
    assert first["mode"] == 1 and first["episode"] == 0 and first["step"] == 1
    kind, nets, meta = load_checkpoint(arts["checkpoint"])
    assert kind == "dqn"
    assert set(nets) == {"agent0_online", "agent0_target", "agent1_online", "agent1_target"}
    assert meta["episodes_run"] == TRAIN_DOC["episodes"]
    summary = json.loads(read(arts["summary"]))
    assert set(summary) >= {"team_raw_first_decile", "team_raw_last_decile", "improved"}


def test_train_mode2_smoke(tmp_path):
    arts = run_scenario(TRAIN_DOC, "train-mode2", tmp_path)
    kind, nets, _ = load_checkpoint(arts["checkpoint"])
    assert kind == "maddpg"
    assert set(nets) == {"agent0_actor", "agent0_critic", "agent1_actor", "agent1_critic"}
    curves = read(arts["training_curves"]).decode().splitlines()
    assert curves[0] == "episode,agent,cum_reward"


def test_train_rerun_is_byte_identical(tmp_path):
    a = run_scenario(TRAIN_DOC, "train-mode1", tmp_path / "a")
    b = run_scenario(TRAIN_DOC, "train-mode1", tmp_path / "b")
    for name in a:
        assert read(a[name]) == read(b[name]), name


def test_train_mode1_team_raw_unaffected_by_sharing_scale():
    # shaped and unshaped runs report the same unshaped metric definition
    res = train_mode1(load_config(dict(TRAIN_DOC, episodes=3)))
    assert len(res["team_raw"]) == 3
    assert all(np.isfinite(v) for v in res["team_raw"])


def test_aoi_bench_rows(tmp_path):
    doc = dict(SIM_DOC, aoi_lambdas=[0.4, 0.6], aoi_horizon=2000.0)
    arts = run_scenario(doc, "aoi-bench", tmp_path)
    rows = read(arts["aoi_bench"]).decode().splitlines()
    # 2 lambdas x 4 disciplines
    assert rows[0] == "lambda,discipline,avg_aoi,delivered,dropped"
    assert len(rows) == 1 + 8
    curves = read(arts["aoi_curves"]).decode().splitlines()
    assert curves[0] == "lambda,discipline,avg_aoi"
    assert len(curves) == len(rows)


def _write_traj_csv(path):
    with open(path, "w") as fh:
        fh.write("id,x,y,t\n")
        for tid, xs in (("a", [0, 1, 2]), ("b", [0, 2, 4]), ("c", [9, 9, 9])):
            for t, x in enumerate(xs):
                fh.write("%s,%d,%d,%d\n" % (tid, x, x * 2, t))
    return path


def test_frechet_command(tmp_path):
    csv_in = _write_traj_csv(tmp_path / "in.csv")
    arts = run_scenario(dict(SIM_DOC), "frechet", tmp_path / "out", input_path=str(csv_in))
    rows = read(arts["frechet"]).decode().splitlines()
    assert rows[0] == "a,b,distance"
    assert len(rows) == 1 + 3  # C(3,2) pairs
    assert rows[1].startswith("a,b,")


def test_cluster_command(tmp_path):
    csv_in = _write_traj_csv(tmp_path / "in.csv")
    doc = dict(SIM_DOC, cluster_k=2, input_csv=str(csv_in))
    arts = run_scenario(doc, "cluster", tmp_path / "out")
    summary = json.loads(read(arts["summary"]))
    assert summary["n"] == 3 and summary["k"] == 2
    cmap = read(arts["cluster_map"]).decode().splitlines()
    assert cmap[0] == "id,kind,cluster,x,y"
    kinds = {line.split(",")[1] for line in cmap[1:]}
    assert kinds == {"member", "centroid"}


def test_cluster_requires_input(tmp_path):
    with pytest.raises(ConfigError, match="input_csv"):
        run_scenario(dict(SIM_DOC), "cluster", tmp_path)


def test_scale_sweep_artifacts(tmp_path):
    doc = dict(SIM_DOC, sweep_uav_counts=[2, 3], sweep_steps=8)
    arts = run_scenario(doc, "scale-sweep", tmp_path)
    rows = read(arts["scale_sweep"]).decode().splitlines()
    assert len(rows) == 1 + 2
    assert rows[1].split(",")[0] == "2" and rows[2].split(",")[0] == "3"
    timing = read(arts["timings_local"]).decode().splitlines()
    assert timing[0] == "uav_count,total_s,mean_step_ms,median_step_ms"
    assert len(timing) == 1 + 2


def test_scale_sweep_deterministic_except_timings(tmp_path):
    doc = dict(SIM_DOC, sweep_uav_counts=[2], sweep_steps=8)
    a = run_scenario(doc, "scale-sweep", tmp_path / "a")
    b = run_scenario(doc, "scale-sweep", tmp_path / "b")
    assert read(a["scale_sweep"]) == read(b["scale_sweep"])


# ---------------------------------------------------------------------------
# CLI


def _cfg_file(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_cli_success(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, dict(SIM_DOC, aoi_lambdas=[0.5], aoi_horizon=1000.0))
    rc = main(["aoi-bench", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 0
    assert "wrote" in capsys.readouterr().out


def test_cli_config_error_exits_2(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {"uav_count": -1})
    rc = main(["simulate", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 2
    assert "configuration error" in capsys.readouterr().err


def test_cli_negative_seed_exits_2(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, SIM_DOC)
    rc = main(
        ["simulate", "--config", cfg, "--out", str(tmp_path / "out"), "--seed", "-4"]
    )
    assert rc == 2
    assert "seed" in capsys.readouterr().err


def test_cli_generic_error_exits_1(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, SIM_DOC)
    rc = main(
        [
            "frechet",
            "--config",
            cfg,
            "--out",
            str(tmp_path / "out"),
            "--input",
            str(tmp_path / "missing.csv"),
        ]
    )
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_cli_rejects_unknown_command(tmp_path):
    cfg = _cfg_file(tmp_path, SIM_DOC)
    with pytest.raises(SystemExit):
        main(["teleport", "--config", cfg, "--out", str(tmp_path / "out")])


def test_cli_seed_override_changes_output(tmp_path):
    cfg = _cfg_file(tmp_path, SIM_DOC)
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "a")])
    main(["simulate", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "11"])
    assert read(tmp_path / "a" / "snapshots.jsonl") != read(
        tmp_path / "b" / "snapshots.jsonl"
    )


def test_command_list_is_stable():
    assert COMMANDS == (
        "simulate",
        "train-mode1",
        "train-mode2",
        "aoi-bench",
        "cluster",
        "frechet",
        "scale-sweep",
    )
