"""Experiment orchestration: scenario commands, metrics, plot-data export.

Every command writes deterministic flat files (CSV / JSON lines) into an
output directory; plotting is external.  Wall-clock measurements go to
``timings_local.csv``, which is the one file exempt from the
byte-identical determinism contract.
"""

import csv
import json
import math
import os
import time as _time
from dataclasses import replace

import numpy as np

from .clustering import (
    cluster_report,
    k_medoids,
    pairwise_frechet,
    silhouette_score,
    write_clusters_csv,
)
from .comms import (
    AoiTracker,
    DirectLink,
    Discipline,
    GatedLink,
    Packet,
    default_waveforms,
    mm1_aoi,
)
from .config import ConfigError, ScenarioConfig, config_dict, load_config
from .learning import (
    DqnAgent,
    MaddpgAgent,
    ReplayBuffer,
    epsilon_at,
    maddpg_update,
    save_checkpoint,
    write_curves_csv,
)
from .modes import Mode1Env, Mode2Env, ModeController, derive_seed, mode_switch, top_offer
from .sensing import (
    TrackParams,
    plan_sensing_path,
    radar_scan,
    update_tracks,
    write_detections_csv,
)
from .trajectory import Trajectory, discrete_frechet, load_trajectories_csv
from .world import init_world, snapshot, step_targets, step_uav

COMMANDS = (
    "simulate",
    "train-mode1",
    "train-mode2",
    "aoi-bench",
    "cluster",
    "frechet",
    "scale-sweep",
)

TRUNCATION_COMMENT = "# truncated"


class SchemaError(Exception):
    """A metrics frame is missing columns a consumer requires."""


def _fmt(v):
    # repr() keeps the full float round-trip so reruns are byte-identical
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class MetricsFrame:
    """Append-only table with a fixed column set.

    Rows are plain dicts keyed exactly by the frame's columns; anything
    missing or extra raises SchemaError so runs never silently change
    shape midway.
    """

    def __init__(self, columns):
        self.columns = list(columns)
        if len(set(self.columns)) != len(self.columns):
            raise SchemaError("duplicate column names: %r" % (self.columns,))
        self.rows: list = []

    def __len__(self):
        return len(self.rows)

    def append(self, row: dict):
        missing = [c for c in self.columns if c not in row]
        extra = [k for k in row if k not in self.columns]
        if missing or extra:
            raise SchemaError(
                "row does not match frame columns (missing: %s, extra: %s)"
                % (", ".join(missing) or "none", ", ".join(extra) or "none")
            )
        self.rows.append(dict(row))

    def extend(self, rows):
        for row in rows:
            self.append(row)

    def column(self, name):
        if name not in self.columns:
            raise SchemaError("no such column: %r" % name)
        return [row[name] for row in self.rows]

    def to_csv(self, path, truncated=False):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_fmt(row[c]) for c in self.columns])
            if truncated:
                fh.write(TRUNCATION_COMMENT + "\n")
        return path


PLOT_SCHEMAS = {
    "aoi_curves": ("lambda", "discipline", "avg_aoi"),
    "training_curves": ("episode", "agent", "cum_reward"),
    "cluster_map": ("id", "kind", "cluster", "x", "y"),
    "trajectory_compare": ("window_start", "window_end", "uav_a", "uav_b", "frechet"),
}


def emit_plot_data(metrics: MetricsFrame, kind: str, path):
    """Project a metrics frame onto one plot kind's documented schema."""
    if kind not in PLOT_SCHEMAS:
        raise ValueError(
            "unknown plot kind %r, choices are %s" % (kind, ", ".join(sorted(PLOT_SCHEMAS)))
        )
    cols = PLOT_SCHEMAS[kind]
    missing = [c for c in cols if c not in metrics.columns]
    if missing:
        raise SchemaError(
            "plot kind %r needs missing columns: %s" % (kind, ", ".join(missing))
        )
    rows = [{c: row[c] for c in cols} for row in metrics.rows]
    if kind == "training_curves":
        rows.sort(key=lambda r: (r["episode"], r["agent"]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_fmt(row[c]) for c in cols])
    return path


class JsonlWriter:
    """Streaming JSON-lines writer; one compact object per line."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w")

    def write(self, obj):
        self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")

    def close(self, truncated=False):
        if truncated:
            self.write({"truncated": True})
        self._fh.close()


def _append_truncation(path):
    with open(path, "a") as fh:
        fh.write(TRUNCATION_COMMENT + "\n")


def _write_summary(out_dir, doc, truncated=False):
    doc = dict(doc)
    doc["truncated"] = bool(truncated)
    path = os.path.join(out_dir, "summary.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# shared scripted-sensing plumbing


def _target_window_trajs(world, length):
    """Recent motion window per target, labeled by target id."""
    trajs = []
    for tgt in world.targets:
        pts = tgt.history.points
        if pts.shape[0] > length:
            pts = pts[-length:]
        trajs.append(Trajectory(pts, label=str(tgt.id)))
    return trajs


def _cluster_targets(world, cfg, tag):
    trajs = _target_window_trajs(world, cfg.comparison_length)
    matrix = pairwise_frechet(trajs)
    k = min(cfg.cluster_k, len(trajs))
    clustering = k_medoids(matrix, k, seed=derive_seed(cfg.seed, 7, int(tag)))
    report = cluster_report(clustering, trajs)
    return trajs, matrix, clustering, report


def _refresh_references(tracks, cfg, seed):
    """Cluster a UAV's mature tracks; medoid trajectories become the
    reference patterns new data is scored against."""
    eligible = [t for t in tracks if len(t) >= cfg.min_track_points]
    if not eligible:
        return None
    trajs = [t.to_trajectory() for t in eligible]
    matrix = pairwise_frechet(trajs)
    clustering = k_medoids(matrix, min(cfg.cluster_k, len(trajs)), seed=seed)
    return [trajs[m] for m in clustering.medoids]


def _cluster_map_frame(trajs, clustering):
    frame = MetricsFrame(["id", "kind", "cluster", "x", "y"])
    for idx, traj in enumerate(trajs):
        last = traj.points[-1]
        frame.append(
            {
                "id": traj.label if traj.label is not None else str(idx),
                "kind": "member",
                "cluster": int(clustering.assignment[idx]),
                "x": float(last[0]),
                "y": float(last[1]),
            }
        )
    for c, centroid in enumerate(clustering.centroids or []):
        frame.append(
            {
                "id": "c%d" % c,
                "kind": "centroid",
                "cluster": c,
                "x": centroid.x,
                "y": centroid.y,
            }
        )
    return frame


def _trajectory_compare_frame(world, window=20, stride=10):
    """Sliding-window Frechet distance between every UAV path pair."""
    frame = MetricsFrame(PLOT_SCHEMAS["trajectory_compare"])
    uavs = world.uavs
    for ai in range(len(uavs)):
        for bi in range(ai + 1, len(uavs)):
            pa = uavs[ai].history.points
            pb = uavs[bi].history.points
            m = min(pa.shape[0], pb.shape[0])
            if m < 2:
                continue
            for start in range(0, max(1, m - 1), stride):
                end = min(start + window, m)
                if end - start < 2:
                    break
                frame.append(
                    {
                        "window_start": float(pa[start, 2]),
                        "window_end": float(pa[end - 1, 2]),
                        "uav_a": uavs[ai].id,
                        "uav_b": uavs[bi].id,
                        "frechet": discrete_frechet(pa[start:end], pb[start:end]),
                    }
                )
    return frame


# ---------------------------------------------------------------------------
# simulate


def _cmd_simulate(cfg, out_dir):
    world = init_world(cfg)
    n = len(world.uavs)
    waveforms = default_waveforms(cfg)
    discipline = Discipline[cfg.queue_discipline]
    link_cls = GatedLink if cfg.gated else DirectLink
    links = [
        link_cls(
            cfg.frechet_threshold,
            waveforms,
            batch=cfg.deferred_batch,
            capacity=cfg.deferred_capacity,
            discipline=discipline,
            snr_floor=cfg.snr_floor,
            snr_ref=cfg.snr_ref,
        )
        for _ in range(n)
    ]
    tracks = [[] for _ in range(n)]
    params = [TrackParams(cfg.gate_radius, cfg.t_stale, 0.0, 0) for _ in range(n)]
    trackers = [AoiTracker(sources=(i,)) for i in range(n)]
    references = [[] for _ in range(n)]
    controller = ModeController(cfg.switch_window, cfg.switch_rho, cfg.switch_hysteresis)
    recent_scores: list = []
    emphasis_switches = 0

    aoi_frame = MetricsFrame(
        ["time", "uav_id", "discipline", "inst_age", "avg_age", "delivered", "dropped", "energy_j"]
    )
    det_rows: list = []
    snr = cfg.snr_base - cfg.snr_weather_penalty
    report = None
    pkt_id = 0
    steps_done = 0
    truncated = False

    snap = JsonlWriter(os.path.join(out_dir, "snapshots.jsonl"))
    try:
        snap.write(snapshot(world))
        for step in range(1, cfg.sim_steps + 1):
            if (step - 1) % cfg.cluster_refresh == 0:
                report = _cluster_targets(world, cfg, step - 1)[3]
            for u in world.uavs:
                step_uav(u, plan_sensing_path(u, report, world.paths), world)
            step_targets(world)
            now = world.time
            for i, u in enumerate(world.uavs):
                dets = radar_scan(u, world, cfg.snr_floor, cfg.snr_ref)
                det_rows.extend((now, u.id, d) for d in dets)
                params[i].now = now
                tracks[i] = update_tracks(tracks[i], dets, params[i])
                if step % cfg.cluster_refresh == 0:
                    refs = _refresh_references(
                        tracks[i], cfg, seed=derive_seed(cfg.seed, 11, step, i)
                    )
                    if refs is not None:
                        references[i] = refs
                if step % cfg.traffic_every == 0:
                    offer = top_offer(u, tracks[i], references[i], cfg)
                    if offer is not None:
                        _, top = offer
                        links[i].offer(
                            Packet(
                                id=pkt_id,
                                source_uav=i,
                                gen_time=now,
                                size_bits=cfg.packet_size_bits,
                                relevance=top,
                            ),
                            now,
                        )
                        pkt_id += 1
                        recent_scores.append(top)
                        if len(recent_scores) >= controller.window:
                            before = controller.emphasis
                            controller = mode_switch(controller, recent_scores)
                            if controller.emphasis is not before:
                                emphasis_switches += 1
                delivered, energy = links[i].step(snr, world.dt, now)
                u.drain(energy)
                # bit-identical duplicates deliver nothing new: no age reset
                useful = [p for p in delivered if p.distance() != 0.0]
                trackers[i].update(useful, now, world.dt)
                aoi_frame.append(
                    {
                        "time": now,
                        "uav_id": u.id,
                        "discipline": cfg.queue_discipline,
                        "inst_age": trackers[i].age(now, source=i),
                        "avg_age": trackers[i].average(),
                        "delivered": links[i].queue.delivered,
                        "dropped": links[i].queue.dropped + links[i].deferred_dropped,
                        "energy_j": links[i].energy_j,
                    }
                )
            snap.write(snapshot(world))
            steps_done = step
    except KeyboardInterrupt:
        truncated = True
    snap.close(truncated=truncated)

    artifacts = {"snapshots": snap.path}
    artifacts["aoi_metrics"] = aoi_frame.to_csv(
        os.path.join(out_dir, "aoi_metrics.csv"), truncated=truncated
    )
    det_path = os.path.join(out_dir, "detections.csv")
    write_detections_csv(det_path, det_rows)
    if truncated:
        _append_truncation(det_path)
    artifacts["detections"] = det_path

    trajs, _, clustering, _ = _cluster_targets(world, cfg, cfg.sim_steps)
    clusters_path = os.path.join(out_dir, "clusters.csv")
    write_clusters_csv(clusters_path, clustering, trajs)
    artifacts["clusters"] = clusters_path
    artifacts["cluster_map"] = emit_plot_data(
        _cluster_map_frame(trajs, clustering),
        "cluster_map",
        os.path.join(out_dir, "cluster_map.csv"),
    )
    if n >= 2:
        artifacts["trajectory_compare"] = emit_plot_data(
            _trajectory_compare_frame(world),
            "trajectory_compare",
            os.path.join(out_dir, "trajectory_compare.csv"),
        )

    artifacts["summary"] = _write_summary(
        out_dir,
        {
            "command": "simulate",
            "seed": cfg.seed,
            "steps": steps_done,
            "uav_count": n,
            "target_count": len(world.targets),
            "detections": len(det_rows),
            "delivered": sum(l.queue.delivered for l in links),
            "dropped": sum(l.queue.dropped for l in links),
            "deferred_dropped": sum(l.deferred_dropped for l in links),
            "bits_on_air": sum(l.bits_on_air for l in links),
            "comm_energy_j": sum(l.energy_j for l in links),
            "battery_spent_j": sum(cfg.battery_j - u.battery for u in world.uavs),
            "avg_aoi": [t.average() for t in trackers],
            "gated": bool(cfg.gated),
            "emphasis": controller.emphasis.value,
            "emphasis_switches": emphasis_switches,
        },
        truncated=truncated,
    )
    if truncated:
        raise KeyboardInterrupt
    return artifacts


# ---------------------------------------------------------------------------
# training


def _stack_dqn(items):
    obs = np.stack([it[0] for it in items])
    acts = np.asarray([it[1] for it in items], dtype=np.int64)
    rews = np.asarray([it[2] for it in items], dtype=np.float64)
    nxt = np.stack([it[3] for it in items])
    dones = np.asarray([it[4] for it in items], dtype=np.float64)
    return obs, acts, rews, nxt, dones


def _stack_maddpg(items, n_agents):
    return {
        "obs": [np.stack([it[0][i] for it in items]) for i in range(n_agents)],
        "acts": [np.stack([it[1][i] for it in items]) for i in range(n_agents)],
        "rews": np.stack([it[2] for it in items]),
        "next_obs": [np.stack([it[3][i] for it in items]) for i in range(n_agents)],
        "dones": np.asarray([it[4] for it in items], dtype=np.float64),
    }


def train_mode1(cfg, step_writer=None):
    """Independent-replay DQN over the sensing MDP.

    Cooperative reward sharing is on whenever cfg.coop_weight > 0; the
    returned team_raw series is always the unshaped team sum so shaped
    and unshaped runs compare on the same scale.
    """
    env = Mode1Env(cfg, cooperative=cfg.coop_weight > 0)
    n = env.n_agents
    children = np.random.SeedSequence((int(cfg.seed), 0xD41)).spawn(n + 2)
    agents = [
        DqnAgent(
            env.obs_dim,
            env.n_actions,
            cfg.layer_sizes,
            gamma=cfg.gamma_dqn,
            lr=cfg.lr_dqn,
            target_sync=cfg.target_sync,
            rng=np.random.default_rng(children[i]),
        )
        for i in range(n)
    ]
    act_rng = np.random.default_rng(children[n])
    replay_rng = np.random.default_rng(children[n + 1])
    buffers = [ReplayBuffer(cfg.replay_capacity) for _ in range(n)]

    rows: list = []
    team_raw: list = []
    truncated = False
    gstep = 0
    episodes_run = 0
    try:
        for ep in range(cfg.episodes):
            eps = epsilon_at(
                ep, cfg.episodes, cfg.epsilon_start, cfg.epsilon_min, cfg.epsilon_fraction
            )
            obs = env.reset(ep)
            cum = np.zeros(n)
            losses = np.zeros(n)
            raw_sum = 0.0
            for step in range(cfg.episode_steps):
                acts = [agents[i].act(obs[i], act_rng, epsilon=eps) for i in range(n)]
                nxt, rews, done, info = env.step(acts)
                for i in range(n):
                    buffers[i].push((obs[i], acts[i], rews[i], nxt[i], 1.0 if done else 0.0))
                cum += np.asarray(rews)
                raw_sum += float(np.sum(info["raw_rewards"]))
                gstep += 1
                if gstep >= cfg.warmup_steps and gstep % cfg.train_every == 0:
                    for i in range(n):
                        if len(buffers[i]) >= cfg.batch_size:
                            batch = _stack_dqn(buffers[i].sample(replay_rng, cfg.batch_size))
                            losses[i] = agents[i].update(batch)
                if step_writer is not None:
                    step_writer.write(
                        {
                            "episode": ep,
                            "step": step + 1,
                            "mode": 1,
                            "rewards": [float(r) for r in rews],
                            "events": info["events"],
                        }
                    )
                obs = nxt
                if done:
                    break
            for i in range(n):
                rows.append((ep, i, float(cum[i]), float(losses[i])))
            team_raw.append(raw_sum)
            episodes_run = ep + 1
    except KeyboardInterrupt:
        truncated = True
    nets = {}
    for i, ag in enumerate(agents):
        nets["agent%d_online" % i] = ag.online
        nets["agent%d_target" % i] = ag.target
    return {
        "mode": 1,
        "kind": "dqn",
        "agents": agents,
        "nets": nets,
        "rows": rows,
        "team_raw": team_raw,
        "episodes_run": episodes_run,
        "rng_state": act_rng.bit_generator.state,
        "truncated": truncated,
    }


def train_mode2(cfg, step_writer=None):
    """Joint-replay MADDPG over the communication MDP."""
    env = Mode2Env(cfg)
    n = env.n_agents
    obs_dim = env.obs_dim
    act_dim = Mode2Env.ACT_DIM
    joint_dim = n * (obs_dim + act_dim)
    children = np.random.SeedSequence((int(cfg.seed), 0xD42)).spawn(n + 2)
    agents = [
        MaddpgAgent(
            obs_dim,
            act_dim,
            cfg.layer_sizes,
            joint_dim,
            gamma=cfg.gamma_maddpg,
            lr=cfg.lr_maddpg,
            tau=cfg.tau,
            rng=np.random.default_rng(children[i]),
        )
        for i in range(n)
    ]
    act_rng = np.random.default_rng(children[n])
    replay_rng = np.random.default_rng(children[n + 1])
    buffer = ReplayBuffer(cfg.replay_capacity)

    rows: list = []
    team_raw: list = []
    truncated = False
    gstep = 0
    episodes_run = 0
    try:
        for ep in range(cfg.episodes):
            sigma = cfg.noise_sigma * (cfg.noise_decay ** ep)
            obs = env.reset(ep)
            cum = np.zeros(n)
            losses = np.zeros(n)
            raw_sum = 0.0
            for step in range(cfg.episode_steps):
                acts = [
                    agents[i].act(obs[i], act_rng, explore=True, noise_sigma=sigma)
                    for i in range(n)
                ]
                nxt, rews, done, info = env.step(acts)
                buffer.push((obs, acts, np.asarray(rews), nxt, 1.0 if done else 0.0))
                cum += np.asarray(rews)
                raw_sum += float(np.sum(info["raw_rewards"]))
                gstep += 1
                if (
                    gstep >= cfg.warmup_steps
                    and gstep % cfg.train_every == 0
                    and len(buffer) >= cfg.batch_size
                ):
                    batch = _stack_maddpg(buffer.sample(replay_rng, cfg.batch_size), n)
                    _, (critic_losses, _) = maddpg_update(agents, batch, tau=cfg.tau)
                    losses = np.asarray(critic_losses)
                if step_writer is not None:
                    step_writer.write(
                        {
                            "episode": ep,
                            "step": step + 1,
                            "mode": 2,
                            "rewards": [float(r) for r in rews],
                            "events": info["events"],
                        }
                    )
                obs = nxt
                if done:
                    break
            for i in range(n):
                rows.append((ep, i, float(cum[i]), float(losses[i])))
            team_raw.append(raw_sum)
            episodes_run = ep + 1
    except KeyboardInterrupt:
        truncated = True
    nets = {}
    for i, ag in enumerate(agents):
        nets["agent%d_actor" % i] = ag.actor
        nets["agent%d_critic" % i] = ag.critic
    return {
        "mode": 2,
        "kind": "maddpg",
        "agents": agents,
        "nets": nets,
        "rows": rows,
        "team_raw": team_raw,
        "episodes_run": episodes_run,
        "rng_state": act_rng.bit_generator.state,
        "truncated": truncated,
    }


def _decile_means(values):
    if not values:
        return 0.0, 0.0
    k = max(1, len(values) // 10)
    return float(np.mean(values[:k])), float(np.mean(values[-k:]))


def _cmd_train(cfg, out_dir, mode):
    writer = JsonlWriter(os.path.join(out_dir, "episodes.jsonl"))
    trainer = train_mode1 if mode == 1 else train_mode2
    result = trainer(cfg, step_writer=writer)
    truncated = result["truncated"]
    writer.close(truncated=truncated)

    artifacts = {"episodes": writer.path}
    curves_path = os.path.join(out_dir, "curves.csv")
    write_curves_csv(curves_path, result["rows"])
    if truncated:
        _append_truncation(curves_path)
    artifacts["curves"] = curves_path

    frame = MetricsFrame(PLOT_SCHEMAS["training_curves"])
    for ep, agent_id, cum_reward, _ in result["rows"]:
        frame.append({"episode": ep, "agent": agent_id, "cum_reward": cum_reward})
    artifacts["training_curves"] = emit_plot_data(
        frame, "training_curves", os.path.join(out_dir, "training_curves.csv")
    )

    ckpt_path = os.path.join(out_dir, "checkpoint.json")
    save_checkpoint(
        ckpt_path,
        result["kind"],
        result["nets"],
        meta={
            "episodes_run": result["episodes_run"],
            "seed": cfg.seed,
            "rng_state": result["rng_state"],
        },
    )
    artifacts["checkpoint"] = ckpt_path

    first, last = _decile_means(result["team_raw"])
    artifacts["summary"] = _write_summary(
        out_dir,
        {
            "command": "train-mode%d" % mode,
            "seed": cfg.seed,
            "episodes_run": result["episodes_run"],
            "team_raw_first_decile": first,
            "team_raw_last_decile": last,
            "improved": last > first,
        },
        truncated=truncated,
    )
    if truncated:
        raise KeyboardInterrupt
    return artifacts


# ---------------------------------------------------------------------------
# aoi-bench


def _cmd_aoi_bench(cfg, out_dir):
    frame = MetricsFrame(["lambda", "discipline", "avg_aoi", "delivered", "dropped"])
    truncated = False
    try:
        for lam in cfg.aoi_lambdas:
            for disc in (
                Discipline.FCFS,
                Discipline.LCFS_S,
                Discipline.LCFS_W,
                Discipline.PRIORITY,
            ):
                avg, delivered, dropped = mm1_aoi(
                    lam, cfg.aoi_mu, cfg.aoi_horizon, disc, cfg.seed
                )
                frame.append(
                    {
                        "lambda": float(lam),
                        "discipline": disc.name,
                        "avg_aoi": avg,
                        "delivered": delivered,
                        "dropped": dropped,
                    }
                )
    except KeyboardInterrupt:
        truncated = True
    artifacts = {
        "aoi_bench": frame.to_csv(os.path.join(out_dir, "aoi_bench.csv"), truncated=truncated)
    }
    artifacts["aoi_curves"] = emit_plot_data(
        frame, "aoi_curves", os.path.join(out_dir, "aoi_curves.csv")
    )
    if truncated:
        raise KeyboardInterrupt
    return artifacts


# ---------------------------------------------------------------------------
# cluster / frechet batch analytics


def _load_input_trajectories(cfg, input_path, command):
    path = input_path or cfg.input_csv
    if not path:
        raise ConfigError(
            "input_csv: the %s command needs a trajectory CSV (set input_csv "
            "in the config or pass --input)" % command
        )
    return load_trajectories_csv(path)


def _cmd_cluster(cfg, out_dir, input_path):
    trajs = _load_input_trajectories(cfg, input_path, "cluster")
    matrix = pairwise_frechet(trajs)
    k = min(cfg.cluster_k, len(trajs))
    clustering = k_medoids(matrix, k, seed=cfg.seed)
    clusters_path = os.path.join(out_dir, "clusters.csv")
    write_clusters_csv(clusters_path, clustering, trajs)
    artifacts = {"clusters": clusters_path}
    artifacts["cluster_map"] = emit_plot_data(
        _cluster_map_frame(trajs, clustering),
        "cluster_map",
        os.path.join(out_dir, "cluster_map.csv"),
    )
    artifacts["summary"] = _write_summary(
        out_dir,
        {
            "command": "cluster",
            "seed": cfg.seed,
            "n": len(trajs),
            "k": k,
            "cost": clustering.cost(matrix),
            "silhouette": silhouette_score(matrix, clustering),
        },
    )
    return artifacts


def _cmd_frechet(cfg, out_dir, input_path):
    trajs = _load_input_trajectories(cfg, input_path, "frechet")
    frame = MetricsFrame(["a", "b", "distance"])
    labels = [t.label if t.label is not None else str(i) for i, t in enumerate(trajs)]
    for i in range(len(trajs)):
        for j in range(i + 1, len(trajs)):
            frame.append(
                {"a": labels[i], "b": labels[j], "distance": discrete_frechet(trajs[i], trajs[j])}
            )
    return {"frechet": frame.to_csv(os.path.join(out_dir, "frechet.csv"))}


# ---------------------------------------------------------------------------
# scale-sweep


def _cmd_scale_sweep(cfg, out_dir):
    frame = MetricsFrame(
        [
            "uav_count",
            "steps",
            "detections",
            "mean_radial_err",
            "expected_radial_err",
            "radial_err_se",
            "mean_err_x",
            "mean_err_y",
            "sensor_sigma",
        ]
    )
    timing_rows: list = []
    truncated = False
    try:
        for count in cfg.sweep_uav_counts:
            sub = replace(cfg, uav_count=int(count))
            world = init_world(sub)
            report = None
            errs: list = []
            step_times: list = []
            for step in range(1, cfg.sweep_steps + 1):
                t0 = _time.perf_counter()
                if (step - 1) % cfg.cluster_refresh == 0:
                    report = _cluster_targets(world, sub, step - 1)[3]
                for u in world.uavs:
                    step_uav(u, plan_sensing_path(u, report, world.paths), world)
                step_targets(world)
                for u in world.uavs:
                    for det in radar_scan(u, world, cfg.snr_floor, cfg.snr_ref):
                        tgt = world.targets[det.target_id]
                        errs.append((det.measured.x - tgt.x, det.measured.y - tgt.y))
                step_times.append(_time.perf_counter() - t0)
            sigma = cfg.sensor_noise_sigma
            n_err = len(errs)
            if n_err:
                arr = np.asarray(errs)
                radial = np.hypot(arr[:, 0], arr[:, 1])
                mean_radial = float(radial.mean())
                mean_x = float(arr[:, 0].mean())
                mean_y = float(arr[:, 1].mean())
            else:
                mean_radial = mean_x = mean_y = 0.0
            # 2-D isotropic Gaussian noise: E|err| = sigma*sqrt(pi/2)
            expected = sigma * math.sqrt(math.pi / 2.0)
            se = (
                sigma * math.sqrt((4.0 - math.pi) / 2.0) / math.sqrt(n_err)
                if n_err
                else 0.0
            )
            frame.append(
                {
                    "uav_count": int(count),
                    "steps": cfg.sweep_steps,
                    "detections": n_err,
                    "mean_radial_err": mean_radial,
                    "expected_radial_err": expected,
                    "radial_err_se": se,
                    "mean_err_x": mean_x,
                    "mean_err_y": mean_y,
                    "sensor_sigma": float(sigma),
                }
            )
            times = np.asarray(step_times)
            timing_rows.append(
                (
                    int(count),
                    float(times.sum()),
                    float(times.mean() * 1e3),
                    float(np.median(times) * 1e3),
                )
            )
    except KeyboardInterrupt:
        truncated = True
    artifacts = {
        "scale_sweep": frame.to_csv(
            os.path.join(out_dir, "scale_sweep.csv"), truncated=truncated
        )
    }
    timings_path = os.path.join(out_dir, "timings_local.csv")
    with open(timings_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["uav_count", "total_s", "mean_step_ms", "median_step_ms"])
        for row in timing_rows:
            writer.writerow([_fmt(v) for v in row])
        if truncated:
            fh.write(TRUNCATION_COMMENT + "\n")
    artifacts["timings_local"] = timings_path
    if truncated:
        raise KeyboardInterrupt
    return artifacts


# ---------------------------------------------------------------------------
# entry point


def run_scenario(config, command: str, out_dir, input_path=None):
    """Run one command and write its artifacts into out_dir.

    Returns {artifact name: path}.  A KeyboardInterrupt mid-run still
    leaves valid partial logs, each ending in a truncation marker, and
    then propagates.
    """
    if command not in COMMANDS:
        raise ValueError(
            "unknown command %r, choices are %s" % (command, ", ".join(COMMANDS))
        )
    cfg = config if isinstance(config, ScenarioConfig) else load_config(config)
    os.makedirs(out_dir, exist_ok=True)
    if command == "simulate":
        return _cmd_simulate(cfg, out_dir)
    if command == "train-mode1":
        return _cmd_train(cfg, out_dir, 1)
    if command == "train-mode2":
        return _cmd_train(cfg, out_dir, 2)
    if command == "aoi-bench":
        return _cmd_aoi_bench(cfg, out_dir)
    if command == "cluster":
        return _cmd_cluster(cfg, out_dir, input_path)
    if command == "frechet":
        return _cmd_frechet(cfg, out_dir, input_path)
    return _cmd_scale_sweep(cfg, out_dir)
