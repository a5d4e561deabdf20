"""Scenario configuration: strict JSON schema with full-field validation.

Unknown keys are rejected rather than ignored, and every constraint
violation names the offending field; silent fallback to defaults is the
main source of irreproducible experiments.
"""

import json
import os
from dataclasses import dataclass, field, fields
from typing import Optional


class ConfigError(Exception):
    """Schema or constraint violation; message names the field."""


DISC_NAMES = ("FCFS", "LCFS_S", "LCFS_W", "PRIORITY")
CLASS_NAMES = ("SLOW", "FAST", "ERRATIC")


@dataclass
class ScenarioConfig:
    seed: int = 0
    uav_count: int = 3
    target_count: int = 12
    target_class_mix: dict = field(
        default_factory=lambda: {"SLOW": 0.34, "FAST": 0.33, "ERRATIC": 0.33}
    )
    arena_width: float = 1000.0
    arena_height: float = 1000.0
    dt: float = 0.5
    episode_steps: int = 200
    episodes: int = 2000

    frechet_threshold: float = 25.0
    comparison_length: int = 32
    cluster_k: int = 3
    cluster_refresh: int = 20
    min_track_points: int = 4

    queue_discipline: str = "FCFS"
    waveform_high_rate: float = 10e6
    waveform_high_power: float = 15.0
    waveform_low_rate: float = 2e6
    waveform_low_power: float = 4.0
    snr_floor: float = 0.0
    snr_ref: float = 20.0
    packet_size_bits: float = 4e6
    traffic_every: int = 2
    gated: bool = False
    deferred_batch: int = 4
    deferred_capacity: int = 16

    radar_pri: float = 2.0
    radar_active_fraction: float = 0.5
    radar_range_max: float = 150.0
    gate_radius: float = 25.0
    t_stale: float = 5.0
    sensor_noise_sigma: float = 5.0
    snr_base: float = 20.0
    snr_weather_penalty: float = 0.0

    battery_j: float = 500000.0
    idle_power: float = 5.0
    cruise_power: float = 120.0
    radar_power: float = 30.0
    cruise_speed: float = 20.0

    spawn_center_count: int = 3
    spawn_weights: Optional[list] = None
    spawn_sigma: float = 40.0
    path_y_fractions: list = field(default_factory=lambda: [0.25, 0.5, 0.75])

    lr_dqn: float = 0.01
    lr_maddpg: float = 0.001
    gamma_dqn: float = 0.95
    gamma_maddpg: float = 0.99
    layer_sizes: list = field(default_factory=lambda: [128, 256, 128])
    replay_capacity: int = 50000
    batch_size: int = 64
    target_sync: int = 100
    tau: float = 0.01
    epsilon_start: float = 1.0
    epsilon_min: float = 0.05
    epsilon_fraction: float = 0.5
    noise_sigma: float = 0.2
    noise_decay: float = 0.999
    train_every: int = 1
    warmup_steps: int = 500
    coop_weight: float = 0.5
    history_h: int = 4

    detect_reward: float = 1.0
    time_cost: float = 0.01
    duplicate_penalty: float = 0.1
    latency_budget: int = 10
    novel_reward: float = 1.0
    subthreshold_reward: float = 0.2
    redundant_penalty: float = 0.5
    e_norm: float = 50.0
    a_norm: float = 20.0

    switch_window: int = 20
    switch_rho: float = 0.5
    switch_hysteresis: float = 0.05

    aoi_lambdas: list = field(default_factory=lambda: [0.3, 0.5, 0.8])
    aoi_mu: float = 1.0
    aoi_horizon: float = 1e6

    sweep_uav_counts: list = field(default_factory=lambda: [3, 10, 20, 30])
    sweep_steps: int = 150
    sim_steps: int = 200

    # trajectory CSV consumed by the cluster/frechet batch commands
    input_csv: Optional[str] = None


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return _is_int(v) or isinstance(v, float)


def _want_int(name, v, lo=None, hi=None):
    if not _is_int(v):
        raise ConfigError("%s: expected an integer, got %r" % (name, v))
    if lo is not None and v < lo:
        raise ConfigError("%s: must be >= %s, got %s" % (name, lo, v))
    if hi is not None and v > hi:
        raise ConfigError("%s: must be <= %s, got %s" % (name, hi, v))
    return v


def _want_float(name, v, lo=None, hi=None, lo_open=False):
    if not _is_num(v):
        raise ConfigError("%s: expected a number, got %r" % (name, v))
    v = float(v)
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(
            "%s: must be %s %s, got %s" % (name, ">" if lo_open else ">=", lo, v)
        )
    if hi is not None and v > hi:
        raise ConfigError("%s: must be <= %s, got %s" % (name, hi, v))
    return v


def _want_bool(name, v):
    if not isinstance(v, bool):
        raise ConfigError("%s: expected a boolean, got %r" % (name, v))
    return v


def _validate(cfg: ScenarioConfig):
    c = cfg
    c.seed = _want_int("seed", c.seed, 0)
    c.uav_count = _want_int("uav_count", c.uav_count, 1)
    c.target_count = _want_int("target_count", c.target_count, 1)
    if not isinstance(c.target_class_mix, dict) or not c.target_class_mix:
        raise ConfigError("target_class_mix: expected a non-empty object")
    for k, v in c.target_class_mix.items():
        if k not in CLASS_NAMES:
            raise ConfigError(
                "target_class_mix: unknown class %r (choices: %s)"
                % (k, ", ".join(CLASS_NAMES))
            )
        _want_float("target_class_mix.%s" % k, v, 0.0)
    if sum(c.target_class_mix.values()) <= 0:
        raise ConfigError("target_class_mix: weights must sum to > 0")
    c.arena_width = _want_float("arena_width", c.arena_width, 0.0, lo_open=True)
    c.arena_height = _want_float("arena_height", c.arena_height, 0.0, lo_open=True)
    c.dt = _want_float("dt", c.dt, 0.0, lo_open=True)
    c.episode_steps = _want_int("episode_steps", c.episode_steps, 1)
    c.episodes = _want_int("episodes", c.episodes, 1)

    c.frechet_threshold = _want_float("frechet_threshold", c.frechet_threshold, 0.0, lo_open=True)
    c.comparison_length = _want_int("comparison_length", c.comparison_length, 2)
    c.cluster_k = _want_int("cluster_k", c.cluster_k, 1)
    c.cluster_refresh = _want_int("cluster_refresh", c.cluster_refresh, 1)
    c.min_track_points = _want_int("min_track_points", c.min_track_points, 2)

    if c.queue_discipline not in DISC_NAMES:
        raise ConfigError(
            "queue_discipline: got %r, choices are %s"
            % (c.queue_discipline, ", ".join(DISC_NAMES))
        )
    c.waveform_high_rate = _want_float("waveform_high_rate", c.waveform_high_rate, 0.0, lo_open=True)
    c.waveform_high_power = _want_float("waveform_high_power", c.waveform_high_power, 0.0, lo_open=True)
    c.waveform_low_rate = _want_float("waveform_low_rate", c.waveform_low_rate, 0.0, lo_open=True)
    c.waveform_low_power = _want_float("waveform_low_power", c.waveform_low_power, 0.0, lo_open=True)
    if c.waveform_low_rate >= c.waveform_high_rate:
        raise ConfigError("waveform_low_rate: must be below waveform_high_rate")
    if c.waveform_low_power >= c.waveform_high_power:
        raise ConfigError("waveform_low_power: must be below waveform_high_power")
    c.snr_floor = _want_float("snr_floor", c.snr_floor)
    c.snr_ref = _want_float("snr_ref", c.snr_ref)
    if c.snr_ref <= c.snr_floor:
        raise ConfigError("snr_ref: must exceed snr_floor")
    c.packet_size_bits = _want_float("packet_size_bits", c.packet_size_bits, 0.0, lo_open=True)
    c.traffic_every = _want_int("traffic_every", c.traffic_every, 1)
    c.gated = _want_bool("gated", c.gated)
    c.deferred_batch = _want_int("deferred_batch", c.deferred_batch, 1)
    c.deferred_capacity = _want_int("deferred_capacity", c.deferred_capacity, 1)

    c.radar_pri = _want_float("radar_pri", c.radar_pri, 0.0, lo_open=True)
    c.radar_active_fraction = _want_float(
        "radar_active_fraction", c.radar_active_fraction, 0.0, 1.0, lo_open=True
    )
    c.radar_range_max = _want_float("radar_range_max", c.radar_range_max, 0.0, lo_open=True)
    c.gate_radius = _want_float("gate_radius", c.gate_radius, 0.0, lo_open=True)
    c.t_stale = _want_float("t_stale", c.t_stale, 0.0, lo_open=True)
    c.sensor_noise_sigma = _want_float("sensor_noise_sigma", c.sensor_noise_sigma, 0.0)
    c.snr_base = _want_float("snr_base", c.snr_base)
    c.snr_weather_penalty = _want_float("snr_weather_penalty", c.snr_weather_penalty, 0.0)

    c.battery_j = _want_float("battery_j", c.battery_j, 0.0, lo_open=True)
    c.idle_power = _want_float("idle_power", c.idle_power, 0.0)
    c.cruise_power = _want_float("cruise_power", c.cruise_power, 0.0)
    c.radar_power = _want_float("radar_power", c.radar_power, 0.0)
    c.cruise_speed = _want_float("cruise_speed", c.cruise_speed, 0.0, lo_open=True)

    c.spawn_center_count = _want_int("spawn_center_count", c.spawn_center_count, 1)
    if c.spawn_weights is not None:
        if not isinstance(c.spawn_weights, list) or len(c.spawn_weights) != c.spawn_center_count:
            raise ConfigError(
                "spawn_weights: expected a list of length spawn_center_count (%d)"
                % c.spawn_center_count
            )
        for i, w in enumerate(c.spawn_weights):
            _want_float("spawn_weights[%d]" % i, w, 0.0)
        if sum(c.spawn_weights) <= 0:
            raise ConfigError("spawn_weights: must sum to > 0")
    c.spawn_sigma = _want_float("spawn_sigma", c.spawn_sigma, 0.0)
    if not isinstance(c.path_y_fractions, list) or not c.path_y_fractions:
        raise ConfigError("path_y_fractions: expected a non-empty list")
    for i, f in enumerate(c.path_y_fractions):
        v = _want_float("path_y_fractions[%d]" % i, f)
        if not (0.0 < v < 1.0):
            raise ConfigError("path_y_fractions[%d]: must lie in (0, 1)" % i)

    c.lr_dqn = _want_float("lr_dqn", c.lr_dqn, 0.0, lo_open=True)
    c.lr_maddpg = _want_float("lr_maddpg", c.lr_maddpg, 0.0, lo_open=True)
    c.gamma_dqn = _want_float("gamma_dqn", c.gamma_dqn, 0.0)
    c.gamma_maddpg = _want_float("gamma_maddpg", c.gamma_maddpg, 0.0)
    if c.gamma_dqn >= 1.0:
        raise ConfigError("gamma_dqn: must be below 1")
    if c.gamma_maddpg >= 1.0:
        raise ConfigError("gamma_maddpg: must be below 1")
    if not isinstance(c.layer_sizes, list) or not c.layer_sizes:
        raise ConfigError("layer_sizes: expected a non-empty list of hidden sizes")
    for i, s in enumerate(c.layer_sizes):
        _want_int("layer_sizes[%d]" % i, s, 1)
    c.replay_capacity = _want_int("replay_capacity", c.replay_capacity, 1)
    c.batch_size = _want_int("batch_size", c.batch_size, 1)
    c.target_sync = _want_int("target_sync", c.target_sync, 1)
    c.tau = _want_float("tau", c.tau, 0.0, 1.0, lo_open=True)
    c.epsilon_start = _want_float("epsilon_start", c.epsilon_start, 0.0, 1.0)
    c.epsilon_min = _want_float("epsilon_min", c.epsilon_min, 0.0, 1.0)
    if c.epsilon_min > c.epsilon_start:
        raise ConfigError("epsilon_min: must not exceed epsilon_start")
    c.epsilon_fraction = _want_float("epsilon_fraction", c.epsilon_fraction, 0.0, 1.0, lo_open=True)
    c.noise_sigma = _want_float("noise_sigma", c.noise_sigma, 0.0)
    c.noise_decay = _want_float("noise_decay", c.noise_decay, 0.0, 1.0, lo_open=True)
    c.train_every = _want_int("train_every", c.train_every, 1)
    c.warmup_steps = _want_int("warmup_steps", c.warmup_steps, 0)
    c.coop_weight = _want_float("coop_weight", c.coop_weight, 0.0)
    c.history_h = _want_int("history_h", c.history_h, 1)

    c.detect_reward = _want_float("detect_reward", c.detect_reward)
    c.time_cost = _want_float("time_cost", c.time_cost, 0.0)
    c.duplicate_penalty = _want_float("duplicate_penalty", c.duplicate_penalty, 0.0)
    c.latency_budget = _want_int("latency_budget", c.latency_budget, 1)
    c.novel_reward = _want_float("novel_reward", c.novel_reward)
    c.subthreshold_reward = _want_float("subthreshold_reward", c.subthreshold_reward)
    c.redundant_penalty = _want_float("redundant_penalty", c.redundant_penalty, 0.0)
    c.e_norm = _want_float("e_norm", c.e_norm, 0.0, lo_open=True)
    c.a_norm = _want_float("a_norm", c.a_norm, 0.0, lo_open=True)

    c.switch_window = _want_int("switch_window", c.switch_window, 1)
    c.switch_rho = _want_float("switch_rho", c.switch_rho, 0.0, 1.0, lo_open=True)
    if c.switch_rho >= 1.0:
        raise ConfigError("switch_rho: must lie in (0, 1)")
    c.switch_hysteresis = _want_float("switch_hysteresis", c.switch_hysteresis, 0.0)

    if not isinstance(c.aoi_lambdas, list) or not c.aoi_lambdas:
        raise ConfigError("aoi_lambdas: expected a non-empty list")
    for i, lam in enumerate(c.aoi_lambdas):
        _want_float("aoi_lambdas[%d]" % i, lam, 0.0, lo_open=True)
    c.aoi_mu = _want_float("aoi_mu", c.aoi_mu, 0.0, lo_open=True)
    c.aoi_horizon = _want_float("aoi_horizon", c.aoi_horizon, 0.0, lo_open=True)

    if not isinstance(c.sweep_uav_counts, list) or not c.sweep_uav_counts:
        raise ConfigError("sweep_uav_counts: expected a non-empty list")
    for i, u in enumerate(c.sweep_uav_counts):
        _want_int("sweep_uav_counts[%d]" % i, u, 1)
    c.sweep_steps = _want_int("sweep_steps", c.sweep_steps, 1)
    c.sim_steps = _want_int("sim_steps", c.sim_steps, 1)

    if c.input_csv is not None and not isinstance(c.input_csv, str):
        raise ConfigError("input_csv: expected a path string or null")
    return c


_FIELD_NAMES = [f.name for f in fields(ScenarioConfig)]


def load_config(source) -> ScenarioConfig:
    """Parse JSON (a dict, a JSON string, or a file path) into a config.

    Applies defaults, rejects unknown keys, and validates every field;
    all failures raise ConfigError naming the field.
    """
    if isinstance(source, ScenarioConfig):
        return _validate(source)
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            if not os.path.exists(text):
                raise ConfigError("config file not found: %s" % text)
            with open(text) as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("invalid JSON: %s" % exc) from exc
    if not isinstance(doc, dict):
        raise ConfigError("top-level config must be a JSON object")
    unknown = [k for k in doc if k not in _FIELD_NAMES]
    if unknown:
        raise ConfigError("unknown config field %r" % unknown[0])
    cfg = ScenarioConfig(**doc)
    return _validate(cfg)


def serialize(cfg: ScenarioConfig) -> str:
    """Canonical JSON with every field, defaults included."""
    doc = {name: getattr(cfg, name) for name in _FIELD_NAMES}
    return json.dumps(doc, indent=2)


def config_dict(cfg: ScenarioConfig) -> dict:
    return {name: getattr(cfg, name) for name in _FIELD_NAMES}
