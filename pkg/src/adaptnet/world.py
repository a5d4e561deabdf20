"""Time-stepped simulation core: targets, UAVs, environment, seeded RNG.

Step order contract (enforced by the mode environments and the harness):
within one step of length dt, every UAV first executes its motion command
via step_uav, then step_targets advances all targets and bumps world.time
by dt, then radar scans run at the new time.  All randomness flows from
numpy Generators spawned off the scenario seed: stream 0 drives placement
and target motion, stream 1 + i drives UAV i's radar.  Every step draws
the same number of variates for every entity whether or not they are
used, so replaying a seed replays the exact stream.
"""

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .trajectory import Trajectory


class TargetClass(IntEnum):
    SLOW = 0
    FAST = 1
    ERRATIC = 2


# per-class (speed cap m/s, per-step positional noise sigma m)
CLASS_SPEED_CAP = {TargetClass.SLOW: 2.0, TargetClass.FAST: 12.0, TargetClass.ERRATIC: 8.0}
CLASS_NOISE_SIGMA = {TargetClass.SLOW: 0.2, TargetClass.FAST: 1.0, TargetClass.ERRATIC: 1.5}
ERRATIC_RESAMPLE_P = 0.1

HOLD = -1


@dataclass
class Environment:
    arena_w: float
    arena_h: float
    sensor_noise_sigma: float
    snr_base: float
    snr_weather_penalty: float
    seed: int


@dataclass
class RadarState:
    """Duty-cycled radar: active while (time mod pri) < active_fraction * pri."""

    pri: float
    active_fraction: float
    range_max: float
    phase: float = 0.0

    def is_active(self, time: float) -> bool:
        self.phase = time % self.pri
        return self.phase < self.active_fraction * self.pri


class Target:
    def __init__(self, target_id, cls, x, y, vx, vy, t0=0.0):
        self.id = target_id
        self.cls = TargetClass(cls)
        self.x = x
        self.y = y
        self.vx = vx
        self.vy = vy
        self._history = [(x, y, t0)]

    @property
    def history(self) -> Trajectory:
        return Trajectory(np.asarray(self._history), label="t%d" % self.id)

    def speed(self) -> float:
        return math.hypot(self.vx, self.vy)


class Uav:
    def __init__(self, uav_id, x, y, battery, radar: RadarState, t0=0.0):
        self.id = uav_id
        self.x = x
        self.y = y
        self.battery = battery
        self.radar = radar
        self.assigned_path = 0
        self.active = True
        self._wp = 0          # current waypoint index on the assigned path
        self._dir = 1         # patrol direction along the waypoint list
        self._history = [(x, y, t0)]

    @property
    def history(self) -> Trajectory:
        return Trajectory(np.asarray(self._history), label="u%d" % self.id)

    def drain(self, joules: float):
        """Spend energy; an exhausted UAV goes inactive."""
        self.battery = max(0.0, self.battery - joules)
        if self.battery <= 0.0:
            self.active = False


class World:
    def __init__(self, time, dt, uavs, targets, env, rng, uav_rngs, paths, energy):
        self.time = time
        self.dt = dt
        self.uavs = uavs
        self.targets = targets
        self.env = env
        self.rng = rng
        self.uav_rngs = uav_rngs
        self.paths = paths
        self.energy = energy  # dict: idle_power, cruise_power, radar_power, cruise_speed
        self.steps = 0


def _uav_grid(count, w, h):
    """Deterministic grid placement, row-major from the lower-left."""
    cols = math.ceil(math.sqrt(count))
    rows = math.ceil(count / cols)
    out = []
    for i in range(count):
        r, c = divmod(i, cols)
        out.append(((c + 1) * w / (cols + 1), (r + 1) * h / (rows + 1)))
    return out


def _apportion(total, weights):
    """Largest-remainder split of `total` items across weights."""
    w = np.asarray(weights, dtype=np.float64)
    w = w / w.sum()
    raw = w * total
    counts = np.floor(raw).astype(int)
    rem = total - counts.sum()
    order = np.argsort(-(raw - counts), kind="stable")
    for i in range(rem):
        counts[order[i]] += 1
    return counts


def _pick(weights_cum, u):
    for i, c in enumerate(weights_cum):
        if u <= c:
            return i
    return len(weights_cum) - 1


def make_paths(config):
    """The predefined sensing trajectories: horizontal patrol lines."""
    w, h = config.arena_width, config.arena_height
    return [
        np.array([[0.1 * w, frac * h], [0.9 * w, frac * h]])
        for frac in config.path_y_fractions
    ]


def init_world(config) -> "World":
    """Build the initial world: UAVs on a grid, targets from the seed."""
    ss = np.random.SeedSequence(config.seed)
    children = ss.spawn(1 + config.uav_count)
    rng = np.random.default_rng(children[0])
    uav_rngs = [np.random.default_rng(c) for c in children[1:]]

    env = Environment(
        arena_w=config.arena_width,
        arena_h=config.arena_height,
        sensor_noise_sigma=config.sensor_noise_sigma,
        snr_base=config.snr_base,
        snr_weather_penalty=config.snr_weather_penalty,
        seed=config.seed,
    )

    uavs = []
    for i, (x, y) in enumerate(_uav_grid(config.uav_count, env.arena_w, env.arena_h)):
        radar = RadarState(
            pri=config.radar_pri,
            active_fraction=config.radar_active_fraction,
            range_max=config.radar_range_max,
        )
        uavs.append(Uav(i, x, y, config.battery_j, radar))

    # spawn centers in the central region, then jittered members
    centers = []
    for _ in range(config.spawn_center_count):
        cx = 0.25 * env.arena_w + 0.5 * env.arena_w * rng.random()
        cy = 0.25 * env.arena_h + 0.5 * env.arena_h * rng.random()
        centers.append((cx, cy))
    weights = config.spawn_weights or [1.0] * config.spawn_center_count
    counts = _apportion(config.target_count, weights)
    center_of = []
    for c, cnt in enumerate(counts):
        center_of.extend([c] * int(cnt))

    names = list(config.target_class_mix.keys())
    probs = np.asarray([config.target_class_mix[k] for k in names], dtype=np.float64)
    cum = np.cumsum(probs / probs.sum())

    targets = []
    for i in range(config.target_count):
        off = rng.standard_normal(2) * config.spawn_sigma
        u_cls = rng.random()
        u_speed = rng.random()
        u_head = rng.random()
        cx, cy = centers[center_of[i]]
        x = min(max(cx + off[0], 0.0), env.arena_w)
        y = min(max(cy + off[1], 0.0), env.arena_h)
        cls = TargetClass[names[_pick(cum, u_cls)]]
        speed = CLASS_SPEED_CAP[cls] * (0.3 + 0.7 * u_speed)
        heading = 2.0 * math.pi * u_head
        targets.append(
            Target(i, cls, x, y, speed * math.cos(heading), speed * math.sin(heading))
        )

    energy = {
        "idle_power": config.idle_power,
        "cruise_power": config.cruise_power,
        "radar_power": config.radar_power,
        "cruise_speed": config.cruise_speed,
    }
    return World(0.0, config.dt, uavs, targets, env, rng, uav_rngs, make_paths(config), energy)


def _reflect(pos, vel, lo, hi):
    # fold back into [lo, hi], flipping velocity on each bounce
    while pos < lo or pos > hi:
        if pos < lo:
            pos = 2 * lo - pos
            vel = -vel
        else:
            pos = 2 * hi - pos
            vel = -vel
    return pos, vel


def step_targets(world: World) -> World:
    """Advance every target by one dt and bump world.time.

    Draw order is fixed: for each target in id order, two normals, one
    uniform (erratic heading coin), one uniform (new heading), consumed
    regardless of class so seed replay is draw-for-draw identical.
    """
    t_new = world.time + world.dt
    for tgt in world.targets:
        noise = world.rng.standard_normal(2)
        u_coin = world.rng.random()
        u_head = world.rng.random()
        if tgt.cls == TargetClass.ERRATIC and u_coin < ERRATIC_RESAMPLE_P:
            spd = tgt.speed()
            heading = 2.0 * math.pi * u_head
            tgt.vx = spd * math.cos(heading)
            tgt.vy = spd * math.sin(heading)
        sigma = CLASS_NOISE_SIGMA[tgt.cls]
        x = tgt.x + tgt.vx * world.dt + noise[0] * sigma
        y = tgt.y + tgt.vy * world.dt + noise[1] * sigma
        x, tgt.vx = _reflect(x, tgt.vx, 0.0, world.env.arena_w)
        y, tgt.vy = _reflect(y, tgt.vy, 0.0, world.env.arena_h)
        tgt.x, tgt.y = x, y
        tgt._history.append((x, y, t_new))
    world.time = t_new
    world.steps += 1
    return world


def step_uav(uav: Uav, action: int, world: World) -> Uav:
    """Execute one motion command: HOLD or a predefined path index.

    The UAV patrols the selected waypoint polyline at cruise speed,
    reversing at the ends.  Battery pays motion power plus radar power
    when the coming scan instant falls in the active window.  An
    exhausted UAV ignores commands.
    """
    if action != HOLD and not (0 <= action < len(world.paths)):
        raise ValueError("unknown path index %r" % (action,))
    t_next = world.time + world.dt
    if not uav.active:
        uav._history.append((uav.x, uav.y, t_next))
        return uav

    moving = action != HOLD
    if moving:
        if action != uav.assigned_path:
            uav.assigned_path = action
            wps = world.paths[action]
            d = np.hypot(wps[:, 0] - uav.x, wps[:, 1] - uav.y)
            uav._wp = int(np.argmin(d))
            uav._dir = 1 if uav._wp == 0 else -1
        wps = world.paths[uav.assigned_path]
        remaining = world.energy["cruise_speed"] * world.dt
        guard = 0
        while remaining > 1e-12 and guard < 4 * len(wps):
            guard += 1
            wx, wy = wps[uav._wp]
            d = math.hypot(wx - uav.x, wy - uav.y)
            if d <= remaining:
                uav.x, uav.y = float(wx), float(wy)
                remaining -= d
                nxt = uav._wp + uav._dir
                if nxt < 0 or nxt >= len(wps):
                    uav._dir = -uav._dir
                    nxt = uav._wp + uav._dir
                uav._wp = nxt
            else:
                uav.x += (wx - uav.x) / d * remaining
                uav.y += (wy - uav.y) / d * remaining
                remaining = 0.0

    power = world.energy["cruise_power"] if moving else world.energy["idle_power"]
    if (t_next % uav.radar.pri) < uav.radar.active_fraction * uav.radar.pri:
        power += world.energy["radar_power"]
    uav.drain(power * world.dt)
    uav._history.append((uav.x, uav.y, t_next))
    return uav


def snapshot(world: World) -> dict:
    """One JSON-lines record of the full world state."""
    return {
        "time": world.time,
        "uavs": [
            {"id": u.id, "x": u.x, "y": u.y, "battery": u.battery}
            for u in world.uavs
        ],
        "targets": [
            {"id": t.id, "class": t.cls.name, "x": t.x, "y": t.y}
            for t in world.targets
        ],
    }
