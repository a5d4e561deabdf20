"""The two operating modes as Markov decision environments, plus the
redundancy-driven mode switch.

Mode 1 (sensing emphasis): every UAV is an agent picking one of the
predefined sensing paths each step; reward follows timely first
detections.  Mode 2 (communication emphasis): UAVs patrol fixed paths
while agents steer waveform, transmit gating, and queue priority;
reward follows delivered information value, energy, and age.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .clustering import DistanceMatrix, k_medoids, pairwise_frechet
from .comms import AoiTracker, Packet, TxQueue, Discipline, default_waveforms
from .sensing import TrackParams, radar_scan, sensing_pipeline, update_tracks
from .trajectory import RelevanceScore
from .world import HOLD, init_world, step_targets, step_uav  # noqa: F401


def derive_seed(base, *parts):
    """Stable per-episode seed from the scenario seed."""
    ss = np.random.SeedSequence((int(base),) + tuple(int(p) for p in parts))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


class ModeEmphasis(Enum):
    SENSING = "SENSING"
    COMMUNICATION = "COMMUNICATION"


@dataclass
class ModeController:
    window: int = 20
    rho_r: float = 0.5
    hysteresis: float = 0.05
    emphasis: ModeEmphasis = ModeEmphasis.COMMUNICATION


def mode_switch(controller: ModeController, recent_scores) -> ModeController:
    """Re-aim the swarm based on the redundancy of recent data.

    A window dominated by redundant (non-novel) scores pushes emphasis to
    SENSING (go find new information); a novel-rich window pushes it to
    COMMUNICATION.  Fractions inside the hysteresis band leave the
    emphasis unchanged.
    """
    if len(recent_scores) < controller.window:
        raise ValueError("redundancy window not fully populated")
    window = recent_scores[-controller.window :]
    frac = sum(1 for s in window if not s.is_novel) / controller.window
    if frac > controller.rho_r + controller.hysteresis:
        controller.emphasis = ModeEmphasis.SENSING
    elif frac < controller.rho_r - controller.hysteresis:
        controller.emphasis = ModeEmphasis.COMMUNICATION
    return controller


def _clip(v, lo=-1.0, hi=1.0):
    return lo if v < lo else hi if v > hi else v


def top_offer(uav, tracks, references, cfg):
    """Most relevant mature track and its score, or None if no track
    qualifies.  Before the first clustering pass there are no reference
    patterns, so any mature track counts as novel."""
    if references:
        scored = sensing_pipeline(
            uav,
            tracks,
            references,
            cfg.frechet_threshold,
            cfg.comparison_length,
            cfg.min_track_points,
        )
        return scored[0] if scored else None
    eligible = [t for t in tracks if len(t) >= cfg.min_track_points]
    if not eligible:
        return None
    trk = sorted(eligible, key=lambda t: (-len(t), t.track_id))[0]
    trk.relevance = RelevanceScore(2.0 * cfg.frechet_threshold, True)
    return (trk, trk.relevance)


class Mode1Env:
    """Discrete path-selection environment, one DQN agent per UAV.

    Observations carry the swarm-level target picture: per-cluster
    centroid offsets and sizes from a periodic k-medoids pass over the
    fused target plot, refreshed every cluster_refresh steps.
    """

    def __init__(self, config, cooperative=True):
        self.config = config
        self.cooperative = cooperative
        self.n_paths = len(config.path_y_fractions)
        self.k = config.cluster_k
        self.world = None
        self.steps = 0

    @property
    def n_agents(self):
        return self.config.uav_count

    @property
    def obs_dim(self):
        return 2 + self.n_paths + 3 * self.k + 2 * (self.config.uav_count - 1)

    @property
    def n_actions(self):
        return self.n_paths

    def reset(self, episode=0):
        seed = derive_seed(self.config.seed, episode)
        self.world = init_world(replace(self.config, seed=seed))
        self.steps = 0
        self._entered = {}
        self._first = {}
        self._dup_done = set()
        self._cluster_seed = seed
        self._summaries = []
        self._recluster()
        return self._observations()

    def _recluster(self):
        pos = np.array([[t.x, t.y] for t in self.world.targets])
        n = pos.shape[0]
        diff = pos[:, None, :] - pos[None, :, :]
        values = np.hypot(diff[..., 0], diff[..., 1])
        matrix = DistanceMatrix(n=n, values=values)
        k = min(self.k, n)
        clustering = k_medoids(matrix, k, seed=self._cluster_seed + self.steps)
        summaries = []
        for c in range(k):
            members = np.nonzero(clustering.assignment == c)[0]
            if len(members) == 0:
                continue
            cx, cy = pos[members].mean(axis=0)
            summaries.append((len(members), float(cx), float(cy)))
        summaries.sort(key=lambda s: (-s[0], s[1]))
        self._summaries = summaries

    def _observations(self):
        w = self.world
        aw, ah = w.env.arena_w, w.env.arena_h
        obs = []
        for u in w.uavs:
            feats = [2 * u.x / aw - 1, 2 * u.y / ah - 1]
            onehot = [0.0] * self.n_paths
            onehot[u.assigned_path] = 1.0
            feats.extend(onehot)
            for slot in range(self.k):
                if slot < len(self._summaries):
                    size, cx, cy = self._summaries[slot]
                    feats.append(_clip((cx - u.x) / (aw / 2)))
                    feats.append(_clip((cy - u.y) / (ah / 2)))
                    feats.append(size / self.config.target_count)
                else:
                    feats.extend([0.0, 0.0, 0.0])
            for v in w.uavs:
                if v.id != u.id:
                    feats.extend([2 * v.x / aw - 1, 2 * v.y / ah - 1])
            obs.append(np.asarray(feats))
        return obs

    def step(self, actions):
        w = self.world
        cfg = self.config
        if len(actions) != len(w.uavs):
            raise ValueError("need one action per UAV")
        battery_before = sum(u.battery for u in w.uavs)
        for u, a in zip(w.uavs, actions):
            step_uav(u, int(a), w)
        step_targets(w)
        self.steps += 1

        rmax = cfg.radar_range_max
        for t in w.targets:
            if t.id in self._entered:
                continue
            for u in w.uavs:
                if u.active and math.hypot(t.x - u.x, t.y - u.y) <= rmax:
                    self._entered[t.id] = self.steps
                    break

        raw = np.full(len(w.uavs), -cfg.time_cost)
        firsts = np.zeros(len(w.uavs), dtype=int)
        dups = np.zeros(len(w.uavs), dtype=int)
        n_det = 0
        for u in w.uavs:
            dets = radar_scan(u, w, cfg.snr_floor, cfg.snr_ref)
            n_det += len(dets)
            for det in dets:
                tid = det.target_id
                if tid not in self._first:
                    self._first[tid] = (u.id, self.steps)
                    if self.steps - self._entered.get(tid, self.steps) <= cfg.latency_budget:
                        raw[u.id] += cfg.detect_reward
                        firsts[u.id] += 1
                elif self._first[tid][0] != u.id and (u.id, tid) not in self._dup_done:
                    self._dup_done.add((u.id, tid))
                    raw[u.id] -= cfg.duplicate_penalty
                    dups[u.id] += 1

        if self.steps % cfg.cluster_refresh == 0:
            self._recluster()

        rewards = raw.copy()
        if self.cooperative:
            rewards = raw + cfg.coop_weight * raw.mean()
        done = self.steps >= cfg.episode_steps
        energy = battery_before - sum(u.battery for u in w.uavs)
        info = {
            "raw_rewards": raw.tolist(),
            "firsts": firsts.tolist(),
            "dups": dups.tolist(),
            "events": {
                "detections": n_det,
                "deliveries": 0,
                "drops": 0,
                "energy": energy,
            },
        }
        return self._observations(), rewards.tolist(), done, info


def mode1_step(env: Mode1Env, actions):
    return env.step(actions)


class Mode2Env:
    """Continuous communication-control environment for MADDPG.

    Per UAV, the 3-vector action reads: waveform selector (> 0 picks the
    high-throughput waveform), transmit gate (> 0 serves the queue this
    step), and priority weight (blends relevance against age in the
    PRIORITY queue's pop order).  UAVs patrol their assigned paths; the
    sensing stack runs underneath and feeds the queues.
    """

    ACT_DIM = 3

    def __init__(self, config):
        self.config = config
        self.n_paths = len(config.path_y_fractions)
        self.world = None
        self.steps = 0

    @property
    def n_agents(self):
        return self.config.uav_count

    @property
    def obs_dim(self):
        return 4 + 3 * self.config.history_h + 4

    def reset(self, episode=0):
        cfg = self.config
        seed = derive_seed(cfg.seed, episode)
        self.world = init_world(replace(cfg, seed=seed))
        self.steps = 0
        self._seed = seed
        n = len(self.world.uavs)
        for i, u in enumerate(self.world.uavs):
            u.assigned_path = i % self.n_paths
        self.tracks = [[] for _ in range(n)]
        self.track_params = [
            TrackParams(cfg.gate_radius, cfg.t_stale, 0.0, 0) for _ in range(n)
        ]
        self.queues = [TxQueue(Discipline[cfg.queue_discipline]) for _ in range(n)]
        self.trackers = [AoiTracker(sources=(i,)) for i in range(n)]
        self.references = [[] for _ in range(n)]
        self.hist = [
            [np.zeros(self.ACT_DIM) for _ in range(cfg.history_h)] for _ in range(n)
        ]
        self.pending_top = [0.0] * n
        self._pkt_id = 0
        self.waveforms = default_waveforms(cfg)
        return self._observations()

    def _refresh_references(self, i):
        cfg = self.config
        eligible = [t for t in self.tracks[i] if len(t) >= cfg.min_track_points]
        if not eligible:
            return
        trajs = [t.to_trajectory() for t in eligible]
        matrix = pairwise_frechet(trajs)
        k = min(cfg.cluster_k, len(trajs))
        clustering = k_medoids(matrix, k, seed=self._seed + self.steps + i)
        self.references[i] = [trajs[m] for m in clustering.medoids]

    def _observations(self):
        w = self.world
        cfg = self.config
        aw, ah = w.env.arena_w, w.env.arena_h
        obs = []
        for i, u in enumerate(w.uavs):
            feats = [
                2 * u.x / aw - 1,
                2 * (aw - u.x) / aw - 1,
                2 * u.y / ah - 1,
                2 * (ah - u.y) / ah - 1,
            ]
            for past in self.hist[i]:
                feats.extend(past.tolist())
            feats.append(_clip(len(self.queues[i]) / 8.0 * 2 - 1))
            age = self.trackers[i].age(w.time, source=i)
            feats.append(_clip(age / (2 * cfg.a_norm) * 2 - 1))
            feats.append(2 * u.battery / cfg.battery_j - 1)
            feats.append(_clip(self.pending_top[i] / (2 * cfg.frechet_threshold) * 2 - 1))
            obs.append(np.asarray(feats))
        return obs

    def step(self, actions):
        w = self.world
        cfg = self.config
        if len(actions) != len(w.uavs):
            raise ValueError("need one action per UAV")
        battery_before = sum(u.battery for u in w.uavs)
        for u in w.uavs:
            step_uav(u, u.assigned_path, w)
        step_targets(w)
        self.steps += 1
        now = w.time
        snr = w.env.snr_base - w.env.snr_weather_penalty

        n_det = 0
        for i, u in enumerate(w.uavs):
            dets = radar_scan(u, w, cfg.snr_floor, cfg.snr_ref)
            n_det += len(dets)
            self.track_params[i].now = now
            self.tracks[i] = update_tracks(self.tracks[i], dets, self.track_params[i])
            if self.steps % cfg.cluster_refresh == 0:
                self._refresh_references(i)

        rewards = np.zeros(len(w.uavs))
        deliveries = 0
        drops_before = [q.dropped for q in self.queues]
        comm_energy = np.zeros(len(w.uavs))
        novel_n = np.zeros(len(w.uavs), dtype=int)
        sub_n = np.zeros(len(w.uavs), dtype=int)
        red_n = np.zeros(len(w.uavs), dtype=int)
        for i, u in enumerate(w.uavs):
            if self.steps % cfg.traffic_every == 0:
                top = top_offer(u, self.tracks[i], self.references[i], cfg)
                if top is not None:
                    top_track, top_score = top
                    self.pending_top[i] = top_score.distance
                    pkt = Packet(
                        id=self._pkt_id,
                        source_uav=i,
                        gen_time=now,
                        size_bits=cfg.packet_size_bits,
                        relevance=top_score,
                    )
                    self._pkt_id += 1
                    self.queues[i].enqueue(pkt, now)

            a = np.asarray(actions[i], dtype=np.float64)
            wf = self.waveforms[0] if a[0] > 0 else self.waveforms[1]
            transmit = a[1] > 0
            weight = (float(a[2]) + 1.0) / 2.0
            delivered, energy = ([], 0.0)
            if transmit:
                delivered, energy = self.queues[i].serve_step(
                    wf,
                    snr,
                    w.dt,
                    priority_weight=weight,
                    now=now,
                    threshold=cfg.frechet_threshold,
                    age_scale=cfg.a_norm,
                    snr_floor=cfg.snr_floor,
                    snr_ref=cfg.snr_ref,
                )
                u.drain(energy)
            comm_energy[i] = energy
            deliveries += len(delivered)

            r = 0.0
            useful = []
            for pkt in delivered:
                d = pkt.distance()
                if pkt.relevance is not None and pkt.relevance.is_novel:
                    r += cfg.novel_reward
                    useful.append(pkt)
                    novel_n[i] += 1
                elif d == 0.0:
                    # a bit-identical duplicate refreshes nothing
                    r -= cfg.redundant_penalty
                    red_n[i] += 1
                else:
                    r += cfg.subthreshold_reward
                    useful.append(pkt)
                    sub_n[i] += 1
            self.trackers[i].update(useful, now, w.dt)
            r -= energy / cfg.e_norm
            r -= self.trackers[i].average() / cfg.a_norm
            rewards[i] = r
            self.hist[i].pop(0)
            self.hist[i].append(a.copy())

        drops = sum(q.dropped for q in self.queues) - sum(drops_before)
        done = self.steps >= cfg.episode_steps
        info = {
            "raw_rewards": rewards.tolist(),
            "novel": novel_n.tolist(),
            "sub": sub_n.tolist(),
            "redundant": red_n.tolist(),
            "comm_energy": comm_energy.tolist(),
            "avg_age": [t.average() for t in self.trackers],
            "events": {
                "detections": n_det,
                "deliveries": deliveries,
                "drops": drops,
                "energy": battery_before - sum(u.battery for u in w.uavs),
            },
        }
        return self._observations(), rewards.tolist(), done, info


def mode2_step(env: Mode2Env, actions):
    return env.step(actions)
