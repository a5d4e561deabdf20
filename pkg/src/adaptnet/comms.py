"""Packet queuing, waveform selection, service, and AoI accounting.

Disciplines follow the status-update literature: FCFS, LCFS with
preemption in service (LCFS_S), LCFS with preemption only while waiting
(LCFS_W), and a relevance-ordered PRIORITY queue.  Preempted or displaced
packets are discarded, not resumed; that convention is what makes the
M/M/1 closed forms used by the benchmark apply.

The physical layer is abstracted to two waveforms, a (rate, power) pair
each, plus a linear SNR success factor scaling the effective service rate.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Optional

import numpy as np

from . import kernels
from .trajectory import RelevanceScore


class Discipline(IntEnum):
    # values are shared with the compiled queue kernel
    FCFS = 0
    LCFS_S = 1
    LCFS_W = 2
    PRIORITY = 3


class WaveformKind(Enum):
    HIGH_THROUGHPUT = "HIGH_THROUGHPUT"
    ENERGY_SAVING = "ENERGY_SAVING"


@dataclass(frozen=True)
class Waveform:
    kind: WaveformKind
    rate: float   # bits/s
    power: float  # watts


def default_waveforms(config=None):
    if config is None:
        return (
            Waveform(WaveformKind.HIGH_THROUGHPUT, 10e6, 15.0),
            Waveform(WaveformKind.ENERGY_SAVING, 2e6, 4.0),
        )
    return (
        Waveform(WaveformKind.HIGH_THROUGHPUT, config.waveform_high_rate, config.waveform_high_power),
        Waveform(WaveformKind.ENERGY_SAVING, config.waveform_low_rate, config.waveform_low_power),
    )


@dataclass
class Packet:
    id: int
    source_uav: int
    gen_time: float
    size_bits: float
    relevance: Optional[RelevanceScore] = None
    remaining_bits: float = field(default=0.0)
    waveform: Optional[Waveform] = None  # pinned by gated links

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValueError("packet size must be positive")
        self.remaining_bits = self.size_bits

    def distance(self):
        return self.relevance.distance if self.relevance is not None else 0.0


def success_factor(snr_db, snr_floor=0.0, snr_ref=20.0):
    """Linear ramp from 0 at the floor to 1 at the reference SNR."""
    return min(max((snr_db - snr_floor) / (snr_ref - snr_floor), 0.0), 1.0)


def select_waveform(score: RelevanceScore, threshold, waveforms=None) -> Waveform:
    """Novel data (distance strictly above threshold) gets the
    high-throughput waveform, everything else the energy saver."""
    high, low = waveforms if waveforms is not None else default_waveforms()
    return high if score.distance > threshold else low


class TxQueue:
    """Single-server transmit queue for one UAV.

    `serving` is the packet on the air; `waiting` is the line behind it.
    Service starts immediately on enqueue when the server is idle (work
    conservation).  Drop accounting counts preempted and displaced
    packets.
    """

    def __init__(self, discipline: Discipline):
        self.discipline = Discipline(discipline)
        self.serving: Optional[Packet] = None
        self.waiting: list = []
        self.delivered = 0
        self.dropped = 0
        self._seq = itertools.count()

    def __len__(self):
        return (1 if self.serving is not None else 0) + len(self.waiting)

    def enqueue(self, packet: Packet, now: float):
        if packet.gen_time > now:
            raise ValueError("packet generated in the future")
        d = self.discipline
        if self.serving is None:
            # LCFS_W "never interrupts service" still serves into an idle
            # server, as does every other discipline
            self.serving = packet
            return
        if d == Discipline.FCFS:
            self.waiting.append(packet)
        elif d == Discipline.LCFS_S:
            self.dropped += 1
            self.serving = packet
        elif d == Discipline.LCFS_W:
            if self.waiting:
                self.dropped += len(self.waiting)
            self.waiting = [packet]
        elif d == Discipline.PRIORITY:
            key = (-packet.distance(), packet.gen_time, next(self._seq))
            lo, hi = 0, len(self.waiting)
            while lo < hi:
                mid = (lo + hi) // 2
                w = self.waiting[mid]
                if (-w.distance(), w.gen_time, -1) <= key:
                    lo = mid + 1
                else:
                    hi = mid
            self.waiting.insert(lo, packet)

    def _pop_next(self, priority_weight=1.0, now=0.0, threshold=1.0, age_scale=1.0):
        if not self.waiting:
            return None
        if self.discipline != Discipline.PRIORITY or priority_weight >= 1.0:
            return self.waiting.pop(0)
        # blended ordering: weight 1 is pure relevance (the static queue
        # order), weight 0 is pure age; ties keep queue position
        best_i = 0
        best_key = None
        for i, pkt in enumerate(self.waiting):
            rel = pkt.distance() / threshold
            age = (now - pkt.gen_time) / age_scale
            key = priority_weight * rel + (1.0 - priority_weight) * age
            if best_key is None or key > best_key:
                best_key = key
                best_i = i
        return self.waiting.pop(best_i)

    def serve_step(self, waveform: Waveform, snr_db, dt, rng=None,
                   priority_weight=1.0, now=0.0, threshold=1.0, age_scale=1.0,
                   snr_floor=0.0, snr_ref=20.0):
        """Advance service by dt.

        The head-of-line packet accumulates rate * dt * success_factor
        bits; on completion it is delivered and the next packet (per
        discipline) moves to the head, to be served from the next step
        on.  Returns (delivered packets, energy joules).  Energy is
        power * dt whenever the server was busy at the start of the
        step, zero when idle.  rng is an extension hook for stochastic
        channels; the default channel model is deterministic.
        """
        if dt <= 0:
            raise ValueError("dt must be positive")
        if self.serving is None and self.waiting:
            self.serving = self._pop_next(priority_weight, now, threshold, age_scale)
        if self.serving is None:
            return [], 0.0
        wf = self.serving.waveform or waveform
        energy = wf.power * dt
        served = wf.rate * dt * success_factor(snr_db, snr_floor, snr_ref)
        self.serving.remaining_bits -= served
        delivered = []
        if self.serving.remaining_bits <= 1e-9:
            self.serving.remaining_bits = 0.0
            delivered.append(self.serving)
            self.delivered += 1
            self.serving = self._pop_next(priority_weight, now, threshold, age_scale)
        return delivered, energy


def enqueue(queue: TxQueue, packet: Packet, now: float) -> TxQueue:
    queue.enqueue(packet, now)
    return queue


def serve_step(queue: TxQueue, waveform: Waveform, snr_db, dt, rng=None, **kw):
    return queue.serve_step(waveform, snr_db, dt, rng, **kw)


class AoiTracker:
    """Sawtooth age accounting per source.

    Age of a source is now minus the generation time of its freshest
    delivered packet; the integral accumulates trapezoids of the
    piecewise-linear age curve, so average age is integral / horizon.
    """

    def __init__(self, sources=(0,), t0=0.0):
        self.last_gen = {s: t0 for s in sources}
        self.age_integral = 0.0
        self.horizon = t0
        self._t0 = t0

    def age(self, now, source=0):
        return now - self.last_gen[source]

    def average(self):
        span = self.horizon - self._t0
        return self.age_integral / span if span > 0 else 0.0

    def update(self, deliveries, now, dt):
        """Accumulate dt of age growth, then apply end-of-step deliveries."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        for pkt in deliveries:
            if pkt.gen_time > now:
                raise ValueError("delivery generated in the future")
        for src in self.last_gen:
            a0 = (now - dt) - self.last_gen[src]
            self.age_integral += a0 * dt + 0.5 * dt * dt
        self.horizon = now
        for pkt in deliveries:
            src = pkt.source_uav
            if src in self.last_gen and pkt.gen_time > self.last_gen[src]:
                self.last_gen[src] = pkt.gen_time
        return self


def aoi_update(tracker: AoiTracker, deliveries, now, dt) -> AoiTracker:
    return tracker.update(deliveries, now, dt)


class GatedLink:
    """Relevance-gated transmission: novel packets queue immediately on
    the high-throughput waveform; sub-threshold packets sit in a bounded
    deferred store and flush in batches on the energy saver only when the
    channel is idle.
    """

    def __init__(self, threshold, waveforms=None, batch=4, capacity=16,
                 discipline=Discipline.FCFS, snr_floor=0.0, snr_ref=20.0):
        self.threshold = threshold
        self.high, self.low = waveforms if waveforms is not None else default_waveforms()
        self.batch = batch
        self.capacity = capacity
        self.queue = TxQueue(discipline)
        self.deferred: list = []
        self.deferred_dropped = 0
        self.bits_on_air = 0.0
        self.energy_j = 0.0
        self.snr_floor = snr_floor
        self.snr_ref = snr_ref

    def offer(self, packet: Packet, now):
        if packet.relevance is not None and packet.relevance.distance > self.threshold:
            packet.waveform = self.high
            self.queue.enqueue(packet, now)
        else:
            packet.waveform = self.low
            self.deferred.append(packet)
            if len(self.deferred) > self.capacity:
                self.deferred.pop(0)
                self.deferred_dropped += 1

    def step(self, snr_db, dt, now):
        if len(self.queue) == 0 and len(self.deferred) >= self.batch:
            for pkt in self.deferred[: self.batch]:
                self.queue.enqueue(pkt, now)
            del self.deferred[: self.batch]
        head = self.queue.serving
        if head is None and self.queue.waiting:
            head = self.queue.waiting[0]  # serve_step promotes it first
        before = head.remaining_bits if head is not None else 0.0
        wf = head.waveform if head is not None else self.low
        delivered, energy = self.queue.serve_step(
            wf, snr_db, dt, snr_floor=self.snr_floor, snr_ref=self.snr_ref
        )
        if energy > 0.0:
            self.bits_on_air += min(
                wf.rate * dt * success_factor(snr_db, self.snr_floor, self.snr_ref),
                before,
            )
        self.energy_j += energy
        return delivered, energy


class DirectLink(GatedLink):
    """Relevance-adaptive waveforms without deferral: every packet goes
    straight to the queue, novel ones pinned to the high-throughput
    waveform and the rest to the energy saver."""

    def offer(self, packet: Packet, now):
        packet.waveform = select_waveform(
            packet.relevance, self.threshold, (self.high, self.low)
        )
        self.queue.enqueue(packet, now)


def mm1_aoi(lam, mu, horizon, discipline: Discipline, seed):
    """Event-driven M/M/1 status-update queue, AoI averaged over horizon.

    Arrival and service variates are drawn once per (lam, seed), so every
    discipline sees the same packet stream.  PRIORITY gets i.i.d. uniform
    priorities, standing in for relevance scores.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, int(lam * 1e6))))
    n = int(lam * horizon * 1.25) + 100
    arrivals = np.cumsum(rng.exponential(1.0 / lam, size=n))
    while arrivals[-1] < horizon:  # pragma: no cover - generous headroom above
        extra = np.cumsum(rng.exponential(1.0 / lam, size=n)) + arrivals[-1]
        arrivals = np.concatenate([arrivals, extra])
    arrivals = arrivals[arrivals < horizon]
    services = rng.exponential(1.0 / mu, size=arrivals.shape[0])
    priority = rng.random(size=arrivals.shape[0])
    integral, delivered, dropped = kernels.aoi_queue_sim(
        arrivals, services, priority, float(horizon), int(discipline)
    )
    return integral / horizon, int(delivered), int(dropped)


def write_aoi_csv(path, rows):
    """rows: (time, uav_id, discipline, inst_age, avg_age, delivered,
    dropped, energy_j)."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["time", "uav_id", "discipline", "inst_age", "avg_age",
             "delivered", "dropped", "energy_j"]
        )
        for time, uav_id, disc, inst, avg, delivered, dropped, energy in rows:
            writer.writerow(
                [repr(float(time)), uav_id, disc, repr(float(inst)),
                 repr(float(avg)), delivered, dropped, repr(float(energy))]
            )
