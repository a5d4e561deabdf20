"""Hot numerical kernels with a numba backend and a pure-numpy fallback.

The backend is selected once at import time from the ``ADAPTNET_BACKEND``
environment variable:

* ``auto``  (default) -- use numba when importable, else fall back to numpy
* ``numba`` -- require numba, fail loudly if missing
* ``numpy`` -- force the pure-numpy path (useful for debugging and as the
  reference in ``benchmarks/bench_kernels.py``)

Both paths perform the same floating-point operations in the same order, so
results are bit-identical across backends.
"""

import os

import numpy as np

_choice = os.environ.get("ADAPTNET_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        "ADAPTNET_BACKEND must be one of auto/numba/numpy, got %r" % _choice
    )

if _choice in ("auto", "numba"):
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise
        _HAVE_NUMBA = False
else:
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA
BACKEND = "numba" if USE_NUMBA else "numpy"

# Queue discipline codes shared with comms.Discipline
FCFS = 0
LCFS_S = 1
LCFS_W = 2
PRIORITY = 3


def _frechet_dp(dist):
    """Coupling-measure dynamic program over a pairwise distance matrix.

    ``dist[i, j]`` is the distance between the i-th point of one curve and
    the j-th point of the other.  Returns the discrete Frechet distance:
    the minimum over all order-preserving couplings of the maximum paired
    distance.
    """
    m, n = dist.shape
    ca = np.empty((m, n))
    ca[0, 0] = dist[0, 0]
    for i in range(1, m):
        ca[i, 0] = max(ca[i - 1, 0], dist[i, 0])
    for j in range(1, n):
        ca[0, j] = max(ca[0, j - 1], dist[0, j])
    for i in range(1, m):
        for j in range(1, n):
            best = ca[i - 1, j - 1]
            if ca[i - 1, j] < best:
                best = ca[i - 1, j]
            if ca[i, j - 1] < best:
                best = ca[i, j - 1]
            d = dist[i, j]
            ca[i, j] = d if d > best else best
    return ca[m - 1, n - 1]


def _frechet_xy(ax, ay, bx, by):
    """Discrete Frechet distance on raw coordinate arrays (loop form)."""
    m = ax.shape[0]
    n = bx.shape[0]
    ca = np.empty((m, n))
    for i in range(m):
        for j in range(n):
            dx = ax[i] - bx[j]
            dy = ay[i] - by[j]
            d = np.sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                ca[0, 0] = d
            elif j == 0:
                ca[i, 0] = max(ca[i - 1, 0], d)
            elif i == 0:
                ca[0, j] = max(ca[0, j - 1], d)
            else:
                best = ca[i - 1, j - 1]
                if ca[i - 1, j] < best:
                    best = ca[i - 1, j]
                if ca[i, j - 1] < best:
                    best = ca[i, j - 1]
                ca[i, j] = d if d > best else best
    return ca[m - 1, n - 1]


def frechet_distance_py(axy, bxy):
    """Pure-numpy discrete Frechet: vectorized distances + python DP."""
    dx = axy[:, 0:1] - bxy[None, :, 0]
    dy = axy[:, 1:2] - bxy[None, :, 1]
    dist = np.sqrt(dx * dx + dy * dy)
    return _frechet_dp(dist)


def _aoi_queue_sim(arrivals, services, priority, horizon, discipline):
    """Event-driven single-server status-update queue with AoI accounting.

    arrivals    sorted packet generation times (= arrival instants)
    services    per-packet service durations
    priority    per-packet priority key, larger serves first (PRIORITY only)
    horizon     simulated time span; the age integral is truncated here
    discipline  0=FCFS 1=LCFS_S 2=LCFS_W 3=PRIORITY

    Preempted and displaced packets are discarded.  A delivery resets the
    age only when its generation time is newer than the last delivered one.
    Returns (age_integral, delivered_count, dropped_count).
    """
    n = arrivals.shape[0]
    buf = np.empty(n, dtype=np.int64)  # waiting line (indices into arrivals)
    head = 0
    tail = 0  # FCFS uses [head, tail); LCFS_W/PRIORITY use [0, tail)
    serving = -1
    done_at = np.inf
    t = 0.0
    last_gen = 0.0
    integral = 0.0
    delivered = 0
    dropped = 0
    i = 0
    going = True  # flag instead of while-True/break: numba types this form

    while going:
        if i < n:
            next_arr = arrivals[i]
        else:
            next_arr = np.inf
        if done_at <= next_arr:
            next_evt = done_at
        else:
            next_evt = next_arr
        if next_evt >= horizon:
            dt = horizon - t
            age0 = t - last_gen
            integral += age0 * dt + 0.5 * dt * dt
            going = False
        else:
            dt = next_evt - t
            age0 = t - last_gen
            integral += age0 * dt + 0.5 * dt * dt
            t = next_evt

            if done_at <= next_arr:
                g = arrivals[serving]
                if g > last_gen:
                    last_gen = g
                delivered += 1
                serving = -1
                done_at = np.inf
                if discipline == FCFS:
                    if head < tail:
                        serving = buf[head]
                        head += 1
                elif discipline == LCFS_W:
                    if tail > 0:
                        serving = buf[0]
                        tail = 0
                elif discipline == PRIORITY:
                    if tail > 0:
                        best = 0
                        for k in range(1, tail):
                            if priority[buf[k]] > priority[buf[best]]:
                                best = k
                        serving = buf[best]
                        buf[best] = buf[tail - 1]
                        tail -= 1
                if serving >= 0:
                    done_at = t + services[serving]
            else:
                if discipline == LCFS_S:
                    if serving >= 0:
                        dropped += 1
                    serving = i
                    done_at = t + services[i]
                elif serving < 0:
                    serving = i
                    done_at = t + services[i]
                elif discipline == FCFS:
                    buf[tail] = i
                    tail += 1
                elif discipline == LCFS_W:
                    if tail > 0:
                        dropped += 1
                    buf[0] = i
                    tail = 1
                elif discipline == PRIORITY:
                    buf[tail] = i
                    tail += 1
                i += 1

    return integral, delivered, dropped


aoi_queue_sim_py = _aoi_queue_sim

if USE_NUMBA:
    frechet_xy_nb = njit(cache=True)(_frechet_xy)
    aoi_queue_sim_nb = njit(cache=True)(_aoi_queue_sim)

    def frechet_distance(axy, bxy):
        return frechet_xy_nb(
            np.ascontiguousarray(axy[:, 0]),
            np.ascontiguousarray(axy[:, 1]),
            np.ascontiguousarray(bxy[:, 0]),
            np.ascontiguousarray(bxy[:, 1]),
        )

    aoi_queue_sim = aoi_queue_sim_nb
else:
    frechet_xy_nb = None
    aoi_queue_sim_nb = None
    frechet_distance = frechet_distance_py
    aoi_queue_sim = aoi_queue_sim_py
