"""Independent oracles the test suite checks the package against.

Nothing in here imports from adaptnet: each oracle re-derives its answer
from first principles (exhaustive enumeration, closed forms, finite
differences, or a from-scratch reimplementation), so agreement with the
package is meaningful evidence rather than a tautology.
"""

import itertools
import math

import numpy as np


# ---------------------------------------------------------------------------
# discrete Frechet distance by coupling enumeration


def frechet_bruteforce(a, b) -> float:
    """Minimum over all monotone couplings of the maximum paired distance.

    Walks every coupling of the two point sequences (moves: advance a,
    advance b, advance both), keeping the running max pair distance and
    pruning branches that already exceed the best complete coupling.
    Exponential, fine up to ~7 points per curve.
    """
    a = np.asarray(a, dtype=np.float64)[:, :2]
    b = np.asarray(b, dtype=np.float64)[:, :2]
    m, n = a.shape[0], b.shape[0]
    # sqrt-of-squares, not np.hypot: hypot's overflow-safe scaling can
    # differ in the last ulp, which would make exact-equality checks
    # against any plain-sqrt implementation meaningless
    dx = a[:, None, 0] - b[None, :, 0]
    dy = a[:, None, 1] - b[None, :, 1]
    dist = np.sqrt(dx * dx + dy * dy)
    best = [math.inf]

    def walk(i, j, cur):
        d = dist[i, j]
        if d > cur:
            cur = d
        if cur >= best[0]:
            return  # any extension only raises the max
        if i == m - 1 and j == n - 1:
            best[0] = cur
            return
        if i + 1 < m:
            walk(i + 1, j, cur)
        if j + 1 < n:
            walk(i, j + 1, cur)
        if i + 1 < m and j + 1 < n:
            walk(i + 1, j + 1, cur)

    walk(0, 0, 0.0)
    return float(best[0])


# ---------------------------------------------------------------------------
# k-medoids by exhaustive medoid-set search


def medoid_cost_bruteforce(values, k) -> float:
    """Optimal k-medoids assignment cost over all medoid subsets."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    best = math.inf
    for medoids in itertools.combinations(range(n), k):
        cost = float(values[:, list(medoids)].min(axis=1).sum())
        if cost < best:
            best = cost
    return best


# ---------------------------------------------------------------------------
# M/M/1 status-update AoI closed forms


def aoi_fcfs_mm1(lam, mu) -> float:
    # (1/mu) * (1 + 1/rho + rho^2 / (1 - rho)), the classic FCFS result
    rho = lam / mu
    return (1.0 / mu) * (1.0 + 1.0 / rho + rho * rho / (1.0 - rho))


def aoi_lcfs_s_mm1(lam, mu) -> float:
    # preemptive LCFS: 1/lambda + 1/mu
    return 1.0 / lam + 1.0 / mu


# ---------------------------------------------------------------------------
# status-update queue, reimplemented with plain python lists


def aoi_queue_reference(arrivals, services, priority, horizon, discipline):
    """Single-server status-update queue: (age integral, delivered, dropped).

    Independent of the compiled kernel: same contract (disciplines 0=FCFS,
    1=LCFS_S, 2=LCFS_W, 3=PRIORITY; completion beats a simultaneous
    arrival; a delivery resets age only if its generation time is newer
    than the last delivered one; integral truncated at the horizon),
    different data structures and control flow.
    """
    arrivals = [float(v) for v in arrivals]
    services = [float(v) for v in services]
    priority = [float(v) for v in priority]
    n = len(arrivals)

    t = 0.0
    integral = 0.0
    last_gen = 0.0
    delivered = 0
    dropped = 0
    serving = None  # (packet index, completion time)
    waiting = []    # packet indices, discipline-specific order
    i = 0

    def advance(to):
        nonlocal t, integral
        dt = to - t
        if dt > 0.0:
            age0 = t - last_gen
            integral += age0 * dt + 0.5 * dt * dt
            t = to

    while True:
        next_arr = arrivals[i] if i < n else math.inf
        next_done = serving[1] if serving is not None else math.inf
        if min(next_arr, next_done) >= horizon:
            advance(horizon)
            break
        if next_done <= next_arr:
            advance(next_done)
            idx = serving[0]
            delivered += 1
            if arrivals[idx] > last_gen:
                last_gen = arrivals[idx]
            serving = None
            if waiting:
                if discipline == 3:
                    # argmax with strict > keeps the earliest max; removal
                    # swaps the tail in, mirroring the kernel's buffer
                    bi = 0
                    for w in range(1, len(waiting)):
                        if priority[waiting[w]] > priority[waiting[bi]]:
                            bi = w
                    j = waiting[bi]
                    waiting[bi] = waiting[-1]
                    waiting.pop()
                else:
                    j = waiting.pop(0)
                serving = (j, t + services[j])
        else:
            advance(next_arr)
            j = i
            i += 1
            if serving is None:
                serving = (j, t + services[j])
            elif discipline == 1:  # LCFS_S preempts the server
                dropped += 1
                serving = (j, t + services[j])
            elif discipline == 2:  # LCFS_W displaces the single waiter
                if waiting:
                    dropped += len(waiting)
                    waiting.clear()
                waiting.append(j)
            else:  # FCFS and PRIORITY both accumulate a line
                waiting.append(j)

    return integral, delivered, dropped


# ---------------------------------------------------------------------------
# finite differences


def finite_difference_grad(f, x, h=1e-5):
    """Central-difference gradient of scalar f at flat vector x."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


# ---------------------------------------------------------------------------
# chain MDP and tabular Q value iteration


class ChainMdp:
    """Deterministic line of n states; RIGHT from the last state pays +1
    and terminates, every other move pays 0.  Action 0 = LEFT, 1 = RIGHT."""

    def __init__(self, n=5):
        self.n = n

    def transition(self, s, a):
        if a == 1:
            if s == self.n - 1:
                return s, 1.0, True
            return s + 1, 0.0, False
        return max(0, s - 1), 0.0, False


def q_value_iteration(mdp: ChainMdp, gamma, sweeps=500):
    q = np.zeros((mdp.n, 2))
    for _ in range(sweeps):
        new = np.zeros_like(q)
        for s in range(mdp.n):
            for a in range(2):
                s2, r, done = mdp.transition(s, a)
                new[s, a] = r + (0.0 if done else gamma * q[s2].max())
        q = new
    return q


# ---------------------------------------------------------------------------
# cooperative matrix game payoff table


def matrix_game_optima():
    """Exhaustive payoff scan of the 2x2 cooperative matching game.

    Joint actions are sign pairs; payoff 1 on the diagonal, 0 off it.
    Returns the set of optimal joint sign pairs.
    """
    payoff = {}
    for sa in (-1, 1):
        for sb in (-1, 1):
            payoff[(sa, sb)] = 1.0 if sa == sb else 0.0
    top = max(payoff.values())
    return {ja for ja, v in payoff.items() if v == top}
