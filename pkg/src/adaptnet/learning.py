"""Neural substrate and agents: MLP with hand-written gradients, replay
memory, DQN updates, and MADDPG actor-critic updates.

Everything runs in float64 numpy with plain SGD.  No optimizer state, no
autograd: the backward pass is the exact reverse of the forward chain and
is validated against central finite differences in the test suite.
"""

import json

import numpy as np


def _relu(z):
    return np.maximum(z, 0.0)


class Mlp:
    """Feed-forward net: affine layers, ReLU hidden units, and a linear
    (critic / Q) or tanh (actor) head.

    Weights start uniform in +-1/sqrt(fan_in), biases at zero, drawn from
    the caller's seeded generator.  forward caches the activations that
    backward consumes; calling backward without a matching forward is a
    usage error.
    """

    def __init__(self, layer_sizes, out_act="linear", rng=None):
        if len(layer_sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if out_act not in ("linear", "tanh"):
            raise ValueError("out_act must be linear or tanh")
        if rng is None:
            rng = np.random.default_rng()
        self.layer_sizes = list(layer_sizes)
        self.out_act = out_act
        self.W = []
        self.b = []
        for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.W.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.b.append(np.zeros(fan_out))
        self._cache = None

    @property
    def n_layers(self):
        return len(self.W)

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        a = x[None, :] if single else x
        if a.shape[1] != self.layer_sizes[0]:
            raise ValueError(
                "input dimension %d does not match layer 0 size %d"
                % (a.shape[1], self.layer_sizes[0])
            )
        acts = [a]
        for i in range(self.n_layers):
            z = acts[-1] @ self.W[i] + self.b[i]
            if i < self.n_layers - 1:
                a_next = _relu(z)
            elif self.out_act == "tanh":
                a_next = np.tanh(z)
            else:
                a_next = z
            acts.append(a_next)
        self._cache = acts
        out = acts[-1]
        return out[0] if single else out

    def backward(self, grad_out):
        """Reverse-mode gradients for the cached forward pass.

        grad_out holds dL/d(output) per sample; returns (grads, grad_in)
        where grads is {"W": [...], "b": [...]} summed over the batch and
        grad_in is dL/d(input).
        """
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        grad = np.asarray(grad_out, dtype=np.float64)
        if grad.ndim == 1:
            grad = grad[None, :]
        acts = self._cache
        if grad.shape != acts[-1].shape and grad.shape != acts[-1][0:1].shape:
            raise RuntimeError("gradient shape does not match the cached forward pass")
        gW = [None] * self.n_layers
        gb = [None] * self.n_layers
        delta = grad
        for i in range(self.n_layers - 1, -1, -1):
            if i == self.n_layers - 1:
                if self.out_act == "tanh":
                    delta = delta * (1.0 - acts[-1] ** 2)
            else:
                delta = delta * (acts[i + 1] > 0.0)
            gW[i] = acts[i].T @ delta
            gb[i] = delta.sum(axis=0)
            delta = delta @ self.W[i].T
        return {"W": gW, "b": gb}, delta

    def sgd_step(self, grads, lr):
        for i in range(self.n_layers):
            self.W[i] -= lr * grads["W"][i]
            self.b[i] -= lr * grads["b"][i]

    def copy(self):
        other = Mlp.__new__(Mlp)
        other.layer_sizes = list(self.layer_sizes)
        other.out_act = self.out_act
        other.W = [w.copy() for w in self.W]
        other.b = [b.copy() for b in self.b]
        other._cache = None
        return other

    def soft_update_from(self, source, tau):
        for i in range(self.n_layers):
            self.W[i] = tau * source.W[i] + (1.0 - tau) * self.W[i]
            self.b[i] = tau * source.b[i] + (1.0 - tau) * self.b[i]

    # flat-vector access, used by the finite-difference checks
    def get_flat(self):
        parts = [w.ravel() for w in self.W] + [b.ravel() for b in self.b]
        return np.concatenate(parts)

    def set_flat(self, vec):
        i = 0
        for w in self.W:
            w[...] = vec[i : i + w.size].reshape(w.shape)
            i += w.size
        for b in self.b:
            b[...] = vec[i : i + b.size].reshape(b.shape)
            i += b.size

    def flatten_grads(self, grads):
        parts = [g.ravel() for g in grads["W"]] + [g.ravel() for g in grads["b"]]
        return np.concatenate(parts)

    def to_blob(self):
        return {
            "layer_sizes": self.layer_sizes,
            "out_act": self.out_act,
            "W": [w.tolist() for w in self.W],
            "b": [b.tolist() for b in self.b],
        }

    @classmethod
    def from_blob(cls, blob):
        net = cls(blob["layer_sizes"], blob["out_act"])
        net.W = [np.asarray(w, dtype=np.float64) for w in blob["W"]]
        net.b = [np.asarray(b, dtype=np.float64) for b in blob["b"]]
        return net


def mlp_forward(net: Mlp, x):
    return net.forward(x)


def mlp_backward(net: Mlp, grad_out):
    return net.backward(grad_out)


class ReplayBuffer:
    """Fixed-capacity ring buffer with uniform seeded sampling."""

    def __init__(self, capacity):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._items = []
        self._cursor = 0

    def __len__(self):
        return len(self._items)

    def push(self, item):
        if len(self._items) < self.capacity:
            self._items.append(item)
        else:
            self._items[self._cursor] = item
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, rng, n):
        idx = rng.integers(0, len(self._items), size=n)
        return [self._items[i] for i in idx]


def epsilon_at(episode, episodes, start=1.0, floor=0.05, fraction=0.5):
    """Linear decay from start to floor over the first `fraction` of
    training, flat afterwards."""
    span = max(1, int(episodes * fraction))
    if episode >= span:
        return floor
    return start + (floor - start) * (episode / span)


class DqnAgent:
    """Value learner: online and target nets, epsilon-greedy policy."""

    def __init__(self, obs_dim, n_actions, hidden, gamma=0.95, lr=0.01,
                 target_sync=100, rng=None):
        rng = rng if rng is not None else np.random.default_rng()
        sizes = [obs_dim] + list(hidden) + [n_actions]
        self.online = Mlp(sizes, "linear", rng)
        self.target = self.online.copy()
        self.n_actions = n_actions
        self.gamma = gamma
        self.lr = lr
        self.target_sync = target_sync
        self.updates = 0
        self.epsilon = 1.0

    def act(self, obs, rng, epsilon=None):
        eps = self.epsilon if epsilon is None else epsilon
        if rng.random() < eps:
            return int(rng.integers(self.n_actions))
        q = self.online.forward(obs)
        return int(np.argmax(q))  # argmax takes the lowest index on ties

    def update(self, batch):
        """One SGD step on the mean squared TD error; returns the loss
        re-evaluated after the step."""
        obs, acts, rews, next_obs, dones = batch
        B = obs.shape[0]
        if B == 0:
            raise ValueError("empty batch")
        q_next = self.target.forward(next_obs)
        y = rews + (1.0 - dones) * self.gamma * q_next.max(axis=1)
        q = self.online.forward(obs)
        sel = q[np.arange(B), acts]
        grad = np.zeros_like(q)
        grad[np.arange(B), acts] = 2.0 * (sel - y) / B
        grads, _ = self.online.backward(grad)
        self.online.sgd_step(grads, self.lr)
        self.updates += 1
        if self.updates % self.target_sync == 0:
            self.target = self.online.copy()
        q_post = self.online.forward(obs)
        sel_post = q_post[np.arange(B), acts]
        return float(np.mean((sel_post - y) ** 2))


def dqn_update(agent: DqnAgent, batch):
    loss = agent.update(batch)
    return agent, loss


class MaddpgAgent:
    """One actor-critic pair.  The critic consumes every agent's
    observation and action (centralized training); the actor sees only
    its own observation (decentralized execution)."""

    def __init__(self, obs_dim, act_dim, hidden, joint_dim, gamma=0.99,
                 lr=0.001, tau=0.01, rng=None):
        rng = rng if rng is not None else np.random.default_rng()
        self.actor = Mlp([obs_dim] + list(hidden) + [act_dim], "tanh", rng)
        self.critic = Mlp([joint_dim] + list(hidden) + [1], "linear", rng)
        self.target_actor = self.actor.copy()
        self.target_critic = self.critic.copy()
        self.obs_dim = obs_dim
        self.act_dim = act_dim
        self.gamma = gamma
        self.lr = lr
        self.tau = tau

    def act(self, obs, rng=None, explore=False, noise_sigma=0.2):
        a = self.actor.forward(obs)
        if explore:
            if rng is None:
                raise ValueError("exploration requires an rng")
            a = np.clip(a + rng.normal(0.0, noise_sigma, size=a.shape), -1.0, 1.0)
        return a


def act(agent, obs, rng=None, explore=False, **kw):
    if isinstance(agent, DqnAgent):
        eps = kw.get("epsilon", None)
        return agent.act(obs, rng, epsilon=eps if explore else 0.0)
    return agent.act(obs, rng=rng, explore=explore, **kw)


def maddpg_update(agents, batch, tau=None):
    """One MADDPG step for every agent.

    batch: dict with
      obs:      list over agents of (B, obs_dim_i)
      acts:     list over agents of (B, act_dim_i)
      rews:     (B, n_agents)
      next_obs: list over agents of (B, obs_dim_i)
      dones:    (B,)
    Per agent: critic regression on the soft TD target built from all
    target actors, then an actor ascent step through the critic's input
    gradient restricted to that agent's action slice, then soft target
    updates.  Returns (critic losses, actor objectives), both evaluated
    after the parameter steps.
    """
    n = len(agents)
    if len(batch["obs"]) != n or len(batch["acts"]) != n:
        raise ValueError("batch agent count does not match the agent list")
    B = batch["dones"].shape[0]
    obs_dims = [a.obs_dim for a in agents]
    act_dims = [a.act_dim for a in agents]
    obs_cat = np.concatenate(batch["obs"], axis=1)
    acts_cat = np.concatenate(batch["acts"], axis=1)
    next_obs_cat = np.concatenate(batch["next_obs"], axis=1)
    next_acts = [ag.target_actor.forward(batch["next_obs"][i]) for i, ag in enumerate(agents)]
    next_acts_cat = np.concatenate(next_acts, axis=1)
    joint_next = np.concatenate([next_obs_cat, next_acts_cat], axis=1)
    joint_cur = np.concatenate([obs_cat, acts_cat], axis=1)
    act_offset = int(np.sum(obs_dims))

    critic_losses = []
    actor_objectives = []
    for i, ag in enumerate(agents):
        q_next = ag.target_critic.forward(joint_next)[:, 0]
        y = batch["rews"][:, i] + ag.gamma * (1.0 - batch["dones"]) * q_next
        q = ag.critic.forward(joint_cur)[:, 0]
        grad = (2.0 * (q - y) / B)[:, None]
        grads, _ = ag.critic.backward(grad)
        ag.critic.sgd_step(grads, ag.lr)

        # actor: maximize Q(obs, pi(obs_i), other agents' batch actions)
        a_i = ag.actor.forward(batch["obs"][i])
        acts_sub = [batch["acts"][j] if j != i else a_i for j in range(n)]
        joint_pi = np.concatenate([obs_cat] + [np.concatenate(acts_sub, axis=1)], axis=1)
        ag.critic.forward(joint_pi)
        _, grad_in = ag.critic.backward(np.full((B, 1), -1.0 / B))
        lo = act_offset + int(np.sum(act_dims[:i]))
        da = grad_in[:, lo : lo + ag.act_dim]
        ag.actor.forward(batch["obs"][i])
        actor_grads, _ = ag.actor.backward(da)
        ag.actor.sgd_step(actor_grads, ag.lr)

        tau_i = ag.tau if tau is None else tau
        ag.target_actor.soft_update_from(ag.actor, tau_i)
        ag.target_critic.soft_update_from(ag.critic, tau_i)

        q_post = ag.critic.forward(joint_cur)[:, 0]
        critic_losses.append(float(np.mean((q_post - y) ** 2)))
        a_post = ag.actor.forward(batch["obs"][i])
        acts_post = [batch["acts"][j] if j != i else a_post for j in range(n)]
        joint_post = np.concatenate([obs_cat, np.concatenate(acts_post, axis=1)], axis=1)
        actor_objectives.append(float(np.mean(ag.critic.forward(joint_post)[:, 0])))
    return agents, (critic_losses, actor_objectives)


def save_checkpoint(path, kind, nets, meta=None):
    """Versioned JSON blob: layer sizes, parameters, and bookkeeping."""
    doc = {
        "version": 1,
        "kind": kind,
        "nets": {name: net.to_blob() for name, net in nets.items()},
        "meta": meta or {},
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != 1:
        raise ValueError("unsupported checkpoint version %r" % doc.get("version"))
    nets = {name: Mlp.from_blob(blob) for name, blob in doc["nets"].items()}
    return doc["kind"], nets, doc.get("meta", {})


def write_curves_csv(path, rows):
    """rows: (episode, agent_id, cum_reward, loss)."""
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["episode", "agent_id", "cum_reward", "loss"])
        for episode, agent_id, cum_reward, loss in rows:
            writer.writerow([episode, agent_id, repr(float(cum_reward)), repr(float(loss))])
