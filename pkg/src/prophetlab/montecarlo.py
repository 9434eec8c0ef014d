"""Monte Carlo evaluation of threshold policies on finite jackpot instances.

Trials are split into fixed-size blocks and block ``b`` draws from a Philox
(counter-based) generator keyed by ``(seed, b)``.  Blocks are therefore
independent of evaluation order and could be farmed out to workers without
changing a single bit of the result, and a run with fewer trials is a prefix
of a run with more.

Only agents whose realized weight function is nonzero generate events; the
rest can never be assigned anything.  Arrival times are continuous uniforms
for random-order instances and ``i / n`` (1-based) for IID and fixed-order
instances.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from .instances import (
    ROLE_UNLIKELY,
    FixedOrder,
    IIDCount,
    Instance,
    UniformRandomOrder,
    WeightFunction,
)
from .offline import agent_signature, best_allocation, group_agents

BLOCK = 1 << 14
POLICY_KINDS = ("single_choice", "secretary_two_stage", "iid_particle")


@dataclass(frozen=True)
class ThresholdPolicy:
    """Stopping rule for the rolling particle.

    ``single_choice``: take the important agent iff it arrives at time >= T.
    ``secretary_two_stage``: take the first lateral iff it arrives at time
    >= s, otherwise take the second iff it arrives at time >= t.
    ``iid_particle``: take the first cycle pair iff at most ``s_star`` time
    remains after it.  Once stopped, later feasible edges are taken
    greedily; positive jackpot weight is always taken when feasible.
    """

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy kind {self.kind!r}")
        expected = 2 if self.kind == "secretary_two_stage" else 1
        if len(self.params) != expected:
            raise ValueError(f"{self.kind} takes {expected} parameter(s), got {len(self.params)}")
        if any(not 0 <= x <= 1 for x in self.params):
            raise ValueError(f"policy parameters must lie in [0,1], got {self.params}")
        if self.kind == "secretary_two_stage" and self.params[0] > self.params[1]:
            raise ValueError(f"need s <= t, got {self.params}")

    @classmethod
    def single_choice(cls, T: float) -> "ThresholdPolicy":
        return cls("single_choice", (float(T),))

    @classmethod
    def secretary_two_stage(cls, s: float, t: float) -> "ThresholdPolicy":
        return cls("secretary_two_stage", (float(s), float(t)))

    @classmethod
    def iid_particle(cls, s_star: float) -> "ThresholdPolicy":
        return cls("iid_particle", (float(s_star),))


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    trials: int
    seed: int

    @classmethod
    def from_samples(cls, samples: np.ndarray, seed: int) -> "MCEstimate":
        n = samples.size
        if n < 1:
            raise ValueError("need at least one trial")
        mean = float(np.mean(samples))
        stderr = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        return cls(mean, stderr, n, seed)


def block_rng(seed: int, block: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) | int(block)))


def _blocks(trials: int):
    for b, start in enumerate(range(0, trials, BLOCK)):
        yield b, min(BLOCK, trials - start)


# -- event sampling ---------------------------------------------------------------

class _Sampler:
    """Precomputed sampling tables for one instance."""

    def __init__(self, instance: Instance):
        self.instance = instance
        arr = instance.arrival
        if isinstance(arr, IIDCount):
            self.dists = [instance.agents[arr.distribution]]
        else:
            self.dists = list(instance.agents)
        k = max(d.support_size for d in self.dists)
        self.cdf = np.full((len(self.dists), max(k - 1, 1)), np.inf)
        self.nonzero = np.zeros((len(self.dists), k), dtype=bool)
        for a, d in enumerate(self.dists):
            cum = np.cumsum([float(p) for p in d.probabilities])
            self.cdf[a, :len(cum) - 1] = cum[:-1]
            self.nonzero[a, :d.support_size] = [not wf.is_zero for wf in (o for _, o in d.outcomes)]
        if isinstance(arr, IIDCount):
            d = self.dists[0]
            probs = np.array([float(p) for p in d.probabilities])
            nz = self.nonzero[0, :d.support_size]
            self.p_active = float(probs[nz].sum())
            self.active_outcomes = np.nonzero(nz)[0]
            cond = np.cumsum(probs[nz]) / max(self.p_active, 1e-300)
            self.active_cdf = cond[:-1]

    def sample(self, rng: np.random.Generator, size: int):
        """Return (trial, dist_id, outcome, time) arrays of nonzero events, sorted by trial then time."""
        arr = self.instance.arrival
        if isinstance(arr, IIDCount):
            trial, dist, outcome, time = self._sample_iid(rng, size, arr.n)
        else:
            n_agents = len(self.dists)
            u = rng.random((size, n_agents))
            idx = (u[:, :, None] >= self.cdf[None, :, :]).sum(axis=2)
            active = self.nonzero[np.arange(n_agents)[None, :], idx]
            trial, dist = np.nonzero(active)
            outcome = idx[trial, dist]
            if isinstance(arr, UniformRandomOrder):
                time = rng.random(trial.size)
            else:
                time = (dist + 1) / n_agents
        order = np.lexsort((time, trial))
        return trial[order], dist[order], outcome[order], time[order]

    def _sample_iid(self, rng, size, n):
        trials, positions = [], []
        if self.p_active > 0:
            pos = np.zeros(size, dtype=np.int64)
            alive = np.arange(size)
            while alive.size:
                pos[alive] += rng.geometric(self.p_active, size=alive.size)
                alive = alive[pos[alive] <= n]
                trials.append(alive.copy())
                positions.append(pos[alive].copy())
        trial = np.concatenate(trials) if trials else np.zeros(0, dtype=np.int64)
        position = np.concatenate(positions) if positions else np.zeros(0, dtype=np.int64)
        u = rng.random(trial.size)
        outcome = self.active_outcomes[np.searchsorted(self.active_cdf, u, side="right")]
        return trial, np.zeros(trial.size, dtype=np.int64), outcome, position / n


def _policy_tables(instance: Instance, dists):
    """Best feasible jackpot / ordinary edge for every (dist, outcome, occupancy state)."""
    g = instance.graph
    if g.vertex_count > 12:
        raise ValueError("policy simulation supports at most 12 vertices")
    n_states = 1 << g.vertex_count
    k = max(d.support_size for d in dists)
    shape = (len(dists), k, n_states)
    jw, jm = np.zeros(shape), np.zeros(shape, dtype=np.int64)
    ow, om = np.zeros(shape), np.zeros(shape, dtype=np.int64)
    has_ordinary = np.zeros((len(dists), k), dtype=bool)
    roles = instance.roles
    for a, d in enumerate(dists):
        unlikely = roles[a] == ROLE_UNLIKELY if a < len(roles) else False
        for o, (_, wf) in enumerate(d.outcomes):
            jack, ordinary = [], []
            for e, w in wf.weights:
                if w <= 0:
                    continue
                (jack if unlikely or e in instance.jackpot_edges else ordinary).append((e, g.edge_mask(e), float(w)))
            has_ordinary[a, o] = bool(ordinary) and not unlikely
            for S in range(n_states):
                for opts, W, M in ((jack, jw, jm), (ordinary, ow, om)):
                    best = None
                    for e, mask, w in opts:
                        if not S & mask and (best is None or w > best[1]):
                            best = (mask, w)
                    if best is not None:
                        M[a, o, S], W[a, o, S] = best
    return jw, jm, ow, om, has_ordinary


def _check_policy(instance: Instance, policy: ThresholdPolicy) -> None:
    arr = instance.arrival
    if policy.kind == "iid_particle":
        if not isinstance(arr, IIDCount):
            raise ValueError("iid_particle policy needs an IIDCount instance")
    elif not isinstance(arr, UniformRandomOrder):
        raise ValueError(f"{policy.kind} policy needs a UniformRandomOrder instance")


def _run_policy(policy, tables, events, size):
    jw, jm, ow, om, has_ordinary = tables
    trial, dist, outcome, time = events
    weight = np.zeros(size)
    state = np.zeros(size, dtype=np.int64)
    stopped = np.zeros(size, dtype=bool)
    key_seen = np.zeros(size, dtype=np.int64)
    if trial.size == 0:
        return weight
    starts = np.r_[0, np.flatnonzero(np.diff(trial)) + 1]
    counts = np.diff(np.r_[starts, trial.size])
    rank = np.arange(trial.size) - np.repeat(starts, counts)
    for r in range(int(rank.max()) + 1):
        sel = rank == r
        tr, d, o, tm = trial[sel], dist[sel], outcome[sel], time[sel]
        S = state[tr]
        j_w, j_m = jw[d, o, S], jm[d, o, S]
        o_w, o_m = ow[d, o, S], om[d, o, S]
        key = has_ordinary[d, o]
        if policy.kind == "single_choice":
            threshold = np.full(tr.size, policy.params[0])
        elif policy.kind == "secretary_two_stage":
            threshold = np.where(key_seen[tr] == 0, policy.params[0], policy.params[1])
        else:
            threshold = np.full(tr.size, 1.0 - policy.params[0])
        take_j = j_w > 0
        take_o = ~take_j & key & (o_w > 0) & (stopped[tr] | (tm >= threshold))
        weight[tr] += np.where(take_j, j_w, np.where(take_o, o_w, 0.0))
        state[tr] = S | np.where(take_j, j_m, np.where(take_o, o_m, 0))
        stopped[tr] |= take_o
        key_seen[tr] += key
    return weight


class _OptTable:
    """Offline optimum of sampled realizations, solved once per distinct outcome profile."""

    def __init__(self, instance: Instance, dists):
        g = instance.graph
        self.graph = g
        self.cap = g.vertex_count // 2
        classes = group_agents(instance) if not isinstance(instance.arrival, IIDCount) else [(dists[0], [0])]
        self.kinds: list[WeightFunction] = []
        kind_of: dict[tuple, int] = {}
        self.map = np.zeros((len(dists), max(d.support_size for d in dists)), dtype=np.int64)
        for rep, members in classes:
            for p, wf in rep.outcomes:
                if wf.is_zero:
                    continue
                key = (id(rep), _canon(g, p, wf))
                kind_of[key] = len(self.kinds)
                self.kinds.append(wf)
            for a in members:
                for o, (p, wf) in enumerate(dists[a].outcomes):
                    if not wf.is_zero:
                        self.map[a, o] = kind_of[(id(rep), _canon(g, p, wf))]
        self.cache: dict[tuple, float] = {}

    def values(self, events, size) -> np.ndarray:
        trial, dist, outcome, _ = events
        n_kinds = max(len(self.kinds), 1)
        counts = np.zeros((size, n_kinds), dtype=np.int64)
        if trial.size:
            np.add.at(counts, (trial, self.map[dist, outcome]), 1)
        np.minimum(counts, self.cap, out=counts)
        profiles, inverse = np.unique(counts, axis=0, return_inverse=True)
        vals = np.empty(len(profiles))
        for i, row in enumerate(profiles):
            key = tuple(int(c) for c in row)
            if key not in self.cache:
                agents = [self.kinds[k] for k, c in enumerate(key) for _ in range(c)]
                self.cache[key] = float(best_allocation(self.graph, agents).value)
            vals[i] = self.cache[key]
        return vals[inverse.reshape(-1)]


def _canon(graph, p, wf):
    return (p, tuple(sorted((graph.edges[e], w) for e, w in wf.weights)))


def policy_samples(instance: Instance, policy: ThresholdPolicy | None, trials: int, seed: int = 0,
                   with_opt: bool = False):
    """Per-trial realized policy weights (and offline optima when ``with_opt``)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if policy is not None:
        _check_policy(instance, policy)
    sampler = _Sampler(instance)
    tables = _policy_tables(instance, sampler.dists) if policy is not None else None
    opt_table = _OptTable(instance, sampler.dists) if with_opt else None
    weights, opts = [], []
    for b, size in _blocks(trials):
        rng = block_rng(seed, b)
        # a block always draws BLOCK trials, so fewer trials give a prefix of more
        events = sampler.sample(rng, BLOCK)
        if size < BLOCK:
            keep = events[0] < size
            events = tuple(x[keep] for x in events)
        if policy is not None:
            weights.append(_run_policy(policy, tables, events, size))
        if with_opt:
            opts.append(opt_table.values(events, size))
    w = np.concatenate(weights) if weights else None
    return (w, np.concatenate(opts)) if with_opt else w


def simulate_policy(instance: Instance, policy: ThresholdPolicy, trials: int, seed: int = 0) -> MCEstimate:
    """Mean realized weight of ``policy`` over ``trials`` seeded trials."""
    return MCEstimate.from_samples(policy_samples(instance, policy, trials, seed), seed)


def mc_expected_opt(instance: Instance, trials: int, seed: int = 0) -> MCEstimate:
    """Monte Carlo estimate of the expected offline optimum."""
    _, opt = policy_samples(instance, None, trials, seed, with_opt=True)
    return MCEstimate.from_samples(opt, seed)


def append_csv_log(path, instance: Instance, policy: ThresholdPolicy | None, estimate: MCEstimate) -> None:
    """Append one result row, writing a header when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    params = ";".join(f"{k}={float(v)!r}" for k, v in instance.params)
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(["instance", "policy", "params", "trials", "seed", "mean", "stderr"])
        pol = "offline_opt" if policy is None else f"{policy.kind}{policy.params}"
        w.writerow([instance.label, pol, params, estimate.trials, estimate.seed,
                    repr(estimate.mean), repr(estimate.stderr)])
