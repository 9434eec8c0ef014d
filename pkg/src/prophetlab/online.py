"""Exact value of the optimal online algorithm by backward induction.

The DP state is the bitset of occupied vertices: feasibility of a further
assignment depends only on which items are already sold, and parallel edges
collapse into a single transition.  Skipping is preferred on exact ties and
zero-weight edges are never assigned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .instances import EXACT, FixedOrder, IIDCount, Instance, Number, UniformRandomOrder, WeightFunction
from .offline import group_agents

MAX_FIXED_AGENTS = 20
MAX_VERTICES = 16
MAX_RANDOM_STATES = 2**12
MAX_IID_WORK = 10**8

SKIP = None


@dataclass
class DPValue:
    value: Number
    decisions: dict[tuple[Any, int, int], int | None] | None = field(default=None, repr=False)

    def decision_rows(self) -> list[dict]:
        """Decision table as rows ``{state, step, outcome_index, action}``."""
        rows = []
        for (step, state, k), action in sorted((self.decisions or {}).items(), key=repr):
            rows.append({"state": state, "step": _jsonable(step),
                         "outcome_index": k, "action": action})
        return rows

    def decisions_to_json(self, **kwargs) -> str:
        return json.dumps(self.decision_rows(), **kwargs)


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def _actions(instance: Instance, wf: WeightFunction) -> list[tuple[int, int, Number]]:
    """(edge id, endpoint mask, weight) for positive edges; best edge per endpoint pair."""
    best: dict[int, tuple[int, int, Number]] = {}
    for e, w in wf.weights:
        if w <= 0:
            continue
        mask = instance.graph.edge_mask(e)
        if mask not in best or w > best[mask][2]:
            best[mask] = (e, mask, w)
    return sorted(best.values())


def _step(instance: Instance, dist, state: int, cont, zero, record=None):
    """Expected value of one arrival from ``state``; ``cont(mask)`` is the continuation."""
    total = zero
    skip_value = cont(state)
    for k, (p, wf) in enumerate(dist.outcomes):
        best, action = skip_value, SKIP
        for e, mask, w in _actions(instance, wf):
            if state & mask:
                continue
            v = w + cont(state | mask)
            if v > best:
                best, action = v, e
        if record is not None:
            record(k, action)
        total += p * best
    return total


def _check_vertices(instance: Instance) -> None:
    if instance.graph.vertex_count > MAX_VERTICES:
        raise ValueError(f"{instance.graph.vertex_count} vertices exceed the DP guard of {MAX_VERTICES}")


def optimal_online_fixed_order(instance: Instance, keep_decisions: bool = False, start_state: int = 0) -> DPValue:
    """Optimal expected online weight when agents arrive in list order.

    ``start_state`` marks vertices as already occupied before the first arrival.
    """
    if not isinstance(instance.arrival, FixedOrder):
        raise ValueError("optimal_online_fixed_order needs a FixedOrder instance")
    if len(instance.agents) > MAX_FIXED_AGENTS:
        raise ValueError(f"{len(instance.agents)} agents exceed the guard of {MAX_FIXED_AGENTS}")
    _check_vertices(instance)
    agents, zero = instance.agents, instance.zero()
    n = len(agents)
    memo: dict[tuple[int, int], Number] = {}
    decisions = {} if keep_decisions else None

    def value(t: int, state: int) -> Number:
        if t == n:
            return zero
        key = (t, state)
        if key not in memo:
            rec = None
            if decisions is not None:
                def rec(k, a):
                    decisions[(t, state, k)] = a
            memo[key] = _step(instance, agents[t], state, lambda s: value(t + 1, s), zero, rec)
        return memo[key]

    return DPValue(value(0, start_state), decisions)


def optimal_online_random_order(instance: Instance, keep_decisions: bool = False,
                                start_state: int = 0) -> DPValue:
    """Optimal expected online weight under a uniformly random arrival order.

    The algorithm sees which agent arrives.  Memoization is over (multiset of
    agents still to come, occupied vertices); interchangeable agents are
    grouped into classes so the first component is a vector of counts.  With
    all classes singletons this is the plain subset DP.
    """
    if not isinstance(instance.arrival, UniformRandomOrder):
        raise ValueError("optimal_online_random_order needs a UniformRandomOrder instance")
    _check_vertices(instance)
    classes = group_agents(instance)
    reps = [rep for rep, _ in classes]
    full = tuple(len(members) for _, members in classes)
    n_states = math.prod(c + 1 for c in full)
    if n_states > MAX_RANDOM_STATES:
        raise ValueError(f"{n_states} arrival states exceed the guard of {MAX_RANDOM_STATES} "
                         "(at most 12 non-interchangeable agents)")
    zero = instance.zero()
    memo: dict[tuple[tuple[int, ...], int], Number] = {}
    decisions = {} if keep_decisions else None

    def value(remaining: tuple[int, ...], state: int) -> Number:
        total_left = sum(remaining)
        if total_left == 0:
            return zero
        key = (remaining, state)
        if key in memo:
            return memo[key]
        acc = zero
        for c, count in enumerate(remaining):
            if count == 0:
                continue
            after = remaining[:c] + (count - 1,) + remaining[c + 1:]
            rec = None
            if decisions is not None:
                def rec(k, a, c=c):
                    decisions[((remaining, c), state, k)] = a
            acc += count * _step(instance, reps[c], state, lambda s: value(after, s), zero, rec)
        memo[key] = acc / total_left
        return memo[key]

    return DPValue(value(full, start_state), decisions)


def _reachable_states(instance: Instance, dist) -> list[int]:
    seen, frontier = {0}, [0]
    acts = [_actions(instance, wf) for _, wf in dist.outcomes]
    while frontier:
        s = frontier.pop()
        for act in acts:
            for _, mask, _ in act:
                if not s & mask and s | mask not in seen:
                    seen.add(s | mask)
                    frontier.append(s | mask)
    return sorted(seen)


def optimal_online_iid(instance: Instance, keep_decisions: bool = False) -> DPValue:
    """Optimal expected online weight for n IID arrivals (n = arrival.n).

    Numeric instances are iterated with vectorized numpy over the reachable
    occupancy states; exact instances use the same recursion on Fractions.
    Decisions (when kept) are keyed by steps remaining.
    """
    if not isinstance(instance.arrival, IIDCount):
        raise ValueError("optimal_online_iid needs an IIDCount instance")
    _check_vertices(instance)
    n = instance.arrival.n
    dist = instance.agents[instance.arrival.distribution]
    states = _reachable_states(instance, dist)
    if len(states) * n * dist.support_size > MAX_IID_WORK:
        raise ValueError("IID DP work exceeds its guard")
    index = {s: i for i, s in enumerate(states)}
    acts = [_actions(instance, wf) for _, wf in dist.outcomes]
    decisions = {} if keep_decisions else None

    if instance.mode == EXACT or keep_decisions:
        zero = instance.zero()
        prev = {s: zero for s in states}
        for k in range(1, n + 1):
            cur = {}
            for s in states:
                rec = None
                if decisions is not None:
                    def rec(j, a, k=k, s=s):
                        decisions[(k, s, j)] = a
                cur[s] = _step(instance, dist, s, prev.__getitem__, zero, rec)
            prev = cur
        return DPValue(prev[0], decisions)

    # numeric: one (outcome, action) x state gather per step
    n_states = len(states)
    probs = np.array([float(p) for p, _ in dist.outcomes])
    max_a = 1 + max(len(a) for a in acts)
    target = np.zeros((len(acts), max_a, n_states), dtype=np.int64)
    gain = np.full((len(acts), max_a, n_states), -np.inf)
    for o, act in enumerate(acts):
        target[o, 0] = np.arange(n_states)
        gain[o, 0] = 0.0
        for a, (_, mask, w) in enumerate(act, start=1):
            for i, s in enumerate(states):
                if not s & mask:
                    target[o, a, i] = index[s | mask]
                    gain[o, a, i] = float(w)
    values = np.zeros(n_states)
    for _ in range(n):
        # skip is action 0, so argmax-style ties resolve to skipping
        best = np.max(gain + values[target], axis=1)
        values = probs @ best
    return DPValue(float(values[index[0]]))
