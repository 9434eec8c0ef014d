"""Offline optimum of a 2-bounded auction by exhaustive enumeration.

The prophet knows every realized weight function and picks the feasible
allocation (agents -> edge or nothing, assigned edges pairwise
vertex-disjoint) of maximum total weight.  Instances here are tiny, so a
depth-first search over agents with occupancy and bound pruning is enough.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Sequence

from .instances import (
    EXACT,
    AgentDistribution,
    Graph,
    Instance,
    Number,
    WeightFunction,
    to_number,
)

MAX_AGENTS = 12
MAX_EDGES = 16
MAX_JOINT_OUTCOMES = 10**7
EXACT_BINOMIAL_LIMIT = 500


class CapacityError(RuntimeError):
    """Raised when an exact enumeration would exceed its size guard."""


@dataclass(frozen=True)
class Realization:
    chosen: tuple[WeightFunction, ...]

    def __post_init__(self):
        object.__setattr__(self, "chosen", tuple(self.chosen))

    def __len__(self):
        return len(self.chosen)


@dataclass(frozen=True)
class Allocation:
    """``assignment[i]`` is the edge id given to agent i, or None for skip."""

    assignment: tuple[int | None, ...]
    value: Number


def _agent_options(graph: Graph, wf: WeightFunction) -> list[tuple[int, int, Number]]:
    return [(e, graph.edge_mask(e), w) for e, w in wf.weights if w > 0]


def best_allocation(graph: Graph, chosen: Sequence[WeightFunction], zero: Number = 0) -> Allocation:
    """Unguarded exhaustive search; use :func:`max_weight_allocation` for public calls.

    Agents are explored in order with skip tried first and edges by increasing
    id, and the incumbent is replaced only on strict improvement, so the
    returned assignment is the lexicographically smallest optimal one.
    """
    n = len(chosen)
    options = [_agent_options(graph, wf) for wf in chosen]
    tail = [zero] * (n + 1)
    for i in range(n - 1, -1, -1):
        tail[i] = tail[i + 1] + max((w for _, _, w in options[i]), default=zero)

    best_value = zero
    best_assign: list[int | None] = [None] * n
    current: list[int | None] = [None] * n

    def search(i: int, used: int, value: Number) -> None:
        nonlocal best_value, best_assign
        if value + tail[i] <= best_value:
            return
        if i == n:
            best_value = value
            best_assign = current.copy()
            return
        current[i] = None
        search(i + 1, used, value)
        for e, mask, w in options[i]:
            if used & mask:
                continue
            current[i] = e
            search(i + 1, used | mask, value + w)
        current[i] = None

    search(0, 0, zero)
    return Allocation(tuple(best_assign), best_value)


def max_weight_allocation(instance: Instance, realization: Realization) -> Allocation:
    """Maximum-weight feasible allocation for one realization.

    The agent guard counts agents with a nonzero realized weight function,
    since the rest can only be skipped.
    """
    if len(realization) != instance.agent_count:
        raise ValueError(f"realization has {len(realization)} agents, instance has {instance.agent_count}")
    for i, (wf, dist) in enumerate(zip(realization.chosen, instance.agent_sequence())):
        if wf not in (o for _, o in dist.outcomes):
            raise ValueError(f"realized weight function of agent {i} is not one of its outcomes")
    active = sum(1 for wf in realization.chosen if not wf.is_zero)
    if active > MAX_AGENTS or instance.graph.edge_count > MAX_EDGES:
        raise CapacityError(
            f"{active} active agents / {instance.graph.edge_count} edges exceed the enumeration guard "
            f"({MAX_AGENTS}/{MAX_EDGES}); estimate with montecarlo.mc_expected_opt instead")
    return best_allocation(instance.graph, realization.chosen, instance.zero())


def expected_opt_exact(instance: Instance, exchangeable: bool = False) -> Number:
    """Expected offline optimum by enumerating every joint outcome.

    With ``exchangeable=True`` agents with equivalent distributions are
    grouped and only outcome *counts* are enumerated (multinomial weights),
    which is exact and makes families with many identical unlikely agents
    tractable.
    """
    if exchangeable:
        return _expected_opt_grouped(instance)
    seq = instance.agent_sequence()
    size = math.prod(a.support_size for a in seq)
    if size > MAX_JOINT_OUTCOMES:
        raise CapacityError(f"{size} joint outcomes exceed the guard of {MAX_JOINT_OUTCOMES}")
    if instance.graph.edge_count > MAX_EDGES:
        raise CapacityError(f"{instance.graph.edge_count} edges exceed the guard of {MAX_EDGES}")
    total = instance.zero()
    graph, zero = instance.graph, instance.zero()
    for combo in product(*(a.outcomes for a in seq)):
        prob = math.prod((p for p, _ in combo), start=instance.one())
        total += prob * best_allocation(graph, [wf for _, wf in combo], zero).value
    return total


def agent_signature(graph: Graph, dist: AgentDistribution) -> tuple:
    """Key under which two agents are interchangeable for matching purposes.

    Parallel edges share endpoints and therefore conflict with exactly the
    same edges, so weight functions are compared by endpoint pair.
    """
    outs = []
    for p, wf in dist.outcomes:
        outs.append((p, tuple(sorted((graph.edges[e], w) for e, w in wf.weights))))
    return tuple(sorted(outs, key=repr))


def group_agents(instance: Instance) -> list[tuple[AgentDistribution, list[int]]]:
    """Partition arrivals into exchangeable classes (representative, member indices)."""
    classes: dict[tuple, list[int]] = defaultdict(list)
    reps: dict[tuple, AgentDistribution] = {}
    for i, dist in enumerate(instance.agent_sequence()):
        key = agent_signature(instance.graph, dist)
        reps.setdefault(key, dist)
        classes[key].append(i)
    return [(reps[k], idx) for k, idx in classes.items()]


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _multinomial(counts: Sequence[int]) -> int:
    out, n = 1, 0
    for c in counts:
        n += c
        out *= math.comb(n, c)
    return out


def _expected_opt_grouped(instance: Instance) -> Number:
    graph, one, zero = instance.graph, instance.one(), instance.zero()
    cap = graph.vertex_count // 2
    per_class = []
    for rep, members in group_agents(instance):
        n = len(members)
        probs = [p for p, _ in rep.outcomes]
        wfs = [wf for _, wf in rep.outcomes]
        choices = []
        for counts in _compositions(n, len(probs)):
            pr = one * _multinomial(counts)
            for p, c in zip(probs, counts):
                pr *= p ** c
            # a matching uses at most |V|/2 agents, so larger counts are redundant
            agents = [wf for wf, c in zip(wfs, counts) if not wf.is_zero for _ in range(min(c, cap))]
            choices.append((pr, agents))
        per_class.append(choices)
    size = math.prod(len(c) for c in per_class)
    if size > MAX_JOINT_OUTCOMES:
        raise CapacityError(f"{size} grouped outcomes exceed the guard of {MAX_JOINT_OUTCOMES}")
    total = zero
    for combo in product(*per_class):
        prob = math.prod((p for p, _ in combo), start=one)
        agents = [wf for _, group in combo for wf in group]
        total += prob * best_allocation(graph, agents, zero).value
    return total


# -- closed forms for the jackpot families --------------------------------------

def iid_cycle_opt(q: int) -> Fraction:
    """Expected maximum matching size of q IID random pairs on a 4-cycle."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    if q == 0:
        return Fraction(0)
    if q == 1:
        return Fraction(1)
    if q == 2:
        return Fraction(11, 6)
    return 2 - Fraction(4, 6**q)


def iid_cycle_online(q: int) -> Fraction:
    """Best online value on the IID 4-cycle instance: 2 - 2^(1-q)."""
    if q < 1:
        raise ValueError("q must be positive")
    return 2 - Fraction(2) ** (1 - q)


FAMILIES = ("single_choice", "secretary_matching", "secretary_2ba", "iid_jackpot")


def poisson_cycle_opt(theta: float) -> float:
    """Limit of E[F(q_m)] for q_m ~ Binomial(m, theta/m)."""
    return 2 + math.exp(-theta) / 36 * (72 - 144 * math.exp(theta / 6) - 12 * theta - theta**2)


def expected_opt_limit(family: str, params: dict) -> float:
    """m -> infinity limit of the expected offline optimum for a jackpot family."""
    lam = float(params["lambda"])
    if family == "single_choice":
        return lam + 1
    if family in ("secretary_matching", "secretary_2ba"):
        return lam + 2
    if family == "iid_jackpot":
        theta = float(params["theta"])
        return lam + poisson_cycle_opt(theta)
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


def _binomial_pmf_log(m: int, p: float, t: int) -> float:
    if p == 0:
        return 1.0 if t == 0 else 0.0
    if p == 1:
        return 1.0 if t == m else 0.0
    logp = (math.lgamma(m + 1) - math.lgamma(t + 1) - math.lgamma(m - t + 1)
            + t * math.log(p) + (m - t) * math.log1p(-p))
    return math.exp(logp)


def expected_opt_finite_jackpot(m: int, lam, theta, mode: str | None = None) -> Number:
    """Exact finite-m expected optimum of the IID jackpot instance.

    Assumes lam*m >= 2 whenever a diagonal is active, as in the construction.
    Below m = 500 the sum is carried out in rationals (unless ``mode`` is
    ``"numeric"``); above it binomial weights are evaluated through
    log-gamma in floating point.
    """
    if theta > m:
        raise ValueError(f"theta={theta} exceeds m={m}")
    if mode is None:
        mode = EXACT if m < EXACT_BINOMIAL_LIMIT else "numeric"
    if mode == EXACT:
        lam, theta = to_number(lam, EXACT), to_number(theta, EXACT)
        none = (1 - Fraction(1, m * m)) ** m
        p = theta / m
        cycle = sum((iid_cycle_opt(t) * math.comb(m, t) * p**t * (1 - p) ** (m - t)
                     for t in range(m + 1)), Fraction(0))
        return (1 - none) * lam * m + none * cycle
    lam, theta = float(lam), float(theta)
    none = math.exp(m * math.log1p(-1.0 / (m * m))) if m > 1 else 0.0
    p = theta / m
    cycle = math.fsum(float(iid_cycle_opt(t)) * _binomial_pmf_log(m, p, t) for t in range(m + 1))
    return (1 - none) * lam * m + none * cycle


def expected_opt_finite_secretary(family: str, m: int, lam) -> Number:
    """Exact finite-m expected optimum of the random-order jackpot families.

    With no active unlikely agent the optimum is the lateral/important value
    (2 for the two-lateral families, 1 for single choice); with at least one
    it is max(lam*m, that value), since every jackpot edge blocks the rest.
    """
    base = {"single_choice": 1, "secretary_matching": 2, "secretary_2ba": 2}[family]
    if isinstance(lam, Fraction) or isinstance(lam, int):
        none = (1 - Fraction(1, m * m)) ** m
    else:
        none = math.exp(m * math.log1p(-1.0 / (m * m))) if m > 1 else 0.0
    return (1 - none) * max(lam * m, base) + none * base
