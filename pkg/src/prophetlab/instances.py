"""Stochastic 2-bounded auction instances and the hard-instance families.

An instance is a graph whose vertices are items and whose edges are bundles,
plus a list of agents.  Each agent is a finite-support distribution over
weight functions (edge id -> nonnegative weight).  Every instance carries an
arithmetic mode: ``"exact"`` stores probabilities and weights as
``fractions.Fraction`` and ``"numeric"`` stores them as ``float``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, float, Fraction]

EXACT = "exact"
NUMERIC = "numeric"
MODES = (EXACT, NUMERIC)

# agent roles consumed by the threshold policies in ``montecarlo``
ROLE_PLAIN = "plain"
ROLE_KEY = "key"
ROLE_UNLIKELY = "unlikely"
ROLE_IID = "iid"


class DomainError(ValueError):
    """Raised when construction parameters fall outside a family's domain."""


def to_number(x, mode: str) -> Number:
    """Coerce ``x`` into the number type of ``mode``.

    Floats entering exact mode go through their shortest decimal repr, so
    ``0.299130`` becomes ``Fraction(29913, 100000)``.
    """
    if mode == EXACT:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, float):
            return Fraction(repr(x))
        return Fraction(x)
    if mode == NUMERIC:
        return float(x)
    raise ValueError(f"unknown mode {mode!r}")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    vertex_names: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))
        object.__setattr__(self, "vertex_names", tuple(self.vertex_names))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_mask(self, edge_id: int) -> int:
        """Bitmask of the two endpoints of ``edge_id``."""
        u, v = self.edges[edge_id]
        return (1 << u) | (1 << v)

    def edge_name(self, edge_id: int) -> str:
        u, v = self.edges[edge_id]
        if self.vertex_names:
            return "{%s,%s}" % (self.vertex_names[u], self.vertex_names[v])
        return "{%d,%d}" % (u, v)

    def problems(self) -> list[str]:
        out = []
        if self.vertex_count < 1:
            out.append(f"vertex_count must be positive, got {self.vertex_count}")
        for e, (u, v) in enumerate(self.edges):
            if u == v:
                out.append(f"edge {e} is a self-loop on vertex {u}")
            for x in (u, v):
                if not 0 <= x < self.vertex_count:
                    out.append(f"edge {e} endpoint {x} out of range")
        if self.vertex_names and len(self.vertex_names) != self.vertex_count:
            out.append("vertex_names length differs from vertex_count")
        return out


@dataclass(frozen=True)
class WeightFunction:
    """Sparse map edge id -> weight; absent edges (and skipping) weigh zero."""

    weights: tuple[tuple[int, Number], ...] = ()

    def __post_init__(self):
        items = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        cleaned = tuple(sorted((int(e), w) for e, w in items if w != 0))
        object.__setattr__(self, "weights", cleaned)

    @classmethod
    def of(cls, mapping: Mapping[int, Number] | None = None) -> "WeightFunction":
        return cls(tuple((mapping or {}).items()))

    def __getitem__(self, edge_id: int) -> Number:
        for e, w in self.weights:
            if e == edge_id:
                return w
        return 0

    def as_dict(self) -> dict[int, Number]:
        return dict(self.weights)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(e for e, _ in self.weights)

    @property
    def is_zero(self) -> bool:
        return not self.weights

    def max_weight(self) -> Number:
        return max((w for _, w in self.weights), default=0)

    def scaled(self, c: Number) -> "WeightFunction":
        return WeightFunction(tuple((e, w * c) for e, w in self.weights))


ZERO = WeightFunction()


@dataclass(frozen=True)
class AgentDistribution:
    """Finite-support distribution over weight functions.

    Zero-probability outcomes are dropped on construction.  The sum of the
    probabilities is *not* enforced here so that malformed inputs can still be
    reported by :func:`validate`.
    """

    outcomes: tuple[tuple[Number, WeightFunction], ...]

    def __post_init__(self):
        kept = tuple((p, wf if isinstance(wf, WeightFunction) else WeightFunction.of(wf))
                     for p, wf in self.outcomes if p != 0)
        object.__setattr__(self, "outcomes", kept)

    @classmethod
    def deterministic(cls, wf: WeightFunction, one: Number = 1) -> "AgentDistribution":
        return cls(((one, wf),))

    @property
    def probabilities(self) -> tuple[Number, ...]:
        return tuple(p for p, _ in self.outcomes)

    @property
    def support_size(self) -> int:
        return len(self.outcomes)

    def is_single_minded(self) -> bool:
        edges = set()
        for _, wf in self.outcomes:
            if len(wf.support) > 1:
                return False
            edges.update(wf.support)
        return len(edges) <= 1

    def is_identically_zero(self) -> bool:
        return all(wf.is_zero for _, wf in self.outcomes)


@dataclass(frozen=True)
class FixedOrder:
    kind: str = field(default="fixed", init=False)


@dataclass(frozen=True)
class UniformRandomOrder:
    kind: str = field(default="random", init=False)


@dataclass(frozen=True)
class IIDCount:
    n: int
    distribution: int = 0
    kind: str = field(default="iid", init=False)


ArrivalModel = Union[FixedOrder, UniformRandomOrder, IIDCount]


@dataclass(frozen=True)
class Instance:
    graph: Graph
    agents: tuple[AgentDistribution, ...]
    arrival: ArrivalModel
    label: str = ""
    mode: str = EXACT
    roles: tuple[str, ...] = ()
    jackpot_edges: frozenset = frozenset()
    params: tuple[tuple[str, Number], ...] = ()

    def __post_init__(self):
        _check_mode(self.mode)
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "jackpot_edges", frozenset(self.jackpot_edges))
        roles = tuple(self.roles) or (ROLE_PLAIN,) * len(self.agents)
        object.__setattr__(self, "roles", roles)
        if isinstance(self.params, Mapping):
            object.__setattr__(self, "params", tuple(self.params.items()))
        bad = _mixed_numbers(self)
        if bad:
            raise TypeError(f"{self.mode} instance contains {bad}; arithmetic modes cannot be mixed")

    @property
    def param(self) -> dict[str, Number]:
        return dict(self.params)

    @property
    def agent_count(self) -> int:
        """Number of arrivals (``n`` for IID instances)."""
        if isinstance(self.arrival, IIDCount):
            return self.arrival.n
        return len(self.agents)

    def agent_sequence(self) -> tuple[AgentDistribution, ...]:
        """One distribution per arrival; IID instances are expanded."""
        if isinstance(self.arrival, IIDCount):
            return (self.agents[self.arrival.distribution],) * self.arrival.n
        return self.agents

    def role_sequence(self) -> tuple[str, ...]:
        if isinstance(self.arrival, IIDCount):
            return (self.roles[self.arrival.distribution],) * self.arrival.n
        return self.roles

    def is_single_minded(self) -> bool:
        return all(a.is_single_minded() for a in self.agents)

    def one(self) -> Number:
        return Fraction(1) if self.mode == EXACT else 1.0

    def zero(self) -> Number:
        return Fraction(0) if self.mode == EXACT else 0.0


def _mixed_numbers(inst: Instance) -> str | None:
    foreign = float if inst.mode == EXACT else Fraction
    for agent in inst.agents:
        for p, wf in agent.outcomes:
            if isinstance(p, foreign):
                return f"a {foreign.__name__} probability"
            for _, w in wf.weights:
                if isinstance(w, foreign):
                    return f"a {foreign.__name__} weight"
    return None


def validate(instance: Instance) -> list[str]:
    """Return a description of every violated invariant (empty when valid)."""
    out = list(instance.graph.problems())
    n_edges = instance.graph.edge_count
    tol = 0 if instance.mode == EXACT else 1e-12
    for i, agent in enumerate(instance.agents):
        if not agent.outcomes:
            out.append(f"agent {i} has no outcomes")
            continue
        total = sum(agent.probabilities)
        if abs(total - 1) > tol:
            out.append(f"agent {i}: probabilities sum to {_fmt(total)}")
        for j, (p, wf) in enumerate(agent.outcomes):
            if not 0 < p <= 1:
                out.append(f"agent {i} outcome {j}: probability {_fmt(p)} outside (0,1]")
            for e, w in wf.weights:
                if not 0 <= e < n_edges:
                    out.append(f"agent {i} outcome {j}: unknown edge_id {e}")
                if w < 0:
                    out.append(f"agent {i} outcome {j}: negative weight on edge {e}")
    if len(instance.roles) != len(instance.agents):
        out.append("roles length differs from agent count")
    for e in instance.jackpot_edges:
        if not 0 <= e < n_edges:
            out.append(f"jackpot edge {e} is not in the graph")
    arr = instance.arrival
    if isinstance(arr, IIDCount):
        if arr.n < 1:
            out.append(f"IID count must be positive, got {arr.n}")
        if not 0 <= arr.distribution < len(instance.agents):
            out.append(f"IID distribution index {arr.distribution} out of range")
        elif len({a for a in instance.agents}) > 1:
            out.append("IID instance references more than one distribution")
    return out


def _fmt(x: Number) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    return f"{x:.12g}"


# -- serialization -----------------------------------------------------------

def _num_to_json(x: Number, mode: str):
    if mode == EXACT:
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def _num_from_json(x, mode: str) -> Number:
    if mode == EXACT:
        return Fraction(x)
    return float(x)


def instance_to_dict(inst: Instance) -> dict:
    arrival = {"kind": inst.arrival.kind}
    if isinstance(inst.arrival, IIDCount):
        arrival["n"] = inst.arrival.n
        arrival["distribution"] = inst.arrival.distribution
    return {
        "label": inst.label,
        "mode": inst.mode,
        "vertex_count": inst.graph.vertex_count,
        "edges": [[u, v] for u, v in inst.graph.edges],
        "agents": [
            [[_num_to_json(p, inst.mode), {str(e): _num_to_json(w, inst.mode) for e, w in wf.weights}]
             for p, wf in agent.outcomes]
            for agent in inst.agents
        ],
        "arrival": arrival,
        "vertex_names": list(inst.graph.vertex_names),
        "roles": list(inst.roles),
        "jackpot_edges": sorted(inst.jackpot_edges),
        "params": {k: _num_to_json(v, inst.mode) for k, v in inst.params},
    }


def instance_from_dict(d: Mapping) -> Instance:
    mode = d["mode"]
    graph = Graph(d["vertex_count"], tuple(tuple(e) for e in d["edges"]), tuple(d.get("vertex_names", ())))
    agents = tuple(
        AgentDistribution(tuple(
            (_num_from_json(p, mode), WeightFunction(tuple((int(e), _num_from_json(w, mode)) for e, w in wmap.items())))
            for p, wmap in agent))
        for agent in d["agents"])
    a = d["arrival"]
    if a["kind"] == "fixed":
        arrival: ArrivalModel = FixedOrder()
    elif a["kind"] == "random":
        arrival = UniformRandomOrder()
    elif a["kind"] == "iid":
        arrival = IIDCount(int(a["n"]), int(a.get("distribution", 0)))
    else:
        raise ValueError(f"unknown arrival kind {a['kind']!r}")
    return Instance(graph, agents, arrival, d.get("label", ""), mode,
                    tuple(d.get("roles", ())), frozenset(d.get("jackpot_edges", ())),
                    tuple((k, _num_from_json(v, mode)) for k, v in d.get("params", {}).items()))


def instance_to_json(inst: Instance, **kwargs) -> str:
    return json.dumps(instance_to_dict(inst), **kwargs)


def instance_from_json(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


# -- hard-instance families --------------------------------------------------

def _cycle_with_diagonal(diagonal: tuple[int, int] | None) -> Graph:
    # a=0, b=1, c=2, d=3; cycle edges ab, bc, cd, ad get ids 0..3
    edges = [(0, 1), (1, 2), (2, 3), (0, 3)]
    if diagonal is not None:
        edges.append(diagonal)
    return Graph(4, tuple(edges), ("a", "b", "c", "d"))


def _jackpot(prob: Number, edge: int, weight: Number, one: Number) -> AgentDistribution:
    return AgentDistribution(((prob, WeightFunction.of({edge: weight})), (one - prob, ZERO)))


def _require_m_lambda(m: int, lam) -> None:
    if int(m) != m or m < 1:
        raise DomainError(f"m must be a positive integer, got {m}")
    if lam < 1:
        raise DomainError(f"lambda must be at least 1, got {lam}")


def build_adversarial_2ba(epsilon, mode: str = EXACT) -> Instance:
    """Three agents on a 4-cycle plus the diagonal {a,c}, arriving in order.

    Agent 1 bids 3 on every cycle edge, agent 2 bids 4 on one uniformly
    random cycle edge, agent 3 bids 4/epsilon on the diagonal with
    probability epsilon.
    """
    _check_mode(mode)
    eps = to_number(epsilon, mode)
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in (0,1), got {epsilon}")
    one = to_number(1, mode)
    g = _cycle_with_diagonal((0, 2))
    cycle = range(4)
    agent1 = AgentDistribution.deterministic(WeightFunction.of({e: 3 * one for e in cycle}), one)
    agent2 = AgentDistribution(tuple((one / 4, WeightFunction.of({e: 4 * one})) for e in cycle))
    agent3 = _jackpot(eps, 4, 4 / eps, one)
    return Instance(g, (agent1, agent2, agent3), FixedOrder(), "adversarial_2ba", mode,
                    params=(("epsilon", eps),))


def prophet_matching_r(p, q):
    return (1 - p) * q + (1 - q) * p


def build_prophet_matching(p, q, epsilon, mode: str = EXACT) -> Instance:
    """Nine single-minded edge agents on K_{4,2} plus the edge {0,1}."""
    _check_mode(mode)
    p, q, eps = (to_number(x, mode) for x in (p, q, epsilon))
    r = prophet_matching_r(p, q)
    checks = [
        (p < q, "p < q"),
        (q < r, "q < r"),
        (r < to_number(1, mode) / 2, "r < 1/2"),
        (1 - p < 2 * r, "1 - p < 2r"),
    ]
    for ok, name in checks:
        if not ok:
            raise DomainError(f"constraint {name} violated (p={p}, q={q}, r={r})")
    if not 0 < p:
        raise DomainError(f"p must be positive, got {p}")
    if not 0 < eps < 1:
        raise DomainError(f"epsilon must lie in (0,1), got {epsilon}")
    one = to_number(1, mode)
    names = ("a", "b", "c", "d", "0", "1")
    edges = []
    for left in range(4):
        edges += [(left, 4), (left, 5)]
    edges.append((4, 5))
    g = Graph(6, tuple(edges), names)

    def det(e, w):
        return AgentDistribution.deterministic(WeightFunction.of({e: w}), one)

    agents = [det(0, r), det(1, r), det(2, 1 - r), det(3, 1 - r),
              _jackpot(q, 4, 1 - p, one), _jackpot(q, 5, 1 - p, one),
              _jackpot(p, 6, one, one), _jackpot(p, 7, one, one),
              _jackpot(eps, 8, 1 / eps, one)]
    return Instance(g, tuple(agents), FixedOrder(), "prophet_matching", mode,
                    params=(("p", p), ("q", q), ("r", r), ("epsilon", eps)))


def build_secretary_matching(m: int, lam, mode: str = EXACT) -> Instance:
    """Path a-b-c-d with m parallel copies of {b,c}, one unlikely agent per copy.

    Agents 0 and 1 are the lateral agents on {a,b} and {c,d}.
    """
    _check_mode(mode)
    lam = to_number(lam, mode)
    _require_m_lambda(m, lam)
    one = to_number(1, mode)
    edges = ((0, 1), (2, 3)) + ((1, 2),) * m
    g = Graph(4, edges, ("a", "b", "c", "d"))
    lateral = [AgentDistribution.deterministic(WeightFunction.of({e: one}), one) for e in (0, 1)]
    unlikely = [_jackpot(one / (m * m), 2 + i, lam * m, one) for i in range(m)]
    return Instance(g, tuple(lateral + unlikely), UniformRandomOrder(), "secretary_matching", mode,
                    roles=(ROLE_KEY,) * 2 + (ROLE_UNLIKELY,) * m,
                    jackpot_edges=frozenset(range(2, 2 + m)),
                    params=(("m", m), ("lambda", lam)))


def build_secretary_2ba(m: int, lam, mode: str = EXACT) -> Instance:
    """4-cycle plus diagonal {b,d}; two lateral pair-agents and m unlikely agents."""
    _check_mode(mode)
    lam = to_number(lam, mode)
    _require_m_lambda(m, lam)
    one = to_number(1, mode)
    g = _cycle_with_diagonal((1, 3))
    ab, bc, cd, ad, bd = range(5)

    def pair(e, f):
        return WeightFunction.of({e: one, f: one})

    left = AgentDistribution(((one / 2, pair(ab, bc)), (one / 2, pair(cd, ad))))
    right = AgentDistribution(((one / 2, pair(bc, cd)), (one / 2, pair(ad, ab))))
    unlikely = [_jackpot(one / (m * m), bd, lam * m, one) for _ in range(m)]
    return Instance(g, (left, right, *unlikely), UniformRandomOrder(), "secretary_2ba", mode,
                    roles=(ROLE_KEY,) * 2 + (ROLE_UNLIKELY,) * m,
                    jackpot_edges=frozenset({bd}),
                    params=(("m", m), ("lambda", lam)))


CYCLE_PAIRS = tuple(combinations(range(4), 2))


def build_iid_cycle(q: int, mode: str = EXACT) -> Instance:
    """q IID agents on a 4-cycle, each bidding 1 on a uniformly random pair of edges."""
    _check_mode(mode)
    if int(q) != q or q < 1:
        raise DomainError(f"q must be a positive integer, got {q}")
    one = to_number(1, mode)
    g = _cycle_with_diagonal(None)
    shared = AgentDistribution(tuple((one / 6, WeightFunction.of({e: one, f: one})) for e, f in CYCLE_PAIRS))
    return Instance(g, (shared,), IIDCount(q), "iid_cycle", mode, roles=(ROLE_IID,),
                    params=(("q", q),))


def build_iid_jackpot(m: int, lam, theta, mode: str = EXACT) -> Instance:
    """IID instance on the 4-cycle plus diagonal {a,c}, driven by two independent coins.

    Coin one (probability 1/m^2) puts lambda*m on the diagonal; coin two
    (probability theta/m) puts weight 1 on a uniformly random pair of cycle
    edges.  Outcomes are the explicit product of the two coins.
    """
    _check_mode(mode)
    lam, theta = to_number(lam, mode), to_number(theta, mode)
    _require_m_lambda(m, lam)
    if theta < 0:
        raise DomainError(f"theta must be nonnegative, got {theta}")
    if theta > m:
        raise DomainError(f"theta/m = {theta}/{m} exceeds 1")
    one = to_number(1, mode)
    g = _cycle_with_diagonal((0, 2))
    p_diag = one / (m * m)
    p_pair = theta / m
    outcomes = []
    for diag_on, p1 in ((True, p_diag), (False, one - p_diag)):
        base = {4: lam * m} if diag_on else {}
        for e, f in CYCLE_PAIRS:
            outcomes.append((p1 * p_pair / 6, WeightFunction.of({**base, e: one, f: one})))
        outcomes.append((p1 * (one - p_pair), WeightFunction.of(base)))
    shared = AgentDistribution(tuple(outcomes))
    return Instance(g, (shared,), IIDCount(m), "iid_jackpot", mode, roles=(ROLE_IID,),
                    jackpot_edges=frozenset({4}),
                    params=(("m", m), ("lambda", lam), ("theta", theta)))


def build_single_choice_secretary(m: int, lam, mode: str = EXACT) -> Instance:
    """One item; an important agent bidding 1 (agent 0) plus m unlikely agents."""
    _check_mode(mode)
    lam = to_number(lam, mode)
    _require_m_lambda(m, lam)
    one = to_number(1, mode)
    g = Graph(2, ((0, 1),), ("x", "y"))
    important = AgentDistribution.deterministic(WeightFunction.of({0: one}), one)
    unlikely = [_jackpot(one / (m * m), 0, lam * m, one) for _ in range(m)]
    return Instance(g, (important, *unlikely), UniformRandomOrder(), "single_choice", mode,
                    roles=(ROLE_KEY,) + (ROLE_UNLIKELY,) * m,
                    params=(("m", m), ("lambda", lam)))


def make_instance(edges: Sequence[tuple[int, int]], agents: Iterable, arrival: ArrivalModel | None = None,
                  vertex_count: int | None = None, mode: str = EXACT, label: str = "custom") -> Instance:
    """Convenience constructor from plain lists.

    ``agents`` is an iterable of outcome lists ``[(prob, {edge: weight}), ...]``.
    """
    if vertex_count is None:
        vertex_count = 1 + max((max(e) for e in edges), default=0)
    dists = tuple(
        AgentDistribution(tuple((to_number(p, mode),
                                 WeightFunction.of({e: to_number(w, mode) for e, w in wmap.items()}))
                                for p, wmap in outs))
        for outs in agents)
    return Instance(Graph(vertex_count, tuple(edges)), dists, arrival or FixedOrder(), label, mode)
