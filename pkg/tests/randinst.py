"""Seeded generator of small random exact-mode instances."""

import random
from fractions import Fraction
from itertools import combinations

from prophetlab.instances import FixedOrder, IIDCount, UniformRandomOrder, make_instance

ARRIVALS = ("fixed", "random", "iid")


def random_instance(seed, arrival=None, max_agents=4, max_edges=6, max_outcomes=3, vertices=4):
    rng = random.Random(seed)
    pairs = list(combinations(range(vertices), 2))
    # parallel edges are allowed, so draw endpoint pairs with replacement
    edges = [rng.choice(pairs) for _ in range(rng.randint(1, max_edges))]
    arrival = arrival or rng.choice(ARRIVALS)
    n = rng.randint(1, max_agents)
    n_dists = 1 if arrival == "iid" else n
    agents = []
    for _ in range(n_dists):
        k = rng.randint(1, max_outcomes)
        raw = [rng.randint(1, 6) for _ in range(k)]
        outs = []
        for r in raw:
            support = rng.sample(range(len(edges)), rng.randint(0, min(3, len(edges))))
            outs.append((Fraction(r, sum(raw)), {e: rng.randint(0, 5) for e in support}))
        agents.append(outs)
    model = {"fixed": FixedOrder(), "random": UniformRandomOrder(), "iid": IIDCount(n)}[arrival]
    return make_instance(edges, agents, model, vertex_count=vertices, label=f"random_{seed}")
