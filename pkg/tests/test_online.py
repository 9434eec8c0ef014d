from fractions import Fraction

import pytest

from prophetlab.continuum import alpha_one
from prophetlab.instances import (
    NUMERIC,
    AgentDistribution,
    Instance,
    UniformRandomOrder,
    WeightFunction,
    build_adversarial_2ba,
    build_iid_cycle,
    build_iid_jackpot,
    build_prophet_matching,
    build_secretary_matching,
    build_single_choice_secretary,
    make_instance,
)
from prophetlab.offline import expected_opt_exact, iid_cycle_online
from prophetlab.online import (
    optimal_online_fixed_order,
    optimal_online_iid,
    optimal_online_random_order,
)
from randinst import random_instance

F = Fraction


def online_value(inst, **kw):
    kind = inst.arrival.kind
    solver = {"fixed": optimal_online_fixed_order, "random": optimal_online_random_order,
              "iid": optimal_online_iid}[kind]
    return solver(inst, **kw).value


@pytest.mark.parametrize("eps", [F(1, 2), F(1, 10), F(1, 10**4), F(3, 7)])
def test_adversarial_online_is_four(eps):
    assert optimal_online_fixed_order(build_adversarial_2ba(eps)).value == 4


def test_prophet_matching_online_is_one():
    inst = build_prophet_matching(0.299130, 0.364352, F(1, 10**4))
    assert optimal_online_fixed_order(inst).value == 1


def test_single_deterministic_agent():
    inst = make_instance([(0, 1)], [[(1, {0: 5})]])
    assert optimal_online_fixed_order(inst).value == 5


def test_single_choice_m1_takes_jackpot():
    assert optimal_online_random_order(build_single_choice_secretary(1, 2)).value == 2


def test_two_identical_agents_one_slot():
    inst = make_instance([(0, 1)], [[(1, {0: 1})], [(1, {0: 1})]], UniformRandomOrder())
    assert optimal_online_random_order(inst).value == 1


def test_secretary_matching_m6_ratio_band():
    inst = build_secretary_matching(6, 2.27861)
    ratio = optimal_online_random_order(inst).value / expected_opt_exact(inst, exchangeable=True)
    assert 0.60 <= ratio <= 0.75


@pytest.mark.parametrize("q", range(1, 8))
def test_iid_cycle_online(q):
    assert optimal_online_iid(build_iid_cycle(q)).value == iid_cycle_online(q)


def test_iid_numeric_matches_exact():
    inst = build_iid_jackpot(6, F(3, 2), F(2))
    exact = optimal_online_iid(inst).value
    numeric = optimal_online_iid(build_iid_jackpot(6, 1.5, 2.0, NUMERIC)).value
    assert numeric == pytest.approx(float(exact), rel=1e-12)


def test_iid_jackpot_dp_tracks_rolling_particle():
    lam, theta = 1.4737, 2.8224
    dp = optimal_online_iid(build_iid_jackpot(2000, lam, theta, NUMERIC)).value
    assert abs(dp - alpha_one(lam, theta)) < 0.02


def test_skip_wins_ties_and_zero_edges_never_taken():
    # the first agent is indifferent between taking 1 now and the 1 that surely follows
    inst = make_instance([(0, 1)], [[(1, {0: 1})], [(1, {0: 1})]])
    dp = optimal_online_fixed_order(inst, keep_decisions=True)
    assert dp.value == 1
    assert dp.decisions[(0, 0, 0)] is None and dp.decisions[(1, 0, 0)] == 0
    inst = make_instance([(0, 1)], [[(1, {0: 0})]])
    assert optimal_online_fixed_order(inst, keep_decisions=True).decisions[(0, 0, 0)] is None


def test_decision_table_serializes():
    dp = optimal_online_fixed_order(build_adversarial_2ba(F(1, 2)), keep_decisions=True)
    rows = dp.decision_rows()
    assert rows and set(rows[0]) == {"state", "step", "outcome_index", "action"}
    assert dp.decisions_to_json() == dp.decisions_to_json()


def test_random_order_guard():
    with pytest.raises(ValueError, match="guard"):
        optimal_online_random_order(make_instance(
            [(0, 1)], [[(1, {0: i + 1})] for i in range(13)], UniformRandomOrder()))


def test_random_order_with_many_exchangeable_agents_is_fine():
    inst = build_secretary_matching(50, 2.27861, NUMERIC)
    assert optimal_online_random_order(inst).value > 0


@pytest.mark.parametrize("seed", range(40))
def test_online_never_beats_offline(seed):
    inst = random_instance(seed)
    assert online_value(inst) <= expected_opt_exact(inst)


@pytest.mark.parametrize("seed", range(30))
def test_value_monotone_in_occupied_state(seed):
    inst = random_instance(seed, arrival=("fixed", "random")[seed % 2])
    values = {s: online_value(inst, start_state=s) for s in range(16)}
    for s, v in values.items():
        for t, w in values.items():
            if s & t == s:
                assert v >= w


@pytest.mark.parametrize("seed", range(20))
def test_zero_agent_changes_nothing(seed):
    inst = random_instance(seed, arrival=("fixed", "random")[seed % 2])
    zero = AgentDistribution.deterministic(WeightFunction(), F(1))
    for pos in (0, len(inst.agents)):
        agents = list(inst.agents)
        agents.insert(pos, zero)
        padded = Instance(inst.graph, tuple(agents), inst.arrival, inst.label, inst.mode)
        assert online_value(padded) == online_value(inst)


@pytest.mark.parametrize("seed", range(20))
def test_random_order_is_permutation_invariant(seed):
    inst = random_instance(seed, arrival="random")
    rev = Instance(inst.graph, inst.agents[::-1], inst.arrival, inst.label, inst.mode)
    assert optimal_online_random_order(rev).value == optimal_online_random_order(inst).value


def test_wrong_arrival_model_rejected():
    with pytest.raises(ValueError):
        optimal_online_random_order(build_adversarial_2ba(F(1, 2)))
    with pytest.raises(ValueError):
        optimal_online_iid(build_adversarial_2ba(F(1, 2)))
