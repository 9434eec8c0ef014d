from fractions import Fraction

import pytest

from prophetlab.instances import (
    EXACT,
    NUMERIC,
    AgentDistribution,
    DomainError,
    FixedOrder,
    Graph,
    IIDCount,
    Instance,
    WeightFunction,
    build_adversarial_2ba,
    build_iid_cycle,
    build_iid_jackpot,
    build_prophet_matching,
    build_secretary_2ba,
    build_secretary_matching,
    build_single_choice_secretary,
    instance_from_json,
    instance_to_json,
    make_instance,
    prophet_matching_r,
    validate,
)

F = Fraction

ALL_BUILDERS = [
    lambda mode: build_adversarial_2ba(0.1, mode),
    lambda mode: build_prophet_matching(0.299130, 0.364352, 1e-3, mode),
    lambda mode: build_secretary_matching(3, 2, mode),
    lambda mode: build_secretary_2ba(2, 1.5, mode),
    lambda mode: build_iid_cycle(2, mode),
    lambda mode: build_iid_jackpot(10, 1.4737, 2.8224, mode),
    lambda mode: build_single_choice_secretary(4, 1.36603, mode),
]


def outcome_map(agent):
    return {wf: p for p, wf in agent.outcomes}


def test_adversarial_jackpot_agent():
    inst = build_adversarial_2ba(F(1, 2))
    agent3 = inst.agents[2]
    assert outcome_map(agent3) == {WeightFunction.of({4: F(8)}): F(1, 2), WeightFunction(): F(1, 2)}
    assert inst.graph.edge_name(4) == "{a,c}"


@pytest.mark.parametrize("eps", [0, 1, -0.5, 2])
def test_adversarial_rejects_epsilon_outside_open_interval(eps):
    with pytest.raises(DomainError):
        build_adversarial_2ba(eps)


def test_prophet_matching_r_and_constraints():
    inst = build_prophet_matching(0.299130, 0.364352, 1e-3)
    p, q, r = inst.param["p"], inst.param["q"], inst.param["r"]
    assert r == (1 - p) * q + (1 - q) * p
    assert abs(float(r) - 0.445505) < 1e-6
    assert p < q < r < F(1, 2) and 1 - p < 2 * r
    # the {0,1} agent is the jackpot (1/eps with probability eps)
    assert outcome_map(inst.agents[8])[WeightFunction.of({8: F(1000)})] == F(1, 1000)
    assert inst.is_single_minded()


def test_prophet_matching_rejects_p_not_below_q():
    with pytest.raises(DomainError, match="p < q"):
        build_prophet_matching(0.4, 0.2, 0.01)


def test_secretary_matching_shape():
    inst = build_secretary_matching(3, 2)
    assert inst.graph.vertex_count == 4 and inst.graph.edge_count == 5
    for i, agent in enumerate(inst.agents[2:]):
        assert outcome_map(agent) == {WeightFunction.of({2 + i: F(6)}): F(1, 9), WeightFunction(): F(8, 9)}
    # every copy of {b,c} has the same endpoints, so they conflict pairwise
    assert len({inst.graph.edge_mask(e) for e in range(2, 5)}) == 1


def test_secretary_matching_m1_is_deterministic_jackpot():
    inst = build_secretary_matching(1, 1)
    assert inst.agents[2].outcomes == ((F(1), WeightFunction.of({2: F(1)})),)


def test_secretary_2ba_shape():
    inst = build_secretary_2ba(2, 1.5)
    assert inst.agent_count == 4
    assert outcome_map(inst.agents[2]) == {WeightFunction.of({4: F(3)}): F(1, 4), WeightFunction(): F(3, 4)}
    assert inst.graph.edges[4] == (1, 3)
    for agent in inst.agents[:2]:
        assert agent.probabilities == (F(1, 2), F(1, 2))
        assert not agent.is_single_minded()


def test_iid_cycle_marginal_edge_probability_is_half():
    inst = build_iid_cycle(1)
    (agent,) = inst.agents
    assert agent.support_size == 6 and set(agent.probabilities) == {F(1, 6)}
    for e in range(4):
        assert sum(p for p, wf in agent.outcomes if wf[e] == 1) == F(1, 2)


def test_iid_jackpot_probabilities():
    inst = build_iid_jackpot(10, 1.4737, 2.8224, NUMERIC)
    (agent,) = inst.agents
    pair_shown = sum(p for p, wf in agent.outcomes if wf[0] or wf[1] or wf[2] or wf[3])
    assert pair_shown == pytest.approx(0.28224, abs=1e-12)
    both = [p for p, wf in agent.outcomes if wf[4] > 0 and wf[0] == 1 and wf[1] == 1]
    assert both == [pytest.approx(0.01 * 0.28224 / 6, rel=1e-12)]
    with pytest.raises(DomainError):
        build_iid_jackpot(2, 1.5, 3)


def test_single_choice_shape():
    inst = build_single_choice_secretary(4, 1.36603, NUMERIC)
    assert outcome_map(inst.agents[1])[WeightFunction.of({0: 4 * 1.36603})] == pytest.approx(1 / 16)
    assert inst.agents[0].outcomes == ((1.0, WeightFunction.of({0: 1.0})),)
    assert build_single_choice_secretary(1, 2).agent_count == 2


@pytest.mark.parametrize("build", ALL_BUILDERS)
@pytest.mark.parametrize("mode", [EXACT, NUMERIC])
def test_builders_validate_and_are_deterministic(build, mode):
    inst = build(mode)
    assert validate(inst) == []
    assert build(mode) == inst


def test_validate_reports_bad_probability_sum():
    inst = make_instance([(0, 1)], [[(0.5, {0: 1}), (0.4, {})]], mode=EXACT)
    assert validate(inst) == ["agent 0: probabilities sum to 9/10"]


def test_validate_reports_unknown_edge():
    g = build_adversarial_2ba(0.5).graph
    bad = Instance(g, (AgentDistribution.deterministic(WeightFunction.of({99: F(1)}), F(1)),), FixedOrder())
    problems = validate(bad)
    assert len(problems) == 1 and "unknown edge_id 99" in problems[0]


def test_graph_rejects_self_loop():
    assert Graph(2, ((0, 0),)).problems()


def test_zero_probability_outcomes_are_stripped():
    agent = AgentDistribution(((F(0), WeightFunction.of({0: F(1)})), (F(1), WeightFunction())))
    assert agent.outcomes == ((F(1), WeightFunction()),)
    assert agent.is_identically_zero()


def test_weight_function_drops_zero_entries():
    wf = WeightFunction.of({2: F(0), 1: F(3)})
    assert wf.weights == ((1, F(3)),) and wf[2] == 0 and wf.support == (1,)


def test_mixing_modes_is_an_error():
    with pytest.raises(TypeError):
        Instance(Graph(2, ((0, 1),)), (AgentDistribution.deterministic(WeightFunction.of({0: 1.0}), 1.0),),
                 FixedOrder(), mode=EXACT)


def test_iid_count_expands_sequence():
    inst = build_iid_cycle(4)
    assert inst.agent_count == 4 and len(inst.agent_sequence()) == 4
    assert isinstance(inst.arrival, IIDCount)


@pytest.mark.parametrize("build", ALL_BUILDERS)
@pytest.mark.parametrize("mode", [EXACT, NUMERIC])
def test_json_round_trip(build, mode):
    inst = build(mode)
    again = instance_from_json(instance_to_json(inst))
    assert again == inst
    assert instance_to_json(again) == instance_to_json(inst)


def test_exact_float_conversion_goes_through_repr():
    assert prophet_matching_r(F("0.3"), F("0.4")) == F(23, 50)
    assert build_adversarial_2ba(0.1).param["epsilon"] == F(1, 10)
