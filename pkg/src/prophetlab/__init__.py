"""Exact and numeric tools for upper bounds on online 2-bounded auctions."""

from .bounds import (
    GAMMA,
    REFERENCE_VALUES,
    BoundReport,
    ThresholdPair,
    ValidityError,
    F_polynomial,
    alg_secretary_2ba,
    alg_secretary_matching,
    alg_secretary_quadrature,
    bound_iid,
    bound_secretary_2ba,
    bound_secretary_matching,
    bound_single_choice,
    headline_bounds,
    maximize_F,
    minimize_nd,
    optimal_thresholds_secretary_2ba,
    optimal_thresholds_secretary_matching,
)
from .continuum import AlphaSolution, alpha_closed, alpha_numeric, alpha_one, beta, s_star
from .instances import (
    EXACT,
    NUMERIC,
    AgentDistribution,
    DomainError,
    FixedOrder,
    Graph,
    IIDCount,
    Instance,
    UniformRandomOrder,
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
    validate,
)
from .montecarlo import MCEstimate, ThresholdPolicy, mc_expected_opt, simulate_policy
from .offline import (
    Allocation,
    CapacityError,
    Realization,
    expected_opt_exact,
    expected_opt_finite_jackpot,
    expected_opt_finite_secretary,
    expected_opt_limit,
    iid_cycle_opt,
    max_weight_allocation,
)
from .online import DPValue, optimal_online_fixed_order, optimal_online_iid, optimal_online_random_order

__version__ = "0.1.0"
