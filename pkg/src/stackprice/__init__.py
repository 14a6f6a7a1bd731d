"""Exact Stackelberg network pricing: optimal prices with and without the
nonnegativity restriction, the price of positivity, and structural immunity
checks for series-parallel graphs, matroids and clutters."""

from .errors import (
    CapExceeded,
    ClutterViolation,
    ImmunityViolation,
    MatroidError,
    MultiFollower,
    NegativeCycle,
    NoPath,
    PathExplosion,
    ProfileExplosion,
    StackpriceError,
    StructuralError,
)
from .estimator import PopEstimator, StackelbergPricer
from .generators import (
    braess_basic,
    generalized_braess,
    path_graph,
    random_instance,
    random_matroid_instance,
    st_paradox_graph,
    triangle_network,
    two_follower_sp,
)
from .lp import Constraint, LinearProgram, LpOutcome, dual_of, make_lp, solve_lp
from .matroids import (
    ExplicitMatroid,
    GraphicMatroid,
    UniformMatroid,
    exchange_after_increase,
    greedy_min_basis,
    verify_matroid_immunity,
)
from .model import ALL_ZERO, FIXED_ONLY, Follower, Instance, PriceVector, Resource, leader_profit, set_cost, shortest_label
from .pricing import (
    PopReport,
    PricingSolution,
    best_response,
    optimal_pricing,
    price_of_positivity,
    profile_lp,
    single_price_best,
    surplus_formula_check,
)
from .rational import INF
from .structure import (
    clutter_necessary_condition,
    clutter_sufficient_condition,
    find_st_paradox,
    paradox_to_instance,
    recognize_series_parallel,
)
from .systems import StrategyProfile, StrategySystem, braess_path, enumerate_paths, family_of_bases

__version__ = "0.1.0"
