"""Two-stage network security game: dissemination, attacks, and investments."""

from .attack import (
    AttackSolution,
    attack_sensitivity,
    attacker_payoff,
    breach_probabilities,
    breach_probability,
    expected_stolen,
    kkt_residual,
    optimal_attack,
    star_attack,
)
from .dissemination import (
    Dissemination,
    Params,
    complete_connected_probability,
    complete_docs,
    complete_pair_bounds,
    complete_pair_reach,
    connected_probability_exact,
    disseminate,
    expected_documents,
    p_for_half_coverage,
    reach_closed_form,
    reach_exact,
    reach_monte_carlo,
    ring_docs,
    ring_pair_reach,
    star_docs,
    topology_docs,
)
from .game import (
    GameOutcome,
    NonConvergenceError,
    StarLambStrategy,
    StarUniformStrategy,
    best_response_dynamics,
    evaluate_outcome,
    find_crossover_p,
    investment_gap,
    nash_random,
    nash_strategic_vt,
    social_optimum_numeric,
    social_optimum_random,
    social_optimum_strategic_vt,
    star_sacrificial_lamb,
    star_uniform_attack_strategy,
    unique_crossover_condition,
)
from .graph import (
    Graph,
    build_topology,
    complete_graph,
    is_vertex_transitive,
    load_edge_list,
    ring_graph,
    star_graph,
)

__version__ = "0.1.0"

__all__ = [
    "AttackSolution",
    "Dissemination",
    "GameOutcome",
    "Graph",
    "NonConvergenceError",
    "Params",
    "StarLambStrategy",
    "StarUniformStrategy",
    "attack_sensitivity",
    "attacker_payoff",
    "best_response_dynamics",
    "breach_probabilities",
    "breach_probability",
    "build_topology",
    "complete_connected_probability",
    "complete_docs",
    "complete_graph",
    "complete_pair_bounds",
    "complete_pair_reach",
    "connected_probability_exact",
    "disseminate",
    "evaluate_outcome",
    "expected_documents",
    "expected_stolen",
    "find_crossover_p",
    "investment_gap",
    "is_vertex_transitive",
    "kkt_residual",
    "load_edge_list",
    "nash_random",
    "nash_strategic_vt",
    "optimal_attack",
    "p_for_half_coverage",
    "reach_closed_form",
    "reach_exact",
    "reach_monte_carlo",
    "ring_docs",
    "ring_graph",
    "ring_pair_reach",
    "social_optimum_numeric",
    "social_optimum_random",
    "social_optimum_strategic_vt",
    "star_attack",
    "star_docs",
    "star_graph",
    "star_sacrificial_lamb",
    "star_uniform_attack_strategy",
    "topology_docs",
    "unique_crossover_condition",
]
