"""Greedy maximization of monotone set functions with primal-curvature ratio certificates."""

from .adaptive import (
    AdaptiveInstance,
    StochasticItem,
    adaptive_gamma_hat,
    adaptive_greedy,
    adaptive_primal_curvature,
    adaptive_ratio,
    adaptive_tpc,
    conditional_expected_gain,
    optimal_policy_bruteforce,
)
from .curvature import (
    CurvatureCertificate,
    elemental_curvature,
    gamma_hat_exact,
    gamma_hat_sampled,
    primal_curvature,
    total_curvature,
    total_primal_curvature,
)
from .greedy import GreedyChain, extend_chain, greedy_maximize
from .objectives import build, load_instance, save_instance
from .oracle import brute_force_optimum, exact_ratio, random_monotone_function
from .pipeline import analyze
from .ratios import (
    RatioReport,
    build_report,
    conforti_ratios,
    fixed_gamma_ratio,
    primal_ratio,
    wang_ratio,
)
from .setfn import GroundSet, SetFunctionHandle, UniformMatroid, audit_function

__version__ = "0.1.0"

__all__ = [
    "AdaptiveInstance",
    "CurvatureCertificate",
    "GreedyChain",
    "GroundSet",
    "RatioReport",
    "SetFunctionHandle",
    "StochasticItem",
    "UniformMatroid",
    "adaptive_gamma_hat",
    "adaptive_greedy",
    "adaptive_primal_curvature",
    "adaptive_ratio",
    "adaptive_tpc",
    "analyze",
    "audit_function",
    "brute_force_optimum",
    "build",
    "build_report",
    "conditional_expected_gain",
    "conforti_ratios",
    "elemental_curvature",
    "exact_ratio",
    "extend_chain",
    "fixed_gamma_ratio",
    "gamma_hat_exact",
    "gamma_hat_sampled",
    "greedy_maximize",
    "load_instance",
    "optimal_policy_bruteforce",
    "primal_curvature",
    "primal_ratio",
    "random_monotone_function",
    "save_instance",
    "total_curvature",
    "total_primal_curvature",
    "wang_ratio",
    "__version__",
]
