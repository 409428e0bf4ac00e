"""Scheduling idea cascades under opposing (accept/reject) influences."""
from .cascade import CascadeRun, monte_carlo, run_deterministic, run_random
from .exact import (
    DistributionMatrix,
    distribution_dp,
    evaluate_bruteforce,
    evaluate_dp,
    tail_ratio_report,
)
from .gadget import (
    GadgetInstance,
    ReliabilityInstance,
    build_gadget,
    lambda_decomposition,
    reliability_bruteforce,
)
from .model import (
    Area,
    CapExceededError,
    InfeasibleError,
    Schedule,
    Society,
    TopologyError,
    TypeProfile,
    ValidationError,
    expand_types,
    parse_schedule,
    parse_society,
    parse_types,
    serialize_society,
)
from .strategy import (
    AdaptivePolicy,
    ThresholdDistribution,
    adaptive_bruteforce,
    best_sigma_switch,
    evaluate_random_thresholds,
    exhaustive_nonadaptive,
    greedy_strategy,
    optimal_adaptive,
    sorted_strategy,
)

__version__ = "0.1.0"
