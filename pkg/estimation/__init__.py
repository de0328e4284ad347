from .estimators import (
    BINARY_ESTIMATORS,
    Estimate,
    baseline_aggregate,
    bernoulli_count_variance,
    estimate_dual,
    estimate_from_bottom,
    estimate_from_no,
    estimate_from_yes,
    estimate_multivalue,
    estimate_rr_baseline,
    plugin_split,
)
from .sign_system import SignSolution, SolutionSet, select_solution, solve_sign_system
from .tally import (
    Tally,
    expected_baseline_tallies,
    expected_dual_tallies,
    expected_multivalue_tallies,
    expected_tally,
)

__all__ = [
    'Tally', 'Estimate', 'SolutionSet', 'SignSolution',
    'estimate_from_yes', 'estimate_from_no', 'estimate_from_bottom', 'BINARY_ESTIMATORS',
    'estimate_dual', 'estimate_multivalue', 'estimate_rr_baseline', 'baseline_aggregate',
    'solve_sign_system', 'select_solution',
    'bernoulli_count_variance', 'plugin_split',
    'expected_tally', 'expected_dual_tallies', 'expected_multivalue_tallies',
    'expected_baseline_tallies',
]
