import pytest

from core.exceptions import InfeasibleSearchError, ParameterDomainError
from estimation import estimate_from_yes, expected_tally
from tuning import ObjectiveValue, SearchSpec, evaluate_grid, grid_search_min_variance, variance_objective


def test_reference_objective(reference_params):
    value = variance_objective(reference_params, 100, 900)

    assert value.var_given_yes == pytest.approx(7.569375)
    assert value.var_given_no == pytest.approx(55.97919936)
    assert value.total == pytest.approx(63.54857436)


def test_objective_matches_estimator_variance(reference_params):
    estimate = estimate_from_yes(expected_tally(reference_params, 100, 900), reference_params)
    assert estimate.sigma ** 2 == pytest.approx(variance_objective(reference_params, 100, 900).total, rel=1e-9)


def test_objective_grows_with_population(reference_params):
    base = variance_objective(reference_params, 100, 900).total
    assert variance_objective(reference_params, 200, 900).total > base
    assert variance_objective(reference_params, 100, 1800).total > base


def test_objective_rejects_negative_inputs(reference_params):
    with pytest.raises(ParameterDomainError):
        variance_objective(reference_params, -1, 900)
    with pytest.raises(ParameterDomainError):
        ObjectiveValue(var_given_yes=-0.1, var_given_no=1.0)


def test_single_point_grid_returns_that_point(reference_params):
    spec = SearchSpec(
        yes=100, no=900,
        bounds={'pi_s_yes1': (0.45, 0.45), 'pi_s_yes2': (0.5, 0.5), 'pi_s_no': (0.068, 0.068)},
    )
    best, value = grid_search_min_variance(spec)

    assert best == reference_params
    assert value.total == pytest.approx(63.54857436)


def test_grid_search_finds_true_minimum():
    spec = SearchSpec(yes=500, no=5000, step=0.1, min_denominator=0.2)
    best, value = grid_search_min_variance(spec)

    feasible = evaluate_grid(spec)
    assert value.total == min(v.total for _, v in feasible)
    for params, _ in feasible:
        assert abs(params.yes_rate_given_yes - params.yes_rate_given_no) >= 0.2
    assert abs(best.yes_rate_given_yes - best.yes_rate_given_no) >= 0.2


def test_grid_axis_and_invalid_points_skipped():
    spec = SearchSpec(yes=10, no=10, step=0.25)
    assert spec.axis('pi_s_no') == [0.0, 0.25, 0.5, 0.75, 1.0]

    for params, _ in evaluate_grid(spec):
        assert params.pi_s_yes1 + params.pi_s_yes2 <= 1.0


def test_parallel_evaluation_matches_serial():
    serial = evaluate_grid(SearchSpec(yes=100, no=900, step=0.2, n_jobs=1))
    parallel = evaluate_grid(SearchSpec(yes=100, no=900, step=0.2, n_jobs=2))
    assert [p for p, _ in serial] == [p for p, _ in parallel]


def test_large_no_population_pushes_pi_s_no_to_boundary():
    spec = SearchSpec(yes=100, no=1_000_000, step=0.05, min_denominator=0.3)
    best, _ = grid_search_min_variance(spec)
    assert best.pi_s_no == 0.0


def test_infeasible_search():
    spec = SearchSpec(
        yes=100, no=900,
        bounds={'pi_s_yes1': (0.6, 0.6), 'pi_s_yes2': (0.6, 0.6), 'pi_s_no': (0.0, 1.0)},
    )
    with pytest.raises(InfeasibleSearchError):
        grid_search_min_variance(spec)

    with pytest.raises(InfeasibleSearchError):
        grid_search_min_variance(SearchSpec(yes=100, no=900, step=0.1, min_denominator=0.5, epsilon_budget=0.1))


def test_epsilon_budget_respected():
    from privacy import epsilon_ddps

    spec = SearchSpec(yes=100, no=900, step=0.1, epsilon_budget=1.0)
    for params, _ in evaluate_grid(spec):
        assert epsilon_ddps(params) <= 1.0


@pytest.mark.parametrize('kwargs', [
    {'step': 0.0},
    {'yes': -1},
    {'bounds': {'pi_x': (0.0, 1.0)}},
    {'bounds': {'pi_s_no': (0.5, 0.2)}},
    {'epsilon_budget': -0.5},
])
def test_search_spec_validation(kwargs):
    values = {'yes': 100, 'no': 900}
    values.update(kwargs)
    with pytest.raises(ParameterDomainError):
        SearchSpec(**values)
