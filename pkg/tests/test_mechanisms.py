import numpy as np
import pytest

from core.exceptions import ConfigError, ParameterDomainError
from mechanisms import (
    BINARY_ALPHABET,
    DUAL_ALPHABET,
    BaselineParams,
    CouplingMode,
    DdpsParams,
    DeniabilityParams,
    DualParams,
    MultiValueParams,
    SamplingParams,
    Truth,
    binary_distribution,
    bottom_label,
    build_params,
    ddps_distribution,
    deniability_distribution,
    draw,
    draw_many,
    draw_multivalue_pair,
    draw_pair,
    draw_pair_many,
    dual_distribution_b,
    dual_distributions,
    multivalue_alphabet,
    multivalue_distributions,
    rr_baseline_distribution,
    sampling_noise_distribution,
    sampling_only_distribution,
)


def _random_ddps(rng) -> DdpsParams:
    a = rng.uniform()
    b = rng.uniform() * (1.0 - a)
    return DdpsParams(
        pi_s_yes1=a, pi_s_yes2=b,
        pi_1=rng.uniform(), pi_2=rng.uniform(),
        pi_s_no=rng.uniform(), pi_3=rng.uniform(),
    )


def _random_dual(rng) -> DualParams:
    cuts = np.sort(rng.uniform(size=3))
    return DualParams(pi_bot1=cuts[0], pi_bot2=cuts[1] - cuts[0], pi_s=cuts[2] - cuts[1])


def _random_multivalue(rng) -> MultiValueParams:
    v = int(rng.integers(1, 6))
    weights = rng.dirichlet(np.ones(v + 2))
    return MultiValueParams(pi_bot=tuple(weights[:-1]), pi_s=weights[-1])


def _assert_valid(dist):
    assert all(p >= 0 for p in dist.probs)
    assert abs(sum(dist.probs) - 1.0) <= 1e-12


# --- распределения -----------------------------------------------------------

def test_ddps_reference_yes_triple(reference_params):
    dist = ddps_distribution('yes', reference_params)

    assert dist.alphabet == BINARY_ALPHABET
    assert dist.prob('bottom') == pytest.approx(0.05)
    assert dist.prob('yes') == pytest.approx(0.9175)
    assert dist.prob('no') == pytest.approx(0.0325)


def test_ddps_reference_no_population(reference_params):
    dist = ddps_distribution(Truth.NO, reference_params)

    assert dist.prob('bottom') == pytest.approx(0.932)
    assert dist.prob('yes') == pytest.approx(0.06664)
    assert dist.prob('no') == pytest.approx(0.00136)


def test_sampling_noise_answers_yes_or_bottom():
    params = SamplingParams(pi_s_yes=0.8, pi_s_no=0.1)

    assert sampling_noise_distribution('yes', params).as_dict() == pytest.approx(
        {'bottom': 0.2, 'yes': 0.8, 'no': 0.0}
    )
    assert sampling_noise_distribution('no', params).as_dict() == pytest.approx(
        {'bottom': 0.9, 'yes': 0.1, 'no': 0.0}
    )


def test_sampling_only_ignores_no_rate():
    dist = sampling_only_distribution('no', SamplingParams(pi_s_yes=0.8, pi_s_no=0.3))
    assert dist.prob('bottom') == 1.0


def test_deniability_groups_truthful_and_forced_branches():
    params = DeniabilityParams(pi_s_yes=0.5, pi_s_no=0.2, pi_1=0.6, pi_2=0.5)

    yes = deniability_distribution('yes', params)
    no = deniability_distribution('no', params)

    assert yes.prob('yes') == pytest.approx(0.5 * (0.6 + 0.4 * 0.5))
    assert yes.prob('no') == pytest.approx(0.5 * 0.4 * 0.5)
    assert no.prob('yes') == pytest.approx(0.2 * 0.4 * 0.5)
    assert no.prob('no') == pytest.approx(0.2 * (1 - 0.4 * 0.5))


@pytest.mark.parametrize('params', [
    SamplingParams(pi_s_yes=0.7, pi_s_no=0.05),
    DeniabilityParams(pi_s_yes=0.9, pi_s_no=0.1, pi_1=0.8, pi_2=0.3),
])
@pytest.mark.parametrize('truth', ['yes', 'no'])
def test_simple_mechanisms_reduce_to_ddps(params, truth):
    direct = binary_distribution(truth, params)
    reduced = ddps_distribution(truth, params.as_ddps())
    assert direct.probs == pytest.approx(reduced.probs, abs=1e-15)


def test_random_parameter_vectors_give_valid_pmfs():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        ddps = _random_ddps(rng)
        dual = _random_dual(rng)
        multi = _random_multivalue(rng)
        baseline = BaselineParams(s1=max(rng.uniform(), 1e-6), s2=rng.uniform())
        sampling = SamplingParams(pi_s_yes=rng.uniform(), pi_s_no=rng.uniform())
        deniability = DeniabilityParams(
            pi_s_yes=rng.uniform(), pi_s_no=rng.uniform(), pi_1=rng.uniform(), pi_2=rng.uniform()
        )
        for truth in (Truth.YES, Truth.NO):
            for params in (ddps, sampling, deniability):
                _assert_valid(binary_distribution(truth, params))
            for dist in dual_distributions(truth, dual):
                _assert_valid(dist)
            for dist in rr_baseline_distribution(truth, baseline):
                _assert_valid(dist)
        for index in [None] + list(range(1, multi.v + 1)):
            for dist in multivalue_distributions(index, multi):
                _assert_valid(dist)


def test_ddps_rejects_yes_shares_above_one():
    with pytest.raises(ParameterDomainError):
        DdpsParams(pi_s_yes1=0.6, pi_s_yes2=0.5, pi_1=0.9, pi_2=0.9, pi_s_no=0.1, pi_3=0.9)


@pytest.mark.parametrize('value', [-0.1, 1.2, float('nan'), 'abc'])
def test_probabilities_are_checked(value):
    with pytest.raises(ParameterDomainError):
        SamplingParams(pi_s_yes=value, pi_s_no=0.1)


def test_dual_layout(dual_params):
    assert dual_params.pi_bot3 == pytest.approx(0.45)

    a_yes, c_yes = dual_distributions('yes', dual_params)
    a_no, c_no = dual_distributions('no', dual_params)

    assert a_yes.alphabet == DUAL_ALPHABET
    assert a_yes.probs == pytest.approx((0.25, 0.3, 0.45))
    assert a_no.probs == a_yes.probs
    assert c_yes.probs == pytest.approx((0.2, 0.35, 0.45))
    assert c_no.probs == pytest.approx((0.2, 0.3, 0.5))
    assert dual_distribution_b(dual_params) == c_yes


def test_dual_from_bottoms_takes_remainder():
    params = DualParams.from_bottoms(pi_bot2=0.02, pi_bot3=0.02, pi_s=0.05)
    assert params.pi_bot1 == pytest.approx(0.91)
    assert params.pi_bot3 == pytest.approx(0.02)

    with pytest.raises(ParameterDomainError):
        DualParams.from_bottoms(pi_bot2=0.6, pi_bot3=0.5, pi_s=0.05)


def test_multivalue_rounds():
    params = MultiValueParams(pi_bot=(0.1, 0.2, 0.3, 0.3), pi_s=0.1)
    assert params.v == 3
    assert multivalue_alphabet(3) == ('bot0', 'bot1', 'bot2', 'bot3')

    first, second = multivalue_distributions(2, params)
    assert first.probs == pytest.approx((0.2, 0.2, 0.3, 0.3))
    assert second.probs == pytest.approx((0.1, 0.2, 0.4, 0.3))

    first, second = multivalue_distributions(None, params)
    assert first == second

    with pytest.raises(ParameterDomainError):
        multivalue_distributions(4, params)
    with pytest.raises(ParameterDomainError):
        multivalue_distributions(0, params)


def test_multivalue_with_three_categories_is_the_dual_mechanism(dual_params):
    multi = MultiValueParams(pi_bot=(0.2, 0.3, 0.45), pi_s=0.05)
    relabel = {bottom_label(i): bottom_label(i + 1) for i in range(3)}

    a_yes, c_yes = dual_distributions('yes', dual_params)
    _, c_no = dual_distributions('no', dual_params)
    first, second_yes = multivalue_distributions(1, multi)
    _, second_no = multivalue_distributions(2, multi)

    assert first.relabel(relabel).probs == pytest.approx(a_yes.probs)
    assert first.relabel(relabel).alphabet == a_yes.alphabet
    assert second_yes.relabel(relabel).probs == pytest.approx(c_yes.probs)
    assert second_no.relabel(relabel).probs == pytest.approx(c_no.probs)


def test_rr_baseline_ticks():
    params = BaselineParams(s1=0.5, s2=0.25)
    yes = rr_baseline_distribution('yes', params)
    no = rr_baseline_distribution('no', params)

    assert yes.truth_tick.prob('yes') == 0.5
    assert no.truth_tick.prob('yes') == 0.0
    assert yes.blind_tick.prob('yes') == no.blind_tick.prob('yes') == 0.25

    with pytest.raises(ParameterDomainError):
        BaselineParams(s1=0.0, s2=0.1)


# --- выборка ---------------------------------------------------------------

def test_draw_picks_first_symbol_where_cumulative_exceeds_u(reference_params):
    dist = ddps_distribution('yes', reference_params)

    assert draw(dist, 0.0) == 'bottom'
    assert draw(dist, 0.049) == 'bottom'
    assert draw(dist, 0.051) == 'yes'
    assert draw(dist, 0.9674) == 'yes'
    assert draw(dist, 0.99) == 'no'

    with pytest.raises(ParameterDomainError):
        draw(dist, 1.0)
    with pytest.raises(ParameterDomainError):
        draw(dist, -0.01)


def test_draw_never_returns_zero_probability_symbol():
    dist = sampling_noise_distribution('yes', SamplingParams(pi_s_yes=0.3, pi_s_no=0.0))
    assert draw(dist, np.nextafter(1.0, 0.0)) == 'yes'


def test_draw_many_matches_draw(reference_params):
    dist = ddps_distribution('no', reference_params)
    u = np.random.default_rng(3).random(500)

    indices = draw_many(dist, u)
    assert [dist.alphabet[i] for i in indices] == [draw(dist, x) for x in u]


def test_coupled_pair_layout(dual_params):
    assert draw_pair('yes', dual_params, 0.1, 0.9) == ('bot1', 'bot1')
    assert draw_pair('yes', dual_params, 0.3, 0.0) == ('bot2', 'bot2')
    assert draw_pair('no', dual_params, 0.6, 0.0) == ('bot3', 'bot3')
    # срез π_s
    assert draw_pair('yes', dual_params, 0.97, 0.0) == ('bot1', 'bot2')
    assert draw_pair('no', dual_params, 0.97, 0.0) == ('bot1', 'bot3')


def test_coupled_pair_agrees_when_slice_is_empty():
    params = DualParams(pi_bot1=0.2, pi_bot2=0.3, pi_s=0.0)
    u = np.random.default_rng(5).random(2000)
    for truth in ('yes', 'no'):
        idx_a, idx_c = draw_pair_many(truth, params, u)
        assert np.array_equal(idx_a, idx_c)


@pytest.mark.parametrize('truth', ['yes', 'no'])
def test_coupled_marginals_match_pmf(truth, dual_params):
    u = np.random.default_rng(17).random(200_000)
    idx_a, idx_c = draw_pair_many(truth, dual_params, u)
    dist_a, dist_c = dual_distributions(truth, dual_params)

    freq_a = np.bincount(idx_a, minlength=3) / len(u)
    freq_c = np.bincount(idx_c, minlength=3) / len(u)
    assert freq_a == pytest.approx(dist_a.probs, abs=0.005)
    assert freq_c == pytest.approx(dist_c.probs, abs=0.005)


@pytest.mark.parametrize('truth', ['yes', 'no'])
def test_draw_is_monotone_in_u(truth, reference_params):
    dist = ddps_distribution(truth, reference_params)
    grid = np.linspace(0.0, 1.0, 2001, endpoint=False)

    indices = [dist.index(draw(dist, u)) for u in grid]
    assert indices == sorted(indices)
    assert np.all(np.diff(draw_many(dist, grid)) >= 0)


@pytest.mark.parametrize('truth', ['yes', 'no'])
def test_ddps_with_all_pi_one_never_answers_no(truth):
    params = DdpsParams(pi_s_yes1=0.45, pi_s_yes2=0.5, pi_1=1.0, pi_2=1.0, pi_s_no=0.068, pi_3=1.0)
    dist = ddps_distribution(truth, params)

    assert dist.prob('no') == 0.0
    assert dist.prob('yes') == pytest.approx(0.95 if truth == 'yes' else 0.068)


def test_coupled_rounds_differ_only_by_sampled_yes_owners(dual_params):
    rng = np.random.default_rng(29)
    u_yes, u_no = rng.random(1200), rng.random(8800)
    bot2 = DUAL_ALPHABET.index('bot2')

    a_yes, c_yes = draw_pair_many('yes', dual_params, u_yes)
    a_no, c_no = draw_pair_many('no', dual_params, u_no)
    count_a = np.count_nonzero(a_yes == bot2) + np.count_nonzero(a_no == bot2)
    count_c = np.count_nonzero(c_yes == bot2) + np.count_nonzero(c_no == bot2)

    slice_start = np.cumsum([dual_params.pi_bot1, dual_params.pi_bot2, dual_params.pi_bot3])[-1]
    sampled_yes = np.count_nonzero(u_yes >= slice_start)
    assert sampled_yes > 0
    assert count_c - count_a == sampled_yes


def test_independent_mode_needs_second_stream(dual_params):
    with pytest.raises(ParameterDomainError):
        draw_pair_many('yes', dual_params, np.array([0.5]), mode=CouplingMode.INDEPENDENT)

    pair = draw_pair('yes', dual_params, 0.97, 0.1, mode='independent')
    assert pair == ('bot3', 'bot1')


def test_multivalue_coupled_draw_moves_slice_to_value():
    params = MultiValueParams(pi_bot=(0.2, 0.3, 0.45), pi_s=0.05)
    assert draw_multivalue_pair(2, params, 0.97, 0.0) == ('bot0', 'bot2')
    assert draw_multivalue_pair(None, params, 0.97, 0.0) == ('bot0', 'bot0')
    assert draw_multivalue_pair(1, params, 0.1, 0.0) == ('bot0', 'bot0')


# --- сборка параметров -------------------------------------------------------

def test_build_params_is_strict():
    params = build_params('dual', {'pi_bot1': 0.2, 'pi_bot2': 0.3, 'pi_s': 0.05})
    assert params == DualParams(pi_bot1=0.2, pi_bot2=0.3, pi_s=0.05)

    multi = build_params('multivalue', {'pi_bot': [0.2, 0.3, 0.45], 'pi_s': 0.05})
    assert multi.pi_bot == (0.2, 0.3, 0.45)

    with pytest.raises(ConfigError):
        build_params('dual', {'pi_bot1': 0.2, 'pi_bot2': 0.3, 'pi_s': 0.05, 'extra': 1})
    with pytest.raises(ConfigError):
        build_params('dual', {'pi_bot1': 0.2})
    with pytest.raises(ConfigError):
        build_params('rappor', {})


def test_truth_parse():
    assert Truth.parse(' YES ') is Truth.YES
    with pytest.raises(ParameterDomainError):
        Truth.parse('maybe')
