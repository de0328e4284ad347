import dataclasses
import json
import math

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from core.config import AppConfig
from core.exceptions import ConfigError, ParameterDomainError
from data import ingest_counts_csv, population_series
from mechanisms import BaselineParams, DualParams, MultiValueParams, SamplingParams, bottom_label
from simulation import (
    ExperimentMetrics,
    PopulationSpec,
    TrialConfig,
    load_experiment_config,
    owner_uniforms,
    parse_experiment_config,
    populations_from_frame,
    run_experiment,
    run_timeseries,
    run_trial,
    synthetic_timeseries,
)


def test_owner_uniforms_are_reproducible():
    first = owner_uniforms(7, 3, 0, 100)
    assert np.array_equal(first, owner_uniforms(7, 3, 0, 100))
    assert not np.array_equal(first, owner_uniforms(7, 3, 1, 100))
    assert not np.array_equal(first, owner_uniforms(7, 4, 0, 100))
    # Префикс потока не зависит от размера популяции
    assert np.array_equal(owner_uniforms(7, 3, 0, 10), first[:10])


def test_deterministic_sampling_trial():
    config = TrialConfig(
        mechanism='sampling',
        params=SamplingParams(pi_s_yes=1.0, pi_s_no=0.0),
        population=PopulationSpec(yes=7, no=3),
        trials=5,
    )
    tally = run_trial(config, 0)
    assert tally.count('yes') == 7
    assert tally.count('bottom') == 3
    assert tally.count('no') == 0

    report = run_experiment(config)
    assert report.abs_error == 0.0
    assert report.empirical_sigma == 0.0
    assert report.coverage == 1.0
    assert report.as_record()['succeeded'] == 5


def test_trials_are_reproducible(reference_params):
    config = TrialConfig(
        mechanism='ddps', params=reference_params, population=PopulationSpec(yes=100, no=900),
        master_seed=11, trials=20,
    )
    assert run_trial(config, 4) == run_trial(config, 4)
    assert run_experiment(config).as_record() == run_experiment(config).as_record()


def test_parallel_trials_match_serial(reference_params):
    config = TrialConfig(
        mechanism='ddps', params=reference_params, population=PopulationSpec(yes=100, no=900), trials=16,
    )
    parallel = dataclasses.replace(config, n_jobs=2)
    assert run_experiment(config).as_record() == run_experiment(parallel).as_record()


def test_dual_without_sampled_slice_repeats_round_one():
    config = TrialConfig(
        mechanism='dual', params=DualParams(0.3, 0.3, 0.0), population=PopulationSpec(yes=50, no=150), trials=3,
    )
    tally_a, tally_c = run_trial(config, 0)
    assert tally_a == tally_c

    report = run_experiment(config)
    assert report.failed_trials == 3
    assert report.failures == {'division-domain': 3}
    assert math.isnan(report.mean)
    assert report.as_record()['mean'] is None


def test_dual_estimate_is_unbiased(dual_params):
    config = TrialConfig(
        mechanism='dual', params=dual_params, population=PopulationSpec(yes=1000, no=9000), trials=200,
    )
    report = run_experiment(config)
    assert abs(report.mean - 1000) < 50
    assert report.empirical_sigma == pytest.approx(137.84, rel=0.25)


def test_ddps_estimate_is_unbiased_and_covered(reference_params):
    config = TrialConfig(
        mechanism='ddps', params=reference_params, population=PopulationSpec(yes=1000, no=9000), trials=1000,
    )
    report = run_experiment(config)
    standard_error = report.empirical_sigma / math.sqrt(len(report.estimates))

    assert abs(report.mean - 1000) < 4 * standard_error
    assert report.ci[0] < report.mean < report.ci[1]

    # Каждое испытание - отдельный эксперимент со своим 99% интервалом
    covered = round(report.coverage * len(report.estimates))
    assert report.coverage >= 0.97
    assert stats.binomtest(covered, len(report.estimates), 0.99).pvalue > 1e-3


@pytest.mark.slow
def test_coupled_error_stays_flat_while_baseline_grows(dual_params):
    sigmas = {}
    for no in (1_000, 10_000, 100_000):
        config = TrialConfig(
            mechanism='dual', params=dual_params, population=PopulationSpec(yes=1000, no=no),
            trials=400, baseline=BaselineParams(s1=0.9, s2=0.5),
        )
        report = run_experiment(config)
        sigmas[no] = (report.empirical_sigma, report.baseline.empirical_sigma)

    dual = [sigmas[no][0] for no in sigmas]
    assert max(dual) / min(dual) <= 1.25
    assert all(0.8 <= s / sigmas[1_000][0] <= 1.25 for s in dual)
    assert sigmas[100_000][1] / sigmas[1_000][1] > 5.0


def test_multivalue_trial_counts_every_owner():
    params = MultiValueParams(pi_bot=(0.2, 0.3, 0.4), pi_s=0.1)
    config = TrialConfig(
        mechanism='multivalue', params=params, population=PopulationSpec.multivalue([300, 200], none=100),
        trials=50, target=2,
    )
    first, second = run_trial(config, 0)
    assert first.total == second.total == 600
    assert config.true_value == 200

    report = run_experiment(config)
    assert abs(report.mean - 200) < 40


def test_trial_config_validation(reference_params):
    population = PopulationSpec(yes=1, no=1)
    with pytest.raises(ConfigError):
        TrialConfig(mechanism='nope', params=reference_params, population=population)
    with pytest.raises(ConfigError):
        TrialConfig(mechanism='dual', params=reference_params, population=population)
    with pytest.raises(ConfigError):
        TrialConfig(mechanism='ddps', params=reference_params, population=population, estimator='median')
    with pytest.raises(ConfigError):
        TrialConfig(mechanism='ddps', params=reference_params, population=population, trials=0)
    with pytest.raises(ConfigError):
        PopulationSpec(yes=1, values=(2, 3))
    with pytest.raises(ConfigError):
        PopulationSpec(yes=-1)


def test_metrics_helpers():
    assert ExperimentMetrics.z_value(0.99) == pytest.approx(2.5758, abs=1e-4)
    assert ExperimentMetrics.calculate_empirical_sigma(np.array([4.0])) == 0.0
    assert ExperimentMetrics.calculate_relative_error(0.0, 0) == 0.0
    assert math.isinf(ExperimentMetrics.calculate_relative_error(1.0, 0))


# --- временной ряд -----------------------------------------------------------

def test_synthetic_timeseries_peaks_in_the_evening():
    populations = synthetic_timeseries(stations=3220, vehicles=47719, windows=48, seed=1)

    assert len(populations) == 48
    assert all(0 <= p.yes <= 47719 and p.total == 47719 for p in populations)
    for cycle in range(2):
        yes = [p.yes for p in populations[cycle * 24:(cycle + 1) * 24]]
        assert int(np.argmax(yes)) == 17
        assert yes.count(max(yes)) == 1
    assert populations == synthetic_timeseries(stations=3220, vehicles=47719, windows=48, seed=1)


def test_synthetic_timeseries_validation():
    with pytest.raises(ParameterDomainError):
        synthetic_timeseries(stations=0, vehicles=10, windows=5, seed=1)


def test_run_timeseries(reference_params):
    populations = synthetic_timeseries(stations=3220, vehicles=47719, windows=24, seed=3)
    frame = run_timeseries(populations, 'ddps', reference_params, master_seed=5)

    assert list(frame.columns) == [
        'window', 'true_yes', 'total', 'pi_s_no', 'estimate', 'stderr', 'low', 'high', 'covered',
    ]
    assert len(frame) == 24
    assert frame['covered'].mean() >= 0.8
    assert frame.equals(run_timeseries(populations, 'ddps', reference_params, master_seed=5))


def test_run_timeseries_schedule(reference_params):
    populations = synthetic_timeseries(stations=100, vehicles=1000, windows=4, seed=3)
    schedule = [0.05, 0.1, 0.2, 0.3]
    frame = run_timeseries(populations, 'ddps', reference_params, master_seed=5, pi_s_no_schedule=schedule)
    assert frame['pi_s_no'].tolist() == schedule

    with pytest.raises(ConfigError):
        run_timeseries(populations, 'ddps', reference_params, master_seed=5, pi_s_no_schedule=schedule[:2])
    with pytest.raises(ConfigError):
        run_timeseries(populations, 'dual', DualParams(0.2, 0.3, 0.05), master_seed=5, pi_s_no_schedule=schedule)
    with pytest.raises(ConfigError):
        run_timeseries([], 'ddps', reference_params, master_seed=5)


def test_run_timeseries_from_csv(tmp_path, reference_params):
    path = tmp_path / 'counts.csv'
    path.write_text(
        'station_id,window_start,vehicle_count\n'
        'S1,2017-05-01T08:00:00Z,40\nS2,2017-05-01T08:00:00Z,60\n'
        'S1,2017-05-01T09:00:00Z,70\nS2,2017-05-01T09:00:00Z,30\n',
        encoding='utf-8',
    )
    series = population_series(ingest_counts_csv(path), 'S1')
    frame = run_timeseries(
        populations_from_frame(series), 'ddps', reference_params, master_seed=1,
        window_start=series['window_start'].tolist(),
    )
    assert frame['true_yes'].tolist() == [40, 70]
    assert frame['window_start'].iloc[1] == pd.Timestamp('2017-05-01T09:00:00Z')


# --- файл эксперимента -------------------------------------------------------

DDPS_DOCUMENT = {
    'mechanism': 'ddps',
    'params': {'pi_s_yes1': 0.45, 'pi_s_yes2': 0.5, 'pi_1': 0.95, 'pi_2': 0.98, 'pi_3': 0.98, 'pi_s_no': 0.068},
    'population': {'yes': 100, 'no': 900},
    'trials': 10,
    'seed': 7,
}


def test_parse_experiment_config(reference_params):
    parsed = parse_experiment_config(DDPS_DOCUMENT, AppConfig())

    assert parsed.trial.params == reference_params
    assert parsed.trial.master_seed == 7
    assert parsed.trial.trials == 10
    assert parsed.trial.population == PopulationSpec(yes=100, no=900)
    assert parsed.output is None


@pytest.mark.parametrize('patch', [
    {'colour': 'red'},
    {'population': {'yes': 1, 'no': 2, 'maybe': 3}},
    {'params': {**DDPS_DOCUMENT['params'], 'pi_4': 0.5}},
    {'trials': '10'},
    {'baseline': {'s1': 0.5, 's3': 0.1}},
])
def test_experiment_config_rejects_unknown_or_bad_keys(patch):
    with pytest.raises(ConfigError):
        parse_experiment_config({**DDPS_DOCUMENT, **patch}, AppConfig())


def test_experiment_config_parameter_domain():
    document = {**DDPS_DOCUMENT, 'params': {**DDPS_DOCUMENT['params'], 'pi_3': 1.5}}
    with pytest.raises(ParameterDomainError):
        parse_experiment_config(document, AppConfig())


def test_experiment_config_population_or_dataset(tmp_path):
    csv_path = tmp_path / 'counts.csv'
    csv_path.write_text(
        'station_id,window_start,vehicle_count\nS1,2017-05-01T08:00:00Z,40\nS2,2017-05-01T08:00:00Z,60\n',
        encoding='utf-8',
    )
    document = {k: v for k, v in DDPS_DOCUMENT.items() if k != 'population'}
    document['dataset'] = {'path': 'counts.csv', 'station': 'S1', 'window': '2017-05-01T08:00:00Z'}
    config_path = tmp_path / 'experiment.json'
    config_path.write_text(json.dumps(document), encoding='utf-8')

    loaded = load_experiment_config(config_path)
    assert loaded.trial.population == PopulationSpec(yes=40, no=60)
    assert loaded.source == str(config_path)

    with pytest.raises(ConfigError):
        parse_experiment_config({**document, 'population': {'yes': 1, 'no': 1}}, AppConfig(), tmp_path)


def test_load_experiment_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_experiment_config(tmp_path / 'absent.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"mechanism": ', encoding='utf-8')
    with pytest.raises(ConfigError):
        load_experiment_config(broken)


def test_multivalue_config_round_trip():
    document = {
        'mechanism': 'multivalue',
        'params': {'pi_bot': [0.2, 0.3, 0.4], 'pi_s': 0.1},
        'population': {'values': [30, 20], 'none': 5},
        'target': 2,
        'trials': 3,
    }
    trial = parse_experiment_config(document, AppConfig()).trial
    assert trial.params.v == 2
    assert trial.true_value == 20
    first, _ = run_trial(trial, 0)
    assert sum(first.count(bottom_label(i)) for i in range(3)) == 55
