from .config_file import ExperimentConfigFile, load_experiment_config, parse_experiment_config
from .engine import (
    MonteCarloEngine,
    PopulationSpec,
    TrialConfig,
    TrialResult,
    estimate_tallies,
    estimate_trial,
    owner_uniforms,
    run_baseline_trial,
    run_experiment,
    run_trial,
)
from .metrics import ExperimentMetrics, ExperimentReport
from .timeseries import populations_from_frame, run_timeseries, synthetic_timeseries

__all__ = [
    'PopulationSpec', 'TrialConfig', 'TrialResult', 'MonteCarloEngine',
    'run_trial', 'run_baseline_trial', 'estimate_trial', 'estimate_tallies', 'run_experiment', 'owner_uniforms',
    'ExperimentReport', 'ExperimentMetrics',
    'synthetic_timeseries', 'run_timeseries', 'populations_from_frame',
    'ExperimentConfigFile', 'load_experiment_config', 'parse_experiment_config',
]
