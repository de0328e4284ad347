"""
JSON-файл эксперимента. Пример:

    {
      "mechanism": "ddps",
      "params": {"pi_s_yes1": 0.45, "pi_s_yes2": 0.5, "pi_1": 0.95,
                 "pi_2": 0.98, "pi_3": 0.98, "pi_s_no": 0.068},
      "population": {"yes": 1000, "no": 9000},
      "trials": 1000,
      "seed": 7
    }

Неизвестные ключи на любом уровне отклоняются.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import pandas as pd

from core.config import AppConfig
from core.exceptions import ConfigError
from data import ingest_counts_csv, population_series
from mechanisms import build_params

from .engine import PopulationSpec, TrialConfig

TOP_LEVEL_KEYS = {
    'mechanism', 'params', 'population', 'dataset', 'coupling', 'seed', 'trials',
    'confidence_level', 'estimator', 'target', 'baseline', 'n_jobs', 'output',
}
POPULATION_KEYS = {'yes', 'no', 'values', 'none'}
DATASET_KEYS = {'path', 'station', 'window', 'fleet'}
BASELINE_KEYS = {'s1', 's2'}


@dataclass(frozen=True)
class ExperimentConfigFile:
    trial: TrialConfig
    output: Optional[str] = None
    source: Optional[str] = None


def _check_keys(section: str, value: Any, allowed: set) -> Dict:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{section}: ожидается объект, получено {type(value).__name__}")
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ConfigError(f"{section}: неизвестные ключи {', '.join(unknown)}")
    return dict(value)


def _integer(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: ожидается целое число, получено {value!r}")
    return value


def _number(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: ожидается число, получено {value!r}")
    return float(value)


def _population_from_dataset(dataset: Dict, base_dir: Path) -> PopulationSpec:
    for key in ('path', 'station', 'window'):
        if key not in dataset:
            raise ConfigError(f"dataset: не задан ключ {key}")
    path = Path(dataset['path'])
    if not path.is_absolute():
        path = base_dir / path

    series = population_series(ingest_counts_csv(path), dataset['station'], dataset.get('fleet'))
    window = pd.Timestamp(dataset['window'])
    window = window.tz_localize('UTC') if window.tzinfo is None else window.tz_convert('UTC')
    match = series[series['window_start'] == window]
    if match.empty:
        raise ConfigError(f"dataset: окно {window.isoformat()} отсутствует в {path}")
    row = match.iloc[0]
    return PopulationSpec(yes=int(row['yes']), no=int(row['no']))


def _population(document: Dict, base_dir: Path) -> PopulationSpec:
    has_population = 'population' in document
    has_dataset = 'dataset' in document
    if has_population == has_dataset:
        raise ConfigError("Нужен ровно один из ключей population или dataset")

    if has_dataset:
        return _population_from_dataset(_check_keys('dataset', document['dataset'], DATASET_KEYS), base_dir)

    population = _check_keys('population', document['population'], POPULATION_KEYS)
    if 'values' in population:
        return PopulationSpec.multivalue(population['values'], population.get('none', 0))
    return PopulationSpec(yes=population.get('yes', 0), no=population.get('no', 0))


def parse_experiment_config(
    document: Mapping[str, Any],
    app_config: Optional[AppConfig] = None,
    base_dir: Union[str, Path] = '.',
) -> ExperimentConfigFile:
    """Разбор уже прочитанного JSON-документа"""
    app_config = app_config or AppConfig()
    document = _check_keys('config', document, TOP_LEVEL_KEYS)
    if 'mechanism' not in document or 'params' not in document:
        raise ConfigError("Конфиг должен содержать mechanism и params")

    mechanism = document['mechanism']
    if not isinstance(document['params'], Mapping):
        raise ConfigError("params: ожидается объект")
    # Неизвестные и недостающие параметры отклоняет build_params
    params = build_params(mechanism, document['params'])

    baseline = None
    if document.get('baseline') is not None:
        baseline = build_params('baseline', _check_keys('baseline', document['baseline'], BASELINE_KEYS))

    sim = app_config.simulation
    trial = TrialConfig(
        mechanism=mechanism,
        params=params,
        population=_population(document, Path(base_dir)),
        coupling=document.get('coupling', sim.coupling),
        master_seed=_integer('seed', document.get('seed', sim.seed)),
        trials=_integer('trials', document.get('trials', sim.trials)),
        confidence_level=_number('confidence_level', document.get('confidence_level', sim.confidence_level)),
        estimator=document.get('estimator', 'yes'),
        target=_integer('target', document.get('target', 1)),
        baseline=baseline,
        n_jobs=_integer('n_jobs', document.get('n_jobs', sim.n_jobs)),
    )
    return ExperimentConfigFile(trial=trial, output=document.get('output'))


def load_experiment_config(path: Union[str, Path], app_config: Optional[AppConfig] = None) -> ExperimentConfigFile:
    """Чтение и строгая проверка файла эксперимента"""
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding='utf-8'))
    except FileNotFoundError:
        raise ConfigError(f"Файл конфигурации не найден: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: неверный JSON в строке {e.lineno}: {e.msg}")

    parsed = parse_experiment_config(document, app_config, base_dir=path.parent)
    return ExperimentConfigFile(trial=parsed.trial, output=parsed.output, source=str(path))
