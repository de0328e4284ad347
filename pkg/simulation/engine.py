"""
Монте-Карло движок: прогон механизма по популяции владельцев, подсчёт
ответов и оценка YES в каждом испытании.

Случайность владельца детерминирована: поток испытания берётся из
np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index, stream)),
u владельца - элемент с его номером. Владельцы Yes идут первыми,
затем No (для многозначного механизма - по возрастанию значения,
в конце владельцы без второго раунда).
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from loguru import logger

from core.config import DEFAULT_SEED
from core.exceptions import ConfigError, DivisionDomainError, NonIdentifiableError
from estimation import (
    BINARY_ESTIMATORS,
    Estimate,
    Tally,
    baseline_aggregate,
    estimate_dual,
    estimate_multivalue,
    estimate_rr_baseline,
)
from mechanisms import (
    BINARY_ALPHABET,
    DUAL_ALPHABET,
    PARAM_TYPES,
    TICK_ALPHABET,
    CouplingMode,
    Truth,
    binary_distribution,
    draw_many,
    draw_multivalue_pair_many,
    draw_pair_many,
    multivalue_alphabet,
    rr_baseline_distribution,
)
from mechanisms.params import BaselineParams

from .metrics import ExperimentMetrics, ExperimentReport

BINARY_MECHANISMS = ('sampling', 'deniability', 'ddps')
TWO_ROUND_MECHANISMS = ('dual', 'multivalue')

# Номера потоков случайности внутри испытания
STREAM_PRIMARY = 0
STREAM_SECOND = 1
STREAM_BASELINE_TRUTH = 2
STREAM_BASELINE_BLIND = 3

TrialTallies = Union[Tally, Tuple[Tally, Tally]]


def owner_uniforms(master_seed: int, trial_index: int, stream: int, size: int) -> np.ndarray:
    """Равномерные u всех владельцев испытания для одного потока"""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index, stream))
    return np.random.Generator(np.random.PCG64(seq)).random(size)


def _check_count(name: str, value: Any) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ConfigError(f"{name}={value!r} должно быть целым >= 0")
    return int(value)


@dataclass(frozen=True)
class PopulationSpec:
    """
    Популяция владельцев. Бинарные механизмы используют yes/no,
    многозначный - values (values[i] владельцев со значением i+1)
    и none (владельцы без второго раунда).
    """
    yes: int = 0
    no: int = 0
    values: Tuple[int, ...] = ()
    none: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'yes', _check_count('yes', self.yes))
        object.__setattr__(self, 'no', _check_count('no', self.no))
        object.__setattr__(self, 'none', _check_count('none', self.none))
        values = tuple(_check_count(f'values[{i}]', v) for i, v in enumerate(self.values))
        object.__setattr__(self, 'values', values)
        if values and (self.yes or self.no):
            raise ConfigError("Популяция задаётся либо yes/no, либо values/none")

    @classmethod
    def multivalue(cls, values, none: int = 0) -> 'PopulationSpec':
        return cls(values=tuple(values), none=none)

    @property
    def is_multivalue(self) -> bool:
        return bool(self.values)

    @property
    def total(self) -> int:
        if self.values:
            return sum(self.values) + self.none
        return self.yes + self.no

    def as_record(self) -> Dict:
        if self.values:
            return {'values': list(self.values), 'none': self.none}
        return {'yes': self.yes, 'no': self.no}


@dataclass(frozen=True)
class TrialConfig:
    mechanism: str
    params: Any
    population: PopulationSpec
    coupling: CouplingMode = CouplingMode.COUPLED
    master_seed: int = DEFAULT_SEED
    trials: int = 1000
    confidence_level: float = 0.99
    # Бинарный оценщик: yes, no или bottom
    estimator: str = 'yes'
    # Индекс оцениваемого значения многозначного механизма
    target: int = 1
    baseline: Optional[BaselineParams] = None
    n_jobs: int = 1

    def __post_init__(self):
        if self.mechanism not in PARAM_TYPES:
            raise ConfigError(f"Неизвестный механизм {self.mechanism!r}")
        if not isinstance(self.params, PARAM_TYPES[self.mechanism]):
            raise ConfigError(
                f"Механизм {self.mechanism} ожидает {PARAM_TYPES[self.mechanism].__name__}, "
                f"получено {type(self.params).__name__}"
            )
        object.__setattr__(self, 'coupling', CouplingMode.parse(self.coupling))

        if self.mechanism == 'multivalue':
            if len(self.population.values) != self.params.v:
                raise ConfigError(
                    f"Многозначная популяция должна задавать {self.params.v} значений, "
                    f"получено {len(self.population.values)}"
                )
            object.__setattr__(self, 'target', self.params.check_index(self.target))
        elif self.population.is_multivalue:
            raise ConfigError(f"Механизм {self.mechanism} ожидает популяцию yes/no")

        if self.mechanism in BINARY_MECHANISMS and self.estimator not in BINARY_ESTIMATORS:
            raise ConfigError(f"Неизвестный оценщик {self.estimator!r}; доступны: {', '.join(BINARY_ESTIMATORS)}")
        if isinstance(self.master_seed, bool) or int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ConfigError(f"master_seed={self.master_seed!r} должен быть целым >= 0")
        if self.trials < 1:
            raise ConfigError(f"trials={self.trials} должно быть >= 1")
        if not 0.0 < self.confidence_level < 1.0:
            raise ConfigError(f"confidence_level={self.confidence_level} должен лежать в (0, 1)")
        if self.baseline is not None and self.population.is_multivalue:
            raise ConfigError("Сравнение с рандомизированным ответом доступно только для популяции yes/no")

    @property
    def true_value(self) -> int:
        """Истинное значение, которое восстанавливает оценщик"""
        if self.population.is_multivalue:
            return self.population.values[self.target - 1]
        return self.population.yes

    def as_record(self) -> Dict:
        return {
            'mechanism': self.mechanism,
            'params': asdict(self.params),
            'population': self.population.as_record(),
            'coupling': self.coupling.value,
            'seed': self.master_seed,
            'trials': self.trials,
            'confidence_level': self.confidence_level,
            'estimator': self.estimator,
            'target': self.target,
        }


@dataclass
class TrialResult:
    index: int
    estimate: Optional[Estimate] = None
    failure: Optional[str] = None
    baseline_estimate: Optional[Estimate] = None
    tallies: Optional[TrialTallies] = None


def _binary_tally(params, yes: int, no: int, u: np.ndarray) -> Tally:
    idx_yes = draw_many(binary_distribution(Truth.YES, params), u[:yes])
    idx_no = draw_many(binary_distribution(Truth.NO, params), u[yes:yes + no])
    return Tally.from_indices(BINARY_ALPHABET, np.concatenate([idx_yes, idx_no]))


def _dual_tallies(config: TrialConfig, u: np.ndarray, u_c: Optional[np.ndarray]) -> Tuple[Tally, Tally]:
    yes = config.population.yes
    parts_a, parts_c = [], []
    for truth, sl in ((Truth.YES, slice(0, yes)), (Truth.NO, slice(yes, config.population.total))):
        idx_a, idx_c = draw_pair_many(
            truth, config.params, u[sl], None if u_c is None else u_c[sl], config.coupling
        )
        parts_a.append(idx_a)
        parts_c.append(idx_c)
    return (
        Tally.from_indices(DUAL_ALPHABET, np.concatenate(parts_a)),
        Tally.from_indices(DUAL_ALPHABET, np.concatenate(parts_c)),
    )


def _multivalue_tallies(config: TrialConfig, u: np.ndarray, u_c: Optional[np.ndarray]) -> Tuple[Tally, Tally]:
    population = config.population
    groups = [(i + 1, n) for i, n in enumerate(population.values)] + [(None, population.none)]
    parts_one, parts_two = [], []
    start = 0
    for truth_index, n in groups:
        sl = slice(start, start + n)
        start += n
        idx_one, idx_two = draw_multivalue_pair_many(
            truth_index, config.params, u[sl], None if u_c is None else u_c[sl], config.coupling
        )
        parts_one.append(idx_one)
        parts_two.append(idx_two)
    alphabet = multivalue_alphabet(config.params.v)
    return (
        Tally.from_indices(alphabet, np.concatenate(parts_one)),
        Tally.from_indices(alphabet, np.concatenate(parts_two)),
    )


def _baseline_tallies(
    params: BaselineParams, yes: int, no: int, u_truth: np.ndarray, u_blind: np.ndarray
) -> Tuple[Tally, Tally]:
    """Правдивые и "ослепляющие" отметки, у каждой свой поток"""
    ticks_yes = rr_baseline_distribution(Truth.YES, params)
    ticks_no = rr_baseline_distribution(Truth.NO, params)
    truth_idx = np.concatenate([
        draw_many(ticks_yes.truth_tick, u_truth[:yes]),
        draw_many(ticks_no.truth_tick, u_truth[yes:yes + no]),
    ])
    blind_idx = np.concatenate([
        draw_many(ticks_yes.blind_tick, u_blind[:yes]),
        draw_many(ticks_no.blind_tick, u_blind[yes:yes + no]),
    ])
    return Tally.from_indices(TICK_ALPHABET, truth_idx), Tally.from_indices(TICK_ALPHABET, blind_idx)


def run_trial(config: TrialConfig, trial_index: int) -> TrialTallies:
    """
    Одно испытание: ответы всех владельцев и их подсчёт.
    Бинарные механизмы дают один Tally, двухраундовые и базовый
    рандомизированный ответ - пару.
    """
    total = config.population.total
    seed = config.master_seed
    u = owner_uniforms(seed, trial_index, STREAM_PRIMARY, total)

    if config.mechanism in BINARY_MECHANISMS:
        return _binary_tally(config.params, config.population.yes, config.population.no, u)

    if config.mechanism == 'baseline':
        u_blind = owner_uniforms(seed, trial_index, STREAM_SECOND, total)
        return _baseline_tallies(config.params, config.population.yes, config.population.no, u, u_blind)

    u_c = None
    if config.coupling is CouplingMode.INDEPENDENT:
        u_c = owner_uniforms(seed, trial_index, STREAM_SECOND, total)
    if config.mechanism == 'dual':
        return _dual_tallies(config, u, u_c)
    return _multivalue_tallies(config, u, u_c)


def run_baseline_trial(config: TrialConfig, trial_index: int) -> Tuple[Tally, Tally]:
    """Базовый рандомизированный ответ на той же популяции, на отдельных потоках"""
    total = config.population.total
    return _baseline_tallies(
        config.baseline,
        config.population.yes,
        config.population.no,
        owner_uniforms(config.master_seed, trial_index, STREAM_BASELINE_TRUTH, total),
        owner_uniforms(config.master_seed, trial_index, STREAM_BASELINE_BLIND, total),
    )


def estimate_tallies(
    mechanism: str,
    params,
    tallies: TrialTallies,
    estimator: str = 'yes',
    coupling: Union[CouplingMode, str] = CouplingMode.COUPLED,
    target: int = 1,
) -> Estimate:
    """Оценщик, соответствующий механизму"""
    if mechanism in BINARY_MECHANISMS:
        if estimator not in BINARY_ESTIMATORS:
            raise ConfigError(f"Неизвестный оценщик {estimator!r}")
        return BINARY_ESTIMATORS[estimator](tallies, params)
    first, second = tallies
    if mechanism == 'dual':
        return estimate_dual(first, second, params, coupling)
    if mechanism == 'multivalue':
        return estimate_multivalue(first, second, params, target, coupling)
    if mechanism == 'baseline':
        return estimate_rr_baseline(baseline_aggregate(first, second), first.total, params)
    raise ConfigError(f"Неизвестный механизм {mechanism!r}")


def estimate_trial(config: TrialConfig, tallies: TrialTallies) -> Estimate:
    return estimate_tallies(
        config.mechanism, config.params, tallies, config.estimator, config.coupling, config.target
    )


def _run_indexed_trial(config: TrialConfig, trial_index: int, keep_tallies: bool) -> TrialResult:
    result = TrialResult(index=trial_index)
    tallies = run_trial(config, trial_index)
    if keep_tallies:
        result.tallies = tallies
    try:
        result.estimate = estimate_trial(config, tallies)
    except (NonIdentifiableError, DivisionDomainError) as e:
        logger.warning(f"Испытание {trial_index} пропущено: {e}")
        result.failure = e.category

    if config.baseline is not None:
        truth_ticks, blind_ticks = run_baseline_trial(config, trial_index)
        result.baseline_estimate = estimate_rr_baseline(
            baseline_aggregate(truth_ticks, blind_ticks), truth_ticks.total, config.baseline
        )
    return result


class MonteCarloEngine:
    def __init__(self, config: TrialConfig):
        self.config = config

    def run_trials(self, keep_tallies: bool = False) -> List[TrialResult]:
        """Все испытания; результаты упорядочены по номеру испытания"""
        config = self.config
        logger.info(
            f"Запуск {config.trials} испытаний: {config.mechanism}, DO={config.population.total}, "
            f"seed={config.master_seed}, n_jobs={config.n_jobs}"
        )
        results = Parallel(n_jobs=config.n_jobs)(
            delayed(_run_indexed_trial)(config, i, keep_tallies) for i in range(config.trials)
        )
        results = sorted(results, key=lambda r: r.index)

        failed = sum(1 for r in results if r.failure is not None)
        if failed:
            logger.warning(f"Пропущено испытаний: {failed} из {config.trials}")
        return results

    def run_experiment(self, keep_tallies: bool = False) -> ExperimentReport:
        results = self.run_trials(keep_tallies=keep_tallies)
        report = ExperimentMetrics.generate_report(self.config, results)
        if not math.isnan(report.mean):
            logger.info(
                f"mean={report.mean:.3f}, sigma={report.empirical_sigma:.3f}, "
                f"abs_error={report.abs_error:.3f}"
            )
        return report


def run_experiment(config: TrialConfig, keep_tallies: bool = False) -> ExperimentReport:
    """Серия испытаний с отчётом по ошибке и доверительному интервалу"""
    return MonteCarloEngine(config).run_experiment(keep_tallies=keep_tallies)
