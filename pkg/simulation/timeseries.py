"""
Суточный сценарий: число машин у одной наблюдаемой станции по окнам
и приватизированная оценка этого числа в каждом окне.

Синтетическая кривая (окно = 1 час, h = номер окна mod 24):

    mean = vehicles / stations · popularity
    d    = (1 − cos(2π(h − 17) / 24)) / 2          # 0 в час пика, 1 в час спада
    yes  = round(mean · (1.8 − 1.6·d·(1 + U[−0.1, 0.1])))

обрезается до [0, vehicles]; остальные машины парка - популяция No.

Без шума это mean·(1 + 0.8·cos(...)). Шум масштабируется расстоянием d до
пика, поэтому час 17 остаётся единственным максимумом каждого цикла.
"""

import dataclasses
import math
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from core.exceptions import ConfigError, DivisionDomainError, NonIdentifiableError, ParameterDomainError
from mechanisms import CouplingMode

from .engine import BINARY_MECHANISMS, PopulationSpec, TrialConfig, estimate_trial, run_trial
from .metrics import ExperimentMetrics

HOURS_PER_CYCLE = 24
PEAK_HOUR = 17
AMPLITUDE = 0.8
JITTER = 0.1
# Наблюдаемая станция загружена сильнее средней
DEFAULT_POPULARITY = 20.0


def synthetic_timeseries(
    stations: int,
    vehicles: int,
    windows: int,
    seed: int,
    popularity: float = DEFAULT_POPULARITY,
) -> List[PopulationSpec]:
    """Популяции Yes/No по часовым окнам для одной станции"""
    for name, value in (('stations', stations), ('vehicles', vehicles), ('windows', windows)):
        if value < 1:
            raise ParameterDomainError(f"{name}={value} должно быть >= 1")
    if popularity < 0:
        raise ParameterDomainError(f"popularity={popularity} < 0")

    rng = np.random.default_rng(seed)
    hours = np.arange(windows) % HOURS_PER_CYCLE
    mean = vehicles / stations * popularity
    distance = (1.0 - np.cos(2.0 * np.pi * (hours - PEAK_HOUR) / HOURS_PER_CYCLE)) / 2.0
    jitter = 1.0 + rng.uniform(-JITTER, JITTER, size=windows)
    curve = 1.0 + AMPLITUDE - 2.0 * AMPLITUDE * distance * jitter
    yes = np.clip(np.round(mean * curve), 0, vehicles).astype(np.int64)

    return [PopulationSpec(yes=int(y), no=int(vehicles - y)) for y in yes]


def populations_from_frame(frame: pd.DataFrame) -> List[PopulationSpec]:
    """Популяции из таблицы с колонками yes и no (см. data.population_series)"""
    return [PopulationSpec(yes=int(row.yes), no=int(row.no)) for row in frame.itertuples()]


def run_timeseries(
    populations: Sequence[PopulationSpec],
    mechanism: str,
    params,
    master_seed: int,
    confidence_level: float = 0.99,
    estimator: str = 'yes',
    coupling: CouplingMode = CouplingMode.COUPLED,
    pi_s_no_schedule: Optional[Sequence[float]] = None,
    window_start: Optional[Sequence[pd.Timestamp]] = None,
) -> pd.DataFrame:
    """
    Один приватизированный раунд на окно. Испытание окна w использует
    trial_index = w, так что окна независимы и воспроизводимы.
    """
    if not populations:
        raise ConfigError("Временной ряд пуст")
    if mechanism not in BINARY_MECHANISMS and mechanism != 'dual':
        raise ConfigError(f"Временной ряд поддерживает бинарные механизмы и dual, получено {mechanism!r}")
    if pi_s_no_schedule is not None:
        if mechanism == 'dual':
            raise ConfigError("Расписание pi_s_no применимо только к бинарным механизмам")
        if len(pi_s_no_schedule) != len(populations):
            raise ConfigError(
                f"Длина расписания pi_s_no {len(pi_s_no_schedule)} != числу окон {len(populations)}"
            )
    if window_start is not None and len(window_start) != len(populations):
        raise ConfigError("Число меток окон не совпадает с числом окон")

    z = ExperimentMetrics.z_value(confidence_level)
    rows = []
    for w, population in enumerate(populations):
        window_params = params
        if pi_s_no_schedule is not None:
            window_params = dataclasses.replace(params, pi_s_no=pi_s_no_schedule[w])

        config = TrialConfig(
            mechanism=mechanism,
            params=window_params,
            population=population,
            coupling=coupling,
            master_seed=master_seed,
            trials=1,
            confidence_level=confidence_level,
            estimator=estimator,
        )
        row = {
            'window': w,
            'true_yes': population.yes,
            'total': population.total,
            'pi_s_no': getattr(window_params, 'pi_s_no', math.nan),
            'estimate': math.nan,
            'stderr': math.nan,
            'low': math.nan,
            'high': math.nan,
        }
        if window_start is not None:
            row['window_start'] = pd.Timestamp(window_start[w])

        try:
            estimate = estimate_trial(config, run_trial(config, w))
        except (NonIdentifiableError, DivisionDomainError) as e:
            logger.warning(f"Окно {w}: оценка невозможна ({e})")
        else:
            low, high = estimate.scaled_interval(z)
            row.update(estimate=estimate.value, stderr=estimate.stderr, low=low, high=high)
        rows.append(row)

    frame = pd.DataFrame(rows)
    frame['covered'] = (frame['low'] <= frame['true_yes']) & (frame['true_yes'] <= frame['high'])
    logger.info(f"Временной ряд: {len(frame)} окон, покрытие {frame['covered'].mean():.3f}")
    return frame
