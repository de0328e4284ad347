"""
Анализ толпы через ccdf биномиального распределения: со сколькими
владельцами, шумно ответившими "Yes", смешивается один владелец, и
во скольких местах он одновременно "отмечается".
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple

import pandas as pd
from scipy.stats import binom

from core.exceptions import ParameterDomainError
from mechanisms import check_probability

# Опубликованные строки таблиц: (значение, π₃, π_s_No, число станций / популяция)
LOCATION_TABLE_ROWS: Tuple[Tuple[int, float, float, int], ...] = (
    (1, 0.98, 0.05, 3_320),
    (3, 0.98, 0.00025, 83_000),
    (3, 0.98, 0.000025, 830_000),
)
CROWD_TABLE_ROWS: Tuple[Tuple[int, float, float, int], ...] = (
    (160, 0.98, 0.05, 48_719),
    (140, 0.98, 0.00025, 1_047_719),
    (130, 0.98, 0.000025, 10_047_719),
)


@dataclass(frozen=True)
class CrowdReport:
    n: int
    p: float
    confidence: float
    crowd_size: int

    def as_record(self) -> Dict:
        return {'n': self.n, 'p': self.p, 'confidence': self.confidence, 'crowd_size': self.crowd_size}


def _check_count(name: str, value: int) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ParameterDomainError(f"{name}={value} должно быть целым >= 0")
    return int(value)


def binomial_ccdf(n: int, p: float, k: int) -> float:
    """P(X >= k) для X ~ Binomial(n, p) через функцию выживания scipy"""
    n = _check_count('n', n)
    k = _check_count('k', k)
    p = check_probability('p', p)
    if k > n + 1:
        raise ParameterDomainError(f"k={k} > n + 1 = {n + 1}")
    if k == 0:
        return 1.0
    return float(binom.sf(k - 1, n, p))


def _largest_threshold(n: int, p: float, confidence: float) -> int:
    """Наибольшее k с P(X >= k) >= confidence"""
    n = _check_count('n', n)
    p = check_probability('p', p)
    if not 0.0 < confidence < 1.0:
        raise ParameterDomainError(f"confidence={confidence} должна лежать в (0, 1)")

    if n == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return n

    # Старт от квантиля, затем точная подстройка по ccdf
    start = binom.ppf(1.0 - confidence, n, p)
    k = int(start) if math.isfinite(start) else 0
    k = min(max(k, 0), n)
    while k > 0 and binomial_ccdf(n, p, k) < confidence:
        k -= 1
    while k < n and binomial_ccdf(n, p, k + 1) >= confidence:
        k += 1
    return k


def crowd_size(n: int, p: float, confidence: float = 0.99) -> CrowdReport:
    """
    Размер толпы: с вероятностью не ниже confidence хотя бы k из n
    владельцев популяции No выдают шумный "Yes".
    p - вероятность шумного "Yes" на владельца (π_s_No·π₃ для DDPS).
    """
    size = _largest_threshold(n, p, confidence)
    return CrowdReport(n=int(n), p=float(p), confidence=float(confidence), crowd_size=size)


def location_spread(num_queries: int, p: float, confidence: float = 0.99) -> int:
    """Во скольких из num_queries мест владелец одновременно заявит о присутствии"""
    return _largest_threshold(num_queries, p, confidence)


def reference_tables(confidence: float = 0.99) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """Пересчёт строк опубликованных таблиц при заданной доверительной вероятности"""
    locations = pd.DataFrame([
        {
            'published_locations': published,
            'pi_3': pi_3,
            'pi_s_no': pi_s_no,
            'stations': stations,
            'p': pi_s_no * pi_3,
            'locations': location_spread(stations, pi_s_no * pi_3, confidence),
        }
        for published, pi_3, pi_s_no, stations in LOCATION_TABLE_ROWS
    ])
    crowds = pd.DataFrame([
        {
            'published_crowd_size': published,
            'pi_3': pi_3,
            'pi_s_no': pi_s_no,
            'population': population,
            'p': pi_s_no * pi_3,
            'crowd_size': crowd_size(population, pi_s_no * pi_3, confidence).crowd_size,
        }
        for published, pi_3, pi_s_no, population in CROWD_TABLE_ROWS
    ])
    return locations, crowds
