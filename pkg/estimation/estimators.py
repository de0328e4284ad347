"""
Оценка истинного числа YES по наблюдаемым подсчётам.

Все оценщики - обращения метода моментов: наблюдение = a·YES + b·DO,
откуда YES = (наблюдение − b·DO) / a. Дисперсия подсчёта считается по
пуассон-биномиальной модели с подстановкой собственной оценки YES,
обрезанной до [0, DO].
"""

import math
from dataclasses import dataclass
from typing import Dict, Tuple, Union

from loguru import logger

from core.exceptions import DivisionDomainError, NonIdentifiableError, ParameterDomainError
from mechanisms import BOTTOM, NO, YES, CouplingMode, bottom_label
from mechanisms.params import BaselineParams, DualParams, MultiValueParams

from .tally import Tally

IDENTIFIABILITY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Estimate:
    value: float
    sigma: float         # σ агрегированного подсчёта
    denominator: float   # линейный коэффициент обращения
    method: str

    @property
    def stderr(self) -> float:
        return self.sigma / abs(self.denominator)

    @property
    def interval(self) -> Tuple[float, float]:
        return self.scaled_interval(1.0)

    def scaled_interval(self, z: float) -> Tuple[float, float]:
        half = z * self.stderr
        return self.value - half, self.value + half

    @property
    def below_zero(self) -> bool:
        return self.value < 0

    def as_record(self) -> Dict:
        low, high = self.interval
        return {
            'method': self.method,
            'value': self.value,
            'sigma': self.sigma,
            'stderr': self.stderr,
            'low': low,
            'high': high,
            'below_zero': self.below_zero,
        }


def bernoulli_count_variance(rate: float, n: float) -> float:
    """Дисперсия числа успехов n испытаний с вероятностью rate"""
    return rate * (1.0 - rate) * n


def plugin_split(value: float, total: float) -> Tuple[float, float]:
    """Подстановочные YES/NO для формул дисперсии"""
    yes = min(max(value, 0.0), total)
    return yes, total - yes


def _invert(observed: float, total: float, rate_yes: float, rate_no: float, method: str) -> Estimate:
    denominator = rate_yes - rate_no
    if abs(denominator) <= IDENTIFIABILITY_TOLERANCE:
        raise NonIdentifiableError(
            f"{method}: знаменатель {denominator:.3g} ~ 0, YES неразличим при данных параметрах"
        )

    value = (observed - rate_no * total) / denominator
    yes, no = plugin_split(value, total)
    variance = bernoulli_count_variance(rate_yes, yes) + bernoulli_count_variance(rate_no, no)
    if value < 0:
        logger.debug(f"{method}: отрицательная оценка {value:.3f}")
    return Estimate(value=value, sigma=math.sqrt(variance), denominator=denominator, method=method)


def estimate_from_yes(tally: Tally, params) -> Estimate:
    """YES по числу ответов "Yes" """
    d = params.as_ddps()
    return _invert(tally.count(YES), tally.total, d.yes_rate_given_yes, d.yes_rate_given_no, 'yes')


def estimate_from_no(tally: Tally, params) -> Estimate:
    """YES по числу ответов "No" (не определена при π₁=π₂=π₃=1)"""
    d = params.as_ddps()
    return _invert(tally.count(NO), tally.total, d.no_rate_given_yes, d.no_rate_given_no, 'no')


def estimate_from_bottom(tally: Tally, params) -> Estimate:
    """YES по числу неучаствующих ⊥"""
    d = params.as_ddps()
    return _invert(tally.count(BOTTOM), tally.total, d.bottom_rate_given_yes, d.bottom_rate_given_no, 'bottom')


BINARY_ESTIMATORS = {
    'yes': estimate_from_yes,
    'no': estimate_from_no,
    'bottom': estimate_from_bottom,
}


def _difference_estimate(
    count_first: float,
    count_second: float,
    total: float,
    base_rate: float,
    pi_s: float,
    coupling: CouplingMode,
    method: str,
) -> Estimate:
    if pi_s <= 0.0:
        raise DivisionDomainError(f"{method}: pi_s = 0, оценка делит на pi_s")

    value = (count_second - count_first) / pi_s
    yes, no = plugin_split(value, total)

    if coupling is CouplingMode.COUPLED:
        # Разность - это ровно число владельцев Yes, попавших в срез π_s
        variance = bernoulli_count_variance(pi_s, yes)
    else:
        variance = (
            bernoulli_count_variance(base_rate, total)
            + bernoulli_count_variance(base_rate + pi_s, yes)
            + bernoulli_count_variance(base_rate, no)
        )
    return Estimate(value=value, sigma=math.sqrt(variance), denominator=pi_s, method=method)


def _check_totals(first: Tally, second: Tally) -> None:
    if abs(first.total - second.total) > 1e-9 * max(1.0, abs(first.total)):
        raise ParameterDomainError(f"Итоги раундов различаются: {first.total} != {second.total}")


def estimate_dual(
    tally_a: Tally,
    tally_c: Tally,
    params: DualParams,
    coupling: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Estimate:
    """YES = (C(⊥2) − A(⊥2)) / π_s"""
    _check_totals(tally_a, tally_c)
    bot2 = bottom_label(2)
    return _difference_estimate(
        tally_a.count(bot2), tally_c.count(bot2), tally_a.total,
        params.pi_bot2, params.pi_s, CouplingMode.parse(coupling), 'dual',
    )


def estimate_multivalue(
    tally_round1: Tally,
    tally_round2: Tally,
    params: MultiValueParams,
    v: int,
    coupling: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Estimate:
    """Число владельцев со значением v: (R2(⊥v) − R1(⊥v)) / π_s"""
    v = params.check_index(v)
    _check_totals(tally_round1, tally_round2)
    label = bottom_label(v)
    return _difference_estimate(
        tally_round1.count(label), tally_round2.count(label), tally_round1.total,
        params.effective_bottoms[v], params.pi_s, CouplingMode.parse(coupling), f'multivalue[{v}]',
    )


def estimate_rr_baseline(agg: float, total: float, params: BaselineParams) -> Estimate:
    """Вычитаем ожидаемое "ослепление" s2·DO и делим на s1"""
    if params.s1 <= 0.0:
        raise DivisionDomainError(f"baseline: s1 = {params.s1}, оценка делит на s1")
    value = (agg - params.s2 * total) / params.s1
    yes, _ = plugin_split(value, total)
    variance = bernoulli_count_variance(params.s1, yes) + bernoulli_count_variance(params.s2, total)
    return Estimate(value=value, sigma=math.sqrt(variance), denominator=params.s1, method='baseline')


def baseline_aggregate(truth_ticks: Tally, blind_ticks: Tally) -> float:
    """AGG: все отметки "Yes" обоих видов"""
    return truth_ticks.count(YES) + blind_ticks.count(YES)
