from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import DataValidationError
from mechanisms import (
    ResponseDistribution,
    Truth,
    binary_distribution,
    dual_distributions,
    multivalue_distributions,
    rr_baseline_distribution,
)
from mechanisms.params import BaselineParams, DualParams, MultiValueParams

# Ожидаемые (вещественные) подсчёты сходятся к total лишь с точностью округления
SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Tally:
    """Подсчёт ответов по символам за один раунд запроса"""
    counts: Dict[str, float] = field(default_factory=dict)
    total: float = 0

    def __post_init__(self):
        counts = dict(self.counts)
        for symbol, value in counts.items():
            if value < 0:
                raise DataValidationError(f"Отрицательный подсчёт {symbol}={value}")
        if self.total < 0:
            raise DataValidationError(f"Отрицательный total={self.total}")
        observed = sum(counts.values())
        if abs(observed - self.total) > SUM_TOLERANCE * max(1.0, abs(self.total)):
            raise DataValidationError(f"Сумма подсчётов {observed} != total {self.total}")
        object.__setattr__(self, 'counts', counts)

    def count(self, symbol: str) -> float:
        return self.counts.get(symbol, 0)

    @classmethod
    def from_counts(cls, counts: Mapping[str, float], total: Optional[float] = None) -> 'Tally':
        counts = dict(counts)
        return cls(counts=counts, total=sum(counts.values()) if total is None else total)

    @classmethod
    def from_indices(cls, alphabet: Sequence[str], indices: np.ndarray) -> 'Tally':
        """Подсчёт по массиву индексов символов (результат draw_many)"""
        binned = np.bincount(np.asarray(indices, dtype=np.int64), minlength=len(alphabet))
        counts = {symbol: int(binned[i]) for i, symbol in enumerate(alphabet)}
        return cls(counts=counts, total=int(binned.sum()))

    def merge(self, other: 'Tally') -> 'Tally':
        counts = dict(self.counts)
        for symbol, value in other.counts.items():
            counts[symbol] = counts.get(symbol, 0) + value
        return Tally(counts=counts, total=self.total + other.total)

    def as_record(self) -> Dict:
        return {'counts': dict(sorted(self.counts.items())), 'total': self.total}


def _scaled(dist: ResponseDistribution, n: float) -> Dict[str, float]:
    return {symbol: p * n for symbol, p in zip(dist.alphabet, dist.probs)}


def _sum_expected(parts: Iterable[Tuple[ResponseDistribution, float]]) -> Tally:
    counts: Dict[str, float] = {}
    total = 0.0
    for dist, n in parts:
        for symbol, value in _scaled(dist, n).items():
            counts[symbol] = counts.get(symbol, 0.0) + value
        total += n
    return Tally(counts=counts, total=total)


def expected_tally(params, yes: float, no: float) -> Tally:
    """Ожидаемый подсчёт бинарного механизма при YES=yes, NO=no"""
    return _sum_expected([
        (binary_distribution(Truth.YES, params), yes),
        (binary_distribution(Truth.NO, params), no),
    ])


def expected_dual_tallies(params: DualParams, yes: float, no: float) -> Tuple[Tally, Tally]:
    dist_a, c_yes = dual_distributions(Truth.YES, params)
    _, c_no = dual_distributions(Truth.NO, params)
    return _sum_expected([(dist_a, yes + no)]), _sum_expected([(c_yes, yes), (c_no, no)])


def expected_multivalue_tallies(
    params: MultiValueParams, values: Sequence[float], none: float = 0
) -> Tuple[Tally, Tally]:
    """
    values[i] - число владельцев со значением i+1; none - владельцы
    с вариантом "No Round Two".
    """
    if len(values) != params.v:
        raise DataValidationError(f"Ожидалось {params.v} подсчётов значений, получено {len(values)}")
    round_one = []
    round_two = []
    groups = [(i + 1, n) for i, n in enumerate(values)] + [(None, none)]
    for index, n in groups:
        r1, r2 = multivalue_distributions(index, params)
        round_one.append((r1, n))
        round_two.append((r2, n))
    return _sum_expected(round_one), _sum_expected(round_two)


def expected_baseline_tallies(params: BaselineParams, yes: float, no: float) -> Tuple[Tally, Tally]:
    """Ожидаемые подсчёты правдивых и "ослепляющих" отметок"""
    ticks_yes = rr_baseline_distribution(Truth.YES, params)
    ticks_no = rr_baseline_distribution(Truth.NO, params)
    return (
        _sum_expected([(ticks_yes.truth_tick, yes), (ticks_no.truth_tick, no)]),
        _sum_expected([(ticks_yes.blind_tick, yes), (ticks_no.blind_tick, no)]),
    )
