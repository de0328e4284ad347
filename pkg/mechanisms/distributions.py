"""
Точные распределения ответов для всех локальных рандомизаторов.

Алфавиты фиксированы по порядку, от него зависит воспроизводимость
выборки через обратную функцию распределения:
    бинарные механизмы   (bottom, yes, no)
    двойной ответ        (bot1, bot2, bot3)
    многозначный         (bot0, bot1, ..., botV)
"""

from dataclasses import dataclass
from typing import Dict, Mapping, NamedTuple, Optional, Tuple, Union

import numpy as np

from core.exceptions import ParameterDomainError

from .params import (
    PROB_TOLERANCE,
    BaselineParams,
    DdpsParams,
    DeniabilityParams,
    DualParams,
    MultiValueParams,
    SamplingParams,
    Truth,
)

BOTTOM = 'bottom'
YES = 'yes'
NO = 'no'

BINARY_ALPHABET: Tuple[str, ...] = (BOTTOM, YES, NO)
TICK_ALPHABET: Tuple[str, ...] = (BOTTOM, YES)


def bottom_label(index: int) -> str:
    return f'bot{index}'


DUAL_ALPHABET: Tuple[str, ...] = tuple(bottom_label(i) for i in (1, 2, 3))


def multivalue_alphabet(v: int) -> Tuple[str, ...]:
    return tuple(bottom_label(i) for i in range(v + 1))


@dataclass(frozen=True)
class ResponseDistribution:
    alphabet: Tuple[str, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.alphabet) != len(self.probs):
            raise ParameterDomainError("Длины алфавита и вектора вероятностей различаются")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ParameterDomainError(f"Повторяющиеся символы в алфавите {self.alphabet}")

        probs = []
        for symbol, p in zip(self.alphabet, self.probs):
            p = float(p)
            # -1e-16 после вычитания - это ноль
            if -PROB_TOLERANCE <= p < 0.0:
                p = 0.0
            if not p >= 0.0:
                raise ParameterDomainError(f"P({symbol}) = {p} < 0")
            probs.append(p)

        total = sum(probs)
        if abs(total - 1.0) > PROB_TOLERANCE:
            raise ParameterDomainError(f"Сумма вероятностей {total} != 1")

        object.__setattr__(self, 'alphabet', tuple(self.alphabet))
        object.__setattr__(self, 'probs', tuple(probs))

    def prob(self, symbol: str) -> float:
        try:
            return self.probs[self.alphabet.index(symbol)]
        except ValueError:
            raise ParameterDomainError(f"Символ {symbol!r} не входит в алфавит {self.alphabet}")

    def index(self, symbol: str) -> int:
        return self.alphabet.index(symbol)

    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probs)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.alphabet, self.probs))

    def relabel(self, mapping: Mapping[str, str]) -> 'ResponseDistribution':
        return ResponseDistribution(tuple(mapping.get(s, s) for s in self.alphabet), self.probs)


def _binary(bottom: float, yes: float, no: float) -> ResponseDistribution:
    return ResponseDistribution(BINARY_ALPHABET, (bottom, yes, no))


def sampling_noise_distribution(truth: Union[Truth, str], params: SamplingParams) -> ResponseDistribution:
    """Выборка с шумом: выбранные владельцы обеих популяций отвечают "Yes" """
    truth = Truth.parse(truth)
    pi_s = params.pi_s_yes if truth is Truth.YES else params.pi_s_no
    return _binary(1.0 - pi_s, pi_s, 0.0)


def sampling_only_distribution(truth: Union[Truth, str], params: SamplingParams) -> ResponseDistribution:
    """Только выборка: популяция No всегда молчит, pi_s_no игнорируется"""
    return sampling_noise_distribution(truth, SamplingParams(pi_s_yes=params.pi_s_yes, pi_s_no=0.0))


def deniability_distribution(truth: Union[Truth, str], params: DeniabilityParams) -> ResponseDistribution:
    """Выборка с правдоподобным отрицанием"""
    truth = Truth.parse(truth)
    pi_1, pi_2 = params.pi_1, params.pi_2

    if truth is Truth.YES:
        pi_s = params.pi_s_yes
        yes = pi_s * (pi_1 + (1.0 - pi_1) * pi_2)
        no = pi_s * (1.0 - pi_1) * (1.0 - pi_2)
    else:
        pi_s = params.pi_s_no
        yes = pi_s * (1.0 - pi_1) * pi_2
        no = pi_s * (1.0 - (1.0 - pi_1) * pi_2)

    return _binary(1.0 - pi_s, yes, no)


def ddps_distribution(truth: Union[Truth, str], params: DdpsParams) -> ResponseDistribution:
    truth = Truth.parse(truth)
    if truth is Truth.YES:
        return _binary(params.bottom_rate_given_yes, params.yes_rate_given_yes, params.no_rate_given_yes)
    return _binary(params.bottom_rate_given_no, params.yes_rate_given_no, params.no_rate_given_no)


BinaryParams = Union[SamplingParams, DeniabilityParams, DdpsParams]


def binary_distribution(truth: Union[Truth, str], params: BinaryParams) -> ResponseDistribution:
    """Распределение бинарного механизма по типу его параметров"""
    if isinstance(params, DdpsParams):
        return ddps_distribution(truth, params)
    if isinstance(params, DeniabilityParams):
        return deniability_distribution(truth, params)
    if isinstance(params, SamplingParams):
        return sampling_noise_distribution(truth, params)
    raise ParameterDomainError(f"{type(params).__name__} не задаёт бинарный механизм")


def dual_distributions(
    truth: Union[Truth, str], params: DualParams
) -> Tuple[ResponseDistribution, ResponseDistribution]:
    """Пара распределений (A, C) двойного ответа"""
    truth = Truth.parse(truth)
    bot1, bot2, bot3, pi_s = params.pi_bot1, params.pi_bot2, params.pi_bot3, params.pi_s

    dist_a = ResponseDistribution(DUAL_ALPHABET, (bot1 + pi_s, bot2, bot3))
    if truth is Truth.YES:
        dist_c = ResponseDistribution(DUAL_ALPHABET, (bot1, bot2 + pi_s, bot3))
    else:
        dist_c = ResponseDistribution(DUAL_ALPHABET, (bot1, bot2, bot3 + pi_s))
    return dist_a, dist_c


def dual_distribution_b(params: DualParams) -> ResponseDistribution:
    """Распределение B совпадает с C для владельца Yes и оценщиками не используется"""
    return dual_distributions(Truth.YES, params)[1]


def multivalue_distributions(
    truth_index: Optional[int], params: MultiValueParams
) -> Tuple[ResponseDistribution, ResponseDistribution]:
    """
    Два раунда многозначного механизма.

    truth_index=None выбирает вариант "No Round Two": второй раунд
    совпадает с первым.
    """
    bottoms = list(params.effective_bottoms)
    alphabet = multivalue_alphabet(params.v)

    round_one = list(bottoms)
    round_one[0] += params.pi_s

    if truth_index is None:
        return ResponseDistribution(alphabet, tuple(round_one)), ResponseDistribution(alphabet, tuple(round_one))

    truth_index = params.check_index(truth_index)
    round_two = list(bottoms)
    round_two[truth_index] += params.pi_s
    return ResponseDistribution(alphabet, tuple(round_one)), ResponseDistribution(alphabet, tuple(round_two))


class BaselineTicks(NamedTuple):
    """Две независимые отметки владельца: правдивая и "ослепляющая" """
    truth_tick: ResponseDistribution
    blind_tick: ResponseDistribution


def rr_baseline_distribution(truth: Union[Truth, str], params: BaselineParams) -> BaselineTicks:
    truth = Truth.parse(truth)
    s1 = params.s1 if truth is Truth.YES else 0.0
    return BaselineTicks(
        truth_tick=ResponseDistribution(TICK_ALPHABET, (1.0 - s1, s1)),
        blind_tick=ResponseDistribution(TICK_ALPHABET, (1.0 - params.s2, params.s2)),
    )
