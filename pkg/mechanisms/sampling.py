"""
Выборка ответов через обратную функцию распределения.

Случайность передаётся явно (u из [0, 1)), поэтому все функции чистые.
Связанный режим двойного ответа использует одно u для обоих ответов
на выровненной раскладке

    [π⊥1 | π⊥2 | π⊥3 | π_s]

где срез π_s помечен ⊥1 в A, ⊥2 в C для Yes и ⊥3 в C для No.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ParameterDomainError

from .distributions import (
    DUAL_ALPHABET,
    ResponseDistribution,
    dual_distributions,
    multivalue_alphabet,
    multivalue_distributions,
)
from .params import CouplingMode, DualParams, MultiValueParams, Truth


def _check_uniform(u: float) -> float:
    u = float(u)
    if not 0.0 <= u < 1.0:
        raise ParameterDomainError(f"u={u} вне [0, 1)")
    return u


def _last_positive(probs: Sequence[float]) -> int:
    for i in range(len(probs) - 1, -1, -1):
        if probs[i] > 0.0:
            return i
    return len(probs) - 1


def draw_many(dist: ResponseDistribution, u: np.ndarray) -> np.ndarray:
    """Индексы символов алфавита для массива равномерных u"""
    u = np.asarray(u, dtype=float)
    idx = np.searchsorted(dist.cumulative(), u, side='right')
    # u у самой границы 1 при округлённой сумме
    return np.minimum(idx, _last_positive(dist.probs))


def draw(dist: ResponseDistribution, u: float) -> str:
    """Символ, на котором кумулятивная сумма впервые превышает u"""
    u = _check_uniform(u)
    return dist.alphabet[int(draw_many(dist, np.array([u]))[0])]


def _aligned_indices(base: Sequence[float], pi_s: float, u: np.ndarray) -> np.ndarray:
    """Индекс интервала выровненной раскладки; len(base) означает срез π_s"""
    idx = np.searchsorted(np.cumsum(base), u, side='right')
    if pi_s <= 0.0:
        idx = np.minimum(idx, _last_positive(base))
    return idx


def _coupled_labels(
    base: Sequence[float], pi_s: float, slice_a: int, slice_c: int, u: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    idx = _aligned_indices(base, pi_s, u)
    in_slice = idx == len(base)
    labels_a = np.where(in_slice, slice_a, idx)
    labels_c = np.where(in_slice, slice_c, idx)
    return labels_a, labels_c


def draw_pair_many(
    truth: Union[Truth, str],
    params: DualParams,
    u: np.ndarray,
    u_c: Optional[np.ndarray] = None,
    mode: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Tuple[np.ndarray, np.ndarray]:
    """Индексы ответов (A, C) в DUAL_ALPHABET для массива владельцев с одной истиной"""
    truth = Truth.parse(truth)
    mode = CouplingMode.parse(mode)
    u = np.asarray(u, dtype=float)

    if mode is CouplingMode.INDEPENDENT:
        if u_c is None:
            raise ParameterDomainError("Независимый режим требует второго равномерного потока u_c")
        dist_a, dist_c = dual_distributions(truth, params)
        return draw_many(dist_a, u), draw_many(dist_c, np.asarray(u_c, dtype=float))

    base = (params.pi_bot1, params.pi_bot2, params.pi_bot3)
    slice_c = 1 if truth is Truth.YES else 2
    return _coupled_labels(base, params.pi_s, 0, slice_c, u)


def draw_pair(
    truth: Union[Truth, str],
    params: DualParams,
    u: float,
    u_c: float,
    mode: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Tuple[str, str]:
    u = _check_uniform(u)
    u_c = _check_uniform(u_c)
    idx_a, idx_c = draw_pair_many(truth, params, np.array([u]), np.array([u_c]), mode)
    return DUAL_ALPHABET[int(idx_a[0])], DUAL_ALPHABET[int(idx_c[0])]


def draw_multivalue_pair_many(
    truth_index: Optional[int],
    params: MultiValueParams,
    u: np.ndarray,
    u_c: Optional[np.ndarray] = None,
    mode: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Tuple[np.ndarray, np.ndarray]:
    """Индексы ответов двух раундов; срез π_s помечен ⊥0 в первом раунде и ⊥V' во втором"""
    mode = CouplingMode.parse(mode)
    u = np.asarray(u, dtype=float)

    if mode is CouplingMode.INDEPENDENT:
        if u_c is None:
            raise ParameterDomainError("Независимый режим требует второго равномерного потока u_c")
        round_one, round_two = multivalue_distributions(truth_index, params)
        return draw_many(round_one, u), draw_many(round_two, np.asarray(u_c, dtype=float))

    slice_two = 0 if truth_index is None else params.check_index(truth_index)
    return _coupled_labels(params.effective_bottoms, params.pi_s, 0, slice_two, u)


def draw_multivalue_pair(
    truth_index: Optional[int],
    params: MultiValueParams,
    u: float,
    u_c: float,
    mode: Union[CouplingMode, str] = CouplingMode.COUPLED,
) -> Tuple[str, str]:
    u = _check_uniform(u)
    u_c = _check_uniform(u_c)
    idx_one, idx_two = draw_multivalue_pair_many(truth_index, params, np.array([u]), np.array([u_c]), mode)
    alphabet = multivalue_alphabet(params.v)
    return alphabet[int(idx_one[0])], alphabet[int(idx_two[0])]
