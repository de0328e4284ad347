"""
Полный перебор сетки параметров DDPS с минимизацией дисперсии подсчёта.

Сетка строится через sklearn.model_selection.ParameterGrid, точки
оцениваются пакетами через joblib. Результат не зависит от порядка
оценки: минимум берётся по ключу (total, параметры в порядке полей).
"""

import math
from dataclasses import dataclass, field, fields
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from sklearn.model_selection import ParameterGrid

from core.config import MechanismDefaults
from core.exceptions import InfeasibleSearchError, ParameterDomainError
from mechanisms import DdpsParams
from privacy import epsilon_ddps

from .objective import ObjectiveValue, variance_objective

DDPS_FIELDS: Tuple[str, ...] = tuple(f.name for f in fields(DdpsParams))

# Параметры, которые перебираются по умолчанию; π₁, π₂, π₃ фиксированы
DEFAULT_SEARCHED = ('pi_s_yes1', 'pi_s_yes2', 'pi_s_no')


def _reference_fixed() -> Dict[str, float]:
    defaults = MechanismDefaults()
    return {name: getattr(defaults, name) for name in DDPS_FIELDS}


@dataclass(frozen=True)
class SearchSpec:
    yes: float
    no: float
    step: float = 0.05
    bounds: Mapping[str, Tuple[float, float]] = field(
        default_factory=lambda: {name: (0.0, 1.0) for name in DEFAULT_SEARCHED}
    )
    fixed: Mapping[str, float] = field(default_factory=_reference_fixed)
    epsilon_budget: Optional[float] = None
    # Минимальный |p_Y − p_N|, чтобы оценка по "Yes" оставалась определённой
    min_denominator: Optional[float] = None
    n_jobs: int = 1

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterDomainError(f"step={self.step} должен быть > 0")
        if self.yes < 0 or self.no < 0 or self.yes + self.no <= 0:
            raise ParameterDomainError(f"Нужно yes, no >= 0 и yes + no > 0: {self.yes}, {self.no}")
        for name, (low, high) in self.bounds.items():
            if name not in DDPS_FIELDS:
                raise ParameterDomainError(f"Неизвестный параметр в bounds: {name}")
            if not 0.0 <= low <= high <= 1.0:
                raise ParameterDomainError(f"Границы {name}=({low}, {high}) вне [0, 1]")
        missing = [n for n in DDPS_FIELDS if n not in self.bounds and n not in self.fixed]
        if missing:
            raise ParameterDomainError(f"Не заданы ни границы, ни значения: {', '.join(missing)}")
        if self.epsilon_budget is not None and self.epsilon_budget < 0:
            raise ParameterDomainError(f"epsilon_budget={self.epsilon_budget} < 0")

    def axis(self, name: str) -> List[float]:
        """Значения одного параметра: low, low + step, ..., не выше high"""
        low, high = self.bounds[name]
        count = int(math.floor((high - low) / self.step + 1e-9)) + 1
        return [float(v) for v in np.round(low + self.step * np.arange(count), 12)]

    def grid(self) -> ParameterGrid:
        return ParameterGrid({name: self.axis(name) for name in sorted(self.bounds)})


def _params_key(params: DdpsParams) -> Tuple[float, ...]:
    return tuple(getattr(params, name) for name in DDPS_FIELDS)


def _evaluate_block(points: List[Dict[str, float]], spec: SearchSpec) -> List[Tuple[DdpsParams, ObjectiveValue]]:
    feasible = []
    for point in points:
        values = {name: spec.fixed.get(name) for name in DDPS_FIELDS if name not in point}
        values.update(point)
        try:
            params = DdpsParams(**values)
        except ParameterDomainError:
            continue

        if spec.min_denominator is not None:
            if abs(params.yes_rate_given_yes - params.yes_rate_given_no) < spec.min_denominator:
                continue
        if spec.epsilon_budget is not None and epsilon_ddps(params) > spec.epsilon_budget:
            continue
        feasible.append((params, variance_objective(params, spec.yes, spec.no)))
    return feasible


def evaluate_grid(spec: SearchSpec) -> List[Tuple[DdpsParams, ObjectiveValue]]:
    """Все допустимые точки сетки с их значениями целевой функции"""
    points = list(spec.grid())
    n_blocks = max(1, min(len(points), 64))
    blocks = [points[i::n_blocks] for i in range(n_blocks)]
    logger.debug(f"Сетка: {len(points)} точек, {n_blocks} пакетов, n_jobs={spec.n_jobs}")

    results = Parallel(n_jobs=spec.n_jobs)(delayed(_evaluate_block)(block, spec) for block in blocks)
    feasible = [item for block in results for item in block]
    feasible.sort(key=lambda item: _params_key(item[0]))
    return feasible


def grid_search_min_variance(spec: SearchSpec) -> Tuple[DdpsParams, ObjectiveValue]:
    """Точка сетки с минимальной суммарной дисперсией"""
    feasible = evaluate_grid(spec)
    if not feasible:
        raise InfeasibleSearchError(
            "Ни одна точка сетки не удовлетворяет ограничениям"
            + (f" (epsilon_budget={spec.epsilon_budget})" if spec.epsilon_budget is not None else "")
        )

    best_params, best_value = min(feasible, key=lambda item: (item[1].total, _params_key(item[0])))
    logger.info(
        f"Перебрано {len(feasible)} допустимых точек; минимум total={best_value.total:.6g} "
        f"при {dict(zip(DDPS_FIELDS, _params_key(best_params)))}"
    )
    return best_params, best_value
