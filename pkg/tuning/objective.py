from dataclasses import dataclass, field
from typing import Dict

from core.exceptions import ParameterDomainError
from estimation import bernoulli_count_variance


@dataclass(frozen=True)
class ObjectiveValue:
    """Дисперсия подсчёта "Yes", разложенная по популяциям"""
    var_given_yes: float
    var_given_no: float
    total: float = field(init=False)

    def __post_init__(self):
        if self.var_given_yes < 0 or self.var_given_no < 0:
            raise ParameterDomainError(
                f"Отрицательная дисперсия: {self.var_given_yes}, {self.var_given_no}"
            )
        object.__setattr__(self, 'total', self.var_given_yes + self.var_given_no)

    def as_record(self) -> Dict:
        return {
            'var_given_yes': self.var_given_yes,
            'var_given_no': self.var_given_no,
            'total': self.total,
        }


def variance_objective(params, yes: float, no: float) -> ObjectiveValue:
    """
    Пуассон-биномиальная дисперсия числа ответов "Yes":
    p_Y(1−p_Y)·YES + p_N(1−p_N)·NO.
    """
    if yes < 0 or no < 0:
        raise ParameterDomainError(f"Размеры популяций должны быть >= 0: yes={yes}, no={no}")
    d = params.as_ddps()
    # p_Y может выйти за 1 на ulp при сумме двух долей
    return ObjectiveValue(
        var_given_yes=max(0.0, bernoulli_count_variance(d.yes_rate_given_yes, yes)),
        var_given_no=max(0.0, bernoulli_count_variance(d.yes_rate_given_no, no)),
    )
