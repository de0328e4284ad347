import math
from dataclasses import dataclass
from typing import Dict

from mechanisms import Truth, binary_distribution
from mechanisms.params import DualParams


@dataclass(frozen=True)
class EpsilonReport:
    ratio_bot2: float
    ratio_bot3: float
    epsilon: float          # ln максимального отношения
    epsilon_no_log: float   # то же отношение без логарифма

    def as_record(self) -> Dict:
        return {
            'ratio_bot2': self.ratio_bot2,
            'ratio_bot3': self.ratio_bot3,
            'epsilon': self.epsilon,
            'epsilon_no_log': self.epsilon_no_log,
        }


def _ratio(base: float, pi_s: float) -> float:
    """(base + π_s) / base; нулевой срез π_s даёт 1, нулевой base - бесконечность"""
    if pi_s == 0.0:
        return 1.0
    if base == 0.0:
        return math.inf
    return (base + pi_s) / base


def epsilon_dual(params: DualParams) -> EpsilonReport:
    """Утечка ε двойного ответа; π⊥2 = 0 или π⊥3 = 0 даёт +inf, а не исключение"""
    ratio_bot2 = _ratio(params.pi_bot2, params.pi_s)
    ratio_bot3 = _ratio(params.pi_bot3, params.pi_s)
    worst = max(ratio_bot2, ratio_bot3)
    return EpsilonReport(
        ratio_bot2=ratio_bot2,
        ratio_bot3=ratio_bot3,
        epsilon=math.log(worst),
        epsilon_no_log=worst,
    )


def epsilon_ddps(params) -> float:
    """
    ε бинарного механизма: максимум по символам |ln P(o|Yes) / P(o|No)|.
    Символ, возможный только для одной популяции, даёт +inf.
    """
    dist_yes = binary_distribution(Truth.YES, params)
    dist_no = binary_distribution(Truth.NO, params)

    worst = 0.0
    for p_yes, p_no in zip(dist_yes.probs, dist_no.probs):
        if p_yes == 0.0 and p_no == 0.0:
            continue
        if p_yes == 0.0 or p_no == 0.0:
            return math.inf
        worst = max(worst, abs(math.log(p_yes / p_no)))
    return worst
