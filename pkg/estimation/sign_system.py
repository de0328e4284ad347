"""
Совместное решение уравнений по "Yes" и ⊥ относительно (YES, σ):

    a1·YES + s1·σ = Observed_Yes − b1
    a2·YES + s2·σ = Observed_⊥  − b2

Согласованность E_Yes + E_⊥ = DO оставляет только комбинации s1 = −s2.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from loguru import logger

from core.exceptions import ParameterDomainError

SINGULAR_TOLERANCE = 1e-9
SIGN_COMBINATIONS: Tuple[Tuple[int, int], ...] = ((1, -1), (-1, 1))


@dataclass(frozen=True)
class SignSolution:
    yes: float
    sigma: float
    signs: Tuple[int, int]


@dataclass(frozen=True)
class SolutionSet:
    solutions: Tuple[SignSolution, ...]
    degenerate: bool
    # Строки системы ((a1, s1, r1), (a2, s2, r2)) первой комбинации знаков
    dependency: Optional[Tuple[Tuple[float, float, float], Tuple[float, float, float]]] = None


def solve_sign_system(tally_yes: float, tally_bottom: float, total: float, params) -> SolutionSet:
    if tally_yes < 0 or tally_bottom < 0 or tally_yes + tally_bottom > total * (1 + 1e-12):
        raise ParameterDomainError(
            f"Нужно 0 <= tally_yes + tally_bottom <= total: {tally_yes} + {tally_bottom} > {total}"
        )

    d = params.as_ddps()
    a1 = d.yes_rate_given_yes - d.yes_rate_given_no
    r1 = tally_yes - d.yes_rate_given_no * total
    a2 = d.bottom_rate_given_yes - d.bottom_rate_given_no
    r2 = tally_bottom - d.bottom_rate_given_no * total

    s1, s2 = SIGN_COMBINATIONS[0]
    dependency = ((a1, float(s1), r1), (a2, float(s2), r2))

    # |det| одинаков для обеих комбинаций: |a1 + a2|
    if abs(a1 * s2 - a2 * s1) < SINGULAR_TOLERANCE:
        logger.info("Система знаков вырождена: уравнения линейно зависимы")
        return SolutionSet(solutions=(), degenerate=True, dependency=dependency)

    slack = 1e-9 * max(1.0, total)
    solutions = []
    for s1, s2 in SIGN_COMBINATIONS:
        det = a1 * s2 - a2 * s1
        yes = (r1 * s2 - r2 * s1) / det
        sigma = (a1 * r2 - a2 * r1) / det

        if yes < -slack:
            continue
        if a1 != 0 and yes > total + abs(sigma) / abs(a1) + slack:
            continue
        solutions.append(SignSolution(yes=max(yes, 0.0), sigma=sigma, signs=(s1, s2)))

    return SolutionSet(solutions=tuple(solutions), degenerate=False, dependency=dependency)


def select_solution(solution_set: SolutionSet) -> Optional[SignSolution]:
    """Решение с минимальным |σ|; при равенстве - первое по порядку комбинаций"""
    if not solution_set.solutions:
        return None
    return min(solution_set.solutions, key=lambda s: abs(s.sigma))
