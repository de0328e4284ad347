"""
Ошибки библиотеки. Каждая ошибка несёт категорию, которую CLI печатает
в строке ошибки.
"""

from typing import Optional, Sequence


class DDPSError(Exception):
    """Базовая ошибка"""

    category = "error"


class ParameterDomainError(DDPSError, ValueError):
    """Параметр механизма вне допустимой области"""

    category = "parameter-domain"


class NonIdentifiableError(DDPSError):
    """Оценщик не может восстановить YES при данных параметрах"""

    category = "non-identifiable"


class DivisionDomainError(DDPSError, ValueError):
    """
    Знаменатель оценщика равен нулю (pi_s = 0, s1 = 0).

    BaselineParams уже при создании отклоняет s1 = 0 как ParameterDomainError;
    estimate_rr_baseline проверяет s1 сам и для чужих объектов параметров.
    """

    category = "division-domain"


class InfeasibleSearchError(DDPSError):
    """После фильтрации ограничений сетка пуста"""

    category = "infeasible-search"


class ConfigError(DDPSError, ValueError):
    category = "config"


class DataValidationError(DDPSError, ValueError):
    """Данные прочитаны, но нарушают инварианты"""

    category = "validation"

    def __init__(self, message: str, lines: Optional[Sequence[int]] = None):
        super().__init__(message)
        self.lines = tuple(lines or ())


class CsvParseError(DataValidationError):
    category = "parse"
