import math
from dataclasses import dataclass, fields
from enum import Enum
from numbers import Integral
from typing import Any, Dict, Mapping, Tuple, Type, Union

from core.exceptions import ConfigError, ParameterDomainError

# Допуск на сумму вероятностей
PROB_TOLERANCE = 1e-12


def check_probability(name: str, value: Any) -> float:
    """Проверка, что value лежит в [0, 1]"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterDomainError(f"{name}: ожидается число, получено {value!r}")
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ParameterDomainError(f"{name}={value} вне [0, 1]")
    return value


class Truth(str, Enum):
    YES = 'yes'
    NO = 'no'

    @classmethod
    def parse(cls, value: Union[str, 'Truth']) -> 'Truth':
        if isinstance(value, Truth):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterDomainError(f"Истинное значение должно быть yes или no, получено {value!r}")


class CouplingMode(str, Enum):
    COUPLED = 'coupled'
    INDEPENDENT = 'independent'

    @classmethod
    def parse(cls, value: Union[str, 'CouplingMode']) -> 'CouplingMode':
        if isinstance(value, CouplingMode):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterDomainError(f"Неизвестный режим связи {value!r}")


class _ProbabilityFields:
    """Проверяет все поля dataclass как вероятности"""

    def _check_fields(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, check_probability(f.name, getattr(self, f.name)))


@dataclass(frozen=True)
class DdpsParams(_ProbabilityFields):
    pi_s_yes1: float
    pi_s_yes2: float
    pi_1: float
    pi_2: float
    pi_s_no: float
    pi_3: float

    def __post_init__(self):
        self._check_fields()
        if self.pi_s_yes1 + self.pi_s_yes2 > 1.0 + PROB_TOLERANCE:
            raise ParameterDomainError(
                f"pi_s_yes1 + pi_s_yes2 = {self.pi_s_yes1 + self.pi_s_yes2} > 1"
            )

    # Вероятности ответов для популяции Yes
    @property
    def yes_rate_given_yes(self) -> float:
        return self.pi_s_yes1 * self.pi_1 + self.pi_s_yes2 * self.pi_2

    @property
    def no_rate_given_yes(self) -> float:
        return self.pi_s_yes1 * (1.0 - self.pi_1) + self.pi_s_yes2 * (1.0 - self.pi_2)

    @property
    def bottom_rate_given_yes(self) -> float:
        return max(0.0, 1.0 - (self.pi_s_yes1 + self.pi_s_yes2))

    # ... и для популяции No
    @property
    def yes_rate_given_no(self) -> float:
        return self.pi_s_no * self.pi_3

    @property
    def no_rate_given_no(self) -> float:
        return self.pi_s_no * (1.0 - self.pi_3)

    @property
    def bottom_rate_given_no(self) -> float:
        return 1.0 - self.pi_s_no

    def as_ddps(self) -> 'DdpsParams':
        return self


@dataclass(frozen=True)
class SamplingParams(_ProbabilityFields):
    """Выборка с шумом: доля популяции No отвечает "Yes" """
    pi_s_yes: float
    pi_s_no: float

    def __post_init__(self):
        self._check_fields()

    def as_ddps(self) -> DdpsParams:
        return DdpsParams(
            pi_s_yes1=self.pi_s_yes, pi_s_yes2=0.0,
            pi_1=1.0, pi_2=1.0,
            pi_s_no=self.pi_s_no, pi_3=1.0,
        )


@dataclass(frozen=True)
class DeniabilityParams(_ProbabilityFields):
    """Выборка с правдоподобным отрицанием через подбрасывание монет"""
    pi_s_yes: float
    pi_s_no: float
    pi_1: float
    pi_2: float

    def __post_init__(self):
        self._check_fields()

    def as_ddps(self) -> DdpsParams:
        # Правдивая ветка π₁ и принудительная (1−π₁)·π₂ раскладываются
        # на две выборочные доли DDPS
        return DdpsParams(
            pi_s_yes1=self.pi_s_yes * self.pi_1,
            pi_s_yes2=self.pi_s_yes * (1.0 - self.pi_1),
            pi_1=1.0,
            pi_2=self.pi_2,
            pi_s_no=self.pi_s_no,
            pi_3=(1.0 - self.pi_1) * self.pi_2,
        )


@dataclass(frozen=True)
class BaselineParams(_ProbabilityFields):
    s1: float
    s2: float

    def __post_init__(self):
        self._check_fields()
        if self.s1 <= 0.0:
            raise ParameterDomainError("s1 должно быть > 0: оценка делит на s1")


@dataclass(frozen=True)
class DualParams(_ProbabilityFields):
    pi_bot1: float
    pi_bot2: float
    pi_s: float

    def __post_init__(self):
        self._check_fields()
        if self.pi_bot1 + self.pi_bot2 + self.pi_s > 1.0 + PROB_TOLERANCE:
            raise ParameterDomainError(
                f"pi_bot1 + pi_bot2 + pi_s = {self.pi_bot1 + self.pi_bot2 + self.pi_s} > 1, pi_bot3 < 0"
            )

    @property
    def pi_bot3(self) -> float:
        return max(0.0, 1.0 - self.pi_bot1 - self.pi_bot2 - self.pi_s)

    @classmethod
    def from_bottoms(cls, pi_bot2: float, pi_bot3: float, pi_s: float) -> 'DualParams':
        """Параметры по π⊥2, π⊥3 и π_s, π⊥1 берёт остаток"""
        pi_bot2 = check_probability('pi_bot2', pi_bot2)
        pi_bot3 = check_probability('pi_bot3', pi_bot3)
        pi_s = check_probability('pi_s', pi_s)
        pi_bot1 = 1.0 - pi_bot2 - pi_bot3 - pi_s
        if pi_bot1 < -PROB_TOLERANCE:
            raise ParameterDomainError(f"pi_bot2 + pi_bot3 + pi_s = {1.0 - pi_bot1} > 1")
        return cls(pi_bot1=max(0.0, pi_bot1), pi_bot2=pi_bot2, pi_s=pi_s)


@dataclass(frozen=True)
class MultiValueParams:
    pi_bot: Tuple[float, ...]
    pi_s: float

    def __post_init__(self):
        pi_bot = tuple(check_probability(f'pi_bot[{i}]', p) for i, p in enumerate(self.pi_bot))
        object.__setattr__(self, 'pi_bot', pi_bot)
        object.__setattr__(self, 'pi_s', check_probability('pi_s', self.pi_s))
        if len(pi_bot) < 2:
            raise ParameterDomainError("Нужны как минимум pi_bot[0] и pi_bot[1]")
        if sum(pi_bot) + self.pi_s > 1.0 + PROB_TOLERANCE:
            raise ParameterDomainError(f"sum(pi_bot) + pi_s = {sum(pi_bot) + self.pi_s} > 1")

    @property
    def v(self) -> int:
        return len(self.pi_bot) - 1

    @property
    def effective_bottoms(self) -> Tuple[float, ...]:
        """π⊥0..π⊥V, где последний случай забирает остаток массы"""
        head = self.pi_bot[:-1]
        remainder = max(0.0, 1.0 - sum(head) - self.pi_s)
        return head + (remainder,)

    def check_index(self, index: int) -> int:
        if isinstance(index, bool) or not isinstance(index, Integral) or not 1 <= index <= self.v:
            raise ParameterDomainError(f"Индекс значения {index!r} вне [1, {self.v}]")
        return int(index)


PARAM_TYPES: Dict[str, Type] = {
    'sampling': SamplingParams,
    'deniability': DeniabilityParams,
    'ddps': DdpsParams,
    'dual': DualParams,
    'multivalue': MultiValueParams,
    'baseline': BaselineParams,
}


def build_params(mechanism: str, values: Mapping[str, Any]):
    """Сборка параметров механизма из словаря (конфиг, CLI) со строгой проверкой ключей"""
    if mechanism not in PARAM_TYPES:
        raise ConfigError(f"Неизвестный механизм {mechanism!r}; доступны: {', '.join(sorted(PARAM_TYPES))}")
    cls = PARAM_TYPES[mechanism]
    names = [f.name for f in fields(cls)]
    unknown = sorted(set(values) - set(names))
    if unknown:
        raise ConfigError(f"Неизвестные параметры для {mechanism}: {', '.join(unknown)}")
    missing = [n for n in names if n not in values]
    if missing:
        raise ConfigError(f"Не заданы параметры для {mechanism}: {', '.join(missing)}")
    kwargs = dict(values)
    if cls is MultiValueParams:
        kwargs['pi_bot'] = tuple(kwargs['pi_bot'])
    return cls(**kwargs)
