import os
import sys
from dataclasses import dataclass, field, fields

from dotenv import load_dotenv
from loguru import logger

from .exceptions import ConfigError

load_dotenv()

SEED_ENV = 'DDPS_SEED'
JOBS_ENV = 'DDPS_JOBS'
LOG_LEVEL_ENV = 'DDPS_LOG_LEVEL'

DEFAULT_SEED = 20170501
LOG_LEVELS = ('TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR', 'CRITICAL')


def _env_int(name: str, default: int) -> int:
    """Целое значение из переменной окружения"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{name} должна быть целым числом, получено {raw!r}")


@dataclass
class MechanismDefaults:
    # Опорный режим параметров DDPS
    pi_s_yes1: float = 0.45
    pi_s_yes2: float = 0.50
    pi_1: float = 0.95
    pi_2: float = 0.98
    pi_3: float = 0.98
    pi_s_no: float = 0.068
    # Двойной ответ
    pi_bot1: float = 0.2
    pi_bot2: float = 0.3
    pi_s: float = 0.05
    # Рандомизированный ответ как "ослепление"
    s1: float = 0.5
    s2: float = 0.25


@dataclass
class SimulationConfig:
    seed: int = field(default_factory=lambda: _env_int(SEED_ENV, DEFAULT_SEED))
    trials: int = 1000
    confidence_level: float = 0.99
    coupling: str = 'coupled'
    n_jobs: int = field(default_factory=lambda: _env_int(JOBS_ENV, 1))


@dataclass
class PrivacyConfig:
    confidence: float = 0.99


@dataclass
class TuningConfig:
    step: float = 0.05


@dataclass
class AppConfig:
    mechanism: MechanismDefaults = field(default_factory=MechanismDefaults)
    simulation: SimulationConfig = field(default_factory=SimulationConfig)
    privacy: PrivacyConfig = field(default_factory=PrivacyConfig)
    tuning: TuningConfig = field(default_factory=TuningConfig)
    log_level: str = field(default_factory=lambda: os.getenv(LOG_LEVEL_ENV, 'INFO'))

    def validate(self) -> 'AppConfig':
        """Проверка конфигурации"""
        for f in fields(self.mechanism):
            value = getattr(self.mechanism, f.name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"mechanism.{f.name}={value} вне [0, 1]")

        for name, value in (('simulation.confidence_level', self.simulation.confidence_level),
                            ('privacy.confidence', self.privacy.confidence)):
            if not 0.0 < value < 1.0:
                raise ConfigError(f"{name}={value} должен лежать в (0, 1)")

        if self.simulation.trials < 1:
            raise ConfigError("simulation.trials должно быть >= 1")
        if self.simulation.coupling not in ('coupled', 'independent'):
            raise ConfigError(f"Неизвестный режим связи: {self.simulation.coupling}")
        if self.tuning.step <= 0:
            raise ConfigError("tuning.step должен быть > 0")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigError(f"{LOG_LEVEL_ENV}={self.log_level!r}; допустимо: {', '.join(LOG_LEVELS)}")
        return self


def configure_logging(level: str = 'INFO') -> None:
    """Единственный sink loguru в stderr, stdout остаётся под машинный вывод"""
    logger.remove()
    logger.add(
        sys.stderr,
        level=level.upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {name}:{function} - {message}",
    )
