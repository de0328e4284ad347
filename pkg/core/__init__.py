from .config import AppConfig, configure_logging
from .exceptions import (
    ConfigError,
    CsvParseError,
    DataValidationError,
    DDPSError,
    DivisionDomainError,
    InfeasibleSearchError,
    NonIdentifiableError,
    ParameterDomainError,
)

__all__ = [
    'AppConfig', 'configure_logging',
    'DDPSError', 'ParameterDomainError', 'NonIdentifiableError', 'DivisionDomainError',
    'InfeasibleSearchError', 'ConfigError', 'DataValidationError', 'CsvParseError',
]
