import pytest

from mechanisms import DdpsParams, DualParams


@pytest.fixture
def reference_params() -> DdpsParams:
    """Опорный режим DDPS"""
    return DdpsParams(pi_s_yes1=0.45, pi_s_yes2=0.50, pi_1=0.95, pi_2=0.98, pi_s_no=0.068, pi_3=0.98)


@pytest.fixture
def dual_params() -> DualParams:
    return DualParams(pi_bot1=0.2, pi_bot2=0.3, pi_s=0.05)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # Переменные окружения разработчика не должны влиять на тесты
    for name in ('DDPS_SEED', 'DDPS_JOBS', 'DDPS_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
