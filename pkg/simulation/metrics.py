import math
from collections import Counter
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from estimation import Estimate

if TYPE_CHECKING:
    from .engine import TrialConfig, TrialResult


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass
class ExperimentReport:
    mechanism: str
    true_value: float
    trials: int
    confidence_level: float
    estimates: List[Estimate]
    mean: float
    empirical_sigma: float
    ci: Tuple[float, float]
    abs_error: float
    rel_error: float
    # Доля испытаний, чей собственный z-интервал накрывает истину
    coverage: float
    failed_trials: int = 0
    failures: Dict[str, int] = field(default_factory=dict)
    baseline: Optional['ExperimentReport'] = None
    trial_tallies: List[Tuple[int, object]] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates], dtype=float)

    def as_record(self) -> Dict:
        record = {
            'mechanism': self.mechanism,
            'true_value': self.true_value,
            'trials': self.trials,
            'succeeded': len(self.estimates),
            'failed_trials': self.failed_trials,
            'failures': dict(sorted(self.failures.items())),
            'confidence_level': self.confidence_level,
            'mean': _finite_or_none(self.mean),
            'empirical_sigma': _finite_or_none(self.empirical_sigma),
            'ci_low': _finite_or_none(self.ci[0]),
            'ci_high': _finite_or_none(self.ci[1]),
            'abs_error': _finite_or_none(self.abs_error),
            'rel_error': _finite_or_none(self.rel_error),
            'coverage': _finite_or_none(self.coverage),
        }
        record['baseline'] = self.baseline.as_record() if self.baseline is not None else None
        return record


class ExperimentMetrics:
    @staticmethod
    def z_value(confidence_level: float) -> float:
        """Двусторонний z нормального приближения (2.576 для 0.99)"""
        return float(norm.ppf(0.5 + confidence_level / 2.0))

    @staticmethod
    def calculate_mean(values: np.ndarray) -> float:
        if len(values) == 0:
            return math.nan
        return float(np.mean(values))

    @staticmethod
    def calculate_empirical_sigma(values: np.ndarray) -> float:
        """Выборочное σ оценок; для одного испытания 0"""
        if len(values) == 0:
            return math.nan
        if len(values) == 1:
            return 0.0
        return float(np.std(values, ddof=1))

    @staticmethod
    def confidence_interval(mean: float, sigma: float, n: int, confidence_level: float) -> Tuple[float, float]:
        """Интервал для среднего по n испытаниям"""
        if n == 0:
            return math.nan, math.nan
        half = ExperimentMetrics.z_value(confidence_level) * sigma / math.sqrt(n)
        return mean - half, mean + half

    @staticmethod
    def calculate_coverage(estimates: Sequence[Estimate], true_value: float, confidence_level: float) -> float:
        if not estimates:
            return math.nan
        z = ExperimentMetrics.z_value(confidence_level)
        covered = 0
        for estimate in estimates:
            low, high = estimate.scaled_interval(z)
            if low <= true_value <= high:
                covered += 1
        return covered / len(estimates)

    @staticmethod
    def calculate_relative_error(abs_error: float, true_value: float) -> float:
        if math.isnan(abs_error):
            return math.nan
        if true_value == 0:
            return 0.0 if abs_error == 0 else math.inf
        return abs_error / abs(true_value)

    @staticmethod
    def summarize(
        mechanism: str,
        estimates: List[Estimate],
        true_value: float,
        trials: int,
        confidence_level: float,
        failures: Dict[str, int],
    ) -> ExperimentReport:
        values = np.array([e.value for e in estimates], dtype=float)
        mean = ExperimentMetrics.calculate_mean(values)
        sigma = ExperimentMetrics.calculate_empirical_sigma(values)
        abs_error = abs(mean - true_value) if not math.isnan(mean) else math.nan
        return ExperimentReport(
            mechanism=mechanism,
            true_value=true_value,
            trials=trials,
            confidence_level=confidence_level,
            estimates=estimates,
            mean=mean,
            empirical_sigma=sigma,
            ci=ExperimentMetrics.confidence_interval(mean, sigma, len(values), confidence_level),
            abs_error=abs_error,
            rel_error=ExperimentMetrics.calculate_relative_error(abs_error, true_value),
            coverage=ExperimentMetrics.calculate_coverage(estimates, true_value, confidence_level),
            failed_trials=sum(failures.values()),
            failures=failures,
        )

    @staticmethod
    def generate_report(config: 'TrialConfig', results: List['TrialResult']) -> ExperimentReport:
        """Отчёт по серии испытаний; пропущенные испытания в среднее не входят"""
        results = sorted(results, key=lambda r: r.index)
        estimates = [r.estimate for r in results if r.estimate is not None]
        failures = dict(Counter(r.failure for r in results if r.failure is not None))

        report = ExperimentMetrics.summarize(
            config.mechanism, estimates, config.true_value, config.trials, config.confidence_level, failures
        )
        if config.baseline is not None:
            report.baseline = ExperimentMetrics.summarize(
                'baseline',
                [r.baseline_estimate for r in results if r.baseline_estimate is not None],
                config.true_value,
                config.trials,
                config.confidence_level,
                {},
            )
        report.trial_tallies = [(r.index, r.tallies) for r in results if r.tallies is not None]
        return report
