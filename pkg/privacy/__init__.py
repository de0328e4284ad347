from .crowd import CrowdReport, binomial_ccdf, crowd_size, location_spread, reference_tables
from .epsilon import EpsilonReport, epsilon_ddps, epsilon_dual

__all__ = [
    'EpsilonReport', 'epsilon_dual', 'epsilon_ddps',
    'CrowdReport', 'binomial_ccdf', 'crowd_size', 'location_spread', 'reference_tables',
]
