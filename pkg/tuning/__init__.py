from .grid_search import SearchSpec, evaluate_grid, grid_search_min_variance
from .objective import ObjectiveValue, variance_objective

__all__ = ['ObjectiveValue', 'variance_objective', 'SearchSpec', 'evaluate_grid', 'grid_search_min_variance']
