from .ingestion import CountsRecord, ingest_counts_csv
from .processor import DataProcessor, population_series

__all__ = ['CountsRecord', 'ingest_counts_csv', 'DataProcessor', 'population_series']
