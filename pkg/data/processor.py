from typing import Optional, Sequence

import pandas as pd
from loguru import logger

from core.exceptions import DataValidationError

from .ingestion import CountsRecord


class DataProcessor:
    @staticmethod
    def to_frame(records: Sequence[CountsRecord]) -> pd.DataFrame:
        """Записи в DataFrame с колонками station_id, window_start, vehicle_count"""
        frame = pd.DataFrame(
            [(r.station_id, r.window_start, r.vehicle_count) for r in records],
            columns=['station_id', 'window_start', 'vehicle_count'],
        )
        frame['window_start'] = pd.to_datetime(frame['window_start'], utc=True)
        frame['vehicle_count'] = frame['vehicle_count'].astype('int64')
        return frame

    @staticmethod
    def population_series(
        records: Sequence[CountsRecord],
        station: str,
        fleet: Optional[int] = None,
    ) -> pd.DataFrame:
        """
        Популяции по окнам: машины у станции station - Yes, остальной
        парк - No. Без fleet размер парка в окне равен сумме подсчётов
        всех станций этого окна.
        """
        frame = DataProcessor.to_frame(records)
        if frame.empty:
            return pd.DataFrame(columns=['window_start', 'yes', 'no', 'total'])
        if station not in set(frame['station_id']):
            raise DataValidationError(f"Станция {station!r} отсутствует в данных")

        totals = frame.groupby('window_start')['vehicle_count'].sum()
        monitored = (
            frame[frame['station_id'] == station]
            .set_index('window_start')['vehicle_count']
            .reindex(totals.index, fill_value=0)
        )
        missing = int((~totals.index.isin(frame.loc[frame['station_id'] == station, 'window_start'])).sum())
        if missing:
            logger.debug(f"Станция {station} без данных в {missing} окнах, yes=0")

        series = pd.DataFrame({'yes': monitored.astype('int64')})
        series['total'] = totals.astype('int64') if fleet is None else int(fleet)
        over = series[series['yes'] > series['total']]
        if not over.empty:
            raise DataValidationError(
                f"Подсчёт станции больше парка в окне {over.index[0].isoformat()}: "
                f"{int(over['yes'].iloc[0])} > {int(over['total'].iloc[0])}"
            )
        series['no'] = series['total'] - series['yes']
        series = series.sort_index().reset_index()
        return series[['window_start', 'yes', 'no', 'total']]


def population_series(records: Sequence[CountsRecord], station: str, fleet: Optional[int] = None) -> pd.DataFrame:
    return DataProcessor.population_series(records, station, fleet)
