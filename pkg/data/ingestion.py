"""
Чтение CSV с подсчётами машин по станциям.

Формат (UTF-8, заголовок обязателен):

    station_id,window_start,vehicle_count
    S7,2017-05-01T08:00:00Z,42

window_start - метка начала окна в ISO-8601, приводится к UTC (метки
без зоны считаются UTC). Окно - полуинтервал [window_start, следующее окно).
"""

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple, Union

import pandas as pd
from loguru import logger

from core.exceptions import CsvParseError, DataValidationError

COLUMNS = ('station_id', 'window_start', 'vehicle_count')
_INT_RE = re.compile(r'^[+-]?\d+$')
_LINE_RE = re.compile(r'line (\d+)')


@dataclass(frozen=True)
class CountsRecord:
    station_id: str
    window_start: pd.Timestamp
    vehicle_count: int


def _parse_timestamp(value: str, line: int) -> pd.Timestamp:
    try:
        ts = pd.Timestamp(value)
    except (ValueError, TypeError):
        raise CsvParseError(f"Строка {line}: неверная метка времени {value!r}", lines=[line])
    if ts is pd.NaT:
        raise CsvParseError(f"Строка {line}: пустая метка времени", lines=[line])
    return ts.tz_localize('UTC') if ts.tzinfo is None else ts.tz_convert('UTC')


def _parse_count(value: str, line: int) -> int:
    if not _INT_RE.match(value):
        raise CsvParseError(f"Строка {line}: vehicle_count={value!r} не целое число", lines=[line])
    count = int(value)
    if count < 0:
        raise DataValidationError(f"Строка {line}: отрицательный vehicle_count={count}", lines=[line])
    return count


def _read_frame(path: Path) -> pd.DataFrame:
    """Все строки файла как есть, заголовок - строка 0.

    Ширину таблицы задаёт заголовок: строка с лишним полем даёт ParserError
    с номером строки, первый столбец никогда не уходит в индекс.
    """
    try:
        return pd.read_csv(
            path,
            header=None,
            index_col=False,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            on_bad_lines='error',
            encoding='utf-8',
        )
    except FileNotFoundError:
        raise DataValidationError(f"Файл не найден: {path}")
    except pd.errors.EmptyDataError:
        raise CsvParseError(f"{path}: пустой файл, нет заголовка", lines=[1])
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        lines = [int(match.group(1))] if match else []
        raise CsvParseError(f"{path}: неверная строка CSV: {e}", lines=lines)
    except UnicodeDecodeError as e:
        raise CsvParseError(f"{path}: файл не в UTF-8 ({e})")


def ingest_counts_csv(path: Union[str, Path]) -> List[CountsRecord]:
    """Записи CSV в порядке файла; ошибки указывают номера строк"""
    path = Path(path)
    frame = _read_frame(path)

    rows = list(frame.itertuples(index=False, name=None))
    header = tuple('' if pd.isna(c) else str(c).strip() for c in rows[0])
    if header != COLUMNS:
        raise CsvParseError(
            f"{path}: заголовок {','.join(header)} вместо {','.join(COLUMNS)}", lines=[1]
        )

    records: List[CountsRecord] = []
    seen: Dict[Tuple[str, pd.Timestamp], int] = {}
    for line, row in enumerate(rows[1:], start=2):
        # Недостающие поля pandas заполняет NaN
        fields = ['' if pd.isna(v) else str(v).strip() for v in row]
        if not any(fields):
            continue
        if len(fields) != len(COLUMNS):
            raise CsvParseError(
                f"Строка {line}: {len(fields)} полей вместо {len(COLUMNS)}", lines=[line]
            )
        station_id, window_raw, count_raw = fields
        if not station_id or not window_raw or not count_raw:
            raise CsvParseError(f"Строка {line}: ожидалось 3 непустых поля", lines=[line])

        record = CountsRecord(
            station_id=station_id,
            window_start=_parse_timestamp(window_raw, line),
            vehicle_count=_parse_count(count_raw, line),
        )
        key = (record.station_id, record.window_start)
        if key in seen:
            raise DataValidationError(
                f"Повтор станции {station_id} в окне {record.window_start.isoformat()}: "
                f"строки {seen[key]} и {line}",
                lines=[seen[key], line],
            )
        seen[key] = line
        records.append(record)

    logger.info(f"Загружено {len(records)} записей из {path}")
    return records
