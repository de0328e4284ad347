import pandas as pd
import pytest

from core.exceptions import CsvParseError, DataValidationError
from data import DataProcessor, ingest_counts_csv, population_series

HEADER = 'station_id,window_start,vehicle_count\n'


@pytest.fixture
def write_csv(tmp_path):
    def _write(body: str, name: str = 'counts.csv'):
        path = tmp_path / name
        path.write_text(body, encoding='utf-8')
        return path
    return _write


@pytest.fixture
def two_windows(write_csv):
    return write_csv(
        HEADER
        + 'S1,2017-05-01T08:00:00Z,10\n'
        + 'S2,2017-05-01T08:00:00Z,30\n'
        + 'S1,2017-05-01T09:00:00Z,5\n'
        + 'S2,2017-05-01T09:00:00Z,15\n'
        + 'S3,2017-05-01T09:00:00Z,20\n'
    )


def test_header_only_file_gives_no_records(write_csv):
    assert ingest_counts_csv(write_csv(HEADER)) == []


def test_single_record(write_csv):
    records = ingest_counts_csv(write_csv(HEADER + 'S7,2017-05-01T08:00:00Z,42\n'))

    assert len(records) == 1
    assert records[0].station_id == 'S7'
    assert records[0].vehicle_count == 42
    assert records[0].window_start == pd.Timestamp('2017-05-01T08:00:00Z')


def test_timestamps_normalized_to_utc(write_csv):
    records = ingest_counts_csv(write_csv(
        HEADER + 'S1,2017-05-01T10:00:00+02:00,1\nS2,2017-05-01T08:00:00,2\n'
    ))
    assert records[0].window_start == records[1].window_start
    assert str(records[1].window_start.tz) == 'UTC'


def test_blank_lines_skipped(write_csv):
    records = ingest_counts_csv(write_csv(HEADER + 'S1,2017-05-01T08:00:00Z,1\n\nS2,2017-05-01T08:00:00Z,2\n'))
    assert [r.station_id for r in records] == ['S1', 'S2']


def test_duplicate_station_window_reports_both_lines(write_csv):
    path = write_csv(HEADER + 'S1,2017-05-01T08:00:00Z,1\nS2,2017-05-01T08:00:00Z,2\nS1,2017-05-01T08:00:00Z,3\n')
    with pytest.raises(DataValidationError) as excinfo:
        ingest_counts_csv(path)
    assert excinfo.value.lines == (2, 4)
    assert excinfo.value.category == 'validation'


def test_negative_count(write_csv):
    with pytest.raises(DataValidationError) as excinfo:
        ingest_counts_csv(write_csv(HEADER + 'S1,2017-05-01T08:00:00Z,-4\n'))
    assert excinfo.value.lines == (2,)


@pytest.mark.parametrize('row', [
    'S1,not-a-time,4',
    'S1,2017-05-01T08:00:00Z,4.5',
    'S1,2017-05-01T08:00:00Z,',
])
def test_malformed_row_reports_line(write_csv, row):
    path = write_csv(HEADER + 'S0,2017-05-01T07:00:00Z,1\n' + row + '\n')
    with pytest.raises(CsvParseError) as excinfo:
        ingest_counts_csv(path)
    assert excinfo.value.lines == (3,)
    assert excinfo.value.category == 'parse'


def test_bad_header(write_csv):
    with pytest.raises(CsvParseError) as excinfo:
        ingest_counts_csv(write_csv('station,window,count\nS1,2017-05-01T08:00:00Z,1\n'))
    assert excinfo.value.lines == (1,)


def test_empty_and_missing_files(write_csv, tmp_path):
    with pytest.raises(CsvParseError):
        ingest_counts_csv(write_csv(''))
    with pytest.raises(DataValidationError):
        ingest_counts_csv(tmp_path / 'absent.csv')


def test_population_series_uses_window_totals(two_windows):
    series = population_series(ingest_counts_csv(two_windows), 'S1')

    assert list(series.columns) == ['window_start', 'yes', 'no', 'total']
    assert series['yes'].tolist() == [10, 5]
    assert series['total'].tolist() == [40, 40]
    assert series['no'].tolist() == [30, 35]


def test_population_series_with_fleet_and_missing_windows(two_windows):
    series = DataProcessor.population_series(ingest_counts_csv(two_windows), 'S3', fleet=100)

    assert series['yes'].tolist() == [0, 20]
    assert series['total'].tolist() == [100, 100]


def test_population_series_errors(two_windows):
    records = ingest_counts_csv(two_windows)
    with pytest.raises(DataValidationError):
        population_series(records, 'S9')
    with pytest.raises(DataValidationError):
        population_series(records, 'S2', fleet=20)


def test_extra_field_in_first_row_is_rejected(write_csv):
    path = write_csv(HEADER + 'S1,X,2017-05-01T08:00:00Z,4\nS2,2017-05-01T08:00:00Z,5\n')
    with pytest.raises(CsvParseError) as excinfo:
        ingest_counts_csv(path)
    assert excinfo.value.lines == (2,)


def test_extra_field_in_later_row_is_rejected(write_csv):
    path = write_csv(HEADER + 'S1,2017-05-01T08:00:00Z,4\nS2,X,2017-05-01T08:00:00Z,5\n')
    with pytest.raises(CsvParseError) as excinfo:
        ingest_counts_csv(path)
    assert excinfo.value.lines == (3,)
