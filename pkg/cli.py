#!/usr/bin/env python3
"""
Командный интерфейс DDPS: распределения ответов, симуляция, оценка,
приватность, размер толпы и подбор параметров.

Машинный вывод (--output jsonl) - по одной JSON-записи на строку с
ключом "record"; ключи отсортированы, так что одинаковый конфиг и seed
дают побайтно одинаковый вывод. Логи идут только в stderr.
"""

import argparse
import json
import math
import sys
from dataclasses import asdict, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from loguru import logger

from core.config import AppConfig, configure_logging
from core.exceptions import ConfigError, DDPSError
from data import ingest_counts_csv, population_series
from estimation import Tally, estimate_rr_baseline, select_solution, solve_sign_system
from mechanisms import (
    PARAM_TYPES,
    BaselineParams,
    CouplingMode,
    DdpsParams,
    DeniabilityParams,
    DualParams,
    MultiValueParams,
    SamplingParams,
    Truth,
    binary_distribution,
    build_params,
    dual_distributions,
    multivalue_distributions,
    rr_baseline_distribution,
    sampling_only_distribution,
)
from privacy import crowd_size, epsilon_ddps, epsilon_dual, location_spread, reference_tables
from simulation import (
    estimate_tallies,
    load_experiment_config,
    populations_from_frame,
    run_experiment,
    run_timeseries,
    synthetic_timeseries,
)
from tuning import SearchSpec, grid_search_min_variance
from tuning.grid_search import DDPS_FIELDS

PMF_MECHANISMS = ('sampling', 'sampling_only', 'deniability', 'ddps', 'dual', 'multivalue', 'baseline')
BINARY_CHOICES = ('sampling', 'deniability', 'ddps')


# ---------------------------------------------------------------------------
# Разбор аргументов
# ---------------------------------------------------------------------------

def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидается число в [0, 1], получено {text!r}")
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} вне [0, 1]")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"ожидается целое >= 0, получено {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"{text} < 0")
    return value


def _assignment(text: str) -> Tuple[str, float]:
    """symbol=value"""
    name, sep, raw = text.partition('=')
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"ожидается имя=число, получено {text!r}")
    try:
        return name.strip(), float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"неверное число в {text!r}")


def _bound(text: str) -> Tuple[str, Tuple[float, float]]:
    """name=low:high"""
    name, sep, raw = text.partition('=')
    low, colon, high = raw.partition(':')
    if not sep or not colon:
        raise argparse.ArgumentTypeError(f"ожидается имя=низ:верх, получено {text!r}")
    try:
        return name.strip(), (_probability(low), _probability(high))
    except argparse.ArgumentTypeError as e:
        raise argparse.ArgumentTypeError(f"{text}: {e}")


def _schedule(text: str) -> List[float]:
    return [_probability(part) for part in text.split(',') if part.strip()]


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('параметры механизма (вероятности в [0, 1]; по умолчанию опорный режим)')
    group.add_argument('--pi-s-yes', type=_probability, help='доля выборки Yes (sampling, deniability)')
    group.add_argument('--pi-s-no', type=_probability, help='доля выборки No')
    group.add_argument('--pi-s-yes1', type=_probability, help='первая доля выборки Yes (ddps)')
    group.add_argument('--pi-s-yes2', type=_probability, help='вторая доля выборки Yes (ddps)')
    group.add_argument('--pi-1', type=_probability, help='π₁')
    group.add_argument('--pi-2', type=_probability, help='π₂')
    group.add_argument('--pi-3', type=_probability, help='π₃ (ddps)')
    group.add_argument('--pi-bot1', type=_probability, help='π⊥1 (dual)')
    group.add_argument('--pi-bot2', type=_probability, help='π⊥2 (dual)')
    group.add_argument('--pi-bot3', type=_probability, help='π⊥3 (dual; тогда π⊥1 берёт остаток)')
    group.add_argument('--pi-s', type=_probability, help='срез π_s (dual, multivalue)')
    group.add_argument('--pi-bot', type=_probability, nargs='+', help='π⊥0..π⊥V (multivalue)')
    group.add_argument('--s1', type=_probability, help='s1 базового рандомизированного ответа (> 0)')
    group.add_argument('--s2', type=_probability, help='s2 базового рандомизированного ответа')


def _pick(value: Optional[float], default: float) -> float:
    return default if value is None else value


def _params_from_args(mechanism: str, args: argparse.Namespace, app: AppConfig):
    """Параметры механизма из флагов; незаданные берутся из опорного режима"""
    d = app.mechanism
    if mechanism in ('sampling', 'sampling_only'):
        return SamplingParams(
            pi_s_yes=_pick(args.pi_s_yes, d.pi_s_yes1 + d.pi_s_yes2),
            pi_s_no=_pick(args.pi_s_no, d.pi_s_no),
        )
    if mechanism == 'deniability':
        return DeniabilityParams(
            pi_s_yes=_pick(args.pi_s_yes, d.pi_s_yes1 + d.pi_s_yes2),
            pi_s_no=_pick(args.pi_s_no, d.pi_s_no),
            pi_1=_pick(args.pi_1, d.pi_1),
            pi_2=_pick(args.pi_2, d.pi_2),
        )
    if mechanism == 'ddps':
        return DdpsParams(
            pi_s_yes1=_pick(args.pi_s_yes1, d.pi_s_yes1),
            pi_s_yes2=_pick(args.pi_s_yes2, d.pi_s_yes2),
            pi_1=_pick(args.pi_1, d.pi_1),
            pi_2=_pick(args.pi_2, d.pi_2),
            pi_s_no=_pick(args.pi_s_no, d.pi_s_no),
            pi_3=_pick(args.pi_3, d.pi_3),
        )
    if mechanism == 'dual':
        pi_s = _pick(args.pi_s, d.pi_s)
        pi_bot2 = _pick(args.pi_bot2, d.pi_bot2)
        if args.pi_bot3 is not None:
            return DualParams.from_bottoms(pi_bot2, args.pi_bot3, pi_s)
        return DualParams(pi_bot1=_pick(args.pi_bot1, d.pi_bot1), pi_bot2=pi_bot2, pi_s=pi_s)
    if mechanism == 'multivalue':
        pi_s = _pick(args.pi_s, d.pi_s)
        pi_bot = args.pi_bot
        if pi_bot is None:
            pi_bot = (d.pi_bot1, d.pi_bot2, max(0.0, 1.0 - d.pi_bot1 - d.pi_bot2 - pi_s))
        return MultiValueParams(pi_bot=tuple(pi_bot), pi_s=pi_s)
    if mechanism == 'baseline':
        return BaselineParams(s1=_pick(args.s1, d.s1), s2=_pick(args.s2, d.s2))
    raise ConfigError(f"Неизвестный механизм {mechanism!r}")


# ---------------------------------------------------------------------------
# Вывод
# ---------------------------------------------------------------------------

def _json_line(record: Dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(',', ':'))


def _emit_jsonl(records: Iterable[Dict]) -> None:
    for record in records:
        print(_json_line(record))


def _native(value):
    """Значение ячейки DataFrame в тип, который принимает json"""
    if hasattr(value, 'isoformat'):
        return value.isoformat()
    if hasattr(value, 'item'):
        value = value.item()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _frame_records(frame, kind: str) -> List[Dict]:
    return [
        dict({key: _native(value) for key, value in row.items()}, record=kind)
        for row in frame.to_dict('records')
    ]


def _fmt(value) -> str:
    if value is None:
        return '-'
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


# ---------------------------------------------------------------------------
# Команды
# ---------------------------------------------------------------------------

def pmf_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Точное распределение ответов механизма"""
    params = _params_from_args(args.mechanism, args, app)
    base = {'record': 'pmf', 'mechanism': args.mechanism}

    if args.mechanism == 'multivalue':
        if args.value is not None:
            params.check_index(args.value)
        base['value'] = args.value
        first, second = multivalue_distributions(args.value, params)
        dists = [('round1', first), ('round2', second)]
    else:
        truth = Truth.parse(args.truth)
        base['truth'] = truth.value
        if args.mechanism == 'sampling_only':
            dists = [('response', sampling_only_distribution(truth, params))]
        elif args.mechanism == 'dual':
            dist_a, dist_c = dual_distributions(truth, params)
            dists = [('A', dist_a), ('C', dist_c)]
        elif args.mechanism == 'baseline':
            ticks = rr_baseline_distribution(truth, params)
            dists = [('truth_tick', ticks.truth_tick), ('blind_tick', ticks.blind_tick)]
        else:
            dists = [('response', binary_distribution(truth, params))]

    records = [dict(base, round=name, pmf=dist.as_dict()) for name, dist in dists]
    if args.output == 'jsonl':
        _emit_jsonl(records)
        return 0

    subject = f"value={args.value}" if args.mechanism == 'multivalue' else f"truth={base['truth']}"
    print(f"\n📊 РАСПРЕДЕЛЕНИЕ {args.mechanism} | {subject}")
    print("=" * 50)
    for record in records:
        print(f"🔹 {record['round']}:")
        for symbol, p in record['pmf'].items():
            print(f"   {symbol:<8} {p:.6f}")
    return 0


def _tally_record(index: int, trial, tallies) -> Dict:
    rounds = [tallies] if isinstance(tallies, Tally) else list(tallies)
    return {
        'record': 'tally',
        'trial': index,
        'mechanism': trial.mechanism,
        'params': asdict(trial.params),
        'coupling': trial.coupling.value,
        'estimator': trial.estimator,
        'target': trial.target,
        'rounds': [t.as_record() for t in rounds],
    }


def simulate_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Серия испытаний по конфигу эксперимента"""
    experiment = load_experiment_config(args.config, app)
    trial = experiment.trial
    overrides = {}
    if args.trials is not None:
        overrides['trials'] = args.trials
    if args.seed is not None:
        overrides['master_seed'] = args.seed
    if args.jobs is not None:
        overrides['n_jobs'] = args.jobs
    if overrides:
        trial = replace(trial, **overrides)

    report = run_experiment(trial, keep_tallies=args.emit_tallies)
    records = [_tally_record(index, trial, tallies) for index, tallies in report.trial_tallies]
    records.append(dict(report.as_record(), record='experiment', config=trial.as_record()))

    if experiment.output:
        try:
            with open(experiment.output, 'w', encoding='utf-8') as fh:
                for record in records:
                    fh.write(_json_line(record) + '\n')
        except OSError as e:
            raise ConfigError(f"Не удалось записать {experiment.output}: {e}")
        logger.info(f"Записи сохранены в {experiment.output}")

    if args.output == 'jsonl':
        _emit_jsonl(records)
        return 0

    summary = records[-1]
    print(f"\n🎲 СИМУЛЯЦИЯ {trial.mechanism} | DO={trial.population.total} | seed={trial.master_seed}")
    print("=" * 50)
    print(f"   🎯 Истинное значение: {summary['true_value']}")
    print(f"   📈 Испытаний: {summary['trials']} (пропущено {summary['failed_trials']})")
    print(f"   📊 Среднее: {_fmt(summary['mean'])}")
    print(f"   📏 Эмпирическое σ: {_fmt(summary['empirical_sigma'])}")
    print(f"   🔒 ДИ {trial.confidence_level:.0%}: [{_fmt(summary['ci_low'])}, {_fmt(summary['ci_high'])}]")
    print(f"   ❗ Абсолютная ошибка: {_fmt(summary['abs_error'])}")
    print(f"   ❗ Относительная ошибка: {_fmt(summary['rel_error'])}")
    print(f"   ✅ Покрытие интервалов: {_fmt(summary['coverage'])}")
    if summary['baseline'] is not None:
        baseline = summary['baseline']
        print(f"\n⚖️  Рандомизированный ответ на той же популяции:")
        print(f"   📊 Среднее: {_fmt(baseline['mean'])}")
        print(f"   📏 Эмпирическое σ: {_fmt(baseline['empirical_sigma'])}")
        print(f"   ❗ Абсолютная ошибка: {_fmt(baseline['abs_error'])}")
    return 0


def _tallies_from_record(record: Dict):
    rounds = [Tally(counts=r['counts'], total=r['total']) for r in record['rounds']]
    return rounds[0] if len(rounds) == 1 else tuple(rounds)


def _estimates_from_file(path: str) -> List[Dict]:
    records = []
    try:
        lines = Path(path).read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ConfigError(f"Не удалось прочитать {path}: {e}")

    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: строка {number}: неверный JSON ({e.msg})")
        if record.get('record') != 'tally':
            continue
        try:
            params = build_params(record['mechanism'], record['params'])
            estimate = estimate_tallies(
                record['mechanism'], params, _tallies_from_record(record),
                record.get('estimator', 'yes'), record.get('coupling', 'coupled'), record.get('target', 1),
            )
        except KeyError as e:
            raise ConfigError(f"{path}: строка {number}: нет ключа {e}")
        records.append(dict(estimate.as_record(), record='estimate', trial=record.get('trial')))
    return records


def _counts(pairs: Optional[Sequence[Tuple[str, float]]], flag: str) -> Tally:
    if not pairs:
        raise ConfigError(f"Нужен {flag} символ=число ...")
    return Tally.from_counts(dict(pairs))


def estimate_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Оценка YES по наблюдаемым подсчётам"""
    if args.tallies:
        records = _estimates_from_file(args.tallies)
    else:
        if args.mechanism is None:
            raise ConfigError("Укажите механизм или --tallies FILE")
        params = _params_from_args(args.mechanism, args, app)

        if args.mechanism in BINARY_CHOICES and args.estimator == 'sign-system':
            tally = _counts(args.counts, '--counts')
            solution_set = solve_sign_system(tally.count('yes'), tally.count('bottom'), tally.total, params)
            best = select_solution(solution_set)
            records = [
                {
                    'record': 'sign_solution',
                    'yes': s.yes,
                    'sigma': s.sigma,
                    'signs': list(s.signs),
                    'selected': s is best,
                    'degenerate': solution_set.degenerate,
                }
                for s in solution_set.solutions
            ]
            if not records:
                records.append({'record': 'sign_solution', 'degenerate': solution_set.degenerate, 'yes': None,
                                'sigma': None, 'signs': None, 'selected': False})
        elif args.mechanism == 'baseline':
            if args.agg is None or args.total is None:
                raise ConfigError("Для baseline нужны --agg и --total")
            records = [dict(estimate_rr_baseline(args.agg, args.total, params).as_record(), record='estimate')]
        else:
            if args.mechanism in BINARY_CHOICES:
                tallies = _counts(args.counts, '--counts')
            else:
                tallies = (_counts(args.counts_a, '--counts-a'), _counts(args.counts_c, '--counts-c'))
            estimate = estimate_tallies(
                args.mechanism, params, tallies, args.estimator, args.coupling, args.target
            )
            records = [dict(estimate.as_record(), record='estimate')]

    return _print_estimates(records, args)


def _print_estimates(records: List[Dict], args: argparse.Namespace) -> int:
    if args.output == 'jsonl':
        _emit_jsonl(records)
        return 0

    print(f"\n🧮 ОЦЕНКА")
    print("=" * 50)
    for record in records:
        if record['record'] == 'sign_solution':
            if record['yes'] is None:
                print("   ⚠️  Система вырождена или решений нет" if record['degenerate'] else "   ⚠️  Решений нет")
                continue
            mark = '✅' if record['selected'] else '  '
            print(f" {mark} YES={record['yes']:.3f}  σ={record['sigma']:.3f}  знаки={tuple(record['signs'])}")
            continue
        prefix = f"#{record['trial']} " if record.get('trial') is not None else ''
        warn = ' ⚠️ < 0' if record['below_zero'] else ''
        print(f"   {prefix}{record['method']}: {record['value']:.3f} "
              f"[{record['low']:.3f}, {record['high']:.3f}] σ={record['sigma']:.3f}{warn}")
    return 0


def epsilon_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Утечка ε"""
    params = _params_from_args(args.mechanism, args, app)
    if args.mechanism == 'dual':
        report = epsilon_dual(params)
        record = dict(report.as_record(), record='epsilon', mechanism='dual')
    else:
        value = epsilon_ddps(params)
        record = {'record': 'epsilon', 'mechanism': args.mechanism, 'epsilon': value,
                  'epsilon_no_log': math.exp(value) if math.isfinite(value) else math.inf}
    record = {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in record.items()}

    if args.output == 'jsonl':
        _emit_jsonl([record])
        return 0

    print(f"\n🔐 УТЕЧКА ε | {args.mechanism}")
    print("=" * 50)
    if 'ratio_bot2' in record:
        print(f"   ⊥2: {_fmt(record['ratio_bot2'])}")
        print(f"   ⊥3: {_fmt(record['ratio_bot3'])}")
    print(f"   ε (ln): {_fmt(record['epsilon'])}")
    print(f"   ε (без ln): {_fmt(record['epsilon_no_log'])}")
    return 0


def crowd_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Размер толпы и число мест через ccdf биномиального распределения"""
    confidence = args.confidence if args.confidence is not None else app.privacy.confidence
    records = []
    if args.n is not None or args.queries is not None:
        if args.p is None:
            raise ConfigError("Нужен --p: вероятность шумного Yes на владельца")
    if args.n is not None:
        records.append(dict(crowd_size(args.n, args.p, confidence).as_record(), record='crowd'))
    if args.queries is not None:
        records.append({
            'record': 'locations', 'queries': args.queries, 'p': args.p, 'confidence': confidence,
            'locations': location_spread(args.queries, args.p, confidence),
        })
    if args.tables:
        locations, crowds = reference_tables(confidence)
        records.extend(_frame_records(locations, 'location_table'))
        records.extend(_frame_records(crowds, 'crowd_table'))
    if not records:
        raise ConfigError("Укажите --n, --queries или --tables")

    if args.output == 'jsonl':
        _emit_jsonl(records)
        return 0

    print(f"\n👥 ТОЛПА | confidence={confidence}")
    print("=" * 50)
    for record in records:
        kind = record['record']
        if kind == 'crowd':
            print(f"   👥 n={record['n']}, p={record['p']}: толпа {record['crowd_size']}")
        elif kind == 'locations':
            print(f"   📍 {record['queries']} мест, p={record['p']}: одновременно в {record['locations']}")
        elif kind == 'location_table':
            print(f"   📍 станций {record['stations']}, π_s_No={record['pi_s_no']}: "
                  f"{record['locations']} (опубликовано {record['published_locations']})")
        else:
            print(f"   👥 популяция {record['population']}, π_s_No={record['pi_s_no']}: "
                  f"{record['crowd_size']} (опубликовано {record['published_crowd_size']})")
    return 0


def tune_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Подбор параметров DDPS по минимуму дисперсии"""
    defaults = app.mechanism
    fixed = {name: getattr(defaults, name) for name in DDPS_FIELDS}
    fixed.update(dict(args.fix or []))
    spec_kwargs = dict(
        yes=args.yes,
        no=args.no,
        step=args.step if args.step is not None else app.tuning.step,
        fixed=fixed,
        epsilon_budget=args.epsilon_budget,
        min_denominator=args.min_denominator,
        n_jobs=args.jobs if args.jobs is not None else app.simulation.n_jobs,
    )
    if args.bound:
        spec_kwargs['bounds'] = dict(args.bound)
    params, value = grid_search_min_variance(SearchSpec(**spec_kwargs))
    record = dict(value.as_record(), record='tune', params=asdict(params))

    if args.output == 'jsonl':
        _emit_jsonl([record])
        return 0

    print(f"\n🔧 ПОДБОР ПАРАМЕТРОВ | YES={args.yes}, NO={args.no}")
    print("=" * 50)
    for name, v in record['params'].items():
        print(f"   {name:<10} {v:.4f}")
    print(f"   📏 Var|Yes = {value.var_given_yes:.4f}, Var|No = {value.var_given_no:.4f}, всего {value.total:.4f}")
    return 0


def timeseries_command(args: argparse.Namespace, app: AppConfig) -> int:
    """Оценка по окнам суток: синтетическая кривая или CSV"""
    params = _params_from_args(args.mechanism, args, app)
    window_start = None
    if args.csv:
        if not args.station:
            raise ConfigError("Для --csv нужен --station")
        series = population_series(ingest_counts_csv(args.csv), args.station, args.fleet)
        populations = populations_from_frame(series)
        window_start = list(series['window_start'])
    else:
        populations = synthetic_timeseries(args.stations, args.vehicles, args.windows, args.data_seed)

    frame = run_timeseries(
        populations,
        args.mechanism,
        params,
        master_seed=args.seed if args.seed is not None else app.simulation.seed,
        confidence_level=args.confidence if args.confidence is not None else app.simulation.confidence_level,
        estimator=args.estimator,
        coupling=args.coupling,
        pi_s_no_schedule=args.pi_s_no_schedule,
        window_start=window_start,
    )

    if args.output == 'jsonl':
        _emit_jsonl(_frame_records(frame, 'window'))
        return 0

    print(f"\n🕒 ВРЕМЕННОЙ РЯД {args.mechanism} | окон: {len(frame)}")
    print("=" * 50)
    print(frame.to_string(index=False))
    print(f"\n✅ Покрытие: {frame['covered'].mean():.1%}")
    return 0


# ---------------------------------------------------------------------------
# Парсер
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ddps',
        description='🔐 Приватные подсчёты: выборка с правдоподобным отрицанием и двойной ответ',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Примеры использования:
  ddps pmf ddps --truth yes
  ddps epsilon --pi-bot2 0.02 --pi-bot3 0.02 --pi-s 0.05
  ddps simulate --config experiment.json --output jsonl
  ddps estimate ddps --counts yes=1500 no=300 bottom=8200
  ddps crowd --n 3320 --p 0.049
  ddps tune --yes 100 --no 900
        """
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--output', '-o', choices=['text', 'jsonl'], default='text',
                        help='Формат вывода: текст или JSON-записи по строкам')
    common.add_argument('--verbose', '-v', action='store_true', help='Подробные логи в stderr')

    subparsers = parser.add_subparsers(dest='command', help='Команды')

    # pmf
    pmf_parser = subparsers.add_parser('pmf', parents=[common], help='Точное распределение ответов')
    pmf_parser.add_argument('mechanism', choices=PMF_MECHANISMS, help='Механизм')
    pmf_parser.add_argument('--truth', choices=['yes', 'no'], default='yes', help='Истинный ответ владельца')
    pmf_parser.add_argument('--value', type=int, default=None,
                            help='Значение владельца для multivalue (1..V); без него - вариант без второго раунда')
    _add_param_flags(pmf_parser)

    # simulate
    sim_parser = subparsers.add_parser('simulate', parents=[common], help='Монте-Карло эксперимент')
    sim_parser.add_argument('--config', '-c', required=True, help='JSON-файл эксперимента')
    sim_parser.add_argument('--trials', type=int, default=None, help='Число испытаний (>= 1)')
    sim_parser.add_argument('--seed', type=_non_negative_int, default=None, help='Главный seed (целое >= 0)')
    sim_parser.add_argument('--jobs', type=int, default=None, help='Параллельные процессы joblib')
    sim_parser.add_argument('--emit-tallies', action='store_true',
                            help='Выводить подсчёты каждого испытания (читаются estimate --tallies)')

    # estimate
    est_parser = subparsers.add_parser('estimate', parents=[common], help='Оценка YES по подсчётам')
    est_parser.add_argument('mechanism', nargs='?', choices=list(PARAM_TYPES), help='Механизм')
    est_parser.add_argument('--counts', type=_assignment, nargs='+', help='Подсчёты бинарного механизма: yes=.. no=.. bottom=..')
    est_parser.add_argument('--counts-a', type=_assignment, nargs='+', help='Первый раунд dual/multivalue: bot1=.. ')
    est_parser.add_argument('--counts-c', type=_assignment, nargs='+', help='Второй раунд dual/multivalue')
    est_parser.add_argument('--agg', type=float, default=None, help='AGG базового рандомизированного ответа')
    est_parser.add_argument('--total', type=float, default=None, help='DO для baseline')
    est_parser.add_argument('--estimator', choices=['yes', 'no', 'bottom', 'sign-system'], default='yes',
                            help='Бинарный оценщик')
    est_parser.add_argument('--coupling', choices=[m.value for m in CouplingMode], default='coupled',
                            help='Режим связи двух раундов')
    est_parser.add_argument('--target', type=int, default=1, help='Оцениваемое значение multivalue (1..V)')
    est_parser.add_argument('--tallies', default=None, help='Файл jsonl с записями tally (вывод simulate --emit-tallies)')
    _add_param_flags(est_parser)

    # epsilon
    eps_parser = subparsers.add_parser('epsilon', parents=[common], help='Утечка ε')
    eps_parser.add_argument('mechanism', nargs='?', choices=['dual', 'ddps', 'sampling', 'deniability'],
                            default='dual', help='Механизм (по умолчанию dual)')
    _add_param_flags(eps_parser)

    # crowd
    crowd_parser = subparsers.add_parser('crowd', parents=[common], help='Размер толпы и число мест')
    crowd_parser.add_argument('--n', type=_non_negative_int, default=None, help='Размер популяции No')
    crowd_parser.add_argument('--p', type=_probability, default=None, help='Вероятность шумного Yes, [0, 1]')
    crowd_parser.add_argument('--queries', type=_non_negative_int, default=None, help='Число мест (запросов)')
    crowd_parser.add_argument('--confidence', type=float, default=None, help='Доверительная вероятность, (0, 1)')
    crowd_parser.add_argument('--tables', action='store_true', help='Пересчитать опорные строки таблиц')

    # tune
    tune_parser = subparsers.add_parser('tune', parents=[common], help='Подбор параметров DDPS')
    tune_parser.add_argument('--yes', type=float, required=True, help='YES, >= 0')
    tune_parser.add_argument('--no', type=float, required=True, help='NO, >= 0')
    tune_parser.add_argument('--step', type=float, default=None, help='Шаг сетки, > 0')
    tune_parser.add_argument('--bound', type=_bound, action='append',
                             help=f"Перебираемый параметр имя=низ:верх (имена: {', '.join(DDPS_FIELDS)})")
    tune_parser.add_argument('--fix', type=_assignment, action='append', help='Фиксированный параметр имя=значение')
    tune_parser.add_argument('--epsilon-budget', type=float, default=None, help='Максимальный ε, >= 0')
    tune_parser.add_argument('--min-denominator', type=float, default=None, help='Минимальный |p_Y − p_N|')
    tune_parser.add_argument('--jobs', type=int, default=None, help='Параллельные процессы joblib')

    # timeseries
    ts_parser = subparsers.add_parser('timeseries', parents=[common], help='Оценка по окнам суток')
    ts_parser.add_argument('mechanism', nargs='?', choices=list(BINARY_CHOICES) + ['dual'], default='ddps',
                           help='Механизм (по умолчанию ddps)')
    ts_parser.add_argument('--csv', default=None, help='CSV station_id,window_start,vehicle_count')
    ts_parser.add_argument('--station', default=None, help='Наблюдаемая станция (для --csv)')
    ts_parser.add_argument('--fleet', type=_non_negative_int, default=None, help='Размер парка (по умолчанию сумма по окну)')
    ts_parser.add_argument('--stations', type=int, default=3220, help='Станций в синтетике, >= 1')
    ts_parser.add_argument('--vehicles', type=int, default=47719, help='Машин в синтетике, >= 1')
    ts_parser.add_argument('--windows', type=int, default=24, help='Часовых окон, >= 1')
    ts_parser.add_argument('--data-seed', type=_non_negative_int, default=0, help='Seed синтетической кривой')
    ts_parser.add_argument('--seed', type=_non_negative_int, default=None, help='Главный seed ответов')
    ts_parser.add_argument('--confidence', type=float, default=None, help='Доверительная вероятность, (0, 1)')
    ts_parser.add_argument('--estimator', choices=['yes', 'no', 'bottom'], default='yes', help='Бинарный оценщик')
    ts_parser.add_argument('--coupling', choices=[m.value for m in CouplingMode], default='coupled',
                           help='Режим связи (dual)')
    ts_parser.add_argument('--pi-s-no-schedule', type=_schedule, default=None,
                           help='π_s_No по окнам через запятую, значения в [0, 1]')
    _add_param_flags(ts_parser)

    return parser


COMMANDS = {
    'pmf': pmf_command,
    'simulate': simulate_command,
    'estimate': estimate_command,
    'epsilon': epsilon_command,
    'crowd': crowd_command,
    'tune': tune_command,
    'timeseries': timeseries_command,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Главная функция CLI"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 2

    try:
        app = AppConfig().validate()
        configure_logging('DEBUG' if args.verbose else app.log_level)
        return COMMANDS[args.command](args, app)
    except DDPSError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
