# ===== СЕКЦИЯ 1: ГЛАВНЫЙ ФАЙЛ ЗАПУСКА =====
"""
Точка входа: адаптивное шумоподавление фильтрами LMS, NLMS, RLS и MP-FAP

    python main.py run --algo fap -M 8 -L 25 -P 8 --mu 0.002 --synth --seed 1
    python main.py compare --synth --seed 7 --out results
    python main.py synth --seed 3 --out scenario
    python main.py oracle-check --samples 100000
    python main.py sweep --algo fap --param mu --values 0.001,0.002,0.005 --synth
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config.settings import ALGORITHMS, NOISE_KINDS, SELECTION_NORMS, EnvSettings, RunConfig
from core.harness import (
    SWEEP_FIELDS, cmd_compare, cmd_oracle_check, cmd_run, cmd_sweep, cmd_synth, parse_sweep_values,
)
from utils.error_handler import InvalidConfig, get_global_error_collector, setup_logging

logger = logging.getLogger(__name__)


def _add_filter_arguments(parser: argparse.ArgumentParser, with_algo: bool = True) -> None:
    group = parser.add_argument_group('фильтр')
    if with_algo:
        group.add_argument('--algo', choices=ALGORITHMS, default='fap', help='алгоритм адаптации')
    group.add_argument('-M', dest='order', type=int, default=8, help='порядок фильтра (8)')
    group.add_argument('--mu', type=float, default=None,
                       help='шаг адаптации (по умолчанию: lms 0.002, nlms 0.005, fap 0.002)')
    group.add_argument('--lambda', dest='lam', type=float, default=0.99, help='коэффициент забывания RLS (0.99)')
    group.add_argument('--delta', type=float, default=0.01, help='начальная регуляризация RLS (0.01)')
    group.add_argument('--epsilon', type=float, default=1e-8, help='регуляризатор NLMS (1e-8)')
    group.add_argument('-L', dest='window', type=int, default=25, help='длина окна FAP (25)')
    group.add_argument('-P', dest='iterations', type=int, default=8, help='итераций FAP на отсчет (8)')
    group.add_argument('--selection-norm', choices=SELECTION_NORMS, default='norm',
                       help='нормировка при выборе столбца FAP')
    group.add_argument('--norm-floor', type=float, default=1e-12, help='порог нормы столбца FAP')
    group.add_argument('--rebuild-every', type=int, default=0,
                       help='период пересчета кэша FAP прямым суммированием (0 - никогда)')


def _add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('сценарий')
    group.add_argument('--seed', type=int, default=1, help='начальное значение генератора')
    group.add_argument('--synth', action='store_true', help='синтетический сценарий вместо WAV')
    group.add_argument('--length', type=int, default=30000, help='число отсчетов сценария')
    group.add_argument('--channel-order', type=int, default=8, help='порядок неизвестного канала')
    group.add_argument('--snr-db', type=float, default=-10.0, help='ОСШ основного входа, дБ')
    group.add_argument('--noise-kind', choices=NOISE_KINDS, default='colored', help='тип шума')
    group.add_argument('--sample-rate', type=int, default=8000, help='частота дискретизации синтетики, Гц')
    group.add_argument('--reference-rms', type=float, default=None, help='СКЗ опорного шума синтетики (0.4)')
    group.add_argument('--steady-fraction', type=float, default=None,
                       help='доля последних отсчетов в окне ОСШ (1.0 - весь прогон)')


def _add_io_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group('файлы')
    group.add_argument('--primary', type=Path, default=None, help='WAV основного микрофона')
    group.add_argument('--reference', type=Path, default=None, help='WAV опорного микрофона')
    group.add_argument('--clean', type=Path, default=None, help='WAV чистого сигнала (для ОСШ)')
    group.add_argument('--out', type=Path, default=None, help='каталог результатов')
    group.add_argument('--mse-csv', type=Path, default=None, help='CSV кривой обучения')
    group.add_argument('--summary-json', type=Path, default=None, help='JSON сводка')


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--workers', type=int, default=None, help='число процессов (ANC_WORKERS)')
    parser.add_argument('--log-level', default=None, help='уровень логирования (ANC_LOG_LEVEL)')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='anc', description='Адаптивное шумоподавление: LMS, NLMS, RLS, MP-FAP')
    sub = parser.add_subparsers(dest='command', metavar='команда')
    sub.required = True

    run = sub.add_parser('run', help='один алгоритм')
    _add_filter_arguments(run)
    _add_scenario_arguments(run)
    _add_io_arguments(run)
    run.add_argument('--update-log', type=Path, default=None, help='CSV журнала обновлений FAP')
    _add_common_arguments(run)

    compare = sub.add_parser('compare', help='сравнение четырех алгоритмов')
    _add_filter_arguments(compare, with_algo=False)
    _add_scenario_arguments(compare)
    _add_io_arguments(compare)
    _add_common_arguments(compare)

    synth = sub.add_parser('synth', help='WAV файлы синтетического сценария')
    _add_scenario_arguments(synth)
    synth.add_argument('--out', type=Path, default=None, help='каталог результатов')
    _add_common_arguments(synth)

    oracle = sub.add_parser('oracle-check', help='сверка с эталонными реализациями')
    oracle.add_argument('--seed', type=int, default=1, help='начальное значение генератора')
    oracle.add_argument('--samples', type=int, default=2000, help='число отсчетов проверки кэша')
    oracle.add_argument('--inject-fault', action='store_true', help=argparse.SUPPRESS)
    _add_common_arguments(oracle)

    sweep = sub.add_parser('sweep', help='перебор одного параметра')
    _add_filter_arguments(sweep)
    _add_scenario_arguments(sweep)
    _add_io_arguments(sweep)
    sweep.add_argument('--param', choices=tuple(SWEEP_FIELDS), required=True, help='перебираемый параметр')
    sweep.add_argument('--values', required=True, help='значения через запятую')
    _add_common_arguments(sweep)

    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig из аргументов; отсутствующие у подкоманды поля берут значения по умолчанию"""
    fields = RunConfig.__dataclass_fields__
    values = {name: getattr(args, name) for name in fields if getattr(args, name, None) is not None}
    values['workers'] = args.workers if args.workers is not None else EnvSettings.workers()
    return RunConfig(**values)


def main(argv: Optional[List[str]] = None) -> int:
    """Основная функция запуска: разбор аргументов и выполнение команды"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    setup_logging(args.log_level or EnvSettings.LOG_LEVEL)

    try:
        config = build_config(args)
    except InvalidConfig as e:
        print(f"Ошибка ({type(e).__name__}): {e}", file=sys.stderr)
        return 2

    code = _dispatch(args, config)
    if code != 0:
        summary = get_global_error_collector().get_error_summary()
        logger.debug(f"Код завершения {code}, сводка ошибок: {summary}")
    return code


def _dispatch(args: argparse.Namespace, config: RunConfig) -> int:
    if args.command == 'run':
        return cmd_run(config)
    if args.command == 'compare':
        return cmd_compare(config)
    if args.command == 'synth':
        return cmd_synth(config)
    if args.command == 'oracle-check':
        return cmd_oracle_check(config, samples=args.samples, inject_fault=args.inject_fault)

    try:
        values = parse_sweep_values(args.param, args.values)
    except InvalidConfig as e:
        print(f"Ошибка ({type(e).__name__}): {e}", file=sys.stderr)
        return 2
    return cmd_sweep(config, param=args.param, values=values)


if __name__ == "__main__":
    sys.exit(main())
