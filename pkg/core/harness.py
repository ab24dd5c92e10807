# ===== СЕКЦИЯ 7: КОМАНДЫ ИНТЕРФЕЙСА КОМАНДНОЙ СТРОКИ =====
"""
Реализация команд CLI: run, compare, synth, oracle-check, sweep

Команды принимают RunConfig, пишут результаты в файлы и возвращают код
завершения; исключения переводятся в коды декоратором cli_error_handler.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import ALGORITHMS, EnvSettings, RunConfig
from core.anc_pipeline import AncResult, AncScenario, run_anc, synth_scenario
from core.filter_fap import FapFilter, NaiveFapFilter
from core.filters_classic import RlsFilter, make_filter, rls_inverse_oracle
from core.reporting import (
    build_summary, compare_rows, format_comparison_table, format_oracle_report, format_sweep_table,
)
from core.signal_core import DelayLine, InnerProductCache, cache_oracle
from utils.data_loader import (
    COMPARE_COLUMNS, SWEEP_COLUMNS, wav_read, wav_write, write_curve_csv, write_summary_json,
    write_table_csv, write_update_log_csv,
)
from utils.error_handler import InvalidConfig, OracleViolation, cli_error_handler

logger = logging.getLogger(__name__)

# Допуски сверки с эталонами
CACHE_TOLERANCE = 1e-9
FAP_TOLERANCE = 1e-8
RLS_TOLERANCE = 1e-6
ORTHOGONALITY_TOLERANCE = 1e-10

# Параметры перебора: имя в CLI -> поле RunConfig
SWEEP_FIELDS = {
    'mu': ('mu', float),
    'lambda': ('lam', float),
    'L': ('window', int),
    'P': ('iterations', int),
}


# ----- сценарий и прогон -----

def output_dir(config: RunConfig) -> Path:
    return Path(config.out) if config.out is not None else Path(EnvSettings.OUTPUT_DIR)


def _synth_from_config(config: RunConfig) -> AncScenario:
    return synth_scenario(seed=config.seed, length=config.length, channel_order=config.channel_order,
                          snr_db_target=config.snr_db, noise_kind=config.noise_kind,
                          sample_rate=config.sample_rate, reference_rms=config.reference_rms)


def load_scenario(config: RunConfig, synth_fallback: bool = False) -> AncScenario:
    """
    Сценарий из синтетического генератора или из WAV файлов

    При synth_fallback=True и отсутствии обоих WAV входов используется
    синтетический сценарий, как с --synth.

    Raises:
    -------
    InvalidConfig
        Не заданы входы, различаются частоты дискретизации или длины
    AudioIOError
        Файл отсутствует или не читается
    """
    if config.synth:
        return _synth_from_config(config)
    if synth_fallback and config.primary is None and config.reference is None:
        logger.info(f"Входные WAV не заданы, используется синтетический сценарий seed={config.seed}")
        return _synth_from_config(config)

    if config.primary is None or config.reference is None:
        raise InvalidConfig("Требуется --synth или пара --primary/--reference")

    primary, rate = wav_read(config.primary)
    reference, ref_rate = wav_read(config.reference)
    clean = None
    rates = [rate, ref_rate]
    if config.clean is not None:
        clean, clean_rate = wav_read(config.clean)
        rates.append(clean_rate)
    if len(set(rates)) != 1:
        raise InvalidConfig(f"Частоты дискретизации входов различаются: {rates}")

    logger.info(f"Загружены записи: {config.primary}, {config.reference}"
                + (f", {config.clean}" if config.clean is not None else ""))
    return AncScenario.from_recordings(primary, reference, clean, sample_rate=rate,
                                       source=f"wav:{Path(config.primary).name}")


def run_pipeline(config: RunConfig, scenario: AncScenario, record_updates: bool = False) -> AncResult:
    """Один алгоритм на одном сценарии с параметрами метрик из конфигурации"""
    logger.debug(f"Параметры прогона: {config.filter_params()}")
    return run_anc(scenario, make_filter(config), record_updates=record_updates,
                   steady_fraction=config.steady_fraction, smoothing_window=config.smoothing_window,
                   convergence_window=config.convergence_window, band_db=config.convergence_band_db)


def _pipeline_job(job: Tuple[RunConfig, AncScenario]) -> AncResult:
    config, scenario = job
    return run_pipeline(config, scenario)


def run_many(configs: Sequence[RunConfig], scenario: AncScenario, workers: int = 1) -> List[AncResult]:
    """Прогон нескольких конфигураций на копиях одного сценария (порядок сохраняется)"""
    jobs = [(cfg, scenario.copy()) for cfg in configs]
    if workers > 1 and len(jobs) > 1:
        logger.info(f"Параллельный прогон: {len(jobs)} задач, {workers} процессов")
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            return list(pool.map(_pipeline_job, jobs))
    return [_pipeline_job(job) for job in jobs]


def write_run_outputs(result: AncResult, config: RunConfig, directory: Path) -> int:
    """Очищенный WAV и кривая обучения; возвращает число ограниченных отсчетов"""
    clipped = wav_write(directory / f"denoised_{result.algo}.wav", result.e, result.sample_rate)
    curve_path = config.mse_csv or directory / f"mse_{result.algo}.csv"
    write_curve_csv(curve_path, result.curve.mse, result.curve.smoothed)
    return clipped


# ----- команды -----

@cli_error_handler
def cmd_run(config: RunConfig) -> int:
    """Один алгоритм: очищенный WAV, CSV кривой обучения, JSON сводка"""
    config.validate()
    scenario = load_scenario(config)
    logger.info(f"Запуск {config.algo} на сценарии {scenario.source} ({scenario.length} отсчетов)")

    record = config.update_log is not None
    if record and config.algo != 'fap':
        logger.warning("Журнал обновлений ведется только для fap, --update-log игнорируется")
        record = False
    result = run_pipeline(config, scenario, record_updates=record)

    directory = output_dir(config)
    clipped = write_run_outputs(result, config, directory)
    summary = build_summary(result, clipped)
    write_summary_json(config.summary_json or directory / 'summary.json', summary)
    if record:
        write_update_log_csv(config.update_log, result.update_log or [])

    print(format_comparison_table({result.algo: result}, title=f"ПРОГОН {result.algo.upper()}"))
    if result.diverged:
        logger.error(f"{config.algo}: расходимость на отсчете {result.divergence_index}")
        return 4
    return 0


@cli_error_handler
def cmd_compare(config: RunConfig) -> int:
    """Все четыре алгоритма на одном сценарии с параметрами по умолчанию для каждого"""
    configs = [config.for_algo(algo).validate() for algo in ALGORITHMS]
    scenario = load_scenario(config, synth_fallback=True)
    logger.info(f"Сравнение {', '.join(ALGORITHMS)} на сценарии {scenario.source}")

    results = dict(zip(ALGORITHMS, run_many(configs, scenario, config.workers)))

    directory = output_dir(config)
    summaries: Dict[str, Any] = {}
    for cfg, (algo, result) in zip(configs, results.items()):
        clipped = write_run_outputs(result, replace(cfg, mse_csv=None), directory)
        summaries[algo] = build_summary(result, clipped)

    write_table_csv(directory / 'compare.csv', compare_rows(results), COMPARE_COLUMNS)
    write_summary_json(config.summary_json or directory / 'summary.json', summaries)
    print(format_comparison_table(results))

    diverged = [algo for algo, result in results.items() if result.diverged]
    if diverged:
        logger.error(f"Расходимость: {', '.join(diverged)}")
        return 4
    return 0


@cli_error_handler
def cmd_synth(config: RunConfig) -> int:
    """Три WAV файла синтетического сценария: clean, primary, reference"""
    config.validate_scenario()
    scenario = _synth_from_config(config)
    directory = output_dir(config)
    streams = {'clean': scenario.s, 'primary': scenario.d, 'reference': scenario.n1}
    for name, samples in streams.items():
        wav_write(directory / f"{name}.wav", samples, scenario.sample_rate)
    print(f"Сценарий seed={config.seed}: ОСШ входа {scenario.input_snr_db():.4f} дБ, файлы в {directory}")
    return 0


# ----- сверка с эталонами -----

def check_cache(samples: int, seed: int, order: int = 8, window: int = 25, fault: float = 0.0) -> float:
    """Максимальное относительное отклонение рекурсий кэша от прямого суммирования"""
    rng = np.random.default_rng(seed)
    x_line = DelayLine(order + window)
    d_line = DelayLine(window + 1)
    cache = InnerProductCache(order, window)
    stride = max(1, samples // 1000)
    worst = 0.0
    for t in range(samples):
        x_line.push(rng.uniform(-1.0, 1.0))
        d_line.push(rng.uniform(-1.0, 1.0))
        cache.step(x_line, d_line)
        if t % stride == 0 or t == samples - 1:
            oracle = cache_oracle(x_line, d_line, order, window)
            gram = cache.gram + fault
            scale = max(np.max(np.abs(oracle.gram)), np.max(np.abs(oracle.cross)), 1e-300)
            deviation = max(np.max(np.abs(gram - oracle.gram)), np.max(np.abs(cache.cross - oracle.cross)))
            worst = max(worst, float(deviation / scale))
    return worst


def _fap_case(rng: np.random.Generator, samples: int) -> Tuple[Dict[str, Any], np.ndarray, np.ndarray]:
    order = int(rng.integers(1, 5))
    window = int(rng.integers(order + 1, 9))
    params = {
        'order': order, 'window': window, 'iterations': int(rng.integers(1, 5)),
        'mu': float(rng.uniform(0.05, 1.0)),
        'selection_norm': 'norm' if rng.random() < 0.5 else 'norm_squared',
    }
    x = rng.uniform(-1.0, 1.0, samples)
    w = rng.standard_normal(order)
    d = np.convolve(x, w)[:samples] + 0.01 * rng.standard_normal(samples)
    return params, x, d


def check_fap(cases: int, samples: int, seed: int) -> float:
    """Максимальное отклонение коэффициентов быстрого FAP от явной реализации"""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(cases):
        params, x, d = _fap_case(rng, samples)
        fast, naive = FapFilter(**params), NaiveFapFilter(**params)
        for xv, dv in zip(x.tolist(), d.tolist()):
            fast.step(xv, dv)
            naive.step(xv, dv)
            worst = max(worst, float(np.max(np.abs(fast.taps - naive.taps))))
    return worst


def check_orthogonality(samples: int, seed: int, order: int = 4, window: int = 12) -> float:
    """Максимум |rho(j)| по выбранному столбцу сразу после обновления с mu = 1"""
    rng = np.random.default_rng(seed)
    filt = FapFilter(order, mu=1.0, window=window, iterations=4)
    worst = 0.0
    for _ in range(samples):
        filt.refresh(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        for i in range(filt.iterations):
            record = filt.select(i)
            filt.apply(record)
            worst = max(worst, abs(float(filt.residual_cross[record.index])))
        filt.samples_seen += 1
    return worst


def check_rls(seed: int, steps: int = 200, order: int = 4, delta: float = 0.01) -> float:
    """Максимальное относительное отклонение матрицы P RLS от прямого обращения"""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for lam in (0.9, 0.99, 1.0):
        filt = RlsFilter(order, lam=lam, delta=delta)
        regressors = []
        for _ in range(steps):
            filt.step(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            regressors.append(filt.regressor)
        direct = rls_inverse_oracle(regressors, lam, delta)
        deviation = np.max(np.abs(filt.p_matrix - direct)) / np.max(np.abs(direct))
        worst = max(worst, float(deviation))
    return worst


@cli_error_handler
def cmd_oracle_check(config: RunConfig, samples: int = 2000, inject_fault: bool = False) -> int:
    """Сверка кэша, быстрого FAP и RLS с эталонами; код 5 при нарушении допуска"""
    if samples < 1:
        raise InvalidConfig(f"samples должен быть положительным: {samples}")
    fault = 1e-3 if inject_fault else 0.0
    if inject_fault:
        logger.warning("Включено внесение ошибки в кэш (отрицательный контроль)")

    deviations = {
        'cache_vs_direct_sum': {'deviation': check_cache(samples, config.seed, fault=fault),
                                'tolerance': CACHE_TOLERANCE},
        'fap_fast_vs_naive': {'deviation': check_fap(5, min(samples, 500), config.seed),
                              'tolerance': FAP_TOLERANCE},
        'fap_orthogonality': {'deviation': check_orthogonality(min(samples, 10000), config.seed),
                              'tolerance': ORTHOGONALITY_TOLERANCE},
        'rls_vs_direct_inverse': {'deviation': check_rls(config.seed), 'tolerance': RLS_TOLERANCE},
    }
    for name, item in deviations.items():
        logger.debug(f"{name}: отклонение {item['deviation']:.3e}")
    print(format_oracle_report(deviations))

    for name, item in deviations.items():
        if not item['deviation'] <= item['tolerance']:
            raise OracleViolation(f"{name}: отклонение {item['deviation']:.3e} превышает допуск {item['tolerance']:.1e}")
    return 0


# ----- перебор параметра -----

def parse_sweep_values(param: str, text: str) -> List[Any]:
    """Список значений перебора из строки через запятую"""
    if param not in SWEEP_FIELDS:
        raise InvalidConfig(f"param: ожидается один из {tuple(SWEEP_FIELDS)}, получено {param!r}")
    cast = SWEEP_FIELDS[param][1]
    try:
        values = [cast(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise InvalidConfig(f"values: не удалось разобрать {text!r}")
    if not values:
        raise InvalidConfig("values: пустой список значений")
    return values


@cli_error_handler
def cmd_sweep(config: RunConfig, param: str = 'mu', values: Optional[Sequence[Any]] = None) -> int:
    """Один алгоритм на одном сценарии для каждого значения параметра"""
    if param not in SWEEP_FIELDS:
        raise InvalidConfig(f"param: ожидается один из {tuple(SWEEP_FIELDS)}, получено {param!r}")
    if not values:
        raise InvalidConfig("values: пустой список значений")
    field_name = SWEEP_FIELDS[param][0]
    configs = [replace(config, **{field_name: value}).validate() for value in values]
    scenario = load_scenario(config, synth_fallback=True)

    results = run_many(configs, scenario, config.workers)
    rows = []
    for value, result in zip(values, results):
        rows.append({
            'algo': config.algo, 'param': param, 'value': value,
            'snri_db': None if result.snri is None else round(result.snri, 4),
            'samples_to_converge': result.samples_to_converge,
            'diverged': result.diverged,
        })
        if result.diverged:
            logger.warning(f"{config.algo}: {param}={value} расходится на отсчете {result.divergence_index}")

    write_table_csv(output_dir(config) / f"sweep_{config.algo}_{param}.csv", rows, SWEEP_COLUMNS)
    print(format_sweep_table(rows, param))
    return 0
