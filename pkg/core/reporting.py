# ===== СЕКЦИЯ 6: ТЕКСТОВЫЕ ОТЧЕТЫ =====
"""
Текстовые таблицы сравнения алгоритмов и сводки прогонов
Значения SNRI печатаются с 4 знаками после запятой, как в CSV
"""

from typing import Any, Dict, Iterable, List, Optional

from core.anc_pipeline import AncResult

ALGO_TITLES = {
    'lms': 'LMS',
    'nlms': 'NLMS',
    'rls': 'RLS',
    'fap': 'MP-FAP',
}


def format_value(value: Optional[float], digits: int = 4) -> str:
    if value is None:
        return 'н/д'
    return f"{value:.{digits}f}"


def format_count(value: Optional[int]) -> str:
    return 'н/д' if value is None else str(int(value))


def compare_rows(results: Dict[str, AncResult]) -> List[Dict[str, Any]]:
    """Строки сравнения для CSV: algo, snri_db, samples_to_converge, diverged"""
    rows = []
    for algo, result in results.items():
        rows.append({
            'algo': algo,
            'snri_db': None if result.snri is None else round(result.snri, 4),
            'samples_to_converge': result.samples_to_converge,
            'diverged': result.diverged,
        })
    return rows


def build_summary(result: AncResult, clipped_samples: int = 0) -> Dict[str, Any]:
    """JSON сводка одного прогона"""
    summary = result.summary()
    summary['clipped_samples'] = int(clipped_samples)
    return summary


def format_comparison_table(results: Dict[str, AncResult], title: str = 'УЛУЧШЕНИЕ ОСШ, дБ') -> str:
    """
    Таблица сравнения алгоритмов

    Parameters:
    -----------
    results : dict
        Результаты прогонов по имени алгоритма
    title : str
        Заголовок таблицы

    Returns:
    --------
    str
        Выровненная текстовая таблица
    """
    header = f"{'Алгоритм':<10}{'SNRI, дБ':>14}{'ОСШ вход':>12}{'ОСШ выход':>12}{'Сходимость':>12}{'Расход.':>10}"
    width = len(header)
    lines = ["=" * width, title, "=" * width, header, "-" * width]

    for algo, result in results.items():
        snr_out = format_value(result.snr_out)
        if result.snr_capped:
            snr_out = f">={snr_out}"
        lines.append(
            f"{ALGO_TITLES.get(algo, algo):<10}"
            f"{format_value(result.snri):>14}"
            f"{format_value(result.snr_in):>12}"
            f"{snr_out:>12}"
            f"{format_count(result.samples_to_converge):>12}"
            f"{('да' if result.diverged else 'нет'):>10}"
        )

    lines.append("=" * width)
    return "\n".join(lines)


def format_sweep_table(rows: Iterable[Dict[str, Any]], param: str) -> str:
    """Таблица перебора параметра"""
    rows = list(rows)
    header = f"{'Алгоритм':<10}{param:>12}{'SNRI, дБ':>14}{'Сходимость':>12}{'Расход.':>10}"
    width = len(header)
    lines = ["=" * width, f"ПЕРЕБОР ПАРАМЕТРА {param}", "=" * width, header, "-" * width]
    for row in rows:
        lines.append(
            f"{ALGO_TITLES.get(row['algo'], row['algo']):<10}"
            f"{row['value']!s:>12}"
            f"{format_value(row['snri_db']):>14}"
            f"{format_count(row['samples_to_converge']):>12}"
            f"{('да' if row['diverged'] else 'нет'):>10}"
        )
    lines.append("=" * width)
    return "\n".join(lines)


def format_oracle_report(deviations: Dict[str, Dict[str, float]]) -> str:
    """Отчет проверки эталонов: максимальное отклонение и допуск по каждому набору"""
    header = f"{'Набор':<28}{'Макс. откл.':>14}{'Допуск':>12}{'Итог':>8}"
    width = len(header)
    lines = ["=" * width, "СВЕРКА С ЭТАЛОННЫМИ РЕАЛИЗАЦИЯМИ", "=" * width, header, "-" * width]
    for name, item in deviations.items():
        ok = item['deviation'] <= item['tolerance']
        lines.append(f"{name:<28}{item['deviation']:>14.3e}{item['tolerance']:>12.1e}{('OK' if ok else 'FAIL'):>8}")
    lines.append("=" * width)
    return "\n".join(lines)
