# ===== СЕКЦИЯ 5: АНАЛИТИКА И МЕТРИКИ ШУМОПОДАВЛЕНИЯ =====
"""
Модуль аналитических функций: ОСШ, улучшение ОСШ, кривая обучения
и время сходимости адаптивного фильтра
"""

import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from utils.error_handler import DegenerateSnr, InvalidConfig

logger = logging.getLogger(__name__)

# Ограничение ОСШ при идеальном подавлении (нулевой остаточный шум)
SNR_CAP_DB = 150.0

# Доля прогона в окне ОСШ по умолчанию: весь прогон
SNR_WINDOW_FRACTION = 1.0


def _power(values: np.ndarray) -> float:
    values = np.asarray(values, dtype=np.float64)
    return float(values @ values)


def snr_db(signal: np.ndarray, noise: np.ndarray) -> float:
    """
    Отношение сигнал/шум в дБ: 10*log10(sum(signal^2) / sum(noise^2))

    Raises:
    -------
    InvalidConfig
        Если длины рядов различаются
    DegenerateSnr
        При нулевой мощности шума (reason='noise') или сигнала (reason='signal')
    """
    signal = np.asarray(signal, dtype=np.float64)
    noise = np.asarray(noise, dtype=np.float64)
    if signal.shape != noise.shape:
        raise InvalidConfig(f"snr_db: длины сигнала и шума различаются ({signal.size} != {noise.size})")

    noise_power = _power(noise)
    if noise_power == 0.0:
        raise DegenerateSnr("Нулевая мощность шума: ОСШ не ограничено", reason='noise')
    signal_power = _power(signal)
    if signal_power == 0.0:
        raise DegenerateSnr("Нулевая мощность сигнала: ОСШ не определено", reason='signal')
    return float(10.0 * np.log10(signal_power / noise_power))


def capped_snr_db(signal: np.ndarray, noise: np.ndarray) -> Tuple[Optional[float], bool]:
    """
    ОСШ с обработкой вырожденных случаев

    Returns:
    --------
    tuple
        (значение или None при нулевой мощности сигнала, флаг ограничения SNR_CAP_DB)
    """
    try:
        return snr_db(signal, noise), False
    except DegenerateSnr as e:
        if e.reason == 'noise':
            return SNR_CAP_DB, True
        return None, False


def steady_state_start(length: int, fraction: float = SNR_WINDOW_FRACTION) -> int:
    """Начало окна ОСШ: последние fraction*length отсчетов"""
    if length <= 0:
        return 0
    span = max(1, int(np.ceil(length * fraction)))
    return max(0, length - span)


def steady_state_snr(clean: np.ndarray, primary: np.ndarray, output: np.ndarray,
                     fraction: float = SNR_WINDOW_FRACTION) -> Dict[str, Any]:
    """
    ОСШ на входе и выходе по последним fraction*n отсчетам (по умолчанию весь прогон)

    Шум входа - primary - clean, остаточный шум выхода - output - clean.

    Returns:
    --------
    dict
        snr_in_db, snr_out_db, snri_db (None, если не определены) и snr_capped
    """
    clean = np.asarray(clean, dtype=np.float64)
    primary = np.asarray(primary, dtype=np.float64)
    output = np.asarray(output, dtype=np.float64)
    n = min(clean.size, primary.size, output.size)
    start = steady_state_start(n, fraction)

    s = clean[start:n]
    snr_in, capped_in = capped_snr_db(s, primary[start:n] - s)
    snr_out, capped_out = capped_snr_db(s, output[start:n] - s)

    snri = None
    if snr_in is not None and snr_out is not None:
        snri = snr_out - snr_in

    return {
        'snr_in_db': snr_in,
        'snr_out_db': snr_out,
        'snri_db': snri,
        'snr_capped': bool(capped_in or capped_out),
    }


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """
    Скользящее среднее с частичными окнами в начале ряда

    Длина результата равна длине входа; отрицательные значения округления
    отсекаются, чтобы сглаженная MSE оставалась неотрицательной.
    """
    if window < 1:
        raise InvalidConfig(f"Окно сглаживания должно быть положительным: {window}")
    series = pd.Series(np.asarray(values, dtype=np.float64))
    smoothed = series.rolling(window=window, min_periods=1).mean()
    return smoothed.clip(lower=0.0).to_numpy()


def learning_curve(error: np.ndarray, window: int = 128) -> Tuple[np.ndarray, np.ndarray]:
    """Кривая обучения: поотсчетный квадрат ошибки и его скользящее среднее"""
    e = np.asarray(error, dtype=np.float64)
    mse = e * e
    return mse, moving_average(mse, window)


def convergence_time(mse: np.ndarray, window: int = 1024, band_db: float = 3.0) -> Optional[int]:
    """
    Время сходимости по кривой обучения

    Кривая сглаживается окном window; уровень F - среднее сглаженной кривой
    по последней четверти отсчетов. Результат - первый индекс, после которого
    сглаженная кривая ни разу не превышает F * 10^(band_db/10).
    Кривая, ни разу не поднимавшаяся над порогом, не показывает спада:
    фильтр не сошелся, результат None.

    Parameters:
    -----------
    mse : np.ndarray
        Поотсчетный квадрат ошибки
    window : int
        Окно сглаживания
    band_db : float
        Допустимое превышение над финальным уровнем, дБ

    Returns:
    --------
    int or None
        Индекс отсчета или None, если спада к полосе нет
    """
    mse = np.asarray(mse, dtype=np.float64)
    n = mse.size
    if n == 0 or not np.all(np.isfinite(mse)):
        return None

    smoothed = moving_average(mse, window)
    tail = max(1, n // 4)
    final_level = float(smoothed[-tail:].mean())
    threshold = final_level * 10.0 ** (band_db / 10.0)

    above = np.flatnonzero(smoothed > threshold)
    if above.size == 0:
        return None
    index = int(above[-1]) + 1
    return index if index < n else None


def decomposition_cross_ratio(clean: np.ndarray, primary_noise: np.ndarray,
                              filter_output: np.ndarray) -> float:
    """
    Нормированный перекрестный член разложения E[e^2] = E[s^2] + E[(n0 - y)^2]

    |<s, n0 - y>| / (||s||^2 + ||n0 - y||^2); 0 для нулевых рядов.
    """
    s = np.asarray(clean, dtype=np.float64)
    residual = np.asarray(primary_noise, dtype=np.float64) - np.asarray(filter_output, dtype=np.float64)
    denom = _power(s) + _power(residual)
    if denom == 0.0:
        return 0.0
    return float(abs(s @ residual) / denom)
