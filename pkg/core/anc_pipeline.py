# ===== СЕКЦИЯ 4: СХЕМА АДАПТИВНОГО ШУМОПОДАВЛЕНИЯ =====
"""
Схема с двумя микрофонами: основной вход d = s + n0, опорный вход n1,
n0 - n1 после неизвестного КИХ-канала w_e. Фильтр оценивает n0 по n1,
выход системы e = d - y - очищенный сигнал.

Модуль содержит синтетический генератор сценариев (речеподобный сигнал,
белый / окрашенный / «многоголосый» шум) и прогон фильтра с расчетом
кривой обучения, ОСШ и улучшения ОСШ.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.signal import lfilter, lfiltic

from config.settings import NOISE_ALIASES, NOISE_KINDS
from core.filters_classic import AdaptiveFilter
from utils.analytics import SNR_WINDOW_FRACTION, convergence_time, learning_curve, snr_db, steady_state_snr
from utils.error_handler import DegenerateSnr, InvalidConfig, NumericalDivergence

logger = logging.getLogger(__name__)


# Параметры речеподобного сигнала
SEGMENT_SECONDS = 0.02
RESONANCE_HZ = (250.0, 2500.0)
POLE_RADIUS = (0.85, 0.93)
PITCH_HZ = (100.0, 220.0)
PITCH_DEPTH = 0.5
COLORED_POLE = 0.9
BABBLE_TALKERS = 6
MIN_LEADING_TAP = 0.1


def _as_samples(values: Any, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name}: ряд содержит нечисловые значения")
    return arr


@dataclass
class AncScenario:
    """
    Сценарий шумоподавления

    s и n0 известны только для синтетических сценариев и тройки записей с
    чистым сигналом; для пары записей (основная + опорная) они равны None.
    """
    d: np.ndarray
    n1: np.ndarray
    s: Optional[np.ndarray] = None
    n0: Optional[np.ndarray] = None
    w_e: Optional[np.ndarray] = None
    sample_rate: int = 8000
    source: str = 'synthetic'

    def __post_init__(self):
        self.validate()

    @property
    def length(self) -> int:
        return int(self.d.size)

    def validate(self) -> 'AncScenario':
        """Все ряды одинаковой длины"""
        n = self.d.size
        if self.n1.size != n:
            raise InvalidConfig(f"Длины основного ({n}) и опорного ({self.n1.size}) входов различаются")
        for name in ('s', 'n0'):
            stream = getattr(self, name)
            if stream is not None and stream.size != n:
                raise InvalidConfig(f"Длина ряда {name} ({stream.size}) не совпадает с длиной основного входа ({n})")
        if self.sample_rate < 1:
            raise InvalidConfig(f"sample_rate должен быть положительным: {self.sample_rate}")
        return self

    @classmethod
    def from_components(cls, clean: Any, reference: Any, channel: Any,
                        sample_rate: int = 8000, source: str = 'components') -> 'AncScenario':
        """Сборка сценария: n0 = w_e * n1 (нулевые начальные условия), d = s + n0"""
        s = _as_samples(clean, 'clean')
        n1 = _as_samples(reference, 'reference')
        w_e = _as_samples(channel, 'channel')
        if w_e.size < 1:
            raise InvalidConfig("Канал должен содержать хотя бы один коэффициент")
        if s.size != n1.size:
            raise InvalidConfig(f"Длины чистого сигнала ({s.size}) и опорного шума ({n1.size}) различаются")
        n0 = lfilter(w_e, [1.0], n1)
        return cls(d=s + n0, n1=n1, s=s, n0=n0, w_e=w_e, sample_rate=sample_rate, source=source)

    @classmethod
    def from_recordings(cls, primary: Any, reference: Any, clean: Any = None,
                        sample_rate: int = 8000, source: str = 'wav') -> 'AncScenario':
        """Сценарий из записей; без чистого сигнала ОСШ выхода недоступно"""
        d = _as_samples(primary, 'primary')
        n1 = _as_samples(reference, 'reference')
        s = None if clean is None else _as_samples(clean, 'clean')
        n0 = None if s is None or s.size != d.size else d - s
        return cls(d=d, n1=n1, s=s, n0=n0, sample_rate=sample_rate, source=source)

    def scaled(self, gain: float) -> 'AncScenario':
        """Копия сценария со всеми рядами, умноженными на gain (канал не меняется)"""
        def mul(x):
            return None if x is None else x * gain
        return AncScenario(d=self.d * gain, n1=self.n1 * gain, s=mul(self.s), n0=mul(self.n0),
                           w_e=None if self.w_e is None else self.w_e.copy(),
                           sample_rate=self.sample_rate, source=self.source)

    def copy(self) -> 'AncScenario':
        return self.scaled(1.0)

    def input_snr_db(self) -> Optional[float]:
        """ОСШ основного входа по всей длине (None без чистого сигнала)"""
        if self.s is None:
            return None
        return snr_db(self.s, self.d - self.s)


@dataclass
class LearningCurve:
    """Кривая обучения: квадрат ошибки и его скользящее среднее"""
    mse: np.ndarray
    smoothed: np.ndarray
    window: int = 128

    def __len__(self) -> int:
        return int(self.mse.size)


@dataclass
class AncResult:
    """Результат прогона фильтра по сценарию"""
    e: np.ndarray
    y: np.ndarray
    curve: LearningCurve
    algo: str = ''
    params: Dict[str, Any] = field(default_factory=dict)
    snr_in: Optional[float] = None
    snr_out: Optional[float] = None
    snri: Optional[float] = None
    snr_capped: bool = False
    diverged: bool = False
    divergence_index: Optional[int] = None
    samples_to_converge: Optional[int] = None
    update_log: Optional[List[Any]] = None
    sample_rate: int = 8000
    source: str = 'synthetic'

    @property
    def samples(self) -> int:
        return int(self.e.size)

    def summary(self) -> Dict[str, Any]:
        """Сводка для JSON (фиксированный набор ключей, кроме clipped_samples)"""
        return {
            'algo': self.algo,
            'parameters': dict(self.params),
            'samples': self.samples,
            'sample_rate': self.sample_rate,
            'snr_in_db': self.snr_in,
            'snr_out_db': self.snr_out,
            'snri_db': self.snri,
            'snr_capped': self.snr_capped,
            'diverged': self.diverged,
            'divergence_index': self.divergence_index,
            'samples_to_converge': self.samples_to_converge,
            'source': self.source,
        }


# ----- синтетические сигналы -----

def _ar2_coefficients(resonance_hz: float, radius: float, sample_rate: int) -> Tuple[np.ndarray, float]:
    """Знаменатель AR(2) резонатора и усиление возбуждения для единичной дисперсии выхода"""
    a1 = -2.0 * radius * np.cos(2.0 * np.pi * resonance_hz / sample_rate)
    a2 = radius * radius
    # стационарная дисперсия AR(2) при единичном возбуждении
    variance = (1.0 + a2) / ((1.0 - a2) * ((1.0 + a2) ** 2 - a1 ** 2))
    return np.array([1.0, a1, a2]), 1.0 / np.sqrt(variance)


def speech_like(rng: np.random.Generator, length: int, sample_rate: int = 8000) -> np.ndarray:
    """
    Речеподобный сигнал: сегменты по 20 мс, в каждом AR(2) резонатор со
    случайной частотой и радиусом полюса, затем амплитудная модуляция с
    частотой основного тона, дрейфующей в диапазоне PITCH_HZ
    """
    nyquist_guard = 0.45 * sample_rate
    seg = max(1, int(round(SEGMENT_SECONDS * sample_rate)))
    carrier = np.empty(length, dtype=np.float64)
    history = np.zeros(2)

    pitch = rng.uniform(*PITCH_HZ)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    envelope = np.empty(length, dtype=np.float64)

    for start in range(0, length, seg):
        n = min(seg, length - start)
        resonance = min(rng.uniform(*RESONANCE_HZ), nyquist_guard)
        radius = rng.uniform(*POLE_RADIUS)
        a, gain = _ar2_coefficients(resonance, radius, sample_rate)

        # продолжение рекурсии AR(2) с новыми коэффициентами
        zi = lfiltic([1.0], a, y=history[::-1] if start else [0.0, 0.0])
        excitation = gain * rng.standard_normal(n)
        out, _ = lfilter([1.0], a, excitation, zi=zi)
        carrier[start:start + n] = out
        if n >= 2:
            history = out[-2:].copy()
        else:
            history = np.array([history[1], out[-1]])

        pitch = float(np.clip(pitch + rng.normal(0.0, 5.0), *PITCH_HZ))
        phases = phase + 2.0 * np.pi * pitch / sample_rate * np.arange(1, n + 1)
        envelope[start:start + n] = 1.0 + PITCH_DEPTH * np.sin(phases)
        phase = float(phases[-1] % (2.0 * np.pi))

    return carrier * envelope


def noise_source(rng: np.random.Generator, kind: str, length: int, sample_rate: int = 8000) -> np.ndarray:
    """Шум источника: white - гауссов, colored - AR(1) с полюсом 0.9, babble - сумма речеподобных"""
    kind = NOISE_ALIASES.get(kind, kind)
    if kind == 'white':
        return rng.standard_normal(length)
    if kind == 'colored':
        return lfilter([1.0], [1.0, -COLORED_POLE], rng.standard_normal(length))
    if kind == 'babble':
        return sum(speech_like(rng, length, sample_rate) for _ in range(BABBLE_TALKERS))
    raise InvalidConfig(f"noise_kind: ожидается один из {NOISE_KINDS}, получено {kind!r}")


def random_channel(rng: np.random.Generator, order: int) -> np.ndarray:
    """
    Неизвестный канал: гауссовы коэффициенты с экспоненциально спадающей
    огибающей, единичная l2-норма, |w_e(0)| >= MIN_LEADING_TAP
    """
    envelope = np.exp(-np.arange(order) / max(1.0, order / 3.0))
    for _ in range(100):
        taps = rng.standard_normal(order) * envelope
        norm = np.linalg.norm(taps)
        if norm > 0 and abs(taps[0]) / norm >= MIN_LEADING_TAP:
            return taps / norm
    taps = envelope.copy()
    return taps / np.linalg.norm(taps)


def synth_scenario(seed: int = 1, length: int = 30000, channel_order: int = 8, snr_db_target: float = -10.0,
                   noise_kind: str = 'colored', sample_rate: int = 8000,
                   reference_rms: float = 0.4) -> AncScenario:
    """
    Детерминированный синтетический сценарий

    Parameters:
    -----------
    seed : int
        Начальное значение генератора; все случайные величины выводятся из него
    length : int
        Число отсчетов (> channel_order)
    channel_order : int
        Число коэффициентов неизвестного канала
    snr_db_target : float
        ОСШ основного входа относительно чистого сигнала, дБ
    noise_kind : str
        'white', 'colored', 'babble' (или синоним 'babble-like')
    sample_rate : int
        Частота дискретизации, Гц
    reference_rms : float
        СКЗ опорного шума n1; вместе с mu задает скорость LMS

    Returns:
    --------
    AncScenario
    """
    if channel_order < 1:
        raise InvalidConfig(f"channel_order должен быть >= 1: {channel_order}")
    if length <= channel_order:
        raise InvalidConfig(f"length ({length}) должен превышать channel_order ({channel_order})")
    if noise_kind not in NOISE_KINDS:
        raise InvalidConfig(f"noise_kind: ожидается один из {NOISE_KINDS}, получено {noise_kind!r}")
    if not reference_rms > 0:
        raise InvalidConfig(f"reference_rms должен быть > 0: {reference_rms}")
    noise_kind = NOISE_ALIASES.get(noise_kind, noise_kind)

    rng = np.random.default_rng(seed)
    w_e = random_channel(rng, channel_order)

    n1 = noise_source(rng, noise_kind, length, sample_rate)
    n1 = n1 * (reference_rms / np.sqrt(np.mean(n1 * n1)))
    n0 = lfilter(w_e, [1.0], n1)

    s = speech_like(rng, length, sample_rate)
    noise_power = float(n0 @ n0)
    signal_power = float(s @ s)
    s = s * np.sqrt(noise_power * 10.0 ** (snr_db_target / 10.0) / signal_power)

    scenario = AncScenario(d=s + n0, n1=n1, s=s, n0=n0, w_e=w_e, sample_rate=sample_rate,
                           source=f'synthetic:{noise_kind}:seed={seed}')
    logger.debug(f"Сценарий seed={seed}: {length} отсчетов, шум {noise_kind}, "
                 f"ОСШ входа {scenario.input_snr_db():.4f} дБ")
    return scenario


# ----- прогон фильтра -----

def run_anc(scenario: AncScenario, filt: AdaptiveFilter, record_updates: bool = False,
            steady_fraction: float = SNR_WINDOW_FRACTION, smoothing_window: int = 128,
            convergence_window: int = 1024, band_db: float = 3.0) -> AncResult:
    """
    Прогон фильтра: x = n1(t), d = d(t) для каждого отсчета

    При расходимости прогон обрезается по отсчету, на котором она обнаружена;
    ОСШ и время сходимости для такого прогона не определяются.

    Parameters:
    -----------
    scenario : AncScenario
        Входные ряды
    filt : AdaptiveFilter
        Фильтр (состояние изменяется)
    record_updates : bool
        Сохранять ли журнал обновлений (только FAP)
    steady_fraction : float
        Доля последних отсчетов для расчета ОСШ (1.0 - весь прогон)
    smoothing_window : int
        Окно сглаживания кривой обучения
    convergence_window : int
        Окно сглаживания для времени сходимости
    band_db : float
        Полоса вокруг финального уровня MSE для времени сходимости

    Returns:
    --------
    AncResult
    """
    scenario.validate()
    n = scenario.length
    if filt.order > n:
        raise InvalidConfig(f"Порядок фильтра ({filt.order}) превышает длину сценария ({n})")

    e = np.zeros(n, dtype=np.float64)
    y = np.zeros(n, dtype=np.float64)
    update_log: Optional[List[Any]] = [] if record_updates else None
    diverged = False
    divergence_index = None
    count = n

    x_samples = scenario.n1.tolist()
    d_samples = scenario.d.tolist()
    with np.errstate(all='ignore'):
        for t in range(n):
            try:
                out = filt.step(x_samples[t], d_samples[t])
            except NumericalDivergence as exc:
                diverged = True
                divergence_index = t if exc.sample_index is None else int(exc.sample_index)
                count = t
                break
            e[t] = out.e
            y[t] = out.y
            if update_log is not None:
                update_log.extend(out.records)

    e, y = e[:count], y[:count]
    mse, smoothed = learning_curve(e, smoothing_window)
    result = AncResult(e=e, y=y, curve=LearningCurve(mse, smoothed, smoothing_window),
                       algo=filt.name, params=filt.params(), diverged=diverged,
                       divergence_index=divergence_index, update_log=update_log,
                       sample_rate=scenario.sample_rate, source=scenario.source)

    if diverged:
        logger.warning(f"{filt.name}: расходимость на отсчете {divergence_index}, прогон обрезан")
        return result

    result.samples_to_converge = convergence_time(mse, convergence_window, band_db)
    if scenario.s is not None and count > 0:
        figures = steady_state_snr(scenario.s[:count], scenario.d[:count], e, steady_fraction)
        result.snr_in = figures['snr_in_db']
        result.snr_out = figures['snr_out_db']
        result.snri = figures['snri_db']
        result.snr_capped = figures['snr_capped']
        if result.snri is None:
            logger.warning(f"{filt.name}: ОСШ не определено (нулевая мощность сигнала)")
    elif scenario.s is None:
        logger.warning(f"{filt.name}: чистый сигнал не задан, ОСШ выхода недоступно")

    snri_text = 'н/д' if result.snri is None else f"{result.snri:.4f} дБ"
    logger.info(f"{filt.name}: {count} отсчетов, SNRI {snri_text}, сходимость {result.samples_to_converge}")
    return result


def snri_db(result: AncResult) -> float:
    """
    Улучшение ОСШ: snr_out - snr_in по окну ОСШ (по умолчанию весь прогон)

    Raises:
    -------
    NumericalDivergence
        Прогон завершился расходимостью
    DegenerateSnr
        ОСШ не определено (нет чистого сигнала или нулевая мощность сигнала)
    """
    if result.diverged:
        raise NumericalDivergence(f"{result.algo}: прогон расходится, SNRI не определено",
                                  sample_index=result.divergence_index)
    if result.snri is None:
        raise DegenerateSnr(f"{result.algo}: ОСШ не определено", reason='signal')
    return float(result.snri)
