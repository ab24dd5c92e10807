# ===== СЕКЦИЯ 2: КЛАССИЧЕСКИЕ АДАПТИВНЫЕ ФИЛЬТРЫ (LMS, NLMS, RLS) =====
"""
Поотсчетные адаптивные КИХ-фильтры и общий интерфейс фильтра

Все фильтры возвращают априорную ошибку e = d - h^T x(n), вычисленную
до обновления коэффициентов текущего отсчета. Начальные коэффициенты h(0) = 0.
"""

import copy
from abc import ABC, abstractmethod
from typing import Any, Dict, NamedTuple, Sequence, Tuple

import numpy as np

from core.signal_core import DelayLine
from utils.error_handler import InvalidConfig, NumericalDivergence, DenominatorUnderflow

# Порог знаменателя коэффициента усиления RLS
RLS_DENOMINATOR_FLOOR = 1e-300


class StepOutput(NamedTuple):
    """Результат одного шага фильтра"""
    e: float
    y: float
    records: Tuple[Any, ...] = ()


class AdaptiveFilter(ABC):
    """Общий интерфейс фильтров, используемый схемой шумоподавления"""

    name = 'base'

    def __init__(self, order: int, history: int = 0):
        if order < 1:
            raise InvalidConfig(f"Порядок фильтра должен быть положительным: {order}")
        self.order = int(order)
        self.taps = np.zeros(self.order, dtype=np.float64)
        self.x_line = DelayLine(max(self.order, history))
        self.samples_seen = 0

    @property
    def regressor(self) -> np.ndarray:
        """Текущий регрессор x(n) = [x(n), ..., x(n-M+1)]"""
        return self.x_line.window(0, self.order)

    @abstractmethod
    def step(self, x_new: float, d_new: float) -> StepOutput:
        """Один отсчет: запись x(n), расчет выхода и ошибки, обновление h"""

    @abstractmethod
    def params(self) -> Dict[str, Any]:
        """Параметры фильтра для сводки"""

    def clone(self) -> 'AdaptiveFilter':
        return copy.deepcopy(self)

    def _check_finite(self, *arrays: np.ndarray) -> None:
        for arr in arrays:
            if not np.all(np.isfinite(arr)):
                raise NumericalDivergence(
                    f"{self.name}: нечисловое состояние фильтра на отсчете {self.samples_seen}",
                    sample_index=self.samples_seen)


class LmsFilter(AdaptiveFilter):
    """LMS: h <- h + mu * x(n) * e(n)"""

    name = 'lms'

    def __init__(self, order: int = 8, mu: float = 0.002):
        super().__init__(order)
        if not mu > 0:
            raise InvalidConfig(f"mu должен быть > 0: {mu}")
        self.mu = float(mu)

    def step(self, x_new: float, d_new: float) -> StepOutput:
        self.x_line.push(x_new)
        x = self.x_line.buffer[:self.order]
        y = float(self.taps @ x)
        e = d_new - y
        self.taps += (self.mu * e) * x
        self._check_finite(self.taps)
        self.samples_seen += 1
        return StepOutput(e, y)

    def params(self) -> Dict[str, Any]:
        return {'algo': self.name, 'M': self.order, 'mu': self.mu}


class NlmsFilter(AdaptiveFilter):
    """NLMS: h <- h + mu / (||x(n)||^2 + eps) * x(n) * e(n)"""

    name = 'nlms'

    def __init__(self, order: int = 8, mu: float = 0.005, epsilon: float = 1e-8):
        super().__init__(order)
        if not mu > 0:
            raise InvalidConfig(f"mu должен быть > 0: {mu}")
        if not epsilon >= 0:
            raise InvalidConfig(f"epsilon должен быть >= 0: {epsilon}")
        self.mu = float(mu)
        self.epsilon = float(epsilon)

    def step(self, x_new: float, d_new: float) -> StepOutput:
        self.x_line.push(x_new)
        x = self.x_line.buffer[:self.order]
        y = float(self.taps @ x)
        e = d_new - y
        denom = float(x @ x) + self.epsilon
        # нулевой регрессор при eps = 0: обновление пропускается
        if denom > 0.0:
            self.taps += (self.mu * e / denom) * x
            self._check_finite(self.taps)
        self.samples_seen += 1
        return StepOutput(e, y)

    def params(self) -> Dict[str, Any]:
        return {'algo': self.name, 'M': self.order, 'mu': self.mu, 'epsilon': self.epsilon}


class RlsFilter(AdaptiveFilter):
    """
    RLS с экспоненциальным забыванием

    p_matrix хранит обратную матрицу C^-1(n), C(n) = lambda*C(n-1) + x x^T,
    C(-1) = delta*I. Обновление по лемме об обращении матрицы, после каждого
    шага p_matrix симметризуется.
    """

    name = 'rls'

    def __init__(self, order: int = 8, lam: float = 0.99, delta: float = 0.01):
        super().__init__(order)
        if not 0.0 < lam <= 1.0:
            raise InvalidConfig(f"lambda out of range (0, 1]: {lam}")
        if not delta > 0:
            raise InvalidConfig(f"delta должен быть > 0: {delta}")
        self.lam = float(lam)
        self.delta = float(delta)
        self.p_matrix = np.eye(self.order, dtype=np.float64) / self.delta

    def step(self, x_new: float, d_new: float) -> StepOutput:
        self.x_line.push(x_new)
        x = self.x_line.buffer[:self.order]
        y = float(self.taps @ x)
        e = d_new - y

        P = self.p_matrix
        Px = P @ x
        denom = self.lam + float(x @ Px)
        if not denom >= RLS_DENOMINATOR_FLOOR:
            if np.isfinite(denom):
                raise DenominatorUnderflow(
                    f"rls: знаменатель усиления {denom:.3e} на отсчете {self.samples_seen}",
                    sample_index=self.samples_seen)
            raise NumericalDivergence(
                f"rls: нечисловой знаменатель усиления на отсчете {self.samples_seen}",
                sample_index=self.samples_seen)

        gain = Px / denom
        self.taps += gain * e
        P = (P - np.outer(gain, Px)) / self.lam
        self.p_matrix = 0.5 * (P + P.T)

        self._check_finite(self.taps, self.p_matrix)
        self.samples_seen += 1
        return StepOutput(e, y)

    def params(self) -> Dict[str, Any]:
        return {'algo': self.name, 'M': self.order, 'lambda': self.lam, 'delta': self.delta}


def lms_step(state: LmsFilter, x_new: float, d_new: float) -> StepOutput:
    return state.step(x_new, d_new)


def nlms_step(state: NlmsFilter, x_new: float, d_new: float) -> StepOutput:
    return state.step(x_new, d_new)


def rls_step(state: RlsFilter, x_new: float, d_new: float) -> StepOutput:
    return state.step(x_new, d_new)


def rls_inverse_oracle(regressors: Sequence[np.ndarray], lam: float, delta: float) -> np.ndarray:
    """
    Прямое обращение взвешенной автокорреляционной матрицы

    C = lambda^N * delta * I + sum_i lambda^(N-1-i) x(i) x(i)^T
    для N = len(regressors); результат должен совпадать с p_matrix RLS
    после N шагов на тех же регрессорах.
    """
    regs = np.asarray(regressors, dtype=np.float64)
    n, order = regs.shape
    weights = lam ** np.arange(n - 1, -1, -1, dtype=np.float64)
    C = (lam ** n) * delta * np.eye(order) + (regs * weights[:, None]).T @ regs
    return np.linalg.inv(C)


def make_filter(config: Any) -> AdaptiveFilter:
    """
    Создание фильтра по конфигурации запуска

    Parameters:
    -----------
    config : RunConfig
        Конфигурация; шаг адаптации берется из resolved_mu()

    Returns:
    --------
    AdaptiveFilter
        Новый фильтр с нулевыми коэффициентами
    """
    from core.filter_fap import FapFilter

    algo = config.algo
    if algo == 'lms':
        return LmsFilter(config.order, mu=config.resolved_mu())
    if algo == 'nlms':
        return NlmsFilter(config.order, mu=config.resolved_mu(), epsilon=config.epsilon)
    if algo == 'rls':
        return RlsFilter(config.order, lam=config.lam, delta=config.delta)
    if algo == 'fap':
        return FapFilter(config.order, mu=config.resolved_mu(), window=config.window,
                         iterations=config.iterations, selection_norm=config.selection_norm,
                         norm_floor=config.norm_floor, rebuild_every=config.rebuild_every)
    raise InvalidConfig(f"algo: неизвестный алгоритм {algo!r}")
