# ===== СЕКЦИЯ 3: БЫСТРАЯ АФФИННАЯ ПРОЕКЦИЯ НА ОСНОВЕ MATCHING PURSUIT =====
"""
Фильтр MP-FAP: на каждом отсчете P итераций жадного выбора одного
коэффициента (столбца окна X(n)) и его масштабированного обновления.

Быстрый путь работает только в M-мерном пространстве скалярных
произведений: невязка e_i(n) длины L никогда не строится явно, вместо нее
хранится rho(j) = <e_i(n), x_j(n)> = cross(j) - sum_k h_k gram(k, j).
NaiveFapFilter строит X(n) и e_i(n) явно и служит эталоном.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from config.settings import SELECTION_NORMS
from core.filters_classic import AdaptiveFilter, StepOutput
from core.signal_core import DelayLine, InnerProductCache, build_data_matrix
from utils.error_handler import InvalidConfig, NoEligibleColumn


@dataclass(frozen=True)
class UpdateRecord:
    """Одно обновление коэффициента: индекс, величина до умножения на mu, номер итерации"""
    index: int
    value: float
    iteration: int
    sample: int = -1


class FapFilter(AdaptiveFilter):
    """
    MP-FAP фильтр

    Parameters:
    -----------
    order : int
        Число коэффициентов M
    mu : float
        Шаг адаптации (> 0)
    window : int
        Длина окна L (> M)
    iterations : int
        Число итераций P на отсчет (>= 1)
    selection_norm : str
        'norm' - выбор по |rho| / ||x_j||, 'norm_squared' - по |rho| / ||x_j||^2
    norm_floor : float
        Столбцы с ||x_j||^2 <= norm_floor не участвуют в выборе
    rebuild_every : int
        Период полного пересчета кэша (0 - никогда)
    """

    name = 'fap'

    def __init__(self, order: int = 8, mu: float = 0.002, window: int = 25, iterations: int = 8,
                 selection_norm: str = 'norm', norm_floor: float = 1e-12, rebuild_every: int = 0):
        if window <= order:
            raise InvalidConfig(f"L out of range: требуется L > M, получено L={window}, M={order}")
        # x_line читает задержки до M+L-1, d_line - до L (вычитаемый член рекурсии)
        super().__init__(order, history=order + window)
        if not mu > 0:
            raise InvalidConfig(f"mu должен быть > 0: {mu}")
        if iterations < 1:
            raise InvalidConfig(f"P out of range: требуется P >= 1, получено {iterations}")
        if selection_norm not in SELECTION_NORMS:
            raise InvalidConfig(f"selection_norm: ожидается один из {SELECTION_NORMS}")
        if norm_floor < 0:
            raise InvalidConfig(f"norm_floor должен быть >= 0: {norm_floor}")
        if rebuild_every < 0:
            raise InvalidConfig(f"rebuild_every должен быть >= 0: {rebuild_every}")

        self.mu = float(mu)
        self.window = int(window)
        self.iterations = int(iterations)
        self.selection_norm = selection_norm
        self.norm_floor = float(norm_floor)
        self.rebuild_every = int(rebuild_every)

        self.d_line = DelayLine(self.window + 1)
        self.cache = InnerProductCache(self.order, self.window)
        self.residual_cross = np.zeros(self.order, dtype=np.float64)
        self.last_records: Tuple[UpdateRecord, ...] = ()
        self._scale = np.zeros(self.order, dtype=np.float64)

    # ----- этапы одного отсчета -----

    def refresh(self, x_new: float, d_new: float) -> 'FapFilter':
        """Запись отсчетов, шаг рекурсий кэша и начальная невязка итерации 0"""
        self.x_line.push(x_new)
        self.d_line.push(d_new)
        self.cache.step(self.x_line, self.d_line)
        if self.rebuild_every and (self.samples_seen + 1) % self.rebuild_every == 0:
            self.cache.rebuild(self.x_line, self.d_line)

        gram = self.cache.gram
        self.residual_cross = self.cache.cross - gram @ self.taps

        # масштаб выбора не меняется в пределах отсчета
        norms = np.diagonal(gram)
        eligible = norms > self.norm_floor
        scale = np.full(self.order, -1.0)
        if self.selection_norm == 'norm':
            scale[eligible] = 1.0 / np.sqrt(norms[eligible])
        else:
            scale[eligible] = 1.0 / norms[eligible]
        self._scale = scale
        return self

    def select(self, iteration: int = 0) -> UpdateRecord:
        """
        Выбор столбца с максимальной нормированной проекцией невязки

        Raises:
        -------
        NoEligibleColumn
            Если норма каждого столбца не превышает norm_floor
        """
        scale = self._scale
        if not np.any(scale > 0):
            raise NoEligibleColumn(f"fap: нет столбцов с нормой выше {self.norm_floor} на отсчете {self.samples_seen}")
        rho = self.residual_cross
        score = np.where(scale > 0, np.abs(rho) * scale, -1.0)
        # argmax возвращает первый максимум - при равенстве выигрывает меньший индекс
        j = int(np.argmax(score))
        value = float(rho[j] / self.cache.gram[j, j])
        return UpdateRecord(index=j, value=value, iteration=iteration, sample=self.samples_seen)

    def apply(self, record: UpdateRecord) -> 'FapFilter':
        """h_j += mu * value; невязка обновляется в пространстве скалярных произведений"""
        if record.value == 0.0:
            return self
        delta = self.mu * record.value
        self.taps[record.index] += delta
        self.residual_cross -= delta * self.cache.gram[record.index]
        self._check_finite(self.taps)
        return self

    def step(self, x_new: float, d_new: float) -> StepOutput:
        self.refresh(x_new, d_new)
        y = float(self.taps @ self.x_line.buffer[:self.order])
        e = d_new - y

        records: List[UpdateRecord] = []
        for i in range(self.iterations):
            try:
                record = self.select(i)
            except NoEligibleColumn:
                break
            self.apply(record)
            records.append(record)

        self.last_records = tuple(records)
        self.samples_seen += 1
        return StepOutput(e, y, self.last_records)

    def params(self) -> Dict[str, Any]:
        return {
            'algo': self.name, 'M': self.order, 'mu': self.mu, 'L': self.window,
            'P': self.iterations, 'selection_norm': self.selection_norm,
            'norm_floor': self.norm_floor, 'rebuild_every': self.rebuild_every,
        }


def fap_refresh(state: FapFilter, x_new: float, d_new: float) -> FapFilter:
    return state.refresh(x_new, d_new)


def fap_select(state: FapFilter, iteration: int = 0) -> UpdateRecord:
    return state.select(iteration)


def fap_apply(state: FapFilter, record: UpdateRecord) -> FapFilter:
    return state.apply(record)


def fap_step(state: FapFilter, x_new: float, d_new: float) -> StepOutput:
    return state.step(x_new, d_new)


def materialized_residual_cross(state: FapFilter) -> np.ndarray:
    """X(n)^T (d(n) - X(n) h) прямым расчетом по линиям задержки"""
    X = build_data_matrix(state.x_line, state.order, state.window)
    d = state.d_line.window(0, state.window)
    return X.T @ (d - X @ state.taps)


def materialized_residual(state: FapFilter) -> np.ndarray:
    """Явная невязка e(n) = d(n) - X(n) h длины L"""
    X = build_data_matrix(state.x_line, state.order, state.window)
    d = state.d_line.window(0, state.window)
    return d - X @ state.taps


class NaiveFapFilter(AdaptiveFilter):
    """
    Эталонная реализация: X(n), d(n) и e_i(n) строятся явно на каждом отсчете

    Правила выбора, порога нормы и разрешения равенств совпадают с FapFilter.
    Только для проверок - сложность O(L*M) на итерацию.
    """

    name = 'fap-naive'

    def __init__(self, order: int = 8, mu: float = 0.002, window: int = 25, iterations: int = 8,
                 selection_norm: str = 'norm', norm_floor: float = 1e-12):
        if window <= order:
            raise InvalidConfig(f"L out of range: требуется L > M, получено L={window}, M={order}")
        super().__init__(order, history=order + window)
        self.mu = float(mu)
        self.window = int(window)
        self.iterations = int(iterations)
        self.selection_norm = selection_norm
        self.norm_floor = float(norm_floor)
        self.d_line = DelayLine(self.window + 1)
        self.residual_norms: List[float] = []

    def step(self, x_new: float, d_new: float) -> StepOutput:
        self.x_line.push(x_new)
        self.d_line.push(d_new)
        X = build_data_matrix(self.x_line, self.order, self.window)
        d = self.d_line.window(0, self.window)

        y = float(self.taps @ X[0, :])
        e = d_new - y

        norms = np.einsum('ij,ij->j', X, X)
        eligible = norms > self.norm_floor
        records: List[UpdateRecord] = []
        residual = d - X @ self.taps
        self.residual_norms = [float(residual @ residual)]
        if np.any(eligible):
            for i in range(self.iterations):
                projections = X.T @ residual
                if self.selection_norm == 'norm':
                    score = np.abs(projections) / np.sqrt(np.where(eligible, norms, 1.0))
                else:
                    score = np.abs(projections) / np.where(eligible, norms, 1.0)
                score = np.where(eligible, score, -1.0)
                j = int(np.argmax(score))
                value = float(projections[j] / norms[j])
                if value != 0.0:
                    self.taps[j] += self.mu * value
                    residual = d - X @ self.taps
                self.residual_norms.append(float(residual @ residual))
                records.append(UpdateRecord(index=j, value=value, iteration=i, sample=self.samples_seen))

        self._check_finite(self.taps)
        self.samples_seen += 1
        return StepOutput(e, y, tuple(records))

    def params(self) -> Dict[str, Any]:
        return {
            'algo': self.name, 'M': self.order, 'mu': self.mu, 'L': self.window,
            'P': self.iterations, 'selection_norm': self.selection_norm,
        }
