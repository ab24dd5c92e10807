# ===== СЕКЦИЯ 1: ЛИНИИ ЗАДЕРЖКИ И КЭШ СКАЛЯРНЫХ ПРОИЗВЕДЕНИЙ =====
"""
Базовые структуры для быстрого шага FAP:
- DelayLine: история отсчетов одного сигнала (новые первыми)
- InnerProductCache: скользящая матрица Грама <x_k, x_j> и вектор <d, x_j>,
  обновляемые рекурсиями ранга 1
- cache_oracle: прямой расчет тех же величин суммированием (эталон для проверки)
"""

from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from utils.error_handler import InvalidConfig


class DelayLine:
    """
    Линия задержки фиксированной емкости

    Отсчет с задержкой k хранится в buffer[k]; все, что не было записано
    (отсчеты до начала сигнала) или вытеснено, читается как 0.
    """

    __slots__ = ('capacity', 'buffer', 'fill')

    def __init__(self, capacity: int):
        if capacity < 1:
            raise InvalidConfig(f"Емкость линии задержки должна быть положительной: {capacity}")
        self.capacity = int(capacity)
        self.buffer = np.zeros(self.capacity, dtype=np.float64)
        self.fill = 0

    def push(self, sample: float) -> 'DelayLine':
        """Запись нового отсчета: все прежние сдвигаются на одну задержку"""
        buf = self.buffer
        buf[1:] = buf[:-1]
        buf[0] = sample
        if self.fill < self.capacity:
            self.fill += 1
        return self

    def read(self, lag: int) -> float:
        """Отсчет, записанный lag шагов назад (0 вне сохраненной истории)"""
        if 0 <= lag < self.fill:
            return float(self.buffer[lag])
        return 0.0

    def window(self, start: int, length: int) -> np.ndarray:
        """Отсчеты с задержками start .. start+length-1 (копия, дополнение нулями)"""
        out = np.zeros(length, dtype=np.float64)
        stop = min(start + length, self.capacity)
        if start < stop:
            out[:stop - start] = self.buffer[start:stop]
        return out

    def copy(self) -> 'DelayLine':
        clone = DelayLine(self.capacity)
        clone.buffer[:] = self.buffer
        clone.fill = self.fill
        return clone

    def __len__(self) -> int:
        return self.capacity


def delay_push(line: DelayLine, sample: float) -> DelayLine:
    """Функциональная форма DelayLine.push"""
    return line.push(sample)


class InnerProductCache:
    """
    Скользящие скалярные произведения окон длины L

    gram[k, j] = <x_k(n), x_j(n)>, cross[j] = <d(n), x_j(n)>, где
    x_j(n) = [x(n-j), ..., x(n-j-L+1)] и d(n) = [d(n), ..., d(n-L+1)].

    Накопление идет с компенсацией Кэхэна.
    """

    def __init__(self, order: int, window: int):
        if order < 1:
            raise InvalidConfig(f"Порядок фильтра должен быть положительным: {order}")
        if window < 1:
            raise InvalidConfig(f"Длина окна должна быть положительной: {window}")
        self.order = int(order)
        self.window = int(window)
        self.gram = np.zeros((order, order), dtype=np.float64)
        self.cross = np.zeros(order, dtype=np.float64)
        self._gram_comp = np.zeros((order, order), dtype=np.float64)
        self._cross_comp = np.zeros(order, dtype=np.float64)

    @classmethod
    def zeros(cls, order: int, window: int) -> 'InnerProductCache':
        return cls(order, window)

    @property
    def norms(self) -> np.ndarray:
        """Квадраты норм столбцов ||x_j(n)||^2 (диагональ матрицы Грама)"""
        return np.diagonal(self.gram).copy()

    def step(self, x_line: DelayLine, d_line: DelayLine) -> 'InnerProductCache':
        """
        Один шаг рекурсий для уже записанных x(n), d(n)

        cross(j) += d(n) x(n-j) - d(n-L) x(n-j-L)
        gram(k, j) += x(n-k) x(n-j) - x(n-k-L) x(n-j-L)

        Внешние произведения поэлементно симметричны, поэтому gram остается
        симметричной побитово.
        """
        M, L = self.order, self.window
        new = x_line.window(0, M)
        old = x_line.window(L, M)
        d_new = d_line.read(0)
        d_old = d_line.read(L)

        self._accumulate(self.gram, self._gram_comp, np.outer(new, new) - np.outer(old, old))
        self._accumulate(self.cross, self._cross_comp, d_new * new - d_old * old)
        return self

    @staticmethod
    def _accumulate(total: np.ndarray, comp: np.ndarray, increment: np.ndarray) -> None:
        y = increment - comp
        t = total + y
        comp[...] = (t - total) - y
        total[...] = t

    def rebuild(self, x_line: DelayLine, d_line: DelayLine) -> 'InnerProductCache':
        """Пересчет кэша прямым суммированием (контроль дрейфа)"""
        fresh = cache_oracle(x_line, d_line, self.order, self.window)
        self.gram[...] = fresh.gram
        self.cross[...] = fresh.cross
        self._gram_comp[...] = 0.0
        self._cross_comp[...] = 0.0
        return self

    def copy(self) -> 'InnerProductCache':
        clone = InnerProductCache(self.order, self.window)
        clone.gram[...] = self.gram
        clone.cross[...] = self.cross
        clone._gram_comp[...] = self._gram_comp
        clone._cross_comp[...] = self._cross_comp
        return clone


def cache_step(cache: InnerProductCache, x_line: DelayLine, d_line: DelayLine) -> InnerProductCache:
    """Функциональная форма InnerProductCache.step"""
    return cache.step(x_line, d_line)


def build_data_matrix(x_line: DelayLine, order: int, window: int) -> np.ndarray:
    """
    Явная матрица данных X(n) размера L x M

    Parameters:
    -----------
    x_line : DelayLine
        История входного сигнала (нужны задержки до M+L-2)
    order : int
        Число столбцов M
    window : int
        Длина окна L

    Returns:
    --------
    np.ndarray
        Столбец j равен [x(n-j), ..., x(n-j-L+1)]
    """
    history = x_line.window(0, order + window - 1)
    # строка j представления - это окно, начинающееся с задержки j
    return sliding_window_view(history, window)[:order].T.copy()


def cache_oracle(x_line: DelayLine, d_line: DelayLine, order: int, window: int,
                 data_matrix: Optional[np.ndarray] = None) -> InnerProductCache:
    """Прямой расчет матрицы Грама и вектора <d, x_j> по явным окнам"""
    X = build_data_matrix(x_line, order, window) if data_matrix is None else data_matrix
    d = d_line.window(0, window)

    cache = InnerProductCache(order, window)
    gram = X.T @ X
    cache.gram[...] = 0.5 * (gram + gram.T)
    cache.cross[...] = X.T @ d
    return cache
