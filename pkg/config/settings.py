# config/settings.py
"""
Конфигурация запусков: параметры фильтров, синтетического сценария и путей
Значения по умолчанию повторяют экспериментальные настройки (M=8, L=25, P=8)
"""

import os
from dataclasses import dataclass, replace, asdict
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from utils.error_handler import InvalidConfig

load_dotenv()

ALGORITHMS = ('lms', 'nlms', 'rls', 'fap')
SELECTION_NORMS = ('norm', 'norm_squared')
NOISE_KINDS = ('white', 'colored', 'babble', 'babble-like')
# Синонимы типов шума
NOISE_ALIASES = {'babble-like': 'babble'}

# Шаг адаптации по умолчанию для каждого алгоритма (RLS шаг не использует)
DEFAULT_MU = {
    'lms': 0.002,
    'nlms': 0.005,
    'rls': None,
    'fap': 0.002,
}


class EnvSettings:
    """Переопределения из окружения / .env"""
    LOG_LEVEL = os.getenv('ANC_LOG_LEVEL', 'INFO')
    WORKERS = os.getenv('ANC_WORKERS', '1')
    OUTPUT_DIR = os.getenv('ANC_OUTPUT_DIR', 'anc_output')

    @classmethod
    def workers(cls) -> int:
        try:
            return max(1, int(cls.WORKERS))
        except ValueError:
            raise InvalidConfig(f"ANC_WORKERS должен быть целым числом: {cls.WORKERS!r}")


@dataclass
class RunConfig:
    """Полная конфигурация одного запуска"""

    # Фильтр
    algo: str = 'fap'
    order: int = 8
    mu: Optional[float] = None
    lam: float = 0.99
    delta: float = 0.01
    epsilon: float = 1e-8
    window: int = 25
    iterations: int = 8
    selection_norm: str = 'norm'
    norm_floor: float = 1e-12
    rebuild_every: int = 0

    # Синтетический сценарий
    seed: int = 1
    synth: bool = False
    length: int = 30000
    channel_order: int = 8
    snr_db: float = -10.0
    noise_kind: str = 'colored'
    sample_rate: int = 8000
    reference_rms: float = 0.4

    # Метрики (steady_fraction = 1.0: ОСШ по всему прогону)
    steady_fraction: float = 1.0
    smoothing_window: int = 128
    convergence_window: int = 1024
    convergence_band_db: float = 3.0

    # Исполнение
    workers: int = 1

    # Пути
    primary: Optional[Path] = None
    reference: Optional[Path] = None
    clean: Optional[Path] = None
    out: Optional[Path] = None
    mse_csv: Optional[Path] = None
    summary_json: Optional[Path] = None
    update_log: Optional[Path] = None

    def resolved_mu(self) -> Optional[float]:
        """Шаг адаптации с учетом значения по умолчанию для алгоритма"""
        if self.mu is not None:
            return self.mu
        return DEFAULT_MU.get(self.algo)

    def for_algo(self, algo: str) -> 'RunConfig':
        """Копия конфигурации для другого алгоритма"""
        return replace(self, algo=algo)

    def filter_params(self) -> Dict[str, Any]:
        """Параметры, относящиеся к выбранному алгоритму (для сводки)"""
        params: Dict[str, Any] = {'algo': self.algo, 'M': self.order}
        if self.algo in ('lms', 'nlms', 'fap'):
            params['mu'] = self.resolved_mu()
        if self.algo == 'nlms':
            params['epsilon'] = self.epsilon
        if self.algo == 'rls':
            params['lambda'] = self.lam
            params['delta'] = self.delta
        if self.algo == 'fap':
            params.update({
                'L': self.window,
                'P': self.iterations,
                'selection_norm': self.selection_norm,
                'norm_floor': self.norm_floor,
                'rebuild_every': self.rebuild_every,
            })
        return params

    def scenario_params(self) -> Dict[str, Any]:
        """Параметры синтетического сценария (для сводки)"""
        return {
            'seed': self.seed,
            'length': self.length,
            'channel_order': self.channel_order,
            'snr_db': self.snr_db,
            'noise_kind': self.noise_kind,
            'sample_rate': self.sample_rate,
            'reference_rms': self.reference_rms,
        }

    def validate(self) -> 'RunConfig':
        """
        Проверка параметров, относящихся к выбранному алгоритму

        Raises:
        -------
        InvalidConfig
            С указанием поля, вышедшего за допустимый диапазон
        """
        if self.algo not in ALGORITHMS:
            raise InvalidConfig(f"algo: неизвестный алгоритм {self.algo!r}, ожидается один из {ALGORITHMS}")
        if self.order < 1:
            raise InvalidConfig(f"M (order) должен быть положительным: {self.order}")

        mu = self.resolved_mu()
        if self.algo != 'rls' and (mu is None or not mu > 0):
            raise InvalidConfig(f"mu out of range: шаг адаптации должен быть > 0, получено {mu}")

        if self.algo == 'rls':
            if not 0.0 < self.lam <= 1.0:
                raise InvalidConfig(f"lambda out of range (0, 1]: {self.lam}")
            if not self.delta > 0:
                raise InvalidConfig(f"delta out of range: должно быть > 0, получено {self.delta}")

        if self.algo == 'nlms' and not self.epsilon >= 0:
            raise InvalidConfig(f"epsilon out of range: должно быть >= 0, получено {self.epsilon}")

        if self.algo == 'fap':
            if self.window <= self.order:
                raise InvalidConfig(f"L out of range: требуется L > M, получено L={self.window}, M={self.order}")
            if self.iterations < 1:
                raise InvalidConfig(f"P out of range: требуется P >= 1, получено {self.iterations}")
            if self.selection_norm not in SELECTION_NORMS:
                raise InvalidConfig(f"selection_norm: ожидается один из {SELECTION_NORMS}, получено {self.selection_norm!r}")
            if self.norm_floor < 0:
                raise InvalidConfig(f"norm_floor out of range: {self.norm_floor}")
            if self.rebuild_every < 0:
                raise InvalidConfig(f"rebuild_every out of range: {self.rebuild_every}")

        self.validate_scenario()

        if not 0.0 < self.steady_fraction <= 1.0:
            raise InvalidConfig(f"steady_fraction out of range (0, 1]: {self.steady_fraction}")
        if self.smoothing_window < 1 or self.convergence_window < 1:
            raise InvalidConfig("Окна сглаживания должны быть положительными")
        if self.workers < 1:
            raise InvalidConfig(f"workers должен быть >= 1: {self.workers}")
        return self

    def validate_scenario(self) -> None:
        """Проверка параметров синтетического сценария"""
        if self.length < 1:
            raise InvalidConfig(f"length должен быть положительным: {self.length}")
        if self.channel_order < 1:
            raise InvalidConfig(f"channel_order должен быть >= 1: {self.channel_order}")
        if self.length <= self.channel_order:
            raise InvalidConfig(
                f"length ({self.length}) должен превышать channel_order ({self.channel_order})")
        if self.noise_kind not in NOISE_KINDS:
            raise InvalidConfig(f"noise_kind: ожидается один из {NOISE_KINDS}, получено {self.noise_kind!r}")
        if self.sample_rate < 1:
            raise InvalidConfig(f"sample_rate должен быть положительным: {self.sample_rate}")
        if not self.reference_rms > 0:
            raise InvalidConfig(f"reference_rms должен быть > 0: {self.reference_rms}")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        return {k: (str(v) if isinstance(v, Path) else v) for k, v in data.items()}
