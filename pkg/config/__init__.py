# ===== ПАКЕТ КОНФИГУРАЦИИ =====
from .settings import (
    RunConfig, EnvSettings, ALGORITHMS, SELECTION_NORMS, NOISE_KINDS, NOISE_ALIASES, DEFAULT_MU
)

__all__ = ['RunConfig', 'EnvSettings', 'ALGORITHMS', 'SELECTION_NORMS', 'NOISE_KINDS', 'NOISE_ALIASES',
           'DEFAULT_MU']
