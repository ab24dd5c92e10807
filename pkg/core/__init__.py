# ===== СЕКЦИЯ 17: ПАКЕТ ОСНОВНЫХ МОДУЛЕЙ СИСТЕМЫ =====
"""
Инициализационный файл пакета core
Экспорт фильтров, схемы шумоподавления и структур быстрого FAP
"""

from .signal_core import DelayLine, InnerProductCache, cache_oracle
from .filters_classic import (
    AdaptiveFilter, LmsFilter, NlmsFilter, RlsFilter, StepOutput, lms_step, make_filter, nlms_step, rls_step,
)
from .filter_fap import FapFilter, NaiveFapFilter, UpdateRecord
from .anc_pipeline import AncResult, AncScenario, LearningCurve, run_anc, snri_db, synth_scenario

__all__ = [
    'DelayLine', 'InnerProductCache', 'cache_oracle',
    'AdaptiveFilter', 'LmsFilter', 'NlmsFilter', 'RlsFilter', 'StepOutput', 'make_filter',
    'lms_step', 'nlms_step', 'rls_step',
    'FapFilter', 'NaiveFapFilter', 'UpdateRecord',
    'AncResult', 'AncScenario', 'LearningCurve', 'run_anc', 'snri_db', 'synth_scenario',
]
