# ===== СЕКЦИЯ 18: ПАКЕТ ВСПОМОГАТЕЛЬНЫХ УТИЛИТ =====
from .error_handler import AncError, setup_logging
from .analytics import snr_db, learning_curve, convergence_time
from .data_loader import wav_read, wav_write

__all__ = [
    'AncError',
    'setup_logging',
    'snr_db',
    'learning_curve',
    'convergence_time',
    'wav_read',
    'wav_write',
]
