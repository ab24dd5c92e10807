# ===== СЕКЦИЯ: ОБРАБОТКА ОШИБОК СИСТЕМЫ ШУМОПОДАВЛЕНИЯ =====
"""
Централизованная обработка ошибок для библиотеки адаптивных фильтров
Иерархия исключений, настройка логирования и декоратор для команд CLI
"""

import logging
import sys
import traceback
import functools
from typing import Any, Callable, Dict, List, Optional
from datetime import datetime

# Настройка логирования
logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - [%(funcName)s] - %(message)s'


def setup_logging(level: Any = logging.INFO) -> None:
    """Настройка корневого логгера (повторный вызов только меняет уровень)"""
    root = logging.getLogger()
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO

    if not any(getattr(h, '_anc_handler', False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._anc_handler = True
        root.addHandler(handler)
    root.setLevel(level)


class AncError(Exception):
    """Базовое исключение системы шумоподавления"""
    pass


class InvalidConfig(AncError):
    """Ошибка конфигурации или параметров"""
    pass


class AudioIOError(AncError):
    """Ошибка чтения/записи файлов"""
    pass


class UnsupportedFormat(AudioIOError):
    """Неподдерживаемый формат WAV"""
    pass


class NumericalDivergence(AncError):
    """Нечисловое состояние фильтра (расходимость)"""

    def __init__(self, message: str, sample_index: Optional[int] = None):
        super().__init__(message)
        self.sample_index = sample_index


class DenominatorUnderflow(NumericalDivergence):
    """Знаменатель коэффициента усиления RLS слишком мал"""
    pass


class NoEligibleColumn(AncError):
    """Все столбцы окна имеют норму не выше порога"""
    pass


class DegenerateSnr(AncError):
    """ОСШ не определено: нулевая мощность шума или сигнала"""

    def __init__(self, message: str, reason: str = 'noise'):
        super().__init__(message)
        self.reason = reason


class OracleViolation(AncError):
    """Нарушен допуск при сверке с эталонной реализацией"""
    pass


# Коды завершения CLI. Порядок важен: подклассы раньше базовых классов
EXIT_CODES = (
    (InvalidConfig, 2),
    (AudioIOError, 3),
    (OSError, 3),
    (NumericalDivergence, 4),
    (OracleViolation, 5),
)


def exit_code_for(error: BaseException) -> int:
    """Код завершения для исключения (1 для неожиданных ошибок)"""
    for error_type, code in EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return 1


class ErrorCollector:
    """
    Класс для сбора и анализа ошибок системы
    """

    def __init__(self):
        self.errors: List[Dict[str, Any]] = []
        self.error_stats: Dict[str, int] = {}

    def add_error(self, method_name: str, error: Exception):
        """
        Добавление ошибки в коллектор

        Parameters:
        -----------
        method_name : str
            Имя команды или функции, в которой произошла ошибка
        error : Exception
            Объект исключения
        """
        self.errors.append({
            'method': method_name,
            'error_type': type(error).__name__,
            'error_message': str(error),
            'exit_code': exit_code_for(error),
            'timestamp': datetime.now(),
        })

        error_type = type(error).__name__
        self.error_stats[error_type] = self.error_stats.get(error_type, 0) + 1

    def get_error_summary(self) -> Dict[str, Any]:
        """Сводка по ошибкам"""
        return {
            'total_errors': len(self.errors),
            'error_types': dict(self.error_stats),
            'recent_errors': self.errors[-10:],
            'most_common_error': max(self.error_stats, key=self.error_stats.get) if self.error_stats else 'None'
        }

    def clear_errors(self):
        """Очистка коллекции ошибок"""
        self.errors.clear()
        self.error_stats.clear()


# Глобальный коллектор ошибок
global_error_collector = ErrorCollector()


def get_global_error_collector() -> ErrorCollector:
    """Получение глобального коллектора ошибок"""
    return global_error_collector


def cli_error_handler(func: Callable[..., int] = None, *,
                      log: Optional[logging.Logger] = None,
                      capture_traceback: bool = True):
    """
    Декоратор для команд CLI: переводит исключения в коды завершения

    Parameters:
    -----------
    func : Callable
        Команда, возвращающая код завершения
    log : logging.Logger, optional
        Логгер для записи ошибок (по умолчанию логгер модуля команды)
    capture_traceback : bool, optional
        Писать ли traceback в DEBUG для ожидаемых ошибок
    """
    def decorator(command: Callable[..., int]) -> Callable[..., int]:
        @functools.wraps(command)
        def wrapper(*args, **kwargs) -> int:
            current_logger = log or logging.getLogger(command.__module__)
            try:
                return command(*args, **kwargs)

            except (AncError, OSError) as e:
                code = exit_code_for(e)
                current_logger.error(f"{type(e).__name__} в {command.__name__}: {e}")
                if capture_traceback:
                    current_logger.debug(f"Traceback для {command.__name__}:\n{traceback.format_exc()}")
                global_error_collector.add_error(command.__name__, e)
                print(f"Ошибка ({type(e).__name__}): {e}", file=sys.stderr)
                return code

            except Exception as e:
                current_logger.error(f"Неожиданная ошибка в {command.__name__}: {e}")
                current_logger.error(f"Полный traceback для {command.__name__}:\n{traceback.format_exc()}")
                global_error_collector.add_error(command.__name__, e)
                print(f"Неожиданная ошибка: {e}", file=sys.stderr)
                return 1

        return wrapper

    if func is None:
        return decorator
    return decorator(func)
