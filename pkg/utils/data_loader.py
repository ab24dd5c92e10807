# ===== СЕКЦИЯ 4: ЗАГРУЗКА И СОХРАНЕНИЕ ДАННЫХ =====
"""
Модуль ввода/вывода: WAV (моно, 16 бит PCM), CSV кривых обучения и таблиц,
JSON сводки. Все выходные файлы записываются атомарно (временный файл в
каталоге назначения + os.replace).
"""

import contextlib
import json
import logging
import os
import tempfile
import wave
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from utils.error_handler import AudioIOError, UnsupportedFormat

# Настройка логирования
logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PCM_SCALE = 32768.0
PCM_MIN, PCM_MAX = -32768, 32767

CURVE_COLUMNS = ['sample_index', 'mse_raw', 'mse_smoothed']
COMPARE_COLUMNS = ['algo', 'snri_db', 'samples_to_converge', 'diverged']
SWEEP_COLUMNS = ['algo', 'param', 'value', 'snri_db', 'samples_to_converge', 'diverged']
UPDATE_LOG_COLUMNS = ['sample', 'iteration', 'index', 'value']


@contextlib.contextmanager
def atomic_path(path: PathLike) -> Iterator[Path]:
    """
    Временный путь в каталоге назначения; после успешного выхода из блока
    файл переименовывается в path, при ошибке временный файл удаляется
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f'.{target.name}.', suffix='.tmp', dir=str(target.parent))
    os.close(fd)
    os.chmod(tmp_name, 0o644)
    tmp = Path(tmp_name)
    try:
        yield tmp
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            tmp.unlink()
        raise


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Атомарная запись текста (UTF-8, переводы строк без преобразования)"""
    with atomic_path(path) as tmp:
        with open(tmp, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
    return Path(path)


# ----- WAV -----

def wav_read(path: PathLike) -> Tuple[np.ndarray, int]:
    """
    Чтение WAV файла: моно, 16 бит, PCM

    Parameters:
    -----------
    path : str or Path
        Путь к файлу

    Returns:
    --------
    tuple
        (отсчеты float64 в [-1, 1), частота дискретизации)

    Raises:
    -------
    AudioIOError
        Файл отсутствует или не читается
    UnsupportedFormat
        Стерео, не 16 бит, float или сжатый формат
    """
    path = Path(path)
    if not path.is_file():
        raise AudioIOError(f"Файл не найден: {path}")

    try:
        with wave.open(str(path), 'rb') as wf:
            channels = wf.getnchannels()
            sampwidth = wf.getsampwidth()
            rate = wf.getframerate()
            if wf.getcomptype() != 'NONE':
                raise UnsupportedFormat(f"{path}: сжатые WAV не поддерживаются ({wf.getcompname()})")
            if channels != 1:
                raise UnsupportedFormat(f"{path}: поддерживается только моно, каналов: {channels}")
            if sampwidth != 2:
                raise UnsupportedFormat(f"{path}: поддерживается только 16 бит PCM, разрядность: {8 * sampwidth} бит")
            frames = wf.readframes(wf.getnframes())
    except wave.Error as e:
        # модуль wave отклоняет float и прочие форматы, кроме PCM
        raise UnsupportedFormat(f"{path}: неподдерживаемый формат WAV ({e})") from e
    except EOFError as e:
        raise AudioIOError(f"{path}: файл поврежден или пуст") from e

    samples = np.frombuffer(frames, dtype='<i2').astype(np.float64) / PCM_SCALE
    logger.debug(f"Прочитано {samples.size} отсчетов из {path} ({rate} Гц)")
    return samples, rate


def pcm_encode(samples: np.ndarray) -> Tuple[np.ndarray, int]:
    """Перевод в int16 с насыщением; возвращает (отсчеты, число ограниченных)"""
    scaled = np.round(np.nan_to_num(np.asarray(samples, dtype=np.float64)) * PCM_SCALE)
    clipped = int(np.count_nonzero((scaled > PCM_MAX) | (scaled < PCM_MIN)))
    return np.clip(scaled, PCM_MIN, PCM_MAX).astype('<i2'), clipped


def wav_write(path: PathLike, samples: np.ndarray, sample_rate: int = 8000) -> int:
    """
    Запись моно WAV 16 бит PCM

    Returns:
    --------
    int
        Число отсчетов, ограниченных диапазоном [-32768, 32767]
    """
    pcm, clipped = pcm_encode(samples)
    with atomic_path(path) as tmp:
        with wave.open(str(tmp), 'wb') as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(int(sample_rate))
            wf.writeframes(pcm.tobytes())

    if clipped:
        logger.warning(f"{path}: ограничено {clipped} отсчетов при записи WAV")
    logger.info(f"Записан WAV: {path} ({pcm.size} отсчетов)")
    return clipped


# ----- CSV / JSON -----

def write_frame_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    """CSV с заголовком, десятичной точкой и переводами строк LF"""
    text = frame.to_csv(index=False, lineterminator='\n')
    atomic_write_text(path, text)
    logger.info(f"Записан CSV: {path} ({len(frame)} строк)")
    return Path(path)


def write_table_csv(path: PathLike, rows: Iterable[Dict[str, Any]], columns: Sequence[str]) -> Path:
    frame = pd.DataFrame(list(rows), columns=list(columns))
    return write_frame_csv(path, frame)


def write_curve_csv(path: PathLike, mse_raw: np.ndarray, mse_smoothed: np.ndarray) -> Path:
    """Кривая обучения: sample_index, mse_raw, mse_smoothed"""
    frame = pd.DataFrame({
        'sample_index': np.arange(len(mse_raw), dtype=np.int64),
        'mse_raw': np.asarray(mse_raw, dtype=np.float64),
        'mse_smoothed': np.asarray(mse_smoothed, dtype=np.float64),
    }, columns=CURVE_COLUMNS)
    return write_frame_csv(path, frame)


def write_update_log_csv(path: PathLike, records: Iterable[Any]) -> Path:
    """Журнал обновлений FAP: sample, iteration, index, value"""
    rows = [{'sample': r.sample, 'iteration': r.iteration, 'index': r.index, 'value': r.value}
            for r in records]
    return write_table_csv(path, rows, UPDATE_LOG_COLUMNS)


def _json_default(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Тип {type(value).__name__} не сериализуется в JSON")


def write_summary_json(path: PathLike, summary: Union[Dict[str, Any], List[Dict[str, Any]]]) -> Path:
    """JSON сводка: ключи отсортированы, отступ 2, отсутствующие значения - null"""
    text = json.dumps(summary, sort_keys=True, indent=2, ensure_ascii=False, default=_json_default)
    atomic_write_text(path, text + '\n')
    logger.info(f"Записана сводка: {path}")
    return Path(path)


def read_summary_json(path: PathLike) -> Any:
    path = Path(path)
    if not path.is_file():
        raise AudioIOError(f"Файл не найден: {path}")
    with open(path, 'r', encoding='utf-8') as fh:
        return json.load(fh)
