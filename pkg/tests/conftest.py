# ===== ОБЩИЕ ФИКСТУРЫ ТЕСТОВ =====
import numpy as np
import pytest

from config.settings import RunConfig
from utils.error_handler import get_global_error_collector


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_config(tmp_path):
    """Короткий синтетический сценарий для быстрых прогонов команд"""
    return RunConfig(synth=True, length=3000, seed=3, out=tmp_path / 'out')


@pytest.fixture(autouse=True)
def clear_error_collector():
    yield
    get_global_error_collector().clear_errors()


def planted_system(rng, order, samples, noise=0.0):
    """Вход, желаемый сигнал и истинные коэффициенты КИХ-системы"""
    w = rng.standard_normal(order)
    x = rng.standard_normal(samples)
    d = np.convolve(x, w)[:samples]
    if noise:
        d = d + noise * rng.standard_normal(samples)
    return x, d, w
