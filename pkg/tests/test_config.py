"""Тесты конфигурации запусков"""

from pathlib import Path

import pytest

from config.settings import ALGORITHMS, EnvSettings, RunConfig
from utils.error_handler import InvalidConfig


class TestRunConfig:

    def test_defaults_follow_experiment_settings(self):
        config = RunConfig()
        assert (config.order, config.window, config.iterations) == (8, 25, 8)
        assert config.resolved_mu() == 0.002
        assert config.validate() is config

    def test_explicit_mu_wins(self):
        assert RunConfig(algo='nlms', mu=0.3).resolved_mu() == 0.3
        assert RunConfig(algo='rls').resolved_mu() is None

    def test_for_algo_is_a_copy(self):
        base = RunConfig(algo='fap', mu=0.1)
        other = base.for_algo('rls')
        assert other.algo == 'rls' and base.algo == 'fap'
        assert other.mu == 0.1

    def test_filter_params_per_algorithm(self):
        assert RunConfig(algo='rls').filter_params() == {'algo': 'rls', 'M': 8, 'lambda': 0.99, 'delta': 0.01}
        fap = RunConfig(algo='fap').filter_params()
        assert fap['L'] == 25 and fap['P'] == 8 and fap['mu'] == 0.002
        assert 'lambda' not in fap

    def test_every_algorithm_validates_with_defaults(self):
        for algo in ALGORITHMS:
            RunConfig(algo=algo).validate()

    def test_scenario_defaults(self):
        config = RunConfig()
        assert config.steady_fraction == 1.0
        assert config.reference_rms == 0.4
        RunConfig(noise_kind='babble-like').validate_scenario()

    @pytest.mark.parametrize('kwargs, message', [
        ({'algo': 'rls', 'lam': 1.5}, 'lambda out of range'),
        ({'algo': 'rls', 'lam': 0.0}, 'lambda out of range'),
        ({'algo': 'rls', 'delta': 0.0}, 'delta out of range'),
        ({'algo': 'lms', 'mu': -0.1}, 'mu out of range'),
        ({'algo': 'nlms', 'epsilon': -1.0}, 'epsilon out of range'),
        ({'algo': 'fap', 'window': 8}, 'L out of range'),
        ({'algo': 'fap', 'iterations': 0}, 'P out of range'),
        ({'algo': 'fap', 'selection_norm': 'max'}, 'selection_norm'),
        ({'algo': 'kalman'}, 'algo'),
        ({'order': 0}, 'order'),
        ({'length': 8}, 'channel_order'),
        ({'noise_kind': 'pink'}, 'noise_kind'),
        ({'steady_fraction': 0.0}, 'steady_fraction'),
        ({'workers': 0}, 'workers'),
    ])
    def test_rejects_out_of_range(self, kwargs, message):
        with pytest.raises(InvalidConfig, match=message):
            RunConfig(**kwargs).validate()

    def test_rls_ignores_fap_fields(self):
        RunConfig(algo='rls', window=2, iterations=0).validate()

    def test_to_dict_stringifies_paths(self):
        data = RunConfig(out=Path('results')).to_dict()
        assert data['out'] == 'results'
        assert data['primary'] is None


class TestEnvSettings:

    def test_workers_parsing(self, monkeypatch):
        monkeypatch.setattr(EnvSettings, 'WORKERS', '3')
        assert EnvSettings.workers() == 3
        monkeypatch.setattr(EnvSettings, 'WORKERS', '0')
        assert EnvSettings.workers() == 1

    def test_invalid_workers(self, monkeypatch):
        monkeypatch.setattr(EnvSettings, 'WORKERS', 'many')
        with pytest.raises(InvalidConfig, match='ANC_WORKERS'):
            EnvSettings.workers()
