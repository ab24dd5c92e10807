"""Тесты интерфейса командной строки (через main)"""

import json
import logging

import pandas as pd
import pytest

from main import main
from utils.data_loader import wav_read

SHORT = ['--synth', '--length', '3000', '--seed', '3']


class TestRun:

    def test_synthetic_run_writes_outputs(self, tmp_path, capsys):
        out = tmp_path / 'out'
        assert main(['run', '--algo', 'nlms', *SHORT, '--out', str(out)]) == 0

        summary = json.loads((out / 'summary.json').read_text(encoding='utf-8'))
        assert summary['algo'] == 'nlms'
        assert summary['samples'] == 3000
        assert summary['diverged'] is False
        assert summary['clipped_samples'] >= 0
        assert summary['parameters'] == {'algo': 'nlms', 'M': 8, 'mu': 0.005, 'epsilon': 1e-8}
        assert set(summary) >= {'snr_in_db', 'snr_out_db', 'snri_db', 'samples_to_converge', 'snr_capped'}

        curve = pd.read_csv(out / 'mse_nlms.csv')
        assert list(curve.columns) == ['sample_index', 'mse_raw', 'mse_smoothed']
        assert len(curve) == 3000
        denoised, rate = wav_read(out / 'denoised_nlms.wav')
        assert denoised.size == 3000 and rate == 8000
        assert 'NLMS' in capsys.readouterr().out

    def test_explicit_output_paths_and_update_log(self, tmp_path):
        out = tmp_path / 'out'
        args = ['run', '--algo', 'fap', '-L', '10', '-P', '2', *SHORT, '--out', str(out),
                '--mse-csv', str(tmp_path / 'curve.csv'), '--summary-json', str(tmp_path / 's.json'),
                '--update-log', str(tmp_path / 'updates.csv')]
        assert main(args) == 0
        assert (tmp_path / 'curve.csv').is_file()
        assert json.loads((tmp_path / 's.json').read_text())['parameters']['L'] == 10
        updates = pd.read_csv(tmp_path / 'updates.csv')
        assert len(updates) == 2 * 3000
        assert not (out / 'summary.json').exists()

    def test_recordings_round_trip(self, tmp_path):
        scenario = tmp_path / 'scenario'
        assert main(['synth', *SHORT, '--out', str(scenario)]) == 0
        out = tmp_path / 'out'
        code = main(['run', '--algo', 'rls', '--primary', str(scenario / 'primary.wav'),
                     '--reference', str(scenario / 'reference.wav'), '--clean', str(scenario / 'clean.wav'),
                     '--out', str(out)])
        assert code == 0
        summary = json.loads((out / 'summary.json').read_text())
        assert summary['source'] == 'wav:primary.wav'
        assert summary['snri_db'] is not None

    def test_missing_reference_file(self, tmp_path, capsys):
        scenario = tmp_path / 'scenario'
        main(['synth', *SHORT, '--out', str(scenario)])
        code = main(['run', '--primary', str(scenario / 'primary.wav'),
                     '--reference', str(tmp_path / 'absent.wav'), '--out', str(tmp_path / 'out')])
        assert code == 3
        assert 'absent.wav' in capsys.readouterr().err

    def test_no_inputs(self, tmp_path):
        assert main(['run', '--out', str(tmp_path)]) == 2

    def test_lambda_out_of_range(self, tmp_path, capsys):
        assert main(['run', '--algo', 'rls', '--lambda', '1.5', *SHORT, '--out', str(tmp_path)]) == 2
        assert 'lambda out of range' in capsys.readouterr().err

    def test_snr_window_fraction(self, tmp_path):
        assert main(['run', '--algo', 'nlms', *SHORT, '--steady-fraction', '0.5', '--out', str(tmp_path)]) == 0
        assert main(['run', '--algo', 'nlms', *SHORT, '--steady-fraction', '0', '--out', str(tmp_path)]) == 2

    def test_failure_reports_error_summary(self, tmp_path, caplog):
        with caplog.at_level(logging.DEBUG, logger='main'):
            code = main(['run', '--algo', 'rls', '--lambda', '1.5', *SHORT, '--out', str(tmp_path)])
        assert code == 2
        messages = [r.getMessage() for r in caplog.records if r.name == 'main']
        assert any('сводка ошибок' in m and 'InvalidConfig' in m for m in messages)

    def test_unknown_algorithm_is_usage_error(self):
        assert main(['run', '--algo', 'kalman', '--synth']) == 2

    def test_divergence_exit_code(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['run', '--algo', 'lms', '--mu', '50', *SHORT, '--out', str(out)])
        assert code == 4
        summary = json.loads((out / 'summary.json').read_text())
        assert summary['diverged'] is True
        assert summary['snri_db'] is None


class TestCompare:

    def test_writes_table_and_per_algorithm_files(self, tmp_path, capsys):
        out = tmp_path / 'out'
        assert main(['compare', *SHORT, '--out', str(out)]) == 0
        table = pd.read_csv(out / 'compare.csv')
        assert table['algo'].tolist() == ['lms', 'nlms', 'rls', 'fap']
        assert not table['diverged'].any()
        summaries = json.loads((out / 'summary.json').read_text())
        assert sorted(summaries) == ['fap', 'lms', 'nlms', 'rls']
        for algo in ('lms', 'nlms', 'rls', 'fap'):
            assert (out / f'denoised_{algo}.wav').is_file()
            assert (out / f'mse_{algo}.csv').is_file()
        printed = capsys.readouterr().out
        assert 'RLS' in printed and 'FAP' in printed

    def test_without_inputs_falls_back_to_synthetic(self, tmp_path):
        out = tmp_path / 'out'
        assert main(['compare', '--length', '2000', '--out', str(out)]) == 0
        table = pd.read_csv(out / 'compare.csv')
        assert table['algo'].tolist() == ['lms', 'nlms', 'rls', 'fap']
        summaries = json.loads((out / 'summary.json').read_text())
        assert summaries['fap']['source'].startswith('synthetic:')

    def test_single_recording_is_rejected(self, tmp_path):
        scenario = tmp_path / 'scenario'
        assert main(['synth', *SHORT, '--out', str(scenario)]) == 0
        code = main(['compare', '--primary', str(scenario / 'primary.wav'), '--out', str(tmp_path / 'out')])
        assert code == 2

    def test_parallel_matches_serial(self, tmp_path):
        serial, parallel = tmp_path / 'serial', tmp_path / 'parallel'
        assert main(['compare', *SHORT, '--out', str(serial), '--workers', '1']) == 0
        assert main(['compare', *SHORT, '--out', str(parallel), '--workers', '2']) == 0
        assert (serial / 'compare.csv').read_bytes() == (parallel / 'compare.csv').read_bytes()
        assert (serial / 'denoised_fap.wav').read_bytes() == (parallel / 'denoised_fap.wav').read_bytes()


class TestSynth:

    def test_writes_three_files(self, tmp_path):
        out = tmp_path / 'scenario'
        assert main(['synth', *SHORT, '--out', str(out)]) == 0
        for name in ('clean', 'primary', 'reference'):
            samples, rate = wav_read(out / f'{name}.wav')
            assert samples.size == 3000 and rate == 8000

    def test_same_seed_same_bytes(self, tmp_path):
        main(['synth', *SHORT, '--out', str(tmp_path / 'a')])
        main(['synth', *SHORT, '--out', str(tmp_path / 'b')])
        assert (tmp_path / 'a' / 'primary.wav').read_bytes() == (tmp_path / 'b' / 'primary.wav').read_bytes()

    def test_babble_like_noise_kind(self, tmp_path):
        out = tmp_path / 'scenario'
        assert main(['synth', *SHORT, '--noise-kind', 'babble-like', '--out', str(out)]) == 0
        samples, _ = wav_read(out / 'reference.wav')
        assert samples.size == 3000

    def test_invalid_length(self, tmp_path):
        assert main(['synth', '--length', '4', '--out', str(tmp_path)]) == 2


class TestOracleCheck:

    def test_passes(self, capsys):
        assert main(['oracle-check', '--samples', '300']) == 0
        assert 'cache_vs_direct_sum' in capsys.readouterr().out

    def test_injected_fault_is_detected(self, capsys):
        assert main(['oracle-check', '--samples', '300', '--inject-fault']) == 5
        assert 'cache_vs_direct_sum' in capsys.readouterr().err


class TestSweep:

    def test_writes_sweep_table(self, tmp_path):
        out = tmp_path / 'out'
        code = main(['sweep', '--algo', 'nlms', '--param', 'mu', '--values', '0.01,0.05', *SHORT,
                     '--out', str(out)])
        assert code == 0
        table = pd.read_csv(out / 'sweep_nlms_mu.csv')
        assert table['value'].tolist() == [0.01, 0.05]
        assert list(table.columns) == ['algo', 'param', 'value', 'snri_db', 'samples_to_converge', 'diverged']

    @pytest.mark.parametrize('values', ['abc', ','])
    def test_bad_values(self, tmp_path, values):
        assert main(['sweep', '--param', 'mu', '--values', values, *SHORT, '--out', str(tmp_path)]) == 2

    def test_window_sweep_validates_each_value(self, tmp_path):
        code = main(['sweep', '--algo', 'fap', '--param', 'L', '--values', '20,8', *SHORT, '--out', str(tmp_path)])
        assert code == 2
