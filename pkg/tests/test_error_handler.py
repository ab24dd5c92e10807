"""Тесты иерархии исключений, кодов завершения и декоратора команд"""

import logging

import pytest

from utils.error_handler import (
    AudioIOError, DenominatorUnderflow, InvalidConfig, NoEligibleColumn, NumericalDivergence,
    OracleViolation, UnsupportedFormat, cli_error_handler, exit_code_for, get_global_error_collector,
    setup_logging,
)


class TestExitCodes:

    @pytest.mark.parametrize('error, code', [
        (InvalidConfig('x'), 2),
        (AudioIOError('x'), 3),
        (UnsupportedFormat('x'), 3),
        (FileNotFoundError('x'), 3),
        (NumericalDivergence('x', sample_index=3), 4),
        (DenominatorUnderflow('x'), 4),
        (OracleViolation('x'), 5),
        (NoEligibleColumn('x'), 1),
        (ValueError('x'), 1),
    ])
    def test_mapping(self, error, code):
        assert exit_code_for(error) == code


class TestCliErrorHandler:

    def test_passes_return_value(self):
        @cli_error_handler
        def command():
            return 0

        assert command() == 0

    def test_expected_error_becomes_exit_code(self, capsys):
        @cli_error_handler
        def command():
            raise InvalidConfig('lambda out of range (0, 1]: 1.5')

        assert command() == 2
        assert 'lambda out of range' in capsys.readouterr().err
        summary = get_global_error_collector().get_error_summary()
        assert summary['total_errors'] == 1
        assert summary['most_common_error'] == 'InvalidConfig'
        assert summary['recent_errors'][0]['exit_code'] == 2

    def test_unexpected_error_is_one(self, capsys):
        @cli_error_handler(capture_traceback=False)
        def command():
            raise KeyError('boom')

        assert command() == 1
        assert 'Неожиданная ошибка' in capsys.readouterr().err

    def test_logs_to_given_logger(self, caplog):
        log = logging.getLogger('anc.test')

        @cli_error_handler(log=log)
        def command():
            raise OracleViolation('cache: отклонение 1e-3')

        with caplog.at_level(logging.ERROR, logger='anc.test'):
            assert command() == 5
        assert any('OracleViolation' in r.message for r in caplog.records)

    def test_keeps_metadata(self):
        @cli_error_handler
        def cmd_example():
            """Документация"""
            return 0

        assert cmd_example.__name__ == 'cmd_example'
        assert cmd_example.__doc__ == 'Документация'


def test_setup_logging_is_idempotent():
    root = logging.getLogger()
    level = root.level
    try:
        setup_logging('DEBUG')
        count = len(root.handlers)
        setup_logging('warning')
        assert len(root.handlers) == count
        assert root.level == logging.WARNING
        setup_logging('nonsense')
        assert root.level == logging.INFO
    finally:
        root.setLevel(level)
