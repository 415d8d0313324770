import csv
import io
import logging
from types import SimpleNamespace

import pytest
from click.testing import CliRunner

from src.cli import bench_command


def invoke(*args):
    return CliRunner().invoke(bench_command, list(args))


def test_writes_csv_to_stdout():
    result = invoke('--m', '8,16', '--n', '24', '--b', '2', '--mu', '4', '--method', 'biqgemm',
                    '--method', 'gemm_dense', '--repeats', '1', '--warmup', '0')
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(io.StringIO(result.stdout)))
    assert [(r['m'], r['method']) for r in rows] == [
        ('8', 'biqgemm'), ('8', 'gemm_dense'), ('16', 'biqgemm'), ('16', 'gemm_dense')]


def test_writes_csv_file(tmp_path):
    path = tmp_path / 'out.csv'
    result = invoke('--m', '8', '--n', '8', '--b', '1', '--repeats', '1', '--warmup', '0',
                    '--deterministic', '--csv', str(path))
    assert result.exit_code == 0, result.output
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 4


def test_rejects_out_of_range_mu():
    result = invoke('--mu', '17', '--m', '8', '--n', '8', '--b', '1')
    assert result.exit_code != 0
    assert 'mu' in result.output


def test_verify_rejects_mu_nine():
    result = invoke('--verify', '--mu', '9')
    assert result.exit_code != 0
    assert 'mu' in result.output


def test_bad_int_list():
    result = invoke('--m', '8,x')
    assert result.exit_code == 2


@pytest.fixture
def seen_configs(monkeypatch):
    configs = []

    def fake_verify(config):
        configs.append(config)
        return SimpleNamespace(checks=[], passed=True)

    monkeypatch.setattr('src.cli.verify', fake_verify)
    return configs


def test_verify_defaults_to_all_small_mus(seen_configs):
    result = invoke('--verify')
    assert result.exit_code == 0, result.output
    assert seen_configs[0].mus == (1, 2, 4, 8)


def test_verify_uses_explicit_mu(seen_configs):
    result = invoke('--verify', '--mu', '2,4')
    assert result.exit_code == 0, result.output
    assert seen_configs[0].mus == (2, 4)


def test_log_level_overrides_existing_config(seen_configs):
    root = logging.getLogger()
    previous = root.level
    logging.basicConfig(level=logging.INFO)
    try:
        result = invoke('--verify', '--log-level', 'WARNING')
        assert result.exit_code == 0, result.output
        assert root.level == logging.WARNING
    finally:
        root.setLevel(previous)
