import csv
import io
import logging

import pytest

from src.engine.bench import CSV_COLUMNS, METHODS, BenchConfig, query_share, run_benchmark, write_csv
from src.engine.errors import ConfigError

SMALL = dict(m=(16,), n=(40,), b=(2,), repeats=2, warmup=1)


class TestBenchConfig:
    def test_defaults(self):
        config = BenchConfig()
        assert config.seed == 0x5EED
        assert (config.repeats, config.warmup) == (10, 3)
        assert config.threads == (1,)

    def test_short_protocol_warns(self, caplog):
        with caplog.at_level(logging.WARNING, logger='src.engine.bench'):
            BenchConfig(repeats=2, warmup=1)
        assert 'below the timing protocol' in caplog.text

    def test_full_protocol_is_quiet(self, caplog):
        with caplog.at_level(logging.WARNING, logger='src.engine.bench'):
            BenchConfig()
        assert caplog.text == ''

    def test_rejects_large_mu(self):
        with pytest.raises(ConfigError):
            BenchConfig(mu=(17,))

    def test_rejects_unknown_method(self):
        with pytest.raises(ConfigError):
            BenchConfig(methods=('cublas',))

    def test_rejects_infeasible_budget(self):
        with pytest.raises(ConfigError):
            BenchConfig(mu=(8,), b=(32,), budget_bytes=1024)

    def test_scenarios_are_the_cross_product(self):
        config = BenchConfig(m=(1, 2), n=(3,), b=(1, 2, 4), beta=(1, 2))
        assert len(list(config.scenarios())) == 12


class TestRunBenchmark:
    def test_one_record_per_method(self):
        records = run_benchmark(BenchConfig(**SMALL))
        assert [r.method for r in records] == list(METHODS)
        assert all(r.seed == 0x5EED for r in records)
        by_method = {r.method: r for r in records}

        biq = by_method['biqgemm']
        assert biq.lookups == 16 * 5 * 2
        assert biq.lut_build_ops == biq.predicted_ops - biq.lookups
        assert biq.build_s is not None and biq.query_s is not None
        assert 0.0 < query_share(biq) < 1.0

        assert by_method['gemm_dense'].fma_ops == 16 * 40 * 2
        assert by_method['gemm_unpack'].unpack_ops == 16 * 2 * 32
        assert by_method['bandwidth_probe'].correct is False
        assert by_method['bandwidth_probe'].checksum == ''

    def test_fixed_seed_is_reproducible(self):
        first = run_benchmark(BenchConfig(beta=(2,), **SMALL))
        second = run_benchmark(BenchConfig(beta=(2,), **SMALL))
        assert [r.checksum for r in first] == [r.checksum for r in second]

    def test_csv_schema(self):
        records = run_benchmark(BenchConfig(methods=('biqgemm', 'gemm_dense'), **SMALL))
        out = io.StringIO()
        write_csv(records, out)
        rows = list(csv.DictReader(io.StringIO(out.getvalue())))
        assert list(rows[0].keys()) == CSV_COLUMNS
        assert len(rows) == 2
        assert rows[0]['seed'] == str(0x5EED)


@pytest.mark.slow
class TestTrends:
    def run(self, **options):
        config = BenchConfig(repeats=5, warmup=1, **options)
        return {(r.method, r.m, r.beta): r for r in run_benchmark(config)}

    def test_lookups_beat_unpacking(self):
        records = self.run(m=(1024,), n=(1024,), b=(32,), methods=('biqgemm', 'gemm_unpack'))
        assert records[('biqgemm', 1024, 1)].median_s <= records[('gemm_unpack', 1024, 1)].median_s

    def test_query_share_grows_with_m(self):
        records = self.run(m=(1024, 2048, 4096), n=(1024,), b=(32,), methods=('biqgemm',))
        shares = [query_share(records[('biqgemm', m, 1)]) for m in (1024, 2048, 4096)]
        assert shares[0] < shares[1] < shares[2]

    def test_beta_scaling(self):
        records = self.run(m=(1024,), n=(1024,), b=(32,), beta=(1, 3), methods=('biqgemm',))
        assert records[('biqgemm', 1024, 3)].median_s <= 3.5 * records[('biqgemm', 1024, 1)].median_s

    def test_probe_beats_unpacking(self):
        records = self.run(m=(1024,), n=(1024,), b=(32,), methods=('bandwidth_probe', 'gemm_unpack'))
        assert records[('bandwidth_probe', 1024, 1)].median_s < records[('gemm_unpack', 1024, 1)].median_s
