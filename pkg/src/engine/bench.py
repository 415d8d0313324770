"""Benchmark harness: synthetic matrices, phase profiling, CSV records."""
import csv
import hashlib
import itertools
import logging
import time
from dataclasses import asdict, dataclass, fields
from typing import Optional, Tuple

import numpy as np

from src.engine import complexity
from src.engine.baselines import gemm_bandwidth_probe, gemm_dense, gemm_unpack_linear
from src.engine.config import DEFAULT_BUDGET_BYTES, DEFAULT_MU, DEFAULT_SEED, KernelConfig, MAX_MU, WORD_BITS
from src.engine.errors import BiQGemmError, ConfigError
from src.engine.kernel import biqgemm, plan_tiles
from src.engine.packing import pack_linear, pack_plane_words
from src.engine.quantizer import dequantize, quantize_greedy
from src.models.matrix import DenseMatrix, PRECISIONS

logger = logging.getLogger(__name__)

METHODS = ('biqgemm', 'gemm_dense', 'gemm_unpack', 'bandwidth_probe')
MIN_REPEATS = 10
MIN_WARMUP = 3


@dataclass(frozen=True)
class BenchConfig:
    m: Tuple[int, ...] = (1024,)
    n: Tuple[int, ...] = (1024,)
    b: Tuple[int, ...] = (32,)
    beta: Tuple[int, ...] = (1,)
    mu: Tuple[int, ...] = (DEFAULT_MU,)
    threads: Tuple[int, ...] = (1,)
    methods: Tuple[str, ...] = METHODS
    repeats: int = 10
    warmup: int = 3
    seed: int = DEFAULT_SEED
    budget_bytes: int = DEFAULT_BUDGET_BYTES
    deterministic: bool = False
    precision: int = 32

    def __post_init__(self):
        for name in ('m', 'n', 'b', 'beta', 'mu', 'threads'):
            values = tuple(getattr(self, name))
            object.__setattr__(self, name, values)
            if not values:
                raise ConfigError(f"--{name} needs at least one value")
            if any(v < 1 for v in values):
                raise ConfigError(f"--{name} values must be >= 1, got {values}")
        if any(mu > MAX_MU for mu in self.mu):
            raise ConfigError(f"--mu values must be <= {MAX_MU}, got {self.mu}")
        object.__setattr__(self, 'methods', tuple(self.methods))
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise ConfigError(f"Unknown methods {sorted(unknown)}; choose from {METHODS}")
        if self.repeats < 1 or self.warmup < 0:
            raise ConfigError(f"Need repeats >= 1 and warmup >= 0, got {self.repeats}/{self.warmup}")
        if self.repeats < MIN_REPEATS or self.warmup < MIN_WARMUP:
            logger.warning(
                f"repeats={self.repeats} warmup={self.warmup} is below the timing protocol "
                f"({MIN_REPEATS} repeats, {MIN_WARMUP} warm-up runs); medians are indicative only")
        if self.precision not in PRECISIONS:
            raise ConfigError(f"precision must be 32 or 64, got {self.precision}")
        for b, mu in itertools.product(self.b, self.mu):
            try:
                plan_tiles(1, 1, b, mu, self.budget_bytes, entry_size=self.precision // 8)
            except BiQGemmError as e:
                raise ConfigError(f"Budget infeasible for b={b} mu={mu}: {e}") from e

    def scenarios(self):
        for m, n, b, beta, mu, threads in itertools.product(
                self.m, self.n, self.b, self.beta, self.mu, self.threads):
            yield Scenario(m, n, b, beta, mu, threads)


@dataclass(frozen=True)
class Scenario:
    m: int
    n: int
    b: int
    beta: int
    mu: int
    threads: int


@dataclass
class BenchRecord:
    seed: int
    m: int
    n: int
    b: int
    beta: int
    mu: int
    threads: int
    method: str
    repeats: int
    median_s: float
    build_s: Optional[float] = None
    query_s: Optional[float] = None
    replace_s: Optional[float] = None
    lut_build_ops: int = 0
    lookups: int = 0
    accumulate_ops: int = 0
    scale_ops: int = 0
    fma_ops: int = 0
    unpack_ops: int = 0
    predicted_ops: int = 0
    correct: bool = True
    checksum: str = ''

    def to_dict(self):
        return asdict(self)


CSV_COLUMNS = [f.name for f in fields(BenchRecord)]


def checksum(matrix):
    return hashlib.sha256(np.ascontiguousarray(matrix.data).tobytes()).hexdigest()[:16]


def make_operands(scenario, seed, precision=32):
    """Uniform [-1, 1] weights and standard-normal inputs from one seeded stream."""
    rng = np.random.default_rng([seed, scenario.m, scenario.n, scenario.b])
    dtype = PRECISIONS[precision]
    W = DenseMatrix(rng.uniform(-1.0, 1.0, size=(scenario.m, scenario.n)).astype(dtype))
    X = DenseMatrix(rng.standard_normal(size=(scenario.n, scenario.b)).astype(dtype))
    return W, X


def _timed(fn, repeats, warmup):
    for _ in range(warmup):
        fn()
    times, results = [], []
    for _ in range(repeats):
        start = time.perf_counter()
        results.append(fn())
        times.append(time.perf_counter() - start)
    return float(np.median(times)), results


def run_scenario(scenario, config):
    W, X = make_operands(scenario, config.seed, config.precision)
    q = quantize_greedy(W, scenario.beta)
    packed = pack_linear(q, scenario.mu)
    kernel_config = KernelConfig(budget_bytes=config.budget_bytes, workers=scenario.threads,
                                 deterministic=config.deterministic, profile=True)
    s = scenario
    dense_w = dequantize(q)
    streams = [pack_plane_words(p) for p in q.planes]
    calls = {
        'biqgemm': (lambda: biqgemm(packed, X, config=kernel_config),
                    complexity.biqgemm_ops(s.m, s.n, s.b, s.mu, s.beta)),
        'gemm_dense': (lambda: gemm_dense(dense_w, X),
                       complexity.dense_fma(s.m, s.n, s.b)),
        'gemm_unpack': (lambda: gemm_unpack_linear(streams, q.alphas, X),
                        complexity.dense_fma(s.m, s.n, s.b, s.beta)),
        'bandwidth_probe': (lambda: gemm_bandwidth_probe(streams[0], X),
                            s.m * -(-s.n // WORD_BITS) * s.b),
    }

    records = []
    for method in config.methods:
        fn, predicted = calls[method]
        logger.info(f"Running {method} m={s.m} n={s.n} b={s.b} beta={s.beta} mu={s.mu} threads={s.threads}")
        median, results = _timed(fn, config.repeats, config.warmup)
        last = results[-1]
        record = BenchRecord(
            seed=config.seed, m=s.m, n=s.n, b=s.b, beta=s.beta, mu=s.mu, threads=s.threads,
            method=method, repeats=config.repeats, median_s=median,
            predicted_ops=predicted, correct=last.correct,
            checksum=checksum(last.output) if last.correct else '',
            **last.counters.to_dict(),
        )
        if last.phases is not None:
            record.build_s = float(np.median([r.phases.build for r in results]))
            record.query_s = float(np.median([r.phases.query for r in results]))
            record.replace_s = float(np.median([r.phases.replace for r in results]))
        records.append(record)
    return records


def run_benchmark(config):
    records = []
    for scenario in config.scenarios():
        records.extend(run_scenario(scenario, config))
    logger.info(f"Benchmark finished: {len(records)} records")
    return records


def write_csv(records, stream):
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for record in records:
        writer.writerow(record.to_dict())


def query_share(record):
    total = (record.build_s or 0.0) + (record.query_s or 0.0) + (record.replace_s or 0.0)
    return record.query_s / total if total else 0.0
