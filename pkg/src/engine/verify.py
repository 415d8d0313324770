"""Acceptance checks runnable from the CLI or the service."""
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from src.engine import complexity
from src.engine.baselines import gemm_dense
from src.engine.config import DEFAULT_SEED, KernelConfig
from src.engine.errors import BiQGemmError, ConfigError, ModelFormatError, TruncatedModelError
from src.engine.kernel import biqgemm, biqgemm_plane
from src.engine.lut import build_tables_dp, build_tables_naive, make_m_mu
from src.engine.model_io import footprint, load, save
from src.engine.packing import pack_keys
from src.engine.quantizer import dequantize, quantize_greedy, residual_curve, rounding_slack
from src.models.counters import TileShape
from src.models.matrix import BinaryPlane, DenseMatrix
from src.models.quantized import PackedLinear

logger = logging.getLogger(__name__)

VERIFY_MAX_MU = 8
REFERENCE_WEIGHTS_MB = {32: 1.049, 8: 0.262, 6: 0.197, 4: 0.131, 3: 0.098, 2: 0.066}
UNLIMITED_BUDGET = 1 << 40


class CheckFailure(Exception):
    pass


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = DEFAULT_SEED
    mus: Tuple[int, ...] = (1, 2, 4, 8)
    oracle_cases: int = 200
    lut_vectors: int = 50
    counter_shapes: int = 20
    quantizer_cases: int = 100
    tiling_shapes: int = 10
    model_cases: int = 100
    packer: Callable = pack_keys

    def __post_init__(self):
        object.__setattr__(self, 'mus', tuple(self.mus))
        if not self.mus:
            raise ConfigError("verify needs at least one mu")
        bad = [mu for mu in self.mus if not 1 <= mu <= VERIFY_MAX_MU]
        if bad:
            raise ConfigError(f"verify supports mu in [1, {VERIFY_MAX_MU}], got {bad}")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self):
        return {'name': self.name, 'passed': self.passed, 'detail': self.detail,
                'seconds': round(self.seconds, 3)}


@dataclass
class VerifyReport:
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {'seed': self.seed, 'passed': self.passed,
                'checks': [c.to_dict() for c in self.checks]}


def _rel_error(y, ref):
    y = np.asarray(y, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    scale = np.linalg.norm(ref)
    diff = np.linalg.norm(y - ref)
    return diff / scale if scale else diff


def _random_plane(rng, m, n):
    return BinaryPlane(np.where(rng.random((m, n)) < 0.5, -1, 1))


def check_codec_bijection(cfg, rng):
    for mu in range(1, VERIFY_MAX_MU + 1):
        plane = make_m_mu(mu)
        keys = cfg.packer(plane, mu).keys[:, 0].astype(np.int64)
        if not np.array_equal(keys, np.arange(1 << mu)):
            raise CheckFailure(f"encode is not the inverse of decode at mu={mu}")
        flipped = cfg.packer(BinaryPlane(-plane.signs), mu).keys[:, 0].astype(np.int64)
        if not np.array_equal(flipped, (1 << mu) - 1 - keys):
            raise CheckFailure(f"complement law broken at mu={mu}")
    return f"mu 1..{VERIFY_MAX_MU} exhaustive"


def check_lut_equivalence(cfg, rng):
    for mu in range(1, VERIFY_MAX_MU + 1):
        x = rng.standard_normal((cfg.lut_vectors, mu))
        dp = build_tables_dp(x)
        naive = build_tables_naive(x)
        err = np.max(np.abs(dp - naive) / np.maximum(np.abs(naive), 1.0))
        if err > 1e-12:
            raise CheckFailure(f"dp and naive tables differ by {err:.3e} at mu={mu}")
        half = 1 << (mu - 1)
        if not np.array_equal(dp[:, half:], -dp[:, half - 1::-1]):
            raise CheckFailure(f"complement entries are not exact negations at mu={mu}")
    return f"{cfg.lut_vectors} sub-vectors per mu"


def check_oracle_equivalence(cfg, rng):
    worst = {64: 0.0, 32: 0.0}
    for case in range(cfg.oracle_cases):
        m, n = rng.integers(1, 65, size=2)
        b = int(rng.integers(1, 9))
        mu = int(rng.choice(cfg.mus))
        beta = int(rng.integers(1, 4))
        precision = 64 if case % 2 == 0 else 32
        dtype = np.float64 if precision == 64 else np.float32
        W = DenseMatrix(rng.uniform(-1, 1, size=(m, n)).astype(dtype))
        X = DenseMatrix(rng.standard_normal((n, b)).astype(dtype))
        q = quantize_greedy(W, beta)
        packed = PackedLinear(tuple(cfg.packer(p, mu) for p in q.planes), q.alphas)
        y = biqgemm(packed, X, config=KernelConfig(budget_bytes=UNLIMITED_BUDGET)).output
        ref = gemm_dense(dequantize(q), X).output
        err = _rel_error(y.data, ref.data)
        worst[precision] = max(worst[precision], err)
        if err > (1e-12 if precision == 64 else 1e-4):
            raise CheckFailure(
                f"relative error {err:.3e} at m={m} n={n} b={b} mu={mu} beta={beta} "
                f"f{precision} (case {case}, seed {cfg.seed})")
    return f"worst f64 {worst[64]:.2e}, f32 {worst[32]:.2e}"


def check_counter_laws(cfg, rng):
    shapes = [(512, 512, 18, 8, 1)]
    for _ in range(cfg.counter_shapes):
        shapes.append((int(rng.integers(1, 97)), int(rng.integers(1, 97)), int(rng.integers(1, 9)),
                       int(rng.choice(cfg.mus)), int(rng.integers(1, 4))))
    for m, n, b, mu, beta in shapes:
        W = DenseMatrix(rng.uniform(-1, 1, size=(m, n)))
        X = DenseMatrix(rng.standard_normal((n, b)))
        q = quantize_greedy(W, beta)
        packed = PackedLinear(tuple(cfg.packer(p, mu) for p in q.planes), q.alphas)
        counters = biqgemm(packed, X, config=KernelConfig(budget_bytes=UNLIMITED_BUDGET)).counters
        want_build = complexity.lut_build_ops(n, b, mu)
        want_lookups = complexity.lookups(m, n, b, mu, beta)
        if counters.lut_build_ops != want_build or counters.lookups != want_lookups:
            raise CheckFailure(
                f"m={m} n={n} b={b} mu={mu} beta={beta}: build {counters.lut_build_ops} "
                f"(want {want_build}), lookups {counters.lookups} (want {want_lookups}), seed {cfg.seed}")
    return f"{len(shapes)} shapes"


def check_complexity_ratio(cfg, rng):
    for mu in cfg.mus:
        n = mu * int(rng.integers(1, 9))
        b = int(rng.integers(1, 5))
        plane = _random_plane(rng, n, n)
        X = DenseMatrix(rng.standard_normal((n, b)))
        lookups = biqgemm_plane(cfg.packer(plane, mu), X,
                                config=KernelConfig(budget_bytes=UNLIMITED_BUDGET)).counters.lookups
        fma = gemm_dense(plane.as_dense(), X).counters.fma_ops
        if fma != mu * lookups:
            raise CheckFailure(f"n={n} b={b} mu={mu}: fma {fma} / lookups {lookups} != {mu}")
    return "fma/lookups == mu"


def check_footprint(cfg, rng):
    for bits, mb in REFERENCE_WEIGHTS_MB.items():
        got = round(footprint(512, 512, bits).weight_bytes / 1e6, 3)
        if got != mb:
            raise CheckFailure(f"footprint(512, 512, {bits}) = {got} MB, want {mb}")
    return "512x512 weight sizes"


def check_quantizer(cfg, rng):
    for case in range(cfg.quantizer_cases):
        m, n = rng.integers(1, 17, size=2)
        W = DenseMatrix(rng.standard_normal((m, n)))
        errors = residual_curve(W, 4)
        q = quantize_greedy(W, 1)
        slack = rounding_slack(W, len(errors))
        if any(b > a + slack for a, b in zip(errors, errors[1:])):
            raise CheckFailure(f"residual grew with beta {errors} (case {case}, seed {cfg.seed})")
        if not np.array_equal(q.alphas[0], np.mean(np.abs(W.data), axis=1)):
            raise CheckFailure(f"1-bit alpha is not the mean |row| (case {case}, seed {cfg.seed})")
    return f"{cfg.quantizer_cases} matrices"


def check_tiling_invariance(cfg, rng):
    for case in range(cfg.tiling_shapes):
        m, n = rng.integers(4, 65, size=2)
        b = int(rng.integers(1, 9))
        mu = int(rng.choice(cfg.mus))
        beta = int(rng.integers(1, 4))
        groups = -(-n // mu)
        q = quantize_greedy(DenseMatrix(rng.uniform(-1, 1, size=(m, n))), beta)
        packed = PackedLinear(tuple(cfg.packer(p, mu) for p in q.planes), q.alphas)
        X = DenseMatrix(rng.standard_normal((n, b)))
        tiles = {TileShape(groups, m), TileShape(1, 1), TileShape(max(1, groups // 2), max(1, m // 3)),
                 TileShape(min(3, groups), 5)}
        reference = None
        for tile in sorted(tiles, key=lambda t: (t.t_w, t.t_h)):
            for workers in (1, 2, 4):
                config = KernelConfig(budget_bytes=UNLIMITED_BUDGET, workers=workers, deterministic=True)
                y = biqgemm(packed, X, tile=tile, config=config).output.data
                if reference is None:
                    reference = y
                elif not np.array_equal(y, reference):
                    raise CheckFailure(
                        f"tile {tile.t_w}x{tile.t_h} workers={workers} differs at m={m} n={n} "
                        f"b={b} mu={mu} beta={beta} (case {case}, seed {cfg.seed})")
    return f"{cfg.tiling_shapes} shapes"


def check_model_roundtrip(cfg, rng):
    for case in range(cfg.model_cases):
        m, n = rng.integers(1, 33, size=2)
        beta = int(rng.integers(1, 4))
        mu = int(rng.choice(cfg.mus))
        q = quantize_greedy(DenseMatrix(rng.standard_normal((m, n)).astype(np.float32)), beta)
        loaded = load(save(q, mu))
        for i, plane in enumerate(q.planes):
            if not np.array_equal(loaded.keys[i].keys, cfg.packer(plane, mu).keys):
                raise CheckFailure(f"keys changed in round-trip (case {case}, seed {cfg.seed})")
        if not np.array_equal(loaded.quantized.alphas, q.alphas):
            raise CheckFailure(f"alphas changed in round-trip (case {case}, seed {cfg.seed})")
    data = save(q, mu)
    for corrupt, expected in ((b'XXXX' + data[4:], ModelFormatError), (data[:-1], TruncatedModelError)):
        try:
            load(corrupt)
        except expected:
            continue
        raise CheckFailure(f"corrupted file was not rejected with {expected.__name__}")
    return f"{cfg.model_cases} models"


CHECKS = [
    ('codec_bijection', check_codec_bijection),
    ('lut_equivalence', check_lut_equivalence),
    ('oracle_equivalence', check_oracle_equivalence),
    ('counter_laws', check_counter_laws),
    ('complexity_ratio', check_complexity_ratio),
    ('footprint', check_footprint),
    ('quantizer', check_quantizer),
    ('tiling_invariance', check_tiling_invariance),
    ('model_roundtrip', check_model_roundtrip),
]


def verify(config=None):
    config = config or VerifyConfig()
    report = VerifyReport(seed=config.seed)
    for name, check in CHECKS:
        rng = np.random.default_rng([config.seed, len(report.checks)])
        start = time.perf_counter()
        try:
            detail, passed = check(config, rng), True
        except (CheckFailure, BiQGemmError) as e:
            detail, passed = str(e), False
        result = CheckResult(name, passed, detail, time.perf_counter() - start)
        report.checks.append(result)
        if passed:
            logger.info(f"verify {name}: ok ({detail})")
        else:
            logger.error(f"verify {name}: FAILED {detail}")
    return report
