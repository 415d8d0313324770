"""BiQGEMM: table lookups over a key matrix with LUT-stationary tiling."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.engine.config import DEFAULT_MU, KernelConfig
from src.engine.errors import BudgetError, ShapeMismatchError
from src.engine.lut import build_lut_block, reshape_input
from src.engine.packing import pack_linear
from src.models.counters import GemmResult, OpCounters, PhaseTimes, TileShape
from src.models.keys import KeyMatrix, check_mu, key_dtype
from src.models.lut_block import LutBlock
from src.models.matrix import DenseMatrix
from src.models.quantized import PackedLinear, QuantizedLinear

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TilePlan:
    tile: TileShape
    group_tiles: List[Tuple[int, int]]
    row_tiles: List[Tuple[int, int]]
    order: str = 'lut-stationary'


def _spans(total, step):
    return [(lo, min(lo + step, total)) for lo in range(0, total, step)]


def lut_tile_bytes(t_w, mu, b, entry_size):
    return t_w * (1 << mu) * b * entry_size


def plan_tiles(m, groups, b, mu, budget, entry_size=4, workers=1):
    """Pick the widest LUT tile that fits the budget, then a row tile whose
    keys fit a budget of the same size. The LUT tile is the stationary
    operand and may use the whole budget; the key tile streams past it.
    All row tiles of a group tile are consumed before its tables are dropped."""
    mu = check_mu(mu)
    per_group = lut_tile_bytes(1, mu, b, entry_size)
    if budget < per_group:
        raise BudgetError(
            f"Budget of {budget} bytes cannot hold one group of tables ({per_group} bytes)")
    t_w = max(1, min(groups, budget // per_group))
    key_bytes = np.dtype(key_dtype(mu)).itemsize
    t_h = max(1, min(m, budget // (t_w * key_bytes)))
    if workers > 1:
        t_h = min(t_h, -(-m // workers))
    return make_plan(TileShape(t_w, max(1, t_h)), m, groups)


def make_plan(tile, m, groups):
    return TilePlan(tile=tile, group_tiles=_spans(groups, tile.t_w), row_tiles=_spans(m, tile.t_h))


def check_tile(tile, mu, b, entry_size, budget):
    needed = lut_tile_bytes(tile.t_w, mu, b, entry_size)
    if needed > budget:
        raise BudgetError(
            f"Tile width {tile.t_w} needs {needed} bytes of tables, budget is {budget}")


class _Traversal:
    """One multiply: shared inputs plus the per-tile work."""

    def __init__(self, key_matrices, X, config):
        self.keys = [km.keys for km in key_matrices]
        self.mu = key_matrices[0].mu
        self.m = key_matrices[0].m
        self.groups = key_matrices[0].groups
        self.batch = X.cols
        self.dtype = X.dtype
        self.config = config
        self.layout = config.resolve_layout(self.batch)
        self.xhat = reshape_input(X.data, self.mu)

    def _build_tile(self, tile):
        return build_lut_block(tile, self.mu, layout=self.layout,
                               builder=self.config.builder, dtype=self.dtype)

    def build(self, g0, g1, counters, phases, pool=None):
        """Tables for groups g0..g1. With a pool the tables are split along the
        longer of the group and batch axes; each table is built by one worker."""
        start = time.perf_counter()
        tile = self.xhat[g0:g1]
        if pool is None:
            block, ops = self._build_tile(tile)
        else:
            axis = 0 if tile.shape[0] >= tile.shape[1] else 1
            pieces = [p for p in np.array_split(tile, self.config.workers, axis=axis) if p.size]
            parts = list(pool.map(self._build_tile, pieces))
            ops = sum(o for _, o in parts)
            out_axis = 0 if axis == 0 else (2 if self.layout == 'key-major' else 1)
            block = LutBlock(np.concatenate([part.entries for part, _ in parts], axis=out_axis),
                             mu=self.mu, layout=self.layout)
        phases.build += time.perf_counter() - start
        counters.lut_build_ops += ops
        return block

    def consume(self, block, g0, g1, r0, r1, acc):
        """Accumulate one (row tile, group tile) pair for every plane into acc.

        Groups are added in ascending order, so each output cell sees the same
        sequence of additions for any tiling.
        """
        counters = OpCounters()
        phases = PhaseTimes()
        for plane, keys in enumerate(self.keys):
            start = time.perf_counter()
            key_tile = np.ascontiguousarray(keys[r0:r1, g0:g1], dtype=np.intp)
            mid = time.perf_counter()
            out = acc[plane, r0:r1]
            for g in range(g1 - g0):
                out += block.lookup(g, key_tile[:, g])
            phases.replace += mid - start
            phases.query += time.perf_counter() - mid
        n_lookups = (r1 - r0) * (g1 - g0) * self.batch * len(self.keys)
        counters.lookups += n_lookups
        counters.accumulate_ops += n_lookups
        return counters, phases

    def run_groups(self, plan, group_tiles, acc, pool=None):
        counters = OpCounters()
        phases = PhaseTimes()
        for g0, g1 in group_tiles:
            block = self.build(g0, g1, counters, phases, pool=pool)
            if pool is None:
                parts = [self.consume(block, g0, g1, r0, r1, acc) for r0, r1 in plan.row_tiles]
            else:
                parts = list(pool.map(lambda rows: self.consume(block, g0, g1, rows[0], rows[1], acc),
                                      plan.row_tiles))
            for c, p in parts:
                counters.merge(c)
                phases.build += p.build
                phases.query += p.query
                phases.replace += p.replace
        return counters, phases


def _multiply(key_matrices, alphas, X, tile, config):
    if not isinstance(X, DenseMatrix):
        X = DenseMatrix(X)
    config = config or KernelConfig()
    first = key_matrices[0]
    if X.rows != first.n:
        raise ShapeMismatchError(f"Input has {X.rows} rows, key matrix expects n={first.n}")
    if first.mu * first.groups < X.rows:
        raise ShapeMismatchError(f"{first.groups} groups of mu={first.mu} cannot cover n={X.rows}")
    if X.cols == 0 or first.m == 0:
        raise ShapeMismatchError(f"Empty operands: {first.m}x{first.n} times {X.rows}x{X.cols}")

    entry_size = X.dtype.itemsize
    if tile is None:
        plan = plan_tiles(first.m, first.groups, X.cols, first.mu, config.budget_bytes,
                          entry_size=entry_size, workers=config.workers)
    else:
        check_tile(tile, first.mu, X.cols, entry_size, config.budget_bytes)
        plan = make_plan(tile, first.m, first.groups)

    traversal = _Traversal(key_matrices, X, config)
    beta = len(key_matrices)
    acc = np.zeros((beta, first.m, X.cols), dtype=np.float64)

    if config.workers == 1:
        counters, phases = traversal.run_groups(plan, plan.group_tiles, acc)
    elif config.deterministic:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            counters, phases = traversal.run_groups(plan, plan.group_tiles, acc, pool=pool)
    else:
        counters, phases = _run_split_groups(traversal, plan, acc, config.workers)

    if alphas is None:
        y = acc[0]
    else:
        y = np.zeros((first.m, X.cols), dtype=np.float64)
        for plane in range(beta):
            y += np.asarray(alphas[plane], dtype=np.float64)[:, None] * acc[plane]
        counters.scale_ops += beta * first.m * X.cols

    logger.debug(
        f"biqgemm {first.m}x{first.n}x{X.cols} beta={beta} mu={first.mu} "
        f"tile={plan.tile.t_w}x{plan.tile.t_h} lookups={counters.lookups}")
    return GemmResult(output=DenseMatrix(y.astype(X.dtype)), counters=counters,
                      phases=phases if config.profile else None, tile=plan.tile)


def _run_split_groups(traversal, plan, acc, workers):
    """Give each worker a contiguous range of group tiles and a private
    accumulator; partials are summed in completion order."""
    chunks = [c for c in np.array_split(np.arange(len(plan.group_tiles)), workers) if c.size]
    counters = OpCounters()
    phases = PhaseTimes()

    def work(chunk):
        partial = np.zeros_like(acc)
        tiles = [plan.group_tiles[i] for i in chunk]
        c, p = traversal.run_groups(plan, tiles, partial)
        return partial, c, p

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, chunk) for chunk in chunks]
        for future in as_completed(futures):
            partial, c, p = future.result()
            acc += partial
            counters.merge(c)
            phases.build += p.build
            phases.query += p.query
            phases.replace += p.replace
    return counters, phases


def biqgemm_plane(K, X, tile=None, config=None):
    """Y = B . X for the single plane B encoded by K (no scaling)."""
    if not isinstance(K, KeyMatrix):
        raise ShapeMismatchError(f"Expected a KeyMatrix, got {type(K).__name__}")
    return _multiply([K], None, X, tile, config)


def biqgemm(q, X, tile=None, config=None, mu=DEFAULT_MU):
    """Y = sum_i alphas[i] * (B_i . X); tables are built once per input tile
    and reused by every plane."""
    if isinstance(q, QuantizedLinear):
        q = pack_linear(q, mu)
    if not isinstance(q, PackedLinear):
        raise ShapeMismatchError(f"Expected a PackedLinear, got {type(q).__name__}")
    return _multiply(list(q.keys), q.alphas, X, tile, config)
