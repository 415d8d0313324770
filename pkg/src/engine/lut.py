"""Lookup-table construction: q = M_mu . x for every mu-long sub-vector x."""
import logging
from functools import lru_cache

import numpy as np

from src.engine.errors import ShapeMismatchError
from src.models.keys import check_mu
from src.models.lut_block import LutBlock
from src.models.matrix import BinaryPlane

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _m_mu_signs(mu):
    keys = np.arange(1 << mu, dtype=np.uint32)[:, None]
    signs = ((keys >> np.arange(mu, dtype=np.uint32)) & 1).astype(np.int8) * 2 - 1
    signs.setflags(write=False)
    return signs


def make_m_mu(mu):
    """All 2**mu sign vectors of length mu; row k is the decoding of key k."""
    return BinaryPlane(_m_mu_signs(check_mu(mu)))


def dp_op_count(mu):
    """Counted scalar ops for one DP table: mu adds for key 0, one add per
    remaining first-half entry, one negation per second-half entry."""
    return (1 << mu) + mu - 1


def naive_op_count(mu):
    return (1 << mu) * mu


def _as_subvectors(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] < 1:
        raise ShapeMismatchError(f"Expected sub-vectors of shape (tables, mu), got {x.shape}")
    return x


def build_tables_naive(x):
    """GEMM-based construction for a stack of sub-vectors, shape (T, 2**mu)."""
    x = _as_subvectors(x)
    m_mu = _m_mu_signs(check_mu(x.shape[1])).astype(np.float64)
    return x @ m_mu.T


def build_tables_dp(x):
    """Dynamic-programming construction for a stack of sub-vectors.

    Key 0 (all -1) starts from -sum(x). Setting bit i-1 on top of any key below
    2**(i-1) adds 2*x[i-1]; the upper half is the negated bitwise complement.
    """
    x = _as_subvectors(x)
    mu = check_mu(x.shape[1])
    half = 1 << (mu - 1)
    tables = np.empty((x.shape[0], 1 << mu), dtype=np.float64)

    r0 = -x[:, 0]
    for t in range(1, mu):
        r0 = r0 - x[:, t]
    tables[:, 0] = r0

    for i in range(1, mu):
        step = 1 << (i - 1)
        twice = 2.0 * x[:, i - 1:i]
        tables[:, step:2 * step] = tables[:, :step] + twice
    tables[:, half:] = -tables[:, half - 1::-1]
    return tables


def build_lut_naive(x):
    return build_tables_naive(np.asarray(x, dtype=np.float64).ravel())[0]


def build_lut_dp(x):
    return build_tables_dp(np.asarray(x, dtype=np.float64).ravel())[0]


BUILDERS = {
    'dp': (build_tables_dp, dp_op_count),
    'naive': (build_tables_naive, naive_op_count),
}


def reshape_input(x, mu):
    """Zero-pad an (n, b) input to groups*mu rows and view it as (groups, b, mu)."""
    n, b = x.shape
    groups = -(-n // mu)
    padded = np.zeros((groups * mu, b), dtype=np.float64)
    padded[:n] = x
    return padded.reshape(groups, mu, b).transpose(0, 2, 1)


def build_lut_block(tile, mu, layout='key-major', builder='dp', dtype=np.float64):
    """Build one table per (group, batch column) of a reshaped input tile.

    tile has shape (groups, b, mu). Tables are computed in 64-bit and stored at
    the requested dtype. Returns the block and the counted build ops.
    """
    tile = np.asarray(tile, dtype=np.float64)
    if tile.ndim != 3 or tile.shape[0] == 0 or tile.shape[1] == 0:
        raise ShapeMismatchError(f"LUT tile must be nonempty (groups, b, mu), got {tile.shape}")
    mu = check_mu(mu)
    if tile.shape[2] != mu:
        raise ShapeMismatchError(f"Sub-vectors have length {tile.shape[2]}, mu is {mu}")
    groups, batch, _ = tile.shape
    build, count = BUILDERS[builder]

    tables = build(tile.reshape(groups * batch, mu)).astype(dtype)
    tables = tables.reshape(groups, batch, 1 << mu)
    if layout == 'key-major':
        tables = np.ascontiguousarray(tables.transpose(0, 2, 1))
    logger.debug(f"Built {groups * batch} {builder} tables (mu={mu}, layout={layout})")
    return LutBlock(tables, mu=mu, layout=layout), count(mu) * groups * batch
