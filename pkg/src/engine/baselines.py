"""Reference multiplies: dense oracle, unpack-then-GEMM and the bandwidth probe."""
import logging

import numpy as np

from src.engine.config import WORD_BITS
from src.engine.errors import ShapeMismatchError
from src.engine.packing import unpack_plane_words
from src.models.counters import GemmResult, OpCounters
from src.models.matrix import DenseMatrix

logger = logging.getLogger(__name__)


def _dense(x):
    return x if isinstance(x, DenseMatrix) else DenseMatrix(x)


def gemm_dense(A, X):
    """Plain m*n*b product, accumulated in 64-bit in ascending k order.

    Each step is a rank-1 update, so every output cell sees exactly the
    additions a scalar triple loop would perform.
    """
    A, X = _dense(A), _dense(X)
    if A.cols != X.rows:
        raise ShapeMismatchError(f"Cannot multiply {A.rows}x{A.cols} by {X.rows}x{X.cols}")
    a = A.data.astype(np.float64)
    x = X.data.astype(np.float64)
    y = np.zeros((A.rows, X.cols), dtype=np.float64)
    for k in range(A.cols):
        y += a[:, k:k + 1] * x[k]
    counters = OpCounters(fma_ops=A.rows * A.cols * X.cols)
    return GemmResult(output=DenseMatrix(y.astype(X.dtype)), counters=counters)


def gemm_unpack(stream, X):
    """Unpack every 32-bit word to signs, then run gemm_dense on the +-1 matrix."""
    X = _dense(X)
    if stream.cols != X.rows:
        raise ShapeMismatchError(f"Plane has {stream.cols} columns, input has {X.rows} rows")
    plane = unpack_plane_words(stream)
    result = gemm_dense(plane.as_dense(X.precision), X)
    result.counters.unpack_ops = stream.words.size * WORD_BITS
    return result


def gemm_unpack_linear(streams, alphas, X):
    """Multi-bit unpack baseline: sum_i alphas[i] * gemm_unpack(stream_i, X)."""
    X = _dense(X)
    alphas = np.asarray(alphas, dtype=np.float64)
    if len(streams) != alphas.shape[0]:
        raise ShapeMismatchError(f"{len(streams)} word streams but {alphas.shape[0]} alpha vectors")
    counters = OpCounters()
    y = None
    for stream, alpha in zip(streams, alphas):
        part = gemm_unpack(stream, X)
        counters.merge(part.counters)
        scaled = alpha[:, None] * part.output.data.astype(np.float64)
        y = scaled if y is None else y + scaled
    counters.scale_ops += alphas.size * X.cols
    return GemmResult(output=DenseMatrix(y.astype(X.dtype)), counters=counters)


def gemm_bandwidth_probe(stream, X):
    """Multiply each packed word, as a number, by one input row per word.

    The values are wrong on purpose: this only moves the packed data through
    the same loop shape so its memory traffic can be timed. The result is
    flagged correct=False.
    """
    X = _dense(X)
    if stream.cols != X.rows:
        raise ShapeMismatchError(f"Plane has {stream.cols} columns, input has {X.rows} rows")
    words = stream.as_rows().astype(np.float64)
    x = X.data.astype(np.float64)
    y = np.zeros((stream.rows, X.cols), dtype=np.float64)
    for w in range(stream.words_per_row):
        y += words[:, w:w + 1] * x[w * WORD_BITS]
    counters = OpCounters(fma_ops=stream.rows * stream.words_per_row * X.cols)
    return GemmResult(output=DenseMatrix(y.astype(X.dtype)), counters=counters, correct=False)
