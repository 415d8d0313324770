"""Greedy binary-coding quantization with per-row scaling factors."""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.engine.errors import InvalidMatrixError, RangeError, ShapeMismatchError
from src.models.matrix import BinaryPlane, DenseMatrix
from src.models.quantized import QuantizedLinear

logger = logging.getLogger(__name__)


def _greedy_rows(rows, beta):
    """Run the residual recursion on a block of rows in 64-bit."""
    residual = rows.astype(np.float64, copy=True)
    signs = np.empty((beta,) + rows.shape, dtype=np.int8)
    alphas = np.empty((beta, rows.shape[0]), dtype=np.float64)
    for i in range(beta):
        # sign(0) = +1
        signs[i] = np.where(residual >= 0, 1, -1)
        alphas[i] = np.mean(np.abs(residual), axis=1)
        residual -= alphas[i][:, None] * signs[i]
    return signs, alphas


def quantize_greedy(W, beta, workers=1):
    """Approximate W as sum_i alphas[i] (row-broadcast) * planes[i].

    Rows are independent; with workers > 1 they are split into contiguous
    blocks and the result is identical to the sequential run.
    """
    if not isinstance(W, DenseMatrix):
        W = DenseMatrix(W)
    if beta < 1:
        raise RangeError(f"beta must be >= 1, got {beta}")
    if W.is_empty():
        raise InvalidMatrixError("Cannot quantize an empty matrix")

    if workers > 1 and W.rows > 1:
        bounds = np.linspace(0, W.rows, min(workers, W.rows) + 1, dtype=int)
        blocks = [W.data[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda block: _greedy_rows(block, beta), blocks))
        signs = np.concatenate([p[0] for p in parts], axis=1)
        alphas = np.concatenate([p[1] for p in parts], axis=1)
    else:
        signs, alphas = _greedy_rows(W.data, beta)

    logger.debug(f"Quantized {W.rows}x{W.cols} matrix with beta={beta}")
    return QuantizedLinear(
        planes=tuple(BinaryPlane(s) for s in signs),
        alphas=alphas.astype(W.dtype),
    )


def dequantize(q):
    """Rebuild the dense approximation at the precision of the scaling factors."""
    acc = np.zeros((q.m, q.n), dtype=np.float64)
    for plane, alpha in zip(q.planes, q.alphas):
        acc += alpha.astype(np.float64)[:, None] * plane.signs
    return DenseMatrix(acc.astype(q.alphas.dtype))


def quantization_error(W, q):
    """Frobenius norm of W - dequantize(q)."""
    if not isinstance(W, DenseMatrix):
        W = DenseMatrix(W)
    if W.shape != (q.m, q.n):
        raise ShapeMismatchError(f"Matrix is {W.rows}x{W.cols}, quantized code is {q.m}x{q.n}")
    approx = dequantize(q).data.astype(np.float64)
    return float(np.linalg.norm(W.data.astype(np.float64) - approx))


def residual_curve(W, max_beta):
    """Quantization error for every beta in 1..max_beta."""
    q = quantize_greedy(W, max_beta)
    return [
        quantization_error(W, QuantizedLinear(q.planes[:i], q.alphas[:i]))
        for i in range(1, max_beta + 1)
    ]


def rounding_slack(W, steps):
    """Absolute tolerance for residual norms of W compared across steps; once
    a code is exact the residual is rounding noise of this size."""
    return 8 * np.finfo(W.dtype).eps * float(np.linalg.norm(W.data)) * steps
