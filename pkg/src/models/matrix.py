from dataclasses import dataclass

import numpy as np

from src.engine.errors import InvalidMatrixError

PRECISIONS = {
    32: np.float32,
    64: np.float64,
}


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Row-major real matrix tagged with 32- or 64-bit precision."""
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise InvalidMatrixError(f"Expected a 2-D matrix, got {data.ndim} dimensions")
        if data.dtype not in (np.float32, np.float64):
            data = data.astype(np.float64)
        if not np.all(np.isfinite(data)):
            raise InvalidMatrixError("Matrix contains NaN or Inf")
        object.__setattr__(self, 'data', np.ascontiguousarray(data))

    @classmethod
    def from_rows(cls, rows, precision=64):
        if precision not in PRECISIONS:
            raise InvalidMatrixError(f"Unsupported precision: {precision}")
        return cls(np.array(rows, dtype=PRECISIONS[precision], ndmin=2))

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    @property
    def precision(self):
        return 32 if self.data.dtype == np.float32 else 64

    @property
    def dtype(self):
        return self.data.dtype

    def is_empty(self):
        return self.data.size == 0

    def to_list(self):
        return self.data.tolist()

    def __repr__(self):
        return f'<DenseMatrix {self.rows}x{self.cols} f{self.precision}>'


@dataclass(frozen=True, eq=False)
class BinaryPlane:
    """One {-1, +1} sign matrix of a multi-bit binary code."""
    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs)
        if signs.ndim != 2:
            raise InvalidMatrixError(f"Expected a 2-D sign matrix, got {signs.ndim} dimensions")
        if not np.all((signs == 1) | (signs == -1)):
            raise InvalidMatrixError("Binary plane entries must be -1 or +1")
        object.__setattr__(self, 'signs', np.ascontiguousarray(signs, dtype=np.int8))

    @property
    def rows(self):
        return self.signs.shape[0]

    @property
    def cols(self):
        return self.signs.shape[1]

    @property
    def shape(self):
        return self.signs.shape

    def as_dense(self, precision=64):
        return DenseMatrix(self.signs.astype(PRECISIONS[precision]))

    def __eq__(self, other):
        if not isinstance(other, BinaryPlane):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.signs, other.signs))

    def __repr__(self):
        return f'<BinaryPlane {self.rows}x{self.cols}>'
