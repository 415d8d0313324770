from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.engine.errors import InvalidMatrixError, ShapeMismatchError
from src.models.keys import KeyMatrix
from src.models.matrix import BinaryPlane


@dataclass(frozen=True, eq=False)
class QuantizedLinear:
    """beta binary planes with one nonnegative scaling vector per plane.

    alphas has shape (beta, m); row r of plane i is scaled by alphas[i, r].
    """
    planes: Tuple[BinaryPlane, ...]
    alphas: np.ndarray

    def __post_init__(self):
        planes = tuple(self.planes)
        alphas = np.asarray(self.alphas)
        if not planes:
            raise InvalidMatrixError("A quantized matrix needs at least one plane")
        if alphas.ndim != 2 or alphas.shape[0] != len(planes):
            raise ShapeMismatchError(
                f"alphas shape {alphas.shape} does not match {len(planes)} planes")
        shape = planes[0].shape
        for i, plane in enumerate(planes):
            if plane.shape != shape:
                raise ShapeMismatchError(f"Plane {i} has shape {plane.shape}, expected {shape}")
        if alphas.shape[1] != shape[0]:
            raise ShapeMismatchError(f"alphas cover {alphas.shape[1]} rows, planes have {shape[0]}")
        if np.any(alphas < 0) or not np.all(np.isfinite(alphas)):
            raise InvalidMatrixError("Scaling factors must be finite and nonnegative")
        if alphas.dtype not in (np.float32, np.float64):
            alphas = alphas.astype(np.float64)
        object.__setattr__(self, 'planes', planes)
        object.__setattr__(self, 'alphas', alphas)

    @property
    def m(self):
        return self.planes[0].rows

    @property
    def n(self):
        return self.planes[0].cols

    @property
    def beta(self):
        return len(self.planes)

    @property
    def precision(self):
        return 32 if self.alphas.dtype == np.float32 else 64

    def __repr__(self):
        return f'<QuantizedLinear {self.m}x{self.n} beta={self.beta}>'


@dataclass(frozen=True, eq=False)
class PackedLinear:
    """A QuantizedLinear whose planes are stored as key matrices sharing mu."""
    keys: Tuple[KeyMatrix, ...]
    alphas: np.ndarray

    def __post_init__(self):
        keys = tuple(self.keys)
        if not keys:
            raise InvalidMatrixError("A packed matrix needs at least one key matrix")
        first = keys[0]
        for i, km in enumerate(keys):
            if (km.m, km.n, km.mu) != (first.m, first.n, first.mu):
                raise ShapeMismatchError(
                    f"Key matrix {i} is {km.m}x{km.n} mu={km.mu}, "
                    f"expected {first.m}x{first.n} mu={first.mu}")
        alphas = np.asarray(self.alphas)
        if alphas.shape != (len(keys), first.m):
            raise ShapeMismatchError(
                f"alphas shape {alphas.shape} does not match ({len(keys)}, {first.m})")
        object.__setattr__(self, 'keys', keys)
        object.__setattr__(self, 'alphas', alphas)

    @property
    def m(self):
        return self.keys[0].m

    @property
    def n(self):
        return self.keys[0].n

    @property
    def mu(self):
        return self.keys[0].mu

    @property
    def groups(self):
        return self.keys[0].groups

    @property
    def beta(self):
        return len(self.keys)
