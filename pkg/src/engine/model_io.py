"""BQGM model files and memory-footprint arithmetic.

Layout (all little-endian):
  header   magic b"BQGM" | version u16 | m u32 | n u32 | beta u8 | mu u8
  planes   beta times: alphas (m x f32) then keys (m x groups, u8 if mu <= 8 else u16)
"""
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from src.engine.config import MAX_MU
from src.engine.errors import KeyRangeError, ModelFormatError, RangeError, TruncatedModelError
from src.engine.packing import pack_keys, unpack_keys
from src.models.keys import KeyMatrix, check_mu, key_dtype
from src.models.quantized import PackedLinear, QuantizedLinear

logger = logging.getLogger(__name__)

MAGIC = b'BQGM'
VERSION = 1
HEADER = struct.Struct('<4sHIIBB')
ALPHA_BYTES = 4


@dataclass(frozen=True)
class ModelHeader:
    version: int
    m: int
    n: int
    beta: int
    mu: int

    @property
    def groups(self):
        return -(-self.n // self.mu)

    @property
    def container_bytes(self):
        return np.dtype(key_dtype(self.mu)).itemsize

    @property
    def plane_bytes(self):
        return ALPHA_BYTES * self.m + self.m * self.groups * self.container_bytes

    @property
    def file_size(self):
        return HEADER.size + self.beta * self.plane_bytes

    def to_dict(self):
        return {
            'version': self.version, 'm': self.m, 'n': self.n, 'beta': self.beta,
            'mu': self.mu, 'groups': self.groups, 'file_size': self.file_size,
        }


@dataclass(frozen=True, eq=False)
class LoadedModel:
    header: ModelHeader
    quantized: QuantizedLinear
    keys: Tuple[KeyMatrix, ...]

    def packed(self):
        return PackedLinear(self.keys, self.quantized.alphas)


def save(q, mu):
    mu = check_mu(mu)
    if q.beta > 255:
        raise RangeError(f"beta={q.beta} does not fit the u8 header field")
    parts = [HEADER.pack(MAGIC, VERSION, q.m, q.n, q.beta, mu)]
    container = np.dtype(key_dtype(mu)).newbyteorder('<')
    for plane, alpha in zip(q.planes, q.alphas):
        parts.append(np.asarray(alpha, dtype='<f4').tobytes())
        parts.append(pack_keys(plane, mu).keys.astype(container).tobytes())
    data = b''.join(parts)
    logger.info(f"Saved model {q.m}x{q.n} beta={q.beta} mu={mu} ({len(data)} bytes)")
    return data


def read_header(data):
    if len(data) < HEADER.size:
        raise TruncatedModelError(f"File is {len(data)} bytes, header needs {HEADER.size}")
    magic, version, m, n, beta, mu = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ModelFormatError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ModelFormatError(f"Unsupported model version {version}")
    if not 1 <= mu <= MAX_MU:
        raise ModelFormatError(f"Header mu={mu} outside [1, {MAX_MU}]")
    if beta < 1 or m < 1 or n < 1:
        raise ModelFormatError(f"Header has empty dimensions m={m} n={n} beta={beta}")
    return ModelHeader(version, m, n, beta, mu)


def load(data):
    """Parse a model file; raises before building anything if it is malformed."""
    data = bytes(data)
    header = read_header(data)
    if len(data) < header.file_size:
        raise TruncatedModelError(f"File is {len(data)} bytes, header promises {header.file_size}")
    if len(data) > header.file_size:
        raise ModelFormatError(f"{len(data) - header.file_size} trailing bytes after the last plane")

    container = np.dtype(key_dtype(header.mu)).newbyteorder('<')
    key_bytes = header.m * header.groups * container.itemsize
    offset = HEADER.size
    alphas, key_matrices = [], []
    for plane in range(header.beta):
        alpha = np.frombuffer(data, dtype='<f4', count=header.m, offset=offset)
        offset += ALPHA_BYTES * header.m
        keys = np.frombuffer(data, dtype=container, count=header.m * header.groups, offset=offset)
        offset += key_bytes
        if keys.size and int(keys.max()) >= (1 << header.mu):
            raise KeyRangeError(f"Plane {plane} holds key {int(keys.max())} >= 2**{header.mu}")
        if not np.all(np.isfinite(alpha)) or np.any(alpha < 0):
            raise ModelFormatError(f"Plane {plane} has negative or non-finite scaling factors")
        alphas.append(alpha.astype(np.float32))
        key_matrices.append(KeyMatrix(keys.reshape(header.m, header.groups), mu=header.mu, n=header.n))

    quantized = QuantizedLinear(tuple(unpack_keys(k) for k in key_matrices), np.stack(alphas))
    logger.info(f"Loaded model {header.m}x{header.n} beta={header.beta} mu={header.mu}")
    return LoadedModel(header=header, quantized=quantized, keys=tuple(key_matrices))


def save_file(path, q, mu):
    Path(path).write_bytes(save(q, mu))


def load_file(path):
    return load(Path(path).read_bytes())


@dataclass(frozen=True)
class Footprint:
    weight_bytes: int
    activation_bytes: int
    output_bytes: int
    alpha_bytes: int

    @property
    def total_bytes(self):
        return self.weight_bytes + self.activation_bytes + self.output_bytes

    @staticmethod
    def megabytes(nbytes):
        return nbytes / 1e6

    def to_dict(self):
        return {
            'weight_bytes': self.weight_bytes,
            'activation_bytes': self.activation_bytes,
            'output_bytes': self.output_bytes,
            'alpha_bytes': self.alpha_bytes,
            'total_bytes': self.total_bytes,
            'weight_mb': round(self.megabytes(self.weight_bytes), 3),
            'total_mb': round(self.megabytes(self.total_bytes), 3),
        }


def footprint(m, n, bits, batch=18, activation_bits=32, output_bits=32):
    """Bytes for weights (raw bit planes), activations and outputs.

    Scaling factors are reported apart from the total; full-precision
    weights (bits >= 32) carry none.
    """
    if bits < 1 or activation_bits < 1 or output_bits < 1:
        raise RangeError(f"Bit widths must be >= 1, got {bits}/{activation_bits}/{output_bits}")
    alpha_bytes = bits * m * ALPHA_BYTES if bits < 32 else 0
    return Footprint(
        weight_bytes=m * n * bits // 8,
        activation_bytes=n * batch * activation_bits // 8,
        output_bytes=m * batch * output_bits // 8,
        alpha_bytes=alpha_bytes,
    )
