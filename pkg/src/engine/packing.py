"""Sign/bit codec: mu-bit LUT keys and 32-bit word streams.

Bit t of a key is position t of its mu-long sub-vector (LSB first);
bit 1 stands for +1 and bit 0 for -1. Pad positions are bit 0.
"""
import logging

import numpy as np

from src.engine.config import WORD_BITS
from src.engine.errors import ShapeMismatchError
from src.models.keys import KeyMatrix, WordStream, check_mu
from src.models.matrix import BinaryPlane
from src.models.quantized import PackedLinear

logger = logging.getLogger(__name__)

_WORD_SHIFTS = np.arange(WORD_BITS, dtype=np.uint32)


def _bits(plane, width):
    """Plane as 0/1 bits, each row zero-padded to a multiple of width."""
    bits = (plane.signs > 0).astype(np.uint32)
    pad = -plane.cols % width
    if pad:
        bits = np.pad(bits, ((0, 0), (0, pad)))
    return bits


def pack_keys(plane, mu):
    mu = check_mu(mu)
    bits = _bits(plane, mu)
    groups = bits.shape[1] // mu
    weights = np.uint32(1) << np.arange(mu, dtype=np.uint32)
    keys = (bits.reshape(plane.rows, groups, mu) * weights).sum(axis=2)
    return KeyMatrix(keys, mu=mu, n=plane.cols)


def unpack_keys(key_matrix):
    """Inverse of pack_keys on the live bit positions."""
    mu = key_matrix.mu
    shifts = np.arange(mu, dtype=np.uint32)
    bits = (key_matrix.keys.astype(np.uint32)[:, :, None] >> shifts) & 1
    signs = bits.reshape(key_matrix.m, -1)[:, :key_matrix.n].astype(np.int8) * 2 - 1
    return BinaryPlane(signs)


def pack_linear(q, mu):
    return PackedLinear(tuple(pack_keys(p, mu) for p in q.planes), q.alphas)


def unpack_word(x):
    """Expand one 32-bit word into 32 signs: w_i = ((x >> i) & 1) * 2 - 1."""
    x = np.uint32(int(x) & 0xFFFFFFFF)
    return (((x >> _WORD_SHIFTS) & 1).astype(np.int8) * 2) - 1


def unpack_words(words):
    """Vectorised unpack_word over an array of words, shape (..., 32)."""
    words = np.asarray(words, dtype=np.uint32)
    return (((words[..., None] >> _WORD_SHIFTS) & 1).astype(np.int8) * 2) - 1


def pack_plane_words(plane):
    bits = _bits(plane, WORD_BITS)
    words = (bits.reshape(plane.rows, -1, WORD_BITS) << _WORD_SHIFTS).sum(axis=2, dtype=np.uint64)
    return WordStream(words.astype(np.uint32), rows=plane.rows, cols=plane.cols)


def unpack_plane_words(stream):
    expected = stream.rows * stream.words_per_row
    if stream.words.size != expected:
        raise ShapeMismatchError(
            f"Word stream holds {stream.words.size} words, a {stream.rows}x{stream.cols} plane needs {expected}")
    signs = unpack_words(stream.as_rows()).reshape(stream.rows, -1)
    return BinaryPlane(signs[:, :stream.cols])
