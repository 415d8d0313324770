from dataclasses import dataclass

import numpy as np

from src.engine.config import MAX_MU, WORD_BITS
from src.engine.errors import InvalidMatrixError, RangeError


def check_mu(mu):
    if not isinstance(mu, (int, np.integer)) or not 1 <= mu <= MAX_MU:
        raise RangeError(f"LUT-unit mu must be in [1, {MAX_MU}], got {mu}")
    return int(mu)


def key_dtype(mu):
    """Smallest unsigned container holding mu bits."""
    return np.uint8 if mu <= 8 else np.uint16


@dataclass(frozen=True, eq=False)
class KeyMatrix:
    """mu-bit packed form of one binary plane.

    keys[r, g] holds bits of plane[r, mu*g : mu*g + mu], LSB first, bit 1 = +1.
    Positions past n (the pad) are bit 0.
    """
    keys: np.ndarray
    mu: int
    n: int

    def __post_init__(self):
        mu = check_mu(self.mu)
        keys = np.asarray(self.keys)
        if keys.ndim != 2:
            raise InvalidMatrixError(f"Key matrix must be 2-D, got {keys.ndim} dimensions")
        groups = -(-self.n // mu)
        if keys.shape[1] != groups:
            raise InvalidMatrixError(
                f"Key matrix has {keys.shape[1]} groups, n={self.n} mu={mu} needs {groups}")
        if keys.size and int(keys.max()) >= (1 << mu):
            raise RangeError(f"Key {int(keys.max())} does not fit in {mu} bits")
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'keys', np.ascontiguousarray(keys, dtype=key_dtype(mu)))

    @property
    def m(self):
        return self.keys.shape[0]

    @property
    def groups(self):
        return self.keys.shape[1]

    @property
    def pad(self):
        return self.groups * self.mu - self.n

    def __eq__(self, other):
        if not isinstance(other, KeyMatrix):
            return NotImplemented
        return (self.mu, self.n) == (other.mu, other.n) and bool(np.array_equal(self.keys, other.keys))

    def __repr__(self):
        return f'<KeyMatrix {self.m}x{self.groups} mu={self.mu} pad={self.pad}>'


@dataclass(frozen=True, eq=False)
class WordStream:
    """Binary plane packed into 32-bit words, each row starting on a new word."""
    words: np.ndarray
    rows: int
    cols: int

    def __post_init__(self):
        words = np.ascontiguousarray(np.asarray(self.words, dtype=np.uint32).ravel())
        object.__setattr__(self, 'words', words)

    @property
    def words_per_row(self):
        return -(-self.cols // WORD_BITS)

    def as_rows(self):
        return self.words.reshape(self.rows, self.words_per_row)
