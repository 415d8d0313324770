from dataclasses import dataclass

import numpy as np

from src.engine.config import LAYOUTS
from src.engine.errors import ConfigError


@dataclass(frozen=True, eq=False)
class LutBlock:
    """Lookup tables for a tile of groups and every batch column.

    table-major entries have shape (groups, batch, 2**mu): table (g, a) is
    contiguous. key-major entries have shape (groups, 2**mu, batch): within a
    group the address of (table a, key k) is k * batch + a, so one key reads
    all batch columns at once.
    """
    entries: np.ndarray
    mu: int
    layout: str

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ConfigError(f"Unknown LUT layout: {self.layout}")
        entries = np.asarray(self.entries)
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def groups(self):
        return self.entries.shape[0]

    @property
    def batch(self):
        return self.entries.shape[2] if self.layout == 'key-major' else self.entries.shape[1]

    @property
    def tables(self):
        return self.groups * self.batch

    def table(self, group, column):
        if self.layout == 'key-major':
            return self.entries[group, :, column]
        return self.entries[group, column, :]

    def lookup(self, group, keys):
        """Entries for each key in one group, shape (len(keys), batch)."""
        if self.layout == 'key-major':
            return self.entries[group][keys]
        return self.entries[group][:, keys].T

    def address(self, column, key):
        """Offset of (table column, key) inside its group's slab."""
        if self.layout == 'key-major':
            return key * self.batch + column
        return column * (1 << self.mu) + key

    def to_layout(self, layout):
        if layout == self.layout:
            return self
        return LutBlock(np.ascontiguousarray(self.entries.transpose(0, 2, 1)), self.mu, layout)
