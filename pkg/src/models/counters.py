from dataclasses import dataclass, field, fields
from typing import Optional

from src.engine.errors import ConfigError
from src.models.matrix import DenseMatrix


@dataclass(frozen=True)
class TileShape:
    """t_w groups by t_h key-matrix rows."""
    t_w: int
    t_h: int

    def __post_init__(self):
        if self.t_w < 1 or self.t_h < 1:
            raise ConfigError(f"Tile dimensions must be >= 1, got {self.t_w}x{self.t_h}")


@dataclass
class OpCounters:
    lut_build_ops: int = 0
    lookups: int = 0
    accumulate_ops: int = 0
    scale_ops: int = 0
    fma_ops: int = 0
    unpack_ops: int = 0

    def merge(self, other):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))
        return self

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class PhaseTimes:
    build: float = 0.0
    query: float = 0.0
    replace: float = 0.0

    def to_dict(self):
        return {'build': self.build, 'query': self.query, 'replace': self.replace}


@dataclass
class GemmResult:
    output: DenseMatrix
    counters: OpCounters = field(default_factory=OpCounters)
    phases: Optional[PhaseTimes] = None
    tile: Optional[TileShape] = None
    correct: bool = True

    def to_dict(self):
        return {
            'output': self.output.to_list(),
            'counters': self.counters.to_dict(),
            'phases': self.phases.to_dict() if self.phases else None,
            'tile': {'t_w': self.tile.t_w, 't_h': self.tile.t_h} if self.tile else None,
            'correct': self.correct,
        }
