from dataclasses import dataclass
from typing import Optional

from src.engine.errors import ConfigError

DEFAULT_MU = 8
MAX_MU = 16
DEFAULT_SEED = 0x5EED
DEFAULT_BUDGET_BYTES = 32 * 1024
WORD_BITS = 32

BUILDERS = ('dp', 'naive')
LAYOUTS = ('table-major', 'key-major')


@dataclass(frozen=True)
class KernelConfig:
    """Knobs for one BiQGEMM call.

    layout=None picks key-major for b > 1 and table-major for b = 1.
    """
    budget_bytes: int = DEFAULT_BUDGET_BYTES
    workers: int = 1
    deterministic: bool = True
    layout: Optional[str] = None
    builder: str = 'dp'
    profile: bool = False

    def __post_init__(self):
        if self.budget_bytes < 1:
            raise ConfigError(f"budget_bytes must be positive, got {self.budget_bytes}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.builder not in BUILDERS:
            raise ConfigError(f"Unknown LUT builder: {self.builder}")
        if self.layout is not None and self.layout not in LAYOUTS:
            raise ConfigError(f"Unknown LUT layout: {self.layout}")

    def resolve_layout(self, batch):
        if self.layout is not None:
            return self.layout
        return 'key-major' if batch > 1 else 'table-major'
