class BiQGemmError(Exception):
    """Base class for every error raised by the library."""


class InvalidMatrixError(BiQGemmError, ValueError):
    pass


class ShapeMismatchError(BiQGemmError, ValueError):
    pass


class RangeError(BiQGemmError, ValueError):
    pass


class BudgetError(BiQGemmError, ValueError):
    pass


class ConfigError(BiQGemmError, ValueError):
    pass


class ModelFormatError(BiQGemmError):
    """The bytes are not a model file this version can read."""


class TruncatedModelError(ModelFormatError):
    pass


class KeyRangeError(ModelFormatError):
    pass
