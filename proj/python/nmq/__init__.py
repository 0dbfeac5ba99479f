from ._core import (
    DimensionError,
    Error,
    Model,
    NotHurwitzError,
    ParseError,
    build,
    check,
    example,
    h2_distance,
    reduce,
    reduced_example,
)

__all__ = [
    "DimensionError",
    "Error",
    "Model",
    "NotHurwitzError",
    "ParseError",
    "build",
    "check",
    "example",
    "h2_distance",
    "reduce",
    "reduced_example",
]
