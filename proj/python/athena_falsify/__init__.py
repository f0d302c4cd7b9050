"""Falsification of signal temporal logic requirements on built-in plants."""

from ._core import (
    AthenaError,
    HorizonError,
    InvalidArgument,
    MissingChannel,
    NotFound,
    NumericalDivergence,
    ParseError,
    PortMismatch,
    SemanticError,
    catalog,
    catalog_ids,
    falsify,
    formula_horizon,
    interpolate,
    normalize,
    plants,
    rank_sum,
    robustness,
    satisfied,
    simulate,
)

__all__ = [
    "AthenaError",
    "HorizonError",
    "InvalidArgument",
    "MissingChannel",
    "NotFound",
    "NumericalDivergence",
    "ParseError",
    "PortMismatch",
    "SemanticError",
    "catalog",
    "catalog_ids",
    "falsify",
    "formula_horizon",
    "interpolate",
    "normalize",
    "plants",
    "rank_sum",
    "robustness",
    "satisfied",
    "simulate",
]
