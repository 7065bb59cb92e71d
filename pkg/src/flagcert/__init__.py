"""Exact flag-algebra certificates and extremal oracles for edges on odd cycles."""

from __future__ import annotations

from .errors import (
    CapacityError,
    CertificateSyntaxError,
    ContractViolation,
    FlagcertError,
    RoundingError,
)
from .field import QSqrt2, format_number, parse_number
from .graphs import BLACK, BLUE, NONE, RED, ColoredGraph, PatternGraph, canonical_form
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BLACK",
    "BLUE",
    "NONE",
    "RED",
    "CapacityError",
    "CertificateSyntaxError",
    "ColoredGraph",
    "ContractViolation",
    "FlagcertError",
    "PatternGraph",
    "QSqrt2",
    "RoundingError",
    "canonical_form",
    "format_number",
    "parse_number",
    "__version__",
]
