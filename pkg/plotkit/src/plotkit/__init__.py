"""Renders the radar simulator's CSV outputs into publication-style figures."""

from .render import FigureSpec, build_figure, render
from .schema import SCHEMAS, SchemaError, read_table

__version__ = "0.1.0"

__all__ = [
    "SCHEMAS",
    "FigureSpec",
    "SchemaError",
    "build_figure",
    "read_table",
    "render",
]
