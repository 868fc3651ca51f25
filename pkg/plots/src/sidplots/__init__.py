"""Figure rendering for stablesid experiment exports."""

__version__ = "0.1.0"

from .figures import EmptyGroup, FigureSpec, MissingColumn, RenderResult, render

__all__ = [
    "EmptyGroup",
    "FigureSpec",
    "MissingColumn",
    "RenderResult",
    "render",
    "__version__",
]
