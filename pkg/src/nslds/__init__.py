"""Limited Discrepancy Search and Nested Search with four benchmark domains."""

from .search import (
    SearchLimits,
    SearchResult,
    SearchStats,
    State,
    Termination,
    lds,
    make_figure_tree,
    make_uniform_tree,
    ns,
    playout,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "SearchLimits", "SearchResult", "SearchStats", "State", "Termination",
    "lds", "make_figure_tree", "make_uniform_tree", "ns", "playout", "search",
]
