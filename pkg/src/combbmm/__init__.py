"""Combinatorial Boolean matrix multiplication through grid-norm regularity
decompositions, with triangle detection, listing, enumeration and a 3-SUM
reduction on top."""

from .bitmatrix import (
    BoolMatrix,
    TripartiteGraph,
    bool_product,
    col_degree,
    count_product,
    density,
    row_degree,
    submatrix,
    transpose,
    zero_rectangle,
)

__version__ = "0.1.0"

__all__ = [
    "BoolMatrix",
    "TripartiteGraph",
    "bool_product",
    "col_degree",
    "count_product",
    "density",
    "row_degree",
    "submatrix",
    "transpose",
    "zero_rectangle",
]
