"""Input coercion for the estimator-style API.

Accepts the package's own Graph, a scipy sparse adjacency matrix, an
(m, 2) edge array, or an iterable of edge pairs, and returns a Graph.
Self-loops and duplicate entries are dropped the same way the edge-list
loader drops them.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError
from .graph import Graph


def as_graph(X) -> Graph:
    if isinstance(X, Graph):
        return X
    if hasattr(X, "tocoo") and hasattr(X, "shape"):  # scipy sparse, without the import
        coo = X.tocoo()
        if coo.shape[0] != coo.shape[1]:
            raise InputError(f"adjacency matrix must be square, got {coo.shape}")
        return Graph.from_edges(coo.row, coo.col, n=coo.shape[0])
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 2 and arr.dtype != object:
        return Graph.from_edges(arr[:, 0], arr[:, 1])
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and arr.dtype != object:
        row, col = np.nonzero(arr)
        return Graph.from_edges(row, col, n=arr.shape[0])
    raise InputError(
        "cannot interpret input as a graph: pass a Graph, a square (sparse) adjacency "
        "matrix, or an (m, 2) array of edges"
    )
