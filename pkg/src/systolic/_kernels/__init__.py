"""Shortest-path kernels for the systole search.

The compiled Cython kernel is preferred; the pure-Python implementation in
:mod:`.fallback` is selected when the extension is missing or when the
environment variable ``SYSTOLIC_PURE_PYTHON`` is set to a nonzero value.
Both expose the same ``dijkstra_box`` contract and produce identical
distances.
"""

import os

from .fallback import dijkstra_box as python_dijkstra_box

compiled_dijkstra_box = None
if os.environ.get("SYSTOLIC_PURE_PYTHON", "0") in ("", "0"):
    try:
        from ._dijkstra import dijkstra_box as compiled_dijkstra_box
    except ImportError:
        compiled_dijkstra_box = None

USING_COMPILED = compiled_dijkstra_box is not None
dijkstra_box = compiled_dijkstra_box if USING_COMPILED else python_dijkstra_box

__all__ = ["dijkstra_box", "python_dijkstra_box", "compiled_dijkstra_box",
           "USING_COMPILED"]
