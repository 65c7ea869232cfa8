"""Backend selection for the CDCL core.

The compiled extension is used when it was built; otherwise, or when
``FSMMINT_PURE_PYTHON`` is set to a non-empty value, the pure-Python solver
is loaded.  Both expose the same ``Solver`` class.
"""
from __future__ import annotations

import os

from . import _cdcl_py

PythonSolver = _cdcl_py.Solver

try:
    if os.environ.get("FSMMINT_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _cdcl  # type: ignore[attr-defined]
except ImportError:
    _cdcl = None
    CompiledSolver = None
    Solver = PythonSolver
else:
    CompiledSolver = _cdcl.Solver
    Solver = CompiledSolver

BACKEND = Solver.backend
