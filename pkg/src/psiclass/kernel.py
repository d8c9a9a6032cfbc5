"""Selects the recursion backend at import time.

The compiled ``_ckernel`` is used when it was built; otherwise the
pure-Python ``_pykernel``.  Setting ``PSICLASS_PURE_PYTHON=1`` forces the
fallback.
"""
import os

from . import _pykernel

PyEvaluator = _pykernel.Evaluator

try:
    if os.environ.get("PSICLASS_PURE_PYTHON") == "1":
        raise ImportError("pure Python requested")
    from ._ckernel import Evaluator as CEvaluator
except ImportError:
    CEvaluator = None

Evaluator = CEvaluator if CEvaluator is not None else PyEvaluator
BACKEND = Evaluator.backend

__all__ = ["Evaluator", "PyEvaluator", "CEvaluator", "BACKEND"]
