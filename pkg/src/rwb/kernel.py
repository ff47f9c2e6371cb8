"""Selects the compiled search kernel when available, else the Python one.

Set ``RWB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _search

BACKEND = "python"
search = _search.search

if os.environ.get("RWB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _csearch
    except ImportError:
        pass
    else:
        search = _csearch.search
        BACKEND = "cython"

python_search = _search.search
