"""Kernel backend selection.

The compiled extension ``flagcert._ckernels`` is used when it imports;
otherwise the pure-Python module with the same API is used. Setting
``FLAGCERT_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("FLAGCERT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels

BACKEND: str = _impl.BACKEND
# the C kernels use 64-bit masks
C_MAX_VERTICES = 64


def canon(n, red, blue, nfixed=0):
    if n > C_MAX_VERTICES:
        return _pykernels.canon(n, red, blue, nfixed)
    return _impl.canon(n, red, blue, nfixed)


def cycle_edges(n, adj, length):
    if n > C_MAX_VERTICES:
        return _pykernels.cycle_edges(n, adj, length)
    return _impl.cycle_edges(n, adj, length)


def witness_cycle(n, adj, u, v, length):
    return _pykernels.witness_cycle(n, adj, u, v, length)
