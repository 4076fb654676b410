"""Backend selection for the state-vector kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Setting ``QVOTE_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from qvote import _pykernels

if os.environ.get("QVOTE_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from qvote import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"
BACKENDS = {"python": _pykernels}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl


def _prep(amps, matrix, targets):
    return (
        np.ascontiguousarray(amps, dtype=np.complex128),
        np.ascontiguousarray(matrix, dtype=np.complex128),
        np.ascontiguousarray(targets, dtype=np.int64),
    )


def apply_gate(amps, n, u, targets, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    a, m, t = _prep(amps, u, targets)
    return impl.apply_gate(a, n, m, t)


def project_all(amps, n, basis, targets, backend=None):
    impl = BACKENDS[backend] if backend else _impl
    a, m, t = _prep(amps, basis, targets)
    return impl.project_all(a, n, m, t)
