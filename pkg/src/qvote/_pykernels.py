"""Pure numpy implementation of the state-vector kernels.

Qubit 0 is the most significant bit of the amplitude index.
"""

import numpy as np


def apply_gate(amps, n, u, targets):
    k = len(targets)
    psi = np.asarray(amps, dtype=np.complex128).reshape((2,) * n)
    gate = np.asarray(u, dtype=np.complex128).reshape((2,) * (2 * k))
    out = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), list(targets)))
    # tensordot puts the gate's output axes first
    out = np.moveaxis(out, list(range(k)), list(targets))
    return np.ascontiguousarray(out.reshape(-1))


def project_all(amps, n, basis, targets):
    """Return ``basis.conj() @ psi`` with ``psi`` regrouped as (targets, rest)."""
    k = len(targets)
    psi = np.asarray(amps, dtype=np.complex128).reshape((2,) * n)
    psi = np.moveaxis(psi, list(targets), list(range(k))).reshape(1 << k, -1)
    return np.asarray(basis, dtype=np.complex128).conj() @ psi
