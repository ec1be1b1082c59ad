"""Pure-NumPy fallback kernels, same contract as the compiled core."""

from functools import reduce

import numpy as np

NAME = "python"


def kron(a, b):
    """Kronecker product of two square complex matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_chain(mats):
    """Kronecker product of a sequence of square complex matrices."""
    if len(mats) == 0:
        raise ValueError("kron_chain needs at least one factor")
    return reduce(np.kron, [np.asarray(m, dtype=complex) for m in mats])


def eigh(m):
    """Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix."""
    w, v = np.linalg.eigh(np.asarray(m, dtype=complex))
    return w, v


def eigvalsh(m):
    """Eigenvalues (ascending) of a Hermitian matrix."""
    return np.linalg.eigvalsh(np.asarray(m, dtype=complex))
