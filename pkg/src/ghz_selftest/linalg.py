"""Dense complex linear algebra substrate.

Plain ``numpy.ndarray`` (complex128) carries all operators. Matrices here
are small (dimension at most 2**7 = 128), so the kernels go through the
backend module which picks the compiled core when available.
"""

from dataclasses import dataclass

import numpy as np

from . import backends
from .errors import InvalidInput, NotHermitian

HERMITIAN_ATOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
# rotated Pauli pair used by the robustness channels
SIGMA_A = (SIGMA_X + SIGMA_Z) / np.sqrt(2)
SIGMA_B = (SIGMA_X - SIGMA_Z) / np.sqrt(2)


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition: ascending eigenvalues, orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermitian_defect(m) -> float:
    """Max entrywise deviation of ``m`` from its own adjoint."""
    m = np.asarray(m)
    return float(np.abs(m - m.conj().T).max())


def require_hermitian(m, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Return ``m`` as a complex array, raising NotHermitian if it is not."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.abs(m).max()))
    if hermitian_defect(m) > atol * scale:
        raise NotHermitian(f"matrix is not Hermitian within {atol:g}")
    return m


def tensor(factors) -> np.ndarray:
    """Kronecker product of the factors, leftmost = most significant index."""
    factors = list(factors)
    if not factors:
        raise InvalidInput("tensor needs at least one factor")
    return backends.kron_chain([np.asarray(f, dtype=complex) for f in factors])


def herm_eig(m) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    The input is symmetrized before the solve so that accumulated
    floating-point asymmetry (within the Hermiticity gate) cannot leak
    into the spectrum.
    """
    m = require_hermitian(m)
    w, v = backends.eigh((m + m.conj().T) / 2)
    return EigenSystem(values=w, vectors=v)


def herm_eigvals(m) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    m = require_hermitian(m)
    return backends.eigvalsh((m + m.conj().T) / 2)


def op_norm(m) -> float:
    """Maximum (signed) eigenvalue of a Hermitian matrix."""
    return float(herm_eigvals(m)[-1])


def partial_transpose(m, subsystem_dims, target: int) -> np.ndarray:
    """Transpose on one tensor factor of a multipartite operator.

    ``subsystem_dims`` lists the local dimensions in tensor order and
    ``target`` indexes (0-based) the factor to transpose. Involutive and
    trace-preserving.
    """
    m = np.asarray(m, dtype=complex)
    dims = [int(d) for d in subsystem_dims]
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise InvalidInput(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
    if not 0 <= target < len(dims):
        raise InvalidInput(f"target {target} out of range for {len(dims)} subsystems")
    k = len(dims)
    t = m.reshape(dims + dims)
    t = np.swapaxes(t, target, k + target)
    return t.reshape(m.shape)


def dagger(m) -> np.ndarray:
    return np.asarray(m).conj().T


def projector(vec) -> np.ndarray:
    """Rank-1 projector onto a (normalized copy of a) state vector."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = np.linalg.norm(v)
    if n == 0:
        raise InvalidInput("cannot project onto the zero vector")
    v = v / n
    return np.outer(v, v.conj())
