"""Dense operator algebra over truncated Fock spaces and small composite Hilbert spaces"""
from functools import reduce
from typing import Sequence

import numpy as np
from scipy import linalg

from ..utils import validation_error

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |1> (upper level) is index 0, |0> is index 1
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T


def annihilation(n_max: int) -> np.ndarray:
    """b on the Fock states |0>..|n_max>"""
    if n_max < 1:
        raise validation_error(f"Fock truncation n_max must be at least 1, got {n_max!r}", "n_max")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


def creation(n_max: int) -> np.ndarray:
    return annihilation(n_max).conj().T


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def commutator_defect(n_max: int) -> float:
    """Largest deviation of [b, b+] from the identity away from the last basis state"""
    b = annihilation(n_max)
    comm = b @ b.conj().T - b.conj().T @ b
    interior = comm[:n_max, :n_max] - np.eye(n_max)
    return float(np.max(np.abs(interior)))


def kron_all(ops: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, ops)


def embed(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    """op acting on factor `index` of a tensor product with factor dimensions dims"""
    factors = [op if i == index else np.eye(d, dtype=complex) for i, d in enumerate(dims)]
    return kron_all(factors)


def partial_trace_bath(rho: np.ndarray, sys_dim: int, bath_dim: int) -> np.ndarray:
    """Trace out the second factor of a (system x bath) operator"""
    if rho.shape != (sys_dim * bath_dim, sys_dim * bath_dim):
        raise validation_error(
            f"operator shape {rho.shape} does not match {sys_dim} x {bath_dim} composite", "rho"
        )
    return np.einsum('ibjb->ij', rho.reshape(sys_dim, bath_dim, sys_dim, bath_dim))


def hermitian_propagator(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) via the eigendecomposition of the hermitian generator"""
    w, V = linalg.eigh(H)
    return (V * np.exp(-1j * w * t)) @ V.conj().T


def expm(generator: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)"""
    return linalg.expm(generator)
