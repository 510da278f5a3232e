"""Numerical diagonalization of quadratic bosonic Hamiltonians.

A Hamiltonian ``H = 1/2 Psi^dag M Psi`` with ``Psi = (b_1..b_n, b_1^dag..b_n^dag)``
is brought to normal modes by a symplectic (para-unitary) transformation.  Its
normal-mode energies are the positive eigenvalues of ``eta M`` where
``eta = diag(1, ..., 1, -1, ..., -1)``.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import cholesky, eigh


class DynamicalInstability(ArithmeticError):
    """The quadratic form is not positive semi-definite: complex or negative modes."""


def nambu_matrix(a, b):
    """Assemble ``M = [[a, b], [b*, a*]]`` from the normal and anomalous blocks."""
    a = np.asarray(a)
    b = np.asarray(b)
    return np.block([[a, b], [b.conj(), a.conj()]])


def colpa_energies(M):
    """Normal-mode energies of a positive definite ``M`` (Colpa's Cholesky route).

    Returns the ``n`` energies in ascending order.
    """
    M = np.asarray(M)
    n = M.shape[0] // 2
    K = cholesky(M)
    eta = np.diag(np.r_[np.ones(n), -np.ones(n)])
    w = eigh(K @ eta @ K.conj().T, eigvals_only=True)
    return np.sort(w[n:])


def symplectic_energies(M, tol=1e-9):
    """Normal-mode energies of a positive semi-definite ``M``.

    Falls back from the Cholesky route to a direct eigenvalue problem of
    ``eta M`` when ``M`` has a zero mode (Goldstone), where Cholesky fails.
    """
    M = np.asarray(M)
    n = M.shape[0] // 2
    try:
        return colpa_energies(M)
    except np.linalg.LinAlgError:
        pass
    eta = np.r_[np.ones(n), -np.ones(n)]
    w = np.linalg.eigvals(eta[:, None] * M)
    scale = max(1.0, np.abs(w).max())
    if np.abs(w.imag).max() > tol * scale:
        raise DynamicalInstability(f"complex normal-mode frequencies: {w}")
    w = np.sort(w.real)
    return np.sort(np.abs(w[n:]))
