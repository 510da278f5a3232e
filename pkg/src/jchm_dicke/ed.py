"""Exact diagonalization of the Jaynes-Cummings-Hubbard model on a few sites.

The product basis is ordered lexicographically in ``(n_1, s_1, ..., n_L, s_L)``
with photon number ``n_i = 0..n_max`` and two-level state ``s_i`` (0 = ground,
1 = excited); the last label runs fastest.  Everything is dense: this module
is an oracle, not a solver.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import eigh

from .jc_onsite import ModelParams

MAX_SITES = 3
MAX_PHOTONS = 8
MAX_DIM = 4096
OPEN = "open"
PERIODIC = "periodic"


@dataclass(frozen=True)
class LatticeSpec:
    """A chain of ``n_sites`` cavities with ``n_max`` photons at most per site.

    A periodic two-site chain carries the bond twice, so every site has two
    neighbours as in an infinite chain.
    """

    n_sites: int
    n_max: int
    params: ModelParams
    geometry: str = OPEN

    def __post_init__(self):
        if not 1 <= self.n_sites <= MAX_SITES:
            raise ValueError(f"n_sites must be in 1..{MAX_SITES}")
        if not 0 <= self.n_max <= MAX_PHOTONS:
            raise ValueError(f"n_max must be in 0..{MAX_PHOTONS}")
        if self.geometry not in (OPEN, PERIODIC):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.dim > MAX_DIM:
            raise ValueError(f"Hilbert dimension {self.dim} exceeds {MAX_DIM}")

    @property
    def site_dim(self) -> int:
        return 2 * (self.n_max + 1)

    @property
    def dim(self) -> int:
        return self.site_dim ** self.n_sites

    @property
    def bonds(self) -> list[tuple[int, int]]:
        b = [(i, i + 1) for i in range(self.n_sites - 1)]
        if self.geometry == PERIODIC and self.n_sites > 1:
            b.append((self.n_sites - 1, 0))
        return b

    def with_cutoff(self, n_max: int) -> "LatticeSpec":
        return LatticeSpec(self.n_sites, n_max, self.params, self.geometry)


def site_operators(n_max: int):
    """``(a, sigma_minus)`` on one site in the ``(n, s)`` basis."""
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1)
    sm = np.array([[0.0, 1.0], [0.0, 0.0]])
    return np.kron(a, np.eye(2)), np.kron(np.eye(n_max + 1), sm)


def site_hamiltonian(n_max: int, p: ModelParams) -> np.ndarray:
    """``h_JC - mu (a^dag a + sigma^+ sigma^-)`` on one site."""
    a, sm = site_operators(n_max)
    nph = a.T @ a
    nx = sm.T @ sm
    return ((p.omega_c - p.mu) * nph + (p.omega_x - p.mu) * nx
            + p.g * (a.T @ sm + sm.T @ a))


def _embed(op, site, n_sites, d):
    mats = [op if i == site else np.eye(d) for i in range(n_sites)]
    return reduce(np.kron, mats)


def build_hamiltonian(spec: LatticeSpec) -> np.ndarray:
    p, L, d = spec.params, spec.n_sites, spec.site_dim
    h = site_hamiltonian(spec.n_max, p)
    a, _ = site_operators(spec.n_max)
    H = sum(_embed(h, i, L, d) for i in range(L))
    for i, j in spec.bonds:
        hop = _embed(a.T, i, L, d) @ _embed(a, j, L, d)
        H = H - p.J * (hop + hop.T)
    return np.asarray(H)


def number_operator(spec: LatticeSpec) -> np.ndarray:
    """Total polariton number ``sum_i (a_i^dag a_i + sigma_i^+ sigma_i^-)``."""
    a, sm = site_operators(spec.n_max)
    n_loc = a.T @ a + sm.T @ sm
    return sum(_embed(n_loc, i, spec.n_sites, spec.site_dim) for i in range(spec.n_sites))


def spectrum(spec: LatticeSpec) -> np.ndarray:
    return eigh(build_hamiltonian(spec), eigvals_only=True)


@dataclass(frozen=True)
class GroundState:
    energy: float
    filling: float
    cutoff_change: float
    converged: bool


def ground_state(spec: LatticeSpec, cutoff_tol: float = 1e-8) -> GroundState:
    """Lowest eigenvalue, ``<N>`` per site and a photon-cutoff convergence check.

    The cutoff is converged when lowering ``n_max`` by one changes the energy
    by at most ``cutoff_tol * g``.
    """
    w, v = eigh(build_hamiltonian(spec), subset_by_index=[0, 0])
    psi = v[:, 0]
    filling = float(psi @ number_operator(spec) @ psi) / spec.n_sites
    if spec.n_max > 0:
        e_low = eigh(build_hamiltonian(spec.with_cutoff(spec.n_max - 1)), eigvals_only=True,
                     subset_by_index=[0, 0])[0]
        change = abs(w[0] - e_low)
    else:
        change = np.inf
    return GroundState(float(w[0]), filling, float(change),
                       bool(change <= cutoff_tol * spec.params.g))
