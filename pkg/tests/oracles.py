"""Independent reference computations used by the tests.

Nothing here calls the closed forms under test.  On-site quantities come from
numerically diagonalizing the 2x2 Jaynes-Cummings blocks, the variational
energy from expectation values in the explicit three-state basis, and
fluctuation spectra from a generic linearization around the Gutzwiller state
fed to a bosonic Bogoliubov solver.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.linalg import eigh

from jchm_dicke.bogoliubov import symplectic_energies


def jc_block(n, p):
    """Block ``n`` of the on-site Hamiltonian on ``(|n, g>, |n-1, e>)``, with ``-mu n``."""
    wc, wx, g, mu = p.omega_c, p.omega_x, p.g, p.mu
    return np.array([[(wc - mu) * n, g * math.sqrt(n)],
                     [g * math.sqrt(n), (wc - mu) * (n - 1) + wx - mu]])


def jc_eigen(n, p):
    """``(energies, vectors)`` of block ``n``, lower polariton first, photon amplitude >= 0."""
    if n == 0:
        return np.array([0.0]), np.array([[1.0], [0.0]])
    w, v = eigh(jc_block(n, p))
    for j in range(2):
        # fix the sign so the |n, g> amplitude is non-negative
        if v[0, j] < 0 or (v[0, j] == 0 and v[1, j] < 0):
            v[:, j] *= -1
    return w, v


def lower_state(n, p):
    """Lower polariton in the photon-number basis ``|m, s>`` as a dict ``{(m, s): amp}``."""
    if n == 0:
        return {(0, 0): 1.0}
    _, v = jc_eigen(n, p)
    return {(n, 0): v[0, 0], (n - 1, 1): v[1, 0]}


def photon_overlap(bra, ket):
    """``<bra| a |ket>`` for states given as ``{(m, s): amp}``."""
    out = 0.0
    for (m, s), amp in ket.items():
        if m == 0:
            continue
        out += bra.get((m - 1, s), 0.0) * math.sqrt(m) * amp
    return out


def lower_energy(n, p):
    return float(jc_eigen(n, p)[0][0])


def triplet(n, p):
    """Energies ``(e_-1, e_0, e_1)`` and ``(f0, f1)`` of lobe ``n`` from explicit states."""
    st = {m: lower_state(m, p) for m in (n - 1, n, n + 1) if m >= 0}
    eps = tuple(lower_energy(m, p) if m >= 0 else math.inf for m in (n - 1, n, n + 1))
    f0 = photon_overlap(st[n - 1], st[n]) if n >= 1 else 0.0
    f1 = photon_overlap(st[n], st[n + 1])
    return eps, (f0, f1)


def local_operators(n, p):
    """``(h, a)`` on the basis ``(P_-1, P_0, P_1)`` (``(P_0, P_1)`` when ``n = 0``)."""
    (em, e0, ep), (f0, f1) = triplet(n, p)
    if n == 0:
        return np.diag([e0, ep]), np.array([[0.0, f1], [0.0, 0.0]])
    a = np.zeros((3, 3))
    a[0, 1] = f0
    a[1, 2] = f1
    return np.diag([em, e0, ep]), a


def gutzwiller_basis(theta, chi, n):
    """Ground state and its orthonormal complement for the ansatz angles."""
    ct, st, cc, sc = math.cos(theta), math.sin(theta), math.cos(chi), math.sin(chi)
    if n == 0:
        return np.array([ct, st]), [np.array([-st, ct])]
    G = np.array([st * sc, ct, st * cc])
    E1 = np.array([ct * sc, -st, ct * cc])
    E2 = np.array([cc, 0.0, -sc])
    return G, [E1, E2]


def energy_expectation(theta, chi, n, p):
    """``<h> - z J <a>^2`` in the Gutzwiller product state."""
    h, a = local_operators(n, p)
    G, _ = gutzwiller_basis(theta, chi, n)
    phi = G @ a @ G
    return G @ h @ G - p.z * p.J * phi * phi, phi


def grid_minimum(n, p, size=2001):
    """Brute-force minimum of the variational energy on a ``size x size`` grid."""
    h, a = local_operators(n, p)
    th = np.linspace(0.0, math.pi / 2, size)
    ch = np.linspace(0.0, math.pi, size, endpoint=False) if n >= 1 else np.array([0.0])
    T, C = np.meshgrid(th, ch, indexing="ij")
    if n == 0:
        amps = [np.cos(T), np.sin(T)]
    else:
        amps = [np.sin(T) * np.sin(C), np.cos(T), np.sin(T) * np.cos(C)]
    e_loc = sum(h[i, i] * amps[i] ** 2 for i in range(len(amps)))
    phi = sum(a[i, j] * amps[i] * amps[j] for i in range(len(amps)) for j in range(len(amps)))
    e = e_loc - p.z * p.J * phi ** 2
    idx = np.unravel_index(np.argmin(e), e.shape)
    return float(e[idx]), float(T[idx]), float(C[idx])


def lattice_factor(k):
    return 2.0 * float(np.sum(np.cos(np.atleast_1d(k))))


def fluctuation_matrices(theta, chi, n, p, eps_k):
    """Normal and anomalous blocks of the linearized Gutzwiller fluctuations.

    With ``a_i ~ phi + sum_m (u_m b_m + v_m b_m^dag)`` the quadratic
    Hamiltonian is ``sum_k [b^dag A b + (b B b + h.c.) / 2]``.
    """
    h, a = local_operators(n, p)
    G, E = gutzwiller_basis(theta, chi, n)
    phi = G @ a @ G
    zj = p.z * p.J
    h_mf = h - zj * phi * (a + a.T)
    e_g = G @ h_mf @ G
    m = len(E)
    L = np.array([[E[i] @ h_mf @ E[j] - (e_g if i == j else 0.0) for j in range(m)]
                  for i in range(m)])
    u = np.array([G @ a @ E[i] for i in range(m)])
    v = np.array([E[i] @ a @ G for i in range(m)])
    A = L - p.J * eps_k * (np.outer(u, u) + np.outer(v, v))
    B = -p.J * eps_k * (np.outer(u, v) + np.outer(v, u))
    return A, B


def fluctuation_spectrum(theta, chi, n, p, k):
    """Normal-mode energies at ``k`` from the symplectic diagonalization."""
    A, B = fluctuation_matrices(theta, chi, n, p, lattice_factor(k))
    return symplectic_energies(np.block([[A, B], [B, A]]), tol=1e-7)


def dicke_bdg(k, d, psi0_sq):
    """Dicke-model modes from a BdG problem of photon ``a_k`` and two-level flip ``b_k``."""
    g = d.g
    psi = math.sqrt(psi0_sq)
    w, v = eigh(np.array([[0.0, g * psi], [g * psi, d.wx]]))
    G, X = v[:, 0], v[:, 1]
    E = w[1] - w[0]
    sp = np.array([[0.0, 0.0], [1.0, 0.0]])  # sigma+ on (|g>, |e>)
    s, t = G @ sp @ X, X @ sp @ G
    A = np.array([[d.wk(k), g * t], [g * t, E]])
    B = np.array([[0.0, g * s], [g * s, 0.0]])
    return symplectic_energies(np.block([[A, B], [B, A]]), tol=1e-7)


def dicke_tc(d):
    """``T_c = |x| / (2 atanh(w0 |x| / g^2))`` from inverting the thermal criterion."""
    x, w0, g2 = abs(d.delta_d - d.mu_d), -d.mu_d, d.g ** 2
    if w0 * x >= g2:
        return 0.0
    if x == 0:
        return g2 / (2 * w0)
    return x / (2 * math.atanh(w0 * x / g2))
