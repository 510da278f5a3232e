"""Bogoliubov excitations on top of the Gutzwiller state.

Two fluctuation modes live on each site: ``E1`` (amplitude-like, mixing the
Mott state with the particle-hole pair) and ``E2`` (orthogonal particle-hole
combination).  Their quadratic Hamiltonian in momentum space is
``sum_k E_k^dag h_k E_k`` with ``h_k = [[g, f], [f, g]]`` acting on
``(E1_k, E2_k, E1_-k^dag, E2_-k^dag)``.  Everything depends on ``k`` only through
the lattice factor ``eps_k = 2 sum_i cos(k_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .._numerics import richardson
from ..bogoliubov import DynamicalInstability
from .mean_field import LobeContext, MeanFieldSolution
from ..jc_onsite import ModelParams


class SoundVelocityError(ArithmeticError):
    """Finite-difference slopes of the Goldstone branch did not settle."""


def lattice_dispersion(k, D: int | None = None):
    """``2 sum_i cos(k_i)`` over the last axis of ``k``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if D is not None and k.shape[-1] != D:
        raise ValueError(f"wave vector needs {D} components, got {k.shape[-1]}")
    return 2.0 * np.cos(k).sum(axis=-1)


@dataclass(frozen=True)
class BogoliubovBlock:
    g_block: np.ndarray
    f_block: np.ndarray
    k: np.ndarray

    @property
    def matrix(self) -> np.ndarray:
        """The assembled 4x4 ``h_eff``."""
        return np.block([[self.g_block, self.f_block], [self.f_block, self.g_block]])


def _angles(sol, m=math):
    e_m, e_0, e_p = sol.lobe.eps
    f0, f1 = sol.lobe.f
    th, ch = sol.angles_hp if m is mpmath else (sol.theta, sol.chi)
    if m is mpmath:
        e_m, e_0, e_p, f0, f1 = map(m.mpf, (e_m, e_0, e_p, f0, f1))
    sc, cc = m.sin(ch), m.cos(ch)
    st, ct = m.sin(th), m.cos(th)
    if sol.lobe.has_hole:
        u_minus = e_m * sc * sc + e_p * cc * cc - e_0
        u_plus = e_m * cc * cc + e_p * sc * sc - e_0
    else:
        u_minus = e_p * cc * cc - e_0
        u_plus = math.inf
    return dict(
        th=th, ch=ch, st=st, ct=ct, e_m=e_m, e_p=e_p,
        u_minus=u_minus, u_plus=u_plus,
        c_minus=f1 * sc - f0 * cc, c_plus=f1 * cc + f0 * sc,
        h0=f0 * ct * cc, h1=f1 * ct * sc,
        k0=f1 * ct * ct * cc - f0 * st * st * sc,
        k1=f1 * st * st * cc - f0 * ct * ct * sc,
    )


def local_terms(sol: MeanFieldSolution, m=math):
    """The ``k``-independent parts ``(g11, g22, g12)`` of the normal block."""
    a = _angles(sol, m)
    zj = sol.params.z * sol.params.J if m is math else m.mpf(sol.params.J) * sol.params.z
    s2 = m.sin(2 * a["th"]) ** 2
    cp2 = a["c_plus"] ** 2
    g11 = (m.cos(2 * a["th"]) * a["u_minus"] + zj * s2 * cp2) / 2
    g22 = (a["u_plus"] - a["st"] ** 2 * a["u_minus"] + zj * s2 * cp2 / 2) / 2
    # coefficient 2 Jz (not 8 Jz) keeps the Goldstone mode gapless
    g12 = -a["ct"] * (m.sin(2 * a["ch"]) * (a["e_p"] - a["e_m"])
                      + 2 * zj * a["st"] ** 2 * a["c_plus"] * a["c_minus"]) / 4 \
        if sol.lobe.has_hole else 0.0
    return g11, g22, g12


def _blocks(eps_k, sol):
    """Normal and anomalous 2x2 blocks, vectorized over ``eps_k``."""
    eps_k = np.asarray(eps_k, dtype=float)
    a = _angles(sol)
    J = sol.params.J
    g11_0, g22_0, g12_0 = local_terms(sol)
    h0, h1, k0, k1 = a["h0"], a["h1"], a["k0"], a["k1"]
    g = np.empty(eps_k.shape + (2, 2))
    f = np.empty(eps_k.shape + (2, 2))
    g[..., 0, 0] = g11_0 - 0.5 * J * (k0 * k0 + k1 * k1) * eps_k
    g[..., 1, 1] = g22_0 - 0.5 * J * (h0 * h0 + h1 * h1) * eps_k
    g[..., 0, 1] = g[..., 1, 0] = g12_0 + 0.5 * J * (h1 * k0 + h0 * k1) * eps_k
    f[..., 0, 0] = J * k0 * k1 * eps_k
    f[..., 1, 1] = J * h0 * h1 * eps_k
    f[..., 0, 1] = f[..., 1, 0] = -0.5 * J * (h0 * k0 + h1 * k1) * eps_k
    return g, f


def heff_block(k, sol: MeanFieldSolution) -> BogoliubovBlock:
    """Blocks ``g`` and ``f`` of ``h_eff`` at the wave vector ``k`` (``D`` components)."""
    k = np.asarray(k, dtype=float).reshape(-1)
    eps_k = float(lattice_dispersion(k, sol.params.D))
    g, f = _blocks(eps_k, sol)
    return BogoliubovBlock(g, f, k)


def spectrum_coefficients(g, f):
    """``A`` and ``B`` with ``eps_pm^2 = A +- sqrt(A^2 - B)`` from the 2x2 blocks."""
    g11, g22, g12 = g[..., 0, 0], g[..., 1, 1], g[..., 0, 1]
    f11, f22, f12 = f[..., 0, 0], f[..., 1, 1], f[..., 0, 1]
    A = 2.0 * (g11 ** 2 + g22 ** 2 + 2 * g12 * g12 - f11 ** 2 - f22 ** 2 - 2 * f12 * f12)
    B = 16.0 * ((g11 - f11) * (g22 - f22) - (g12 - f12) ** 2) \
        * ((g11 + f11) * (g22 + f22) - (g12 + f12) ** 2)
    return A, B


def _modes_from_coefficients(A, B, rtol=1e-10):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    scale = np.maximum(A * A, 1e-300)
    disc = A * A - B
    if np.any(A < -rtol * np.sqrt(scale)) or np.any(disc < -rtol * scale) \
            or np.any(B < -rtol * scale):
        raise DynamicalInstability("Bogoliubov spectrum is not real and positive")
    root = np.sqrt(np.clip(disc, 0.0, None))
    upper2 = A + root
    lower2 = np.where(upper2 > 0, np.clip(B, 0.0, None) / np.where(upper2 > 0, upper2, 1.0), 0.0)
    return np.sqrt(lower2), np.sqrt(upper2)


def block_spectrum(block: BogoliubovBlock):
    """Closed-form mode energies ``(eps_-, eps_+)`` of a block."""
    A, B = spectrum_coefficients(block.g_block, block.f_block)
    lo, hi = _modes_from_coefficients(A, B)
    return float(lo), float(hi)


def mott_poles(k, lobe: LobeContext, p: ModelParams):
    """Signed pole positions ``1/2 (eps_-1 - eps_1 + J eps_k df2 +- sqrt(Q_k))``.

    These are minus the Green's-function poles; the physical excitation
    energies are ``(+root, -(-root))``, see :func:`mott_spectrum`.
    """
    eps_k = lattice_dispersion(k, p.D)
    f0, f1 = lobe.f
    u = lobe.hubbard_u
    J = p.J
    df2 = f1 * f1 - f0 * f0
    q = u * u - 2 * u * J * eps_k * (f1 * f1 + f0 * f0) + (J * eps_k * df2) ** 2
    base = lobe.eps[0] - lobe.eps[2] + J * eps_k * df2
    root = np.sqrt(np.clip(q, 0.0, None))
    plus, minus = 0.5 * (base + root), 0.5 * (base - root)
    if np.ndim(plus) == 0:
        return float(plus), float(minus)
    return plus, minus


def mott_spectrum(k, lobe: LobeContext, p: ModelParams):
    """Particle and hole excitation energies of the Mott state, ``(lower, upper)``.

    The hole branch is ``eps_+`` of :func:`mott_poles` and the particle branch
    ``-eps_-``.  In the vacuum lobe the single particle mode is returned
    together with ``inf``.
    """
    if not lobe.has_hole:
        eps_k = lattice_dispersion(k, p.D)
        part = lobe.particle_gap - p.J * eps_k * lobe.f[1] ** 2
        return (float(part), math.inf) if np.ndim(part) == 0 else (part, math.inf)
    plus, minus = mott_poles(k, lobe, p)
    hole, particle = plus, -np.asarray(minus)
    lo, hi = np.minimum(hole, particle), np.maximum(hole, particle)
    return (float(lo), float(hi)) if np.ndim(lo) == 0 else (lo, hi)


def _spectrum_eps(eps_k, sol):
    """Mode energies vectorized over the lattice factor."""
    eps_k = np.asarray(eps_k, dtype=float)
    if sol.theta == 0.0:
        # exact Mott reduction, well conditioned at the lobe tip
        lobe, p = sol.lobe, sol.params
        f0, f1 = lobe.f
        J = p.J
        if not lobe.has_hole:
            return lobe.particle_gap - J * eps_k * f1 * f1, np.full_like(eps_k, math.inf)
        u = lobe.hubbard_u
        df2 = f1 * f1 - f0 * f0
        q = u * u - 2 * u * J * eps_k * (f1 * f1 + f0 * f0) + (J * eps_k * df2) ** 2
        base = lobe.eps[0] - lobe.eps[2] + J * eps_k * df2
        root = np.sqrt(np.clip(q, 0.0, None))
        hole, particle = 0.5 * (base + root), -0.5 * (base - root)
        if np.any(q < -1e-10 * u * u) or np.any(np.minimum(hole, particle) < -1e-10 * abs(u)):
            raise DynamicalInstability("Mott state is unstable at this hopping")
        lo = np.clip(np.minimum(hole, particle), 0.0, None)
        return lo, np.maximum(hole, particle)
    g, f = _blocks(eps_k, sol)
    if not sol.lobe.has_hole:
        g11, f11 = g[..., 0, 0], f[..., 0, 0]
        prod = (g11 - f11) * (g11 + f11)
        if np.any(prod < -1e-10 * g11 ** 2):
            raise DynamicalInstability("vacuum-lobe fluctuation mode is unstable")
        return 2.0 * np.sqrt(np.clip(prod, 0.0, None)), np.full_like(eps_k, math.inf)
    A, B = spectrum_coefficients(g, f)
    return _modes_from_coefficients(A, B)


def _spectrum_scalar_hp(eps_k, sol, dps=40):
    """Superfluid mode energies at one ``eps_k`` from the extended-precision angles."""
    with mpmath.workdps(dps):
        a = _angles(sol, mpmath)
        J = mpmath.mpf(sol.params.J)
        e = mpmath.mpf(float(eps_k))
        g11_0, g22_0, g12_0 = local_terms(sol, mpmath)
        h0, h1, k0, k1 = a["h0"], a["h1"], a["k0"], a["k1"]
        g11 = g11_0 - J * (k0 * k0 + k1 * k1) * e / 2
        g22 = g22_0 - J * (h0 * h0 + h1 * h1) * e / 2
        g12 = g12_0 + J * (h1 * k0 + h0 * k1) * e / 2
        f11 = J * k0 * k1 * e
        f22 = J * h0 * h1 * e
        f12 = -J * (h0 * k0 + h1 * k1) * e / 2
        if not sol.lobe.has_hole:
            prod = (g11 - f11) * (g11 + f11)
            if prod < -1e-10 * g11 ** 2:
                raise DynamicalInstability("vacuum-lobe fluctuation mode is unstable")
            return float(2 * mpmath.sqrt(max(prod, 0))), math.inf
        A = 2 * (g11 ** 2 + g22 ** 2 + 2 * g12 ** 2 - f11 ** 2 - f22 ** 2 - 2 * f12 ** 2)
        B = 16 * ((g11 - f11) * (g22 - f22) - (g12 - f12) ** 2) \
            * ((g11 + f11) * (g22 + f22) - (g12 + f12) ** 2)
        lo, hi = _modes_from_coefficients(float(A), float(B))
        disc = A * A - B
        upper2 = A + mpmath.sqrt(max(disc, 0))
        lower2 = max(B, 0) / upper2 if upper2 > 0 else mpmath.mpf(0)
        return float(mpmath.sqrt(lower2)), float(mpmath.sqrt(upper2))


def bogoliubov_spectrum(k, sol: MeanFieldSolution):
    """Excitation energies ``(eps_-, eps_+)`` at wave vector ``k``.

    ``eps_-`` is the Goldstone (or lower gapped) branch, ``eps_+`` the
    amplitude branch.
    """
    k = np.asarray(k, dtype=float)
    eps_k = lattice_dispersion(k, sol.params.D)
    if np.ndim(eps_k) == 0 and sol.theta > 0 and sol.angles_hp is not None:
        return _spectrum_scalar_hp(eps_k, sol)
    lo, hi = _spectrum_eps(eps_k, sol)
    if np.ndim(lo) == 0:
        return float(lo), float(hi)
    return lo, hi


def fluctuation_constant(sol: MeanFieldSolution) -> float:
    """Per-site normal-ordering constant ``-(g11 + g22)`` of the local blocks."""
    g11, g22, _ = local_terms(sol)
    if not sol.lobe.has_hole:
        return -g11
    return -(g11 + g22)


def brillouin_grid(n_k: int, D: int):
    """Uniform ``n_k^D`` grid on ``[-pi, pi)^D``; returns lattice factors ``eps_k``."""
    k1 = -np.pi + 2 * np.pi * np.arange(n_k) / n_k
    c = 2.0 * np.cos(k1)
    eps = c
    for _ in range(D - 1):
        eps = np.add.outer(eps, c)
    return eps.ravel()


def fluctuation_energy(sol: MeanFieldSolution, n_k: int = 64) -> float:
    """Zero-point correction to the ground-state energy per site.

    ``E(theta, chi) + 1/N_s sum_{k, alpha} eps_alpha(k) / 2`` on an ``n_k^D`` grid.
    """
    eps = brillouin_grid(n_k, sol.params.D)
    lo, hi = _spectrum_eps(eps, sol)
    zero_point = 0.5 * lo.mean()
    if sol.lobe.has_hole:
        zero_point += 0.5 * hi.mean()
    return fluctuation_constant(sol) + zero_point


def amplitude_gap(sol: MeanFieldSolution) -> float:
    """Gap of the amplitude branch, ``eps_+(k = 0)``."""
    return bogoliubov_spectrum(np.zeros(sol.params.D), sol)[1]


def goldstone_gap(sol: MeanFieldSolution) -> float:
    return bogoliubov_spectrum(np.zeros(sol.params.D), sol)[0]


def sound_velocity(sol: MeanFieldSolution, axis: int = 0, h: float = 1e-2,
                   rtol: float = 1e-4, atol: float | None = None) -> float:
    """Slope of the lower branch at ``k -> 0`` along a lattice axis.

    ``eps_-(k) / k`` at ``k = h, h/2, h/4`` is Richardson-extrapolated.  A
    quadratic branch (generic boundary point) gives a slope near zero.  The
    default ``atol`` is ``1e-6 sqrt(g max(J, g))``, the velocity scale of the
    lattice.
    """
    p = sol.params
    if atol is None:
        atol = 1e-6 * math.sqrt(p.g * max(p.J, p.g))
    D = sol.params.D
    ks = [h, h / 2, h / 4]
    slopes = []
    for k in ks:
        vec = np.zeros(D)
        vec[axis] = k
        slopes.append(bogoliubov_spectrum(vec, sol)[0] / k)
    c, err = richardson(slopes, ratio=2.0, orders=(1, 2))
    if err > atol + rtol * abs(c):
        raise SoundVelocityError(f"slope not converged: c = {c:.6g} +- {err:.2g}")
    return max(c, 0.0)
