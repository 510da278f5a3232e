"""Gutzwiller mean-field theory of the lower-polariton Hubbard model.

Near the Mott lobe with filling ``n`` each site is restricted to the lower
polaritons with ``n - 1``, ``n`` and ``n + 1`` excitations.  The site state is

    cos(theta) |n> + sin(theta) (sin(chi) |n-1> + cos(chi) |n+1>)

so ``theta`` measures the admixture of particle and hole fluctuations and
``chi`` their balance.  For ``n = 0`` there is no hole state: ``chi = 0`` and
the hole matrix element vanishes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from ..jc_onsite import LOWER, ModelParams, jc_energy, lower_hopping


class NoLobeError(ValueError):
    """The requested Mott boundary does not exist (beyond the lobe tip)."""


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class LobeContext:
    """Energies and matrix elements of the lower-polariton triplet around filling ``n``.

    ``eps`` holds the energies at fillings ``(n-1, n, n+1)`` and ``f`` the hole and
    particle matrix elements ``(f_n, f_{n+1})``.  For ``n = 0`` the hole entry of
    ``eps`` is ``inf`` and ``f[0] == 0``.
    """

    n: int
    eps: tuple[float, float, float]
    f: tuple[float, float]

    @classmethod
    def build(cls, n: int, p: ModelParams) -> "LobeContext":
        if n < 0 or int(n) != n:
            raise ValueError(f"lobe filling must be a non-negative integer, got {n}")
        e_hole = math.inf if n == 0 else jc_energy(n - 1, LOWER, p)
        e_mid = jc_energy(n, LOWER, p)
        e_part = jc_energy(n + 1, LOWER, p)
        f_hole = 0.0 if n == 0 else lower_hopping(n, p)
        return cls(n, (e_hole, e_mid, e_part), (f_hole, lower_hopping(n + 1, p)))

    @property
    def has_hole(self) -> bool:
        return self.n > 0

    @property
    def hole_gap(self) -> float:
        """Cost of removing a polariton, ``eps_{-1} - eps_0``."""
        return self.eps[0] - self.eps[1]

    @property
    def particle_gap(self) -> float:
        """Cost of adding a polariton, ``eps_1 - eps_0``."""
        return self.eps[2] - self.eps[1]

    @property
    def hubbard_u(self) -> float:
        return self.eps[0] + self.eps[2] - 2.0 * self.eps[1]


def variational_energy(theta, chi, lobe: LobeContext, p: ModelParams):
    """Energy per site of the Gutzwiller state at angles ``(theta, chi)``."""
    e_m, e_0, e_p = lobe.eps
    f0, f1 = lobe.f
    s_t2 = np.sin(theta) ** 2
    if lobe.has_hole:
        onsite = e_m * np.sin(chi) ** 2 + e_p * np.cos(chi) ** 2
    else:
        onsite = e_p * np.cos(chi) ** 2
    amp = f0 * np.sin(chi) + f1 * np.cos(chi)
    return (e_0 * np.cos(theta) ** 2 + s_t2 * onsite
            - 0.5 * p.J * p.D * np.sin(2 * theta) ** 2 * amp ** 2)


def _energy_gain(theta, chi, lobe: LobeContext, p: ModelParams):
    """``variational_energy - eps_0`` without cancellation against ``eps_0``."""
    f0, f1 = lobe.f
    hole = lobe.hole_gap * np.sin(chi) ** 2 if lobe.has_hole else 0.0
    amp = f0 * np.sin(chi) + f1 * np.cos(chi)
    return (np.sin(theta) ** 2 * (hole + lobe.particle_gap * np.cos(chi) ** 2)
            - 0.5 * p.J * p.D * np.sin(2 * theta) ** 2 * amp ** 2)


def order_parameter(theta, chi, lobe: LobeContext):
    """Photon coherence ``<a>`` of the Gutzwiller state."""
    f0, f1 = lobe.f
    return 0.5 * np.sin(2 * theta) * (f0 * np.sin(chi) + f1 * np.cos(chi))


def _derivatives(theta, chi, lobe, p, m=math):
    """Gradient and Hessian of the variational energy in ``(theta, chi)``.

    ``m`` supplies ``sin``/``cos``; pass :mod:`mpmath` for extended precision.
    """
    e_m, e_0, e_p = lobe.eps
    if not lobe.has_hole:
        e_m = 0.0  # chi is pinned at 0 where sin(chi) terms vanish
    f0, f1 = lobe.f
    K = 0.5 * p.J * p.D
    if m is not math:
        # promote before combining so every sum is rounded at the working precision
        e_m, e_0, e_p, f0, f1 = map(m.mpf, (e_m, e_0, e_p, f0, f1))
        K = m.mpf(p.J) * p.D / 2
    s2t, c2t = m.sin(2 * theta), m.cos(2 * theta)
    st2 = m.sin(theta) ** 2
    sc, cc = m.sin(chi), m.cos(chi)
    W = e_m * sc * sc + e_p * cc * cc
    dW = (e_m - e_p) * m.sin(2 * chi)
    ddW = 2 * (e_m - e_p) * m.cos(2 * chi)
    C = f0 * sc + f1 * cc
    dC = f0 * cc - f1 * sc
    grad = [s2t * (W - e_0) - 4 * K * s2t * c2t * C * C,
            st2 * dW - 2 * K * s2t * s2t * C * dC]
    h_tt = 2 * c2t * (W - e_0) - 8 * K * C * C * m.cos(4 * theta)
    h_tc = s2t * (dW - 8 * K * c2t * C * dC)
    h_cc = st2 * ddW - 2 * K * s2t * s2t * (dC * dC - C * C)
    if m is math:
        return np.array(grad), np.array([[h_tt, h_tc], [h_tc, h_cc]])
    return grad, [[h_tt, h_tc], [h_tc, h_cc]]


def polish_angles(theta, chi, lobe, p, dps=40, steps=4):
    """Newton steps in extended precision from a converged double-precision minimum.

    The Goldstone gap scales like the square root of the stationarity
    residual, so double-precision angles alone limit it to about 1e-8.
    """
    with mpmath.workdps(dps):
        t, c = mpmath.mpf(theta), mpmath.mpf(chi)
        for _ in range(steps):
            g, h = _derivatives(t, c, lobe, p, m=mpmath)
            if not lobe.has_hole:
                t -= g[0] / h[0][0]
                continue
            det = h[0][0] * h[1][1] - h[0][1] * h[1][0]
            t, c = (t - (h[1][1] * g[0] - h[0][1] * g[1]) / det,
                    c - (h[0][0] * g[1] - h[1][0] * g[0]) / det)
        return t, c


@dataclass(frozen=True)
class MeanFieldSolution:
    theta: float
    chi: float
    phi_c: float
    e_var: float
    lobe: LobeContext
    params: ModelParams
    grad_norm: float = 0.0
    iterations: int = 0
    # extended-precision angles for spectra near k = 0
    angles_hp: tuple | None = field(default=None, compare=False, repr=False)

    @property
    def is_superfluid(self) -> bool:
        return self.theta > 0.0

    @property
    def filling(self) -> float:
        """Mean polariton number per site."""
        s2 = math.sin(self.theta) ** 2
        return self.lobe.n + s2 * (math.cos(self.chi) ** 2 - math.sin(self.chi) ** 2)


def mott_chi(lobe: LobeContext, p: ModelParams) -> float:
    """Soft direction of particle-hole fluctuations on top of the Mott state.

    At ``theta = 0`` the energy does not depend on ``chi``; this picks the
    ``chi`` of the lowest second-order energy, which is where the superfluid
    solution emerges from at the boundary.
    """
    if not lobe.has_hole:
        return 0.0
    f0, f1 = lobe.f
    zj = p.z * p.J
    m = np.array([[lobe.hole_gap - zj * f0 * f0, -zj * f0 * f1],
                  [-zj * f0 * f1, lobe.particle_gap - zj * f1 * f1]])
    _, vec = np.linalg.eigh(m)
    s, c = vec[:, 0]
    return math.atan2(s, c) % math.pi


def _mott(lobe, p):
    chi = mott_chi(lobe, p)
    return MeanFieldSolution(0.0, chi, 0.0, lobe.eps[1], lobe, p)


def minimize_gutzwiller(lobe: LobeContext, p: ModelParams, grid: int = 201,
                        gtol: float = 1e-10, max_iter: int = 100) -> MeanFieldSolution:
    """Global minimum of the variational energy.

    A ``grid x grid`` scan over ``theta in [0, pi/2]`` and ``chi in [0, pi)``
    locates the basin, Newton iterations on the stationarity conditions polish
    it.  Degenerate energies (within 1e-12) resolve to the Mott state unless
    the Mott state is a saddle point, where the superfluid wins however small
    its energy gain.
    """
    if p.J == 0.0:
        return _mott(lobe, p)
    thetas = np.linspace(0.0, 0.5 * np.pi, grid)
    chis = np.linspace(0.0, np.pi, grid, endpoint=False) if lobe.has_hole else np.zeros(1)
    T, X = np.meshgrid(thetas, chis, indexing="ij")
    E = variational_energy(T, X, lobe, p)
    i, j = np.unravel_index(np.argmin(E), E.shape)
    e_mott = lobe.eps[1]
    if E[i, j] >= e_mott - 1e-12 or i == 0:
        # the grid does not resolve an instability; check the Mott curvature
        if _mott_is_stable(lobe, p):
            return _mott(lobe, p)
        # the minimum lies below the grid spacing: scan theta on a log grid
        # along the soft direction, away from the theta = 0 saddle
        chi0 = mott_chi(lobe, p)
        ts = np.geomspace(1e-9, thetas[1], 400)
        x = np.array([ts[int(np.argmin(_energy_gain(ts, chi0, lobe, p)))], chi0])
    else:
        x = np.array([thetas[i], chis[j]])
    x, gnorm, it = _newton(x, lobe, p, gtol, max_iter)
    theta, chi = float(x[0]), float(x[1])
    if not lobe.has_hole:
        chi = 0.0
    theta = abs(theta)
    e = float(variational_energy(theta, chi, lobe, p))
    if theta < 1e-12 or (e >= e_mott - 1e-12 and _mott_is_stable(lobe, p)):
        return _mott(lobe, p)
    if theta > 0.5 * np.pi:
        theta = np.pi - theta
    chi = chi % np.pi
    hp = polish_angles(theta, chi, lobe, p)
    t_hp, c_hp = float(hp[0]), float(hp[1])
    # near the boundary the energy is flat below double precision and only
    # the extended-precision steps pin theta down
    if abs(t_hp - theta) <= 0.1 * theta and abs(c_hp - chi) <= 0.1:
        theta, chi = t_hp, c_hp
        e = float(variational_energy(theta, chi, lobe, p))
    return MeanFieldSolution(theta, chi, float(order_parameter(theta, chi, lobe)), e, lobe, p,
                             gnorm, it, hp)


def _mott_is_stable(lobe, p):
    """Second-order energy change around ``theta = 0`` is non-negative for every ``chi``."""
    f0, f1 = lobe.f
    zj = p.z * p.J
    if not lobe.has_hole:
        return lobe.particle_gap - zj * f1 * f1 >= -1e-14
    a, b = lobe.hole_gap, lobe.particle_gap
    m = np.array([[a - zj * f0 * f0, -zj * f0 * f1], [-zj * f0 * f1, b - zj * f1 * f1]])
    return np.linalg.eigvalsh(m)[0] >= -1e-14 * max(1.0, abs(a) + abs(b))


def _newton(x, lobe, p, gtol, max_iter):
    fixed_chi = not lobe.has_hole

    def derivs(y):
        grad, hess = _derivatives(y[0], y[1], lobe, p)
        if fixed_chi:
            grad[1] = 0.0
            hess[0, 1] = hess[1, 0] = 0.0
            hess[1, 1] = 1.0
        return grad, hess

    e_old = variational_energy(x[0], x[1], lobe, p)
    e_tol = 1e-15 * max(1.0, abs(e_old))
    gnorm = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad, hess = derivs(x)
        gnorm = float(np.linalg.norm(grad))
        if gnorm < 1e-15:
            return x, gnorm, it
        w, v = np.linalg.eigh(hess)
        convex = w[0] > 0
        if convex:
            step = -np.linalg.solve(hess, grad)
        else:
            # descent direction even where the Hessian is indefinite
            step = -v @ ((v.T @ grad) / np.maximum(np.abs(w), 1e-8))
        t = 1.0
        while t > 1e-14:
            trial = x + t * step
            e_new = variational_energy(trial[0], trial[1], lobe, p)
            if e_new < e_old:
                break
            # in a convex basin the energy is flat to rounding near the
            # minimum, so a smaller gradient is accepted as progress
            if convex and e_new <= e_old + e_tol \
                    and np.linalg.norm(derivs(trial)[0]) < gnorm:
                break
            t *= 0.5
        else:
            break
        x, e_old = trial, min(e_old, e_new)
    gnorm = float(np.linalg.norm(derivs(x)[0]))
    if gnorm >= gtol:
        raise ConvergenceError(f"Newton refinement stalled at |grad| = {gnorm:.3e}")
    return x, gnorm, it


def solve(p: ModelParams, n: int | None = None, n_candidates=range(0, 6)) -> MeanFieldSolution:
    """Mean-field ground state, optionally restricted to the lobe ``n``.

    Without ``n`` every candidate lobe is minimized and the lowest energy wins.
    Ties within 1e-12 go to a Mott state, then to the lobe of the atomic-limit
    filling: ``theta = pi/2`` in lobe ``m`` is the same state as the Mott state
    of lobe ``m + 1``.
    """
    if n is not None:
        return minimize_gutzwiller(LobeContext.build(n, p), p)
    sols = [minimize_gutzwiller(LobeContext.build(m, p), p) for m in n_candidates]
    e_min = min(s.e_var for s in sols)
    tied = [s for s in sols if s.e_var <= e_min + 1e-12 * max(1.0, abs(e_min))]
    atomic = min(n_candidates, key=lambda m: jc_energy(m, LOWER, p))
    return min(tied, key=lambda s: (s.theta > 0, abs(s.lobe.n - atomic), s.e_var))


def _mu_offsets(n, p):
    """Energies of the lobe triplet with the ``-mu n`` part removed."""
    q = p.with_(mu=p.omega_c)
    return tuple(jc_energy(m, LOWER, q) for m in (n - 1, n, n + 1))


def boundary_discriminant(lobe: LobeContext, p: ModelParams) -> float:
    """``Q = U^2 - 2 Jz (f0^2 + f1^2) U + (Jz)^2 (f1^2 - f0^2)^2``."""
    f0, f1 = lobe.f
    u = lobe.hubbard_u
    zj = p.z * p.J
    return u * u - 2 * zj * (f0 * f0 + f1 * f1) * u + (zj * (f1 * f1 - f0 * f0)) ** 2


def mott_boundary(n: int, p: ModelParams, branch: int) -> float:
    """Critical chemical potential of lobe ``n`` at hopping ``p.J``.

    ``branch = +1`` is the particle (upper) boundary, ``-1`` the hole (lower)
    one.  ``p.mu`` is ignored.  Raises :class:`NoLobeError` past the tip.
    """
    if branch not in (-1, 1):
        raise ValueError("branch must be +1 (particle) or -1 (hole)")
    if n == 0:
        return _vacuum_boundary(p, branch)
    lobe = LobeContext.build(n, p.with_(mu=p.omega_c))
    q = boundary_discriminant(lobe, p)
    if q < 0:
        # rounding at the tip itself gives Q ~ -1e-16 U^2: treat it as the double root
        if q < -1e-12 * lobe.hubbard_u ** 2:
            raise NoLobeError(f"no Mott lobe n={n} at J={p.J}: Q={q:.3e} < 0")
        q = 0.0
    f0, f1 = lobe.f
    x = -p.z * p.J * (f1 * f1 - f0 * f0) + branch * math.sqrt(q)
    c_m, _, c_p = _mu_offsets(n, p)
    # eps_{-1} - eps_{+1} = 2 (mu - omega_c) + c_m - c_p
    return p.omega_c + 0.5 * (x - c_m + c_p)


def _vacuum_boundary(p, branch):
    if branch != 1:
        raise NoLobeError("the vacuum lobe has no hole boundary")
    q = p.with_(mu=p.omega_c)
    lobe = LobeContext.build(0, q)
    # particle gap eps_1 - eps_0 = -(mu - omega_c) + c_1 equals Jz f1^2
    return p.omega_c + lobe.particle_gap - p.z * p.J * lobe.f[1] ** 2


def critical_hopping(n: int, p: ModelParams) -> float:
    """Hopping at which the Mott state of lobe ``n`` becomes unstable at ``p.mu``.

    Returns ``inf`` at ``J = 0`` degenerate points never reached and raises
    :class:`NoLobeError` when ``mu`` lies outside the atomic-limit lobe.
    """
    lobe = LobeContext.build(n, p)
    f0, f1 = lobe.f
    b = lobe.particle_gap
    if not lobe.has_hole:
        if b < 0:
            raise NoLobeError("chemical potential above the vacuum lobe")
        return b / (p.z * f1 * f1)
    a = lobe.hole_gap
    if a < 0 or b < 0:
        raise NoLobeError(f"mu outside the atomic-limit lobe n={n}")
    den = a * f1 * f1 + b * f0 * f0
    return a * b / (p.z * den)


@dataclass(frozen=True)
class LobeTip:
    n: int
    J: float
    mu: float


def lobe_tip(n: int, p: ModelParams) -> LobeTip:
    """Tip of lobe ``n >= 1``, where the two boundary branches merge (``Q = 0``).

    The smaller root of ``Q(Jz) = 0`` is ``Jz = U / (f0 + f1)^2``.
    """
    if n < 1:
        raise ValueError("the vacuum lobe has no tip")
    lobe = LobeContext.build(n, p.with_(mu=p.omega_c))
    f0, f1 = lobe.f
    zj = lobe.hubbard_u / (f0 + f1) ** 2
    J = zj / p.z
    x = -zj * (f1 * f1 - f0 * f0)
    c_m, _, c_p = _mu_offsets(n, p)
    return LobeTip(n, J, p.omega_c + 0.5 * (x - c_m + c_p))
