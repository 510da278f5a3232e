"""Cross-checks between the slave-boson lattice theory and the Dicke model.

The lattice model is evaluated at fixed Dicke-frame ``(mu_d, delta_d)`` while
the hopping ``J`` grows; in that limit its photon band becomes the quadratic
band of the Dicke model and the two theories should coincide.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import dicke as dk
from ._numerics import polynomial_extrapolate
from .jc_onsite import ModelParams
from .slave_boson import (
    MeanFieldSolution,
    NoLobeError,
    amplitude_gap,
    critical_hopping,
    critical_temperature,
    lobe_tip,
    mott_boundary,
    solve,
    sound_velocity,
)

Z1_TIP = "z1_tip"
Z2_GENERIC = "z2_generic"

DEFAULT_J = (10.0, 30.0, 100.0, 300.0)


class AmbiguousTransition(ValueError):
    """Gap and sound velocity do not single out a dynamical exponent."""


@dataclass(frozen=True)
class LimitComparison:
    """A slave-boson observable along increasing ``J`` against its Dicke value."""

    J_values: tuple
    sb_values: tuple
    dicke_value: float
    extrapolated: float
    abs_error: float
    extrapolation_error: float = 0.0

    def __post_init__(self):
        if np.any(np.diff(self.J_values) <= 0):
            raise ValueError("J_values must be strictly increasing")

    @property
    def deviations(self) -> np.ndarray:
        return np.abs(np.asarray(self.sb_values) - self.dicke_value)

    @property
    def monotone(self) -> bool:
        """Deviations from the Dicke value shrink along the ``J`` sequence."""
        return bool(np.all(np.diff(self.deviations) < 0))


def _compare(J_values, sb_values, dicke_value) -> LimitComparison:
    """Extrapolate ``sb_values`` to ``1/J -> 0`` with a quadratic in ``1/J``."""
    J = np.asarray(J_values, dtype=float)
    degree = min(2, len(J) - 1)
    best, err = polynomial_extrapolate(1.0 / J, sb_values, degree=degree)
    return LimitComparison(tuple(float(j) for j in J), tuple(float(v) for v in sb_values),
                           float(dicke_value),
                           float(best), abs(float(best) - dicke_value), float(err))


def lattice_params(mu_d: float, delta_d: float, J: float, D: int, g: float = 1.0) -> ModelParams:
    return dk.to_jchm(dk.DickeParams(mu_d, delta_d, g=g, J=J), D)


def _expanding_root(f, x0, step, max_steps=40):
    """Root of ``f`` bracketed by stepping outwards from ``x0 - step, x0 + step``."""
    lo, hi = x0 - step, x0 + step
    flo, fhi = f(lo), f(hi)
    for _ in range(max_steps):
        if flo * fhi <= 0:
            return brentq(f, lo, hi, xtol=1e-14, rtol=1e-14)
        step *= 2
        lo, hi = x0 - step, x0 + step
        flo, fhi = f(lo), f(hi)
    raise ArithmeticError("could not bracket the root")


@dataclass(frozen=True)
class DickeFrameTip:
    J: float
    delta_d: float
    mu_d: float
    params: ModelParams


def tip_in_dicke_frame(J: float, D: int, g: float = 1.0) -> DickeFrameTip:
    """Detuning ``delta_d`` for which the ``n = 1`` tip sits at hopping ``J``.

    The tip hopping grows monotonically as the detuning becomes more
    negative, so the root is unique.
    """
    def excess(delta_d):
        return lobe_tip(1, lattice_params(-g, delta_d, J, D, g)).J - J

    delta_d = _expanding_root(excess, -2.0 * g, 0.5 * g)
    p = lattice_params(-g, delta_d, J, D, g)
    tip = lobe_tip(1, p)
    return DickeFrameTip(J, delta_d, tip.mu + 2 * D * J - p.omega_c, p.with_(mu=tip.mu))


def lobe_tip_match(g: float = 1.0, D: int = 2, J_values=DEFAULT_J):
    """Slave-boson tip ``(delta_d, mu_d)`` at growing ``J`` against ``(-2g, -g)``."""
    tips = [tip_in_dicke_frame(J, D, g) for J in J_values]
    return (_compare(J_values, [t.delta_d for t in tips], -2.0 * g),
            _compare(J_values, [t.mu_d for t in tips], -g))


def boundary_detuning(mu_d: float, J: float, D: int, g: float = 1.0) -> float:
    """Detuning at which ``mu_d`` lies on the slave-boson ``n = 1`` boundary at hopping ``J``."""
    def excess(delta_d):
        try:
            jc = critical_hopping(1, lattice_params(mu_d, delta_d, J, D, g))
        except NoLobeError:
            jc = 0.0
        return jc - J

    return _expanding_root(excess, dk.boundary_delta(mu_d, g), 0.25 * g)


@dataclass(frozen=True)
class BoundaryMatch:
    J: float
    mu_d: np.ndarray
    delta_sb: np.ndarray
    delta_dicke: np.ndarray

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.delta_sb - self.delta_dicke)))


def boundary_match(J: float, D: int = 2, g: float = 1.0, mu_d=None) -> BoundaryMatch:
    """Slave-boson ``n = 1`` boundary as ``delta_d(mu_d)`` against ``mu_d + g^2 / mu_d``.

    Parametrizing by ``mu_d`` keeps both branches and the tip on one smooth
    curve; the default grid covers ``mu_d / g`` in ``[-4, -0.25]``.
    """
    mu_d = np.linspace(-4.0 * g, -0.25 * g, 76) if mu_d is None else np.asarray(mu_d, float)
    sb = np.array([boundary_detuning(m, J, D, g) for m in mu_d])
    ref = np.array([dk.boundary_delta(m, g) for m in mu_d])
    return BoundaryMatch(J, mu_d, sb, ref)


@dataclass(frozen=True)
class VelocityComparison:
    J: float
    D: int
    g: float
    c_sb: float

    @property
    def c_formula(self) -> float:
        """``sqrt(J g - g^2 / (2D))``."""
        return math.sqrt(self.J * self.g - self.g ** 2 / (2 * self.D))

    @property
    def c_dicke(self) -> float:
        return math.sqrt(self.J * self.g)

    @property
    def rel_error_formula(self) -> float:
        return abs(self.c_sb / self.c_formula - 1.0)

    @property
    def rel_error_dicke(self) -> float:
        return abs(self.c_sb / self.c_dicke - 1.0)


def tip_sound_velocity(J: float, D: int, g: float = 1.0) -> float:
    """Sound velocity at the slave-boson ``n = 1`` tip placed at hopping ``J``.

    The finite-difference step shrinks like ``sqrt(g / J)``, the momentum
    where the tip dispersion turns from linear to quadratic.
    """
    tip = tip_in_dicke_frame(J, D, g)
    sol = solve(tip.params, n=1)
    return sound_velocity(sol, h=1e-2 * min(1.0, math.sqrt(10.0 * g / J)))


def sound_velocity_match(g: float = 1.0, D: int = 2, J: float = 50.0) -> VelocityComparison:
    return VelocityComparison(J, D, g, tip_sound_velocity(J, D, g))


def _boundary_solution(delta_d, J, D, g, branch) -> MeanFieldSolution:
    p = lattice_params(-g, delta_d, J, D, g)
    mu = mott_boundary(1, p, branch)
    return solve(p.with_(mu=mu), n=1)


def amplitude_gap_match(delta_d: float = -3.0, g: float = 1.0, D: int = 2,
                        J_values=DEFAULT_J, branch: int = +1) -> LimitComparison:
    """Amplitude gap on the ``n = 1`` boundary against ``sqrt(delta_d^2 - 4 g^2)``."""
    gaps = [amplitude_gap(_boundary_solution(delta_d, J, D, g, branch)) for J in J_values]
    return _compare(J_values, gaps, math.sqrt(delta_d ** 2 - 4 * g * g))


@dataclass(frozen=True)
class TcTable:
    delta_d: float
    D: int
    mu_d: np.ndarray
    tc_dicke: np.ndarray
    tc_jchm: dict = field(default_factory=dict)

    def sup_norm(self, J: float) -> float:
        return float(np.max(np.abs(self.tc_jchm[J] - self.tc_dicke)))

    @property
    def sup_norms(self) -> dict:
        return {J: self.sup_norm(J) for J in self.tc_jchm}


def tc_comparison(delta_d: float, g: float = 1.0, D: int = 2, J_list=(10.0, 30.0, 100.0),
                  mu_d=None, T_max: float = 100.0) -> TcTable:
    """Critical temperature against ``mu_d`` from both theories at fixed ``delta_d``."""
    mu_d = np.linspace(-3.5 * g, -0.05 * g, 70) if mu_d is None else np.asarray(mu_d, float)
    tc_d = np.array([dk.tc_solve(dk.DickeParams(m, delta_d, g=g), T_max=T_max).tc
                     for m in mu_d])
    table = TcTable(delta_d, D, mu_d, tc_d)
    for J in J_list:
        table.tc_jchm[J] = np.array([
            critical_temperature(lattice_params(m, delta_d, J, D, g), T_max=T_max)
            for m in mu_d])
    return table


def positive_regions(values) -> int:
    """Number of disconnected runs with ``values > 0`` along a sweep."""
    pos = np.asarray(values) > 0
    return int(pos[0]) + int(np.count_nonzero(pos[1:] & ~pos[:-1]))


def classify(gap: float, velocity: float, eps_tol: float, v_tol: float) -> str:
    """Dynamical exponent from the amplitude gap and the sound velocity."""
    gapless = gap < eps_tol
    linear = velocity > v_tol
    if gapless and linear:
        return Z1_TIP
    if not gapless and not linear:
        return Z2_GENERIC
    if gapless:
        raise AmbiguousTransition(f"gap {gap:.3g} and velocity {velocity:.3g} both vanish")
    raise AmbiguousTransition(f"gapped ({gap:.3g}) yet linear (c = {velocity:.3g})")


def classify_transition(sol: MeanFieldSolution, eps_tol: float | None = None,
                        v_tol: float | None = None, boundary_rtol: float = 1e-6) -> str:
    """``z1_tip`` or ``z2_generic`` for a slave-boson solution on a lobe boundary.

    Default tolerances are ``1e-3 g`` for the gap and ``1e-3 sqrt(J g)`` for the
    velocity.
    """
    p = sol.params
    jc = critical_hopping(sol.lobe.n, p)
    if abs(p.J - jc) > boundary_rtol * max(jc, p.g):
        raise ValueError(f"J = {p.J} is not on the boundary (J_c = {jc})")
    eps_tol = 1e-3 * p.g if eps_tol is None else eps_tol
    v_tol = 1e-3 * math.sqrt(p.J * p.g) if v_tol is None else v_tol
    return classify(amplitude_gap(sol), sound_velocity(sol), eps_tol, v_tol)


def classify_dicke(d: dk.DickeParams, eps_tol: float | None = None,
                   v_tol: float | None = None, boundary_tol: float = 1e-9) -> str:
    """Same classification for a point on the Dicke ``T = 0`` boundary."""
    d = d.with_(T=0.0)
    if abs(dk.residual(d)) > boundary_tol * d.g ** 2:
        raise ValueError("point is not on the Dicke phase boundary")
    eps_tol = 1e-3 * d.g if eps_tol is None else eps_tol
    v_tol = 1e-3 * math.sqrt(d.J * d.g) if v_tol is None else v_tol
    sol = dk.condensate_t0(d)
    return classify(dk.spectrum(0.0, d, sol)[1], dk.sound_velocity(d, sol), eps_tol, v_tol)
