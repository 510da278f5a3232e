"""Mean-field theory of the multi-mode Dicke model with a quadratic photon band.

Energies are measured in the rotating frame set by the chemical potential:
``w0 = -mu_d`` is the photon energy at the band bottom, ``wx = delta_d - mu_d``
the two-level splitting and ``wk = J k^2 - mu_d`` a photon at wave number ``k``.
"""
from __future__ import annotations

import math
import sys
import warnings
from dataclasses import dataclass, replace

from scipy.optimize import bisect

from ._numerics import richardson
from .bogoliubov import DynamicalInstability
from .jc_onsite import ModelParams
from .slave_boson.mean_field import NoLobeError

NORMAL = "normal"
SUPERRADIANT = "superradiant"
ROUNDING = 8 * sys.float_info.epsilon


@dataclass(frozen=True)
class DickeParams:
    """Dicke-frame couplings.  ``J`` is ``1/(2m)`` of the photon band."""

    mu_d: float
    delta_d: float
    g: float = 1.0
    J: float = 1.0
    T: float = 0.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError("g must be positive")
        if self.J < 0:
            raise ValueError("J must be non-negative")
        if self.T < 0:
            raise ValueError("T must be non-negative")

    @property
    def stable(self) -> bool:
        """``mu_d < 0``; otherwise the photon band bottom is unbounded below."""
        return self.mu_d < 0

    @property
    def w0(self) -> float:
        return -self.mu_d

    @property
    def wx(self) -> float:
        return self.delta_d - self.mu_d

    def wk(self, k):
        return self.J * k * k - self.mu_d

    def with_(self, **kw) -> "DickeParams":
        return replace(self, **kw)


def from_jchm(p: ModelParams) -> DickeParams:
    """Band-bottom expansion of the lattice model: ``mu_d = mu + 2DJ - w_c``, ``delta_d = delta + 2DJ``."""
    d = DickeParams(mu_d=p.mu + 2 * p.D * p.J - p.omega_c,
                    delta_d=p.delta + 2 * p.D * p.J, g=p.g, J=p.J)
    if not d.stable:
        warnings.warn(f"mu_d = {d.mu_d} >= 0: thermodynamically unstable", RuntimeWarning,
                      stacklevel=2)
    return d


def to_jchm(d: DickeParams, D: int, omega_c: float = 0.0) -> ModelParams:
    """Lattice parameters whose band-bottom expansion is ``d``."""
    shift = 2 * D * d.J
    return ModelParams(omega_c=omega_c, omega_x=omega_c + d.delta_d - shift, g=d.g,
                       J=d.J, mu=omega_c + d.mu_d - shift, D=D)


def _thermal_factor(x: float, T: float) -> float:
    """``x / tanh(x / 2T)``, with its ``T = 0`` limit ``|x|`` and ``x = 0`` limit ``2T``."""
    if T == 0:
        return abs(x)
    if x == 0:
        return 2.0 * T
    y = x / (2.0 * T)
    if abs(y) > 350:
        return abs(x)
    return x / math.tanh(y)


def residual(d: DickeParams) -> float:
    """``g^2 - w0 wx / tanh(wx / 2T)``; positive in the superradiant phase."""
    if not d.stable:
        raise ValueError("criterion needs mu_d < 0")
    return d.g ** 2 - d.w0 * _thermal_factor(d.wx, d.T)


def superradiance_criterion(d: DickeParams) -> bool:
    return residual(d) > 0


@dataclass(frozen=True)
class DickeSolution:
    psi0_sq: float
    E: float
    phase: str

    @property
    def superradiant(self) -> bool:
        return self.phase == SUPERRADIANT


def condensate_t0(d: DickeParams) -> DickeSolution:
    """Zero-temperature solution of the gap equation ``w0 = g^2 / E``."""
    if not d.stable:
        raise ValueError("condensate needs mu_d < 0")
    w0, wx, g = d.w0, d.wx, d.g
    psi2 = 0.25 * (g * g / (w0 * w0) - wx * wx / (g * g))
    if psi2 <= 0 or not superradiance_criterion(d.with_(T=0.0)):
        return DickeSolution(0.0, abs(wx), NORMAL)
    return DickeSolution(psi2, math.sqrt(wx * wx + 4 * g * g * psi2), SUPERRADIANT)


def gap_residual(d: DickeParams, sol: DickeSolution) -> float:
    """``w0 - g^2 / E`` at a superradiant solution, 0 for the normal phase."""
    if not sol.superradiant:
        return 0.0
    E = math.sqrt(d.wx ** 2 + 4 * d.g ** 2 * sol.psi0_sq)
    return d.w0 - d.g ** 2 / E


def boundary_t0(delta_d: float, g: float = 1.0):
    """Edges ``(lower, upper)`` in ``mu_d`` of the one-excitation lobe at ``T = 0``.

    Raises :class:`NoLobeError` for ``delta_d > -2g``.
    """
    disc = delta_d * delta_d - 4 * g * g
    if disc < 0:
        raise NoLobeError(f"no n=1 lobe at delta_d={delta_d} > -2g")
    r = math.sqrt(disc)
    lo = 0.5 * (delta_d - r)
    # product of roots is g^2: avoids cancellation in the upper edge
    hi = g * g / lo
    return lo, hi


def vacuum_boundary_t0(delta_d: float, g: float = 1.0) -> float:
    """Edge in ``mu_d`` of the vacuum (``wx > 0``) region at ``T = 0``."""
    return 0.5 * (delta_d - math.sqrt(delta_d * delta_d + 4 * g * g))


def boundary_delta(mu_d: float, g: float = 1.0) -> float:
    """Detuning at which ``mu_d`` lies on the one-excitation lobe boundary."""
    if mu_d >= 0:
        raise ValueError("mu_d must be negative")
    return mu_d + g * g / mu_d


def spectrum(k, d: DickeParams, sol: DickeSolution):
    """Excitation energies ``(lower, upper)`` at wave number ``|k|``.

    In the superradiant phase ``eps^2 = A +/- sqrt(A^2 - B)``.  In the
    normal phase the closed form is evaluated with signed ``wx``; the
    physical energies of an inverted (one-excitation) state are
    ``(eps_+, -eps_-)``.
    """
    wk = d.wk(k)
    w0, wx = d.w0, d.wx
    if sol.superradiant:
        E2 = sol.E ** 2
        A = 0.5 * (E2 + wk * wk + 2 * wx * w0)
        B = (wk - w0) * (E2 * wk - wx * wx * w0)
        disc = A * A - B
        if disc < -1e-10 * A * A or A < 0:
            raise DynamicalInstability("superradiant spectrum is unstable")
        root = math.sqrt(max(disc, 0.0))
        upper2 = A + root
        lower2 = max(B, 0.0) / upper2 if upper2 > 0 else 0.0
        return math.sqrt(lower2), math.sqrt(upper2)
    s = 1.0 if wx >= 0 else -1.0  # one-sided limit from the vacuum side at wx = 0
    Q = (wk - wx) ** 2 + 4 * d.g ** 2 * s
    if Q < 0:
        raise DynamicalInstability("normal phase is unstable")
    r = math.sqrt(Q)
    plus, minus = 0.5 * (wk + wx + r), 0.5 * (wk + wx - r)
    if s > 0:
        return minus, plus
    lo, hi = sorted((plus, -minus))
    if lo < -1e-12 * (abs(wk) + abs(wx) + d.g):
        # the inverted state inside the superradiant region
        raise DynamicalInstability("normal phase is unstable")
    return lo, hi


def amplitude_gap(d: DickeParams, sol: DickeSolution | None = None) -> float:
    sol = condensate_t0(d) if sol is None else sol
    return spectrum(0.0, d, sol)[1]


def sound_velocity(d: DickeParams, sol: DickeSolution | None = None, h: float = 1e-2,
                   rtol: float = 1e-4, atol: float = 1e-6) -> float:
    """Slope of the lower branch at ``k -> 0``, Richardson-extrapolated from ``k = h, h/2, h/4``.

    ``h`` is measured in units of ``sqrt(g / J)``, the length scale on which
    the dispersion turns from linear to quadratic at the lobe tip.
    """
    sol = condensate_t0(d) if sol is None else sol
    scale = math.sqrt(d.g / d.J) if d.J > 0 else 1.0
    ks = [h * scale / 2 ** i for i in range(3)]
    c, err = richardson([spectrum(k, d, sol)[0] / k for k in ks], ratio=2.0, orders=(1, 2))
    if err > atol + rtol * abs(c):
        raise ArithmeticError(f"slope not converged: c = {c:.6g} +- {err:.2g}")
    return max(c, 0.0)


@dataclass(frozen=True)
class TcResult:
    tc: float
    capped: bool = False


def tc_closed_form(d: DickeParams) -> float:
    """``T_c = |wx| / (2 atanh(w0 |wx| / g^2))``; 0 if normal at ``T = 0``."""
    x, w0, g2 = abs(d.wx), d.w0, d.g ** 2
    if w0 * x >= g2:
        return 0.0
    if x == 0:
        return g2 / (2 * w0)
    return x / (2 * math.atanh(w0 * x / g2))


def tc_solve(d: DickeParams, T_max: float = 100.0, rtol: float = 1e-10) -> TcResult:
    """Critical temperature from the finite-``T`` criterion by bisection.

    The thermal factor grows monotonically with ``T``, so the criterion
    holds exactly on ``[0, T_c)``.
    """
    d0 = d.with_(T=0.0)
    # points on the boundary up to rounding are normal: T_c rises only
    # logarithmically in the residual, so a 1e-16 residual would give T_c ~ 1e-2
    if residual(d0) <= ROUNDING * (d.g ** 2 + d.w0 * abs(d.wx)):
        return TcResult(0.0)
    if residual(d.with_(T=T_max)) > 0:
        return TcResult(T_max, capped=True)
    tc = bisect(lambda t: residual(d.with_(T=t)), 0.0, T_max, xtol=1e-300, rtol=rtol)
    return TcResult(tc)
