"""Finite-temperature decoupling mean-field boundary of the JCHM.

Decoupling the hopping as ``a_i^dag a_j -> psi* a_j + a_i^dag psi - |psi|^2``
leaves independent sites in a coherent field ``Jz psi``.  The normal state is
unstable once ``Jz chi_loc(T, mu) = 1`` with ``chi_loc`` the static photon
susceptibility of a single Jaynes-Cummings site in the grand-canonical
ensemble.
"""
from __future__ import annotations

import math
import sys
import warnings

import numpy as np
from scipy.optimize import brentq

from ..jc_onsite import BRANCHES, LOWER, ModelParams, hopping_element, jc_energy


class TruncationWarning(UserWarning):
    pass


def _levels(p, n_max, include_upper):
    """(n, sigma, energy) for all on-site levels up to ``n_max`` polaritons."""
    out = [(0, LOWER, 0.0)]
    for n in range(1, n_max + 1):
        for s in (BRANCHES if include_upper else (LOWER,)):
            out.append((n, s, jc_energy(n, s, p)))
    return out


def _weights(energies, T):
    e = np.asarray(energies)
    e0 = e.min()
    if T == 0:
        w = (e - e0 < 1e-12 * max(1.0, abs(e0))).astype(float)
    else:
        w = np.exp(-(e - e0) / T)
    return w / w.sum()


def local_susceptibility(p: ModelParams, T: float, n_max: int = 20,
                         include_upper: bool = True, warn_tol: float = 1e-10) -> float:
    """Static susceptibility ``d<a>/d lambda`` of one site for ``H' = -lambda (a + a^dag)``.

    ``chi = sum_{i,j} |<j|a|i>|^2 (p_j - p_i) / (E_i - E_j)`` over levels ``i`` with
    ``n`` and ``j`` with ``n - 1`` polaritons; degenerate pairs take their
    ``beta p`` limit.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    lv = _levels(p, n_max, include_upper)
    energies = [e for _, _, e in lv]
    w = _weights(energies, T)
    top = max(w[i] for i, (n, _, _) in enumerate(lv) if n == n_max)
    if top > warn_tol:
        warnings.warn(f"Boltzmann weight {top:.2e} at the truncation n_max={n_max}",
                      TruncationWarning, stacklevel=2)
    index = {(n, s): i for i, (n, s, _) in enumerate(lv)}
    chi = 0.0
    for (n, s, e_i) in lv:
        if n == 0:
            continue
        i = index[(n, s)]
        for nu in (BRANCHES if include_upper and n - 1 >= 1 else (LOWER,)):
            j = index[(n - 1, nu)]
            m2 = hopping_element(n, s, nu, p) ** 2
            gap = e_i - energies[j]
            if abs(gap) < 1e-12:
                chi += m2 * (w[i] / T if T > 0 else (0.0 if w[i] == 0 else math.inf))
            else:
                chi += m2 * (w[j] - w[i]) / gap
    return chi


def critical_hopping_at(p: ModelParams, T: float, **kw) -> float:
    """Hopping ``J_c(T, mu) = 1 / (z chi_loc)`` above which the normal state is unstable."""
    chi = local_susceptibility(p, T, **kw)
    if chi <= 0:
        return math.inf
    return 1.0 / (p.z * chi)


def finite_T_boundary(p: ModelParams, T: float, **kw) -> float:
    """Critical hopping at temperature ``T`` and chemical potential ``p.mu``."""
    return critical_hopping_at(p, T, **kw)


def instability_margin(p: ModelParams, T: float, **kw) -> float:
    """``Jz chi_loc - 1``: positive in the superfluid."""
    return p.z * p.J * local_susceptibility(p, T, **kw) - 1.0


def critical_temperature(p: ModelParams, T_max: float = 100.0, xtol: float = 1e-12,
                         rtol: float = 1e-10, **kw) -> float:
    """Temperature where the superfluid at ``(J, mu)`` turns normal.

    Returns 0 when the point is normal at ``T = 0`` and ``T_max`` if it is
    still superfluid there.
    """
    # a margin at rounding level is the T = 0 boundary itself
    if instability_margin(p, 0.0, **kw) <= 8 * sys.float_info.epsilon:
        return 0.0
    # the T = 0 limit is approached smoothly from a tiny positive temperature
    lo = T_max * 1e-12
    if instability_margin(p, lo, **kw) <= 0:
        return 0.0
    # grow the bracket geometrically so high temperatures (and the truncation
    # they would need) are only visited when the superfluid survives there
    hi = min(1e-2 * p.g, T_max)
    while instability_margin(p, hi, **kw) > 0:
        if hi >= T_max:
            warnings.warn(f"still superfluid at T_max={T_max}", RuntimeWarning, stacklevel=2)
            return T_max
        lo, hi = hi, min(2.0 * hi, T_max)
    return brentq(lambda t: instability_margin(p, t, **kw), lo, hi, xtol=xtol, rtol=rtol)
