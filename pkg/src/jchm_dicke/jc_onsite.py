"""Single-site Jaynes-Cummings eigensystem.

Each cavity holds one photon mode (frequency ``omega_c``) coupled with strength
``g`` to a two-level system (splitting ``omega_x``).  The on-site Hamiltonian
conserves the polariton number ``n`` and splits into 2x2 blocks spanned by
``|n, g>`` and ``|n-1, e>``.  The two eigenstates of block ``n`` are the lower
(``sigma = -1``) and upper (``sigma = +1``) polaritons::

    |n +> = sin(t_n) |n, g> + cos(t_n) |n-1, e>
    |n -> = cos(t_n) |n, g> - sin(t_n) |n-1, e>

Energies are grand-canonical, i.e. they include ``-mu * n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

LOWER = -1
UPPER = +1
BRANCHES = (LOWER, UPPER)


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the Jaynes-Cummings-Hubbard model.

    Parameters
    ----------
    omega_c : float
        Cavity photon frequency.
    omega_x : float
        Two-level system splitting.
    g : float
        Light-matter coupling; the natural energy unit.
    J : float
        Nearest-neighbour photon hopping.
    mu : float
        Chemical potential for the total polariton number.
    D : int
        Dimension of the hypercubic lattice (coordination ``z = 2D``).
    """

    omega_c: float = 0.0
    omega_x: float = 0.0
    g: float = 1.0
    J: float = 0.0
    mu: float = 0.0
    D: int = 1

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"coupling g must be positive, got {self.g}")
        if not self.J >= 0:
            raise ValueError(f"hopping J must be non-negative, got {self.J}")
        if self.D not in (1, 2, 3):
            raise ValueError(f"lattice dimension D must be 1, 2 or 3, got {self.D}")

    @property
    def delta(self) -> float:
        """Detuning ``omega_x - omega_c``."""
        return self.omega_x - self.omega_c

    @property
    def z(self) -> int:
        """Coordination number of the hypercubic lattice."""
        return 2 * self.D

    @property
    def mu_rel(self) -> float:
        """Chemical potential measured from the cavity frequency, ``mu - omega_c``."""
        return self.mu - self.omega_c

    @classmethod
    def from_detuning(cls, delta=0.0, mu_rel=0.0, g=1.0, J=0.0, D=1, omega_c=0.0):
        """Build parameters from detuning and ``mu - omega_c``."""
        return cls(omega_c=omega_c, omega_x=omega_c + delta, g=g, J=J,
                   mu=omega_c + mu_rel, D=D)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    def in_units_of_g(self) -> "ModelParams":
        """Same physics with every energy divided by ``g``."""
        s = 1.0 / self.g
        return ModelParams(self.omega_c * s, self.omega_x * s, 1.0, self.J * s,
                           self.mu * s, self.D)


@dataclass(frozen=True)
class PolaritonLevel:
    n: int
    sigma: int
    energy: float
    mixing_angle: float
    chi_n: float


def _check_branch(sigma):
    if sigma not in BRANCHES:
        raise ValueError(f"branch must be -1 (lower) or +1 (upper), got {sigma!r}")


def _check_level(n, sigma):
    _check_branch(sigma)
    if n < 0 or int(n) != n:
        raise ValueError(f"polariton number must be a non-negative integer, got {n}")
    if n == 0 and sigma != LOWER:
        raise ValueError("the n = 0 level exists only on the lower branch")


def chi_n(n, p: ModelParams) -> float:
    """Half the polariton splitting, ``sqrt(g^2 n + delta^2 / 4)``."""
    return math.sqrt(p.g * p.g * n + 0.25 * p.delta * p.delta)


def jc_energy(n: int, sigma: int, p: ModelParams) -> float:
    """Grand-canonical on-site energy of the polariton level ``(n, sigma)``."""
    _check_level(n, sigma)
    if n == 0:
        return 0.0
    return -p.mu_rel * n + 0.5 * p.delta + sigma * chi_n(n, p)


def _cos_sin(n, p):
    """(cos t_n, sin t_n) from the weight formulas; n = 0 gives the bare vacuum (1, 0)."""
    if n == 0:
        return 1.0, 0.0
    x = 0.5 * p.delta / chi_n(n, p)
    return math.sqrt(0.5 * (1.0 + x)), math.sqrt(0.5 * (1.0 - x))


def mixing_angle(n: int, p: ModelParams) -> float:
    """Mixing angle ``t_n`` in (0, pi/2) of the polariton doublet ``n >= 1``."""
    if n < 1 or int(n) != n:
        raise ValueError(f"mixing angle defined for n >= 1, got {n}")
    c, s = _cos_sin(n, p)
    return math.atan2(s, c)


def polariton_level(n: int, sigma: int, p: ModelParams) -> PolaritonLevel:
    _check_level(n, sigma)
    angle = 0.0 if n == 0 else mixing_angle(n, p)
    return PolaritonLevel(n, sigma, jc_energy(n, sigma, p), angle, chi_n(n, p))


def levels(n_max: int, p: ModelParams) -> list[PolaritonLevel]:
    """All levels up to ``n_max`` in the order (0-), (1-), (1+), (2-), ..."""
    out = [polariton_level(0, LOWER, p)]
    for n in range(1, n_max + 1):
        out.extend(polariton_level(n, s, p) for s in BRANCHES)
    return out


def eigenvector(n: int, sigma: int, p: ModelParams) -> np.ndarray:
    """Components of ``|n sigma>`` on ``(|n, g>, |n-1, e>)``."""
    _check_level(n, sigma)
    c, s = _cos_sin(n, p)
    if n == 0:
        return np.array([1.0, 0.0])
    return np.array([s, c]) if sigma == UPPER else np.array([c, -s])


def hopping_element(n: int, sigma: int, nu: int, p: ModelParams) -> float:
    """Photon matrix element ``<n-1, nu| a |n, sigma>`` between polariton levels.

    Only the photonic parts connect: ``a|n,g> = sqrt(n)|n-1,g>`` and
    ``a|n-1,e> = sqrt(n-1)|n-2,e>``.
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"hopping element needs n >= 1, got {n}")
    _check_branch(sigma)
    _check_level(n - 1, nu)
    upper = eigenvector(n, sigma, p)
    lower = eigenvector(n - 1, nu, p)
    return float(lower[0] * upper[0] * math.sqrt(n) + lower[1] * upper[1] * math.sqrt(n - 1))


def lower_hopping(n: int, p: ModelParams) -> float:
    """Shorthand for ``f_n = <n-1, -| a |n, ->``."""
    return hopping_element(n, LOWER, LOWER, p)


def hubbard_u(p: ModelParams, sigma: int = LOWER) -> float:
    """Effective on-site repulsion ``(e_2 - e_1) - (e_1 - e_0)`` on branch ``sigma``."""
    e0 = jc_energy(0, LOWER, p)
    e1 = jc_energy(1, sigma, p)
    e2 = jc_energy(2, sigma, p)
    return (e2 - e1) - (e1 - e0)


def block_matrix(n: int, p: ModelParams) -> np.ndarray:
    """The 2x2 grand-canonical block of the on-site Hamiltonian for ``n >= 1``."""
    if n < 1:
        raise ValueError("block defined for n >= 1")
    r = math.sqrt(n) * p.g
    base = -p.mu_rel * n
    return np.array([[base, r], [r, base + p.delta]])
