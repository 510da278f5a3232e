"""Mott lobes of the Jaynes-Cummings-Hubbard model at several detunings.

Prints the atomic-limit edges, the lobe tip and the boundary at a few
hoppings for the three lowest lobes, then the same lobe from a small
exact-diagonalization check.
"""
import numpy as np

from jchm_dicke.ed import PERIODIC, LatticeSpec, ground_state
from jchm_dicke.jc_onsite import ModelParams, hubbard_u
from jchm_dicke.slave_boson import critical_hopping, lobe_tip, mott_boundary, solve


def main():
    print(f"Hubbard U at zero detuning: {hubbard_u(ModelParams()):.12f} g")
    for delta in (-1.0, 0.0, 1.0):
        base = ModelParams.from_detuning(delta=delta, D=1)
        print(f"\ndetuning {delta:+.1f} g")
        for n in (1, 2, 3):
            tip = lobe_tip(n, base)
            lo, hi = mott_boundary(n, base, -1), mott_boundary(n, base, +1)
            print(f"  lobe {n}: J=0 edges [{lo:+.5f}, {hi:+.5f}], tip J={tip.J:.5f} "
                  f"mu={tip.mu:+.5f}")
            for frac in (0.25, 0.5, 0.75):
                q = base.with_(J=frac * tip.J)
                print(f"    J={q.J:.5f}: [{mott_boundary(n, q, -1):+.5f}, "
                      f"{mott_boundary(n, q, +1):+.5f}]")

    base = ModelParams.from_detuning(mu_rel=-0.7, D=1)
    print(f"\nn=1 at mu-omega_c=-0.7: critical hopping {critical_hopping(1, base):.5f}")
    for J in np.linspace(0.0, 0.1, 6):
        p = base.with_(J=float(J))
        sol = solve(p, n=1)
        gs = ground_state(LatticeSpec(2, 8, p, PERIODIC))
        print(f"  J={J:.2f}: phi_c={sol.phi_c:.5f}  e_var={sol.e_var:+.6f}  "
              f"ED dimer energy/site={gs.energy / 2:+.6f}")


if __name__ == "__main__":
    main()
