"""Bogoliubov spectra around the n = 1 lobe tip at zero detuning.

Below the tip the Mott spectrum is gapped, at the tip both branches are
gapless and linear, and in the superfluid the Goldstone mode stays gapless
while the amplitude mode reopens a gap.
"""
import numpy as np

from jchm_dicke.jc_onsite import ModelParams
from jchm_dicke.slave_boson import (
    amplitude_gap,
    bogoliubov_spectrum,
    fluctuation_energy,
    lobe_tip,
    solve,
    sound_velocity,
)


def main():
    base = ModelParams(D=2)
    tip = lobe_tip(1, base)
    print(f"tip: J_c0={tip.J:.6f} g, mu_c0={tip.mu:+.6f} g")
    ks = np.linspace(0.0, np.pi, 7)
    for factor in (0.5, 1.0, 1.5):
        sol = solve(base.with_(mu=tip.mu, J=factor * tip.J), n=1)
        phase = "superfluid" if sol.is_superfluid else "Mott"
        extra = f", c_s={sound_velocity(sol):.5f}" if sol.is_superfluid else ""
        print(f"\nJ={factor:.1f} J_c0 ({phase}): amplitude gap {amplitude_gap(sol):.3e}{extra}")
        for k in ks:
            lo, hi = bogoliubov_spectrum([k, 0.0], sol)
            print(f"  k=({k:.3f}, 0): eps_-={lo:.6f}  eps_+={hi:.6f}")
        print(f"  zero-point correction per site: {fluctuation_energy(sol, n_k=32):+.3e}")


if __name__ == "__main__":
    main()
