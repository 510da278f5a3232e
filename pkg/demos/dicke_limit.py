"""Large-bandwidth limit: the lattice theory approaches the Dicke model.

Compares the n = 1 boundary, the lobe tip, the amplitude gap, the tip sound
velocity and the critical temperature as the hopping grows.
"""
from jchm_dicke import bridge as br
from jchm_dicke import dicke as dk


def main():
    print("Dicke tip (delta_d, mu_d):", (-2.0, -1.0), "lobe edges at delta_d=-3:",
          dk.boundary_t0(-3.0))
    d_tip, m_tip = br.lobe_tip_match()
    for name, c in (("tip delta_d", d_tip), ("tip mu_d", m_tip)):
        vals = ", ".join(f"{v:+.6f}" for v in c.sb_values)
        print(f"{name}: J={c.J_values} -> {vals}; extrapolated {c.extrapolated:+.8f} "
              f"(limit {c.dicke_value:+.1f})")
    for J in br.DEFAULT_J:
        print(f"boundary sup-norm at J={J:g}: {br.boundary_match(J).sup_norm:.3e}")
    gap = br.amplitude_gap_match(-3.0)
    print(f"amplitude gap at delta_d=-3: extrapolated {gap.extrapolated:.8f}, "
          f"limit {gap.dicke_value:.8f}")
    for J in (10.0, 50.0, 200.0):
        v = br.sound_velocity_match(J=J)
        print(f"tip sound velocity at J={J:g}: {v.c_sb:.6f}, sqrt(Jg)={v.c_dicke:.6f}")
    for dd in (-1.0, -3.0):
        t = br.tc_comparison(dd)
        norms = ", ".join(f"J={J:g}: {x:.3e}" for J, x in t.sup_norms.items())
        print(f"T_c at delta_d={dd:g}: {br.positive_regions(t.tc_dicke)} positive region(s); "
              f"sup-norm vs Dicke {norms}")


if __name__ == "__main__":
    main()
