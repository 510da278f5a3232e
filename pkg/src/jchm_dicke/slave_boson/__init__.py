"""Slave-boson (Gutzwiller) mean-field theory of the JCHM on the lower polariton branch."""
from .mean_field import (
    ConvergenceError,
    LobeContext,
    LobeTip,
    MeanFieldSolution,
    NoLobeError,
    boundary_discriminant,
    critical_hopping,
    lobe_tip,
    minimize_gutzwiller,
    mott_boundary,
    mott_chi,
    order_parameter,
    solve,
    variational_energy,
)
from .excitations import (
    BogoliubovBlock,
    SoundVelocityError,
    amplitude_gap,
    block_spectrum,
    bogoliubov_spectrum,
    brillouin_grid,
    fluctuation_constant,
    fluctuation_energy,
    goldstone_gap,
    heff_block,
    lattice_dispersion,
    local_terms,
    mott_poles,
    mott_spectrum,
    sound_velocity,
    spectrum_coefficients,
)
from .finite_t import (
    TruncationWarning,
    critical_hopping_at,
    critical_temperature,
    finite_T_boundary,
    instability_margin,
    local_susceptibility,
)
