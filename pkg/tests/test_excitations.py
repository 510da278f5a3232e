import math

import numpy as np
import pytest

import oracles
from jchm_dicke._numerics import richardson
from jchm_dicke.bogoliubov import DynamicalInstability, symplectic_energies
from jchm_dicke.jc_onsite import ModelParams
from jchm_dicke.slave_boson import (
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
    lobe_tip,
    mott_boundary,
    mott_poles,
    mott_spectrum,
    solve,
    sound_velocity,
)

SF_POINTS = [(-0.5, 0.08, 2), (-0.3, 0.06, 2), (-0.8, 0.05, 3), (-0.6, 0.3, 1), (-0.2, 0.07, 2)]
MOTT_POINTS = [(-0.7, 0.02, 2), (-0.9, 0.01, 3), (-0.55, 0.03, 1)]


def params(mu_rel, J, D, delta=0.0):
    return ModelParams.from_detuning(delta=delta, mu_rel=mu_rel, J=J, D=D)


def random_k(rng, D, n=64):
    return rng.uniform(-math.pi, math.pi, size=(n, D))


class TestBlocks:
    def test_symmetric_blocks(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        b = heff_block([0.3, -1.2], sol)
        assert b.g_block[0, 1] == b.g_block[1, 0]
        assert b.f_block[0, 1] == b.f_block[1, 0]
        np.testing.assert_array_equal(b.matrix, b.matrix.T)

    def test_zone_corner(self):
        sol = solve(params(-0.5, 0.08, 3), n=1)
        assert float(lattice_dispersion(np.full(3, math.pi))) == pytest.approx(-6.0, abs=1e-14)
        b = heff_block(np.full(3, math.pi), sol)
        b0 = heff_block(np.zeros(3), sol)
        # blocks are affine in eps_k: corner = 2 * mid - origin with eps_k = 0 halfway
        mid = heff_block(np.full(3, math.pi / 2), sol)
        np.testing.assert_allclose(b.g_block, 2 * mid.g_block - b0.g_block, atol=1e-13)
        np.testing.assert_allclose(b.f_block, 2 * mid.f_block - b0.f_block, atol=1e-13)

    def test_wrong_dimension(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        with pytest.raises(ValueError):
            heff_block([0.1, 0.2, 0.3], sol)

    @pytest.mark.parametrize("mu_rel,J,D", SF_POINTS + MOTT_POINTS)
    def test_closed_form_is_twice_the_symplectic_spectrum(self, mu_rel, J, D):
        # h_eff is the Nambu matrix of H = Psi^dag h_eff Psi, whose modes are
        # twice the symplectic eigenvalues of h_eff itself
        sol = solve(params(mu_rel, J, D), n=1)
        rng = np.random.default_rng(11)
        for k in random_k(rng, D, 16):
            b = heff_block(k, sol)
            ref = 2 * symplectic_energies(b.matrix, tol=1e-7)
            np.testing.assert_allclose(block_spectrum(b), ref, atol=1e-10)


class TestSpectrum:
    @pytest.mark.parametrize("mu_rel,J,D", SF_POINTS)
    def test_superfluid_matches_linearized_gutzwiller(self, mu_rel, J, D):
        p = params(mu_rel, J, D)
        sol = solve(p, n=1)
        assert sol.theta > 0
        rng = np.random.default_rng(3)
        for k in random_k(rng, D):
            ref = oracles.fluctuation_spectrum(sol.theta, sol.chi, 1, p, k)
            np.testing.assert_allclose(bogoliubov_spectrum(k, sol), ref, atol=1e-10)

    @pytest.mark.parametrize("mu_rel,J,D", MOTT_POINTS)
    def test_mott_matches_closed_form_and_oracle(self, mu_rel, J, D):
        p = params(mu_rel, J, D)
        sol = solve(p, n=1)
        assert sol.theta == 0
        rng = np.random.default_rng(5)
        ks = random_k(rng, D)
        lo, hi = mott_spectrum(ks, sol.lobe, p)
        for i, k in enumerate(ks):
            ref = oracles.fluctuation_spectrum(0.0, sol.chi, 1, p, k)
            got = bogoliubov_spectrum(k, sol)
            np.testing.assert_allclose(got, ref, atol=1e-10)
            np.testing.assert_allclose(got, (lo[i], hi[i]), atol=1e-10)
            np.testing.assert_allclose(block_spectrum(heff_block(k, sol)), ref, atol=1e-10)

    def test_mott_closed_form_at_zero_hopping(self):
        p = params(-0.7, 0.0, 2)
        sol = solve(p, n=1)
        plus, minus = mott_poles(np.zeros(2), sol.lobe, p)
        e = sol.lobe.eps
        u = sol.lobe.hubbard_u
        assert plus == pytest.approx(0.5 * (e[0] - e[2] + u), abs=1e-14)
        assert minus == pytest.approx(0.5 * (e[0] - e[2] - u), abs=1e-14)
        lo, hi = mott_spectrum(np.zeros(2), sol.lobe, p)
        gaps = sorted((sol.lobe.particle_gap, sol.lobe.hole_gap))
        assert (lo, hi) == pytest.approx(tuple(gaps), abs=1e-14)

    def test_vacuum_lobe_spectrum(self):
        p = params(-1.5, 0.05, 2)
        sol = solve(p, n=0)
        rng = np.random.default_rng(2)
        for k in random_k(rng, 2, 8):
            ref = oracles.fluctuation_spectrum(0.0, 0.0, 0, p, k)
            assert bogoliubov_spectrum(k, sol)[0] == pytest.approx(ref[0], abs=1e-10)
        sf = solve(params(-0.9, 0.3, 2), n=0)
        assert sf.theta > 0
        for k in random_k(rng, 2, 8):
            ref = oracles.fluctuation_spectrum(sf.theta, 0.0, 0, sf.params, k)
            assert bogoliubov_spectrum(k, sf)[0] == pytest.approx(ref[0], abs=1e-10)

    @pytest.mark.parametrize("mu_rel,J,D", SF_POINTS + MOTT_POINTS)
    def test_k_symmetries(self, mu_rel, J, D):
        sol = solve(params(mu_rel, J, D), n=1)
        rng = np.random.default_rng(9)
        for k in random_k(rng, D, 8):
            e = bogoliubov_spectrum(k, sol)
            assert bogoliubov_spectrum(-k, sol) == e
            assert bogoliubov_spectrum(k[::-1], sol) == pytest.approx(e, abs=1e-13)
            assert e[0] <= e[1] and e[0] >= 0

    def test_vectorized_matches_scalar(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        ks = random_k(np.random.default_rng(1), 2, 10)
        lo, hi = bogoliubov_spectrum(ks, sol)
        for i, k in enumerate(ks):
            np.testing.assert_allclose(bogoliubov_spectrum(k, sol), (lo[i], hi[i]), atol=1e-10)

    def test_unstable_mott_state_is_rejected(self):
        p = params(-0.7, 0.2, 2)
        lobe = solve(p.with_(J=0.0), n=1).lobe
        from jchm_dicke.slave_boson import MeanFieldSolution
        fake = MeanFieldSolution(0.0, 0.0, 0.0, lobe.eps[1], solve(p, n=1).lobe, p)
        with pytest.raises(DynamicalInstability):
            bogoliubov_spectrum(np.zeros(2), fake)


class TestGoldstoneAndAmplitude:
    @pytest.mark.parametrize("mu_rel,J,D", SF_POINTS)
    def test_goldstone_gapless(self, mu_rel, J, D):
        sol = solve(params(mu_rel, J, D), n=1)
        assert goldstone_gap(sol) < 1e-8

    def test_tip_is_gapless_and_linear(self):
        tip = lobe_tip(1, params(0.0, 0.0, 2))
        sol = solve(params(tip.mu, tip.J, 2), n=1)
        assert amplitude_gap(sol) < 1e-6
        assert sound_velocity(sol) > 0.01

    def test_generic_boundary_is_gapped_and_quadratic(self):
        base = params(0.0, 0.0, 2)
        q = base.with_(J=0.5 * lobe_tip(1, base).J)
        mu = mott_boundary(1, q, +1)
        sol = solve(q.with_(mu=mu), n=1)
        assert amplitude_gap(sol) > 0.05
        assert sound_velocity(sol) < 1e-3 * math.sqrt(q.J)

    def test_sound_velocity_isotropic_axes(self):
        sol = solve(params(-0.5, 0.08, 3), n=1)
        c = [sound_velocity(sol, axis=a) for a in range(3)]
        assert c[1] == pytest.approx(c[0], rel=1e-8)
        assert c[2] == pytest.approx(c[0], rel=1e-8)

    def test_sound_velocity_matches_slope(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        c = sound_velocity(sol)
        k = 1e-4
        assert bogoliubov_spectrum([k, 0.0], sol)[0] / k == pytest.approx(c, rel=1e-4)

    def test_unconverged_slope_is_reported(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        with pytest.raises(SoundVelocityError):
            sound_velocity(sol, h=2.0, rtol=1e-12, atol=0.0)

    @pytest.mark.parametrize("frac", [0.3, 0.7])
    @pytest.mark.parametrize("branch", [-1, 1])
    def test_gaps_continuous_across_boundary(self, frac, branch):
        base = params(0.0, 0.0, 2)
        q = base.with_(J=frac * lobe_tip(1, base).J)
        mu_b = mott_boundary(1, q, branch)
        dmu = 1e-8
        mott = solve(q.with_(mu=mu_b - branch * dmu), n=1)
        sf = solve(q.with_(mu=mu_b + branch * dmu), n=1)
        assert mott.theta == 0 and sf.theta > 0
        k0 = np.zeros(2)
        np.testing.assert_allclose(bogoliubov_spectrum(k0, mott), bogoliubov_spectrum(k0, sf),
                                   atol=1e-6)


class TestFluctuationEnergy:
    def test_grid_convergence(self):
        sol = solve(params(-0.5, 0.08, 2), n=1)
        vals = [fluctuation_energy(sol, n_k=n) for n in (16, 32, 64)]
        d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
        assert d2 <= d1
        # the |k| cusp of the Goldstone mode limits the order in the grid spacing
        order = math.log2(d1 / d2)
        assert order > 2.5
        _, err = richardson(vals[1:], ratio=2.0, orders=(order,))
        assert err < 1e-6

    def test_deep_mott_limit(self):
        sol = solve(params(-0.7, 0.0, 2), n=1)
        lobe = sol.lobe
        expected = fluctuation_constant(sol) + 0.5 * (lobe.particle_gap + lobe.hole_gap)
        assert fluctuation_energy(sol, n_k=8) == pytest.approx(expected, abs=1e-13)

    def test_grows_with_hopping(self):
        vals = [abs(fluctuation_energy(solve(params(-0.7, J, 2), n=1), n_k=32))
                for J in (0.0, 0.005, 0.01, 0.02, 0.03)]
        assert vals[0] == pytest.approx(0.0, abs=1e-14)
        assert np.all(np.diff(vals) > 0)

    def test_brillouin_grid(self):
        eps = brillouin_grid(4, 2)
        assert eps.shape == (16,)
        assert eps.mean() == pytest.approx(0.0, abs=1e-15)
        assert eps.min() == pytest.approx(-4.0)
