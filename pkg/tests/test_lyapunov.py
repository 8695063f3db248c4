"""Lyapunov-oracle tests: model construction, exact limits, cross-checks."""

import math

import numpy as np
import pytest
from conftest import fig5_coupled

from cavcool import lyapunov, response
from cavcool.errors import NotCooling, Unstable
from cavcool.params import NormalizedParams

SQRT2 = math.sqrt(2.0)


def make_params(**overrides):
    base = dict(
        delta2p=66.0, delta3=0.5, kappa=100.0, kappa3=1.0, J=10.0,
        Omega_m=0.25, gamma=1e-5, gamma_sc=0.0, n_th=0.0,
    )
    base.update(overrides)
    return NormalizedParams(**base)


def complex_basis_matrix():
    """Transform from (X2,Y2,X3,Y3,q,p) to (a2,a2+,a3,a3+,b,b+)."""
    u = np.zeros((6, 6), dtype=complex)
    for mode in range(3):
        x, y = 2 * mode, 2 * mode + 1
        u[2 * mode, x] = 1 / SQRT2
        u[2 * mode, y] = 1j / SQRT2
        u[2 * mode + 1, x] = 1 / SQRT2
        u[2 * mode + 1, y] = -1j / SQRT2
    return u


class TestBuildModel:
    def test_decoupled_blocks(self):
        p = make_params(J=0.0, Omega_m=0.0)
        a = lyapunov.build_model(p).drift
        assert np.all(a[0:2, 2:] == 0)
        assert np.all(a[2:4, :2] == 0)
        assert np.all(a[2:4, 4:] == 0)
        assert np.all(a[4:, :4] == 0)

    def test_damping_trace_identity(self):
        p = make_params()
        a = lyapunov.build_model(p).drift
        assert np.trace(a) == pytest.approx(-(p.kappa + p.kappa3 + p.gamma), rel=1e-14)

    def test_complex_basis_rows_match_linearized_equations(self):
        """U A U^-1 must reproduce the complex mode equations coefficient by
        coefficient: a2 row (i delta2p - kappa/2, -iJ, +i Omega on b and b+),
        a3 row (i delta3 - kappa3/2, -iJ), b row (-i - gamma/2, +i Omega on
        a2 and a2+)."""
        p = make_params()
        a = lyapunov.build_model(p).drift
        u = complex_basis_matrix()
        a_c = u @ a @ np.linalg.inv(u)
        expect = np.zeros((6, 6), dtype=complex)
        expect[0, 0] = 1j * p.delta2p - p.kappa / 2
        expect[0, 2] = -1j * p.J
        expect[0, 4] = expect[0, 5] = 1j * p.Omega_m
        expect[2, 2] = 1j * p.delta3 - p.kappa3 / 2
        expect[2, 0] = -1j * p.J
        expect[4, 4] = -1j - p.gamma / 2
        expect[4, 0] = expect[4, 1] = 1j * p.Omega_m
        for row in (0, 2, 4):
            assert np.allclose(a_c[row], expect[row], atol=1e-12), row
        # Conjugate rows by symmetry of the real representation.
        assert np.allclose(a_c[1], np.conj(expect[0])[[1, 0, 3, 2, 5, 4]], atol=1e-12)

    def test_diffusion_entries(self):
        p = make_params(gamma=1e-3, gamma_sc=2e-4, n_th=3.0)
        d = lyapunov.build_model(p).diffusion
        assert d[0, 0] == pytest.approx(p.kappa / 2)
        assert d[2, 2] == pytest.approx(p.kappa3 / 2)
        expected_mech = p.gamma * (2 * p.n_th + 1) / 2 + p.gamma_sc
        assert d[4, 4] == pytest.approx(expected_mech)
        assert d[5, 5] == pytest.approx(expected_mech)
        assert np.all(np.linalg.eigvalsh(d) >= 0)


class TestFrequencyDomainEquivalence:
    def test_optical_response_reproduces_susceptibilities(self):
        """(-i w I - A)^-1 on the a_in,2 / a_in,3 forcing columns must equal
        chi(w) sqrt(kappa) and the chained aux response, for the decoupled
        optical sector (Omega_m = 0)."""
        p = make_params(Omega_m=0.0)
        a = lyapunov.build_model(p).drift
        u = complex_basis_matrix()
        a_c = u @ a @ np.linalg.inv(u)
        for w in np.linspace(-4, 4, 17):
            transfer = np.linalg.inv(-1j * w * np.eye(6) - a_c)
            chi = response.chi_total(w, p)
            chi3 = response.chi3(w, p)
            # a2 response to its own vacuum input.
            assert transfer[0, 0] * math.sqrt(p.kappa) == pytest.approx(
                chi * math.sqrt(p.kappa), rel=1e-10
            )
            # a2 response to the auxiliary input enters through -iJ chi3.
            expected_cross = chi * (-1j * p.J) * chi3 * math.sqrt(p.kappa3)
            assert transfer[0, 2] * math.sqrt(p.kappa3) == pytest.approx(
                expected_cross, rel=1e-10
            )
            # a3 row: chi3 with the back-coupling through the broad cavity.
            chi3_dressed = 1.0 / (1.0 / chi3 + p.J**2 * response.chi2(w, p))
            assert transfer[2, 2] * math.sqrt(p.kappa3) == pytest.approx(
                chi3_dressed * math.sqrt(p.kappa3), rel=1e-10
            )

    def test_mechanical_row_matches_chi_m(self):
        p = make_params(Omega_m=0.0, gamma=1e-3)
        a = lyapunov.build_model(p).drift
        u = complex_basis_matrix()
        a_c = u @ a @ np.linalg.inv(u)
        for w in (0.5, 1.0, 1.7):
            transfer = np.linalg.inv(-1j * w * np.eye(6) - a_c)
            assert transfer[4, 4] == pytest.approx(response.chi_m(w, p), rel=1e-10)


class TestEigenvalues:
    def test_uncoupled_damped_system_stable(self):
        p = make_params(J=0.0, Omega_m=0.0, gamma=1e-4)
        stable, max_real = lyapunov.eigen_stable(lyapunov.build_model(p))
        assert stable
        assert max_real == pytest.approx(-p.gamma / 2, rel=1e-9)

    def test_characteristic_polynomial_roots_match(self):
        """Faddeev-LeVerrier coefficients + companion roots as an independent
        spectrum oracle."""
        p = fig5_coupled(100.0)
        a = lyapunov.build_model(p).drift
        coeffs = lyapunov.characteristic_polynomial(a)
        roots = np.sort_complex(np.roots(coeffs))
        eigen = np.sort_complex(np.linalg.eigvals(a))
        assert np.allclose(roots, eigen, rtol=1e-7, atol=1e-9)

    def test_resolved_sideband_boundary_crossing(self):
        kappa = 2.0
        base = NormalizedParams(
            delta2p=-kappa / 2, delta3=0.5, kappa=kappa, kappa3=1.0, J=0.0,
            Omega_m=0.1, gamma=1e-5,
        )
        below = base.replace(Omega_m=math.sqrt(kappa / 4 * (1 - 1e-3)))
        above = base.replace(Omega_m=math.sqrt(kappa / 4 * (1 + 1e-3)))
        assert lyapunov.eigen_stable(lyapunov.build_model(below))[0]
        assert not lyapunov.eigen_stable(lyapunov.build_model(above))[0]

    def test_fig5_preset_stable(self):
        stable, _ = lyapunov.eigen_stable(lyapunov.build_model(fig5_coupled(100.0)))
        assert stable


class TestSolveSteady:
    def test_vacuum(self):
        p = make_params(Omega_m=0.0, gamma=1e-3)
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        assert result.n_phonon == pytest.approx(0.0, abs=1e-12)
        # optical quadratures at vacuum too
        assert result.V[0, 0] == pytest.approx(0.5, rel=1e-12)

    def test_thermal_occupancy(self):
        p = make_params(Omega_m=0.0, gamma=1e-3, n_th=5.0)
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        assert result.n_phonon == pytest.approx(5.0, rel=1e-12)

    def test_recoil_heating_balance(self):
        # Closed-form 2x2: beam-splitter damping at gamma/2 with symmetric
        # diffusion d gives V = (d/gamma) I, so n = n_th + gamma_sc / gamma.
        p = make_params(Omega_m=0.0, gamma=1e-3, gamma_sc=2e-4)
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        assert result.n_phonon == pytest.approx(0.2, rel=1e-12)

    def test_thermal_plus_recoil_randomized(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            p = NormalizedParams(
                delta2p=rng.uniform(-100, 100),
                delta3=rng.uniform(-2, 2),
                kappa=10 ** rng.uniform(-1, 2),
                kappa3=10 ** rng.uniform(-1, 1),
                J=rng.uniform(0, 5),
                Omega_m=0.0,
                gamma=10 ** rng.uniform(-3, 0),
                gamma_sc=10 ** rng.uniform(-6, -2),
                n_th=rng.uniform(0, 100),
            )
            result = lyapunov.solve_steady(lyapunov.build_model(p))
            expected = p.n_th + p.gamma_sc / p.gamma
            assert result.n_phonon == pytest.approx(expected, rel=1e-10)

    def test_covariance_properties(self):
        p = fig5_coupled(100.0)
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        assert np.array_equal(result.V, result.V.T)
        assert np.min(np.linalg.eigvalsh(result.V)) >= -1e-12
        assert result.residual <= 1e-10

    def test_unstable_raises(self):
        p = make_params(J=0.0, delta2p=50.0, Omega_m=0.5, gamma=1e-5)
        with pytest.raises(Unstable):
            lyapunov.solve_steady(lyapunov.build_model(p))

    def test_cooled_occupancy_matches_rate_picture(self):
        p = fig5_coupled(100.0)
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        from cavcool import cooling

        report = cooling.cooling_limit(p)
        n_rate = (report.A_plus + p.gamma_sc) / (report.Gamma_opt + p.gamma)
        assert result.n_phonon == pytest.approx(n_rate, rel=0.02)


class TestOracleCompare:
    def test_both_vanish_in_weak_coupling_vacuum_limit(self):
        p = fig5_coupled(100.0, Omega_m=1e-3, gamma_sc=0.0)
        report = lyapunov.oracle_compare(p)
        assert report.n_rate < 1e-3
        assert report.n_lyapunov < 1e-3
        assert report.rel_dev < 0.01

    def test_deep_perturbative_agreement(self):
        report = lyapunov.oracle_compare(fig5_coupled(100.0, Omega_m=0.025))
        assert report.rel_dev <= 0.20

    def test_deviation_monotone_over_coupling_ladder(self):
        deviations = [
            lyapunov.oracle_compare(fig5_coupled(100.0, Omega_m=om)).rel_dev
            for om in (0.25, 0.15, 0.1, 0.05, 0.025)
        ]
        assert all(a > b for a, b in zip(deviations, deviations[1:]))

    def test_formula_documented_gap(self):
        report = lyapunov.oracle_compare(fig5_coupled(100.0, Omega_m=0.025))
        # The bare formula misses gamma in the denominator, so it sits far
        # above the exact answer at weak coupling.
        assert report.n_formula > 1.5 * report.n_lyapunov
        assert "gamma" in report.note

    def test_not_cooling_propagates(self):
        p = fig5_coupled(100.0).replace(J=0.0, delta2p=50.0, Omega_m=0.01)
        with pytest.raises(NotCooling):
            lyapunov.oracle_compare(p)
