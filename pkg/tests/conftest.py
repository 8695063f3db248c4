"""Shared parameter builders for the test suite."""

import math

from cavcool.params import NormalizedParams, recoil_heating

# Reference sphere of the cooling-limit figures: r = 50 nm, eps = 2, lambda = 1 um.
RECOIL_50NM = recoil_heating(50e-9, 2.0, 1e-6)


def fig3_params(delta2p):
    """Spectrum-figure parameter set: kappa = 100, kappa3 = 1, J = 10, Omega_m = 5."""
    return NormalizedParams(
        delta2p=delta2p,
        delta3=0.5,
        kappa=100.0,
        kappa3=1.0,
        J=10.0,
        Omega_m=5.0,
        gamma=1e-5,
    )


def fig5_coupled(kappa, Omega_m=0.25, kappa3=1.0, gamma_sc=RECOIL_50NM):
    """Cooling-limit figure family: J = sqrt(kappa), delta2p = J^2/(delta3 + 1)."""
    j = math.sqrt(kappa)
    return NormalizedParams(
        delta2p=j**2 / 1.5,
        delta3=0.5,
        kappa=kappa,
        kappa3=kappa3,
        J=j,
        Omega_m=Omega_m,
        gamma=1e-5,
        gamma_sc=gamma_sc,
    )


def fig5_single(kappa, Omega_m=0.25, gamma_sc=RECOIL_50NM):
    """Single-cavity comparison at its optimum detuning delta2p = -kappa/2."""
    return NormalizedParams(
        delta2p=-kappa / 2.0,
        delta3=0.5,
        kappa=kappa,
        kappa3=1.0,
        J=0.0,
        Omega_m=Omega_m,
        gamma=1e-5,
        gamma_sc=gamma_sc,
    )
