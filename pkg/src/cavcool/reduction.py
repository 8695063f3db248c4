"""Effective two-mode reduction and closed-form dynamical stability criteria.

When the cooling cavity is far detuned and broad (|delta2p| >> |delta3|,
kappa >> kappa3, gamma, J), it can be eliminated adiabatically, leaving an
effective single-cavity optomechanical system made of the auxiliary mode and
the sphere.  The effective parameters and the Routh-Hurwitz style stability
inequalities below are exact consequences of that elimination.
"""

import math
from dataclasses import dataclass

OMEGA_M = 1.0


@dataclass(frozen=True)
class EffectiveParams:
    """Parameters of the eliminated (auxiliary mode + sphere) system.

    eta = J / sqrt(delta2p^2 + kappa^2/4) measures how strongly the broad
    cavity participates; regime_ok reports whether every separation-of-scales
    condition holds by at least `factor`.
    """

    eta: float
    Omega_eff: float
    kappa_eff: float
    Delta_eff: float
    regime_ok: bool
    checks: dict


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of one closed-form stability inequality.

    `margin` is the signed, normalized slack of the governing inequality:
    positive means stable with room to spare.  stable <=> margin > 0.
    """

    stable: bool
    margin: float
    criterion: str


def effective_params(p, regime_factor=10.0):
    """Effective two-mode parameters (eta, Omega_eff, kappa_eff, Delta_eff)."""
    eta = p.J / math.sqrt(p.delta2p**2 + (p.kappa / 2.0) ** 2)
    checks = {
        "detuning_separation": abs(p.delta2p) >= regime_factor * abs(p.delta3),
        "kappa_dominates_kappa3": p.kappa >= regime_factor * p.kappa3,
        "kappa_dominates_gamma": p.kappa >= regime_factor * p.gamma,
        "kappa_dominates_J": p.kappa >= regime_factor * p.J,
    }
    return EffectiveParams(
        eta=eta,
        Omega_eff=eta * p.Omega_m,
        kappa_eff=p.kappa3 + eta**2 * p.kappa,
        Delta_eff=p.delta3 - eta**2 * p.delta2p,
        regime_ok=all(checks.values()),
        checks=checks,
    )


def _general_criterion(delta, coupling, kappa):
    """Signed left side of  delta [16 delta |O|^2 + (4 delta^2 + kappa^2) w] < 0."""
    return delta * (16.0 * delta * coupling**2 + (4.0 * delta**2 + kappa**2) * OMEGA_M)


def stability_single(p, at_optimum=False):
    """Single-cavity stability (J treated as zero, mechanical damping neglected).

    The general inequality is delta2p [16 delta2p Omega_m^2 +
    (4 delta2p^2 + kappa^2) omega_m] < 0; its margin is normalized by
    kappa^2 omega_m so sweeps are comparable across kappa scales.  With
    `at_optimum` the resolved-regime simplification at delta2p = -kappa/2,
    Omega_m^2 < kappa omega_m / 4, is evaluated instead.
    """
    if at_optimum:
        bound = p.kappa * OMEGA_M / 4.0
        margin = (bound - p.Omega_m**2) / bound
        return StabilityVerdict(margin > 0.0, margin, "single_at_optimum")
    lhs = _general_criterion(p.delta2p, p.Omega_m, p.kappa)
    margin = -lhs / (p.kappa**2 * OMEGA_M)
    return StabilityVerdict(margin > 0.0, margin, "single_general")


def stability_coupled(p, form="closed", regime_factor=10.0):
    """Coupled-cavity stability from the effective two-mode system.

    form="closed" evaluates the closed bound
        Omega_m^2 < (4 omega_m^2 + kappa_eff^2) / (16 eta^2),
    normalized margin (bound - Omega_m^2)/bound.  form="effective" applies
    the general inequality to (Delta_eff, Omega_eff, kappa_eff) with the
    effective mechanical frequency taken equal to omega_m.  eta = 0 is
    degenerate: the criterion constrains nothing, so the verdict is stable
    with infinite margin.
    """
    eff = effective_params(p, regime_factor)
    if eff.eta == 0.0:
        criterion = "coupled_closed" if form == "closed" else "coupled_effective"
        return StabilityVerdict(True, float("inf"), criterion)
    if form == "closed":
        bound = (4.0 * OMEGA_M**2 + eff.kappa_eff**2) / (16.0 * eff.eta**2)
        margin = (bound - p.Omega_m**2) / bound
        return StabilityVerdict(margin > 0.0, margin, "coupled_closed")
    if form != "effective":
        raise ValueError(f"form must be 'closed' or 'effective', got {form!r}")
    lhs = _general_criterion(eff.Delta_eff, eff.Omega_eff, eff.kappa_eff)
    margin = -lhs / (eff.kappa_eff**2 * OMEGA_M)
    return StabilityVerdict(margin > 0.0, margin, "coupled_effective")


def minimum_coupled_bound(kappa, kappa3):
    """Minimum over eta of the coupled stability bound.

    S_min = (kappa/4) sqrt(omega_m^2 + kappa3^2/4) + kappa kappa3 / 8,
    attained at eta_min = (4 omega_m^2 + kappa3^2)^(1/4) / sqrt(kappa).
    Always exceeds the single-cavity bound kappa omega_m / 4.
    """
    return kappa / 4.0 * math.sqrt(OMEGA_M**2 + kappa3**2 / 4.0) + kappa * kappa3 / 8.0


def minimizing_eta(kappa, kappa3):
    return (4.0 * OMEGA_M**2 + kappa3**2) ** 0.25 / math.sqrt(kappa)
