"""Cooling and heating rates, phonon limits, and optimum-detuning search."""

import math
from dataclasses import dataclass

import numpy as np

from . import response
from .errors import NoCoolingWindow, NotCooling

OMEGA_M = response.OMEGA_M


@dataclass(frozen=True)
class CoolingReport:
    """Rates and steady-state occupancy limits, all in units of omega_m.

    n_q = A_plus / Gamma_opt is the quantum backaction limit, n_c =
    gamma_sc / Gamma_opt the recoil (classical) limit, n_f their sum.  When
    Gamma_opt <= 0 the occupancies are NaN and `cooling` is False.
    """

    A_minus: float
    A_plus: float
    Gamma_opt: float
    spring_shift: float
    n_q: float
    n_c: float
    n_f: float
    cooling: bool


def rates(p):
    """Cooling and heating rates (A_minus, A_plus) = S_FF(+-omega_m) x_zpf^2."""
    return float(response.s_ff(OMEGA_M, p)), float(response.s_ff(-OMEGA_M, p))


def net_rate(p):
    """Net optical damping Gamma_opt = A_minus - A_plus (sign free)."""
    a_minus, a_plus = rates(p)
    return a_minus - a_plus


def spring_shift(p):
    """Optical spring shift Re Sigma(omega_m)."""
    return float(response.self_energy(OMEGA_M, p).real)


def cooling_limit(p, require_cooling=False):
    """Steady-state phonon limit n_f = (A_plus + gamma_sc) / Gamma_opt.

    The thermal-bath contribution gamma*n_th/Gamma_opt is deliberately not
    included; the Lyapunov oracle carries it and comparisons zero it out.
    With `require_cooling` a nonpositive Gamma_opt raises NotCooling instead
    of returning a flagged report.
    """
    a_minus, a_plus = rates(p)
    gamma_opt = a_minus - a_plus
    shift = spring_shift(p)
    if gamma_opt <= 0.0:
        if require_cooling:
            raise NotCooling(gamma_opt)
        nan = float("nan")
        return CoolingReport(a_minus, a_plus, gamma_opt, shift, nan, nan, nan, False)
    n_q = a_plus / gamma_opt
    n_c = p.gamma_sc / gamma_opt
    return CoolingReport(a_minus, a_plus, gamma_opt, shift, n_q, n_c, n_q + n_c, True)


def closed_form_detuning(p):
    """Interference-optimal detuning delta2p = J^2 / (delta3 + omega_m).

    Places the dressed auxiliary resonance on the cooling sideband; the
    figure presets and the ground-state-window sweeps use this choice.
    """
    return p.J**2 / (p.delta3 + OMEGA_M)


def _golden_section(fun, a, b, tol):
    """Minimize a unimodal function on [a, b] to absolute tolerance tol."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


def optimal_detuning(p, mode="closed_form", objective="n_f", span=3.0, points=2001, tol=1e-6):
    """Optimum cooling detuning delta2p.

    mode="closed_form" returns J^2/(delta3 + omega_m).  mode="numeric" scans
    delta2p over [-span*kappa, +span*kappa] and polishes the best bracket by
    golden section to `tol`.  The objective is the phonon limit n_f
    (minimized) or "net_rate" (Gamma_opt maximized).  Raises NoCoolingWindow
    when no scanned detuning cools at all (n_f objective).
    """
    if mode == "closed_form":
        return closed_form_detuning(p)
    if mode != "numeric":
        raise ValueError(f"mode must be 'closed_form' or 'numeric', got {mode!r}")
    if objective == "n_f":

        def cost(delta):
            report = cooling_limit(p.replace(delta2p=delta))
            return report.n_f if report.cooling else float("inf")

    elif objective == "net_rate":

        def cost(delta):
            return -net_rate(p.replace(delta2p=delta))

    else:
        raise ValueError(f"objective must be 'n_f' or 'net_rate', got {objective!r}")

    grid = np.linspace(-span * p.kappa, span * p.kappa, points)
    values = np.array([cost(d) for d in grid])
    if objective == "n_f" and not np.any(np.isfinite(values)):
        raise NoCoolingWindow(
            f"Gamma_opt <= 0 for every detuning in [{grid[0]:.3g}, {grid[-1]:.3g}]"
        )
    best = int(np.nanargmin(np.where(np.isfinite(values), values, np.inf)))
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, points - 1)]
    return _golden_section(cost, lo, hi, tol)
