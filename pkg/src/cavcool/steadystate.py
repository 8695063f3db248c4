"""Classical mean-field steady state and the linearization point.

Solves the coupled steady-state equations for the trap mode alpha1, cooling
mode alpha2, auxiliary mode alpha3, and the static displacement x0.  The only
nonlinearity is the scalar feedback of x0 on the cooling-mode detuning, so a
damped fixed-point iteration on x0 with an exact inner 2x2 solve is robust.
"""

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

from . import params as par
from .errors import NonConvergence, TrapAbsent, ValidationError


@dataclass(frozen=True)
class SteadyState:
    """Mean fields and derived linearization quantities (SI units).

    p0 is identically zero in steady state.  delta2p is the displacement-
    shifted detuning of the cooling mode (rad/s); Omega_m the effective
    linear optomechanical coupling 2 g k x_zpf alpha2 (rad/s, complex before
    the phase convention is applied).
    """

    alpha1: complex
    alpha2: complex
    alpha3: complex
    x0: float
    delta2p: float
    Omega_m: complex
    converged: bool
    iterations: int
    residual: float
    unique: bool = True
    p0: float = 0.0


def _mode_amplitudes(phys, g, k, x0):
    """Exact 2x2 solve for (alpha2, alpha3) at a frozen displacement x0."""
    m11 = 1j * (phys.delta2 + 2.0 * g * k * x0) - phys.kappa / 2.0
    m22 = 1j * phys.delta3 - phys.kappa3 / 2.0
    # [m11, -iJ; -iJ*, m22] [a2, a3] = [iE2, iE3]; (-iJ)(-iJ*) = -|J|^2.
    det = m11 * m22 + phys.J * np.conj(phys.J)
    if det == 0:
        raise ValidationError("degenerate cavity response: zero determinant in 2x2 solve")
    b2 = 1j * phys.E2
    b3 = 1j * phys.E3
    alpha2 = (m22 * b2 + 1j * phys.J * b3) / det
    alpha3 = (m11 * b3 + 1j * np.conj(phys.J) * b2) / det
    return alpha2, alpha3


def _residual(phys, g, k, alpha1, alpha2, alpha3, x0):
    """Max relative residual of the four steady-state equations.

    Each residual is normalized by the largest magnitude among its own terms,
    so the measure is dimensionless and meaningful for undriven modes too.
    """

    def rel(total, *terms):
        scale = max((abs(t) for t in terms), default=0.0)
        if scale == 0.0:
            return abs(total)
        return abs(total) / scale

    d2p = phys.delta2 + 2.0 * g * k * x0
    r1 = rel(
        -phys.kappa / 2.0 * alpha1 - 1j * phys.E1,
        phys.kappa / 2.0 * alpha1,
        phys.E1,
    )
    t2 = (1j * d2p - phys.kappa / 2.0) * alpha2
    r2 = rel(
        t2 - 1j * phys.J * alpha3 - 1j * phys.E2,
        t2,
        phys.J * alpha3,
        phys.E2,
    )
    t3 = (1j * phys.delta3 - phys.kappa3 / 2.0) * alpha3
    r3 = rel(
        t3 - 1j * np.conj(phys.J) * alpha2 - 1j * phys.E3,
        t3,
        phys.J * alpha2,
        phys.E3,
    )
    f_restore = 4.0 * g * k**2 * abs(alpha1) ** 2 * x0
    f_press = 2.0 * g * k * abs(alpha2) ** 2
    r4 = rel(-f_restore + f_press, f_restore, f_press)
    return max(r1, r2, r3, r4)


def _iterate_x0(phys, g, k, alpha1_sq, x0_seed, tol, max_iter, relax):
    x0 = x0_seed
    for iteration in range(1, max_iter + 1):
        alpha2, alpha3 = _mode_amplitudes(phys, g, k, x0)
        x0_new = abs(alpha2) ** 2 / (2.0 * k * alpha1_sq)
        step = x0_new - x0
        x0 = x0 + relax * step
        scale = max(abs(x0), abs(x0_new))
        if scale == 0.0 or abs(step) <= tol * scale:
            return x0, alpha2, alpha3, iteration
    return None, None, None, max_iter


def _bisect_first_crossing(displacement_map, x_hi, tol, samples=4001):
    """First fixed point of the displacement map to the right of zero.

    Fallback for strong drives where the damped iteration limit-cycles even
    though a fixed point exists: the map is bounded, so g(x) = F(x) - x
    starts positive (or zero) and must cross; the first crossing is the
    branch continuously connected to x = 0.  Also reports the number of
    crossings seen on the scan as a bistability diagnostic.
    """
    grid = np.linspace(0.0, x_hi, samples)
    values = np.array([displacement_map(x) - x for x in grid])
    signs = np.sign(values)
    flips = np.nonzero(np.diff(signs) != 0)[0]
    if len(flips) == 0:
        return None, 0
    lo, hi = grid[flips[0]], grid[flips[0] + 1]
    f_lo = values[flips[0]]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = displacement_map(mid) - mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= tol * max(hi, 1e-300):
            break
    return 0.5 * (lo + hi), len(flips)


def solve_mean_fields(phys, tol=1e-12, max_iter=10000, relax=0.5):
    """Solve the classical fixed point (alpha1, alpha2, alpha3, x0).

    Requires delta1 = 0 (trap driven on resonance) and a nonzero trap drive.
    Returns the branch continuously connected to x0 = 0 and flags
    non-uniqueness by re-solving from a perturbed seed.

    Raises TrapAbsent when E1 = 0 and NonConvergence past `max_iter`.
    """
    if phys.delta1 != 0.0:
        raise ValidationError(f"solver assumes delta1 = 0, got {phys.delta1}")
    if phys.E1 == 0:
        raise TrapAbsent("trap drive E1 must be nonzero")

    g = par.coupling_g(phys)
    k = par.wavenumber(phys)
    alpha1 = -2j * phys.E1 / phys.kappa
    alpha1_sq = abs(alpha1) ** 2

    def displacement_map(x):
        a2, _ = _mode_amplitudes(phys, g, k, x)
        return abs(a2) ** 2 / (2.0 * k * alpha1_sq)

    x0, alpha2, alpha3, iterations = _iterate_x0(
        phys, g, k, alpha1_sq, 0.0, tol, max_iter, relax
    )
    unique = True
    if x0 is None:
        # Steep displacement feedback makes the damped iteration limit-cycle
        # around its fixed point; fall back to bracketing the first crossing.
        x_hi = max(2.0 * displacement_map(0.0), phys.wavelength)
        for _ in range(60):
            if displacement_map(x_hi) < x_hi:
                break
            x_hi *= 2.0
        x0, crossings = _bisect_first_crossing(displacement_map, x_hi, tol)
        if x0 is None:
            alpha2, alpha3 = _mode_amplitudes(phys, g, k, 0.0)
            res = _residual(phys, g, k, alpha1, alpha2, alpha3, 0.0)
            raise NonConvergence(max_iter, res)
        alpha2, alpha3 = _mode_amplitudes(phys, g, k, x0)
        iterations = max_iter
        unique = crossings == 1
    else:
        # Probe for a second branch: restart well away from the solution.
        seed = 1.5 * x0 + 0.05 * phys.wavelength
        x0_alt, _, _, _ = _iterate_x0(phys, g, k, alpha1_sq, seed, tol, max_iter, relax)
        if x0_alt is not None:
            scale = max(abs(x0), abs(x0_alt), 1e-30)
            unique = abs(x0_alt - x0) / scale < 1e-6

    residual = _residual(phys, g, k, alpha1, alpha2, alpha3, x0)
    delta2p = phys.delta2 + 2.0 * g * k * x0
    omega_coupling = 2.0 * g * k * par.x_zpf(phys) * alpha2
    return SteadyState(
        alpha1=alpha1,
        alpha2=alpha2,
        alpha3=alpha3,
        x0=x0,
        delta2p=delta2p,
        Omega_m=omega_coupling,
        converged=True,
        iterations=iterations,
        residual=residual,
        unique=unique,
    )


def linear_point(ss, phys):
    """Normalized parameters of the linearized model around a converged state."""
    if not ss.converged:
        raise ValidationError("steady state did not converge; no linearization point")
    return par.normalize(phys, ss)


def derived_omega_m(phys, ss):
    """Mechanical frequency implied by the trap field: sqrt(4 hbar g k^2 |a1|^2 / m)."""
    g = par.coupling_g(phys)
    k = par.wavenumber(phys)
    return math.sqrt(4.0 * par.HBAR * g * k**2 * abs(ss.alpha1) ** 2 / par.mass(phys))


def trap_drive_for_omega_m(phys):
    """|E1| that makes the trap-derived mechanical frequency equal phys.omega_m."""
    g = par.coupling_g(phys)
    k = par.wavenumber(phys)
    alpha1_target = math.sqrt(par.mass(phys) * phys.omega_m**2 / (4.0 * par.HBAR * g * k**2))
    return phys.kappa * alpha1_target / 2.0


def drive_for_coupling(phys, target_omega_coupling, tol=1e-10, max_expand=200):
    """|E2| that produces a given normalized coupling Omega_m (bisection search).

    The forward map |E2| -> Omega_m is monotone (alpha2 is linear in E2 at
    fixed x0, and the x0 feedback preserves monotonicity at physical drive
    strengths), so bracketing plus bisection is reliable.
    """
    if target_omega_coupling < 0:
        raise ValidationError("target coupling must be nonnegative")
    if target_omega_coupling == 0:
        return 0.0

    phase = cmath.phase(phys.E2) if phys.E2 != 0 else 0.0

    def forward(magnitude):
        candidate = replace(phys, E2=magnitude * cmath.exp(1j * phase))
        ss = solve_mean_fields(candidate)
        return abs(ss.Omega_m) / phys.omega_m

    lo, hi = 0.0, max(abs(phys.E2), phys.kappa)
    for _ in range(max_expand):
        if forward(hi) >= target_omega_coupling:
            break
        hi *= 2.0
    else:
        raise NonConvergence(max_expand, float("inf"))

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if forward(mid) < target_omega_coupling:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(hi, 1.0):
            break
    return 0.5 * (lo + hi)
