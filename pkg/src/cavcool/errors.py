"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid physical or normalized parameter values."""


class ConfigError(ValidationError):
    """Malformed config text; the message names the offending token."""


class TrapAbsent(ValidationError):
    """Mean-field solve requested with no trap drive (E1 = 0)."""


class NonConvergence(RuntimeError):
    """Fixed-point iteration hit the iteration cap."""

    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"mean-field solve did not converge after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class NotCooling(RuntimeError):
    """Net cooling rate is nonpositive; occupancy formulas do not apply."""

    def __init__(self, gamma_opt):
        self.gamma_opt = gamma_opt
        super().__init__(f"net cooling rate is not positive (Gamma_opt = {gamma_opt:.3e})")


class NoCoolingWindow(RuntimeError):
    """No detuning in the scanned range produced a positive net cooling rate."""


class Unstable(RuntimeError):
    """Drift matrix has an eigenvalue with nonnegative real part."""

    def __init__(self, max_real_eigenvalue):
        self.max_real_eigenvalue = max_real_eigenvalue
        super().__init__(
            f"linear model is unstable (max Re eigenvalue = {max_real_eigenvalue:.3e})"
        )


class IllConditioned(RuntimeError):
    """Steady-state solve finished but the residual target was not met."""


class GridTooCoarse(RuntimeError):
    """Extremum classification ambiguous on the supplied grid."""
