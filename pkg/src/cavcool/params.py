"""Parameter models and the conversions between laboratory and normalized units.

Every analysis routine in this package consumes :class:`NormalizedParams`, in
which all rates are measured in units of the mechanical frequency omega_m.
:class:`PhysicalParams` (SI units) is optional sugar for users who start from
a laboratory description of the sphere, trap, and cavities.
"""

import math
from dataclasses import dataclass, replace

from .errors import ConfigError, ValidationError

HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s
SILICA_DENSITY = 2200.0  # kg / m^3, default sphere material

# Mode volume convention for a standing-wave Gaussian cavity mode,
# V_c = MODE_VOLUME_FACTOR * w^2 * L.
MODE_VOLUME_FACTOR = math.pi / 4.0


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-unit description of sphere, trap, cavities, and drives.

    Lengths in meters, densities in kg/m^3, rates and drive amplitudes in
    rad/s.  E1 drives the trap mode, E2 the cooling mode, E3 the auxiliary
    cavity; J is the tunnel coupling between the two cavities.
    """

    radius: float
    omega_m: float
    kappa: float
    kappa3: float
    E1: complex
    E2: complex = 0.0
    E3: complex = 0.0
    delta1: float = 0.0
    delta2: float = 0.0
    delta3: float = 0.0
    J: complex = 0.0
    gamma: float = 0.0
    n_th: float = 0.0
    density: float = SILICA_DENSITY
    epsilon: float = 2.0
    wavelength: float = 1.0e-6
    cavity_length: float = 1.0e-2
    waist: float = 25.0e-6

    def __post_init__(self):
        _require_positive(self.radius, "radius")
        _require_positive(self.density, "density")
        _require_positive(self.wavelength, "wavelength")
        _require_positive(self.cavity_length, "cavity_length")
        _require_positive(self.waist, "waist")
        _require_positive(self.omega_m, "omega_m")
        _require_positive(self.kappa, "kappa")
        _require_positive(self.kappa3, "kappa3")
        _require_nonnegative(self.gamma, "gamma")
        _require_nonnegative(self.n_th, "n_th")
        if not self.epsilon > 1.0:
            raise ValidationError(f"epsilon must exceed 1, got {self.epsilon}")


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless model state: every rate in units of omega_m.

    The phase convention rotates the drive phases away, so J and Omega_m are
    real and nonnegative.  gamma_sc is the photon-recoil phonon heating rate,
    n_th the thermal bath occupancy.
    """

    delta2p: float
    delta3: float
    kappa: float
    kappa3: float
    J: float
    Omega_m: float
    gamma: float = 0.0
    gamma_sc: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        _require_positive(self.kappa, "kappa")
        _require_positive(self.kappa3, "kappa3")
        _require_nonnegative(self.gamma, "gamma")
        _require_nonnegative(self.gamma_sc, "gamma_sc")
        _require_nonnegative(self.J, "J")
        _require_nonnegative(self.Omega_m, "Omega_m")
        for name in ("delta2p", "delta3"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")

    def replace(self, **changes):
        return replace(self, **changes)


def _require_positive(value, name):
    if not (math.isfinite(value) and value > 0.0):
        raise ValidationError(f"{name} must be positive and finite, got {value}")


def _require_nonnegative(value, name):
    if not (math.isfinite(value) and value >= 0.0):
        raise ValidationError(f"{name} must be nonnegative and finite, got {value}")


def sphere_volume(phys):
    return (4.0 / 3.0) * math.pi * phys.radius**3


def mass(phys):
    return phys.density * sphere_volume(phys)


def wavenumber(phys):
    return 2.0 * math.pi / phys.wavelength


def polarizability_factor(phys):
    """(eps - 1) / (eps + 2), the Clausius-Mossotti factor."""
    return (phys.epsilon - 1.0) / (phys.epsilon + 2.0)


def recoil_heating(radius, epsilon=2.0, wavelength=1.0e-6):
    """Photon-recoil heating rate in units of omega_m, from SI inputs.

    gamma_sc / omega_m = (4 pi^2 / 5) * (eps-1)/(eps+2) * V / lambda^3,
    with V the sphere volume.  Grows with the cube of the radius.
    """
    _require_positive(radius, "radius")
    _require_positive(wavelength, "wavelength")
    if not epsilon > 1.0:
        raise ValidationError(f"epsilon must exceed 1, got {epsilon}")
    volume = (4.0 / 3.0) * math.pi * radius**3
    return (
        (4.0 * math.pi**2 / 5.0)
        * (epsilon - 1.0)
        / (epsilon + 2.0)
        * volume
        / wavelength**3
    )


def gamma_sc(phys):
    """Photon-recoil heating rate of a physical configuration, in units of omega_m."""
    return recoil_heating(phys.radius, phys.epsilon, phys.wavelength)


def mode_volume(phys, factor=MODE_VOLUME_FACTOR):
    return factor * phys.waist**2 * phys.cavity_length


def coupling_g(phys, mode_volume_factor=MODE_VOLUME_FACTOR):
    """Single-photon optomechanical frequency scale g in rad/s.

    g = (3 V / 4 V_c) * (eps-1)/(eps+2) * omega_L with omega_L the optical
    drive frequency 2 pi c / lambda.  The mode volume convention V_c is
    configurable because the choice (standing wave vs ring) varies between
    laboratories.
    """
    omega_laser = 2.0 * math.pi * C_LIGHT / phys.wavelength
    v_ratio = 3.0 * sphere_volume(phys) / (4.0 * mode_volume(phys, mode_volume_factor))
    return v_ratio * polarizability_factor(phys) * omega_laser


def x_zpf(phys):
    """Zero-point position spread sqrt(hbar / 2 m omega_m) in meters."""
    return math.sqrt(HBAR / (2.0 * mass(phys) * phys.omega_m))


def j_sideband_preset(kappa_normalized):
    """J = sqrt(kappa * omega_m) in units of omega_m (figure-style choice)."""
    _require_positive(kappa_normalized, "kappa")
    return math.sqrt(kappa_normalized)


def j_input_output_preset(kappa_normalized, kappa3_normalized):
    """J = sqrt(kappa * kappa3), the input-output matched tunnel rate."""
    _require_positive(kappa_normalized, "kappa")
    _require_positive(kappa3_normalized, "kappa3")
    return math.sqrt(kappa_normalized * kappa3_normalized)


def normalize(phys, steady):
    """Build NormalizedParams from a physical description and its mean-field state.

    Divides every rate by omega_m and applies the phase convention that makes
    J and Omega_m real nonnegative.  `steady` supplies the shifted detuning
    delta2p (rad/s) and effective coupling Omega_m (rad/s, possibly complex).
    """
    w = phys.omega_m
    return NormalizedParams(
        delta2p=steady.delta2p / w,
        delta3=phys.delta3 / w,
        kappa=phys.kappa / w,
        kappa3=phys.kappa3 / w,
        J=abs(phys.J) / w,
        Omega_m=abs(steady.Omega_m) / w,
        gamma=phys.gamma / w,
        gamma_sc=gamma_sc(phys),
        n_th=phys.n_th,
    )


def denormalized_rates(p, omega_m):
    """Map a NormalizedParams back to rad/s rates (round-trip helper)."""
    _require_positive(omega_m, "omega_m")
    return {
        "delta2p": p.delta2p * omega_m,
        "delta3": p.delta3 * omega_m,
        "kappa": p.kappa * omega_m,
        "kappa3": p.kappa3 * omega_m,
        "J": p.J * omega_m,
        "Omega_m": p.Omega_m * omega_m,
        "gamma": p.gamma * omega_m,
        "gamma_sc": p.gamma_sc * omega_m,
    }


# ---------------------------------------------------------------------------
# Flat key-value config format
# ---------------------------------------------------------------------------

RATE_KEYS = (
    "delta2p",
    "delta3",
    "kappa",
    "kappa3",
    "J",
    "Omega_m",
    "gamma",
    "gamma_sc",
    "n_th",
)
PHYSICAL_KEYS = (
    "radius_nm",
    "density",
    "epsilon",
    "lambda_um",
    "cavity_length_cm",
    "waist_um",
)
# `omega_m` (rad/s) is required when omega_m_units = si; the rate keys alone
# carry no frequency scale to normalize against.
CONFIG_KEYS = ("omega_m_units", "omega_m") + RATE_KEYS + PHYSICAL_KEYS

_REQUIRED_RATE_KEYS = ("delta2p", "delta3", "kappa", "kappa3", "J", "Omega_m")


def parse_config(text):
    """Parse `key = value` config text into NormalizedParams.

    Lines starting with `#` and blank lines are ignored.  Unknown keys are a
    hard error.  With `omega_m_units = si` the rate keys are read as rad/s
    and divided by the mandatory `omega_m` key; the default mode
    (`normalized`) reads them as multiples of omega_m directly.  gamma_sc
    may be omitted and derived from the physical keys (radius_nm, epsilon,
    lambda_um) when those are present.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = (lineno, value)

    units = "normalized"
    if "omega_m_units" in values:
        lineno, raw_units = values.pop("omega_m_units")
        if raw_units not in ("normalized", "si"):
            raise ConfigError(
                f"line {lineno}: omega_m_units must be `normalized` or `si`, "
                f"got {raw_units!r}"
            )
        units = raw_units

    numbers = {}
    for key, (lineno, value) in values.items():
        try:
            numbers[key] = float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: value for {key!r} is not a number: {value!r}")

    scale = 1.0
    if units == "si":
        if "omega_m" not in numbers:
            raise ConfigError("omega_m_units = si requires an `omega_m` key (rad/s)")
        scale = numbers.pop("omega_m")
        if not (math.isfinite(scale) and scale > 0.0):
            raise ConfigError(f"omega_m must be positive, got {scale}")
    elif "omega_m" in numbers:
        raise ConfigError("`omega_m` key is only meaningful with omega_m_units = si")

    missing = [k for k in _REQUIRED_RATE_KEYS if k not in numbers]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    rates = {k: numbers[k] / scale for k in _REQUIRED_RATE_KEYS}
    rates["gamma"] = numbers.get("gamma", 0.0) / scale
    rates["n_th"] = numbers.get("n_th", 0.0)

    if "gamma_sc" in numbers:
        rates["gamma_sc"] = numbers["gamma_sc"] / scale
    elif {"radius_nm", "epsilon", "lambda_um"} <= numbers.keys():
        rates["gamma_sc"] = _gamma_sc_from_config(numbers)
    else:
        rates["gamma_sc"] = 0.0

    try:
        return NormalizedParams(**rates)
    except ValidationError as exc:
        raise ConfigError(str(exc))


def _gamma_sc_from_config(numbers):
    try:
        return recoil_heating(
            numbers["radius_nm"] * 1e-9,
            numbers["epsilon"],
            numbers["lambda_um"] * 1e-6,
        )
    except ValidationError as exc:
        raise ConfigError(str(exc))


def load_config(path):
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())
