"""Command-line front end: config ingestion, figure presets, sweeps, CSV output.

Every subcommand writes an RFC-4180-style CSV (header row, LF endings,
17-significant-digit floats) so that two runs with the same inputs produce
byte-identical files.  `figure` additionally writes a gnuplot script sidecar
referencing the CSV.  Exit codes: 0 success, 2 validation/usage error,
3 numeric failure.  Non-cooling or unstable parameter points are data
(flag columns / NaN values), not failures.
"""

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cooling, lyapunov, params, reduction, response
from .errors import (
    ConfigError,
    GridTooCoarse,
    IllConditioned,
    NoCoolingWindow,
    NonConvergence,
    NotCooling,
    Unstable,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3

# Recoil rate for the reference sphere (r = 50 nm, eps = 2, lambda = 1 um).
RECOIL_50NM = params.recoil_heating(50e-9, 2.0, 1e-6)

SWEEPABLE = params.RATE_KEYS + ("omega",)


# ---------------------------------------------------------------------------
# CSV emission
# ---------------------------------------------------------------------------


def _format_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit_csv(rows, schema, path):
    """Write rows (sequences matching `schema`) as CSV with LF endings.

    Floats carry 17 significant digits so a parse-back reproduces them
    bit-exactly; NaN cells are emitted as the literal `nan`.
    """
    if len(set(schema)) != len(schema):
        raise ValidationError(f"duplicate column names in schema {schema}")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(",".join(schema) + "\n")
            for row in rows:
                if len(row) != len(schema):
                    raise ValidationError(
                        f"row width {len(row)} does not match schema width {len(schema)}"
                    )
                handle.write(",".join(_format_cell(cell) for cell in row) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def _write_gnuplot(path, csv_path, title, xlabel, ylabel, columns, logy=False, surface=None):
    lines = [
        f'# gnuplot script for {title}; data in "{csv_path}"',
        'set datafile separator ","',
        "set key autotitle columnhead",
        f'set xlabel "{xlabel}"',
        f'set ylabel "{ylabel}"',
    ]
    if logy:
        lines.append("set logscale y")
    if surface:
        # long-format (row-major) map: interpolate onto a grid for splot
        rows, cols = surface
        lines.append(f"set dgrid3d {rows},{cols}")
        lines.append(f'splot "{csv_path}" using 2:1:3 with lines')
    else:
        plots = ", ".join(f'"{csv_path}" using 1:{idx} with lines' for idx in columns)
        lines.append(f"plot {plots}")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Point evaluation for sweeps and single-point subcommands
# ---------------------------------------------------------------------------


def _limit_row(p):
    report = cooling.cooling_limit(p)
    flag = "ok" if report.cooling else "not_cooling"
    return report, flag


QUANTITIES = (
    "S_ff",
    "A_minus",
    "A_plus",
    "Gamma_opt",
    "delta_omega_m",
    "n_q",
    "n_c",
    "n_f",
    "eta",
    "Omega_eff",
    "kappa_eff",
    "Delta_eff",
    "regime_ok",
    "stable_single",
    "margin_single",
    "stable_coupled",
    "margin_coupled",
    "stable",
    "max_real_eig",
    "n_lyapunov",
)


def evaluate_quantities(p, names, omega=None):
    """Evaluate the requested quantities at one parameter point.

    Returns (values dict, flag).  Non-cooling and unstable points yield NaN
    for the affected quantities and a descriptive flag.
    """
    out = {}
    flag = "ok"
    report = None
    eff = None
    for name in names:
        if name == "S_ff":
            if omega is None:
                raise ValidationError("quantity S_ff requires an `omega` axis")
            out[name] = float(response.s_ff(omega, p))
        elif name in ("A_minus", "A_plus", "Gamma_opt", "n_q", "n_c", "n_f"):
            if report is None:
                report, rflag = _limit_row(p)
                if rflag != "ok":
                    flag = rflag
            out[name] = getattr(report, name)
        elif name == "delta_omega_m":
            out[name] = cooling.spring_shift(p)
        elif name in ("eta", "Omega_eff", "kappa_eff", "Delta_eff", "regime_ok"):
            if eff is None:
                eff = reduction.effective_params(p)
            out[name] = getattr(eff, name)
        elif name == "stable_single":
            out[name] = reduction.stability_single(p).stable
        elif name == "margin_single":
            out[name] = reduction.stability_single(p).margin
        elif name == "stable_coupled":
            out[name] = reduction.stability_coupled(p).stable
        elif name == "margin_coupled":
            out[name] = reduction.stability_coupled(p).margin
        elif name in ("stable", "max_real_eig"):
            stable, max_real = lyapunov.eigen_stable(lyapunov.build_model(p))
            out["stable"] = stable
            out["max_real_eig"] = max_real
        elif name == "n_lyapunov":
            try:
                out[name] = lyapunov.solve_steady(lyapunov.build_model(p)).n_phonon
            except Unstable:
                out[name] = float("nan")
                flag = "unstable"
        else:
            raise ValidationError(f"unknown quantity {name!r}")
    return out, flag


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int
    scale: str

    def grid(self):
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: Axis
    axis2: "Axis | None"
    quantities: tuple
    dual: bool = False
    preset_coupling: bool = False


def parse_axis(text):
    parts = text.split(":")
    if len(parts) != 5:
        raise ValidationError(
            f"axis spec must be name:lo:hi:count:lin|log, got {text!r}"
        )
    name, lo, hi, count, scale = parts
    if name not in SWEEPABLE:
        raise ValidationError(f"unknown axis parameter {name!r}")
    try:
        lo, hi = float(lo), float(hi)
        count = int(count)
    except ValueError:
        raise ValidationError(f"non-numeric axis bounds in {text!r}")
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise ValidationError(f"axis bounds must be finite in {text!r}")
    if count < 2:
        raise ValidationError(f"axis count must be >= 2, got {count}")
    if scale not in ("lin", "log"):
        raise ValidationError(f"axis scale must be lin or log, got {scale!r}")
    if scale == "log" and (lo <= 0 or hi <= 0):
        raise ValidationError(f"log axis requires positive bounds, got {text!r}")
    return Axis(name, lo, hi, count, scale)


def _apply_point(base, assignments, preset_coupling):
    """NormalizedParams for one grid point; returns (params, omega or None)."""
    fields = {k: getattr(base, k) for k in params.RATE_KEYS}
    omega = None
    for name, value in assignments.items():
        if name == "omega":
            omega = value
        else:
            fields[name] = value
    if preset_coupling:
        fields["J"] = params.j_sideband_preset(fields["kappa"])
        fields["delta2p"] = fields["J"] ** 2 / (fields["delta3"] + 1.0)
    return params.NormalizedParams(**fields), omega


def _single_cavity(p):
    return p.replace(J=0.0, delta2p=-p.kappa / 2.0)


def run_sweep(base, spec):
    """Evaluate a sweep; grid points run concurrently, output in axis order."""
    axes = [spec.axis1] + ([spec.axis2] if spec.axis2 else [])
    grids = [axis.grid() for axis in axes]
    points = []
    if len(grids) == 1:
        points = [(v1,) for v1 in grids[0]]
    else:
        points = [(v1, v2) for v1 in grids[0] for v2 in grids[1]]

    def evaluate(point):
        assignments = {axis.name: value for axis, value in zip(axes, point)}
        p, omega = _apply_point(base, assignments, spec.preset_coupling)
        values, flag = evaluate_quantities(p, spec.quantities, omega)
        row = list(point)
        if spec.dual:
            p_single = _single_cavity(p)
            values_s, flag_s = evaluate_quantities(p_single, spec.quantities, omega)
            for name in spec.quantities:
                row.extend([values[name], values_s[name]])
            row.append(flag if flag != "ok" else flag_s)
        else:
            row.extend(values[name] for name in spec.quantities)
            row.append(flag)
        return row

    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(evaluate, points))

    schema = [axis.name for axis in axes]
    if spec.dual:
        for name in spec.quantities:
            schema.extend([f"{name}_coupled", f"{name}_single"])
    else:
        schema.extend(spec.quantities)
    schema.append("flag")
    return rows, schema


# ---------------------------------------------------------------------------
# Figure presets: named parameter sets for the standard lineshape, net-rate,
# and cooling-limit data products
# ---------------------------------------------------------------------------

FIG3_COMMON = dict(delta3=0.5, kappa=100.0, kappa3=1.0, J=10.0, Omega_m=5.0, gamma=1e-5)
FIG456_COMMON = dict(delta3=0.5, kappa3=1.0, Omega_m=0.25, gamma=1e-5)

FIGURE_PRESETS = {
    "fig3a": dict(FIG3_COMMON, delta2p=100.0, window=(-300.0, 300.0, 4001)),
    "fig3b": dict(FIG3_COMMON, delta2p=100.0, window=(-30.0, 30.0, 6001)),
    "fig3c": dict(FIG3_COMMON, delta2p=0.0, window=(-300.0, 300.0, 4001)),
    "fig3d": dict(FIG3_COMMON, delta2p=0.0, window=(-30.0, 30.0, 6001)),
    "fig3e": dict(FIG3_COMMON, delta2p=-100.0, window=(-300.0, 300.0, 4001)),
    "fig3f": dict(FIG3_COMMON, delta2p=-100.0, window=(-30.0, 30.0, 6001)),
    "fig4a": dict(FIG456_COMMON, single=True),
    "fig4b": dict(FIG456_COMMON, single=False),
    "fig5a": dict(FIG456_COMMON, delta2p=1.0, gamma_sc=RECOIL_50NM),
    "fig5b": dict(FIG456_COMMON, gamma_sc=RECOIL_50NM),
    "fig6a": dict(FIG456_COMMON, radii_nm=(40.0, 50.0, 60.0)),
    "fig6b": dict(FIG456_COMMON, gamma_sc=RECOIL_50NM, kappas=(10.0, 50.0, 100.0)),
}


def _fig3_rows(preset):
    keys = ("delta2p", "delta3", "kappa", "kappa3", "J", "Omega_m", "gamma")
    p = params.NormalizedParams(**{k: preset[k] for k in keys})
    lo, hi, count = preset["window"]
    grid = np.linspace(lo, hi, count)
    s_coupled = response.s_ff(grid, p)
    s_single = response.s_ff(grid, p.replace(J=0.0))
    rows = [[w, sc, ss] for w, sc, ss in zip(grid, s_coupled, s_single)]
    return rows, ["omega", "S_coupled", "S_single"]


def _fig4_rows(preset):
    rows = []
    for kappa in np.geomspace(1.0, 1000.0, 61):
        j = 0.0 if preset["single"] else params.j_sideband_preset(kappa)
        for ratio in np.linspace(-3.0, 3.0, 121):
            delta2p = ratio * kappa
            p = params.NormalizedParams(
                delta2p=delta2p,
                delta3=preset["delta3"],
                kappa=kappa,
                kappa3=preset["kappa3"],
                J=j,
                Omega_m=preset["Omega_m"],
                gamma=preset["gamma"],
            )
            rows.append([kappa, delta2p, cooling.net_rate(p)])
    return rows, ["kappa", "delta2p", "Gamma_opt"]


def _limit_cells(p):
    report, flag = _limit_row(p)
    return report.n_f, flag


def _fig5a_rows(preset):
    rows = []
    for j in np.linspace(0.05, 15.0, 300):
        kappa = j**2
        p = params.NormalizedParams(
            delta2p=preset["delta2p"],
            delta3=preset["delta3"],
            kappa=kappa,
            kappa3=preset["kappa3"],
            J=j,
            Omega_m=preset["Omega_m"],
            gamma=preset["gamma"],
            gamma_sc=preset["gamma_sc"],
        )
        n_c, f_c = _limit_cells(p)
        n_s, f_s = _limit_cells(_single_cavity(p))
        rows.append([j, n_c, f_c, n_s, f_s])
    return rows, ["J", "n_f_coupled", "flag_coupled", "n_f_single", "flag_single"]


def _coupled_preset_params(kappa, preset, kappa3=None, gamma_sc=None):
    j = params.j_sideband_preset(kappa)
    return params.NormalizedParams(
        delta2p=j**2 / (preset["delta3"] + 1.0),
        delta3=preset["delta3"],
        kappa=kappa,
        kappa3=preset["kappa3"] if kappa3 is None else kappa3,
        J=j,
        Omega_m=preset["Omega_m"],
        gamma=preset["gamma"],
        gamma_sc=preset.get("gamma_sc", 0.0) if gamma_sc is None else gamma_sc,
    )


def _fig5b_rows(preset):
    rows = []
    for kappa in np.geomspace(1.0, 1000.0, 200):
        p = _coupled_preset_params(kappa, preset)
        n_c, f_c = _limit_cells(p)
        n_s, f_s = _limit_cells(_single_cavity(p))
        rows.append([kappa, n_c, f_c, n_s, f_s])
    return rows, ["kappa", "n_f_coupled", "flag_coupled", "n_f_single", "flag_single"]


def _fig6a_rows(preset):
    radii = preset["radii_nm"]
    recoils = [params.recoil_heating(r * 1e-9, 2.0, 1e-6) for r in radii]
    rows = []
    for kappa in np.geomspace(1.0, 1000.0, 200):
        row = [kappa]
        for recoil in recoils:
            p = _coupled_preset_params(kappa, preset, gamma_sc=recoil)
            n_f, flag = _limit_cells(p)
            row.extend([n_f, flag])
        rows.append(row)
    schema = ["kappa"]
    for r in radii:
        schema.extend([f"n_f_r{r:g}nm", f"flag_r{r:g}nm"])
    return rows, schema


def _fig6b_rows(preset):
    kappas = preset["kappas"]
    rows = []
    for kappa3 in np.geomspace(0.05, 10.0, 200):
        row = [kappa3]
        for kappa in kappas:
            p = _coupled_preset_params(kappa, preset, kappa3=kappa3)
            n_f, flag = _limit_cells(p)
            row.extend([n_f, flag])
        rows.append(row)
    schema = ["kappa3"]
    for kappa in kappas:
        schema.extend([f"n_f_kappa{kappa:g}", f"flag_kappa{kappa:g}"])
    return rows, schema


def run_figure(preset_id, out_path):
    if preset_id not in FIGURE_PRESETS:
        raise ValidationError(f"unknown figure preset {preset_id!r}")
    preset = FIGURE_PRESETS[preset_id]
    surface = None
    if preset_id.startswith("fig3"):
        rows, schema = _fig3_rows(preset)
        labels = ("omega / omega_m", "S xzpf^2 / omega_m", False)
    elif preset_id.startswith("fig4"):
        rows, schema = _fig4_rows(preset)
        labels = ("delta2p / omega_m", "kappa / omega_m", True)
        surface = (61, 121)
    elif preset_id == "fig5a":
        rows, schema = _fig5a_rows(preset)
        labels = ("J / omega_m", "n_f", True)
    elif preset_id == "fig5b":
        rows, schema = _fig5b_rows(preset)
        labels = ("kappa / omega_m", "n_f", True)
    elif preset_id == "fig6a":
        rows, schema = _fig6a_rows(preset)
        labels = ("kappa / omega_m", "n_f", True)
    else:
        rows, schema = _fig6b_rows(preset)
        labels = ("kappa3 / omega_m", "n_f", True)
    emit_csv(rows, schema, out_path)
    gp_path = _sidecar_path(out_path)
    value_columns = [i + 1 for i, name in enumerate(schema) if not name.startswith("flag")][1:]
    _write_gnuplot(
        gp_path, out_path, preset_id, labels[0], labels[1], value_columns,
        logy=labels[2], surface=surface,
    )
    return gp_path


def _sidecar_path(out_path):
    text = str(out_path)
    if text.endswith(".csv"):
        return text[: -len(".csv")] + ".gp"
    return text + ".gp"


# ---------------------------------------------------------------------------
# Self test
# ---------------------------------------------------------------------------


def _selftest_checks():
    rng = np.random.default_rng(20240817)

    def random_params():
        return params.NormalizedParams(
            delta2p=rng.uniform(-1e3, 1e3),
            delta3=rng.uniform(-2.0, 2.0),
            kappa=10 ** rng.uniform(0, 3),
            kappa3=10 ** rng.uniform(-1, 1),
            J=rng.uniform(0.0, 10 ** rng.uniform(0, 1.5)),
            Omega_m=rng.uniform(0.0, 1.0),
            gamma=10 ** rng.uniform(-6, -2),
            gamma_sc=10 ** rng.uniform(-5, -2),
            n_th=rng.uniform(0.0, 10.0),
        )

    def check_response_identity():
        for _ in range(200):
            p = random_params()
            w = rng.uniform(-3, 3)
            chi = response.chi_total(w, p)
            lhs = 2.0 * chi.real
            rhs = abs(chi) ** 2 * (
                p.kappa + p.J**2 * p.kappa3 * abs(response.chi3(w, p)) ** 2
            )
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)

    def check_rate_consistency():
        for _ in range(200):
            p = random_params()
            gamma_two_way = -2.0 * response.self_energy(1.0, p).imag
            gamma_rates = cooling.net_rate(p)
            scale = sum(cooling.rates(p)) or 1.0
            assert abs(gamma_two_way - gamma_rates) <= 1e-10 * scale

    def check_lorentzian_reduction():
        p = random_params().replace(J=0.0)
        grid = np.linspace(-3, 3, 1001)
        s = response.s_ff(grid, p)
        lorentz = p.Omega_m**2 * p.kappa / ((grid + p.delta2p) ** 2 + p.kappa**2 / 4)
        assert np.all(np.abs(s - lorentz) <= 1e-12 * np.abs(lorentz) + 1e-300)

    def check_round_trip():
        for _ in range(50):
            p = random_params()
            omega_m = 10 ** rng.uniform(4, 8)
            rates_si = params.denormalized_rates(p, omega_m)
            for key, value in rates_si.items():
                back = value / omega_m
                ref = getattr(p, key)
                assert abs(back - ref) <= 1e-12 * max(abs(ref), 1e-300)

    def check_thermal_limit():
        for _ in range(20):
            p = random_params().replace(Omega_m=0.0, gamma=10 ** rng.uniform(-3, 0))
            result = lyapunov.solve_steady(lyapunov.build_model(p))
            expected = p.n_th + p.gamma_sc / p.gamma
            assert abs(result.n_phonon - expected) <= 1e-10 * expected

    def check_vacuum():
        p = params.NormalizedParams(
            delta2p=1.0, delta3=0.5, kappa=10.0, kappa3=1.0, J=2.0,
            Omega_m=0.0, gamma=1e-3,
        )
        result = lyapunov.solve_steady(lyapunov.build_model(p))
        assert abs(result.n_phonon) <= 1e-10

    def check_stability_enlargement():
        for _ in range(200):
            kappa = 10 ** rng.uniform(0, 3)
            kappa3 = 10 ** rng.uniform(-2, 1)
            assert reduction.minimum_coupled_bound(kappa, kappa3) > kappa / 4.0

    def check_single_criterion_grid():
        bad = 0
        for _ in range(200):
            kappa = 10 ** rng.uniform(0, 3)
            delta = rng.choice([-1.0, 1.0]) * kappa * 10 ** rng.uniform(-2, 0.5)
            p = params.NormalizedParams(
                delta2p=delta, delta3=0.5, kappa=kappa, kappa3=1.0, J=0.0,
                Omega_m=rng.uniform(0.05, 3.0), gamma=0.0,
            )
            verdict = reduction.stability_single(p)
            if abs(verdict.margin) < 1e-6:
                continue
            stable, _ = lyapunov.eigen_stable(lyapunov.build_model(p))
            bad += stable != verdict.stable
        assert bad == 0

    return [
        ("response interference identity", check_response_identity),
        ("net rate two-way consistency", check_rate_consistency),
        ("single-cavity Lorentzian reduction", check_lorentzian_reduction),
        ("normalization round trip", check_round_trip),
        ("Lyapunov thermal limit", check_thermal_limit),
        ("Lyapunov vacuum occupancy", check_vacuum),
        ("coupled stability bound enlargement", check_stability_enlargement),
        ("single-cavity criterion vs eigenvalues", check_single_criterion_grid),
    ]


def run_selftest(stream=None):
    stream = stream if stream is not None else sys.stdout
    failures = 0
    for name, check in _selftest_checks():
        try:
            check()
        except AssertionError:
            failures += 1
            stream.write(f"FAIL  {name}\n")
        else:
            stream.write(f"PASS  {name}\n")
    stream.write(f"{'all checks passed' if failures == 0 else f'{failures} check(s) failed'}\n")
    return failures


# ---------------------------------------------------------------------------
# Argument parsing and subcommand dispatch
# ---------------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cavcool",
        description="Coupled-cavity cooling analysis for a levitated nanosphere",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="path to key=value config")
        sp.add_argument("--out", required=True, help="output CSV path")
        sp.add_argument(
            "--single-cavity",
            action="store_true",
            help="force J = 0 with delta2p = -kappa/2 (single-cavity optimum)",
        )

    sp = sub.add_parser("spectrum", help="force noise spectrum on a frequency grid")
    add_common(sp)
    sp.add_argument(
        "--axis1",
        default="omega:-3:3:4001:lin",
        help="omega grid as omega:lo:hi:count:lin|log",
    )

    for name, text in (
        ("rates", "cooling and heating rates at one parameter point"),
        ("limit", "steady-state phonon limit at one parameter point"),
        ("stability", "closed-form stability verdict"),
        ("effective", "effective two-mode parameters"),
        ("oracle", "perturbative formula vs Lyapunov covariance solve"),
    ):
        sp = sub.add_parser(name, help=text)
        add_common(sp)

    sp = sub.add_parser("sweep", help="parameter sweep over one or two axes")
    add_common(sp)
    sp.add_argument("--axis1", required=True, help="axis as name:lo:hi:count:lin|log")
    sp.add_argument("--axis2", default=None, help="optional second axis")
    sp.add_argument("--quantity", required=True, help="comma-separated quantity names")
    sp.add_argument(
        "--dual",
        action="store_true",
        help="emit coupled and single-cavity (J=0, delta2p=-kappa/2) series",
    )
    sp.add_argument(
        "--preset-coupling",
        action="store_true",
        help="per point, set J = sqrt(kappa) and delta2p = J^2/(delta3+1)",
    )

    sp = sub.add_parser("figure", help="figure-preset data set plus gnuplot sidecar")
    sp.add_argument("--id", required=True, help=f"one of {', '.join(sorted(FIGURE_PRESETS))}")
    sp.add_argument("--out", required=True, help="output CSV path")

    sub.add_parser("selftest", help="run the built-in invariant suite")

    return parser


def _load_base(args):
    base = params.load_config(args.config)
    if getattr(args, "single_cavity", False):
        base = _single_cavity(base)
    return base


def _dispatch(args):
    if args.subcommand == "selftest":
        return EXIT_NUMERIC if run_selftest() else EXIT_OK

    if args.subcommand == "figure":
        run_figure(args.id, args.out)
        return EXIT_OK

    base = _load_base(args)

    if args.subcommand == "spectrum":
        axis = parse_axis(args.axis1)
        if axis.name != "omega":
            raise ValidationError("spectrum axis must be `omega`")
        grid = axis.grid()
        values = response.s_ff(grid, base)
        emit_csv([[w, s] for w, s in zip(grid, values)], ["omega", "S"], args.out)
        return EXIT_OK

    if args.subcommand == "rates":
        a_minus, a_plus = cooling.rates(base)
        gamma_opt = a_minus - a_plus
        flag = "ok" if gamma_opt > 0 else "not_cooling"
        emit_csv(
            [[base.kappa, base.delta2p, a_minus, a_plus, gamma_opt, flag]],
            ["kappa", "delta2p", "A_minus", "A_plus", "Gamma_opt", "flag"],
            args.out,
        )
        return EXIT_OK

    if args.subcommand == "limit":
        report, flag = _limit_row(base)
        emit_csv(
            [
                [
                    base.kappa,
                    base.delta2p,
                    report.A_minus,
                    report.A_plus,
                    report.Gamma_opt,
                    report.n_q,
                    report.n_c,
                    report.n_f,
                    flag,
                ]
            ],
            ["kappa", "delta2p", "A_minus", "A_plus", "Gamma_opt", "n_q", "n_c", "n_f", "flag"],
            args.out,
        )
        return EXIT_OK

    if args.subcommand == "stability":
        eff = reduction.effective_params(base)
        if getattr(args, "single_cavity", False) or base.J == 0.0:
            verdict = reduction.stability_single(base)
        else:
            verdict = reduction.stability_coupled(base)
        emit_csv(
            [
                [
                    base.kappa,
                    base.kappa3,
                    base.J,
                    base.delta2p,
                    eff.eta,
                    eff.Omega_eff,
                    eff.kappa_eff,
                    eff.Delta_eff,
                    verdict.stable,
                    verdict.margin,
                ]
            ],
            [
                "kappa",
                "kappa3",
                "J",
                "delta2p",
                "eta",
                "Omega_eff",
                "kappa_eff",
                "Delta_eff",
                "stable",
                "margin",
            ],
            args.out,
        )
        return EXIT_OK

    if args.subcommand == "effective":
        eff = reduction.effective_params(base)
        emit_csv(
            [
                [
                    base.kappa,
                    base.kappa3,
                    base.J,
                    base.delta2p,
                    eff.eta,
                    eff.Omega_eff,
                    eff.kappa_eff,
                    eff.Delta_eff,
                    eff.regime_ok,
                ]
            ],
            [
                "kappa",
                "kappa3",
                "J",
                "delta2p",
                "eta",
                "Omega_eff",
                "kappa_eff",
                "Delta_eff",
                "regime_ok",
            ],
            args.out,
        )
        return EXIT_OK

    if args.subcommand == "oracle":
        nan = float("nan")
        stable, _ = lyapunov.eigen_stable(lyapunov.build_model(base))
        try:
            report = lyapunov.oracle_compare(base)
            row = [
                base.kappa,
                base.Omega_m,
                report.n_formula,
                report.n_lyapunov,
                report.rel_dev,
                report.stable,
            ]
        except (NotCooling, Unstable):
            row = [base.kappa, base.Omega_m, nan, nan, nan, stable]
        emit_csv(
            [row],
            ["kappa", "Omega_m", "n_f_formula", "n_lyapunov", "rel_dev", "stable"],
            args.out,
        )
        return EXIT_OK

    if args.subcommand == "sweep":
        axis1 = parse_axis(args.axis1)
        axis2 = parse_axis(args.axis2) if args.axis2 else None
        quantities = tuple(q.strip() for q in args.quantity.split(",") if q.strip())
        if not quantities:
            raise ValidationError("--quantity must name at least one quantity")
        for q in quantities:
            if q not in QUANTITIES:
                raise ValidationError(
                    f"unknown quantity {q!r}; choose from {', '.join(QUANTITIES)}"
                )
        if args.preset_coupling:
            for axis in (axis1, axis2):
                if axis and axis.name in ("J", "delta2p"):
                    raise ValidationError(
                        f"--preset-coupling would override the swept axis {axis.name!r}"
                    )
        spec = SweepSpec(
            axis1=axis1,
            axis2=axis2,
            quantities=quantities,
            dual=args.dual,
            preset_coupling=args.preset_coupling,
        )
        rows, schema = run_sweep(base, spec)
        emit_csv(rows, schema, args.out)
        return EXIT_OK

    raise ValidationError(f"unknown subcommand {args.subcommand!r}")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NonConvergence, IllConditioned, GridTooCoarse, NoCoolingWindow) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
