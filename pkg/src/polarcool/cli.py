"""Command line front end.

Subcommands: simulate (one working point, full report), rates (analytic
scattering-rate table), sweep (grid -> CSV, optional plot-data file), tune
(working-point inversion, two-mode or N-mode), optimize (best mixing angle).

Exit codes: 0 success, 1 validation error, 2 solver/convergence error,
3 instability under --require-stable.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings

from .analytics import effective_cooling, network_cooling, quantum_backaction_limit
from .config import RunConfig, load_config
from .dynamics import build_linear_model
from .errors import ConvergenceError, SolverError, UnstableSystemError, ValidationError
from .model import diagonalize_polaritons, thermal_occupation
from .steadystate import steady_state
from .tuning import optimize_theta, polariton_network, sweep, tune_n_mode, tune_two_mode

TWO_PI = 2.0 * math.pi

CSV_COLUMNS = (
    "variable", "theta", "g_hz", "omega_m_hz", "omega_0_hz",
    "kappa1_eff_hz", "kappa2_eff_hz",
    "n1_analytic", "n1_numeric", "n2_analytic", "n2_numeric",
    "stable", "flags",
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_UNSTABLE = 3


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _row_fields(row) -> list[str]:
    return [
        _fmt(row.variable),
        _fmt(row.theta),
        _fmt(row.coupling / TWO_PI),
        _fmt(row.magnon_freq / TWO_PI),
        _fmt(row.drive_freq / TWO_PI),
        _fmt(row.kappa_eff[0] / TWO_PI),
        _fmt(row.kappa_eff[1] / TWO_PI),
        _fmt(row.n_analytic[0]),
        _fmt(row.n_numeric[0]),
        _fmt(row.n_analytic[1]),
        _fmt(row.n_numeric[1]),
        "true" if row.stable else "false",
        ";".join(row.flags),
    ]


def write_csv(rows, path: str) -> None:
    """Sweep rows to an RFC-4180-style CSV (header row, LF line endings).

    All values are plain %.12g numbers or bare lowercase words, so no field
    ever needs quoting and identical inputs give bit-identical files.
    """
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(_row_fields(row)) for row in rows)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_plot_data(rows, path: str, variable: str) -> None:
    """Gnuplot-friendly whitespace table; units spelled out in the # header."""
    unit = {"theta": "rad", "temperature": "K", "rabi": "rad/s"}[variable]
    header = [
        "# steady-state cooling sweep",
        f"# swept variable: {variable} [{unit}]",
        "# columns: variable theta g_hz omega_m_hz omega_0_hz kappa1_eff_hz"
        " kappa2_eff_hz n1_analytic n1_numeric n2_analytic n2_numeric stable flags",
        "# units: theta [rad], *_hz [Hz], n_* [quanta], stable in {0,1}, flags '-' if none",
    ]
    lines = list(header)
    for row in rows:
        fields = _row_fields(row)
        fields[-2] = "1" if row.stable else "0"
        fields[-1] = ";".join(row.flags) if row.flags else "-"
        lines.append(" ".join(fields))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _require_setup(cfg: RunConfig):
    if cfg.setup is None:
        raise ValidationError("config.system: required for this command")
    return cfg.setup


def _emit(text: str, out_path: str | None) -> None:
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _simulate_report(cfg: RunConfig, averages_mode: str) -> tuple[str, bool]:
    setup = _require_setup(cfg)
    params = setup.params_at(cfg.theta)
    basis = diagonalize_polaritons(params)
    model = build_linear_model(params, basis, mode=averages_mode)
    rates = effective_cooling(params, basis, model.averages.effective_couplings)
    state = steady_state(model, require_stable=False)

    lines = ["working point:"]
    lines.append(f"  theta = {_fmt(cfg.theta)} rad")
    lines.append(f"  g = {_fmt(params.photon_matter_coupling / TWO_PI)} Hz")
    lines.append(f"  omega_m = {_fmt(params.magnon_freq / TWO_PI)} Hz")
    lines.append(f"  omega_0 = {_fmt(params.drive_freq / TWO_PI)} Hz")
    lines.append(f"  detunings = ({_fmt(basis.detuning_upper / TWO_PI)},"
                 f" {_fmt(basis.detuning_lower / TWO_PI)}) Hz")
    lines.append(f"  averages mode = {model.averages.mode}")
    avg = model.averages
    lines.append("steady-state averages:")
    lines.append(f"  |<U>| = {_fmt(abs(avg.avg_upper))}")
    lines.append(f"  |<L>| = {_fmt(abs(avg.avg_lower))}")
    lines.append(f"  |<M>| = {_fmt(abs(avg.avg_matter))}")
    for j, g_eff in enumerate(avg.effective_couplings):
        lines.append(f"  G_{j + 1} = {_fmt(g_eff / TWO_PI)} Hz")
    verdict = "stable" if state.stable else "UNSTABLE"
    lines.append(f"stability: {verdict} (spectral abscissa {_fmt(state.spectral_abscissa)} rad/s)")
    if state.stable:
        lines.append(f"lyapunov residual: {state.lyapunov_residual:.3e}")
    lines.append("occupations:")
    for j, (mech, r) in enumerate(zip(params.mechanical_modes, rates)):
        nbar = thermal_occupation(mech.freq, params.bath_temperature)
        numeric = state.occupations[2 + j] if state.stable else math.nan
        lines.append(
            f"  mode {j + 1}: numeric {_fmt(numeric)}  analytic {_fmt(r.n_eff)}"
            f"  thermal {_fmt(nbar)}"
        )
    flags = []
    if any(not r.weak_coupling for r in rates):
        flags.append("weak_coupling_broken")
    if state.condition_flag:
        flags.append("ill_conditioned")
    lines.append(f"flags: {';'.join(flags) if flags else '-'}")

    linewidths = (basis.upper_linewidth, basis.lower_linewidth)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for mech, r in zip(params.mechanical_modes, rates):
            quantum_backaction_limit(linewidths[r.dominant], mech.freq)
        for w in caught:
            lines.append(f"warning: {w.message}")
    return "\n".join(lines) + "\n", state.stable


def _rates_report(cfg: RunConfig, averages_mode: str) -> str:
    setup = _require_setup(cfg)
    params = setup.params_at(cfg.theta)
    basis = diagonalize_polaritons(params)
    model = build_linear_model(params, basis, mode=averages_mode)
    rates = effective_cooling(params, basis, model.averages.effective_couplings)
    lines = [f"scattering rates at theta = {_fmt(cfg.theta)} rad (all rates in Hz):"]
    names = ("upper", "lower")
    for r in rates:
        lines.append(f"mode {r.mode_index + 1}:")
        for k, name in enumerate(names):
            lines.append(
                f"  {name}: stokes {_fmt(r.stokes[k] / TWO_PI)}"
                f"  anti-stokes {_fmt(r.anti_stokes[k] / TWO_PI)}"
                f"  net {_fmt(r.net[k] / TWO_PI)}"
            )
        lines.append(f"  kappa_eff = {_fmt(r.kappa_eff / TWO_PI)} Hz"
                     f"  (dominant: {names[r.dominant]})")
        lines.append(f"  n_eff = {_fmt(r.n_eff)}  n_eff_all = {_fmt(r.n_eff_all)}")
        lines.append(f"  weak coupling valid: {'yes' if r.weak_coupling else 'no'}")
    return "\n".join(lines) + "\n"


def _tune_report(cfg: RunConfig) -> tuple[str, bool]:
    if cfg.nmode is not None:
        nm = cfg.nmode
        tuned = tune_n_mode(
            nm.cavity_freq,
            [m.freq for m in nm.mechanical_modes],
            nm.couplings,
            nm.cavity_linewidth,
            nm.matter_linewidths,
        )
        lines = [f"n-mode tuning ({len(nm.mechanical_modes)} polaritons):"]
        lines.append(f"  converged: {'yes' if tuned.converged else 'no'}")
        lines.append(f"  residual: {tuned.residual / TWO_PI:.6e} Hz")
        lines.append(f"  omega_0 = {_fmt(tuned.drive_freq / TWO_PI)} Hz")
        for i, f in enumerate(tuned.matter_freqs):
            lines.append(f"  matter mode {i + 1}: {_fmt(f / TWO_PI)} Hz")
        model = polariton_network(
            tuned, nm.mechanical_modes, nm.rabi_freq, nm.bath_temperature
        )
        state = steady_state(model, require_stable=False)
        verdict = "stable" if state.stable else "UNSTABLE"
        lines.append(f"  network: {verdict}"
                     f" (spectral abscissa {_fmt(state.spectral_abscissa)} rad/s)")
        if state.stable:
            n_p = len(tuned.polaritons)
            rates = network_cooling(model)
            for j, (mech, r) in enumerate(zip(nm.mechanical_modes, rates)):
                nbar = thermal_occupation(mech.freq, nm.bath_temperature)
                lines.append(
                    f"  mode {j + 1}: numeric {_fmt(state.occupations[n_p + j])}"
                    f"  analytic {_fmt(r.n_eff_all)}  thermal {_fmt(nbar)}"
                )
        return "\n".join(lines) + "\n", state.stable

    setup = _require_setup(cfg)
    tuned = tune_two_mode(
        setup.cavity_freq,
        setup.mechanical_modes[0].freq,
        setup.mechanical_modes[1].freq,
        cfg.theta,
    )
    lines = ["two-mode tuning:"]
    lines.append(f"  theta = {_fmt(tuned.theta)} rad")
    lines.append(f"  g = {_fmt(tuned.photon_matter_coupling / TWO_PI)} Hz")
    lines.append(f"  omega_m = {_fmt(tuned.magnon_freq / TWO_PI)} Hz")
    lines.append(f"  omega_0 = {_fmt(tuned.drive_freq / TWO_PI)} Hz")
    lines.append(f"  detuning upper = {_fmt(tuned.detuning_upper / TWO_PI)} Hz")
    lines.append(f"  detuning lower = {_fmt(tuned.detuning_lower / TWO_PI)} Hz")
    return "\n".join(lines) + "\n", True


def _optimize_report(cfg: RunConfig, averages_mode: str) -> str:
    setup = _require_setup(cfg)
    kwargs = {"averages": averages_mode}
    if cfg.optimize is not None:
        kwargs.update(
            objective=cfg.optimize.objective,
            bounds=(cfg.optimize.lower, cfg.optimize.upper),
            coarse_points=cfg.optimize.coarse_points,
            tol=cfg.optimize.tol,
        )
    result = optimize_theta(setup, **kwargs)
    lines = ["optimization result:"]
    lines.append(f"  objective = {kwargs.get('objective', 'max')}")
    lines.append(f"  theta = {_fmt(result.theta)} rad")
    lines.append(f"  value = {_fmt(result.value)}")
    lines.append(f"  occupations = ({_fmt(result.occupations[0])},"
                 f" {_fmt(result.occupations[1])})")
    lines.append(f"  evaluations = {result.evaluations}")
    lines.append(f"  converged = {'yes' if result.converged else 'no'}")
    return "\n".join(lines) + "\n"


def _run(args) -> int:
    cfg = load_config(args.config)
    averages_mode = args.averages or cfg.averages

    if args.command == "simulate":
        report, stable = _simulate_report(cfg, averages_mode)
        _emit(report, args.out)
        if args.require_stable and not stable:
            return EXIT_UNSTABLE
        return EXIT_OK

    if args.command == "rates":
        _emit(_rates_report(cfg, averages_mode), args.out)
        return EXIT_OK

    if args.command == "sweep":
        setup = _require_setup(cfg)
        if cfg.sweep is None:
            raise ValidationError("config.sweep: required for the sweep command")
        if not args.out:
            raise ValidationError("--out: required for the sweep command")
        grid = [
            cfg.sweep.start + (cfg.sweep.stop - cfg.sweep.start) * i / (cfg.sweep.points - 1)
            for i in range(cfg.sweep.points)
        ]
        rows = sweep(
            setup,
            cfg.sweep.variable,
            grid,
            theta=cfg.theta,
            averages=averages_mode,
            threads=args.threads,
            require_stable=args.require_stable,
        )
        write_csv(rows, args.out)
        if cfg.sweep.plot:
            write_plot_data(rows, cfg.sweep.plot, cfg.sweep.variable)
        sys.stdout.write(f"wrote {len(rows)} rows to {args.out}\n")
        return EXIT_OK

    if args.command == "tune":
        report, stable = _tune_report(cfg)
        _emit(report, args.out)
        if args.require_stable and not stable:
            return EXIT_UNSTABLE
        return EXIT_OK

    if args.command == "optimize":
        _emit(_optimize_report(cfg, averages_mode), args.out)
        return EXIT_OK

    raise ValidationError(f"unknown command {args.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarcool",
        description="Steady-state cooling of mechanical modes through tunable polaritons",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "solve one working point and print a report"),
        ("rates", "print the analytic scattering-rate table"),
        ("sweep", "evaluate a grid and write CSV (and optional plot data)"),
        ("tune", "invert the working-point transform (two-mode or n-mode)"),
        ("optimize", "find the mixing angle minimizing the occupation"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to a .config (YAML) file")
        p.add_argument("--out", default=None, help="output file path")
        p.add_argument("--require-stable", action="store_true",
                       help="exit with status 3 when the working point is unstable")
        p.add_argument("--averages", choices=("approx", "selfconsistent"), default=None,
                       help="override the config's steady-state averages mode")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sweep evaluation")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except UnstableSystemError as exc:
        sys.stderr.write(f"unstable: {exc}\n")
        return EXIT_UNSTABLE
    except (SolverError, ConvergenceError) as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
