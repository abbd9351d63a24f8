"""Command-line interface.

Subcommands: solve, sweep, evolve, optimize, report, run, dump-modulation.
All read a scenario JSON via --config and write structured outputs under
--out.  Exit codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .errors import NumericalError, ValidationError
from .floquet import IncidentWave, solve_slab
from .io import write_csv, write_json
from .modulation import fourier_coefficients
from .optimize import SearchConfig, search, verify_selectivity
from .pipeline import (
    emit_graph,
    emit_spectrum,
    emit_trajectory,
    evolve_from_scenario,
    graph_from_scenario,
    metrics_report,
    run_scenario,
)
from .scenario import ScenarioFile, load_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

SWEEPABLE = {"phi_dc", "phi_rf", "f_s_hz", "gamma_v", "thickness_lam0", "phase_rad"}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="spacetime-coupler",
        description="Space-time modulated reflector and qubit-coupling simulator",
    )
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=0, help="RNG seed for stochastic stages")
    p.add_argument(
        "--format", choices=("json", "csv", "both"), default="both", dest="formats"
    )
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", help="harmonic reflection/transmission spectrum")

    sweep = sub.add_parser("sweep", help="spectrum sweep over one modulation parameter")
    sweep.add_argument(
        "--vary",
        required=True,
        help="parameter=start:stop:count, e.g. phi_rf=0.05:0.4:8",
    )
    sweep.add_argument("--jobs", type=int, default=1, help="concurrent solver runs")

    sub.add_parser("evolve", help="propagate the qubit array state")
    sub.add_parser("optimize", help="search modulation parameters for the target set")
    sub.add_parser("report", help="coupling graph, metrics and figures")
    run = sub.add_parser("run", help="full pipeline")
    run.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    sub.add_parser("dump-modulation", help="waveform samples and Fourier coefficients")
    return p


def _cmd_solve(scenario: ScenarioFile, out: Path, args) -> int:
    spectrum = solve_slab(scenario.modulation, scenario.incident, scenario.solver)
    for p in emit_spectrum(spectrum, out, "spectrum", args.formats):
        print(p)
    return EXIT_OK


def _parse_vary(text: str):
    try:
        name, rng = text.split("=")
        start, stop, count = rng.split(":")
        return name, float(start), float(stop), int(count)
    except ValueError as exc:
        raise ValidationError(
            f"--vary expects parameter=start:stop:count, got {text!r}"
        ) from exc


def _sweep_point(payload):
    from .scenario import parse_scenario

    raw, name, value = payload
    raw = dict(raw)
    raw["modulation"] = {**raw["modulation"], name: value}
    sc = parse_scenario(raw)
    spectrum = solve_slab(sc.modulation, sc.incident, sc.solver)
    return value, spectrum.as_records()


def _cmd_sweep(scenario: ScenarioFile, out: Path, args) -> int:
    name, start, stop, count = _parse_vary(args.vary)
    if name not in SWEEPABLE:
        raise ValidationError(f"cannot sweep {name!r}; choose from {sorted(SWEEPABLE)}")
    if count < 1:
        raise ValidationError("sweep count must be >= 1")
    values = np.linspace(start, stop, count)
    payloads = [(scenario.raw, name, float(v)) for v in values]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]

    header = [name] + [f"power_r_n{r['n']}" for r in results[0][1]]
    rows = [[v] + [r["power_r"] for r in recs] for v, recs in results]
    if args.formats in ("csv", "both"):
        print(write_csv(out / "sweep.csv", header, rows))
    if args.formats in ("json", "both"):
        print(
            write_json(
                out / "sweep.json",
                [{"value": v, "spectrum": recs} for v, recs in results],
            )
        )
    return EXIT_OK


def _cmd_evolve(scenario: ScenarioFile, out: Path, args) -> int:
    spectrum = solve_slab(scenario.modulation, scenario.incident, scenario.solver)
    graph = graph_from_scenario(scenario, spectrum)
    trajectory = evolve_from_scenario(scenario, graph)
    for p in emit_trajectory(trajectory, scenario.qubits, out, "trajectory"):
        print(p)
    return EXIT_OK


def _cmd_optimize(scenario: ScenarioFile, out: Path, args) -> int:
    scenario.require("optimize")
    cfg = dataclasses.replace(scenario.search, seed=args.seed)
    result = search(scenario.optimize_scenario, cfg)
    sel = verify_selectivity(result.spectrum, scenario.optimize_scenario)
    prof = result.best_profile
    payload = {
        "best_score": result.best_score,
        "best_params": {
            "phi_dc": prof.phi_dc,
            "phi_rf": prof.phi_rf,
            "f_s_hz": prof.f_s,
            "gamma_v": prof.gamma_v,
            "thickness_lam0": prof.thickness,
            "eps_background": prof.eps_background,
        },
        "restarts_used": result.restarts_used,
        "selectivity_passed": sel.passed,
        "worst_margin_db": sel.worst_margin_db,
        "seed": args.seed,
    }
    print(write_json(out / "optimum.json", payload))
    for p in emit_spectrum(result.spectrum, out, "optimum_spectrum", args.formats):
        print(p)
    print(
        write_csv(
            out / "optimum_trace.csv",
            ["restart", "score"],
            [[i, s] for i, s in enumerate(result.trace)],
        )
    )
    return EXIT_OK


def _cmd_report(scenario: ScenarioFile, out: Path, args) -> int:
    spectrum = solve_slab(scenario.modulation, scenario.incident, scenario.solver)
    graph = graph_from_scenario(scenario, spectrum)
    report = metrics_report(scenario, graph)
    print(write_json(out / "metrics.json", report))
    keys = sorted(report)
    print(write_csv(out / "metrics.csv", keys, [[report[k] for k in keys]]))
    for p in emit_graph(graph, out, "graph", args.formats):
        print(p)
    from . import plotting

    print(plotting.plot_spectrum(spectrum, out / "spectrum.png", scenario.name))
    print(plotting.plot_waveform(scenario.modulation, out / "waveform.png", scenario.name))
    return EXIT_OK


def _cmd_run(scenario: ScenarioFile, out: Path, args) -> int:
    manifest = run_scenario(
        scenario, out, formats=args.formats, plot=not args.no_plot
    )
    for p in manifest.outputs:
        print(p)
    return EXIT_OK


def _cmd_dump_modulation(scenario: ScenarioFile, out: Path, args) -> int:
    profile = scenario.modulation
    xi = np.linspace(0.0, 2.0 * np.pi, 257)
    m = profile.waveform(xi)
    if args.formats in ("csv", "both"):
        print(
            write_csv(
                out / "waveform.csv",
                ["xi_rad", "m"],
                [[float(x), float(v)] for x, v in zip(xi, m)],
            )
        )
    order = 16
    coeffs = fourier_coefficients(profile, order)
    recs = [
        {"k": int(k), "re": float(c.real), "im": float(c.imag), "abs": float(abs(c))}
        for k, c in zip(range(-order, order + 1), coeffs)
    ]
    if args.formats in ("json", "both"):
        print(write_json(out / "fourier.json", recs))
    if args.formats in ("csv", "both"):
        print(
            write_csv(
                out / "fourier.csv",
                ["k", "re", "im", "abs"],
                [[r["k"], r["re"], r["im"], r["abs"]] for r in recs],
            )
        )
    return EXIT_OK


COMMANDS = {
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "evolve": _cmd_evolve,
    "optimize": _cmd_optimize,
    "report": _cmd_report,
    "run": _cmd_run,
    "dump-modulation": _cmd_dump_modulation,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](scenario, out, args)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
