"""End-to-end scenario pipeline: spectrum, coupling graph, dynamics, metrics.

A run executes solve -> polychromatic_graph -> evolve -> metrics in order,
writing each stage's outputs as it completes, so a failure further down the
pipeline preserves everything already produced.  Every file written is
recorded in a manifest together with a canonical hash of the configuration.
"""

from __future__ import annotations

import datetime
import importlib.metadata
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .floquet import HarmonicSpectrum, solve_slab
from .io import write_csv, write_json
from .metrics import (
    coherence_improvement,
    connectivity_ratio,
    effective_noise,
    entangled_fidelity,
    fidelity_decay,
)
from .qubits import (
    CouplingGraph,
    PureState,
    Trajectory,
    evolve,
    monochromatic_graph,
    polychromatic_graph,
    total_excitation,
)
from .scenario import ScenarioFile

SPECTRUM_FIELDS = [
    "n",
    "f_hz",
    "re_r",
    "im_r",
    "re_t",
    "im_t",
    "theta_r_rad",
    "power_r",
    "power_t",
    "evanescent",
]

EDGE_FIELDS = ["a", "b", "harmonic", "g_hz", "delta_omega_rad_s"]


def _version() -> str:
    try:
        return importlib.metadata.version("spacetime-coupler")
    except importlib.metadata.PackageNotFoundError:
        return "unversioned"


@dataclass
class RunManifest:
    config_hash: str
    version: str
    started_utc: str
    finished_utc: str | None = None
    outputs: list[str] = field(default_factory=list)
    stages_completed: list[str] = field(default_factory=list)

    def record(self, path: Path) -> Path:
        self.outputs.append(str(path))
        return path

    def as_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "version": self.version,
            "started_utc": self.started_utc,
            "finished_utc": self.finished_utc,
            "outputs": sorted(self.outputs),
            "stages_completed": self.stages_completed,
        }


def emit_spectrum(spectrum: HarmonicSpectrum, out: Path, stem: str, formats: str):
    written = []
    recs = spectrum.as_records()
    if formats in ("json", "both"):
        written.append(write_json(out / f"{stem}.json", recs))
    if formats in ("csv", "both"):
        rows = [[r[k] for k in SPECTRUM_FIELDS] for r in recs]
        written.append(write_csv(out / f"{stem}.csv", SPECTRUM_FIELDS, rows))
    return written


def emit_graph(graph: CouplingGraph, out: Path, stem: str, formats: str):
    written = []
    recs = [
        {
            "a": e.a,
            "b": e.b,
            "harmonic": e.harmonic,
            "g_hz": e.g_hz,
            "delta_omega_rad_s": e.delta_omega,
        }
        for e in graph.edges
    ]
    if formats in ("json", "both"):
        written.append(write_json(out / f"{stem}.json", recs))
    if formats in ("csv", "both"):
        rows = [[r[k] for k in EDGE_FIELDS] for r in recs]
        written.append(write_csv(out / f"{stem}.csv", EDGE_FIELDS, rows))
    return written


def emit_trajectory(trajectory: Trajectory, array, out: Path, stem: str):
    pops = trajectory.populations(array)
    header = ["t_s"] + [f"p_q{q + 1}" for q in range(array.count)]
    rows = [
        [trajectory.times[i]] + [float(p) for p in pops[i]]
        for i in range(len(trajectory.times))
    ]
    csv_path = write_csv(out / f"{stem}.csv", header, rows)
    final = trajectory.final_state()
    state_path = write_json(
        out / f"{stem}_final_state.json",
        {
            "basis": final.basis,
            "re": [float(a.real) for a in final.amplitudes],
            "im": [float(a.imag) for a in final.amplitudes],
            "total_excitation": total_excitation(final),
        },
    )
    return [csv_path, state_path]


def graph_from_scenario(
    scenario: ScenarioFile, spectrum: HarmonicSpectrum
) -> CouplingGraph:
    scenario.require("qubits", "mapping")
    return polychromatic_graph(
        scenario.qubits, spectrum, scenario.mapping, scenario.modulation.omega_s
    )


def evolve_from_scenario(scenario: ScenarioFile, graph: CouplingGraph) -> Trajectory:
    scenario.require("qubits", "evolution")
    ev = scenario.evolution
    if ev.initial_excitation >= scenario.qubits.count:
        raise ValidationError(
            f"initial_excitation {ev.initial_excitation} out of range for "
            f"{scenario.qubits.count} qubits"
        )
    state = PureState.excitation(scenario.qubits.count, ev.initial_excitation, ev.basis)
    return evolve(
        state,
        graph,
        scenario.qubits,
        t_final=ev.t_final,
        dt=ev.dt,
        sample_every=ev.sample_every,
        frame=ev.frame,
    )


def metrics_report(
    scenario: ScenarioFile, graph_poly: CouplingGraph
) -> dict:
    scenario.require("qubits", "metrics")
    ms = scenario.metrics
    graph_mono = monochromatic_graph(scenario.qubits)
    conn = connectivity_ratio(graph_mono, graph_poly, ms.d_mono)
    t2p = coherence_improvement(ms.coherence)
    t2 = ms.coherence.t2
    omega_probe = 2.0 * np.pi * scenario.qubits.f_q[0]
    delta = 2.0 * np.pi * ms.coherence.delta_f
    report = {
        "pairs_mono": conn.pairs_mono,
        "pairs_poly": conn.pairs_poly,
        "c_ratio": conn.c_ratio,
        "d_mono": conn.d_mono,
        "d_poly": conn.d_poly,
        "multiplicity_poly": conn.multiplicity_poly,
        "t2_s": t2,
        "t2_prime_s": t2p,
        "noise_suppression": effective_noise(ms.noise, omega_probe, delta)
        / max(ms.s0_level, 1e-300),
        "fidelity_decay_at_t2": fidelity_decay(t2, t2),
        "entangled_fidelity_at_t2": entangled_fidelity(1.0, t2, t2p),
    }
    return report


def run_scenario(
    scenario: ScenarioFile,
    out_dir: str | Path,
    formats: str = "both",
    plot: bool = True,
) -> RunManifest:
    """Full pipeline run; returns the manifest after writing it to disk."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        config_hash=scenario.config_hash(),
        version=_version(),
        started_utc=datetime.datetime.now(datetime.timezone.utc).isoformat(),
    )

    def finish():
        manifest.finished_utc = datetime.datetime.now(
            datetime.timezone.utc
        ).isoformat()
        path = out / "manifest.json"
        manifest.outputs.append(str(path))
        write_json(path, manifest.as_dict())
        return manifest

    stage = "solve"
    try:
        spectrum = solve_slab(scenario.modulation, scenario.incident, scenario.solver)
        for p in emit_spectrum(spectrum, out, "spectrum", formats):
            manifest.record(p)
        manifest.stages_completed.append(stage)

        if scenario.qubits is not None and scenario.mapping is not None:
            stage = "graph"
            graph = graph_from_scenario(scenario, spectrum)
            for p in emit_graph(graph, out, "graph", formats):
                manifest.record(p)
            manifest.stages_completed.append(stage)

            trajectory = None
            if scenario.evolution is not None:
                stage = "evolve"
                trajectory = evolve_from_scenario(scenario, graph)
                for p in emit_trajectory(trajectory, scenario.qubits, out, "trajectory"):
                    manifest.record(p)
                manifest.stages_completed.append(stage)

            if scenario.metrics is not None:
                stage = "metrics"
                report = metrics_report(scenario, graph)
                manifest.record(write_json(out / "metrics.json", report))
                keys = sorted(report)
                manifest.record(
                    write_csv(out / "metrics.csv", keys, [[report[k] for k in keys]])
                )
                manifest.stages_completed.append(stage)

            if plot:
                stage = "plots"
                from . import plotting

                manifest.record(
                    plotting.plot_spectrum(
                        spectrum, out / "spectrum.png", scenario.name
                    )
                )
                manifest.record(
                    plotting.plot_waveform(
                        scenario.modulation, out / "waveform.png", scenario.name
                    )
                )
                if trajectory is not None:
                    manifest.record(
                        plotting.plot_trajectory(
                            trajectory,
                            scenario.qubits,
                            out / "trajectory.png",
                            scenario.name,
                        )
                    )
                manifest.stages_completed.append(stage)
        elif plot:
            from . import plotting

            manifest.record(
                plotting.plot_spectrum(spectrum, out / "spectrum.png", scenario.name)
            )
            manifest.record(
                plotting.plot_waveform(
                    scenario.modulation, out / "waveform.png", scenario.name
                )
            )
            manifest.stages_completed.append("plots")
    except Exception as exc:
        finish()
        raise type(exc)(f"stage {stage!r} failed: {exc}") from exc
    return finish()
