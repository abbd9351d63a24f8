"""Scenario files: validated JSON configuration for runs and pipelines.

A scenario file is a JSON object with one section per pipeline stage.
Unknown keys are rejected everywhere; all frequencies are plain hertz with
a _hz suffix, times carry _s, angles _rad, and the slab thickness is in
multiples of the incident free-space wavelength (suffix _lam0).  Each
section is converted into the owning module's domain object up front, so a
run can only start from a fully validated configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .floquet import IncidentWave, SolverConfig
from .metrics import CoherenceModel, NoiseModel
from .modulation import ModulationProfile
from .optimize import Scenario, SearchConfig
from .qubits import CouplingMapConfig, QubitArray

SECTION_KEYS = {
    "modulation": {
        "phi_dc",
        "phi_rf",
        "f_s_hz",
        "gamma_v",
        "thickness_lam0",
        "phase_rad",
        "eps_background",
    },
    "incident": {"f_0_hz", "theta_i_rad", "amplitude"},
    "solver": {"truncation", "quadrature_samples", "convergence_tol", "method"},
    "qubits": {"rows", "cols", "f_q_hz", "spacing", "g0_hz", "decay_exponent"},
    "mapping": {"g_ms_hz", "w_rwa_rad_s"},
    "evolution": {
        "t_final_s",
        "dt_s",
        "initial_excitation",
        "basis",
        "frame",
        "sample_every",
    },
    "metrics": {
        "d_mono",
        "t2_s",
        "delta_f_hz",
        "gamma_dec_rad_s",
        "sigma_bw_rad_s",
        "s0",
    },
    "optimize": {
        "targets",
        "suppressed",
        "n_max",
        "penalty",
        "selectivity_margin_db",
        "bounds",
        "fixed",
        "restarts",
        "max_evals",
        "simplex_tol",
    },
    "fdtd": {
        "points_per_wavelength",
        "measure_periods",
        "ramp_periods",
        "courant",
        "max_harmonic",
    },
}

TOP_LEVEL_KEYS = {"name"} | set(SECTION_KEYS)


def _check_keys(section: str, data: dict) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"section {section!r} must be an object")
    unknown = set(data) - SECTION_KEYS[section]
    if unknown:
        raise ValidationError(f"unknown keys in {section!r}: {sorted(unknown)}")


@dataclass(frozen=True)
class EvolutionSettings:
    t_final: float
    dt: float | None
    initial_excitation: int
    basis: str
    frame: str
    sample_every: int

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValidationError("t_final_s must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValidationError("dt_s must be positive")
        if self.initial_excitation < 0:
            raise ValidationError("initial_excitation must be non-negative")
        if self.sample_every < 1:
            raise ValidationError("sample_every must be >= 1")


@dataclass(frozen=True)
class MetricsSettings:
    d_mono: float
    coherence: CoherenceModel
    noise: NoiseModel
    s0_level: float


@dataclass(frozen=True)
class ScenarioFile:
    """Fully validated scenario; optional sections are None when absent."""

    name: str
    raw: dict
    modulation: ModulationProfile
    incident: IncidentWave
    solver: SolverConfig
    qubits: QubitArray | None = None
    mapping: CouplingMapConfig | None = None
    evolution: EvolutionSettings | None = None
    metrics: MetricsSettings | None = None
    optimize_scenario: Scenario | None = None
    search: SearchConfig | None = None

    def config_hash(self) -> str:
        """Hash of the canonicalized config, stable under key reordering."""
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def require(self, *sections: str):
        for s in sections:
            if getattr(self, "optimize_scenario" if s == "optimize" else s) is None:
                raise ValidationError(f"scenario {self.name!r} lacks section {s!r}")


def _modulation_from(data: dict) -> ModulationProfile:
    _check_keys("modulation", data)
    try:
        return ModulationProfile(
            phi_dc=float(data["phi_dc"]),
            phi_rf=float(data["phi_rf"]),
            f_s=float(data["f_s_hz"]),
            gamma_v=float(data["gamma_v"]),
            thickness=float(data["thickness_lam0"]),
            phase=float(data.get("phase_rad", 0.0)),
            eps_background=float(data.get("eps_background", 1.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"modulation section missing key {exc}") from exc


def _incident_from(data: dict) -> IncidentWave:
    _check_keys("incident", data)
    try:
        return IncidentWave(
            f_0=float(data["f_0_hz"]),
            theta_i=float(data.get("theta_i_rad", 0.0)),
            amplitude=float(data.get("amplitude", 1.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"incident section missing key {exc}") from exc


def _solver_from(data: dict) -> SolverConfig:
    _check_keys("solver", data)
    qs = data.get("quadrature_samples")
    return SolverConfig(
        truncation=int(data.get("truncation", 12)),
        quadrature_samples=None if qs is None else int(qs),
        convergence_tol=float(data.get("convergence_tol", 1e-6)),
        method=str(data.get("method", "auto")),
    )


def _qubits_from(data: dict) -> QubitArray:
    _check_keys("qubits", data)
    try:
        return QubitArray(
            rows=int(data["rows"]),
            cols=int(data["cols"]),
            f_q=tuple(float(f) for f in data["f_q_hz"]),
            spacing=float(data.get("spacing", 1.0)),
            g0=float(data.get("g0_hz", 0.0)),
            decay_exponent=float(data.get("decay_exponent", 3.0)),
        )
    except KeyError as exc:
        raise ValidationError(f"qubits section missing key {exc}") from exc


def _mapping_from(data: dict) -> CouplingMapConfig:
    _check_keys("mapping", data)
    try:
        w = data.get("w_rwa_rad_s")
        return CouplingMapConfig(
            g_ms=float(data["g_ms_hz"]), w_rwa=None if w is None else float(w)
        )
    except KeyError as exc:
        raise ValidationError(f"mapping section missing key {exc}") from exc


def _evolution_from(data: dict) -> EvolutionSettings:
    _check_keys("evolution", data)
    try:
        dt = data.get("dt_s")
        return EvolutionSettings(
            t_final=float(data["t_final_s"]),
            dt=None if dt is None else float(dt),
            initial_excitation=int(data.get("initial_excitation", 0)),
            basis=str(data.get("basis", "single_excitation")),
            frame=str(data.get("frame", "rotating")),
            sample_every=int(data.get("sample_every", 1)),
        )
    except KeyError as exc:
        raise ValidationError(f"evolution section missing key {exc}") from exc


def _metrics_from(data: dict) -> MetricsSettings:
    _check_keys("metrics", data)
    try:
        s0_level = float(data.get("s0", 1.0))
        coherence = CoherenceModel(
            t2=float(data["t2_s"]),
            delta_f=float(data["delta_f_hz"]),
            gamma_dec=float(data["gamma_dec_rad_s"]),
        )
        noise = NoiseModel(
            s0=lambda omega: s0_level, sigma_bw=float(data["sigma_bw_rad_s"])
        )
    except KeyError as exc:
        raise ValidationError(f"metrics section missing key {exc}") from exc
    return MetricsSettings(
        d_mono=float(data.get("d_mono", 1.0)),
        coherence=coherence,
        noise=noise,
        s0_level=s0_level,
    )


def _optimize_from(data: dict, incident: IncidentWave, modulation, solver):
    _check_keys("optimize", data)
    try:
        targets = frozenset(int(n) for n in data["targets"])
    except KeyError as exc:
        raise ValidationError(f"optimize section missing key {exc}") from exc
    supp = data.get("suppressed")
    bounds = {k: (float(v[0]), float(v[1])) for k, v in data.get("bounds", {}).items()}
    fixed = {k: float(v) for k, v in data.get("fixed", {}).items()}
    scenario = Scenario(
        targets=targets,
        f_0=incident.f_0,
        n_max=int(data.get("n_max", 7)),
        suppressed=None if supp is None else frozenset(int(n) for n in supp),
        bounds=bounds,
        fixed=fixed,
        penalty=float(data.get("penalty", 1.0)),
        selectivity_margin_db=float(data.get("selectivity_margin_db", 3.0)),
        eps_background=modulation.eps_background,
        theta_i=incident.theta_i,
        solver=solver,
    )
    search = SearchConfig(
        restarts=int(data.get("restarts", 4)),
        max_evals=int(data.get("max_evals", 120)),
        seed=0,
        simplex_tol=float(data.get("simplex_tol", 1e-6)),
    )
    return scenario, search


def parse_scenario(data: dict, name: str | None = None) -> ScenarioFile:
    if not isinstance(data, dict):
        raise ValidationError("scenario file must hold a JSON object")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ValidationError(f"unknown top-level keys: {sorted(unknown)}")
    for required in ("modulation", "incident"):
        if required not in data:
            raise ValidationError(f"scenario lacks required section {required!r}")
    modulation = _modulation_from(data["modulation"])
    incident = _incident_from(data["incident"])
    solver = _solver_from(data.get("solver", {}))
    opt = None
    search = None
    if "optimize" in data:
        opt, search = _optimize_from(data["optimize"], incident, modulation, solver)
    return ScenarioFile(
        name=str(data.get("name", name or "scenario")),
        raw=data,
        modulation=modulation,
        incident=incident,
        solver=solver,
        qubits=_qubits_from(data["qubits"]) if "qubits" in data else None,
        mapping=_mapping_from(data["mapping"]) if "mapping" in data else None,
        evolution=_evolution_from(data["evolution"]) if "evolution" in data else None,
        metrics=_metrics_from(data["metrics"]) if "metrics" in data else None,
        optimize_scenario=opt,
        search=search,
    )


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"scenario file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON in {path}: {exc}") from exc
    return parse_scenario(data, name=path.stem)


def bundled_scenario_dir() -> Path:
    return Path(__file__).parent / "data" / "scenarios"


def bundled_scenario(name: str) -> ScenarioFile:
    """Load one of the packaged reference scenarios by name."""
    path = bundled_scenario_dir() / f"{name}.json"
    if not path.exists():
        available = sorted(p.stem for p in bundled_scenario_dir().glob("*.json"))
        raise ValidationError(f"no bundled scenario {name!r}; available: {available}")
    return load_scenario(path)
