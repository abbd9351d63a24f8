"""Parameter search for selective harmonic conversion.

Finds modulation settings (flux biases, slab thickness, modulation
frequency, velocity ratio) that pour reflected power into a chosen set of
harmonics while starving the rest.  The objective is a black-box evaluation
of the slab solver, so the search is derivative-free: seeded Sobol starts
feeding bounded Nelder-Mead restarts, merged deterministically.

The two flux biases live on the triangular domain phi_dc + phi_rf < pi/2
(secant pole).  Internally phi_rf is parameterized as a fraction of the
margin left by phi_dc so every box-bounded search point is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import NumericalError, ValidationError
from .floquet import HarmonicSpectrum, IncidentWave, SolverConfig, solve_slab
from .modulation import ModulationProfile

#: score assigned to evaluations where the solver fails
WORST_SCORE = 1e6

#: margin kept between the flux-bias sum and the secant pole
POLE_GUARD = 0.05

DEFAULT_BOUNDS: dict[str, tuple[float, float]] = {
    "phi_dc": (0.1, 1.4),
    "phi_rf_frac": (0.0, 1.0),
    "thickness": (0.1, 0.6),
    "f_s": (1.0e9, 8.0e9),
    "gamma_v": (0.3, 1.5),
}

PARAM_ORDER = ("phi_dc", "phi_rf_frac", "thickness", "f_s", "gamma_v")


@dataclass(frozen=True)
class Scenario:
    """Selective-excitation target specification.

    targets and suppressed are harmonic indices; suppressed defaults to
    every non-target n in [1, n_max].  fixed pins parameters (by profile
    field name, phi_rf included) while bounds constrain the free ones.
    """

    targets: frozenset[int]
    f_0: float
    n_max: int = 7
    suppressed: frozenset[int] | None = None
    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)
    fixed: dict[str, float] = field(default_factory=dict)
    penalty: float = 1.0
    selectivity_margin_db: float = 3.0
    eps_background: float = 1.0
    theta_i: float = 0.0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if not self.targets:
            raise ValidationError("targets must be nonempty")
        if self.f_0 <= 0:
            raise ValidationError(f"f_0 must be positive, got {self.f_0}")
        supp = self.suppressed
        if supp is None:
            supp = frozenset(range(1, self.n_max + 1)) - self.targets
            object.__setattr__(self, "suppressed", supp)
        if self.targets & supp:
            raise ValidationError("targets and suppressed sets overlap")
        merged = {**DEFAULT_BOUNDS, **self.bounds}
        unknown = set(merged) - set(PARAM_ORDER)
        if unknown:
            raise ValidationError(f"unknown bound keys {sorted(unknown)}")
        hi_dc = merged["phi_dc"][1]
        if hi_dc >= np.pi / 2:
            raise ValidationError("phi_dc upper bound must stay below pi/2")
        for name, (lo, hi) in merged.items():
            if lo > hi:
                raise ValidationError(f"bound for {name} has lo > hi")
        object.__setattr__(self, "bounds", merged)

    def free_parameters(self) -> tuple[str, ...]:
        return tuple(p for p in PARAM_ORDER if p not in self.fixed and not (
            p == "phi_rf_frac" and "phi_rf" in self.fixed
        ))

    def profile_from(self, values: dict[str, float]) -> ModulationProfile:
        """Build a ModulationProfile from search-space values plus fixed
        overrides; phi_rf_frac is mapped onto the feasible RF range."""
        merged = dict(values)
        merged.update(self.fixed)
        phi_dc = merged["phi_dc"]
        if "phi_rf" in merged:
            phi_rf = merged["phi_rf"]
        else:
            room = np.pi / 2 - phi_dc - POLE_GUARD
            if room <= 0:
                raise ValidationError(f"phi_dc={phi_dc} leaves no room for phi_rf")
            phi_rf = merged["phi_rf_frac"] * room
        return ModulationProfile(
            phi_dc=phi_dc,
            phi_rf=phi_rf,
            f_s=merged["f_s"],
            gamma_v=merged["gamma_v"],
            thickness=merged["thickness"],
            eps_background=self.eps_background,
        )


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 4
    max_evals: int = 120
    seed: int = 0
    simplex_tol: float = 1e-6

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.max_evals < 1:
            raise ValidationError("max_evals must be >= 1")
        if self.simplex_tol <= 0:
            raise ValidationError("simplex_tol must be positive")


@dataclass(frozen=True)
class OptimizationResult:
    best_profile: ModulationProfile
    best_score: float
    spectrum: HarmonicSpectrum
    trace: tuple[float, ...]
    restarts_used: int


def objective(profile: ModulationProfile, scenario: Scenario) -> float:
    """Score = -sum of target powers + penalty * sum of suppressed powers.

    Lower is better; solver failures score WORST_SCORE so the search
    routes around them instead of aborting.
    """
    wave = IncidentWave(f_0=scenario.f_0, theta_i=scenario.theta_i)
    try:
        spectrum = solve_slab(profile, wave, scenario.solver)
    except NumericalError:
        return WORST_SCORE
    score = 0.0
    for n in scenario.targets:
        score -= spectrum.reflected_power(n)
    for n in scenario.suppressed:
        score += scenario.penalty * spectrum.reflected_power(n)
    return score


def _sobol_starts(scenario: Scenario, config: SearchConfig, names):
    lo = np.array([scenario.bounds[p][0] for p in names])
    hi = np.array([scenario.bounds[p][1] for p in names])
    if len(names) == 0:
        return np.zeros((config.restarts, 0))
    sampler = qmc.Sobol(d=len(names), scramble=True, seed=config.seed)
    # draw a power-of-two block to keep the sequence balanced
    m = max(1, int(np.ceil(np.log2(config.restarts))))
    unit = sampler.random_base2(m)[: config.restarts]
    return lo + unit * (hi - lo)


def search(scenario: Scenario, config: SearchConfig = SearchConfig()) -> OptimizationResult:
    """Multi-start bounded Nelder-Mead over the free parameters.

    Deterministic for a fixed seed; ties between restarts break on start
    index.  With every parameter fixed the single evaluation is returned
    as-is.
    """
    names = scenario.free_parameters()
    starts = _sobol_starts(scenario, config, names)
    bounds = [scenario.bounds[p] for p in names]

    def to_profile(x):
        return scenario.profile_from(dict(zip(names, x)))

    def f(x):
        try:
            return objective(to_profile(x), scenario)
        except ValidationError:
            return WORST_SCORE

    best = None
    trace: list[float] = []
    for idx in range(config.restarts):
        x0 = starts[idx]
        if len(names) == 0:
            score = f(x0)
            trace.append(score)
            cand = (score, idx, x0)
        else:
            res = minimize(
                f,
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "maxfev": config.max_evals,
                    "xatol": config.simplex_tol,
                    "fatol": config.simplex_tol,
                },
            )
            trace.append(float(res.fun))
            cand = (float(res.fun), idx, res.x)
        if best is None or (cand[0], cand[1]) < (best[0], best[1]):
            best = cand
    if best is None or best[0] >= WORST_SCORE:
        raise NumericalError("search produced no feasible evaluation")

    profile = to_profile(best[2])
    score = objective(profile, scenario)
    wave = IncidentWave(f_0=scenario.f_0, theta_i=scenario.theta_i)
    spectrum = solve_slab(profile, wave, scenario.solver)
    return OptimizationResult(
        best_profile=profile,
        best_score=score,
        spectrum=spectrum,
        trace=tuple(trace),
        restarts_used=config.restarts,
    )


@dataclass(frozen=True)
class SelectivityReport:
    passed: bool
    worst_margin_db: float


def verify_selectivity(spectrum: HarmonicSpectrum, scenario: Scenario) -> SelectivityReport:
    """Checks that every target harmonic dominates every suppressed one by
    at least selectivity_margin_db (in reflected power)."""
    floor = 1e-300
    worst = np.inf
    for nt in scenario.targets:
        pt = max(spectrum.reflected_power(nt), floor)
        for ns in scenario.suppressed:
            ps = max(spectrum.reflected_power(ns), floor)
            margin = 10.0 * np.log10(pt / ps)
            worst = min(worst, margin)
    if not np.isfinite(worst):
        worst = np.inf if not scenario.suppressed else worst
    return SelectivityReport(
        passed=bool(worst >= scenario.selectivity_margin_db),
        worst_margin_db=float(worst),
    )
