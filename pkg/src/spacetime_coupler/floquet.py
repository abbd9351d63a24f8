"""Harmonic scattering from the space-time modulated slab.

An obliquely incident monochromatic plane wave hits a slab occupying
0 <= z <= d whose relative permittivity is modulated as
eps_r(z, t) = eps_b * m(kappa_s z - omega_s t + phase), vacuum on both sides.
The scattered field is a ladder of space-time harmonics at omega_n =
omega_0 + n omega_s sharing the transverse wavenumber k_x = k_0 sin(theta_i).

The interior field is expanded over co-moving harmonic amplitudes
A_n(z) e^{-j n kappa_s z} e^{j omega_n t}; inserting the expansion into the
scalar wave equation for the tangential field component,

    laplacian(u) = (1/c^2) d^2(eps_r u)/dt^2,

turns the z dependence into the constant-coefficient quadratic pencil

    (beta^2 I + beta T1 + T0) A = 0,  T1 = 2 diag(n kappa),
    T0 = diag(n^2 kappa^2 + k_x^2) - W,  W[p, q] = (omega_p/c)^2 eps_{p-q},

whose eigenpairs are the Bloch modes of the modulated medium.  Tangential
continuity of the field and its z derivative at both interfaces closes the
system for the reflection and transmission amplitudes R_n, T_n.

Two equivalent interior representations are implemented: expansion over the
Bloch eigenmode basis ("modes") and direct propagation of the first-order
harmonic ODE across the slab by a matrix exponential ("transfer").  The
eigenmode basis becomes defective when a harmonic lands exactly at zero
frequency (f_0 an integer multiple of f_s, the natural operating point), so
"auto" falls back to the transfer route whenever the basis is unreliable.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.linalg import expm

from .errors import ConvergenceError, NumericalError, ValidationError
from .modulation import ModulationProfile, fourier_coefficients

#: eigenvector-matrix condition number beyond which the Bloch basis is
#: considered near-defective and "auto" switches to the transfer route
DEFECTIVITY_CONDITION_BOUND = 1e8


@dataclass(frozen=True)
class IncidentWave:
    """Incident monochromatic plane wave: frequency, angle, magnitude."""

    f_0: float
    theta_i: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.f_0 <= 0:
            raise ValidationError(f"f_0 must be positive, got {self.f_0}")
        if not 0.0 <= self.theta_i < np.pi / 2:
            raise ValidationError(
                f"theta_i must lie in [0, pi/2), got {self.theta_i}"
            )

    @property
    def omega_0(self) -> float:
        return 2.0 * np.pi * self.f_0

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.f_0

    @property
    def k_0(self) -> float:
        return self.omega_0 / C_LIGHT

    @property
    def k_x(self) -> float:
        return self.k_0 * np.sin(self.theta_i)


@dataclass(frozen=True)
class SolverConfig:
    """Truncation and tolerance knobs of the harmonic solver."""

    truncation: int = 12
    quadrature_samples: int | None = None
    convergence_tol: float = 1e-6
    method: str = "auto"  # "auto" | "modes" | "transfer"

    def __post_init__(self):
        if self.truncation < 1:
            raise ValidationError(f"truncation must be >= 1, got {self.truncation}")
        floor = 8 * (2 * self.truncation + 1)
        if self.quadrature_samples is not None and self.quadrature_samples < floor:
            raise ValidationError(
                f"quadrature_samples={self.quadrature_samples} below floor {floor}"
            )
        if self.convergence_tol <= 0:
            raise ValidationError("convergence_tol must be positive")
        if self.method not in ("auto", "modes", "transfer"):
            raise ValidationError(f"unknown method {self.method!r}")


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Per-harmonic complex amplitudes, frequencies, angles and powers.

    ``r`` and ``t`` are the complex reflection/transmission amplitudes
    referenced to the two slab faces.  ``theta_r`` is NaN for harmonics
    flagged ``rejected`` (evanescent or non-positive frequency); those carry
    zero far-field power by construction.
    """

    n: np.ndarray
    f_hz: np.ndarray
    r: np.ndarray
    t: np.ndarray
    theta_r: np.ndarray
    power_r: np.ndarray
    power_t: np.ndarray
    rejected: np.ndarray

    def index_of(self, harmonic: int) -> int:
        i = int(harmonic - self.n[0])
        if not 0 <= i < len(self.n) or self.n[i] != harmonic:
            raise KeyError(f"harmonic {harmonic} not in spectrum")
        return i

    def reflected_power(self, harmonic: int) -> float:
        return float(self.power_r[self.index_of(harmonic)])

    def transmitted_power(self, harmonic: int) -> float:
        return float(self.power_t[self.index_of(harmonic)])

    def dominant_conversion(self, n_max: int = 7) -> int:
        """Up-converted harmonic index in [1, n_max] carrying the most
        reflected power."""
        powers = [self.reflected_power(m) for m in range(1, n_max + 1)]
        return 1 + int(np.argmax(powers))

    def as_records(self) -> list[dict]:
        recs = []
        for i in range(len(self.n)):
            rej = bool(self.rejected[i])
            recs.append(
                {
                    "n": int(self.n[i]),
                    "f_hz": float(self.f_hz[i]),
                    "re_r": float(self.r[i].real),
                    "im_r": float(self.r[i].imag),
                    "re_t": float(self.t[i].real),
                    "im_t": float(self.t[i].imag),
                    "theta_r_rad": None if rej else float(self.theta_r[i]),
                    "power_r": float(self.power_r[i]),
                    "power_t": float(self.power_t[i]),
                    "evanescent": rej,
                }
            )
        return recs

    @classmethod
    def from_records(cls, recs: list[dict]) -> "HarmonicSpectrum":
        recs = sorted(recs, key=lambda r: r["n"])
        n = np.array([r["n"] for r in recs], dtype=int)
        return cls(
            n=n,
            f_hz=np.array([r["f_hz"] for r in recs]),
            r=np.array([r["re_r"] + 1j * r["im_r"] for r in recs]),
            t=np.array([r["re_t"] + 1j * r["im_t"] for r in recs]),
            theta_r=np.array(
                [np.nan if r["theta_r_rad"] is None else r["theta_r_rad"] for r in recs]
            ),
            power_r=np.array([r["power_r"] for r in recs]),
            power_t=np.array([r["power_t"] for r in recs]),
            rejected=np.array([bool(r["evanescent"]) for r in recs]),
        )


@dataclass(frozen=True)
class BlochModeSet:
    """Eigenpairs of the slab's truncated dispersion pencil.

    ``eigenvalues`` are the 2(2N+1) longitudinal wavenumbers beta_q;
    ``eigenvectors`` the per-mode harmonic amplitude columns (2N+1 rows).
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    basis_condition: float

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    @property
    def near_defective(self) -> bool:
        return self.basis_condition > DEFECTIVITY_CONDITION_BOUND


def harmonic_frequencies(f_0: float, f_s: float, order: int) -> np.ndarray:
    """Frequencies f_0 + n f_s for n in [-order, order], ascending in n."""
    if f_0 <= 0 or f_s <= 0:
        raise ValidationError("f_0 and f_s must be positive")
    return f_0 + np.arange(-order, order + 1) * f_s


def harmonic_angles(theta_i: float, f_0: float, f_n) -> tuple[np.ndarray, np.ndarray]:
    """Reflection angles of the space-time harmonics.

    Phase matching fixes sin(theta_n) = (f_0 / f_n) sin(theta_i).  Returns
    (angles, rejected): harmonics with non-positive frequency or with a sine
    above one are flagged rejected and get angle NaN instead of an exception.
    """
    if not 0.0 <= theta_i < np.pi / 2:
        raise ValidationError(f"theta_i must lie in [0, pi/2), got {theta_i}")
    f_n = np.asarray(f_n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (f_0 / f_n) * np.sin(theta_i)
    rejected = (f_n <= 0) | (np.abs(s) > 1)
    angles = np.where(rejected, np.nan, np.arcsin(np.where(rejected, 0.0, s)))
    return angles, rejected


def _coupling_matrices(
    profile: ModulationProfile,
    wave: IncidentWave,
    config: SolverConfig,
    reverse_modulation: bool,
):
    """Assemble the quadratic-pencil matrices T0, T1 plus bookkeeping arrays."""
    N = config.truncation
    ns = np.arange(-N, N + 1)
    omega_n = wave.omega_0 + ns * profile.omega_s
    kappa = profile.kappa_s
    k_x = wave.k_x
    sigma = -1 if reverse_modulation else +1

    coeffs = fourier_coefficients(profile, 2 * N, config.quadrature_samples)
    ks = np.arange(-2 * N, 2 * N + 1)
    eps_c = profile.eps_background * coeffs * np.exp(-1j * ks * profile.phase)
    lookup = dict(zip(ks, eps_c))

    Nh = 2 * N + 1
    W = np.zeros((Nh, Nh), dtype=complex)
    for i in range(Nh):
        wfac = omega_n[i] ** 2 / C_LIGHT**2
        for j in range(Nh):
            W[i, j] = wfac * lookup[sigma * (ns[i] - ns[j])]
    kap_n = sigma * ns * kappa
    T0 = np.diag(kap_n**2 + k_x**2).astype(complex) - W
    T1 = np.diag(2.0 * kap_n).astype(complex)
    return ns, omega_n, kap_n, T0, T1


def _exterior_kz(omega_n: np.ndarray, k_x: float) -> np.ndarray:
    """Longitudinal vacuum wavenumbers, outgoing/decaying branch.

    Propagating harmonics carry sign(omega_n) so negative-frequency
    components radiate outward; evanescent ones take the -j branch so the
    exterior tails decay away from the slab.
    """
    kz = np.empty(len(omega_n), dtype=complex)
    for i, w in enumerate(omega_n):
        arg = w**2 / C_LIGHT**2 - k_x**2
        if arg >= 0.0:
            kz[i] = np.sign(w) * np.sqrt(arg)
        else:
            kz[i] = -1j * np.sqrt(-arg)
    return kz


def bloch_modes(
    profile: ModulationProfile,
    wave: IncidentWave,
    config: SolverConfig,
    reverse_modulation: bool = False,
) -> BlochModeSet:
    """Eigenmodes of the modulated slab's interior.

    The quadratic dependence on beta is linearized by companion embedding,
    giving exactly 2(2N+1) eigenpairs.  Each eigenpair is checked against
    the dispersion pencil; the eigenvector-matrix condition number is
    reported so callers can detect near-defective clusters.
    """
    ns, omega_n, kap_n, T0, T1 = _coupling_matrices(
        profile, wave, config, reverse_modulation
    )
    Nh = len(ns)
    companion = np.block(
        [[np.zeros((Nh, Nh), dtype=complex), np.eye(Nh, dtype=complex)], [-T0, -T1]]
    )
    try:
        betas, vecs = np.linalg.eig(companion)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"dispersion eigenproblem failed: {exc}") from exc

    amps = vecs[:Nh, :]
    scale = np.abs(amps).max(axis=0)
    scale[scale == 0] = 1.0
    amps = amps / scale

    # relative residual of each eigenpair in the quadratic pencil
    norm0 = np.linalg.norm(T0, ord=2)
    norm1 = np.linalg.norm(T1, ord=2)
    residuals = np.empty(2 * Nh)
    for q in range(2 * Nh):
        b = betas[q]
        v = amps[:, q]
        res = (b**2) * v + b * (T1 @ v) + T0 @ v
        denom = (abs(b) ** 2 + abs(b) * norm1 + norm0) * np.linalg.norm(v)
        residuals[q] = np.linalg.norm(res) / denom
    cond = float(np.linalg.cond(vecs))
    return BlochModeSet(
        eigenvalues=betas, eigenvectors=amps, residuals=residuals, basis_condition=cond
    )


def _powers(omega_n, kz, i0, r, t, rejected):
    """Normalized z-directed power flux per harmonic (incident flux = 1)."""
    with np.errstate(invalid="ignore", divide="ignore"):
        flux = np.where(
            rejected, 0.0, np.real(kz) / np.where(omega_n != 0.0, omega_n, 1.0)
        )
    flux0 = np.real(kz[i0]) / omega_n[i0]
    return np.abs(r) ** 2 * flux / flux0, np.abs(t) ** 2 * flux / flux0


def _spectrum_from_amplitudes(profile, wave, ns, omega_n, kz, r, t):
    f_n = omega_n / (2.0 * np.pi)
    theta, rejected = harmonic_angles(wave.theta_i, wave.f_0, f_n)
    i0 = len(ns) // 2
    power_r, power_t = _powers(omega_n, kz, i0, r, t, rejected)
    return HarmonicSpectrum(
        n=ns.copy(),
        f_hz=f_n,
        r=r,
        t=t,
        theta_r=theta,
        power_r=power_r,
        power_t=power_t,
        rejected=rejected,
    )


def _solve_by_modes(profile, wave, config, reverse_modulation, pec_backed):
    """Matching over the Bloch eigenmode basis: 4(2N+1) unknowns
    {mode amplitudes, R_n, T_n} (3(2N+1) with a conductor backing)."""
    modes = bloch_modes(profile, wave, config, reverse_modulation)
    ns, omega_n, kap_n, _, _ = _coupling_matrices(
        profile, wave, config, reverse_modulation
    )
    Nh = len(ns)
    Q = 2 * Nh
    d = profile.thickness * wave.wavelength
    kz = _exterior_kz(omega_n, wave.k_x)
    i0 = Nh // 2

    betas = modes.eigenvalues
    V = modes.eigenvectors
    b_nq = betas[None, :] + kap_n[:, None]

    # reference growing modes at z = d so no matrix entry exceeds unit modulus
    phase_d = np.exp(-1j * betas * d)
    grow = np.abs(phase_d) > 1.0
    phi0 = np.where(grow, np.exp(1j * betas * d), 1.0)
    phid = np.where(grow, 1.0, phase_d)[None, :] * np.exp(-1j * kap_n[:, None] * d)

    n_unknown = Q + (Nh if pec_backed else 2 * Nh)
    M = np.zeros((n_unknown, n_unknown), dtype=complex)
    rhs = np.zeros(n_unknown, dtype=complex)
    H0 = wave.amplitude

    # z = 0: field continuity, then derivative continuity
    M[:Nh, :Q] = V * phi0[None, :]
    M[:Nh, Q : Q + Nh] = -np.eye(Nh)
    rhs[i0] = H0
    M[Nh : 2 * Nh, :Q] = -1j * b_nq * V * phi0[None, :]
    M[Nh : 2 * Nh, Q : Q + Nh] = -1j * np.diag(kz)
    rhs[Nh + i0] = -1j * kz[i0] * H0
    # z = d: conductor backing pins the field; otherwise match to T_n
    M[2 * Nh : 3 * Nh, :Q] = V * phid
    if not pec_backed:
        M[2 * Nh : 3 * Nh, Q + Nh :] = -np.eye(Nh)
        M[3 * Nh :, :Q] = -1j * b_nq * V * phid
        M[3 * Nh :, Q + Nh :] = 1j * np.diag(kz)

    try:
        sol = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            "singular matching matrix (eigenmode basis, condition "
            f"{modes.basis_condition:.2e}) at f_0={wave.f_0}, f_s={profile.f_s}"
        ) from exc
    r = sol[Q : Q + Nh]
    t = np.zeros(Nh, dtype=complex) if pec_backed else sol[Q + Nh :]
    return _spectrum_from_amplitudes(profile, wave, ns, omega_n, kz, r, t)


def _solve_by_transfer(profile, wave, config, reverse_modulation, pec_backed):
    """Matching with the interior eliminated through the matrix exponential
    of the first-order harmonic ODE (robust when the eigenbasis is
    defective, e.g. a harmonic sitting exactly at zero frequency)."""
    ns, omega_n, kap_n, T0, T1 = _coupling_matrices(
        profile, wave, config, reverse_modulation
    )
    Nh = len(ns)
    d = profile.thickness * wave.wavelength
    kz = _exterior_kz(omega_n, wave.k_x)
    i0 = Nh // 2
    H0 = wave.amplitude

    # A'' = T0 A + j T1 A' for the co-moving amplitudes A_n(z)
    G = np.block(
        [[np.zeros((Nh, Nh), dtype=complex), np.eye(Nh, dtype=complex)], [T0, 1j * T1]]
    )
    propagator = expm(G * d)

    e0 = np.zeros(Nh)
    e0[i0] = H0
    y_inc = np.concatenate([e0, 1j * kap_n * e0 - 1j * kz[i0] * e0])
    col_r = np.vstack([np.eye(Nh), np.diag(1j * kap_n) + np.diag(1j * kz)])
    if pec_backed:
        top = (propagator @ col_r)[:Nh]
        rhs = -(propagator @ y_inc)[:Nh]
        system = top
    else:
        exit_phase = np.exp(1j * kap_n * d)
        col_t = np.vstack(
            [np.diag(exit_phase), np.diag((1j * kap_n - 1j * kz) * exit_phase)]
        )
        system = np.hstack([propagator @ col_r, -col_t])
        rhs = -(propagator @ y_inc)
    try:
        sol = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"singular matching matrix at f_0={wave.f_0}, f_s={profile.f_s}, "
            f"N={config.truncation}"
        ) from exc
    r = sol[:Nh]
    t = np.zeros(Nh, dtype=complex) if pec_backed else sol[Nh:]
    return _spectrum_from_amplitudes(profile, wave, ns, omega_n, kz, r, t)


def solve_slab(
    profile: ModulationProfile,
    wave: IncidentWave,
    config: SolverConfig = SolverConfig(),
    pec_backed: bool = False,
    reverse_modulation: bool = False,
) -> HarmonicSpectrum:
    """Scattering amplitudes of all retained space-time harmonics.

    ``pec_backed`` replaces the exit half-space by a perfect conductor
    (reflective-metasurface operation); ``reverse_modulation`` flips the
    propagation direction of the traveling modulation (omega_s -> -omega_s
    at fixed kappa_s and phase), the knob behind the nonreciprocity witness.
    """
    method = config.method
    if method == "auto":
        commensurate = np.any(
            np.abs(wave.f_0 + np.arange(-config.truncation, config.truncation + 1) * profile.f_s)
            < 1e-9 * profile.f_s
        )
        if commensurate:
            method = "transfer"
        else:
            modes = bloch_modes(profile, wave, config, reverse_modulation)
            method = "transfer" if modes.near_defective else "modes"
    solver = _solve_by_modes if method == "modes" else _solve_by_transfer
    return solver(profile, wave, config, reverse_modulation, pec_backed)


def analytic_slab_amplitudes(
    eps_b: float, thickness: float, f_0: float, theta_i: float = 0.0
) -> tuple[complex, complex]:
    """Closed-form reflection/transmission of a static uniform slab.

    Airy summation for a lossless dielectric slab in vacuum; ``thickness``
    in units of the free-space wavelength, amplitudes referenced to the two
    faces as in the harmonic solver.  Serves as the static-limit oracle.
    """
    k0 = 2.0 * np.pi * f_0 / C_LIGHT
    d = thickness * C_LIGHT / f_0
    kx = k0 * np.sin(theta_i)
    kz1 = np.sqrt(k0**2 - kx**2)
    kz2 = np.sqrt(eps_b * k0**2 - kx**2)
    r12 = (kz1 - kz2) / (kz1 + kz2)
    ph = np.exp(-2j * kz2 * d)
    denom = 1.0 - r12**2 * ph
    r = r12 * (1.0 - ph) / denom
    t = (1.0 - r12**2) * np.exp(-1j * kz2 * d) / denom
    return complex(r), complex(t)


@dataclass(frozen=True)
class ConvergenceReport:
    truncations: tuple[int, ...]
    max_relative_change: float
    converged: bool


def convergence_study(
    profile: ModulationProfile,
    wave: IncidentWave,
    base_config: SolverConfig,
    harmonic_range: int = 4,
    pec_backed: bool = False,
) -> ConvergenceReport:
    """Truncation refinement report: |R_n| at N, N+2, N+4.

    The maximum relative change is taken over the harmonics in
    [-harmonic_range, harmonic_range] that are not rejected (zero- and
    negative-frequency harmonics sit at roundoff level and would poison a
    relative metric).
    """
    N = base_config.truncation
    mags = []
    for trunc in (N, N + 2, N + 4):
        cfg = replace(base_config, truncation=trunc, quadrature_samples=None)
        spec = solve_slab(profile, wave, cfg, pec_backed=pec_backed)
        keep = [
            m
            for m in range(-harmonic_range, harmonic_range + 1)
            if not spec.rejected[spec.index_of(m)]
        ]
        mags.append(np.array([abs(spec.r[spec.index_of(m)]) for m in keep]))
    change = 0.0
    for cur in mags[1:]:
        change = max(change, float(np.max(np.abs(cur - mags[0]) / np.abs(cur))))
    return ConvergenceReport(
        truncations=(N, N + 2, N + 4),
        max_relative_change=change,
        converged=change < base_config.convergence_tol,
    )


def solve_converged(
    profile: ModulationProfile,
    wave: IncidentWave,
    config: SolverConfig = SolverConfig(),
    harmonic_range: int = 4,
    pec_backed: bool = False,
    max_truncation: int = 512,
) -> tuple[HarmonicSpectrum, int]:
    """Refine the truncation until the convergence tolerance holds.

    Doubles N until the (N, N+4) relative change of the retained |R_n| drops
    below config.convergence_tol; returns the spectrum at the final N.
    """
    N = config.truncation
    while True:
        report = convergence_study(
            profile, wave, replace(config, truncation=N), harmonic_range, pec_backed
        )
        if report.converged:
            cfg = replace(config, truncation=N, quadrature_samples=None)
            return solve_slab(profile, wave, cfg, pec_backed=pec_backed), N
        if 2 * N > max_truncation:
            raise ConvergenceError(
                f"no truncation below {max_truncation} meets tol="
                f"{config.convergence_tol} (last change "
                f"{report.max_relative_change:.3e} at N={N})"
            )
        N *= 2
