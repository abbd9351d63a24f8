"""Time-domain reference solver for the modulated slab, normal incidence.

A 1-D staggered-grid finite-difference scheme integrates the same wave
equation as the harmonic solver, discretized as an H update, a D update and
the time-varying constitutive relation E = D / (eps_0 eps_r(z, t)).  The
analytic (complex) signal is propagated so a single run resolves every
harmonic; after a cosine-ramped turn-on and a settling interval, reflected
and transmitted probes are projected onto e^{j omega_n t} over an integer
number of modulation periods.  First-order absorbing boundaries are exact
at unit Courant number and a total-field/scattered-field interface injects
the incident wave, so the left probe records pure reflection.

This solver shares no code with the harmonic route (no Fourier expansion of
the modulation, no mode matching) and serves as its independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import epsilon_0, mu_0

from .errors import ValidationError
from .floquet import HarmonicSpectrum, IncidentWave, harmonic_angles
from .modulation import ModulationProfile


@dataclass(frozen=True)
class FdtdConfig:
    """Resolution and windowing of the time-domain reference run.

    points_per_wavelength is counted at the shortest in-medium wavelength
    among the tracked harmonics; measure_periods and ramp_periods are in
    units of the modulation period.
    """

    points_per_wavelength: int = 40
    measure_periods: int = 24
    ramp_periods: int = 6
    courant: float = 0.999
    max_harmonic: int = 8

    def __post_init__(self):
        if self.points_per_wavelength < 10:
            raise ValidationError(
                f"points_per_wavelength must be >= 10, got {self.points_per_wavelength}"
            )
        if self.measure_periods < 1 or self.ramp_periods < 1:
            raise ValidationError("measure_periods and ramp_periods must be >= 1")
        if not 0.0 < self.courant <= 1.0:
            raise ValidationError(f"courant must lie in (0, 1], got {self.courant}")
        if self.max_harmonic < 1:
            raise ValidationError(f"max_harmonic must be >= 1, got {self.max_harmonic}")


def fdtd_oracle(
    profile: ModulationProfile,
    wave: IncidentWave,
    config: FdtdConfig = FdtdConfig(),
) -> HarmonicSpectrum:
    """Harmonic reflection/transmission spectrum by direct time stepping.

    Normal incidence only; the 1-D grid has no transverse wavenumber.
    Amplitudes are referenced to the slab faces like the harmonic solver's.
    """
    if wave.theta_i != 0.0:
        raise ValidationError("time-domain reference handles normal incidence only")

    f0 = wave.f_0
    lam0 = wave.wavelength
    d = profile.thickness * lam0
    kappa = profile.kappa_s
    ws = profile.omega_s
    w0 = wave.omega_0
    fs = profile.f_s
    eps_b = profile.eps_background
    nmax = config.max_harmonic

    # grid resolution set by the shortest in-medium wavelength tracked
    xi_scan = np.linspace(0.0, 2.0 * np.pi, 2001)
    m_scan = profile.waveform(xi_scan)
    f_max = f0 + nmax * fs
    lam_min = C_LIGHT / (f_max * np.sqrt(eps_b * m_scan.max()))
    dz = lam_min / config.points_per_wavelength
    v_max = max(C_LIGHT, C_LIGHT / np.sqrt(eps_b * m_scan.min()))
    dt = config.courant * dz / v_max

    nbuf = int(round(lam0 / dz))
    nslab = int(round(d / dz))
    ncells = 2 * nbuf + nslab
    z_e = np.arange(ncells + 1) * dz
    slab_lo, slab_hi = nbuf, nbuf + nslab
    i_src = nbuf // 2
    i_refl = i_src // 2
    i_tran = ncells - nbuf // 4

    steps_ramp = int(round(config.ramp_periods / fs / dt))
    steps_meas = int(round(config.measure_periods / fs / dt))
    steps = 2 * steps_ramp + steps_meas

    E = np.zeros(ncells + 1, dtype=complex)
    D = np.zeros(ncells + 1, dtype=complex)
    H = np.zeros(ncells, dtype=complex)
    z_in = z_e[slab_lo : slab_hi + 1]
    eta0 = np.sqrt(mu_0 / epsilon_0)

    def eps_r(t):
        out = np.ones(ncells + 1)
        xi = kappa * z_in - ws * t + profile.phase
        out[slab_lo : slab_hi + 1] = eps_b * profile.waveform(xi)
        # interface nodes see the average of the media on either side
        out[slab_lo] = 0.5 * (1.0 + out[slab_lo])
        out[slab_hi] = 0.5 * (1.0 + out[slab_hi])
        return out

    ramp_t = config.ramp_periods / fs

    def src(t):
        if t <= 0.0:
            return 0.0
        ramp = 0.5 - 0.5 * np.cos(np.pi * min(t / ramp_t, 1.0))
        return wave.amplitude * ramp * np.exp(1j * w0 * t)

    z_src = z_e[i_src]
    refl_ts = np.empty(steps, dtype=complex)
    tran_ts = np.empty(steps, dtype=complex)
    ch = dt / (mu_0 * dz)
    S = C_LIGHT * dt / dz
    mur = (S - 1.0) / (S + 1.0)
    for it in range(steps):
        t = it * dt
        H = H - ch * (E[1:] - E[:-1])
        H[i_src - 1] += ch * src(t)
        D[1:-1] = D[1:-1] - (dt / dz) * (H[1:] - H[:-1])
        # incident H lives half a cell left of the injection node
        t_h = t + 0.5 * dt
        D[i_src] += (dt / dz) * (src(t_h + 0.5 * dz / C_LIGHT) / eta0)
        E_new = D / (epsilon_0 * eps_r(t + dt))
        E_new[0] = E[1] + mur * (E_new[1] - E[0])
        E_new[-1] = E[-2] + mur * (E_new[-2] - E[-1])
        E = E_new
        refl_ts[it] = E[i_refl]
        tran_ts[it] = E[i_tran]

    # project probe signals on the harmonic ladder over the window
    t_arr = np.arange(steps) * dt
    sel = slice(2 * steps_ramp, steps)
    tw = t_arr[sel]
    ns = np.arange(-nmax, nmax + 1)
    wn = w0 + ns * ws
    Rn = np.empty(len(ns), dtype=complex)
    Tn = np.empty(len(ns), dtype=complex)
    for i, w in enumerate(wn):
        ph = np.exp(-1j * w * tw)
        Rn[i] = (refl_ts[sel] * ph).mean()
        Tn[i] = (tran_ts[sel] * ph).mean()

    # re-reference probe amplitudes to the slab faces
    dz_r = z_e[slab_lo] - z_e[i_refl]
    dz_t = z_e[i_tran] - z_e[slab_hi]
    kzn = wn / C_LIGHT
    inc_phase = np.exp(-1j * (w0 / C_LIGHT) * (z_e[slab_lo] - z_src))
    Rn = Rn * np.exp(1j * kzn * dz_r) / (inc_phase * wave.amplitude)
    Tn = Tn * np.exp(1j * kzn * dz_t) / (inc_phase * wave.amplitude)

    f_n = wn / (2.0 * np.pi)
    theta, rejected = harmonic_angles(wave.theta_i, wave.f_0, f_n)
    keep = ~rejected
    power_r = np.where(keep, np.abs(Rn) ** 2, 0.0)
    power_t = np.where(keep, np.abs(Tn) ** 2, 0.0)
    return HarmonicSpectrum(
        n=ns,
        f_hz=f_n,
        r=Rn,
        t=Tn,
        theta_r=theta,
        power_r=power_r,
        power_t=power_t,
        rejected=rejected,
    )
