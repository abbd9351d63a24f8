"""Space-time modulated Josephson inductance profile.

The metasurface is a Josephson junction array whose inductance is tuned by a
DC flux bias plus a traveling-wave RF flux:

    L(z, t) = L0 * sec(phi_dc + phi_rf * sin(kappa_s z - omega_s t + phase))

The normalized waveform m(xi) = sec(phi_dc + phi_rf sin xi) / sec(phi_dc) is
what enters the wave solver as a relative-permittivity modulation
eps_r(z, t) = eps_background * m(xi): the squared local refractive index is
taken proportional to the local inductance (transmission-line analogy with
fixed capacitance), normalized so that the static limit reduces to a uniform
slab of permittivity eps_background regardless of the DC bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.constants import c as C_LIGHT
from scipy.constants import physical_constants

from .errors import ValidationError

#: magnetic flux quantum h/2e in Wb
PHI_0 = physical_constants["mag. flux quantum"][0]

#: default inductance prefactor, Phi_0 / (2 pi I_0) for I_0 = 1 uA
DEFAULT_L_SCALE = PHI_0 / (2.0 * np.pi * 1.0e-6)


@dataclass(frozen=True)
class ModulationProfile:
    """Immutable parameter set of the traveling-wave inductance modulation.

    phi_dc, phi_rf are the normalized flux biases 2*pi*Phi/Phi_0 (rad),
    phase is the modulation phase offset (rad), f_s the temporal modulation
    frequency (Hz), gamma_v the ratio of modulation phase velocity to the
    unmodulated in-slab phase velocity, thickness the slab thickness in units
    of the incident free-space wavelength, eps_background the relative
    permittivity of the unmodulated slab and l_scale the inductance
    prefactor L0 (H).
    """

    phi_dc: float
    phi_rf: float
    f_s: float
    gamma_v: float
    thickness: float
    phase: float = 0.0
    eps_background: float = 1.0
    l_scale: float = DEFAULT_L_SCALE

    def __post_init__(self):
        if abs(self.phi_dc) + abs(self.phi_rf) >= np.pi / 2:
            raise ValidationError(
                "secant argument can reach a pole: |phi_dc| + |phi_rf| = "
                f"{abs(self.phi_dc) + abs(self.phi_rf):.6f} >= pi/2"
            )
        if self.f_s <= 0:
            raise ValidationError(f"f_s must be positive, got {self.f_s}")
        if self.gamma_v <= 0:
            raise ValidationError(f"gamma_v must be positive, got {self.gamma_v}")
        if self.thickness <= 0:
            raise ValidationError(f"thickness must be positive, got {self.thickness}")
        if self.eps_background < 1.0:
            raise ValidationError(
                f"eps_background must be >= 1, got {self.eps_background}"
            )
        if self.l_scale <= 0:
            raise ValidationError(f"l_scale must be positive, got {self.l_scale}")

    @property
    def omega_s(self) -> float:
        """Angular modulation frequency (rad/s)."""
        return 2.0 * np.pi * self.f_s

    @property
    def pole_margin(self) -> float:
        """Distance of the worst-case secant argument from pi/2 (rad)."""
        return np.pi / 2 - (abs(self.phi_dc) + abs(self.phi_rf))

    @property
    def background_velocity(self) -> float:
        """Phase velocity in the unmodulated slab (m/s)."""
        return C_LIGHT / np.sqrt(self.eps_background)

    @property
    def kappa_s(self) -> float:
        """Spatial modulation frequency kappa_s = omega_s / (gamma_v * v_b)."""
        return self.omega_s / (self.gamma_v * self.background_velocity)

    def waveform(self, xi, normalized: bool = True):
        """Periodic modulation waveform m(xi).

        With ``normalized`` (the default) the waveform is divided by
        sec(phi_dc) so the cycle-free value is 1; the raw secant is kept
        available for sensitivity studies.
        """
        xi = np.asarray(xi, dtype=float)
        m = 1.0 / np.cos(self.phi_dc + self.phi_rf * np.sin(xi))
        if normalized:
            m = m * np.cos(self.phi_dc)
        return m

    def relative_permittivity(self, xi):
        """eps_r along the modulation cycle, eps_background * m(xi)."""
        return self.eps_background * self.waveform(xi)


def inductance_at(profile: ModulationProfile, z, t):
    """Pointwise inductance L(z, t) in henries.

    Periodic with spatial period 2 pi / kappa_s and temporal period 1 / f_s;
    strictly positive and finite for any profile passing validation.
    """
    xi = profile.kappa_s * np.asarray(z) - profile.omega_s * np.asarray(t) + profile.phase
    return profile.l_scale * profile.waveform(xi, normalized=False)


def minimum_samples(order: int) -> int:
    """Sampling floor below which the quadrature risks aliasing."""
    return 8 * (2 * order + 1)


def fourier_coefficients(
    profile: ModulationProfile, order: int, samples: int | None = None
) -> np.ndarray:
    """Discrete Fourier coefficients c_k of the normalized waveform.

    Returns the array c_k for k in [-order, order], defined through

        m(xi) = sum_k c_k exp(-j k xi)

    and computed by uniform-grid quadrature over one period. For the real
    waveform c_0 is real and c_{-k} = conj(c_k). No closed-form harmonic
    series exists for sec(a + b sin xi), so quadrature it is.
    """
    if order < 0:
        raise ValidationError(f"order must be non-negative, got {order}")
    floor = minimum_samples(order)
    if samples is None:
        samples = 2 * floor
    if samples < floor:
        raise ValidationError(
            f"samples={samples} below the aliasing floor {floor} for order {order}"
        )
    xi = 2.0 * np.pi * np.arange(samples) / samples
    m = profile.waveform(xi)
    ks = np.arange(-order, order + 1)
    coeffs = (m[None, :] * np.exp(1j * np.outer(ks, xi))).sum(axis=1) / samples
    # enforce the exact realness of c_0 (imaginary part is pure roundoff)
    i0 = order
    coeffs[i0] = coeffs[i0].real
    return coeffs


def convergent_order(
    profile: ModulationProfile,
    tol: float = 1e-10,
    start: int = 8,
    max_order: int = 4096,
) -> int:
    """Smallest truncation order K* at which doubling K moves no retained
    coefficient magnitude by more than ``tol``."""
    order = start
    prev = np.abs(fourier_coefficients(profile, order))
    while order < max_order:
        doubled = 2 * order
        cur = np.abs(fourier_coefficients(profile, doubled))
        lo = doubled - order
        if np.max(np.abs(cur[lo : lo + 2 * order + 1] - prev)) < tol:
            return order
        order = doubled
        prev = cur
    raise ValidationError(
        f"no convergent truncation order below {max_order} at tol={tol}"
    )
