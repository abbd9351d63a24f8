"""Qubit-array coupling graphs and state propagation.

A planar grid of fixed-frequency qubits exchanges excitations through
flip-flop (XY) couplings.  Two coupling networks are modeled: the
monochromatic baseline, where only grid-adjacent qubits interact with a
power-law distance falloff, and the polychromatic network, where the
frequency-converting reflector bridges any qubit pair whose detuning is
matched by one of its harmonics.  Dynamics run either in the
single-excitation subspace (dimension = qubit count) or the full
2^n Hilbert space, with an exponential-midpoint propagator that is
unitary per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import NumericalError, ValidationError
from .floquet import HarmonicSpectrum

FULL_HILBERT_QUBIT_CAP = 12
NORM_TOL = 1e-10


@dataclass(frozen=True)
class QubitArray:
    """Rectangular grid of qubits; row-major linear indexing.

    f_q holds one transition frequency per qubit (Hz); spacing is the grid
    pitch; g0 the base nearest-neighbor coupling (Hz); decay_exponent the
    power-law falloff of direct coupling with distance.
    """

    rows: int
    cols: int
    f_q: tuple[float, ...]
    spacing: float = 1.0
    g0: float = 0.0
    decay_exponent: float = 3.0

    def __post_init__(self):
        if self.rows * self.cols < 2:
            raise ValidationError("array must contain at least 2 qubits")
        if len(self.f_q) != self.rows * self.cols:
            raise ValidationError(
                f"f_q has {len(self.f_q)} entries for {self.rows * self.cols} qubits"
            )
        if any(f <= 0 for f in self.f_q):
            raise ValidationError("all qubit frequencies must be positive")
        if self.spacing <= 0:
            raise ValidationError("spacing must be positive")
        if self.g0 < 0:
            raise ValidationError("g0 must be non-negative")
        if self.decay_exponent < 3:
            raise ValidationError(
                f"decay_exponent must be >= 3, got {self.decay_exponent}"
            )

    @property
    def count(self) -> int:
        return self.rows * self.cols

    def position(self, index: int) -> tuple[int, int]:
        return divmod(index, self.cols)

    def omega(self, index: int) -> float:
        """Angular transition frequency (rad/s)."""
        return 2.0 * np.pi * self.f_q[index]


@dataclass(frozen=True)
class CouplingEdge:
    """One coupling channel between qubits a < b.

    harmonic is the reflector harmonic index mediating the channel (0 for
    direct coupling), g_hz the coupling strength in Hz, delta_omega the
    residual detuning (omega_b - omega_a) - harmonic * omega_s in rad/s.
    """

    a: int
    b: int
    harmonic: int
    g_hz: float
    delta_omega: float

    def __post_init__(self):
        if self.a == self.b:
            raise ValidationError("self-edges are not allowed")
        if self.g_hz < 0:
            raise ValidationError("coupling strength must be non-negative")


@dataclass(frozen=True)
class CouplingGraph:
    edges: tuple[CouplingEdge, ...]

    def coupled_pairs(self) -> set[tuple[int, int]]:
        """Unordered qubit pairs with at least one edge, any harmonic."""
        return {(min(e.a, e.b), max(e.a, e.b)) for e in self.edges}

    def neighbors(self, index: int) -> set[int]:
        out = set()
        for e in self.edges:
            if e.a == index:
                out.add(e.b)
            elif e.b == index:
                out.add(e.a)
        return out


@dataclass(frozen=True)
class CouplingMapConfig:
    """Calibration of the harmonic-amplitude to coupling-strength map.

    g^{(m)} = g_ms * |R_m|, distance independent because the mediation runs
    through the common reflector.  An edge is kept when the residual
    detuning fits inside the rotating-wave window w_rwa (rad/s); the window
    defaults to 10 * 2 pi * g_ms * max|R_m| so that retained channels are at
    most an order of magnitude off their own Rabi rate.
    """

    g_ms: float
    w_rwa: float | None = None

    def __post_init__(self):
        if self.g_ms < 0:
            raise ValidationError("g_ms must be non-negative")
        if self.w_rwa is not None and self.w_rwa < 0:
            raise ValidationError("w_rwa must be non-negative")

    def window(self, spectrum: HarmonicSpectrum) -> float:
        if self.w_rwa is not None:
            return self.w_rwa
        return 10.0 * 2.0 * np.pi * self.g_ms * float(np.abs(spectrum.r).max())


@dataclass(frozen=True)
class PureState:
    """State vector in the single-excitation subspace or the full space."""

    basis: str  # "single_excitation" | "full_hilbert"
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.basis not in ("single_excitation", "full_hilbert"):
            raise ValidationError(f"unknown basis {self.basis!r}")
        norm = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state norm {norm} deviates from 1 beyond tolerance")
        if self.basis == "full_hilbert":
            n = int(np.log2(len(self.amplitudes)))
            if 2**n != len(self.amplitudes):
                raise ValidationError("full_hilbert amplitude length must be 2^n")
            if n > FULL_HILBERT_QUBIT_CAP:
                raise ValidationError(
                    f"full_hilbert basis capped at {FULL_HILBERT_QUBIT_CAP} qubits"
                )

    @classmethod
    def excitation(cls, n_qubits: int, excited: int, basis: str = "single_excitation"):
        """Computational state with exactly qubit ``excited`` excited."""
        if basis == "single_excitation":
            amps = np.zeros(n_qubits, dtype=complex)
            amps[excited] = 1.0
        else:
            amps = np.zeros(2**n_qubits, dtype=complex)
            amps[1 << excited] = 1.0
        return cls(basis=basis, amplitudes=amps)


def monochromatic_graph(array: QubitArray) -> CouplingGraph:
    """Baseline network: grid-adjacent pairs only, uniform g0, no detuning."""
    edges = []
    for a in range(array.count):
        ra, ca = array.position(a)
        for b in range(a + 1, array.count):
            rb, cb = array.position(b)
            if abs(ra - rb) + abs(ca - cb) == 1:
                edges.append(
                    CouplingEdge(a=a, b=b, harmonic=0, g_hz=array.g0, delta_omega=0.0)
                )
    return CouplingGraph(edges=tuple(edges))


def coupling_decay(g0: float, distance_ratio: float, n: float) -> float:
    """Direct-coupling falloff g0 * ratio^(-n) with qubit separation."""
    if distance_ratio < 1:
        raise ValidationError(f"distance_ratio must be >= 1, got {distance_ratio}")
    if n < 3:
        raise ValidationError(f"decay exponent must be >= 3, got {n}")
    return g0 * distance_ratio ** (-n)


def polychromatic_graph(
    array: QubitArray,
    spectrum: HarmonicSpectrum,
    mapping: CouplingMapConfig,
    omega_s: float,
) -> CouplingGraph:
    """Reflector-mediated network from a harmonic spectrum.

    For each unordered pair (a, b) with omega_b >= omega_a and each
    far-field harmonic m, the channel detuning is
    (omega_b - omega_a) - m * omega_s; pairs within the rotating-wave
    window get an edge of strength g_ms * |R_m|.  Rejected (evanescent or
    non-positive-frequency) harmonics mediate nothing.
    """
    if len(spectrum.n) == 0:
        raise ValidationError("spectrum carries no harmonics")
    window = mapping.window(spectrum)
    edges = []
    for a in range(array.count):
        for b in range(a + 1, array.count):
            lo, hi = (a, b) if array.omega(b) >= array.omega(a) else (b, a)
            gap = array.omega(hi) - array.omega(lo)
            for i, m in enumerate(spectrum.n):
                if spectrum.rejected[i]:
                    continue
                g = mapping.g_ms * abs(spectrum.r[i])
                if g == 0.0:
                    continue
                delta = gap - m * omega_s
                if abs(delta) <= window:
                    edges.append(
                        CouplingEdge(
                            a=lo, b=hi, harmonic=int(m), g_hz=g, delta_omega=delta
                        )
                    )
    return CouplingGraph(edges=tuple(edges))


def _single_excitation_h(graph, array, t, frame):
    n = array.count
    h = np.zeros((n, n), dtype=complex)
    w = np.array([array.omega(i) for i in range(n)])
    if frame == "lab":
        np.fill_diagonal(h, w - w.min())
    for e in graph.edges:
        phase = 2.0 * np.pi * e.g_hz * np.exp(1j * e.delta_omega * t)
        if frame == "lab":
            # undo the interaction picture the detuned phase is written in
            phase = phase * np.exp(1j * (w[e.b] - w[e.a]) * t)
        h[e.a, e.b] += phase
        h[e.b, e.a] += np.conj(phase)
    return h


def _full_hilbert_h(graph, array, t, frame):
    n = array.count
    if n > FULL_HILBERT_QUBIT_CAP:
        raise ValidationError(
            f"full_hilbert basis capped at {FULL_HILBERT_QUBIT_CAP} qubits"
        )
    dim = 2**n
    h = np.zeros((dim, dim), dtype=complex)
    w = np.array([array.omega(i) for i in range(n)])
    w0 = w.min()
    states = np.arange(dim)
    if frame == "lab":
        for q in range(n):
            occ = (states >> q) & 1
            h[states, states] += occ * (w[q] - w0)
    for e in graph.edges:
        phase = 2.0 * np.pi * e.g_hz * np.exp(1j * e.delta_omega * t)
        if frame == "lab":
            phase = phase * np.exp(1j * (w[e.b] - w[e.a]) * t)
        # sigma_a^+ sigma_b^-: move the excitation from b to a
        has_b = ((states >> e.b) & 1) == 1
        has_a = ((states >> e.a) & 1) == 1
        src = states[has_b & ~has_a]
        dst = src - (1 << e.b) + (1 << e.a)
        h[dst, src] += phase
        h[src, dst] += np.conj(phase)
    return h


def hamiltonian_at(
    graph: CouplingGraph,
    array: QubitArray,
    t: float,
    basis: str = "single_excitation",
    frame: str = "lab",
) -> np.ndarray:
    """Hermitian Hamiltonian matrix at time t (rad/s units).

    The residual-detuning phases g^{(m)} e^{j delta_omega t} are written in
    the interaction picture of the qubit self-energies, so the "rotating"
    frame carries them verbatim with no diagonal.  The "lab" frame restores
    the energy diagonal (relative to the lowest qubit) and multiplies each
    coupling phase by e^{j (omega_b - omega_a) t}, the inverse picture
    change.  The two frames differ by a diagonal unitary, so per-qubit
    populations are frame independent.
    """
    if frame not in ("lab", "rotating"):
        raise ValidationError(f"unknown frame {frame!r}")
    if basis == "single_excitation":
        return _single_excitation_h(graph, array, t, frame)
    if basis == "full_hilbert":
        return _full_hilbert_h(graph, array, t, frame)
    raise ValidationError(f"unknown basis {basis!r}")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), dim) complex
    basis: str

    def final_state(self) -> PureState:
        return PureState(basis=self.basis, amplitudes=self.states[-1])

    def populations(self, array: QubitArray) -> np.ndarray:
        """(len(times), n_qubits) per-qubit excitation probabilities."""
        probs = np.abs(self.states) ** 2
        if self.basis == "single_excitation":
            return probs
        dim = self.states.shape[1]
        states = np.arange(dim)
        cols = [probs[:, ((states >> q) & 1) == 1].sum(axis=1) for q in range(array.count)]
        return np.stack(cols, axis=1)


def default_timestep(
    graph: CouplingGraph, array: QubitArray, frame: str = "rotating"
) -> float:
    """dt = 1 / (50 max|H|), with max|H| estimated at t = 0."""
    h = hamiltonian_at(graph, array, 0.0, frame=frame)
    scale = float(np.abs(h).max())
    # include the fastest coupling-phase rotation in the stiffness estimate
    for e in graph.edges:
        rot = e.delta_omega
        if frame == "lab":
            rot += array.omega(e.b) - array.omega(e.a)
        scale = max(scale, abs(rot))
    if scale == 0.0:
        raise ValidationError("zero Hamiltonian has no natural time step")
    return 1.0 / (50.0 * scale)


def evolve(
    state: PureState,
    graph: CouplingGraph,
    array: QubitArray,
    t_final: float,
    dt: float | None = None,
    sample_every: int = 1,
    frame: str = "rotating",
) -> Trajectory:
    """Propagate by exponential midpoint stepping.

    Each step applies exp(-j H(t + dt/2) dt), exactly unitary per step and
    second order in dt for time-dependent H.  The step size must satisfy
    dt * max|H| <= 0.5; the norm is monitored and drift beyond tolerance
    aborts.
    """
    if t_final <= 0:
        raise ValidationError("t_final must be positive")
    if dt is None:
        dt = default_timestep(graph, array, frame)
    if dt <= 0:
        raise ValidationError("dt must be positive")
    h0 = hamiltonian_at(graph, array, 0.0, state.basis, frame)
    if dt * float(np.abs(h0).max()) > 0.5:
        raise ValidationError(
            f"step-size guard: dt*max|H| = {dt * float(np.abs(h0).max()):.3f} > 0.5"
        )
    if sample_every < 1:
        raise ValidationError("sample_every must be >= 1")

    n_steps = max(1, int(np.ceil(t_final / dt)))
    dt = t_final / n_steps
    psi = state.amplitudes.astype(complex).copy()
    times = [0.0]
    states = [psi.copy()]
    static = all(e.delta_omega == 0.0 for e in graph.edges)
    if frame == "lab":
        static = static and all(
            array.omega(e.a) == array.omega(e.b) for e in graph.edges
        )
    if static:
        step_u = expm(-1j * h0 * dt)
    for k in range(n_steps):
        t_mid = (k + 0.5) * dt
        if static:
            u = step_u
        else:
            u = expm(-1j * hamiltonian_at(graph, array, t_mid, state.basis, frame) * dt)
        psi = u @ psi
        norm = float(np.sum(np.abs(psi) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise NumericalError(
                f"norm drift {abs(norm - 1.0):.3e} at step {k + 1} exceeds {NORM_TOL}"
            )
        if (k + 1) % sample_every == 0 or k == n_steps - 1:
            times.append((k + 1) * dt)
            states.append(psi.copy())
    return Trajectory(times=np.array(times), states=np.array(states), basis=state.basis)


def excitation_probabilities(state: PureState, n_qubits: int | None = None) -> np.ndarray:
    """Per-qubit excitation probability vector.

    In the single-excitation basis this is the Born-rule population and sums
    to one; in the full basis it is the marginal occupation of each qubit.
    """
    if state.basis == "single_excitation":
        return np.abs(state.amplitudes) ** 2
    dim = len(state.amplitudes)
    n = int(np.log2(dim))
    if n_qubits is not None and n_qubits != n:
        raise ValidationError(f"state encodes {n} qubits, caller expects {n_qubits}")
    probs = np.abs(state.amplitudes) ** 2
    states = np.arange(dim)
    return np.array([probs[((states >> q) & 1) == 1].sum() for q in range(n)])


def total_excitation(state: PureState) -> float:
    """Expectation of the total excitation number operator."""
    if state.basis == "single_excitation":
        return float(np.sum(np.abs(state.amplitudes) ** 2))
    dim = len(state.amplitudes)
    n = int(np.log2(dim))
    counts = np.array([bin(s).count("1") for s in range(dim)])
    return float(np.sum(counts * np.abs(state.amplitudes) ** 2))
