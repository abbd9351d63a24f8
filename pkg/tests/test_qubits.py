import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from spacetime_coupler import (
    CouplingEdge,
    CouplingGraph,
    CouplingMapConfig,
    HarmonicSpectrum,
    PureState,
    QubitArray,
    ValidationError,
    coupling_decay,
    evolve,
    excitation_probabilities,
    hamiltonian_at,
    monochromatic_graph,
    polychromatic_graph,
)
from spacetime_coupler.qubits import total_excitation

G_HZ = 5e6
G_RAD = 2 * np.pi * G_HZ


def array(n, base=5e9, step=0.0, g0=G_HZ):
    return QubitArray(rows=1, cols=n,
                      f_q=tuple(base + k * step for k in range(n)), g0=g0)


def spectrum_with(r_by_n, f_0=3e9, f_s=3e9, n_max=8):
    """Synthetic spectrum carrying the requested reflection magnitudes."""
    ns = np.arange(-n_max, n_max + 1)
    f = f_0 + ns * f_s
    r = np.array([complex(r_by_n.get(int(n), 0.0)) for n in ns])
    rejected = f <= 0
    return HarmonicSpectrum(
        n=ns, f_hz=f.astype(float), r=r, t=np.zeros_like(r),
        theta_r=np.where(rejected, np.nan, 0.0),
        power_r=np.where(rejected, 0.0, np.abs(r) ** 2),
        power_t=np.zeros(len(ns)), rejected=rejected,
    )


class TestArrayValidation:
    def test_too_small(self):
        with pytest.raises(ValidationError):
            QubitArray(rows=1, cols=1, f_q=(5e9,))

    def test_frequency_count_mismatch(self):
        with pytest.raises(ValidationError):
            QubitArray(rows=2, cols=2, f_q=(5e9, 5e9))

    def test_bad_decay_exponent(self):
        with pytest.raises(ValidationError):
            QubitArray(rows=1, cols=2, f_q=(5e9, 5e9), decay_exponent=2.0)


class TestMonochromaticGraph:
    def test_1x2_single_edge(self):
        assert len(monochromatic_graph(array(2)).edges) == 1

    def test_2x2_four_edges(self):
        arr = QubitArray(rows=2, cols=2, f_q=(5e9,) * 4, g0=G_HZ)
        assert len(monochromatic_graph(arr).edges) == 4

    def test_4x4_grid_enumeration(self):
        arr = QubitArray(rows=4, cols=4, f_q=(5e9,) * 16, g0=G_HZ)
        g = monochromatic_graph(arr)
        assert len(g.edges) == 24
        assert all(e.delta_omega == 0.0 and e.harmonic == 0 for e in g.edges)
        assert all(e.g_hz == G_HZ for e in g.edges)

    def test_locality(self):
        # no edge between diagonal neighbors or across the grid
        arr = QubitArray(rows=3, cols=3, f_q=(5e9,) * 9, g0=G_HZ)
        pairs = monochromatic_graph(arr).coupled_pairs()
        assert (0, 4) not in pairs
        assert (0, 8) not in pairs


class TestCouplingDecay:
    def test_identity_distance(self):
        assert coupling_decay(G_HZ, 1.0, 3.0) == G_HZ

    def test_cubic(self):
        assert coupling_decay(G_HZ, 2.0, 3.0) == pytest.approx(G_HZ / 8)

    def test_quartic(self):
        assert coupling_decay(G_HZ, 3.0, 4.0) == pytest.approx(G_HZ / 81)

    def test_validation(self):
        with pytest.raises(ValidationError):
            coupling_decay(G_HZ, 0.5, 3.0)


class TestPolychromaticGraph:
    def test_single_harmonic_all_to_all_limit(self):
        # only the specular harmonic, uniform frequencies: every pair couples
        arr = array(4, step=0.0, g0=0.0)
        spec = spectrum_with({0: 0.5})
        g = polychromatic_graph(arr, spec, CouplingMapConfig(g_ms=G_HZ),
                                omega_s=2 * np.pi * 3e9)
        assert g.coupled_pairs() == {(a, b) for a in range(4) for b in range(a + 1, 4)}
        assert all(e.g_hz == pytest.approx(G_HZ * 0.5) for e in g.edges)

    def test_frequency_ladder_routing(self):
        # qubits at k*3 GHz: Q1 couples to Q2, Q3, Q4 via m = 1, 2, 3
        arr = QubitArray(rows=1, cols=4, f_q=(3e9, 6e9, 9e9, 12e9))
        spec = spectrum_with({1: 0.3, 2: 0.2, 3: 0.1})
        g = polychromatic_graph(arr, spec, CouplingMapConfig(g_ms=G_HZ),
                                omega_s=2 * np.pi * 3e9)
        q1 = {(e.b, e.harmonic) for e in g.edges if e.a == 0}
        assert q1 == {(1, 1), (2, 2), (3, 3)}
        # the farthest pair is bridged (all-to-all reach)
        assert (0, 3) in g.coupled_pairs()

    def test_zero_window_incommensurate_is_empty(self):
        arr = QubitArray(rows=1, cols=3, f_q=(3.1e9, 5.7e9, 8.9e9))
        spec = spectrum_with({1: 0.3, 2: 0.2})
        g = polychromatic_graph(arr, spec, CouplingMapConfig(g_ms=G_HZ, w_rwa=0.0),
                                omega_s=2 * np.pi * 3e9)
        assert g.edges == ()

    def test_rejected_harmonics_mediate_nothing(self):
        arr = QubitArray(rows=1, cols=2, f_q=(3e9, 6e9))
        spec = spectrum_with({1: 0.3})
        # force rejection of every harmonic
        spec = HarmonicSpectrum(
            n=spec.n, f_hz=spec.f_hz, r=spec.r, t=spec.t, theta_r=spec.theta_r,
            power_r=spec.power_r, power_t=spec.power_t,
            rejected=np.ones(len(spec.n), dtype=bool),
        )
        g = polychromatic_graph(arr, spec, CouplingMapConfig(g_ms=G_HZ),
                                omega_s=2 * np.pi * 3e9)
        assert g.edges == ()

    def test_empty_spectrum_rejected(self):
        arr = array(2)
        empty = HarmonicSpectrum(
            n=np.array([], dtype=int), f_hz=np.array([]), r=np.array([]),
            t=np.array([]), theta_r=np.array([]), power_r=np.array([]),
            power_t=np.array([]), rejected=np.array([], dtype=bool),
        )
        with pytest.raises(ValidationError):
            polychromatic_graph(arr, empty, CouplingMapConfig(g_ms=G_HZ), 1.0)

    def test_no_self_edges(self):
        with pytest.raises(ValidationError):
            CouplingEdge(a=1, b=1, harmonic=0, g_hz=1.0, delta_omega=0.0)


class TestHamiltonian:
    def test_resonant_two_qubit_block(self):
        g = monochromatic_graph(array(2))
        h = hamiltonian_at(g, array(2), 0.0)
        assert h[0, 0] == h[1, 1] == 0.0
        assert h[0, 1] == pytest.approx(G_RAD)

    def test_hermitian_at_all_times(self):
        arr = QubitArray(rows=1, cols=3, f_q=(3e9, 6e9, 9e9))
        edges = (CouplingEdge(0, 1, 1, G_HZ, 1.7e6),
                 CouplingEdge(0, 2, 2, G_HZ / 2, -2.3e6))
        g = CouplingGraph(edges=edges)
        for t in (0.0, 1.3e-9, 7.7e-8):
            for frame in ("lab", "rotating"):
                h = hamiltonian_at(g, arr, t, frame=frame)
                assert np.abs(h - h.conj().T).max() == 0.0

    def test_detuned_entry_rotates(self):
        delta = 2 * np.pi * 4e6
        g = CouplingGraph(edges=(CouplingEdge(0, 1, 0, G_HZ, delta),))
        arr = array(2)
        period = 2 * np.pi / delta
        h0 = hamiltonian_at(g, arr, 0.0)
        hq = hamiltonian_at(g, arr, period / 4)
        hh = hamiltonian_at(g, arr, period / 2)
        assert h0[0, 1] == pytest.approx(G_RAD)
        assert hq[0, 1] == pytest.approx(1j * G_RAD)
        assert hh[0, 1] == pytest.approx(-G_RAD)

    def test_full_hilbert_dimension_cap(self):
        arr = QubitArray(rows=1, cols=13, f_q=(5e9,) * 13, g0=G_HZ)
        g = monochromatic_graph(arr)
        with pytest.raises(ValidationError):
            hamiltonian_at(g, arr, 0.0, basis="full_hilbert")


class TestEvolve:
    def test_resonant_rabi_full_transfer(self):
        arr = array(2)
        g = monochromatic_graph(arr)
        st0 = PureState.excitation(2, 0)
        traj = evolve(st0, g, arr, np.pi / (2 * G_RAD))
        p = traj.populations(arr)[-1]
        assert p[1] == pytest.approx(1.0, abs=1e-6)

    def test_rabi_quarter_period(self):
        arr = array(2)
        g = monochromatic_graph(arr)
        traj = evolve(PureState.excitation(2, 0), g, arr, np.pi / (4 * G_RAD))
        p = traj.populations(arr)[-1]
        assert p[0] == pytest.approx(0.5, abs=1e-6)
        assert p[1] == pytest.approx(0.5, abs=1e-6)

    def test_detuned_generalized_rabi(self):
        delta = 2 * np.pi * 8e6
        arr = array(2)
        g = CouplingGraph(edges=(CouplingEdge(0, 1, 0, G_HZ, delta),))
        omega = np.sqrt(G_RAD**2 + delta**2 / 4)
        traj = evolve(PureState.excitation(2, 0), g, arr, np.pi / omega,
                      dt=np.pi / omega / 5000)
        pmax = traj.populations(arr)[:, 1].max()
        assert pmax == pytest.approx(G_RAD**2 / (G_RAD**2 + delta**2 / 4), abs=1e-6)

    def test_static_graphs_match_dense_exponential(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(2, 5))
            arr = array(n)
            pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
            edges = tuple(
                CouplingEdge(a, b, 0, float(rng.uniform(1e6, 1e7)), 0.0)
                for a, b in pairs if rng.random() < 0.7
            )
            if not edges:
                continue
            g = CouplingGraph(edges=edges)
            t_final = float(rng.uniform(2e-8, 2e-7))
            traj = evolve(PureState.excitation(n, 0), g, arr, t_final)
            h = hamiltonian_at(g, arr, 0.0, frame="rotating")
            ref = expm(-1j * h * t_final) @ PureState.excitation(n, 0).amplitudes
            assert np.abs(traj.states[-1] - ref).max() < 1e-8

    def test_norm_conserved(self):
        arr = QubitArray(rows=1, cols=3, f_q=(3e9, 6e9, 9e9))
        edges = (CouplingEdge(0, 1, 1, G_HZ, 2.1e6),
                 CouplingEdge(1, 2, 1, G_HZ, -1.3e6))
        g = CouplingGraph(edges=edges)
        traj = evolve(PureState.excitation(3, 0), g, arr, 3e-7)
        norms = np.sum(np.abs(traj.states) ** 2, axis=1)
        assert np.abs(norms - 1.0).max() < 1e-10

    def test_frames_agree_on_populations(self):
        arr = QubitArray(rows=1, cols=2, f_q=(3e9, 6e9))
        g = CouplingGraph(edges=(CouplingEdge(0, 1, 1, G_HZ, 0.0),))
        t_final = np.pi / (2 * G_RAD)
        dt = t_final / 60000
        p_rot = evolve(PureState.excitation(2, 0), g, arr, t_final, dt=dt,
                       frame="rotating").populations(arr)[-1]
        p_lab = evolve(PureState.excitation(2, 0), g, arr, t_final, dt=dt,
                       frame="lab").populations(arr)[-1]
        assert np.abs(p_rot - p_lab).max() < 1e-8

    def test_full_hilbert_excitation_number_conserved(self):
        arr = QubitArray(rows=1, cols=3, f_q=(5e9,) * 3, g0=G_HZ)
        g = monochromatic_graph(arr)
        st0 = PureState.excitation(3, 1, basis="full_hilbert")
        traj = evolve(st0, g, arr, 2e-7)
        for k in range(len(traj.times)):
            st = PureState(basis="full_hilbert", amplitudes=traj.states[k])
            assert total_excitation(st) == pytest.approx(1.0, abs=1e-8)

    def test_step_size_guard(self):
        arr = array(2)
        g = monochromatic_graph(arr)
        with pytest.raises(ValidationError):
            evolve(PureState.excitation(2, 0), g, arr, 1e-6, dt=1e-6)

    def test_full_vs_single_excitation_agree(self):
        arr = QubitArray(rows=1, cols=3, f_q=(5e9,) * 3, g0=G_HZ)
        g = monochromatic_graph(arr)
        t_final = 1.1e-7
        p_single = evolve(PureState.excitation(3, 0), g, arr,
                          t_final).populations(arr)[-1]
        p_full = evolve(PureState.excitation(3, 0, basis="full_hilbert"), g, arr,
                        t_final).populations(arr)[-1]
        assert np.abs(p_single - p_full).max() < 1e-8


class TestStatesAndReadout:
    def test_basis_state_readout(self):
        p = excitation_probabilities(PureState.excitation(5, 0))
        assert np.array_equal(p, [1, 0, 0, 0, 0])

    def test_equal_superposition_readout(self):
        amps = np.zeros(4, dtype=complex)
        amps[1] = amps[2] = 1 / np.sqrt(2)
        p = excitation_probabilities(PureState(basis="single_excitation",
                                               amplitudes=amps))
        assert np.allclose(p, [0, 0.5, 0.5, 0])

    def test_norm_validation(self):
        with pytest.raises(ValidationError):
            PureState(basis="single_excitation", amplitudes=np.array([1.0, 1.0]))

    def test_full_hilbert_cap(self):
        with pytest.raises(ValidationError):
            PureState.excitation(13, 0, basis="full_hilbert")

    def test_single_excitation_probabilities_sum_to_one(self):
        rng = np.random.default_rng(3)
        amps = rng.normal(size=6) + 1j * rng.normal(size=6)
        amps /= np.linalg.norm(amps)
        p = excitation_probabilities(PureState(basis="single_excitation",
                                               amplitudes=amps))
        assert p.sum() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    t=st.floats(0.0, 1e-6),
    g=st.floats(1e5, 1e7),
    delta=st.floats(-1e7, 1e7),
)
def test_hermiticity_property(t, g, delta):
    arr = QubitArray(rows=1, cols=2, f_q=(4e9, 7e9))
    graph = CouplingGraph(edges=(CouplingEdge(0, 1, 1, g, delta),))
    for frame in ("lab", "rotating"):
        h = hamiltonian_at(graph, arr, t, frame=frame)
        assert np.abs(h - h.conj().T).max() == 0.0
