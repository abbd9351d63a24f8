import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacetime_coupler import (
    CouplingEdge,
    CouplingGraph,
    QubitArray,
    ValidationError,
    monochromatic_graph,
)
from spacetime_coupler.metrics import (
    CoherenceModel,
    DensityMatrix,
    NoiseModel,
    coherence_improvement,
    connectivity_ratio,
    effective_noise,
    entangled_fidelity,
    fidelity,
    fidelity_decay,
)


def all_to_all(n):
    edges = tuple(
        CouplingEdge(a, b, 1, 1e6, 0.0) for a in range(n) for b in range(a + 1, n)
    )
    return CouplingGraph(edges=edges)


class TestConnectivity:
    def test_4x4_grid_vs_all_to_all(self):
        arr = QubitArray(rows=4, cols=4, f_q=(5e9,) * 16, g0=1e6)
        rep = connectivity_ratio(monochromatic_graph(arr), all_to_all(16), d_mono=10.0)
        assert rep.pairs_mono == 24
        assert rep.pairs_poly == 120
        assert rep.c_ratio == 5.0
        assert rep.d_poly == 2.0

    def test_identical_graphs(self):
        arr = QubitArray(rows=2, cols=2, f_q=(5e9,) * 4, g0=1e6)
        g = monochromatic_graph(arr)
        rep = connectivity_ratio(g, g)
        assert rep.c_ratio == 1.0
        assert rep.d_poly == rep.d_mono

    def test_1x2_single_edge(self):
        arr = QubitArray(rows=1, cols=2, f_q=(5e9,) * 2, g0=1e6)
        g = monochromatic_graph(arr)
        assert connectivity_ratio(g, g).c_ratio == 1.0

    def test_multiplicity_excluded_from_ratio(self):
        g1 = CouplingGraph(edges=(CouplingEdge(0, 1, 0, 1e6, 0.0),))
        g2 = CouplingGraph(edges=(CouplingEdge(0, 1, 1, 1e6, 0.0),
                                  CouplingEdge(0, 1, 2, 5e5, 0.0)))
        rep = connectivity_ratio(g1, g2)
        assert rep.pairs_poly == 1
        assert rep.multiplicity_poly == 2
        assert rep.c_ratio == 1.0

    def test_empty_baseline_rejected(self):
        empty = CouplingGraph(edges=())
        with pytest.raises(ValidationError):
            connectivity_ratio(empty, all_to_all(3))


class TestCoherence:
    def test_no_separation(self):
        m = CoherenceModel(t2=2e-5, delta_f=0.0, gamma_dec=1e6)
        assert coherence_improvement(m) == 2e-5

    def test_arithmetic(self):
        # 2 pi delta_f = 2e6 rad/s against gamma = 1e6 rad/s triples T2
        m = CoherenceModel(t2=2e-5, delta_f=2e6 / (2 * np.pi), gamma_dec=1e6)
        assert coherence_improvement(m) == pytest.approx(6e-5)

    def test_large_gamma_limit(self):
        t2s = [
            coherence_improvement(CoherenceModel(t2=1e-5, delta_f=1e6, gamma_dec=g))
            for g in (1e6, 1e8, 1e12)
        ]
        assert t2s[0] > t2s[1] > t2s[2] > 1e-5

    def test_monotone_in_delta_f(self):
        vals = [
            coherence_improvement(CoherenceModel(t2=1e-5, delta_f=df, gamma_dec=1e6))
            for df in (0.0, 1e5, 1e6, 1e7)
        ]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ValidationError):
            CoherenceModel(t2=0.0, delta_f=1.0, gamma_dec=1.0)


class TestNoise:
    def model(self, sigma=1e9):
        return NoiseModel(s0=lambda w: 2.5e-12, sigma_bw=sigma)

    def test_on_frequency_untouched(self):
        assert effective_noise(self.model(), 1e9, 0.0) == pytest.approx(2.5e-12)

    def test_one_sigma(self):
        m = self.model()
        assert effective_noise(m, 1e9, 1e9) / 2.5e-12 == pytest.approx(
            np.exp(-0.5), rel=1e-12
        )

    def test_three_sigma(self):
        m = self.model()
        assert effective_noise(m, 1e9, 3e9) / 2.5e-12 == pytest.approx(
            np.exp(-4.5), rel=1e-12
        )

    def test_monotone_in_detuning(self):
        m = self.model()
        vals = [effective_noise(m, 1e9, d) for d in (0.0, 5e8, 1e9, 2e9)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_negative_density_rejected(self):
        m = NoiseModel(s0=lambda w: -1.0, sigma_bw=1e9)
        with pytest.raises(ValidationError):
            effective_noise(m, 1e9, 0.0)


def random_density_matrix(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return DensityMatrix(matrix=m / np.trace(m).real)


class TestFidelity:
    def test_self_fidelity(self):
        rng = np.random.default_rng(1)
        rho = random_density_matrix(rng, 4)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-10)

    def test_orthogonal_pure_states(self):
        rho = DensityMatrix.from_pure(np.array([1.0, 0.0]))
        sig = DensityMatrix.from_pure(np.array([0.0, 1.0]))
        assert fidelity(rho, sig) == pytest.approx(0.0, abs=1e-10)

    def test_half_overlap(self):
        rho = DensityMatrix.from_pure(np.array([1.0, 0.0]))
        sig = DensityMatrix.from_pure(np.array([1.0, 1.0]) / np.sqrt(2))
        assert fidelity(rho, sig) == pytest.approx(0.5, abs=1e-10)

    def test_pure_state_reduction(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = rng.normal(size=3) + 1j * rng.normal(size=3)
            b = rng.normal(size=3) + 1j * rng.normal(size=3)
            a /= np.linalg.norm(a)
            b /= np.linalg.norm(b)
            f = fidelity(DensityMatrix.from_pure(a), DensityMatrix.from_pure(b))
            assert f == pytest.approx(abs(np.vdot(a, b)) ** 2, abs=1e-10)

    def test_symmetry_and_bounds_randomized(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            dim = int(rng.integers(2, 5))
            rho = random_density_matrix(rng, dim)
            sig = random_density_matrix(rng, dim)
            f1 = fidelity(rho, sig)
            f2 = fidelity(sig, rho)
            assert abs(f1 - f2) < 1e-10
            assert 0.0 <= f1 <= 1.0

    def test_unity_only_for_equal_states(self):
        rng = np.random.default_rng(13)
        rho = random_density_matrix(rng, 3)
        sig = random_density_matrix(rng, 3)
        if np.abs(rho.matrix - sig.matrix).max() > 1e-8:
            assert fidelity(rho, sig) < 1.0 - 1e-10

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValidationError):
            fidelity(random_density_matrix(rng, 2), random_density_matrix(rng, 3))

    def test_invalid_density_matrix(self):
        with pytest.raises(ValidationError):
            DensityMatrix(matrix=np.array([[0.5, 0.5], [0.1, 0.5]]))
        with pytest.raises(ValidationError):
            DensityMatrix(matrix=np.array([[0.7, 0.0], [0.0, 0.7]]))


class TestDecayModels:
    def test_decay_endpoints(self):
        assert fidelity_decay(0.0, 1e-5) == 1.0
        assert fidelity_decay(1e-5, 1e-5) == pytest.approx(np.exp(-1))
        assert fidelity_decay(1e-5 * np.log(2), 1e-5) == pytest.approx(0.5)

    def test_entangled_endpoints(self):
        assert entangled_fidelity(0.9, 0.0, 1e-5) == pytest.approx(0.9)
        assert entangled_fidelity(0.99, 1e-5, 1e-5) == pytest.approx(
            0.99 * np.exp(-1)
        )

    def test_coherence_chain(self):
        # tripled T2 at t = T2: decay factor exp(-1/3) vs exp(-1)
        t2 = 2e-5
        t2p = coherence_improvement(
            CoherenceModel(t2=t2, delta_f=2e6 / (2 * np.pi), gamma_dec=1e6)
        )
        assert entangled_fidelity(1.0, t2, t2p) == pytest.approx(np.exp(-1 / 3))
        assert entangled_fidelity(1.0, t2, t2p) > fidelity_decay(t2, t2)

    def test_zero_separation_consistency(self):
        m = CoherenceModel(t2=1e-5, delta_f=0.0, gamma_dec=1e6)
        t2p = coherence_improvement(m)
        f0 = 0.97
        for t in (0.0, 3e-6, 1e-5):
            assert entangled_fidelity(f0, t, t2p) == f0 * fidelity_decay(t, m.t2)

    def test_validation(self):
        with pytest.raises(ValidationError):
            fidelity_decay(-1.0, 1e-5)
        with pytest.raises(ValidationError):
            entangled_fidelity(1.5, 0.0, 1e-5)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), dim=st.integers(2, 4))
def test_fidelity_property(seed, dim):
    rng = np.random.default_rng(seed)
    rho = random_density_matrix(rng, dim)
    sig = random_density_matrix(rng, dim)
    f = fidelity(rho, sig)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(fidelity(sig, rho), abs=1e-10)
