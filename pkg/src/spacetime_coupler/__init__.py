"""Space-time modulated reflector and polychromatic qubit-coupling simulator.

The package models a traveling-wave-modulated Josephson metasurface as a
frequency-converting reflector, maps its harmonic reflection spectrum onto
couplings between superconducting qubits at distinct frequencies, and
evaluates the resulting connectivity, coherence, noise and fidelity
figures of merit.
"""

from .errors import ConvergenceError, NumericalError, ValidationError
from .floquet import (
    HarmonicSpectrum,
    IncidentWave,
    SolverConfig,
    analytic_slab_amplitudes,
    bloch_modes,
    convergence_study,
    harmonic_angles,
    harmonic_frequencies,
    solve_converged,
    solve_slab,
)
from .modulation import (
    ModulationProfile,
    convergent_order,
    fourier_coefficients,
    inductance_at,
)
from .qubits import (
    CouplingEdge,
    CouplingGraph,
    CouplingMapConfig,
    PureState,
    QubitArray,
    coupling_decay,
    evolve,
    excitation_probabilities,
    hamiltonian_at,
    monochromatic_graph,
    polychromatic_graph,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "NumericalError",
    "ValidationError",
    "HarmonicSpectrum",
    "IncidentWave",
    "SolverConfig",
    "analytic_slab_amplitudes",
    "bloch_modes",
    "convergence_study",
    "harmonic_angles",
    "harmonic_frequencies",
    "solve_converged",
    "solve_slab",
    "ModulationProfile",
    "convergent_order",
    "fourier_coefficients",
    "inductance_at",
    "CouplingEdge",
    "CouplingGraph",
    "CouplingMapConfig",
    "PureState",
    "QubitArray",
    "coupling_decay",
    "evolve",
    "excitation_probabilities",
    "hamiltonian_at",
    "monochromatic_graph",
    "polychromatic_graph",
    "__version__",
]
