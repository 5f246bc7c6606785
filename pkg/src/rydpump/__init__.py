"""Dissipative entanglement pumping in driven Rydberg chains.

Simulation toolkit covering: staggered-chain geometry and power-law pair
shifts, the microscopic driven-dissipative model and its single-excitation
effective theory, master-equation and stochastic-wavefunction dynamics,
W-state uncertainty witnessing with producibility boundaries, and dark-state
finite-size scaling.
"""

__version__ = "0.1.0"

from ._kernels import USING_NUMBA
from .lattice import LatticeSpec, blockade_radius, build_positions, pair_shift
from .hamiltonians import DriveConfig, EffectiveModel, build_effective_model
from .states import QuantumState, make_w_state, partial_trace
from .entanglement import build_w_basis, concurrence, fidelity, witness

__all__ = [
    "__version__",
    "USING_NUMBA",
    "LatticeSpec",
    "DriveConfig",
    "EffectiveModel",
    "QuantumState",
    "blockade_radius",
    "build_positions",
    "build_effective_model",
    "build_w_basis",
    "concurrence",
    "fidelity",
    "make_w_state",
    "pair_shift",
    "partial_trace",
    "witness",
]
