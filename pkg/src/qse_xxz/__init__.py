"""Quantum steering ellipsoids of the spin-1/2 XXZ chain ground state."""

from .correlation_measures import (
    bond_strength_difference,
    chsh_measure,
    concurrence,
    discord_bell_diagonal,
)
from .steering_ellipsoid import (
    ENTANGLEMENT_VOLUME_BOUND,
    SteeringEllipsoid,
    classify_shape,
    ellipsoid_for_A,
    ellipsoid_for_B,
    steered_state,
    volume,
)
from .two_qubit_state import InvalidStateError, PauliForm, TwoQubitState, decompose, reconstruct
from .xxz_model import correlators, ground_energy, nn_density_matrix, semiaxes

__version__ = "0.1.0"

__all__ = [
    "ENTANGLEMENT_VOLUME_BOUND",
    "InvalidStateError",
    "PauliForm",
    "SteeringEllipsoid",
    "TwoQubitState",
    "bond_strength_difference",
    "chsh_measure",
    "classify_shape",
    "concurrence",
    "correlators",
    "decompose",
    "discord_bell_diagonal",
    "ellipsoid_for_A",
    "ellipsoid_for_B",
    "ground_energy",
    "nn_density_matrix",
    "reconstruct",
    "semiaxes",
    "steered_state",
    "volume",
]
