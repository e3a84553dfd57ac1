"""Two-qubit density matrices and their Pauli (Theta) representation.

Basis order is |00>, |01>, |10>, |11> with qubit A as the left tensor
factor; sigma_z = diag(1, -1), so |0> is spin up.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tolerances as tol

__all__ = [
    "PAULI",
    "InvalidStateError",
    "TwoQubitState",
    "PauliForm",
    "decompose",
    "reconstruct",
    "partial_trace",
    "partial_transpose_B",
    "bloch_vector",
    "random_state",
]

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)

# sigma^mu (x) sigma^nu for all mu, nu; shape (4, 4, 4, 4)
_PAULI_PRODUCTS = np.array([[np.kron(p, q) for q in PAULI] for p in PAULI])


class InvalidStateError(ValueError):
    """Raised when a matrix is not a valid (physical) two-qubit state."""


def _check_density_matrix(rho: np.ndarray, dim: int) -> None:
    if rho.shape != (dim, dim):
        raise InvalidStateError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidStateError("matrix has non-finite entries")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > tol.HERMITIAN_TOL:
        raise InvalidStateError(f"matrix is not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > tol.TRACE_TOL:
        raise InvalidStateError(f"trace is {tr.real:.15g}, expected 1")
    lam_min = np.linalg.eigvalsh(rho).min()
    if lam_min < -tol.PSD_TOL:
        raise InvalidStateError(f"matrix is not positive semidefinite (min eigenvalue {lam_min:.3e})")


@dataclass(frozen=True)
class TwoQubitState:
    """Validated 4x4 density matrix.

    The constructor copies ``rho`` and freezes the copy, so instances are
    safe to share between threads.
    """

    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex, copy=True)
        _check_density_matrix(rho, 4)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def from_ket(cls, psi) -> TwoQubitState:
        psi = np.asarray(psi, dtype=complex).reshape(4)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @classmethod
    def product(cls, rho_a, rho_b) -> TwoQubitState:
        return cls(np.kron(np.asarray(rho_a, dtype=complex), np.asarray(rho_b, dtype=complex)))


@dataclass(frozen=True)
class PauliForm:
    """Real 4x4 matrix ``theta[mu, nu] = tr(rho sigma^mu (x) sigma^nu)``.

    Block layout is ``[[1, b^T], [a, T]]``: the first column below the corner
    is A's Bloch vector, the first row right of the corner is B's.
    """

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float, copy=True)
        if theta.shape != (4, 4):
            raise InvalidStateError(f"theta must be 4x4, got shape {theta.shape}")
        if abs(theta[0, 0] - 1) > tol.TRACE_TOL:
            raise InvalidStateError(f"theta[0, 0] must be 1, got {theta[0, 0]!r}")
        for name, vec in (("a", theta[1:, 0]), ("b", theta[0, 1:])):
            if np.linalg.norm(vec) > 1 + tol.BLOCH_TOL:
                raise InvalidStateError(f"Bloch vector {name} is longer than 1")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_blocks(cls, a, b, t) -> PauliForm:
        theta = np.empty((4, 4))
        theta[0, 0] = 1.0
        theta[1:, 0] = a
        theta[0, 1:] = b
        theta[1:, 1:] = t
        return cls(theta)

    @property
    def a(self) -> np.ndarray:
        return self.theta[1:, 0]

    @property
    def b(self) -> np.ndarray:
        return self.theta[0, 1:]

    @property
    def t(self) -> np.ndarray:
        return self.theta[1:, 1:]

    def swapped(self) -> PauliForm:
        """Relabel A <-> B (a -> b, b -> a, T -> T^T)."""
        return PauliForm(self.theta.T)

    def is_bell_diagonal(self, atol: float = 1e-9) -> bool:
        """True when both local Bloch vectors vanish."""
        return bool(np.all(np.abs(self.a) <= atol) and np.all(np.abs(self.b) <= atol))


def decompose(state: TwoQubitState) -> PauliForm:
    """Pauli decomposition of a two-qubit state."""
    if not isinstance(state, TwoQubitState):
        state = TwoQubitState(state)
    # tr(rho P) = sum_ij rho_ij P_ji
    theta = np.einsum("ij,mnji->mn", state.rho, _PAULI_PRODUCTS).real
    theta[0, 0] = 1.0
    return PauliForm(theta)


def reconstruct(form: PauliForm, check_psd: bool = True) -> TwoQubitState | np.ndarray:
    """Inverse of :func:`decompose`.

    With ``check_psd=False`` the raw 4x4 matrix is returned without physical
    validation, which is handy for probing candidate forms.
    """
    rho = 0.25 * np.einsum("mn,mnij->ij", form.theta, _PAULI_PRODUCTS)
    if not check_psd:
        return rho
    return TwoQubitState(rho)


def partial_trace(state: TwoQubitState, keep: str) -> np.ndarray:
    """Reduced 2x2 density matrix of qubit ``keep`` ('A' or 'B')."""
    r = state.rho.reshape(2, 2, 2, 2)
    key = keep.upper()
    if key == "A":
        return np.einsum("ijkj->ik", r)
    if key == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_transpose_B(state: TwoQubitState | np.ndarray) -> np.ndarray:
    """Transpose on Bob's indices only: <ij|rho|kl> -> <il|rho|kj>."""
    rho = state.rho if isinstance(state, TwoQubitState) else np.asarray(state)
    return rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def bloch_vector(rho_1: np.ndarray) -> np.ndarray:
    """Bloch vector of a single-qubit density matrix."""
    return np.array([np.trace(rho_1 @ p).real for p in PAULI[1:]])


def random_state(rng: np.random.Generator, rank: int = 4) -> TwoQubitState:
    """Random state ``G G^dagger / tr`` from a complex Gaussian 4 x rank ``G``."""
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return TwoQubitState(rho / np.trace(rho).real)
