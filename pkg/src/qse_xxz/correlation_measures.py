"""Concurrence, discord, CHSH violation and bond-strength difference.

Each quantity comes in a general form that works on a density matrix and a
form written in the steering-ellipsoid semiaxes; the two are cross-checked
in the test-suite.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .steering_ellipsoid import ellipsoid_for_A
from .two_qubit_state import SIGMA_Y, InvalidStateError, TwoQubitState, decompose, partial_trace

__all__ = [
    "MeasureReport",
    "ChshSearchResult",
    "concurrence",
    "concurrence_from_semiaxes",
    "binary_entropy",
    "von_neumann_entropy",
    "discord_bell_diagonal",
    "chsh_measure",
    "chsh_closed_form",
    "chsh_brute_force",
    "chsh_axis_pair",
    "bond_strength_difference",
]

_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class MeasureReport:
    concurrence: float
    discord: float
    chsh: float
    bond_strength_diff: float | None


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    lam, vec = np.linalg.eigh(0.5 * (m + m.conj().T))
    lam = np.clip(lam, 0.0, None)
    return (vec * np.sqrt(lam)) @ vec.conj().T


def concurrence(state: TwoQubitState) -> float:
    """Wootters concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are square roots of the eigenvalues of ``rho rho~`` with
    ``rho~ = (sy x sy) rho* (sy x sy)``.  They are obtained as the singular
    values of ``sqrt(rho) sqrt(rho~)``, which keeps small ones accurate.
    """
    rho = state.rho
    flipped = _YY @ rho.conj() @ _YY
    lam = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(flipped), compute_uv=False)
    lam = np.sort(lam)[::-1]
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def concurrence_from_semiaxes(delta: float, s) -> float:
    """Concurrence of the XXZ two-site state written in its semiaxes."""
    if delta <= -1:
        return 0.0
    s = np.asarray(s, dtype=float)
    return float((s.sum() - 1.0) / 2.0)


def binary_entropy(g: float) -> float:
    """``h(g)`` of the outcome distribution ``((1+g)/2, (1-g)/2)``, in bits.

    Decreasing on [0, 1] from h(0) = 1 to h(1) = 0.
    """
    if not -1e-12 <= g <= 1 + 1e-12:
        raise ValueError(f"g must lie in [0, 1], got {g!r}")
    g = min(max(g, 0.0), 1.0)
    out = 0.0
    for p in ((1 + g) / 2, (1 - g) / 2):
        if p > 0:
            out -= p * math.log2(p)
    return out


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in bits."""
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))


def discord_bell_diagonal(state: TwoQubitState, atol: float = 1e-9) -> float:
    """Quantum discord with the measurement on qubit B, for a = b = 0 states.

    The minimal conditional entropy is ``min_i h(s_i) = h(max_i s_i)`` over
    the steering-ellipsoid semiaxes.

    Raises
    ------
    InvalidStateError
        If either local Bloch vector is nonzero beyond ``atol``.
    """
    form = decompose(state)
    if not form.is_bell_diagonal(atol):
        raise InvalidStateError("closed-form discord needs vanishing local Bloch vectors")
    s_max = float(ellipsoid_for_A(form).semiaxes.max())
    cond = binary_entropy(min(s_max, 1.0))
    q = cond + von_neumann_entropy(partial_trace(state, "B")) - von_neumann_entropy(state.rho)
    return 0.0 if -1e-12 < q < 0.0 else q


# -- CHSH ------------------------------------------------------------------------


def chsh_closed_form(s) -> float:
    """``2 max(sqrt(s1^2+s2^2), sqrt(s1^2+s3^2), sqrt(s2^2+s3^2))``."""
    s1, s2, s3 = (float(v) for v in s)
    return 2.0 * max(math.hypot(s1, s2), math.hypot(s1, s3), math.hypot(s2, s3))


def chsh_axis_pair(s) -> tuple[int, int]:
    """Indices of the semiaxis pair that maximizes the closed form.

    Ties go to the lexicographically first pair among (0,1), (0,2), (1,2).
    """
    s = [float(v) for v in s]
    pairs = [(0, 1), (0, 2), (1, 2)]
    vals = [math.hypot(s[i], s[j]) for i, j in pairs]
    best = max(vals)
    for pair, v in zip(pairs, vals):
        if v >= best * (1 - 1e-12):
            return pair
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class ChshSearchResult:
    value: float
    converged: bool
    m1: np.ndarray
    m2: np.ndarray
    n1: np.ndarray
    n2: np.ndarray


def _unit(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _chsh_value(angles: np.ndarray, t: np.ndarray) -> float:
    m1, m2, n1, n2 = (_unit(angles[2 * k], angles[2 * k + 1]) for k in range(4))
    # <(m.s) x (n.s)> = m^T T n
    return float(m1 @ t @ (n1 + n2) + m2 @ t @ (n1 - n2))


def chsh_brute_force(
    state: TwoQubitState, n_starts: int = 32, seed: int = 0, tol: float = 1e-10
) -> ChshSearchResult:
    """Maximize ``|<B_CHSH>|`` over four measurement directions.

    Multi-start BFGS over the eight polar/azimuthal angles.  Works for any
    state; if no start converges a ``RuntimeWarning`` is issued and the best
    value found is still returned, with ``converged=False``.
    """
    t = decompose(state).t
    rng = np.random.default_rng(seed)
    best = None
    any_converged = False
    for _ in range(n_starts):
        x0 = rng.uniform(0.0, 2.0 * math.pi, size=8)
        # maximizing B suffices: (m1, m2) -> (-m1, -m2) flips its sign
        res = optimize.minimize(lambda a: -_chsh_value(a, t), x0, method="BFGS", options={"gtol": tol})
        # BFGS often stops on precision loss at the optimum; a flat gradient counts
        any_converged |= bool(res.success) or float(np.linalg.norm(res.jac)) < 1e-6
        if best is None or -res.fun > best[0]:
            best = (-res.fun, res.x)
    value, angles = best
    if not any_converged:
        warnings.warn("CHSH optimizer did not converge; returning best value found", RuntimeWarning, stacklevel=2)
    vecs = [_unit(angles[2 * k], angles[2 * k + 1]) for k in range(4)]
    return ChshSearchResult(abs(value), any_converged, *vecs)


def chsh_measure(state: TwoQubitState, method: str = "closed") -> float:
    """Maximal CHSH violation.

    ``method='closed'`` uses the semiaxis formula and requires a state with
    vanishing local Bloch vectors; ``method='brute'`` optimizes directly and
    accepts any state.
    """
    if method == "brute":
        return chsh_brute_force(state).value
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    form = decompose(state)
    if not form.is_bell_diagonal():
        raise InvalidStateError("closed-form CHSH measure needs vanishing local Bloch vectors")
    return chsh_closed_form(ellipsoid_for_A(form).semiaxes)


def bond_strength_difference(delta: float, s) -> float:
    """Difference of bond strength near the first-order point.

    ``s`` are the direction-labelled semiaxes (s_x, s_y, s_z); sorted lengths
    would swap the roles of the axes in the ferromagnetic phase.

    Raises
    ------
    ValueError
        For ``delta >= 0``, outside the range the expression covers.
    """
    if delta >= 0:
        raise ValueError("bond-strength difference is only defined for Delta < 0")
    sx, sy, sz = (float(v) for v in s)
    if delta < -1:
        return -0.25 * (sx + sy - sz)
    return -0.25 * (sx + sy + sz)
