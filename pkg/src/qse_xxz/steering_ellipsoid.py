"""Quantum steering ellipsoid of a two-qubit state.

For Alice's side the ellipsoid has center ``c = (a - T b) / (1 - b^2)`` and
matrix

    Q = (T - a b^T) (I + b b^T / (1 - b^2)) (T^T - b a^T) / (1 - b^2),

whose eigenvalues are the squared semiaxis lengths.  Bob's ellipsoid follows
from the relabelling a <-> b, T -> T^T.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from . import tolerances as tol
from .two_qubit_state import PauliForm, TwoQubitState, decompose, partial_transpose_B

__all__ = [
    "ENTANGLEMENT_VOLUME_BOUND",
    "SteeringEllipsoid",
    "Shape",
    "ShapeClass",
    "ellipsoid_for_A",
    "ellipsoid_for_B",
    "steered_state",
    "surface_residual",
    "volume",
    "classify_shape",
    "exceeds_entanglement_volume_bound",
]

#: Volume above which a two-qubit state is necessarily entangled.
ENTANGLEMENT_VOLUME_BOUND = 4 * math.pi / 81


@dataclass(frozen=True)
class SteeringEllipsoid:
    """Center, matrix and principal axes of a steering ellipsoid.

    ``semiaxes`` are sorted in descending order and ``axes[:, i]`` is the unit
    direction of ``semiaxes[i]``.  ``degenerate`` marks the single-point
    ellipsoid of a state whose steering-side Bloch vector has unit length.
    """

    center: np.ndarray
    q_matrix: np.ndarray
    semiaxes: np.ndarray
    axes: np.ndarray
    volume: float
    degenerate: bool = False

    def q_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of Q, descending, with roundoff negatives clamped to 0."""
        q = np.linalg.eigvalsh(self.q_matrix)[::-1]
        return np.where((q < 0) & (q >= -tol.CLAMP_TOL), 0.0, q)

    def labelled_semiaxes(self) -> np.ndarray:
        """Semiaxis length along each Cartesian direction, (s_x, s_y, s_z).

        Only meaningful when the principal axes line up with the coordinate
        axes (e.g. for diagonal Q); otherwise the Cartesian half-widths are
        returned, sqrt(Q_ii).
        """
        return np.sqrt(np.clip(np.diag(self.q_matrix), 0.0, None))


def _canonical_signs(u: np.ndarray) -> np.ndarray:
    # flip each column so its largest-magnitude component is positive
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs


def _ellipsoid(a: np.ndarray, b: np.ndarray, t: np.ndarray) -> SteeringEllipsoid:
    b2 = float(b @ b)
    if math.sqrt(b2) >= 1 - tol.DEGENERATE_B_TOL:
        return SteeringEllipsoid(
            center=np.array(a, dtype=float),
            q_matrix=np.zeros((3, 3)),
            semiaxes=np.zeros(3),
            axes=np.eye(3),
            volume=0.0,
            degenerate=True,
        )
    one_minus = 1.0 - b2
    left = t - np.outer(a, b)
    center = (a - t @ b) / one_minus
    q = left @ (np.eye(3) + np.outer(b, b) / one_minus) @ left.T / one_minus
    q = 0.5 * (q + q.T)

    # Q = M M^T with M = left K^(1/2) / sqrt(1 - b^2).  Singular values of M
    # keep relative accuracy on short axes that eig(Q) would lose to squaring.
    if b2 > 0.0:
        k_half = np.eye(3) + (1.0 / math.sqrt(one_minus) - 1.0) * np.outer(b, b) / b2
    else:
        k_half = np.eye(3)
    m = left @ k_half / math.sqrt(one_minus)
    u, s, _ = np.linalg.svd(m)
    return SteeringEllipsoid(
        center=center,
        q_matrix=q,
        semiaxes=s,
        axes=_canonical_signs(u),
        volume=4.0 * math.pi / 3.0 * float(np.prod(s)),
        degenerate=False,
    )


def _as_form(obj) -> PauliForm:
    if isinstance(obj, PauliForm):
        return obj
    return decompose(obj if isinstance(obj, TwoQubitState) else TwoQubitState(obj))


def ellipsoid_for_A(form: PauliForm | TwoQubitState) -> SteeringEllipsoid:
    """Alice's steering ellipsoid (states A is steered to by measuring B)."""
    form = _as_form(form)
    return _ellipsoid(form.a, form.b, form.t)


def ellipsoid_for_B(form: PauliForm | TwoQubitState) -> SteeringEllipsoid:
    """Bob's steering ellipsoid."""
    form = _as_form(form)
    return _ellipsoid(form.b, form.a, form.t.T)


def steered_state(form: PauliForm | TwoQubitState, x) -> np.ndarray:
    """Bloch vector of A after B's measurement outcome with vector ``x``.

    Raises
    ------
    ValueError
        If ``|x| > 1`` or the outcome has vanishing probability
        (``1 + b.x`` close to zero).
    """
    form = _as_form(form)
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) > 1 + 1e-12:
        raise ValueError("measurement vector must satisfy |x| <= 1")
    denom = 1.0 + float(form.b @ x)
    if denom <= 1e-12:
        raise ValueError(f"steering outcome is unnormalizable (1 + b.x = {denom:.3e})")
    return (form.a + form.t @ x) / denom


def surface_residual(e: SteeringEllipsoid, point) -> float:
    """How far ``point`` is from lying on the ellipsoid surface.

    Zero for points on the surface.  Along collapsed axes the point's offset
    is added directly, so flat and needle ellipsoids are handled too.
    """
    y = e.axes.T @ (np.asarray(point, dtype=float) - e.center)
    live = e.semiaxes > 1e-12
    if not np.any(live):
        return float(np.linalg.norm(y))
    quad = float(np.sum((y[live] / e.semiaxes[live]) ** 2))
    return abs(quad - 1.0) + float(np.sum(np.abs(y[~live])))


def volume(state: TwoQubitState, side: str = "A", return_degenerate: bool = False):
    """Ellipsoid volume from determinants of the state and its partial transpose.

    ``64 pi / 3 * |det rho - det rho^{T_B}| / (1 - b^2)^2`` for Alice; for Bob
    ``b`` is replaced by ``a``.  When the conditioning Bloch vector has unit
    length the ellipsoid is a point and 0 is returned; pass
    ``return_degenerate=True`` to also get the flag.
    """
    if not isinstance(state, TwoQubitState):
        state = TwoQubitState(state)
    form = decompose(state)
    if side.upper() == "A":
        cond = form.b
    elif side.upper() == "B":
        cond = form.a
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    n2 = float(cond @ cond)
    degenerate = math.sqrt(n2) >= 1 - tol.DEGENERATE_B_TOL
    if degenerate:
        v = 0.0
    else:
        det_diff = np.linalg.det(state.rho) - np.linalg.det(partial_transpose_B(state))
        v = 64.0 * math.pi / 3.0 * abs(det_diff.real) / (1.0 - n2) ** 2
    return (v, degenerate) if return_degenerate else v


class Shape(str, Enum):
    POINT = "point"
    SPHERE = "sphere"
    NEEDLE = "needle"
    OBLATE = "oblate"
    PROLATE = "prolate"
    TRIAXIAL = "triaxial"


@dataclass(frozen=True)
class ShapeClass:
    shape: Shape
    tolerance: float

    @property
    def name(self) -> str:
        return self.shape.value

    def __str__(self) -> str:
        return self.shape.value

    def __eq__(self, other):
        if isinstance(other, str):
            return self.shape.value == other
        if isinstance(other, ShapeClass):
            return self.shape is other.shape and self.tolerance == other.tolerance
        return NotImplemented

    def __hash__(self):
        return hash((self.shape, self.tolerance))


def classify_shape(e: SteeringEllipsoid | Sequence[float], eps: float = tol.SHAPE_TOL) -> ShapeClass:
    """Classify an ellipsoid (or three semiaxis lengths) by shape.

    Comparisons are relative to the longest semiaxis.  The tests run in the
    order point, sphere, needle, oblate, prolate; anything left is triaxial.
    """
    if isinstance(e, SteeringEllipsoid):
        if e.degenerate:
            return ShapeClass(Shape.POINT, eps)
        s = e.semiaxes
    else:
        s = np.asarray(e, dtype=float)
    s1, s2, s3 = sorted((abs(float(v)) for v in s), reverse=True)
    if s1 <= eps:
        return ShapeClass(Shape.POINT, eps)
    scale = eps * max(s1, 1e-300)
    if s1 - s3 <= scale:
        shape = Shape.SPHERE
    elif s2 <= scale:
        shape = Shape.NEEDLE
    elif s1 - s2 <= scale:
        shape = Shape.OBLATE
    elif s2 - s3 <= scale:
        shape = Shape.PROLATE
    else:
        shape = Shape.TRIAXIAL
    return ShapeClass(shape, eps)


def exceeds_entanglement_volume_bound(v: float) -> bool:
    """True iff ``v > 4 pi / 81``, which certifies entanglement."""
    if v < 0:
        raise ValueError("volume must be nonnegative")
    return v > ENTANGLEMENT_VOLUME_BOUND
