"""Thermodynamic-limit XXZ chain: ground-state energy and nearest-neighbour data.

The energy per site of ``H = sum_j Sx Sx + Sy Sy + Delta Sz Sz`` is taken from
the Bethe-ansatz solution::

    e(Delta) = -Delta/4                                         Delta <= -1
             = Delta/4 + sin(pi xi)/(2 pi) * I(xi)              -1 < Delta < 1
             = 1/4 - ln 2                                       Delta == 1

with ``Delta = cos(pi xi)`` and ``I(xi)`` the integral of
``coth(xi x) / sinh(x)`` along the line ``Im x = 1/2``.  For ``Delta > 1`` the
same expression is continued through ``xi -> i phi`` with
``Delta = cosh(pi phi)``, which turns the integrand into
``cot(phi x) / sinh(x)`` and the prefactor into ``sinh(pi phi) / (2 pi)``.

The ferromagnetic branch is used exactly as written above (``-Delta/4``).  It
gives ``<sz sz> = -1`` where a direct diagonalization of ``H`` gives ``+1``;
only magnitudes enter the ellipsoid, so shapes and volumes are unaffected.

Nearest-neighbour correlators follow from the energy:
``<sz sz> = 4 de/dDelta`` and ``<sx sx> = <sy sy> = (4 e - Delta <sz sz>) / 2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .two_qubit_state import TwoQubitState

__all__ = [
    "QuadratureError",
    "EnergyEvaluation",
    "CorrelatorTriple",
    "NNDensityParams",
    "phase",
    "ground_energy",
    "ground_energy_report",
    "energy_derivative",
    "zz_correlator",
    "xx_correlator",
    "correlators",
    "nn_params",
    "nn_density_matrix",
    "semiaxes",
]

FERRO = "ferromagnetic"
GAPLESS = "gapless"
ISOTROPIC = "isotropic"
ANTIFERRO = "antiferromagnetic"

E_ISOTROPIC = 0.25 - math.log(2.0)

#: Points closer than this to Delta = +-1 are evaluated at the offset itself.
ENERGY_CLAMP = 1e-6
#: Inside this distance of Delta = +-1 derivatives are taken one-sided.
DERIVATIVE_GUARD = 1e-3
#: Base step of the Richardson-extrapolated finite differences.
DERIVATIVE_STEP = 1e-4
#: Estimated quadrature error on e(Delta) above which evaluation fails.
MAX_ENERGY_ERROR = 1e-9

_CUTOFF = 1e-16


class QuadratureError(RuntimeError):
    """The contour integral could not be evaluated to the required accuracy."""


@dataclass(frozen=True)
class EnergyEvaluation:
    delta: float
    value: float
    abserr: float
    branch: str
    evaluated_at: float
    note: str = ""


@dataclass(frozen=True)
class CorrelatorTriple:
    """Nearest-neighbour ``<s^x s^x>``, ``<s^y s^y>``, ``<s^z s^z>`` (Pauli normalization)."""

    xx: float
    yy: float
    zz: float
    note: str = ""

    def as_array(self) -> np.ndarray:
        return np.array([self.xx, self.yy, self.zz])


@dataclass(frozen=True)
class NNDensityParams:
    u: float
    w: float
    y: float

    def matrix(self) -> np.ndarray:
        u, w, y = self.u, self.w, self.y
        return np.array(
            [
                [u, 0, 0, 0],
                [0, w, y, 0],
                [0, y, w, 0],
                [0, 0, 0, u],
            ],
            dtype=complex,
        )


def _check_delta(delta) -> float:
    d = float(delta)
    if not math.isfinite(d):
        raise ValueError(f"anisotropy must be finite, got {delta!r}")
    return d + 0.0  # folds -0.0 into 0.0 for the cache


def phase(delta: float) -> str:
    """Name of the phase (or critical point) at ``delta``."""
    d = _check_delta(delta)
    if d < -1:
        return FERRO
    if d == -1:
        return "first-order critical point"
    if d < 1:
        return GAPLESS
    if d == 1:
        return "Kosterlitz-Thouless point"
    return ANTIFERRO


# -- contour integrands on x = t + i/2 ---------------------------------------
# Written with expm1 so that neither large |t| nor small xi/phi overflows or
# cancels.


def _inv_sinh(x):
    return -2.0 * np.exp(-x) / np.expm1(-2.0 * x)


def _gapless_integrand(t, xi):
    x = np.asarray(t) + 0.5j
    coth = -(1.0 + np.exp(-2.0 * xi * x)) / np.expm1(-2.0 * xi * x)
    return coth * _inv_sinh(x)


def _massive_integrand(t, phi):
    x = np.asarray(t) + 0.5j
    cot = 1j * (np.exp(2j * phi * x) + 1.0) / np.expm1(2j * phi * x)
    return cot * _inv_sinh(x)


def _contour_integral(integrand, param) -> tuple[float, float]:
    """Integral of ``integrand`` over the whole line, as (value, error estimate).

    The integrand obeys f(-t) = conj(f(t)), so the imaginary part cancels and
    the real part is folded onto t >= 0.  That symmetry is checked on a grid
    before being relied upon.
    """
    upper = 20.0
    while abs(integrand(upper, param)) >= _CUTOFF:
        upper += 2.0
        if upper > 400:
            raise QuadratureError("integrand does not decay")

    nodes = np.linspace(0.0, upper, 41)
    fp = integrand(nodes, param)
    fm = integrand(-nodes, param)
    scale = max(1.0, float(np.max(np.abs(fp))))
    if np.max(np.abs(fm - np.conj(fp))) > 1e-12 * scale:
        raise QuadratureError("imaginary part of the contour integral does not cancel")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(
            lambda t: integrand(t, param).real, 0.0, upper, epsabs=1e-14, epsrel=1e-13, limit=500
        )
    return 2.0 * value, 2.0 * err


def _gapless_energy(d: float) -> tuple[float, float]:
    if d <= -1.0:
        return d / 4.0, 0.0  # xi = 1 limit, where the prefactor vanishes
    xi = math.acos(d) / math.pi
    pref = math.sqrt((1.0 - d) * (1.0 + d)) / (2.0 * math.pi)  # sin(pi xi) / (2 pi)
    val, err = _contour_integral(_gapless_integrand, xi)
    return d / 4.0 + pref * val, pref * err


def _massive_energy(d: float) -> tuple[float, float]:
    phi = math.acosh(d) / math.pi
    pref = math.sqrt((d - 1.0) * (d + 1.0)) / (2.0 * math.pi)  # sinh(pi phi) / (2 pi)
    val, err = _contour_integral(_massive_integrand, phi)
    return d / 4.0 + pref * val, pref * err


def _clamped(d: float) -> tuple[float, str]:
    """Move points within ENERGY_CLAMP of a critical point onto the offset."""
    if -1.0 < d < -1.0 + ENERGY_CLAMP:
        return -1.0 + ENERGY_CLAMP, f"evaluated at Delta={-1.0 + ENERGY_CLAMP!r} (clamped)"
    if 1.0 - ENERGY_CLAMP < d < 1.0:
        return 1.0 - ENERGY_CLAMP, f"evaluated at Delta={1.0 - ENERGY_CLAMP!r} (clamped)"
    if 1.0 < d < 1.0 + ENERGY_CLAMP:
        return 1.0 + ENERGY_CLAMP, f"evaluated at Delta={1.0 + ENERGY_CLAMP!r} (clamped)"
    return d, ""


@lru_cache(maxsize=1 << 16)
def _branch_energy(branch: str, d: float) -> tuple[float, float]:
    if branch == FERRO:
        return -d / 4.0, 0.0
    if branch == ISOTROPIC:
        return E_ISOTROPIC, 0.0
    if branch == GAPLESS:
        val, err = _gapless_energy(d)
    else:
        val, err = _massive_energy(d)
    if not err <= MAX_ENERGY_ERROR:
        raise QuadratureError(f"contour integral at Delta={d!r} did not converge (error estimate {err:.3e})")
    return val, err


def _branch_of(d: float) -> str:
    if d <= -1.0:
        return FERRO
    if d < 1.0:
        return GAPLESS
    if d == 1.0:
        return ISOTROPIC
    return ANTIFERRO


def ground_energy_report(delta: float) -> EnergyEvaluation:
    """Ground-state energy per site with branch and accuracy information.

    Raises
    ------
    QuadratureError
        If the contour integral's error estimate exceeds ``MAX_ENERGY_ERROR``.
    """
    d = _check_delta(delta)
    at, note = _clamped(d)
    branch = _branch_of(at)
    value, err = _branch_energy(branch, at)
    return EnergyEvaluation(delta=d, value=value, abserr=err, branch=branch, evaluated_at=at, note=note)


def ground_energy(delta: float) -> float:
    """Ground-state energy per site, in units of the coupling."""
    return ground_energy_report(delta).value


# -- derivative ----------------------------------------------------------------


def _richardson(f, x: float, h: float, side: int) -> float:
    """Finite-difference derivative refined by two Richardson steps.

    ``side`` 0 is the central difference (error series h^2, h^4, ...);
    +1/-1 use the three-point one-sided stencil (error series h^2, h^3, ...).
    """
    if side == 0:
        def diff(step):
            return (f(x + step) - f(x - step)) / (2.0 * step)
        p, q = 2, 4
    else:
        f0 = f(x)

        def diff(step):
            return side * (-3.0 * f0 + 4.0 * f(x + side * step) - f(x + 2 * side * step)) / (2.0 * step)
        p, q = 2, 3
    d0, d1, d2 = diff(h), diff(h / 2), diff(h / 4)
    r1 = (2**p * d1 - d0) / (2**p - 1)
    r2 = (2**p * d2 - d1) / (2**p - 1)
    return (2**q * r2 - r1) / (2**q - 1)


@dataclass(frozen=True)
class DerivativeEvaluation:
    value: float
    side: str  # "central", "left" or "right"
    note: str = ""


def energy_derivative(delta: float, side: str | None = None) -> DerivativeEvaluation:
    """d e / d Delta without differencing across a phase boundary.

    ``side`` only matters at the critical points Delta = +-1, where it picks
    the one-sided limit ("left" or "right").  The defaults are the branch that
    owns the point: the ferromagnetic side at -1 and the gapless side at +1.
    """
    d = _check_delta(delta)
    if side not in (None, "left", "right"):
        raise ValueError(f"side must be 'left', 'right' or None, got {side!r}")

    if d < -1.0 or (d == -1.0 and side != "right"):
        note = "Delta=-1: left (ferromagnetic) limit" if d == -1.0 else ""
        return DerivativeEvaluation(-0.25, "left" if d == -1.0 else "central", note)

    if d == 1.0:
        use = side or "left"
        branch = GAPLESS if use == "left" else ANTIFERRO
        sgn = -1 if use == "left" else 1

        def f(x):
            return E_ISOTROPIC if x == 1.0 else _branch_energy(branch, x)[0]

        val = _richardson(f, 1.0, DERIVATIVE_STEP, sgn)
        return DerivativeEvaluation(val, use, f"Delta=1: {use} one-sided limit")

    if d == -1.0:  # right-hand (gapless) limit requested
        def f(x):
            return _gapless_energy(x)[0]

        val = _richardson(f, -1.0, DERIVATIVE_STEP, +1)
        return DerivativeEvaluation(val, "right", "Delta=-1: right one-sided limit")

    at, note = _clamped(d)
    branch = _branch_of(at)

    def f(x):
        return _branch_energy(branch, x)[0]

    if abs(at - 1.0) < DERIVATIVE_GUARD or abs(at + 1.0) < DERIVATIVE_GUARD:
        sgn = 1 if (at > 1.0 or at < 0.0) else -1  # step away from the nearby critical point
        used = "right" if sgn > 0 else "left"
        msg = f"one-sided ({used}) derivative near Delta={'+1' if at > 0 else '-1'}"
        note = f"{note}; {msg}" if note else msg
        return DerivativeEvaluation(_richardson(f, at, DERIVATIVE_STEP, sgn), used, note)
    return DerivativeEvaluation(_richardson(f, at, DERIVATIVE_STEP, 0), "central", note)


# -- correlators and two-site state -------------------------------------------


def zz_correlator(delta: float, side: str | None = None) -> float:
    """``<s^z_i s^z_{i+1}> = 4 de/dDelta``."""
    return 4.0 * energy_derivative(delta, side).value


def xx_correlator(delta: float, side: str | None = None) -> float:
    """``<s^x_i s^x_{i+1}> = (4 e - Delta <s^z s^z>) / 2``."""
    return correlators(delta, side).xx


@lru_cache(maxsize=1 << 14)
def _correlators(d: float, side: str | None) -> CorrelatorTriple:
    der = energy_derivative(d, side)
    zz = 4.0 * der.value
    if d == 1.0 and side == "right":
        e = E_ISOTROPIC
    elif d == -1.0 and side == "right":
        e = -0.25  # gapless limit
    else:
        ev = ground_energy_report(d)
        e = ev.value
        d = ev.evaluated_at
    xx = 0.5 * (4.0 * e - d * zz)
    return CorrelatorTriple(xx=xx, yy=xx, zz=zz, note=der.note)


def correlators(delta: float, side: str | None = None) -> CorrelatorTriple:
    """Nearest-neighbour correlators at ``delta``; ``xx == yy`` by construction."""
    return _correlators(_check_delta(delta), side)


def nn_params(delta: float, side: str | None = None) -> NNDensityParams:
    c = correlators(delta, side)
    return NNDensityParams(u=(1.0 + c.zz) / 4.0, w=(1.0 - c.zz) / 4.0, y=(c.xx + c.yy) / 4.0)


def nn_density_matrix(delta: float, side: str | None = None) -> TwoQubitState:
    """Reduced density matrix of two neighbouring sites.

    Raises
    ------
    ValueError
        If the correlators produce a matrix that is not positive
        semidefinite beyond 1e-9 (which would indicate a pipeline bug).
    """
    p = nn_params(delta, side)
    rho = p.matrix()
    lam_min = min(p.u, p.w - abs(p.y))
    if lam_min < -1e-9:
        raise ValueError(f"two-site matrix at Delta={delta!r} is not positive (min eigenvalue {lam_min:.3e})")
    if lam_min < 0:
        # roundoff-level negativity; nudge onto the PSD boundary
        p = NNDensityParams(max(p.u, 0.0), p.w, float(np.sign(p.y)) * min(abs(p.y), p.w))
        rho = p.matrix()
    return TwoQubitState(rho)


def semiaxes(delta: float, side: str | None = None) -> np.ndarray:
    """Direction-labelled semiaxes ``(s_x, s_y, s_z) = (|xx|, |yy|, |zz|)``."""
    c = correlators(delta, side)
    return np.abs(c.as_array())
