"""Independent reference values for the thermodynamic pipeline.

None of these share code or integration routes with ``qse_xxz.xxz_model``:
the gapless energy uses a real-axis integral on a hand-rolled composite
Gauss-Legendre rule, the massive one a rapidly convergent series.
"""

import math

import numpy as np

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _composite_gl(f, a, b, panels):
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        total += half * float(np.sum(_GL_W * f(mid + half * _GL_X)))
    return total


def energy_real_axis(delta):
    """``Delta/4 - sin g * int_0^inf sinh((pi-g)x) / (sinh(pi x) cosh(g x)) dx``, g = arccos Delta."""
    g = math.acos(delta)

    def f(x):
        x = np.asarray(x, dtype=float)
        # the ratio written with decaying exponentials only; (pi - g)/pi at x = 0
        num = -np.expm1(-2.0 * (math.pi - g) * x)
        den = -np.expm1(-2.0 * math.pi * x) * (1.0 + np.exp(-2.0 * g * x))
        with np.errstate(invalid="ignore", divide="ignore"):
            val = 2.0 * np.exp(-2.0 * g * x) * num / den
        return np.where(x > 0, val, (math.pi - g) / math.pi)

    upper = 40.0 / g
    return delta / 4.0 - math.sin(g) * _composite_gl(f, 0.0, upper, 400)


def energy_series(delta, terms=200):
    """Massive regime: ``Delta/4 - sinh l [1/2 + 2 sum 1/(1+e^{2 n l})]``, l = arccosh Delta."""
    lam = math.acosh(delta)
    s = sum(1.0 / (1.0 + math.exp(2 * n * lam)) for n in range(1, terms) if 2 * n * lam < 700)
    return delta / 4.0 - math.sinh(lam) * (0.5 + 2.0 * s)


def derivative(f, x, h=1e-3):
    """Five-point central difference."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


# exact values
FREE_FERMION = dict(e=-1 / math.pi, zz=-4 / math.pi**2, xx=-2 / math.pi)
HALF = dict(e=-3 / 8, zz=-1 / 2, xx=-5 / 8)
ISOTROPIC = dict(e=0.25 - math.log(2), s=(4 * math.log(2) - 1) / 3)


def _entropy_bits(rho):
    lam = np.linalg.eigvalsh(rho)
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))


def discord_projective(rho, n_grid=60):
    """Discord with a projective measurement on B, minimized numerically.

    Coarse (theta, phi) grid followed by Nelder-Mead refinement.
    """
    from scipy.optimize import minimize

    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    r4 = rho.reshape(2, 2, 2, 2)

    def cond_entropy(angles):
        th, ph = angles
        n = np.array([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])
        total = 0.0
        for sign in (1, -1):
            proj = 0.5 * (np.eye(2) + sign * (n[0] * sx + n[1] * sy + n[2] * sz))
            # tr_B[(I x P) rho]
            block = np.einsum("ajbk,kj->ab", r4, proj)
            p = float(np.trace(block).real)
            if p > 1e-14:
                total += p * _entropy_bits(block / p)
        return total

    grid = [(t, p) for t in np.linspace(0, math.pi, n_grid // 2) for p in np.linspace(0, 2 * math.pi, n_grid, endpoint=False)]
    start = min(grid, key=cond_entropy)
    best = minimize(cond_entropy, start, method="Nelder-Mead", options=dict(xatol=1e-10, fatol=1e-14)).fun
    rho_b = np.einsum("ajak->jk", r4)
    return _entropy_bits(rho_b) - _entropy_bits(rho) + min(best, cond_entropy(start))


def chsh_horodecki(t):
    """``2 sqrt(m1 + m2)`` with m1, m2 the two largest eigenvalues of T^T T."""
    m = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return 2.0 * math.sqrt(max(m[0] + m[1], 0.0))
