"""Exact diagonalization of small periodic XXZ rings.

Serves as an independent check on the thermodynamic pipeline in
:mod:`qse_xxz.xxz_model`.  Configurations are integers whose bit for site
``j`` sits at position ``N - 1 - j`` (site 0 is the leftmost tensor factor);
a 0 bit is spin up, matching sigma_z = diag(1, -1).

The Hamiltonian conserves total S^z, so it is diagonalized block by block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse

from .two_qubit_state import TwoQubitState, decompose
from .xxz_model import CorrelatorTriple

__all__ = [
    "SpinChainSpec",
    "GroundSolution",
    "build_hamiltonian",
    "sector_hamiltonian",
    "ground_state",
    "reduced_density",
    "correlators",
    "extrapolate",
    "oracle_sequence",
]

MAX_SITES = 14
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SpinChainSpec:
    """Ring of ``n_sites`` spins; ``n_sites == 2`` means a single open bond."""

    n_sites: int
    delta: float

    def __post_init__(self):
        n = self.n_sites
        if n != 2 and not (4 <= n <= MAX_SITES):
            raise ValueError(f"n_sites must be 2 or in [4, {MAX_SITES}], got {n}")
        if n % 2:
            raise ValueError("n_sites must be even")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")

    def bonds(self) -> list[tuple[int, int]]:
        n = self.n_sites
        if n == 2:
            return [(0, 1)]
        return [(j, (j + 1) % n) for j in range(n)]


@dataclass(frozen=True)
class GroundSolution:
    spec: SpinChainSpec
    energy_per_site: float
    state: np.ndarray
    degeneracy: int
    sz_sector: float
    symmetrized: bool
    residual: float


def _bit(n: int, site: int) -> int:
    return 1 << (n - 1 - site)


@lru_cache(maxsize=64)
def _sector_basis(n: int, n_down: int) -> np.ndarray:
    configs = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros_like(configs)
    for k in range(n):
        pop += (configs >> k) & 1
    return configs[pop == n_down]


def _apply_bonds(configs: np.ndarray, spec: SpinChainSpec):
    """Diagonal energies and (source index, target config) pairs for hops."""
    n = spec.n_sites
    diag = np.zeros(len(configs))
    src, dst = [], []
    for i, j in spec.bonds():
        bi, bj = _bit(n, i), _bit(n, j)
        si = (configs & bi) != 0
        sj = (configs & bj) != 0
        anti = si != sj
        diag += np.where(anti, -0.25, 0.25) * spec.delta
        idx = np.nonzero(anti)[0]
        src.append(idx)
        dst.append(configs[idx] ^ (bi | bj))
    return diag, np.concatenate(src), np.concatenate(dst)


def sector_hamiltonian(spec: SpinChainSpec, n_down: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense block of H with ``n_down`` down spins, and its basis configurations."""
    basis = _sector_basis(spec.n_sites, n_down)
    diag, src, dst = _apply_bonds(basis, spec)
    h = np.diag(diag)
    # S+S- + S-S+ = 2 (SxSx + SySy): each flip of an antiparallel pair has amplitude 1/2
    np.add.at(h, (np.searchsorted(basis, dst), src), 0.5)
    return h, basis


def build_hamiltonian(spec: SpinChainSpec) -> scipy.sparse.csr_matrix:
    """Full ``2^N x 2^N`` sparse Hamiltonian."""
    configs = np.arange(1 << spec.n_sites, dtype=np.int64)
    diag, src, dst = _apply_bonds(configs, spec)
    dim = len(configs)
    h = scipy.sparse.coo_matrix((np.full(len(src), 0.5), (dst, src)), shape=(dim, dim))
    return (h + scipy.sparse.diags(diag)).tocsr()


def _flip_all(vec: np.ndarray, n: int) -> np.ndarray:
    idx = np.arange(1 << n) ^ ((1 << n) - 1)
    return vec[idx]


def ground_state(spec: SpinChainSpec) -> GroundSolution:
    """Lowest state over all S^z sectors.

    A ground level shared by opposite-magnetization sectors is replaced by the
    equal-weight superposition of the pair related by a global spin flip, so
    that the state carries no net magnetization.
    """
    n = spec.n_sites
    levels = []  # (energy, n_down, basis, vector)
    for n_down in range(n + 1):
        h, basis = sector_hamiltonian(spec, n_down)
        top = min(1, len(basis) - 1)
        vals, vecs = scipy.linalg.eigh(h, subset_by_index=[0, top])
        for k in range(len(vals)):
            levels.append((float(vals[k]), n_down, basis, vecs[:, k]))
    e0 = min(lv[0] for lv in levels)
    ground = [lv for lv in levels if lv[0] - e0 < DEGENERACY_TOL]

    def embed(level):
        full = np.zeros(1 << n)
        full[level[2]] = level[3]
        return full

    # most magnetized member first; fewer down spins means larger S^z
    ground.sort(key=lambda lv: (lv[1], lv[0]))
    first = ground[0]
    partner_sectors = {lv[1] for lv in ground}
    if len(ground) > 1 and first[1] != n - first[1] and (n - first[1]) in partner_sectors:
        v = embed(first)
        psi = (v + _flip_all(v, n)) / math.sqrt(2.0)
        symmetrized = True
    else:
        # not a magnetization pair: take the lowest level of the
        # zero-magnetization sector if it is degenerate, else the unique state
        pick = min(ground, key=lambda lv: (abs(n - 2 * lv[1]), lv[0]))
        psi = embed(pick)
        first = pick
        symmetrized = False
    psi /= np.linalg.norm(psi)

    h_full = build_hamiltonian(spec)
    residual = float(np.linalg.norm(h_full @ psi - e0 * psi))
    scale = max(1.0, abs(e0))
    if residual > 1e-9 * scale:
        raise RuntimeError(f"eigensolver residual {residual:.3e} too large for N={n}, Delta={spec.delta}")
    return GroundSolution(
        spec=spec,
        energy_per_site=e0 / n,
        state=psi,
        degeneracy=len(ground),
        sz_sector=(n - 2 * first[1]) / 2.0,
        symmetrized=symmetrized,
        residual=residual,
    )


def reduced_density(sol: GroundSolution, sites: tuple[int, int] = (0, 1)) -> TwoQubitState:
    """Two-site reduced density matrix; ``sites[0]`` becomes qubit A."""
    n = sol.spec.n_sites
    i, j = sites
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"invalid site pair {sites!r}")
    psi = sol.state.reshape((2,) * n)
    psi = np.moveaxis(psi, (i, j), (0, 1)).reshape(4, -1)
    rho = psi @ psi.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return TwoQubitState(rho / np.trace(rho).real)


def correlators(sol: GroundSolution, sites: tuple[int, int] = (0, 1)) -> CorrelatorTriple:
    """Nearest-neighbour correlators read off the two-site Pauli form."""
    t = decompose(reduced_density(sol, sites)).t
    return CorrelatorTriple(xx=float(t[0, 0]), yy=float(t[1, 1]), zz=float(t[2, 2]))


def extrapolate(sizes, values, method: str = "richardson") -> tuple[float, float]:
    """Extrapolate finite-size data to ``N -> infinity`` in powers of ``1/N^2``.

    ``method='richardson'`` passes a polynomial in ``1/N^2`` of degree
    ``len(sizes) - 1`` through all points (for three sizes this removes the
    ``N^-2`` and ``N^-4`` terms).  ``method='fit'`` is the least-squares fit
    ``v(N) = v_inf + c / N^2``.  Returns ``(v_inf, c)`` with ``c`` the
    ``1/N^2`` coefficient.
    """
    x = np.asarray(sizes, dtype=float) ** -2
    v = np.asarray(values, dtype=float)
    if method == "richardson":
        coeffs = np.linalg.solve(np.vander(x, len(x), increasing=True), v)
    elif method == "fit":
        coeffs, *_ = np.linalg.lstsq(np.column_stack([np.ones_like(x), x]), v, rcond=None)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(coeffs[0]), float(coeffs[1])


def oracle_sequence(delta: float, sizes=(8, 10, 12), method: str = "richardson") -> dict:
    """ED energies and correlators for several sizes plus their extrapolations."""
    rows = []
    for n in sizes:
        sol = ground_state(SpinChainSpec(n, delta))
        c = correlators(sol)
        rows.append({"n": n, "e": sol.energy_per_site, "xx": c.xx, "zz": c.zz})
    out = {"delta": delta, "sizes": list(sizes), "rows": rows}
    for key in ("e", "xx", "zz"):
        out[f"{key}_inf"] = extrapolate(sizes, [r[key] for r in rows], method)[0]
    return out
