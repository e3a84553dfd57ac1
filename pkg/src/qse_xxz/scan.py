"""Delta sweeps: one :class:`ScanRecord` per grid point, written as CSV / JSON lines."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import tolerances as tol
from .correlation_measures import (
    bond_strength_difference,
    chsh_measure,
    concurrence,
    discord_bell_diagonal,
)
from .steering_ellipsoid import classify_shape, ellipsoid_for_A
from .xxz_model import QuadratureError, correlators, ground_energy_report, nn_density_matrix

__all__ = [
    "OUTPUT_KINDS",
    "CSV_COLUMNS",
    "ORACLE_COLUMNS",
    "ScanConfig",
    "ScanRecord",
    "delta_grid",
    "compute_record",
    "run_scan",
    "records_to_csv",
    "records_to_jsonl",
    "read_csv",
]

OUTPUT_KINDS = frozenset({"csv", "json", "svg-semiaxes", "svg-volume", "mesh"})

CSV_COLUMNS = (
    "delta", "e_g", "xx", "yy", "zz", "s_x", "s_y", "s_z", "volume", "shape",
    "concurrence", "discord", "chsh", "bond_strength_diff", "critical_point_note",
)
ORACLE_COLUMNS = ("ed_e_g", "ed_xx", "ed_zz")

#: Grid points this close to Delta = +-1 get a critical-point note.
CRITICAL_WINDOW = 1e-3


@dataclass(frozen=True)
class ScanConfig:
    delta_min: float = -1.5
    delta_max: float = 3.0
    step: float = 0.01
    outputs: frozenset = frozenset({"csv", "svg-semiaxes", "svg-volume"})
    oracle_n: int | None = None
    shape_tolerance: float = tol.SHAPE_TOL
    seed: int = 0
    mesh_deltas: tuple = ()
    out_dir: str = "."
    workers: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.delta_min) and math.isfinite(self.delta_max)):
            raise ValueError("delta range must be finite")
        if not self.delta_min < self.delta_max:
            raise ValueError(f"delta_min ({self.delta_min}) must be below delta_max ({self.delta_max})")
        if not self.step > 0:
            raise ValueError("step must be positive")
        unknown = set(self.outputs) - OUTPUT_KINDS
        if unknown:
            raise ValueError(f"unknown output kinds: {sorted(unknown)}")
        if "mesh" in self.outputs and not self.mesh_deltas:
            raise ValueError("mesh output needs an explicit list of Delta snapshots")
        if self.shape_tolerance <= 0:
            raise ValueError("shape tolerance must be positive")


@dataclass
class ScanRecord:
    delta: float
    e_g: float | None = None
    xx: float | None = None
    yy: float | None = None
    zz: float | None = None
    s_x: float | None = None
    s_y: float | None = None
    s_z: float | None = None
    volume: float | None = None
    shape: str | None = None
    concurrence: float | None = None
    discord: float | None = None
    chsh: float | None = None
    bond_strength_diff: float | None = None
    critical_point_note: str = ""
    ed_e_g: float | None = None
    ed_xx: float | None = None
    ed_zz: float | None = None
    failed: bool = field(default=False, compare=False)

    def as_row(self, with_oracle: bool = False) -> dict:
        cols = CSV_COLUMNS + (ORACLE_COLUMNS if with_oracle else ())
        return {c: getattr(self, c) for c in cols}


def delta_grid(delta_min: float, delta_max: float, step: float) -> np.ndarray:
    """Uniform grid including both ends when they fall on the lattice.

    Points are rounded to 12 decimals so that e.g. Delta = 1 lands exactly on
    1.0 and is evaluated by the isotropic branch.
    """
    n = int(math.floor((delta_max - delta_min) / step + 1e-9))
    return np.array([round(delta_min + i * step, 12) for i in range(n + 1)])


def _critical_note(delta: float, derivative_note: str) -> str:
    notes = []
    if delta == -1.0:
        notes.append("Delta=-1 evaluated on the ferromagnetic branch")
    elif delta == 1.0:
        notes.append("Delta=1 evaluated on the isotropic branch")
    if derivative_note and (abs(delta - 1) < CRITICAL_WINDOW or abs(delta + 1) < CRITICAL_WINDOW):
        notes.append(derivative_note)
    return "; ".join(notes)


def compute_record(delta: float, shape_tolerance: float = tol.SHAPE_TOL, oracle_n: int | None = None) -> ScanRecord:
    """Evaluate every column at one grid point.

    Quadrature and consistency failures are caught and turn the record into a
    failed one (numeric fields empty, reason in the note column).
    """
    delta = float(delta)
    try:
        energy = ground_energy_report(delta)
        corr = correlators(delta)
        state = nn_density_matrix(delta)
        ell = ellipsoid_for_A(state)
        s = np.abs(corr.as_array())
        rec = ScanRecord(
            delta=delta,
            e_g=energy.value,
            xx=corr.xx,
            yy=corr.yy,
            zz=corr.zz,
            s_x=float(s[0]),
            s_y=float(s[1]),
            s_z=float(s[2]),
            volume=ell.volume,
            shape=classify_shape(ell, shape_tolerance).name,
            concurrence=concurrence(state),
            discord=discord_bell_diagonal(state),
            chsh=chsh_measure(state),
            bond_strength_diff=bond_strength_difference(delta, s) if delta < 0 else None,
            critical_point_note=_critical_note(delta, corr.note),
        )
        if oracle_n:
            from .ed_oracle import SpinChainSpec, ground_state
            from .ed_oracle import correlators as ed_correlators

            sol = ground_state(SpinChainSpec(oracle_n, delta))
            ec = ed_correlators(sol)
            rec.ed_e_g, rec.ed_xx, rec.ed_zz = sol.energy_per_site, ec.xx, ec.zz
        return rec
    except (QuadratureError, ValueError, ArithmeticError, RuntimeError) as exc:
        return ScanRecord(delta=delta, critical_point_note=f"failed: {exc}", failed=True)


def _compute_star(args):
    return compute_record(*args)


def run_scan(config: ScanConfig) -> list[ScanRecord]:
    """Compute all grid records, ordered by Delta."""
    grid = delta_grid(config.delta_min, config.delta_max, config.step)
    jobs = [(float(d), config.shape_tolerance, config.oracle_n) for d in grid]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(_compute_star, jobs, chunksize=16))
    return [compute_record(*job) for job in jobs]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def records_to_csv(records, with_oracle: bool = False) -> str:
    cols = CSV_COLUMNS + (ORACLE_COLUMNS if with_oracle else ())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for rec in records:
        row = rec.as_row(with_oracle)
        writer.writerow([_fmt(row[c]) for c in cols])
    return buf.getvalue()


def records_to_jsonl(records, with_oracle: bool = False) -> str:
    return "".join(json.dumps(rec.as_row(with_oracle)) + "\n" for rec in records)


_NUMERIC = {f.name for f in fields(ScanRecord)} - {"shape", "critical_point_note", "failed"}


def read_csv(path) -> list[ScanRecord]:
    """Load records written by :func:`records_to_csv`."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for key, raw in row.items():
                if key in _NUMERIC:
                    kwargs[key] = float(raw) if raw != "" else None
                elif key in ("shape", "critical_point_note"):
                    kwargs[key] = raw if (raw or key == "critical_point_note") else None
            rec = ScanRecord(**kwargs)
            rec.failed = rec.critical_point_note.startswith("failed:")
            out.append(rec)
    return out


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
