"""Wavefront OBJ export of steering-ellipsoid snapshots.

Meshes are UV spheres scaled by the direction-labelled semiaxes
``(s_x, s_y, s_z)`` and centered at the origin.  Collapsed shapes are
written as lower-dimensional geometry with a ``# degenerate:`` comment line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["EllipsoidMesh", "uv_sphere", "ellipsoid_mesh", "to_obj", "export_mesh", "mesh_filename"]

DEFAULT_RESOLUTION = (64, 32)
_COLLAPSED = 1e-12


@dataclass(frozen=True)
class EllipsoidMesh:
    vertices: np.ndarray  # (n, 3)
    faces: np.ndarray  # (m, 3) zero-based triangles
    lines: np.ndarray  # (k, 2) zero-based segments
    points: np.ndarray  # (p,) zero-based
    semiaxes: tuple
    annotation: str = ""


def uv_sphere(n_lon: int = 64, n_lat: int = 32) -> tuple[np.ndarray, np.ndarray]:
    """Unit sphere with two poles and ``n_lat - 1`` rings of ``n_lon`` vertices."""
    if n_lon < 3 or n_lat < 2:
        raise ValueError("resolution must be at least 3 x 2")
    theta = np.pi * np.arange(1, n_lat) / n_lat
    phi = 2 * np.pi * np.arange(n_lon) / n_lon
    st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
    ring = np.stack(
        [st * np.cos(phi)[None, :], st * np.sin(phi)[None, :], np.broadcast_to(ct, (n_lat - 1, n_lon))],
        axis=-1,
    ).reshape(-1, 3)
    verts = np.vstack([[0.0, 0.0, 1.0], ring, [0.0, 0.0, -1.0]])

    def idx(r, k):
        return 1 + r * n_lon + (k % n_lon)

    faces = []
    south = len(verts) - 1
    for k in range(n_lon):
        faces.append((0, idx(0, k), idx(0, k + 1)))
        faces.append((south, idx(n_lat - 2, k + 1), idx(n_lat - 2, k)))
    for r in range(n_lat - 2):
        for k in range(n_lon):
            a, b = idx(r, k), idx(r, k + 1)
            c, d = idx(r + 1, k), idx(r + 1, k + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    return verts, np.array(faces, dtype=np.int64)


def ellipsoid_mesh(semiaxes, resolution=DEFAULT_RESOLUTION) -> EllipsoidMesh:
    """Mesh for axis lengths ``(s_x, s_y, s_z)`` along the coordinate axes."""
    s = np.asarray(semiaxes, dtype=float)
    if s.shape != (3,) or not np.all(np.isfinite(s)) or np.any(s < 0):
        raise ValueError(f"semiaxes must be three finite nonnegative numbers, got {semiaxes!r}")
    live = s > _COLLAPSED
    empty2 = np.zeros((0, 2), dtype=np.int64)
    empty3 = np.zeros((0, 3), dtype=np.int64)
    if not live.any():
        return EllipsoidMesh(np.zeros((1, 3)), empty3, empty2, np.array([0]), tuple(s), "degenerate: point")
    if live.sum() == 1:
        axis = int(np.argmax(live))
        v = np.zeros((2, 3))
        v[0, axis], v[1, axis] = -s[axis], s[axis]
        note = f"degenerate: needle along {'xyz'[axis]}, half-length {float(s[axis])!r}"
        return EllipsoidMesh(v, empty3, np.array([[0, 1]]), np.zeros(0, dtype=np.int64), tuple(s), note)
    verts, faces = uv_sphere(*resolution)
    note = ""
    if live.sum() == 2:
        note = f"degenerate: flat, zero extent along {'xyz'[int(np.argmin(live))]}"
    return EllipsoidMesh(verts * s, faces, empty2, np.zeros(0, dtype=np.int64), tuple(s), note)


def _num(x: float) -> str:
    # repr keeps full precision; +0.0 avoids "-0.0" noise
    return repr(float(x) + 0.0)


def to_obj(mesh: EllipsoidMesh, name: str) -> str:
    out = [f"# steering ellipsoid {name}", "# semiaxes s_x s_y s_z: " + " ".join(_num(v) for v in mesh.semiaxes)]
    if mesh.annotation:
        out.append(f"# {mesh.annotation}")
    out.append(f"o {name}")
    out.extend("v " + " ".join(_num(c) for c in row) for row in mesh.vertices)
    out.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces)
    out.extend(f"l {a + 1} {b + 1}" for a, b in mesh.lines)
    out.extend(f"p {p + 1}" for p in mesh.points)
    return "\n".join(out) + "\n"


def mesh_filename(delta: float) -> str:
    return f"ellipsoid_delta_{delta:+.6f}.obj"


def export_mesh(deltas, out_dir, resolution=DEFAULT_RESOLUTION) -> list[Path]:
    """Write one OBJ per Delta plus ``bloch_sphere.obj``; returns the paths."""
    from .scan import write_text
    from .xxz_model import semiaxes

    out_dir = Path(out_dir)
    paths = []
    for d in deltas:
        d = float(d)
        if not math.isfinite(d):
            raise ValueError(f"mesh snapshot Delta must be finite, got {d!r}")
        mesh = ellipsoid_mesh(semiaxes(d), resolution)
        paths.append(write_text(out_dir / mesh_filename(d), to_obj(mesh, f"delta={d!r}")))
    sphere = ellipsoid_mesh((1.0, 1.0, 1.0), resolution)
    paths.append(write_text(out_dir / "bloch_sphere.obj", to_obj(sphere, "bloch_sphere")))
    return paths
