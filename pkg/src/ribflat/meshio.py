"""Domain sampling, mesh assembly and file export (OBJ / CSV / JSON).

Grids are structured (nu x nv) with an optional wrap in the second
index (closed theta direction for annulus and disk domains).  Points
within the exclusion radius of a puncture are dropped but keep their
slot in the index grid, so adjacency survives.  Everything here is
deterministic: identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .mexpr import LineSeg

__all__ = [
    "DomainSpec", "DomainGrid", "SurfaceMesh", "MeshBuildError",
    "sample_domain", "accumulate_over_grid", "build_mesh",
    "build_mesh_from_values",
    "export_obj", "export_csv", "export_json", "read_obj_vertices",
]


class MeshBuildError(RuntimeError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    """Sampling region: annulus(r_in, r_out), disk(r) or rect(z_min, z_max)."""

    kind: str
    nu: int
    nv: int
    r_in: float = 0.0
    r_out: float = 0.0
    z_min: complex = 0j
    z_max: complex = 0j
    punctures: tuple = ()
    exclusion_radius: float = 0.05

    def __post_init__(self):
        if self.kind not in ("annulus", "disk", "rect"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.nu < 2 or self.nv < 2:
            raise ValueError("grid counts must be at least 2")
        if self.exclusion_radius <= 0:
            raise ValueError("exclusion radius must be positive")
        if self.kind == "annulus" and not (0 < self.r_in < self.r_out):
            raise ValueError("annulus needs 0 < r_in < r_out")
        if self.kind == "disk" and not self.r_out > 0:
            raise ValueError("disk needs a positive radius")
        object.__setattr__(self, "punctures",
                           tuple(complex(p) for p in self.punctures))


class DomainGrid:
    """Structured complex grid with a keep-mask.

    Iterating yields the kept points in row-major order, so a DomainGrid
    can be used wherever a plain list of sample points is expected.
    """

    def __init__(self, zs, keep, wrap_v):
        self.zs = np.asarray(zs, dtype=complex)
        self.keep = np.asarray(keep, dtype=bool)
        self.wrap_v = bool(wrap_v)
        self.nu, self.nv = self.zs.shape

    @property
    def points(self):
        return [z for z, k in zip(self.zs.ravel(), self.keep.ravel()) if k]

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return int(self.keep.sum())

    def neighbors(self, iu, iv):
        """Structural neighbours (kept or not) of a cell."""
        out = []
        if iu + 1 < self.nu:
            out.append((iu + 1, iv))
        if iu - 1 >= 0:
            out.append((iu - 1, iv))
        for dv in (1, -1):
            jv = iv + dv
            if self.wrap_v:
                out.append((iu, jv % self.nv))
            elif 0 <= jv < self.nv:
                out.append((iu, jv))
        return out


def sample_domain(d: DomainSpec) -> DomainGrid:
    """Log-polar grid for annulus/disk (uniform in log r and theta,
    theta wraps), row-major cartesian grid for rect.  Points within the
    exclusion radius of a puncture are dropped."""
    if d.kind in ("annulus", "disk"):
        if d.kind == "annulus":
            r0, r1 = d.r_in, d.r_out
        else:
            r0 = max(d.exclusion_radius, 0.02 * d.r_out)
            r1 = d.r_out
        logr = np.linspace(math.log(r0), math.log(r1), d.nu)
        theta = np.arange(d.nv) * (2 * math.pi / d.nv)
        rr = np.exp(logr)[:, None]
        zs = rr * np.exp(1j * theta)[None, :]
        wrap = True
    else:
        xs = np.linspace(d.z_min.real, d.z_max.real, d.nu)
        ys = np.linspace(d.z_min.imag, d.z_max.imag, d.nv)
        zs = xs[:, None] + 1j * ys[None, :]
        wrap = False
    keep = np.ones(zs.shape, dtype=bool)
    for p in d.punctures:
        keep &= np.abs(zs - p) >= d.exclusion_radius
    return DomainGrid(zs, keep, wrap)


def accumulate_over_grid(grid: DomainGrid, root, root_value, edge_fn,
                         edge_ok=None):
    """Breadth-first accumulation of additive edge increments over the grid.

    root is an (iu, iv) cell; edge_fn(z0, z1) -> numpy increment vector;
    edge_ok(z0, z1) may veto an edge (e.g. it clips a puncture).  Returns
    (values array (nu, nv, dim), reached bool mask).  Used for immersions
    and exponential integrals whose real parts are single-valued, so the
    spanning tree choice does not matter.
    """
    root_value = np.asarray(root_value, dtype=float)
    dim = root_value.shape[0]
    values = np.full((grid.nu, grid.nv, dim), np.nan)
    reached = np.zeros((grid.nu, grid.nv), dtype=bool)
    if not grid.keep[root]:
        raise MeshBuildError(f"root cell {root} is not a kept grid point")
    values[root] = root_value
    reached[root] = True
    queue = deque([root])
    while queue:
        cell = queue.popleft()
        z0 = grid.zs[cell]
        for nb in grid.neighbors(*cell):
            if reached[nb] or not grid.keep[nb]:
                continue
            z1 = grid.zs[nb]
            if edge_ok is not None and not edge_ok(z0, z1):
                continue
            values[nb] = values[cell] + edge_fn(z0, z1)
            reached[nb] = True
            queue.append(nb)
    return values, reached


def puncture_clear_edge(punctures, clearance):
    """edge_ok predicate: the straight edge stays clear of all punctures."""
    punctures = [complex(p) for p in punctures]

    def ok(z0, z1):
        seg = LineSeg(z0, z1)
        return all(seg.min_distance(p) >= clearance for p in punctures)

    return ok


@dataclass
class SurfaceMesh:
    vertices: np.ndarray          # (n, 3)
    faces: list                   # [(i, j, k), ...] zero-based
    vertex_flags: list            # 'regular' | 'singular'
    vertex_param: list            # complex parameter per vertex

    def edge_count(self):
        edges = set()
        for f in self.faces:
            for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0])):
                edges.add((min(a, b), max(a, b)))
        return len(edges)

    def euler_characteristic(self):
        return len(self.vertices) - self.edge_count() + len(self.faces)


def build_mesh_from_values(grid: DomainGrid, values, ok_mask,
                           singular_mask=None, max_failed_fraction=0.5):
    """Assemble a triangle mesh from per-cell vertex positions.

    values: (nu, nv, 3) array with positions (rows with ok_mask False are
    ignored); dropped/failed cells lose their faces.  Each grid quad is
    split into two triangles.
    """
    nu, nv = grid.nu, grid.nv
    ok = np.asarray(ok_mask, dtype=bool) & grid.keep
    n_expected = int(grid.keep.sum())
    n_ok = int(ok.sum())
    if n_expected and (n_expected - n_ok) > max_failed_fraction * n_expected:
        raise MeshBuildError(
            f"{n_expected - n_ok} of {n_expected} grid vertices failed "
            "to evaluate (more than the permitted fraction)")

    index = -np.ones((nu, nv), dtype=int)
    verts, flags, params = [], [], []
    for iu in range(nu):
        for iv in range(nv):
            if ok[iu, iv]:
                index[iu, iv] = len(verts)
                verts.append(values[iu, iv])
                sing = bool(singular_mask[iu, iv]) if singular_mask is not None else False
                flags.append("singular" if sing else "regular")
                params.append(complex(grid.zs[iu, iv]))

    faces = []
    v_range = nv if grid.wrap_v else nv - 1
    for iu in range(nu - 1):
        for iv in range(v_range):
            jv = (iv + 1) % nv
            c00 = index[iu, iv]
            c10 = index[iu + 1, iv]
            c01 = index[iu, jv]
            c11 = index[iu + 1, jv]
            if min(c00, c10, c11) >= 0:
                faces.append((c00, c10, c11))
            if min(c00, c11, c01) >= 0:
                faces.append((c00, c11, c01))

    vertices = np.array(verts) if verts else np.zeros((0, 3))
    return SurfaceMesh(vertices, faces, flags, params)


def build_mesh(evaluator, grid: DomainGrid, singular_fn=None,
               max_failed_fraction=0.5):
    """Evaluate a point function over the grid and triangulate.

    evaluator(z) returns a length-3 vector or raises to flag the vertex
    unevaluable; faces touching failed vertices are dropped.  More than
    max_failed_fraction failures aborts with diagnostics.
    """
    values = np.zeros((grid.nu, grid.nv, 3))
    ok = np.zeros((grid.nu, grid.nv), dtype=bool)
    singular = np.zeros((grid.nu, grid.nv), dtype=bool)
    n_failed = 0
    for iu in range(grid.nu):
        for iv in range(grid.nv):
            if not grid.keep[iu, iv]:
                continue
            z = grid.zs[iu, iv]
            try:
                values[iu, iv] = np.asarray(evaluator(z), dtype=float)
                ok[iu, iv] = True
            except Exception:
                n_failed += 1
                continue
            if singular_fn is not None:
                singular[iu, iv] = bool(singular_fn(z))
    return build_mesh_from_values(grid, values, ok, singular,
                                  max_failed_fraction=max_failed_fraction)


# ---------------------------------------------------------------------------
# File formats


def _g17(x):
    return format(float(x), ".17g")


def export_obj(mesh: SurfaceMesh, destination):
    """Wavefront OBJ with v/f records; floats carry 17 significant digits."""
    with open(destination, "w") as fh:
        for v in mesh.vertices:
            fh.write(f"v {_g17(v[0])} {_g17(v[1])} {_g17(v[2])}\n")
        for f in mesh.faces:
            fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")


def read_obj_vertices(path):
    """Vertex list of an OBJ file (the round-trip oracle for export_obj)."""
    verts = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if parts and parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
    return np.array(verts) if verts else np.zeros((0, 3))


def export_csv(rows, destination, header):
    """CSV with a header row; floats carry 17 significant digits."""
    with open(destination, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                _g17(x) if isinstance(x, float) else str(x) for x in row) + "\n")


def export_json(report, destination):
    """Deterministic JSON (sorted keys, 2-space indent, trailing newline)."""
    with open(destination, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
