import math

import numpy as np
import pytest

from ribflat.meshio import (
    DomainSpec, MeshBuildError, SurfaceMesh, build_mesh,
    build_mesh_from_values, export_csv, export_json, export_obj,
    read_obj_vertices, sample_domain,
)
from ribflat.weierstrass import immerse_grid

from conftest import CBRT2_ROOTS


def test_annulus_two_circles():
    spec = DomainSpec(kind="annulus", nu=2, nv=4, r_in=1.0, r_out=math.e)
    grid = sample_domain(spec)
    pts = list(grid)
    assert len(pts) == 8
    radii = sorted({round(abs(z), 12) for z in pts})
    assert radii == [1.0, round(math.e, 12)]


def test_disk_exclusion():
    spec = DomainSpec(kind="disk", nu=8, nv=16, r_out=1.0,
                      punctures=[0], exclusion_radius=0.1)
    grid = sample_domain(spec)
    assert all(abs(z) >= 0.1 for z in grid)


def test_rect_grid_row_major():
    spec = DomainSpec(kind="rect", nu=3, nv=2, z_min=0, z_max=1 + 1j)
    grid = sample_domain(spec)
    assert list(grid) == [0j, 1j, 0.5, 0.5 + 1j, 1.0, 1 + 1j]


def test_grid_determinism(tmp_path):
    spec = DomainSpec(kind="annulus", nu=9, nv=17, r_in=0.3, r_out=2.1,
                      punctures=[1.0], exclusion_radius=0.07)
    rows = [(z.real, z.imag) for z in sample_domain(spec)]
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    export_csv(rows, f1, header=("z_re", "z_im"))
    export_csv([(z.real, z.imag) for z in sample_domain(spec)], f2,
               header=("z_re", "z_im"))
    assert f1.read_bytes() == f2.read_bytes()


def test_domain_validation():
    with pytest.raises(ValueError):
        DomainSpec(kind="annulus", nu=4, nv=4, r_in=2.0, r_out=1.0)
    with pytest.raises(ValueError):
        DomainSpec(kind="blob", nu=4, nv=4)
    with pytest.raises(ValueError):
        DomainSpec(kind="disk", nu=1, nv=4, r_out=1.0)


def test_catenoid_strip_euler_characteristic(catenoid_W):
    spec = DomainSpec(kind="annulus", nu=10, nv=20, r_in=0.5, r_out=2.0)
    grid = sample_domain(spec)
    values, ok = immerse_grid(catenoid_W, grid)
    mesh = build_mesh_from_values(grid, values, ok)
    assert len(mesh.vertices) == 200
    assert len(mesh.faces) == 2 * 9 * 20
    assert mesh.euler_characteristic() == 0


def test_transformed_mesh_has_puncture_holes(catenoid_pair):
    W_t = catenoid_pair.W_t
    spec = DomainSpec(kind="annulus", nu=16, nv=32, r_in=0.45, r_out=2.0,
                      punctures=W_t.punctures, exclusion_radius=0.15)
    grid = sample_domain(spec)
    values, ok = immerse_grid(W_t, grid)
    mesh = build_mesh_from_values(grid, values, ok)
    for w in CBRT2_ROOTS:
        assert all(abs(zp - w) >= 0.15 for zp in mesh.vertex_param)


def test_build_mesh_flags_failures():
    spec = DomainSpec(kind="rect", nu=6, nv=6, z_min=-1 - 1j, z_max=1 + 1j)
    grid = sample_domain(spec)

    def evaluator(z):
        if z.real > 0:
            raise ArithmeticError("half plane unusable")
        return np.array([z.real, z.imag, 0.0])

    mesh = build_mesh(evaluator, grid)
    assert all(p.real <= 0 for p in mesh.vertex_param)
    for face in mesh.faces:
        assert all(0 <= idx < len(mesh.vertices) for idx in face)
        assert all(mesh.vertex_flags[idx] != "failed" for idx in face)


def test_build_mesh_aborts_on_mass_failure():
    spec = DomainSpec(kind="rect", nu=5, nv=5, z_min=-1 - 1j, z_max=1 + 1j)
    grid = sample_domain(spec)

    def evaluator(z):
        raise ArithmeticError("nothing evaluates")

    with pytest.raises(MeshBuildError):
        build_mesh(evaluator, grid)


def test_obj_export_formats(tmp_path):
    mesh = SurfaceMesh(vertices=np.array([[1.0, 2.0, 3.0]]), faces=[],
                       vertex_flags=["regular"], vertex_param=[0j])
    path = tmp_path / "one.obj"
    export_obj(mesh, path)
    assert path.read_text() == "v 1 2 3\n"

    empty = SurfaceMesh(vertices=np.zeros((0, 3)), faces=[],
                        vertex_flags=[], vertex_param=[])
    path2 = tmp_path / "empty.obj"
    export_obj(empty, path2)
    assert path2.read_text() == ""


def test_obj_round_trip(tmp_path, catenoid_W):
    spec = DomainSpec(kind="annulus", nu=6, nv=12, r_in=0.5, r_out=2.0)
    grid = sample_domain(spec)
    values, ok = immerse_grid(catenoid_W, grid)
    mesh = build_mesh_from_values(grid, values, ok)
    path = tmp_path / "strip.obj"
    export_obj(mesh, path)
    back = read_obj_vertices(path)
    assert back.shape == mesh.vertices.shape
    assert (back == mesh.vertices).all()


def test_json_deterministic(tmp_path):
    report = {"b": 2.0, "a": [1.5, {"z": 0.1}]}
    f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
    export_json(report, f1)
    export_json({"a": [1.5, {"z": 0.1}], "b": 2.0}, f2)
    assert f1.read_bytes() == f2.read_bytes()
