"""Grid construction, quadrature, gradient energies, and field I/O."""

import numpy as np
import pytest

from nehari import (
    Field,
    InvalidMesh,
    MeshMismatch,
    PairField,
    UnknownPreset,
    build_mesh,
    bump_field,
    dirichlet_field,
    gradient_energy,
    gradient_energy_gradient,
    hat_field,
    integrate,
    interior_laplacian,
    read_field_csv,
    sample_weight,
    write_field_csv,
)


def test_build_mesh_1d_basic():
    mesh = build_mesh(1, (0.0, 1.0), 101)
    assert mesh.dimension == 1
    assert mesh.nodes_per_axis == (101,)
    assert mesh.spacing == (0.01,)
    assert mesh.axes[0][0] == 0.0 and mesh.axes[0][-1] == 1.0
    # trapezoid weights sum to the domain measure
    assert abs(float(np.sum(mesh.quadrature_weights)) - 1.0) <= 1e-12
    assert mesh.quadrature_weights[0] == pytest.approx(0.005)
    assert mesh.quadrature_weights[50] == pytest.approx(0.01)


def test_build_mesh_2d_weights():
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 2.0)), (11, 21))
    hx, hy = mesh.spacing
    assert hx == pytest.approx(0.1) and hy == pytest.approx(0.1)
    assert abs(float(np.sum(mesh.quadrature_weights)) - 2.0) <= 1e-12
    # corner weight is a quarter cell, edge weight a half cell
    assert mesh.quadrature_weights[0, 0] == pytest.approx(hx * hy / 4.0)
    assert mesh.quadrature_weights[0, 5] == pytest.approx(hx * hy / 2.0)
    assert mesh.quadrature_weights[5, 5] == pytest.approx(hx * hy)


def test_build_mesh_rejects_bad_input():
    with pytest.raises(InvalidMesh):
        build_mesh(3, (0.0, 1.0), 11)
    with pytest.raises(InvalidMesh):
        build_mesh(1, (1.0, 0.0), 11)
    with pytest.raises(InvalidMesh):
        build_mesh(1, (0.0, 1.0), 2)


def test_integrate_matches_trapezoid():
    mesh = build_mesh(1, (0.0, 1.0), 101)
    values = np.sin(np.pi * mesh.axes[0])
    expected = float(np.trapezoid(values, dx=mesh.spacing[0]))
    assert integrate(mesh, values) == pytest.approx(expected, rel=1e-14)
    # constants integrate to the measure exactly
    assert integrate(mesh, np.ones(101)) == pytest.approx(1.0, abs=1e-14)


def test_integrate_2d_constant():
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 1.0)), (17, 17))
    assert integrate(mesh, np.ones((17, 17))) == pytest.approx(1.0, abs=1e-13)


def test_field_validation():
    mesh = build_mesh(1, (0.0, 1.0), 11)
    with pytest.raises(MeshMismatch):
        Field(mesh, np.zeros(10))
    with pytest.raises(MeshMismatch):
        Field(mesh, np.ones(11), dirichlet=True)
    field = dirichlet_field(mesh, np.ones(11))
    assert field.values[0] == 0.0 and field.values[-1] == 0.0
    assert field.dirichlet


def test_pair_field_scaling():
    mesh = build_mesh(1, (0.0, 1.0), 21)
    pair = PairField(hat_field(mesh), hat_field(mesh))
    scaled = pair.scaled(3.0)
    assert np.max(scaled.u.values) == pytest.approx(3.0)
    assert not pair.is_zero()
    zero = PairField(
        dirichlet_field(mesh, np.zeros(21)), dirichlet_field(mesh, np.zeros(21))
    )
    assert zero.is_zero()


def test_gradient_energy_hat_closed_forms():
    # tent of peak 1: |u'| = 2, so the p-energy is 2^p exactly
    mesh = build_mesh(1, (0.0, 1.0), 201)
    hat = hat_field(mesh)
    assert gradient_energy(mesh, hat, 2.0) == pytest.approx(4.0, rel=1e-13)
    assert gradient_energy(mesh, hat, 3.0) == pytest.approx(8.0, rel=1e-13)


def test_gradient_energy_linear_exact():
    # piecewise-linear fields are integrated exactly by the cell rule
    mesh = build_mesh(1, (0.0, 2.0), 41)
    values = 0.5 * mesh.axes[0]
    assert gradient_energy(mesh, values, 2.0) == pytest.approx(0.5, rel=1e-13)


def test_gradient_energy_matches_stiffness_form():
    # for p = 2 the energy is the discrete Dirichlet form of the 3-point
    # (1D) stiffness operator: E = u_int . (L u_int) * h
    mesh = build_mesh(1, (0.0, 1.0), 51)
    rng = np.random.default_rng(3)
    u = dirichlet_field(mesh, rng.standard_normal(51)).values
    lap = interior_laplacian(mesh)
    ui = u[1:-1]
    form = float(ui @ (lap @ ui)) * mesh.spacing[0]
    assert gradient_energy(mesh, u, 2.0) == pytest.approx(form, rel=1e-12)


def test_gradient_energy_matches_stiffness_form_2d():
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 1.0)), (17, 17))
    rng = np.random.default_rng(4)
    u = dirichlet_field(mesh, rng.standard_normal((17, 17))).values
    lap = interior_laplacian(mesh)
    ui = u[1:-1, 1:-1].ravel()
    form = float(ui @ (lap @ ui)) * mesh.spacing[0] * mesh.spacing[1]
    assert gradient_energy(mesh, u, 2.0) == pytest.approx(form, rel=1e-12)


@pytest.mark.parametrize("p", [2.0, 3.0, 2.5])
def test_gradient_energy_gradient_is_derivative(p):
    mesh = build_mesh(1, (0.0, 1.0), 31)
    rng = np.random.default_rng(7)
    u = dirichlet_field(mesh, 0.5 + rng.random(31)).values
    grad = gradient_energy_gradient(mesh, u, p)
    eps = 1e-7
    for i in (5, 13, 27):
        up, um = u.copy(), u.copy()
        up[i] += eps
        um[i] -= eps
        fd = (gradient_energy(mesh, up, p) - gradient_energy(mesh, um, p)) / (2 * eps)
        assert grad[i] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_gradient_energy_gradient_2d_derivative():
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 1.0)), (13, 13))
    rng = np.random.default_rng(11)
    u = dirichlet_field(mesh, rng.random((13, 13))).values
    grad = gradient_energy_gradient(mesh, u, 2.0)
    eps = 1e-7
    for idx in ((3, 4), (6, 6), (10, 2)):
        up, um = u.copy(), u.copy()
        up[idx] += eps
        um[idx] -= eps
        fd = (gradient_energy(mesh, up, 2.0) - gradient_energy(mesh, um, 2.0)) / (2 * eps)
        assert grad[idx] == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_sample_weight_presets():
    mesh = build_mesh(1, (0.0, 1.0), 101)
    const = sample_weight(mesh, "constant:1")
    assert np.all(const.values == 1.0)
    half = sample_weight(mesh, "constant:-0.5")
    assert np.all(half.values == -0.5)
    cosine = sample_weight(mesh, "cosine:1")
    x = mesh.axes[0]
    assert np.allclose(cosine.values, np.cos(2.0 * np.pi * x), atol=1e-14)
    assert cosine.values[0] == pytest.approx(1.0)
    assert cosine.values[50] == pytest.approx(-1.0)


def test_sample_weight_2d_cosine_is_product():
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 1.0)), (21, 21))
    weight = sample_weight(mesh, "cosine:2")
    x, y = mesh.axes
    expected = np.cos(4.0 * np.pi * x)[:, None] * np.cos(4.0 * np.pi * y)[None, :]
    assert np.allclose(weight.values, expected, atol=1e-14)


def test_sample_weight_array_and_errors():
    mesh = build_mesh(1, (0.0, 1.0), 11)
    arr = sample_weight(mesh, np.linspace(-1.0, 1.0, 11))
    assert arr.values[0] == -1.0
    with pytest.raises(UnknownPreset):
        sample_weight(mesh, "gaussian:1")
    with pytest.raises(UnknownPreset):
        sample_weight(mesh, "cosine:x")
    with pytest.raises(MeshMismatch):
        sample_weight(mesh, np.zeros(10))


def test_hat_and_bump_fields():
    mesh = build_mesh(1, (0.0, 1.0), 201)
    hat = hat_field(mesh)
    assert np.max(hat.values) == pytest.approx(1.0)
    assert hat.values[0] == 0.0 and hat.values[-1] == 0.0
    assert hat.dirichlet
    bump = bump_field(mesh, 0.25, 0.125)
    assert np.max(bump.values) == pytest.approx(1.0)
    x = mesh.axes[0]
    outside = np.abs(x - 0.25) > 0.125 + 1e-12
    assert np.all(bump.values[outside] == 0.0)


def test_interior_laplacian_1d_eigenvalue():
    # smallest eigenvalue of the 3-point Dirichlet operator has the exact
    # closed form (2/h^2)(1 - cos(pi h))
    mesh = build_mesh(1, (0.0, 1.0), 101)
    lap = interior_laplacian(mesh)
    from scipy.sparse.linalg import eigsh

    value = eigsh(lap.tocsc(), k=1, which="SM", return_eigenvectors=False)[0]
    h = mesh.spacing[0]
    exact = 2.0 / h**2 * (1.0 - np.cos(np.pi * h))
    assert value == pytest.approx(exact, rel=1e-10)


def test_field_csv_round_trip(tmp_path):
    mesh = build_mesh(1, (0.0, 1.0), 41)
    rng = np.random.default_rng(5)
    field = dirichlet_field(mesh, rng.random(41))
    path = tmp_path / "field.csv"
    write_field_csv(field, str(path))
    text = path.read_text()
    assert text.splitlines()[0] == "x,value"
    back = read_field_csv(mesh, str(path), dirichlet=True)
    # repr round-trips doubles exactly
    assert np.array_equal(back.values, field.values)


def test_field_csv_round_trip_2d(tmp_path):
    mesh = build_mesh(2, ((0.0, 1.0), (0.0, 1.0)), (9, 9))
    rng = np.random.default_rng(6)
    field = dirichlet_field(mesh, rng.random((9, 9)))
    path = tmp_path / "field2d.csv"
    write_field_csv(field, str(path))
    assert path.read_text().splitlines()[0] == "x,y,value"
    back = read_field_csv(mesh, str(path), dirichlet=True)
    assert np.array_equal(back.values, field.values)


def test_field_csv_rejects_mismatch(tmp_path):
    mesh = build_mesh(1, (0.0, 1.0), 41)
    other = build_mesh(1, (0.0, 1.0), 31)
    field = dirichlet_field(mesh, np.ones(41))
    path = tmp_path / "field.csv"
    write_field_csv(field, str(path))
    with pytest.raises(MeshMismatch):
        read_field_csv(other, str(path))
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n1,2\n")
    with pytest.raises(MeshMismatch):
        read_field_csv(mesh, str(bad))
