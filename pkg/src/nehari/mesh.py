"""Uniform-grid discretization of the domain.

Provides the mesh (1D interval or 2D rectangle), trapezoidal quadrature,
discrete p-gradient energies, weight-function sampling, and CSV field I/O.
All arithmetic is double precision; every operation here is a pure function
of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidMesh, MeshMismatch, UnknownPreset


@dataclass(frozen=True)
class Mesh:
    """Uniform tensor grid on an interval or rectangle.

    Attributes
    ----------
    dimension : int
        1 or 2.
    extents : tuple of (float, float)
        Endpoints per axis.
    nodes_per_axis : tuple of int
        Node count per axis, at least 3 each.
    spacing : tuple of float
        Grid spacing per axis, (hi - lo)/(n - 1).
    axes : tuple of ndarray
        Node coordinates per axis.
    quadrature_weights : ndarray
        Trapezoidal weight per node, grid-shaped; sums to the measure of
        the domain.
    """

    dimension: int
    extents: tuple
    nodes_per_axis: tuple
    spacing: tuple
    axes: tuple = dc_field(repr=False)
    quadrature_weights: np.ndarray = dc_field(repr=False)

    @property
    def shape(self):
        return self.nodes_per_axis

    @property
    def node_count(self):
        return int(np.prod(self.nodes_per_axis))

    @property
    def measure(self):
        out = 1.0
        for lo, hi in self.extents:
            out *= hi - lo
        return out

    def boundary_mask(self):
        """Boolean grid-shaped array, True exactly on boundary nodes."""
        mask = np.zeros(self.shape, dtype=bool)
        if self.dimension == 1:
            mask[0] = mask[-1] = True
        else:
            mask[0, :] = mask[-1, :] = True
            mask[:, 0] = mask[:, -1] = True
        return mask

    def interior_slices(self):
        """Tuple of slices selecting the interior block of a grid array."""
        return tuple(slice(1, -1) for _ in range(self.dimension))


@dataclass
class Field:
    """Nodal values of a scalar function on a mesh.

    When ``dirichlet`` is True the boundary values are exactly zero.
    """

    mesh: Mesh
    values: np.ndarray
    dirichlet: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.mesh.shape:
            raise MeshMismatch(
                f"field shape {self.values.shape} does not match mesh {self.mesh.shape}"
            )
        if self.dirichlet and np.any(self.values[self.mesh.boundary_mask()] != 0.0):
            raise MeshMismatch("dirichlet field has nonzero boundary values")

    def copy(self):
        return Field(self.mesh, self.values.copy(), self.dirichlet)


@dataclass
class PairField:
    """A pair (u, v) of fields sharing one mesh and one Dirichlet flag."""

    u: Field
    v: Field

    def __post_init__(self):
        if self.u.mesh is not self.v.mesh and self.u.mesh != self.v.mesh:
            raise MeshMismatch("pair components live on different meshes")
        if self.u.dirichlet != self.v.dirichlet:
            raise MeshMismatch("pair components disagree on the Dirichlet flag")

    @property
    def mesh(self):
        return self.u.mesh

    def scaled(self, t):
        return PairField(
            Field(self.u.mesh, t * self.u.values, self.u.dirichlet),
            Field(self.v.mesh, t * self.v.values, self.v.dirichlet),
        )

    def is_zero(self):
        return not (np.any(self.u.values) or np.any(self.v.values))


def build_mesh(dimension, extents, nodes_per_axis):
    """Build a uniform mesh with trapezoidal quadrature.

    Parameters
    ----------
    dimension : int
        1 or 2.
    extents : (lo, hi) or ((lo, hi), (lo, hi))
        Domain endpoints per axis.
    nodes_per_axis : int or (int, int)
        Nodes per axis, at least 3.

    Returns
    -------
    Mesh
    """
    if dimension not in (1, 2):
        raise InvalidMesh(f"dimension must be 1 or 2, got {dimension}")
    if dimension == 1:
        ext = (tuple(float(e) for e in extents),)
        if np.isscalar(nodes_per_axis):
            counts = (int(nodes_per_axis),)
        else:
            counts = tuple(int(n) for n in nodes_per_axis)
    else:
        ext = tuple(tuple(float(e) for e in pair) for pair in extents)
        if np.isscalar(nodes_per_axis):
            counts = (int(nodes_per_axis),) * 2
        else:
            counts = tuple(int(n) for n in nodes_per_axis)
    if len(ext) != dimension or len(counts) != dimension:
        raise InvalidMesh("extents and nodes_per_axis must match the dimension")
    for (lo, hi) in ext:
        if not hi > lo:
            raise InvalidMesh(f"degenerate extent ({lo}, {hi})")
    for n in counts:
        if n < 3:
            raise InvalidMesh(f"need at least 3 nodes per axis, got {n}")

    axes = tuple(np.linspace(lo, hi, n) for (lo, hi), n in zip(ext, counts))
    spacing = tuple((hi - lo) / (n - 1) for (lo, hi), n in zip(ext, counts))

    axis_weights = []
    for h, n in zip(spacing, counts):
        w = np.full(n, h)
        w[0] = w[-1] = h / 2  # trapezoid: boundary weight halved per incident axis
        axis_weights.append(w)
    if dimension == 1:
        weights = axis_weights[0]
    else:
        weights = np.outer(axis_weights[0], axis_weights[1])

    return Mesh(dimension, ext, counts, spacing, axes, weights)


def integrate(mesh, field):
    """Trapezoidal quadrature of a field: sum of weights times values."""
    values = field.values if isinstance(field, Field) else np.asarray(field, dtype=float)
    if values.shape != mesh.shape:
        raise MeshMismatch(
            f"integrand shape {values.shape} does not match mesh {mesh.shape}"
        )
    return float(np.sum(mesh.quadrature_weights * values))


def _cell_gradients(mesh, values):
    """Per-cell forward-difference gradient components, lower-corner based."""
    if mesh.dimension == 1:
        return (np.diff(values) / mesh.spacing[0],)
    gx = np.diff(values, axis=0)[:, :-1] / mesh.spacing[0]
    gy = np.diff(values, axis=1)[:-1, :] / mesh.spacing[1]
    return gx, gy


def gradient_energy(mesh, field, p):
    """Discrete p-gradient energy, the integral of |grad u|^p.

    Sums |cell gradient|^p times cell volume over all grid cells, the cell
    gradient taken by forward differences of the cell's corner values. The
    placement makes the energy exactly p-homogeneous and exact for
    piecewise-linear fields.
    """
    values = field.values if isinstance(field, Field) else np.asarray(field, dtype=float)
    if values.shape != mesh.shape:
        raise MeshMismatch(
            f"field shape {values.shape} does not match mesh {mesh.shape}"
        )
    grads = _cell_gradients(mesh, values)
    cell_volume = float(np.prod(mesh.spacing))
    if mesh.dimension == 1:
        return float(np.sum(np.abs(grads[0]) ** p) * cell_volume)
    norm_sq = grads[0] ** 2 + grads[1] ** 2
    return float(np.sum(norm_sq ** (p / 2.0)) * cell_volume)


def gradient_energy_gradient(mesh, values, p):
    """Nodal partial derivatives of gradient_energy with respect to the values.

    Returns a grid-shaped array d/du of sum_cells |grad u|^p vol. Cells with
    zero gradient contribute nothing (the continuous extension for p < 2).
    """
    values = np.asarray(values, dtype=float)
    cell_volume = float(np.prod(mesh.spacing))
    out = np.zeros_like(values)
    if mesh.dimension == 1:
        h = mesh.spacing[0]
        g = np.diff(values) / h
        flux = p * np.sign(g) * np.abs(g) ** (p - 1) * cell_volume / h
        out[1:] += flux
        out[:-1] -= flux
        return out
    hx, hy = mesh.spacing
    gx, gy = _cell_gradients(mesh, values)
    norm_sq = gx ** 2 + gy ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        fac = np.where(norm_sq > 0.0, norm_sq ** (p / 2.0 - 1.0), 0.0)
    fx = p * fac * gx * cell_volume / hx
    fy = p * fac * gy * cell_volume / hy
    out[1:, :-1] += fx
    out[:-1, :-1] -= fx
    out[:-1, 1:] += fy
    out[:-1, :-1] -= fy
    return out


def sample_weight(mesh, preset):
    """Sample a weight function preset as a nodal field.

    Parameters
    ----------
    preset : str or array-like
        ``"constant:c"`` for the constant c, ``"cosine:k"`` for a product of
        cosines with k full periods per axis (sign-changing for k >= 1), or
        tabulated nodal values of matching shape.
    """
    if isinstance(preset, str):
        kind, _, arg = preset.partition(":")
        kind = kind.strip().lower()
        if kind == "constant":
            try:
                c = float(arg) if arg else 1.0
            except ValueError:
                raise UnknownPreset(f"bad constant value {arg!r}") from None
            return Field(mesh, np.full(mesh.shape, c))
        if kind == "cosine":
            try:
                k = float(arg) if arg else 1.0
            except ValueError:
                raise UnknownPreset(f"bad cosine period count {arg!r}") from None
            vals = np.ones(mesh.shape)
            for axis, ((lo, hi), coords) in enumerate(zip(mesh.extents, mesh.axes)):
                rel = (coords - lo) / (hi - lo)
                factor = np.cos(2.0 * np.pi * k * rel)
                shape = [1] * mesh.dimension
                shape[axis] = len(coords)
                vals = vals * factor.reshape(shape)
            return Field(mesh, vals)
        raise UnknownPreset(f"unknown weight preset {preset!r}")
    values = np.asarray(preset, dtype=float)
    if values.shape != mesh.shape:
        raise MeshMismatch(
            f"tabulated weight shape {values.shape} does not match mesh {mesh.shape}"
        )
    return Field(mesh, values)


def dirichlet_field(mesh, values):
    """Field with the boundary ring forced to exactly zero."""
    vals = np.array(values, dtype=float)
    if vals.shape != mesh.shape:
        raise MeshMismatch(
            f"field shape {vals.shape} does not match mesh {mesh.shape}"
        )
    vals[mesh.boundary_mask()] = 0.0
    return Field(mesh, vals, dirichlet=True)


def hat_field(mesh):
    """Tensor-product tent with peak 1 at the domain center, zero boundary."""
    vals = np.ones(mesh.shape)
    for axis, ((lo, hi), coords) in enumerate(zip(mesh.extents, mesh.axes)):
        rel = (coords - lo) / (hi - lo)
        tent = 1.0 - np.abs(2.0 * rel - 1.0)
        shape = [1] * mesh.dimension
        shape[axis] = len(coords)
        vals = vals * tent.reshape(shape)
    return dirichlet_field(mesh, vals)


def bump_field(mesh, center, width):
    """Tensor-product tent bump at relative position center with relative width.

    center and width are fractions of each axis length; scalars broadcast to
    both axes in 2D.
    """
    centers = np.broadcast_to(np.asarray(center, dtype=float), (mesh.dimension,))
    widths = np.broadcast_to(np.asarray(width, dtype=float), (mesh.dimension,))
    vals = np.ones(mesh.shape)
    for axis, ((lo, hi), coords) in enumerate(zip(mesh.extents, mesh.axes)):
        rel = (coords - lo) / (hi - lo)
        tent = np.maximum(0.0, 1.0 - np.abs((rel - centers[axis]) / widths[axis]))
        shape = [1] * mesh.dimension
        shape[axis] = len(coords)
        vals = vals * tent.reshape(shape)
    return dirichlet_field(mesh, vals)


def interior_laplacian(mesh):
    """Sparse finite-difference Dirichlet Laplacian on the interior nodes.

    Row-major interior ordering; CSC format, symmetric positive definite.
    For p = 2 Dirichlet fields this matrix is exactly the quadratic form of
    gradient_energy restricted to the interior (up to the cell volume factor).
    """
    if mesh.dimension == 1:
        n = mesh.nodes_per_axis[0] - 2
        h = mesh.spacing[0]
        main = np.full(n, 2.0 / h ** 2)
        off = np.full(n - 1, -1.0 / h ** 2)
        return sp.diags([off, main, off], [-1, 0, 1]).tocsc()
    nx, ny = (n - 2 for n in mesh.nodes_per_axis)
    hx, hy = mesh.spacing
    ix = sp.identity(nx, format="csc")
    iy = sp.identity(ny, format="csc")
    main_x = np.full(nx, 2.0 / hx ** 2)
    off_x = np.full(nx - 1, -1.0 / hx ** 2)
    lap_x = sp.diags([off_x, main_x, off_x], [-1, 0, 1]).tocsc()
    main_y = np.full(ny, 2.0 / hy ** 2)
    off_y = np.full(ny - 1, -1.0 / hy ** 2)
    lap_y = sp.diags([off_y, main_y, off_y], [-1, 0, 1]).tocsc()
    return (sp.kron(lap_x, iy) + sp.kron(ix, lap_y)).tocsc()


def interior_values(mesh, values):
    """Flat copy of the interior block of a grid array, row-major."""
    return np.asarray(values)[mesh.interior_slices()].ravel().copy()


def embed_interior(mesh, flat):
    """Grid-shaped array with the given interior values and zero boundary."""
    out = np.zeros(mesh.shape)
    inner = tuple(n - 2 for n in mesh.nodes_per_axis)
    out[mesh.interior_slices()] = np.asarray(flat, dtype=float).reshape(inner)
    return out


def write_field_csv(field, path):
    """Write a field as CSV: node coordinates then value, one row per node."""
    mesh = field.mesh
    lines = []
    if mesh.dimension == 1:
        lines.append("x,value")
        for x, val in zip(mesh.axes[0], field.values):
            lines.append(f"{float(x)!r},{float(val)!r}")
    else:
        lines.append("x,y,value")
        xs, ys = mesh.axes
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                lines.append(f"{float(x)!r},{float(y)!r},{float(field.values[i, j])!r}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def read_field_csv(mesh, path, dirichlet=False):
    """Read a field written by write_field_csv back onto the given mesh.

    Coordinates are checked against the mesh nodes; a mismatch raises
    MeshMismatch.
    """
    with open(path, "r", encoding="utf-8") as handle:
        rows = [line.strip() for line in handle if line.strip()]
    expected_header = "x,value" if mesh.dimension == 1 else "x,y,value"
    if not rows or rows[0] != expected_header:
        raise MeshMismatch(f"bad CSV header in {path}: expected {expected_header!r}")
    body = rows[1:]
    if len(body) != mesh.node_count:
        raise MeshMismatch(
            f"{path} has {len(body)} rows, mesh has {mesh.node_count} nodes"
        )
    values = np.zeros(mesh.shape)
    coord_tol = 1e-9 * max(max(abs(lo), abs(hi), 1.0) for lo, hi in mesh.extents)
    if mesh.dimension == 1:
        for i, row in enumerate(body):
            x_str, v_str = row.split(",")
            if abs(float(x_str) - mesh.axes[0][i]) > coord_tol:
                raise MeshMismatch(f"{path} row {i + 2}: coordinate off the mesh")
            values[i] = float(v_str)
    else:
        nx, ny = mesh.nodes_per_axis
        for k, row in enumerate(body):
            x_str, y_str, v_str = row.split(",")
            i, j = divmod(k, ny)
            if (abs(float(x_str) - mesh.axes[0][i]) > coord_tol
                    or abs(float(y_str) - mesh.axes[1][j]) > coord_tol):
                raise MeshMismatch(f"{path} row {k + 2}: coordinate off the mesh")
            values[i, j] = float(v_str)
    if dirichlet:
        return dirichlet_field(mesh, values)
    return Field(mesh, values)
