"""Energy functional, weak-form residual, and manifold diagnostics.

The energy of a Dirichlet pair (u, v) is

    J(u, v) = K/p - A/q - B/(r+s)

with K the summed p-gradient energies, A = lambda*int f|u|^q + mu*int g|v|^q
the concave part, and B = int h|u|^r|v|^s the convex coupling. The constraint
set of interest (the set where K - A - B = 0) splits into branches by the
sign of the pairing (p-q)A + (p-r-s)B; branch Plus carries local minima of
the scaling map t -> J(tu, tv), branch Minus local maxima, branch Zero the
degenerate points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, MeshMismatch, NotOnManifold, ZeroPair
from .mesh import Field, PairField, gradient_energy, gradient_energy_gradient, integrate

TOL_MANIFOLD = 1e-10
TOL_ZERO = 1e-8


class NehariClass(enum.Enum):
    """Branch labels for the constraint-set split."""

    PLUS = "Plus"
    ZERO = "Zero"
    MINUS = "Minus"
    NOT_ON_MANIFOLD = "NotOnManifold"

    def __str__(self):
        return self.value


def signed_power(x, m):
    """sign(x)*|x|^m with the continuous extension 0 at x = 0 (for m > 0)."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.abs(x) ** m


@dataclass
class ProblemParams:
    """Exponents, parameters, and weight fields of the system.

    Requires 1 < q < p < r + s < p_star with r > p and s > p, and
    (lam, mu) != (0, 0). The weights f, g, h live on one shared mesh;
    p_star is derived from that mesh's dimension.
    """

    p: float
    q: float
    r: float
    s: float
    lam: float
    mu: float
    f: Field
    g: Field
    h: Field

    def __post_init__(self):
        mesh = self.f.mesh
        if self.g.mesh != mesh or self.h.mesh != mesh:
            raise InvalidParams("weight fields f, g, h must share one mesh")
        if not self.p > 1:
            raise InvalidParams(f"requires p > 1, got p = {self.p}")
        if not 1 < self.q < self.p:
            raise InvalidParams(f"requires 1 < q < p, got q = {self.q}, p = {self.p}")
        if not (self.r > self.p and self.s > self.p):
            raise InvalidParams(
                f"requires r > p and s > p, got r = {self.r}, s = {self.s}"
            )
        if not self.p < self.r + self.s < self.p_star:
            raise InvalidParams(
                f"requires p < r + s < p_star, got r + s = {self.r + self.s},"
                f" p_star = {self.p_star}"
            )
        if self.lam == 0.0 and self.mu == 0.0:
            raise InvalidParams("requires (lambda, mu) != (0, 0)")

    @property
    def mesh(self):
        return self.f.mesh

    @property
    def rs(self):
        return self.r + self.s

    @property
    def p_star(self):
        n = self.mesh.dimension
        if n > self.p:
            return self.p * n / (n - self.p)
        return math.inf


def single_parameter_instance(q, alpha, beta, lam, a, b):
    """Single-parameter p = 2 instance: mu = lam, f = g = a, h = b, r = alpha, s = beta.

    The convex-term coupling coefficients are alpha/(alpha+beta) and
    beta/(alpha+beta), matching the general r/(r+s), s/(r+s) convention.
    """
    return ProblemParams(p=2.0, q=q, r=alpha, s=beta, lam=lam, mu=lam, f=a, g=a, h=b)


@dataclass
class NehariDiagnostics:
    """The triple (K, A, B) with the constraint and pairing values.

    constraint = K - A - B vanishes exactly on the manifold; the pairing
    (p-q)A + (p-r-s)B carries the branch sign there.
    """

    K: float
    A: float
    B: float
    constraint: float
    pairing: float
    branch: NehariClass


def _require_pair(params, pair):
    if pair.mesh != params.mesh:
        raise MeshMismatch("pair mesh does not match the params mesh")
    if not (pair.u.dirichlet and pair.v.dirichlet):
        raise MeshMismatch("expected a Dirichlet pair (zero boundary values)")


def w_norm(params, pair):
    """Norm of the pair: (int |grad u|^p + int |grad v|^p)^(1/p)."""
    _require_pair(params, pair)
    k = gradient_energy(params.mesh, pair.u, params.p) + gradient_energy(
        params.mesh, pair.v, params.p
    )
    return k ** (1.0 / params.p)


def _kab(params, pair):
    mesh = params.mesh
    u, v = pair.u.values, pair.v.values
    k = gradient_energy(mesh, pair.u, params.p) + gradient_energy(mesh, pair.v, params.p)
    a = params.lam * integrate(mesh, params.f.values * np.abs(u) ** params.q) + (
        params.mu * integrate(mesh, params.g.values * np.abs(v) ** params.q)
    )
    b = integrate(mesh, params.h.values * np.abs(u) ** params.r * np.abs(v) ** params.s)
    return k, a, b


def energy_J(params, pair):
    """Energy functional J = K/p - A/q - B/(r+s); J of the zero pair is 0."""
    _require_pair(params, pair)
    k, a, b = _kab(params, pair)
    return k / params.p - a / params.q - b / params.rs


def weak_residual(params, pair):
    """Weak-form gradient of J as a Dirichlet pair of nodal fields.

    At interior nodes the first component realizes
    -div(|grad u|^(p-2) grad u) - lambda f |u|^(q-2)u - (r/(r+s)) h |u|^(r-2)u |v|^s
    (second component symmetric, with mu g and (s/(r+s)) h |u|^r |v|^(s-2)v);
    boundary entries are zero. Equivalently it is the nodal partial gradient
    of J divided by the quadrature weight, so its quadrature inner product
    with a direction is the directional derivative of J. The convention
    |0|^(q-2)*0 = 0 applies for q < 2.
    """
    _require_pair(params, pair)
    mesh = params.mesh
    u, v = pair.u.values, pair.v.values
    w = mesh.quadrature_weights
    cr = params.r / params.rs
    cs = params.s / params.rs
    ru = (
        gradient_energy_gradient(mesh, u, params.p) / (params.p * w)
        - params.lam * params.f.values * signed_power(u, params.q - 1)
        - cr * params.h.values * signed_power(u, params.r - 1) * np.abs(v) ** params.s
    )
    rv = (
        gradient_energy_gradient(mesh, v, params.p) / (params.p * w)
        - params.mu * params.g.values * signed_power(v, params.q - 1)
        - cs * params.h.values * np.abs(u) ** params.r * signed_power(v, params.s - 1)
    )
    boundary = mesh.boundary_mask()
    ru[boundary] = 0.0
    rv[boundary] = 0.0
    return PairField(Field(mesh, ru, dirichlet=True), Field(mesh, rv, dirichlet=True))


def nehari_quantities(params, pair, tol_manifold=TOL_MANIFOLD, tol_zero=TOL_ZERO):
    """Constraint diagnostics of a nonzero pair.

    Returns K, A, B by quadrature, constraint = K - A - B, the branch
    pairing (p-q)A + (p-r-s)B, and the branch classification. The manifold
    test is relative to max(K, 1); the degeneracy test is relative to the
    magnitude of the pairing's two terms, so the label is invariant under
    rescaling the pair along the fibering ray.
    """
    _require_pair(params, pair)
    if pair.is_zero():
        raise ZeroPair("diagnostics are defined for nonzero pairs only")
    k, a, b = _kab(params, pair)
    constraint = k - a - b
    pairing = (params.p - params.q) * a + (params.p - params.rs) * b
    pairing_scale = max((params.p - params.q) * abs(a), (params.rs - params.p) * abs(b))
    if abs(constraint) > tol_manifold * max(k, 1.0):
        branch = NehariClass.NOT_ON_MANIFOLD
    elif abs(pairing) <= tol_zero * pairing_scale:
        branch = NehariClass.ZERO
    elif pairing > 0.0:
        branch = NehariClass.PLUS
    else:
        branch = NehariClass.MINUS
    return NehariDiagnostics(k, a, b, constraint, pairing, branch)


def classify(params, pair, tol_manifold=TOL_MANIFOLD, tol_zero=TOL_ZERO):
    """Branch label of a nonzero pair: Plus, Zero, Minus, or NotOnManifold."""
    return nehari_quantities(params, pair, tol_manifold, tol_zero).branch


def manifold_energy_forms(params, diag):
    """Two reduced forms of J valid on the manifold.

    form1 eliminates B via K = A + B, form2 eliminates A; both equal
    energy_J for on-manifold pairs:

        form1 = (1/p - 1/(r+s))K - (1/q - 1/(r+s))A
        form2 = (1/p - 1/q)K + (1/q - 1/(r+s))B
    """
    if diag.branch is NehariClass.NOT_ON_MANIFOLD:
        raise NotOnManifold("energy forms require an on-manifold pair")
    p, q, rs = params.p, params.q, params.rs
    form1 = (1.0 / p - 1.0 / rs) * diag.K - (1.0 / q - 1.0 / rs) * diag.A
    form2 = (1.0 / p - 1.0 / q) * diag.K + (1.0 / q - 1.0 / rs) * diag.B
    return form1, form2
