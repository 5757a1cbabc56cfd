"""Fibering map analysis, branch projection, and threshold certificates.

For a nonzero pair with diagnostics (K, A, B) the fibering map is

    phi(t) = (t^p/p) K - (t^q/q) A - (t^(r+s)/(r+s)) B,      t > 0,

whose critical points are exactly the scalings t placing (tu, tv) on the
constraint set. Writing phi'(t) = t^(q-1) (m(t) - A) with
m(t) = K t^(p-q) - B t^(r+s-q), the root structure follows from the shape
of m: for B > 0 it rises to a single maximum at t_max and falls, so phi'
has zero, one, or two roots depending on where A sits relative to
m(t_max); for B <= 0 it is strictly increasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .energy import NehariClass, nehari_quantities
from .errors import InvalidConstant, NonpositiveT, NoScaling, ZeroPair
from .mesh import PairField, dirichlet_field, gradient_energy, hat_field, integrate

TOL_ROOT = 1e-12
ZERO_BAND = 1e-9  # relative width of the degenerate-root detection band


@dataclass
class FiberingRoot:
    """One critical scaling of the fibering map."""

    t: float
    phi: float
    branch: NehariClass


@dataclass
class FiberingAnalysis:
    """Root structure of the fibering map of one pair.

    t_max is the argmax of m(t) when B > 0, absent (None) otherwise.
    Roots are sorted ascending; when two exist the smaller is Plus and the
    larger Minus.
    """

    K: float
    A: float
    B: float
    t_max: float | None
    roots: list


@dataclass
class ThresholdCertificate:
    """Norm-separation certificate for emptiness of the degenerate branch.

    Any degenerate on-manifold pair would need norm at least lower_bound
    and at most upper_coefficient*(|lambda| |f|_inf + |mu| |g|_inf)^upper_exponent;
    certified is True exactly when the upper value is below the lower bound
    at the queried (lambda, mu). lambda0 = mu0 is the symmetric parameter
    size at which the two bounds meet. Constants are mesh-dependent
    estimates; mesh_nodes records the resolution they were computed at.
    """

    lower_bound: float
    upper_coefficient: float
    upper_exponent: float
    upper_value: float
    lambda0: float
    mu0: float
    certified: bool
    lam: float
    mu: float
    mesh_nodes: tuple


def fibering_phi(params, diag, t):
    """Value and derivative (phi(t), phi'(t)) of the fibering map at t > 0."""
    if not t > 0.0:
        raise NonpositiveT(f"fibering map requires t > 0, got t = {t}")
    p, q, rs = params.p, params.q, params.rs
    phi = (t ** p / p) * diag.K - (t ** q / q) * diag.A - (t ** rs / rs) * diag.B
    dphi = t ** (p - 1) * diag.K - t ** (q - 1) * diag.A - t ** (rs - 1) * diag.B
    return phi, dphi


def _dphi(K, A, B, p, q, rs, t):
    return t ** (p - 1) * K - t ** (q - 1) * A - t ** (rs - 1) * B


def _bisect(K, A, B, p, q, rs, lo, hi):
    """Bisection for the sign change of phi' inside a bracketing interval."""
    flo = _dphi(K, A, B, p, q, rs, lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fmid = _dphi(K, A, B, p, q, rs, mid)
        if (flo <= 0.0) == (fmid <= 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
        if hi - lo <= TOL_ROOT * mid:
            break
    return 0.5 * (lo + hi)


def find_nehari_scalings(params, diag):
    """Case analysis and root location for the fibering map of one pair.

    Root counts: B > 0 with A <= 0 gives one Minus root; B > 0 with
    0 < A < m(t_max) gives a Plus root below t_max and a Minus root above;
    A within the degeneracy band of m(t_max) gives one Zero root at t_max;
    A above m(t_max) gives none. B <= 0 gives one Plus root when A > 0 and
    none otherwise. Roots are refined by bisection to 1e-12 relative.
    """
    K, A, B = diag.K, diag.A, diag.B
    if K <= 0.0:
        raise ZeroPair("fibering analysis requires a nonzero pair (K > 0)")
    p, q, rs = params.p, params.q, params.rs

    def make_root(t, branch):
        phi, _ = fibering_phi(params, diag, t)
        return FiberingRoot(t, phi, branch)

    roots = []
    t_max = None
    if B > 0.0:
        t_max = ((p - q) * K / ((rs - q) * B)) ** (1.0 / (rs - p))
        m_max = K * t_max ** (p - q) - B * t_max ** (rs - q)
        if A <= 0.0:
            hi = 2.0 * t_max
            while _dphi(K, A, B, p, q, rs, hi) > 0.0:
                hi *= 2.0
            roots.append(make_root(_bisect(K, A, B, p, q, rs, t_max, hi), NehariClass.MINUS))
        elif abs(A - m_max) <= ZERO_BAND * max(A, 1.0):
            roots.append(make_root(t_max, NehariClass.ZERO))
        elif A < m_max:
            lo = 0.5 * t_max
            while _dphi(K, A, B, p, q, rs, lo) > 0.0:
                lo *= 0.5
            roots.append(make_root(_bisect(K, A, B, p, q, rs, lo, t_max), NehariClass.PLUS))
            hi = 2.0 * t_max
            while _dphi(K, A, B, p, q, rs, hi) > 0.0:
                hi *= 2.0
            roots.append(make_root(_bisect(K, A, B, p, q, rs, t_max, hi), NehariClass.MINUS))
        # A > m_max: phi' < 0 everywhere, no roots
    elif A > 0.0:
        # m(t) grows strictly from 0, so exactly one crossing: a Plus root
        t_ref = (A / K) ** (1.0 / (p - q))
        lo = t_ref
        while _dphi(K, A, B, p, q, rs, lo) > 0.0:
            lo *= 0.5
        hi = t_ref
        while _dphi(K, A, B, p, q, rs, hi) <= 0.0:
            hi *= 2.0
        roots.append(make_root(_bisect(K, A, B, p, q, rs, lo, hi), NehariClass.PLUS))

    return FiberingAnalysis(K, A, B, t_max, roots)


def project_to_branch(params, pair, branch):
    """Scale a nonzero pair onto the requested branch (Plus or Minus).

    Returns (t*u, t*v) for the branch's fibering root t; raises NoScaling
    when the case analysis yields no root of that branch.
    """
    if branch not in (NehariClass.PLUS, NehariClass.MINUS):
        raise NoScaling(f"projection targets Plus or Minus, got {branch}")
    diag = nehari_quantities(params, pair)
    analysis = find_nehari_scalings(params, diag)
    for root in analysis.roots:
        if root.branch is branch:
            return pair.scaled(root.t)
    raise NoScaling(
        f"no {branch} scaling exists (K={diag.K:.6g}, A={diag.A:.6g}, B={diag.B:.6g})"
    )


def _sup_norm(field):
    return float(np.max(np.abs(field.values)))


def m0_empty_certificate(params, S_rs, S_q, lam, mu):
    """Certificate that the degenerate branch is empty at (lambda, mu).

    Combining the constraint with the embedding inequalities, every
    hypothetical degenerate pair has norm at least

        lower_bound = [(p-q) S_rs^((r+s)/p) / ((r+s-q) |h|_inf)]^(1/(r+s-p))

    and at most

        [((r+s-q)/(r+s-p)) S_q^(-q/p)]^(1/(p-q)) (|lambda| |f|_inf + |mu| |g|_inf)^(1/(p-q)).

    When the upper value is strictly below the lower bound the two
    requirements are incompatible and the branch is empty. S_rs and S_q are
    the pair embedding constants for exponents r+s and q from the sobolev
    module, computed on the same mesh as the weights.
    """
    if S_rs <= 0.0 or S_q <= 0.0:
        raise InvalidConstant(f"embedding constants must be positive, got {S_rs}, {S_q}")
    p, q, rs = params.p, params.q, params.rs
    nf, ng, nh = _sup_norm(params.f), _sup_norm(params.g), _sup_norm(params.h)

    if nh > 0.0:
        lower = ((p - q) * S_rs ** (rs / p) / ((rs - q) * nh)) ** (1.0 / (rs - p))
    else:
        lower = math.inf  # B vanishes identically, the degenerate branch is empty
    coeff = (((rs - q) / (rs - p)) * S_q ** (-q / p)) ** (1.0 / (p - q))
    exponent = 1.0 / (p - q)
    upper = coeff * (abs(lam) * nf + abs(mu) * ng) ** exponent

    if math.isinf(lower):
        lambda0 = math.inf
    elif nf + ng > 0.0:
        lambda0 = (lower / coeff) ** (p - q) / (nf + ng)
    else:
        lambda0 = math.inf  # A vanishes identically for any parameters

    return ThresholdCertificate(
        lower_bound=lower,
        upper_coefficient=coeff,
        upper_exponent=exponent,
        upper_value=upper,
        lambda0=lambda0,
        mu0=lambda0,
        certified=bool(upper < lower),
        lam=lam,
        mu=mu,
        mesh_nodes=params.mesh.nodes_per_axis,
    )


def coercivity_lower_bound(params, S_q, K):
    """Lower bound on J over on-manifold pairs of norm K^(1/p).

    Returns ((r+s-p)/(p(r+s))) K - ((r+s-q)/(q(r+s))) (|lambda| |f|_inf +
    |mu| |g|_inf) S_q^(-q/p) K^(q/p). The linear K-term dominates the
    K^(q/p) term, so the bound tends to +infinity with K (coercivity).
    """
    if S_q <= 0.0:
        raise InvalidConstant(f"embedding constant must be positive, got {S_q}")
    if K < 0.0:
        raise InvalidConstant(f"norm power K must be nonnegative, got {K}")
    p, q, rs = params.p, params.q, params.rs
    nf, ng = _sup_norm(params.f), _sup_norm(params.g)
    level = abs(params.lam) * nf + abs(params.mu) * ng
    return ((rs - p) / (p * rs)) * K - ((rs - q) / (q * rs)) * level * S_q ** (
        -q / p
    ) * K ** (q / p)


def estimate_lambda1(params, samples=64, seed=0):
    """Empirical estimate of the parameter level where degeneracy first appears.

    For a direction with diagnostics (K, G, B) at unit parameters (G the
    concave term with lambda = mu = 1) and B > 0, the degenerate scaling
    occurs exactly when lambda*G = m(t_max). The estimate is the minimum of
    m(t_max)/G over sampled nonnegative directions with G > 0; it is an
    estimate, not a certified threshold.
    """
    mesh = params.mesh
    p, q, rs = params.p, params.q, params.rs
    rng = np.random.default_rng(seed)
    best = math.inf

    def consider(pair):
        nonlocal best
        u, v = pair.u.values, pair.v.values
        K = gradient_energy(mesh, pair.u, p) + gradient_energy(mesh, pair.v, p)
        if K <= 0.0:
            return
        G = integrate(mesh, params.f.values * np.abs(u) ** q) + integrate(
            mesh, params.g.values * np.abs(v) ** q
        )
        B = integrate(mesh, params.h.values * np.abs(u) ** params.r * np.abs(v) ** params.s)
        if B <= 0.0 or G <= 0.0:
            return
        t_max = ((p - q) * K / ((rs - q) * B)) ** (1.0 / (rs - p))
        m_max = K * t_max ** (p - q) - B * t_max ** (rs - q)
        best = min(best, m_max / G)

    hat = hat_field(mesh)
    consider(PairField(hat, hat))
    for _ in range(samples):
        u = dirichlet_field(mesh, rng.random(mesh.shape))
        v = dirichlet_field(mesh, rng.random(mesh.shape))
        consider(PairField(u, v))
    return best
