"""Projected gradient descent over the two manifold branches.

Each iteration computes the weak residual, preconditions it with the inverse
discrete Dirichlet Laplacian (a smoothed gradient direction; the raw residual
direction needs steps bounded by the mesh spacing squared and stalls far from
the residual tolerance), steps against it, and re-projects the trial pair
onto the requested branch through its fibering scaling. A backtracking line
search accepts a step when the re-projected energy satisfies the Armijo
decrease, or, near the floating-point resolution of the energy, when the
energy does not increase and the residual shrinks by at least ten percent.
Convergence is declared only when the residual max-norm reaches
tol_residual; the energy-decrease test acts as a stagnation exit and fires
only when the residual also failed to shrink.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse.linalg as spla

from .energy import (
    NehariClass,
    energy_J,
    nehari_quantities,
    weak_residual,
)
from .errors import (
    BranchInfeasible,
    DistinctnessFailure,
    InvalidParams,
    MeshMismatch,
    NonConvergence,
    NoScaling,
    ZeroPair,
)
from .fibering import m0_empty_certificate, project_to_branch
from .mesh import (
    PairField,
    bump_field,
    dirichlet_field,
    embed_interior,
    hat_field,
    integrate,
    interior_laplacian,
    interior_values,
)
from .sobolev import best_sobolev_constant, first_eigenpair

RESIDUAL_PROGRESS = 0.9  # fallback acceptance requires a 10% residual decrease
STALL_WINDOW = 5  # iterations without compound progress before giving up on a seed
DISTINCTNESS_THRESHOLD = 1e-3


@dataclass
class SolverOptions:
    """Knobs of the branch minimization loop.

    seed_strategy is one of "hat", "eigenfunction", or "random:<integer>"
    (plain "random" uses seed 0). positivity_floor is the strict lower bound
    interior minima must exceed for a solution to count as positive.
    """

    max_iterations: int = 5000
    step_initial: float = 1.0
    armijo_factor: float = 0.5
    armijo_slope: float = 1e-4
    tol_residual: float = 1e-8
    tol_energy: float = 1e-12
    seed_strategy: str = "hat"
    positivity_floor: float = 0.0

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidParams("max_iterations must be positive")
        if not self.step_initial > 0.0:
            raise InvalidParams("step_initial must be positive")
        if not 0.0 < self.armijo_factor < 1.0:
            raise InvalidParams("armijo_factor must lie in (0, 1)")
        if not 0.0 < self.armijo_slope < 1.0:
            raise InvalidParams("armijo_slope must lie in (0, 1)")
        if not (self.tol_residual > 0.0 and self.tol_energy > 0.0):
            raise InvalidParams("tolerances must be positive")
        if self.positivity_floor < 0.0:
            raise InvalidParams("positivity_floor must be nonnegative")
        _parse_seed_strategy(self.seed_strategy)


def _parse_seed_strategy(strategy):
    kind, _, arg = str(strategy).partition(":")
    kind = kind.strip().lower()
    if kind == "hat":
        return "hat", None
    if kind == "eigenfunction":
        return "eigenfunction", None
    if kind == "random":
        try:
            return "random", int(arg) if arg else 0
        except ValueError:
            raise InvalidParams(f"bad random seed in seed_strategy {strategy!r}") from None
    raise InvalidParams(f"unknown seed_strategy {strategy!r}")


@dataclass
class SolverReport:
    """Outcome of one branch minimization.

    constraint_residual is relative to max(K, 1). energy_history holds the
    energy after the initial projection and after every accepted step, and
    is non-increasing.
    """

    branch: NehariClass
    converged: bool
    iterations: int
    energy: float
    energy_history: list = dc_field(repr=False)
    residual_max: float
    constraint_residual: float
    min_interior_u: float
    min_interior_v: float
    solution: PairField = dc_field(repr=False)


def _nonneg_pair(mesh, u_values, v_values):
    u = dirichlet_field(mesh, np.maximum(0.0, u_values))
    v = dirichlet_field(mesh, np.maximum(0.0, v_values))
    return PairField(u, v)


def _seed_candidates(params, options):
    """Up to ten nonnegative Dirichlet seed pairs, strategy seed first.

    After the configured seed the ladder tries the first eigenfunction,
    weight-aligned seeds (positive parts of f and g masked by the
    eigenfunction, needed when sign-changing weights make symmetric seeds
    infeasible for the Plus branch), the hat, shifted bumps, and seeded
    random fields.
    """
    mesh = params.mesh
    kind, seed = _parse_seed_strategy(options.seed_strategy)
    rng = np.random.default_rng(seed if seed is not None else 0)
    eig_field = None

    def eigenfunction():
        nonlocal eig_field
        if eig_field is None:
            _, eig_field = first_eigenpair(mesh)
        return eig_field

    candidates = []
    if kind == "hat":
        hat = hat_field(mesh)
        candidates.append(PairField(hat, hat))
    elif kind == "eigenfunction":
        eig = eigenfunction()
        candidates.append(PairField(eig, eig))
    else:
        candidates.append(_nonneg_pair(mesh, rng.random(mesh.shape), rng.random(mesh.shape)))

    def ladder():
        eig = eigenfunction()
        yield PairField(eig, eig)
        masked_f = np.maximum(0.0, params.f.values) * eig.values
        masked_g = np.maximum(0.0, params.g.values) * eig.values
        if np.any(masked_f) and np.any(masked_g):
            yield _nonneg_pair(mesh, masked_f, masked_g)
        hat = hat_field(mesh)
        yield PairField(hat, hat)
        for center in (0.125, 0.875, 0.25, 0.75):
            yield PairField(bump_field(mesh, center, 0.125), bump_field(mesh, center, 0.125))
        while True:
            yield _nonneg_pair(mesh, rng.random(mesh.shape), rng.random(mesh.shape))

    for pair in ladder():
        if len(candidates) >= 10:
            break
        if any(np.array_equal(pair.u.values, c.u.values)
               and np.array_equal(pair.v.values, c.v.values) for c in candidates):
            continue
        candidates.append(pair)
    return candidates


def _interior_min(mesh, values):
    return float(np.min(values[mesh.interior_slices()]))


def _residual_max(residual):
    return max(
        float(np.max(np.abs(residual.u.values))),
        float(np.max(np.abs(residual.v.values))),
    )


def _make_report(params, branch, pair, history, iterations, converged, residual_value):
    mesh = params.mesh
    diag = nehari_quantities(params, pair)
    return SolverReport(
        branch=branch,
        converged=converged,
        iterations=iterations,
        energy=history[-1],
        energy_history=list(history),
        residual_max=residual_value,
        constraint_residual=abs(diag.constraint) / max(diag.K, 1.0),
        min_interior_u=_interior_min(mesh, pair.u.values),
        min_interior_v=_interior_min(mesh, pair.v.values),
        solution=pair,
    )


def _descend(params, branch, start_pair, options, lu):
    """Run the projected descent loop from an already-projected pair.

    Returns (report, budget_exhausted).
    """
    mesh = params.mesh
    weights = mesh.quadrature_weights
    pair = start_pair
    energy = energy_J(params, pair)
    history = [energy]
    residual = weak_residual(params, pair)
    res_max = _residual_max(residual)
    res_history = [res_max]
    iterations = 0

    def precondition(res_field):
        return embed_interior(mesh, lu.solve(interior_values(mesh, res_field.values)))

    while iterations < options.max_iterations:
        if res_max <= options.tol_residual:
            return _make_report(params, branch, pair, history, iterations, True, res_max), False
        du = precondition(residual.u)
        dv = precondition(residual.v)
        slope = integrate(mesh, residual.u.values * du) + integrate(
            mesh, residual.v.values * dv
        )
        alpha = options.step_initial
        accepted = False
        while alpha > 1e-16:
            try:
                trial = project_to_branch(
                    params,
                    PairField(
                        dirichlet_field(mesh, pair.u.values - alpha * du),
                        dirichlet_field(mesh, pair.v.values - alpha * dv),
                    ),
                    branch,
                )
            except (NoScaling, ZeroPair):
                alpha *= options.armijo_factor
                continue
            trial_energy = energy_J(params, trial)
            trial_residual = weak_residual(params, trial)
            trial_res_max = _residual_max(trial_residual)
            armijo = trial_energy <= energy - options.armijo_slope * alpha * slope
            fallback = trial_energy <= energy and trial_res_max <= RESIDUAL_PROGRESS * res_max
            if armijo or fallback:
                accepted = True
                break
            alpha *= options.armijo_factor
        if not accepted:
            # no acceptable step exists: stationary to float resolution
            return (
                _make_report(params, branch, pair, history, iterations,
                             res_max <= options.tol_residual, res_max),
                False,
            )
        pair, energy, residual, res_max = trial, trial_energy, trial_residual, trial_res_max
        history.append(energy)
        res_history.append(res_max)
        iterations += 1
        # stall: over the last STALL_WINDOW accepted steps the energy moved
        # by less than tol_energy relative and the residual failed to drop
        # 10%; single slow steps in a converging tail do not trigger this
        if iterations >= STALL_WINDOW:
            window_decrease = history[-STALL_WINDOW - 1] - energy
            window_res = res_history[-STALL_WINDOW - 1]
            if (
                window_decrease <= options.tol_energy * abs(energy)
                and res_max > RESIDUAL_PROGRESS * window_res
            ):
                return (
                    _make_report(params, branch, pair, history, iterations,
                                 res_max <= options.tol_residual, res_max),
                    False,
                )
    report = _make_report(params, branch, pair, history, iterations,
                          res_max <= options.tol_residual, res_max)
    return report, not report.converged


def minimize_on_branch(params, mesh, branch, options=None):
    """Minimize J over one branch by projected, re-projected gradient descent.

    Seeds are clamped nonnegative and projected onto the branch; infeasible
    seeds are replaced from a deterministic ladder (up to ten attempts).
    Raises BranchInfeasible when no seed admits the branch, NonConvergence
    (with the partial report attached) when the iteration budget runs out.
    A stagnation exit returns a converged=False report instead of raising.
    """
    if options is None:
        options = SolverOptions()
    if mesh != params.mesh:
        raise MeshMismatch("mesh argument does not match the params mesh")
    if branch not in (NehariClass.PLUS, NehariClass.MINUS):
        raise InvalidParams(f"branch must be Plus or Minus, got {branch}")

    lu = spla.splu(interior_laplacian(mesh))
    best_report = None
    projected_any = False
    for seed_pair in _seed_candidates(params, options):
        try:
            start = project_to_branch(params, seed_pair, branch)
        except (NoScaling, ZeroPair):
            continue
        projected_any = True
        report, budget_exhausted = _descend(params, branch, start, options, lu)
        if budget_exhausted:
            raise NonConvergence(
                f"{branch} branch: residual {report.residual_max:.3e} after "
                f"{report.iterations} iterations",
                report=report,
            )
        if report.converged:
            return report
        if best_report is None or report.residual_max < best_report.residual_max:
            best_report = report
    if not projected_any:
        raise BranchInfeasible(
            f"no seed admits the {branch} branch for these parameters"
        )
    return best_report


def pair_distinctness(mesh, first, second):
    """Relative quadrature L2 distance between two pairs."""
    du = first.u.values - second.u.values
    dv = first.v.values - second.v.values
    num = math.sqrt(integrate(mesh, du ** 2) + integrate(mesh, dv ** 2))

    def size(pair):
        return math.sqrt(
            integrate(mesh, pair.u.values ** 2) + integrate(mesh, pair.v.values ** 2)
        )

    den = max(size(first), size(second))
    if den == 0.0:
        return 0.0
    return num / den


def find_two_solutions(params, mesh, options=None):
    """Run both branch minimizations and measure how far apart they land.

    Emits a warning (not an error) when the parameters sit above the
    certified degeneracy threshold. Returns (plus_report, minus_report,
    distinctness); raises DistinctnessFailure when both branches converged
    yet the solutions coincide within the threshold.
    """
    if options is None:
        options = SolverOptions()
    s_q = best_sobolev_constant(mesh, params.p, params.q)
    s_rs = best_sobolev_constant(mesh, params.p, params.rs)
    certificate = m0_empty_certificate(params, s_rs.value, s_q.value, params.lam, params.mu)
    if not certificate.certified:
        warnings.warn(
            f"parameters (lambda={params.lam}, mu={params.mu}) are above the certified "
            f"threshold lambda0={certificate.lambda0:.6g}; branch structure is not guaranteed",
            stacklevel=2,
        )
    plus = minimize_on_branch(params, mesh, NehariClass.PLUS, options)
    minus = minimize_on_branch(params, mesh, NehariClass.MINUS, options)
    distinctness = pair_distinctness(mesh, plus.solution, minus.solution)
    if plus.converged and minus.converged and distinctness <= DISTINCTNESS_THRESHOLD:
        failure = DistinctnessFailure(
            f"branch solutions coincide: relative distance {distinctness:.3e}",
            distinctness=distinctness,
        )
        failure.plus = plus
        failure.minus = minus
        raise failure
    return plus, minus, distinctness


@dataclass
class VerificationRecord:
    """Independent re-check of a claimed solution pair."""

    residual_max: float
    constraint_residual: float
    positivity: float
    branch: NehariClass


def verify_solution(params, pair, tol=1e-8):
    """Recompute residual, constraint, positivity, and branch from scratch.

    Works purely from the pair and the parameters, independent of any
    solver state. The tol argument is recorded by callers comparing
    residual_max against it; it does not alter the computation.
    """
    if pair.is_zero():
        raise ZeroPair("verification requires a nonzero pair")
    mesh = params.mesh
    diag = nehari_quantities(params, pair)
    residual = weak_residual(params, pair)
    return VerificationRecord(
        residual_max=_residual_max(residual),
        constraint_residual=abs(diag.constraint) / max(diag.K, 1.0),
        positivity=min(_interior_min(mesh, pair.u.values), _interior_min(mesh, pair.v.values)),
        branch=diag.branch,
    )
