"""Two positive solutions of a concave-convex quasilinear elliptic system.

The package discretizes the system on uniform grids, classifies pairs by
their position on the natural constraint set (the Plus/Zero/Minus branches
determined by the sign of the second fibering derivative), and minimizes
the energy on each nondegenerate branch to produce two distinct positive
solutions. Companion routines certify the structural facts the method
relies on: coercivity of the energy on the constraint set, emptiness of
the degenerate branch for small parameters, and strict negativity of the
Plus-branch energy level.
"""

from .errors import (
    BranchInfeasible,
    ConfigInvalid,
    ConfigNotFound,
    DistinctnessFailure,
    InvalidConstant,
    InvalidMesh,
    InvalidParams,
    IoFailure,
    MeshMismatch,
    NehariError,
    NonConvergence,
    NonpositiveT,
    NoScaling,
    NotOnManifold,
    UnknownPreset,
    ZeroPair,
)
from .mesh import (
    Field,
    Mesh,
    PairField,
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
from .energy import (
    NehariClass,
    NehariDiagnostics,
    ProblemParams,
    classify,
    energy_J,
    manifold_energy_forms,
    nehari_quantities,
    signed_power,
    single_parameter_instance,
    w_norm,
    weak_residual,
)
from .fibering import (
    FiberingAnalysis,
    FiberingRoot,
    ThresholdCertificate,
    coercivity_lower_bound,
    estimate_lambda1,
    fibering_phi,
    find_nehari_scalings,
    m0_empty_certificate,
    project_to_branch,
)
from .sobolev import (
    EmbeddingConstant,
    best_sobolev_constant,
    first_eigenpair,
    pair_reduction_factor,
)
from .descent import (
    SolverOptions,
    SolverReport,
    VerificationRecord,
    find_two_solutions,
    minimize_on_branch,
    pair_distinctness,
    verify_solution,
)
from .cli import RunConfig, RunSummary, load_config, main, run_command, write_report

__version__ = "0.1.0"

__all__ = [
    "BranchInfeasible",
    "ConfigInvalid",
    "ConfigNotFound",
    "DistinctnessFailure",
    "EmbeddingConstant",
    "Field",
    "FiberingAnalysis",
    "FiberingRoot",
    "InvalidConstant",
    "InvalidMesh",
    "InvalidParams",
    "IoFailure",
    "Mesh",
    "MeshMismatch",
    "NehariClass",
    "NehariDiagnostics",
    "NehariError",
    "NonConvergence",
    "NonpositiveT",
    "NoScaling",
    "NotOnManifold",
    "PairField",
    "ProblemParams",
    "RunConfig",
    "RunSummary",
    "SolverOptions",
    "SolverReport",
    "ThresholdCertificate",
    "UnknownPreset",
    "VerificationRecord",
    "ZeroPair",
    "best_sobolev_constant",
    "build_mesh",
    "bump_field",
    "classify",
    "coercivity_lower_bound",
    "dirichlet_field",
    "energy_J",
    "estimate_lambda1",
    "fibering_phi",
    "find_nehari_scalings",
    "find_two_solutions",
    "first_eigenpair",
    "gradient_energy",
    "gradient_energy_gradient",
    "hat_field",
    "integrate",
    "interior_laplacian",
    "load_config",
    "m0_empty_certificate",
    "main",
    "manifold_energy_forms",
    "minimize_on_branch",
    "nehari_quantities",
    "pair_distinctness",
    "pair_reduction_factor",
    "project_to_branch",
    "read_field_csv",
    "run_command",
    "sample_weight",
    "signed_power",
    "single_parameter_instance",
    "verify_solution",
    "w_norm",
    "weak_residual",
    "write_field_csv",
]
