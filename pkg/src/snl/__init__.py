"""Sensor network localization toolkit.

Euclidean distance matrix operator calculus, quartic localization objectives
on complete and partial measurement graphs, a trust-region solver, landscape
certification utilities, numerical property checks, and a reproducible
experiment harness with a CSV-emitting command line interface.
"""

from .edm import (
    center,
    centered_diag_part,
    centered_subspace_basis,
    centering_matrix,
    edm_adjoint,
    edm_adjoint_inv,
    edm_inverse,
    edm_map,
    edm_normal,
    edm_normal_inv,
    normal_correction,
    project_centered,
)
from .errors import (
    InvalidInputError,
    NumericalFailureError,
    PreconditionError,
    RetryExhaustedError,
    UnsupportedSizeError,
)
from .harness import (
    CSV_HEADER,
    CellSummary,
    SweepSpec,
    Tolerances,
    TrialRecord,
    run_noisy_protocol,
    run_trial,
    sample_er_graph,
    sample_ground_truth,
    summarize,
    sweep,
    write_csv,
)
from .landscape import (
    CriticalityReport,
    ReflectionExample,
    align,
    best_linear_map,
    build_reflection_example,
    certify,
    dense_hessian,
    mixed7_example,
    planar7_example,
    preset_example,
    recovery_distance,
    simplex_example,
)
from .objective import (
    CompleteInstance,
    MaskedInstance,
    MeasurementGraph,
    complete_graph,
    squared_distance_targets,
    symmetry_basis,
)
from .theory import (
    AltSensingMap,
    CertificateBundle,
    PropertyReport,
    certificate_matrices,
    check_certificates,
    check_edm_properties,
    check_second_order_inequality,
    check_sensing_map_properties,
    gaussian_condition,
    make_random_sensing_map,
    rip_lower_bound,
    sqrtn_threshold,
)
from .trust_region import CONVERGED, MAX_ITERS, STALLED, SolveResult, SolverOptions, minimize

__all__ = [
    "center",
    "centered_diag_part",
    "centered_subspace_basis",
    "centering_matrix",
    "edm_adjoint",
    "edm_adjoint_inv",
    "edm_inverse",
    "edm_map",
    "edm_normal",
    "edm_normal_inv",
    "normal_correction",
    "project_centered",
    "InvalidInputError",
    "NumericalFailureError",
    "PreconditionError",
    "RetryExhaustedError",
    "UnsupportedSizeError",
    "CSV_HEADER",
    "CellSummary",
    "SweepSpec",
    "Tolerances",
    "TrialRecord",
    "run_noisy_protocol",
    "run_trial",
    "sample_er_graph",
    "sample_ground_truth",
    "summarize",
    "sweep",
    "write_csv",
    "CriticalityReport",
    "ReflectionExample",
    "align",
    "best_linear_map",
    "build_reflection_example",
    "certify",
    "dense_hessian",
    "mixed7_example",
    "planar7_example",
    "preset_example",
    "recovery_distance",
    "simplex_example",
    "CompleteInstance",
    "MaskedInstance",
    "MeasurementGraph",
    "complete_graph",
    "squared_distance_targets",
    "symmetry_basis",
    "AltSensingMap",
    "CertificateBundle",
    "PropertyReport",
    "certificate_matrices",
    "check_certificates",
    "check_edm_properties",
    "check_second_order_inequality",
    "check_sensing_map_properties",
    "gaussian_condition",
    "make_random_sensing_map",
    "rip_lower_bound",
    "sqrtn_threshold",
    "CONVERGED",
    "MAX_ITERS",
    "STALLED",
    "SolveResult",
    "SolverOptions",
    "minimize",
]
