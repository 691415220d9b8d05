"""Python front end for the limited-view acousto-electric tomography core."""

from ._core import (
    AdmissibilityError,
    BoundaryPair,
    Mesh,
    SolverError,
    adapted_pair,
    check_admissibility,
    cutoff_pair,
    disk_mesh,
    eigen_floor,
    log_sym,
    pair_from_samples,
    phantom,
    run_experiment,
    sweep_csv,
    winding_index,
)

__all__ = [
    "AdmissibilityError",
    "BoundaryPair",
    "Mesh",
    "SolverError",
    "adapted_pair",
    "check_admissibility",
    "cutoff_pair",
    "disk_mesh",
    "eigen_floor",
    "log_sym",
    "pair_from_samples",
    "phantom",
    "run_experiment",
    "sweep_csv",
    "winding_index",
]
