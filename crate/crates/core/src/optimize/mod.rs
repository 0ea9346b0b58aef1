//! Damped least squares and the plane/sheet constrained bundle problems.

mod bundle;
mod dof;
mod gauge;
mod init;
mod lm;
mod result;

pub use bundle::{
    build_plane_problem, build_sheet_problem, BundleOptions, BundleProblem, InitialGuess, SheetModel,
    SurfaceConstraint, GAUGE_DIMENSION, MIN_PLANE_PAIRS,
};
pub use dof::count_dof;
pub use gauge::{gauge_align, spearman, SimilarityTransform};
pub use init::{
    canonical_camera, initial_guess_from_cameras, initial_guess_from_pairs, offset_camera, triangulate,
    CameraPrior,
};
pub use lm::{
    finite_difference_jacobian, levenberg_marquardt, FnProblem, NllsProblem, SolverOptions, SolverReport,
    Termination,
};
pub use result::{observation_errors, particle_rms, reprojection_rms, ReconstructionResult};
