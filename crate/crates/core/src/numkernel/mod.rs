//! Dense numerical engine: Hermitian eigendecomposition, PSD projection,
//! conic feasibility by alternating projections, linear objectives by ADMM,
//! and bisection.

pub mod affine;
pub mod bisect;
pub mod cone;
pub mod conic;
pub mod eig;
pub mod feasibility;
pub mod hvec;
pub mod matrix;

pub use affine::AffineSet;
pub use bisect::{bisect_optimal, Bisection, Direction, DEFAULT_BISECT_TOL};
pub use cone::{ConeProjector, ConeSpec, PsdBlock};
pub use conic::{AdmmSettings, AdmmState, ConicProgram, ConicSolution, ConicSolver};
pub use eig::{
    eig_hermitian, eig_hermitian_from, eig_of, hermitian_norm, operator_norm, project_psd, project_psd_capped,
    top_singular, Eigen, HermitianMatrix,
};
pub use feasibility::{
    solve_feasibility, solve_feasibility_from, AffinePSDProblem, FeasibilityResult, FeasibilityStatus,
    LinearConstraint, DEFAULT_FEAS_TOL, DEFAULT_MAX_ITER,
};
pub use hvec::{functional, hdim, hvec, unhvec};
pub use matrix::{outer, vec_inner, vec_norm, ComplexMatrix};
