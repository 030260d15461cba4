//! Finite-dimensional operator systems and their duals.
//!
//! Concrete operator systems `S ⊆ M_d`, their matrix cones `M_n(S)^+`, the
//! completely bounded dual matrix norm, the positive-part dual norm `‖·‖^d`,
//! decomposition constants, complete-positivity certificates, and an exact
//! linear-programming layer for commutative (function-system) analogues.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`, which is what the tolerances are tuned for.

pub mod certificate;
pub mod corpus;
pub mod dualspace;
pub mod error;
pub mod numkernel;
pub mod opsys;
pub mod rng;
pub mod scalar;
pub mod scalar_layer;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

pub type Matrix = numkernel::ComplexMatrix<f64>;
pub type Hermitian = numkernel::HermitianMatrix<f64>;
pub type Problem = numkernel::AffinePSDProblem<f64>;

pub type System = std::sync::Arc<opsys::OperatorSystem<f64>>;
pub type Element = opsys::MatrixElement<f64>;
pub type Functional = dualspace::MatrixFunctional<f64>;
pub type Space = scalar_layer::OrderedSpace;
