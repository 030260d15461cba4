//! Concrete operator systems `S ⊆ M_d`, their matrix levels `M_n(S)`, the
//! induced cones `M_n(S)^+ = M_n(S) ∩ PSD`, and decomposition constants.

pub mod decomposition;
pub mod element;
pub mod json;
pub mod lmo;
pub mod system;

use std::sync::Arc;

pub use decomposition::{
    adjoin_unit, decomposition_constant, decomposition_value, structured_samples, DecompositionMethod,
    DecompositionReport, DecompositionSample, DecompositionValue, LevelDecomposition, DECOMPOSITION_CAP,
};
pub use element::{cone_membership, congruence, element_norm, embed, ConeReport, MatrixElement};
pub use json::{matrix_from_json, matrix_to_json, system_from_json, system_to_json};
pub use lmo::{level_frame, BallKind, Lmo, LmoResult};
pub use system::OperatorSystem;

use crate::error::Result;
use crate::numkernel::ComplexMatrix;
use crate::scalar::Real;

/// Validated, shareable system; see [`OperatorSystem::new`].
pub fn make_system<T: Real>(
    matrices: &[ComplexMatrix<T>],
    unital: bool,
    label: impl Into<String>,
) -> Result<Arc<OperatorSystem<T>>> {
    OperatorSystem::new(matrices, unital, label).map(Arc::new)
}
