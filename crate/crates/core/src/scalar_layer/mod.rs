//! Ordered vector spaces with polyhedral cones and norms, solved exactly by
//! linear programming. On diagonal operator systems these give independent
//! values for the positive-part norm and the dual norm.
//!
//! Closedness of the evaluation map into `ℓ∞(B ∩ K)` and the weak-*
//! statements about function-system duals carry no content in finite
//! dimensions; only the four computations below are housed here.

pub mod ops;
pub mod oracle;
pub mod simplex;
pub mod space;

pub use ops::{
    check_mass_dual, decomposition_radius, flat_norm, flat_norm_lp, gauge, in_cone, order_unit_check, Domination,
    FlatNorm, Obstruction, OrderUnitReport, RadiusReport,
};
pub use oracle::{diagonal_shadow, oracle_compare, shadow_functional, OracleReport};
pub use simplex::{nnls, simplex, LpBuilder, LpOutcome, LpSolution, Sense, PIVOT_TOL};
pub use space::{Ball, OrderedSpace};
