//! The dual of an operator system: matrix functionals `f ∈ M_m(S*)`, the
//! dual cone, the completely bounded dual norm and the positive-part norm
//! `‖f‖^d = sup{‖θ_f^{(n)}(x)‖ : x ∈ M_n(S)^+, ‖x‖ ≤ 1}`.

pub mod bidual;
pub mod cbnorm;
pub mod choi;
pub mod cp;
pub mod dnorm;
pub mod dualcone;
pub mod dualmap;
pub mod functional;
pub mod report;
pub mod seesaw;
pub mod verdict;
pub mod wittstock;

pub use bidual::{bidual_norm, BidualReport, BidualSettings};
pub use cbnorm::{cb_norm_seesaw, dual_norm};
pub use choi::{ChoiCertificate, ChoiKind};
pub use cp::{falsify, is_cp, CpReport, CpSettings, CpStatus, Falsifier};
pub use dnorm::{d_norm, d_norm_with_starts, DNormSettings};
pub use dualcone::{
    dual_cone_lineality, dual_cone_proper, frame_coords, real_rank, span_samples, LinealityReport, LinealityWitness,
    ProperReport, SpanLevel, SPAN_RANK_TOL,
};
pub use dualmap::{dual_map, DualMapReport, DualMapSample, DualMapSettings, LinearMap};
pub use functional::{apply_choi, theta_apply, theta_dual, MatrixFunctional};
pub use report::{LevelValue, NormMethod, NormReport, NormWitness};
pub use verdict::{
    dualizable_verdict, functional_sample, ratio_report, RatioReport, Verdict, VerdictReport, VerdictSettings,
};
pub use wittstock::{wittstock_decompose, wittstock_residuals, wittstock_signs, WittstockReport};
