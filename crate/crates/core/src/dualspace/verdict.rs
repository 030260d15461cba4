//! Comparison of the two dual norms and the dualizability verdict.

use serde::Serialize;
use std::sync::Arc;

use super::cbnorm::dual_norm;
use super::dnorm::{d_norm, DNormSettings};
use super::dualcone::{dual_cone_proper, ProperReport};
use super::functional::MatrixFunctional;
use super::report::NormReport;
use crate::error::Result;
use crate::numkernel::ComplexMatrix;
use crate::opsys::{decomposition_constant, DecompositionReport, OperatorSystem};
use crate::rng::XorShiftRng;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct RatioReport<T: Real> {
    pub dual_norm: NormReport<T>,
    pub d_norm: NormReport<T>,
    /// `dual_norm / d_norm`; `+∞` on overflow, `1` when both vanish.
    pub ratio: T,
    /// `d_norm ≤ tol < dual_norm`.
    pub overflow: bool,
    /// Unital or a `*`-algebra: the ratio must lie in `[1, 4]`.
    pub flagged: bool,
}

impl<T: Real> RatioReport<T> {
    /// `1 − slack ≤ ratio ≤ 4 + slack`; `None` for unflagged systems.
    pub fn within_bounds(&self, slack: T) -> Option<bool> {
        self.flagged
            .then(|| !self.overflow && self.ratio >= T::one() - slack && self.ratio <= T::lit(4.0) + slack)
    }
}

pub fn ratio_report<T: Real>(f: &MatrixFunctional<T>, settings: DNormSettings) -> RatioReport<T> {
    let tol = T::lit(settings.tol);
    let a = dual_norm(f, tol);
    let b = d_norm(f, settings);
    let sys = f.system();
    let overflow = b.value <= tol && a.value > tol;
    let ratio = if overflow {
        T::infinity()
    } else if a.value <= tol {
        T::one()
    } else {
        a.value / b.value
    };
    RatioReport {
        dual_norm: a,
        d_norm: b,
        ratio,
        overflow,
        flagged: sys.is_unital() || sys.is_algebra(),
    }
}

/// Scalar functionals for verdicts: the frame duals `F_t ↦ δ_st`, signed
/// sums `Σ ±δ_t` (all of them for `k ≤ 7`, otherwise 128 seeded ones), and
/// `random` seeded self-adjoint functionals.
pub fn functional_sample<T: Real>(sys: &Arc<OperatorSystem<T>>, random: usize, seed: u64) -> Vec<MatrixFunctional<T>> {
    let k = sys.frame().len();
    let one = |coef: &[T]| {
        let images: Vec<ComplexMatrix<T>> = coef.iter().map(|c| ComplexMatrix::diag_real(&[*c])).collect();
        MatrixFunctional::from_frame_images(sys.clone(), 1, &images)
    };
    let mut out = Vec::new();
    for t in 0..k {
        let mut c = vec![T::zero(); k];
        c[t] = T::one();
        out.push(one(&c));
    }
    let mut rng = XorShiftRng::fork(seed, 0x5165);
    let signs = |bits: u64| -> Vec<T> {
        (0..k)
            .map(|t| if bits >> t & 1 == 1 { -T::one() } else { T::one() })
            .collect()
    };
    if k <= 7 {
        for bits in 0..1u64 << k {
            out.push(one(&signs(bits)));
        }
    } else {
        for _ in 0..128 {
            out.push(one(&signs(rng.next_u64())));
        }
    }
    for _ in 0..random {
        out.push(MatrixFunctional::random_self_adjoint(sys.clone(), 1, &mut rng));
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct VerdictSettings {
    pub level_max: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Random self-adjoint functionals added to the structured sample.
    pub random_functionals: usize,
    /// Random elements per level for `r̂_N`.
    pub decomposition_samples: usize,
}

impl Default for VerdictSettings {
    fn default() -> Self {
        Self {
            level_max: 4,
            tol: 1e-7,
            restarts: 16,
            seed: 0x5EED,
            random_functionals: 32,
            decomposition_samples: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    DualizableAtLevel(usize),
    NotDualizable,
}

#[derive(Clone, Debug)]
pub struct VerdictReport<T: Real> {
    pub label: String,
    pub verdict: Verdict,
    pub decomposition: DecompositionReport<T>,
    pub properness: ProperReport,
    pub functionals: usize,
    /// Largest finite `dual_norm / d_norm` over the sample.
    pub max_ratio: T,
    pub overflows: usize,
    /// `4·r̂_N`: the ratio bound implied by the decomposition constant.
    pub implied_bound: T,
}

impl<T: Real> VerdictReport<T> {
    pub fn is_dualizable(&self) -> bool {
        matches!(self.verdict, Verdict::DualizableAtLevel(_))
    }
}

/// Dualizable at level `N` iff `r̂_N < ∞` and the dual cone is proper.
/// The ratio sample is informational and does not enter the verdict.
pub fn dualizable_verdict<T: Real>(
    sys: &Arc<OperatorSystem<T>>,
    settings: VerdictSettings,
) -> Result<VerdictReport<T>> {
    let tol = T::lit(settings.tol);
    let decomposition = decomposition_constant(
        sys,
        settings.level_max,
        settings.decomposition_samples,
        settings.seed,
        tol,
    )?;
    let properness = dual_cone_proper(sys, 2.min(settings.level_max), settings.seed);
    let ok = decomposition.is_finite() && properness.proper;
    let dn = DNormSettings {
        level_max: settings.level_max,
        tol: settings.tol,
        restarts: settings.restarts,
        seed: settings.seed,
    };
    let sample = functional_sample(sys, settings.random_functionals, settings.seed);
    let mut max_ratio = T::zero();
    let mut overflows = 0;
    for f in &sample {
        let r = ratio_report(f, dn);
        if r.overflow {
            overflows += 1;
        } else if r.ratio > max_ratio {
            max_ratio = r.ratio;
        }
    }
    Ok(VerdictReport {
        label: sys.label().to_string(),
        verdict: if ok {
            Verdict::DualizableAtLevel(settings.level_max)
        } else {
            Verdict::NotDualizable
        },
        implied_bound: T::lit(4.0) * decomposition.r_hat,
        decomposition,
        properness,
        functionals: sample.len(),
        max_ratio,
        overflows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_linfty, build_offdiag_m2};

    fn quick() -> VerdictSettings {
        VerdictSettings {
            level_max: 2,
            restarts: 4,
            random_functionals: 4,
            decomposition_samples: 4,
            ..Default::default()
        }
    }

    #[test]
    fn signed_diagonal_ratio_is_two() {
        let f = MatrixFunctional::scalar(build_linfty(2).unwrap(), &[1.0, -1.0]).unwrap();
        let r = ratio_report(&f, DNormSettings::default());
        assert!((r.ratio - 2.0).abs() < 1e-7, "{}", r.ratio);
        assert_eq!(r.within_bounds(1e-3), Some(true));
    }

    #[test]
    fn offdiag_overflows() {
        let f = MatrixFunctional::scalar(build_offdiag_m2().unwrap(), &[1.0, 0.5]).unwrap();
        let r = ratio_report(
            &f,
            DNormSettings {
                level_max: 2,
                ..Default::default()
            },
        );
        assert!(r.overflow);
        assert!(r.ratio.is_infinite());
        assert_eq!(r.within_bounds(1e-3), None);
    }

    #[test]
    fn verdicts() {
        let v = dualizable_verdict(&build_linfty(3).unwrap(), quick()).unwrap();
        assert_eq!(v.verdict, Verdict::DualizableAtLevel(2));
        assert!((v.decomposition.r_hat - 1.0).abs() < 1e-9);
        assert!(v.max_ratio <= 4.0 + 1e-6);
        assert_eq!(v.overflows, 0);
        let off = dualizable_verdict(&build_offdiag_m2().unwrap(), quick()).unwrap();
        assert_eq!(off.verdict, Verdict::NotDualizable);
        assert!(!off.properness.proper);
    }
}
