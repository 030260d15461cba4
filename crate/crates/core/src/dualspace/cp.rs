//! Membership in the dual cone `M_m(S*)^+`, i.e. complete positivity of `θ_f`.

use serde::Serialize;

use super::choi::{complex_rows, readout_residual, readouts, ChoiCertificate, ChoiKind};
use super::functional::MatrixFunctional;
use super::seesaw::{ascend, start_vectors, Mode};
use crate::error::{Error, Result};
use crate::numkernel::{
    eig_hermitian, solve_feasibility, AffinePSDProblem, FeasibilityStatus, HermitianMatrix, DEFAULT_MAX_ITER,
};
use crate::opsys::{BallKind, Lmo, MatrixElement};
use crate::rng::XorShiftRng;
use crate::scalar::{Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CpStatus {
    Member,
    NonMember,
    Undecided,
}

/// Cone element `x` with `λ_min(θ_f^{(n)}(x)) < 0`, and the eigenvector.
#[derive(Clone, Debug)]
pub struct Falsifier<T: Real> {
    pub x: MatrixElement<T>,
    pub vector: Vec<Cx<T>>,
    pub min_eigenvalue: T,
    pub level: usize,
}

#[derive(Clone, Debug)]
pub struct CpReport<T: Real> {
    pub status: CpStatus,
    pub extension: FeasibilityStatus,
    pub certificate: Option<ChoiCertificate<T>>,
    pub falsifier: Option<Falsifier<T>>,
    /// How the status was reached.
    pub method: &'static str,
}

impl<T: Real> CpReport<T> {
    pub fn is_member(&self) -> bool {
        self.status == CpStatus::Member
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CpSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CpSettings {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: DEFAULT_MAX_ITER,
            restarts: 16,
            seed: 0x5EED,
        }
    }
}

/// `C ⪰ 0` in `M_d ⊗ M_m` with `Tr((b_sᵀ ⊗ E_lk) C) = f_kl(b_s)`.
pub fn extension_problem<T: Real>(f: &MatrixFunctional<T>) -> AffinePSDProblem<T> {
    let dm = f.system().ambient_dim() * f.level();
    let mut p = AffinePSDProblem::new(vec![dm]);
    for r in readouts(f) {
        let (re, im) = complex_rows(&r.g);
        p.push(re, r.target.re);
        p.push(im, r.target.im);
    }
    p
}

/// Searches cone contractions at levels `1..=level_max` for a negative
/// eigenvalue of `θ_f^{(n)}(x)`; returns the most negative one found.
pub fn falsify<T: Real>(f: &MatrixFunctional<T>, level_max: usize, restarts: usize, seed: u64) -> Option<Falsifier<T>> {
    let m = f.level();
    let mut best: Option<Falsifier<T>> = None;
    for n in 1..=level_max {
        let mut rng = XorShiftRng::fork(seed, 0xC0 + n as u64);
        let mut lmo = Lmo::new(f.system().clone(), n, BallKind::Positive);
        for z in start_vectors::<T>(n, m, restarts.max(1), &mut rng) {
            let eta = z.iter().map(|c| -*c).collect();
            let p = ascend(f, &mut lmo, z, eta, Mode::Hermitian(-T::one()));
            let lmin = -p.value;
            if p.residual <= T::floor_tol(1e-9) && best.as_ref().map(|b| lmin < b.min_eigenvalue).unwrap_or(true) {
                best = Some(Falsifier {
                    x: p.x,
                    vector: p.zeta,
                    min_eigenvalue: lmin,
                    level: n,
                });
            }
        }
        let threshold = falsify_threshold(f);
        if best.as_ref().map(|b| b.min_eigenvalue < -threshold).unwrap_or(false) {
            break;
        }
    }
    best
}

/// A falsifying eigenvalue must lie below `−1e−6·(1 + max|f|)`.
pub fn falsify_threshold<T: Real>(f: &MatrixFunctional<T>) -> T {
    T::lit(1e-6) * (T::one() + f.max_abs())
}

/// Decides `f ∈ M_m(S*)^+` for self-adjoint `f`.
///
/// A feasible extension Choi matrix certifies membership. Otherwise a
/// falsification search over cone contractions up to level `2m` looks for a
/// negative eigenvalue. For unital `S` the extension test is exact, so
/// infeasibility evidence alone yields non-membership; for non-unital `S`
/// non-membership needs a falsifier and the outcome may stay undecided.
pub fn is_cp<T: Real>(f: &MatrixFunctional<T>, settings: CpSettings) -> Result<CpReport<T>> {
    let tol = T::lit(settings.tol);
    if !f.is_self_adjoint(T::floor_tol(1e-9)) {
        return Err(Error::NotSelfAdjoint {
            asymmetry: f.self_adjoint_defect().as_f64(),
        });
    }
    let sys = f.system();
    let r = solve_feasibility(&extension_problem(f), tol, settings.max_iter)?;
    if let Some(w) = r.witness.as_ref() {
        let choi = w[0].clone();
        let lmin = eig_hermitian(&choi).min();
        let residual = readout_residual(f, choi.as_matrix()).max(-lmin).max(T::zero());
        let full = sys.dim() == sys.ambient_dim() * sys.ambient_dim();
        return Ok(CpReport {
            status: CpStatus::Member,
            extension: r.status,
            certificate: Some(ChoiCertificate {
                choi,
                kind: if full { ChoiKind::CpWitness } else { ChoiKind::Extension },
                residual,
            }),
            falsifier: None,
            method: "extension",
        });
    }
    let falsifier = falsify(f, 2 * f.level(), settings.restarts, settings.seed);
    let threshold = falsify_threshold(f);
    let found = falsifier
        .as_ref()
        .map(|b| b.min_eigenvalue < -threshold)
        .unwrap_or(false);
    let (status, method) = match (found, sys.is_unital(), r.status) {
        (true, _, _) => (CpStatus::NonMember, "falsifier"),
        (false, true, FeasibilityStatus::InfeasibleEvidence) => (CpStatus::NonMember, "extension-infeasible"),
        _ => (CpStatus::Undecided, "undecided"),
    };
    Ok(CpReport {
        status,
        extension: r.status,
        certificate: None,
        falsifier: if found { falsifier } else { None },
        method,
    })
}

/// Eigenvalue check of a claimed Choi certificate against `f`.
pub fn check_choi<T: Real>(f: &MatrixFunctional<T>, choi: &HermitianMatrix<T>) -> T {
    let lmin = eig_hermitian(choi).min();
    readout_residual(f, choi.as_matrix()).max(-lmin).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ComplexMatrix;
    use crate::opsys::{cone_membership, OperatorSystem};
    use crate::scalar::{creal, czero};
    use std::sync::Arc;

    type M = ComplexMatrix<f64>;

    fn m2() -> Arc<OperatorSystem<f64>> {
        Arc::new(
            OperatorSystem::new(
                &[M::unit(2, 0, 0), M::unit(2, 0, 1), M::unit(2, 1, 0), M::unit(2, 1, 1)],
                true,
                "m2",
            )
            .unwrap(),
        )
    }

    #[test]
    fn trace_is_cp() {
        let r = is_cp(&MatrixFunctional::trace(m2()), CpSettings::default()).unwrap();
        assert!(r.is_member());
        let c = r.certificate.unwrap();
        assert!(c.residual < 1e-6);
        assert!(c.choi.sub(&M::identity(2)).max_abs() < 1e-5);
    }

    #[test]
    fn signed_diagonal_is_falsified_at_level_one() {
        let s = Arc::new(OperatorSystem::new(&[M::unit(2, 0, 0), M::unit(2, 1, 1)], true, "linf2").unwrap());
        let f = MatrixFunctional::scalar(s, &[1.0, -1.0]).unwrap();
        let r = is_cp(&f, CpSettings::default()).unwrap();
        assert_eq!(r.status, CpStatus::NonMember);
        let w = r.falsifier.unwrap();
        assert_eq!(w.level, 1);
        assert!(w.x.concrete().sub(&M::diag_real(&[0.0, 1.0])).max_abs() < 1e-12);
        assert!((w.min_eigenvalue + 1.0).abs() < 1e-12);
    }

    #[test]
    fn transpose_is_not_cp() {
        let swap = M::from_fn(4, 4, |r, c| {
            let (i, k) = (r / 2, r % 2);
            let (j, l) = (c / 2, c % 2);
            if i == l && k == j {
                creal(1.0)
            } else {
                czero()
            }
        });
        let f = MatrixFunctional::from_choi(m2(), 2, &swap).unwrap();
        let r = is_cp(&f, CpSettings::default()).unwrap();
        assert_eq!(r.status, CpStatus::NonMember);
        let w = r.falsifier.unwrap();
        assert!(cone_membership(&w.x, 1e-9).member);
        assert!(w.min_eigenvalue < -0.4, "{}", w.min_eigenvalue);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let f = MatrixFunctional::new(m2(), 1, vec![Cx::new(0.0, 1.0), czero(), czero(), czero()]).unwrap();
        assert!(matches!(
            is_cp(&f, CpSettings::default()),
            Err(Error::NotSelfAdjoint { .. })
        ));
    }
}
