//! `φ = φ₁ − φ₂ + iφ₃ − iφ₄` with CP contractions `φ_j`, for a complete
//! contraction `φ = θ_f: S → M_m`.
//!
//! The cb-norm certificate `J = [[J₁, C_Θ], [C_Θ†, J₂]]` already contains a
//! solution: the compressions `C_λ = ¼(J₁ + λ C_Θ + λ̄ C_Θ† + J₂)` by the
//! vectors `(1, λ)`, `λ ∈ {1, −1, −i, i}`, are PSD with `Tr₁ C_λ ⪯ t·I`,
//! and `Σ λ̄ C_λ = C_Θ`. When this start misses the tolerance, the joint
//! feasibility problem over the four Choi blocks is solved from it.

use super::cbnorm::dual_norm;
use super::choi::{complex_rows, hvec_basis, output_marginal, place, readouts, ChoiCertificate, ChoiKind};
use super::functional::MatrixFunctional;
use crate::error::{Error, Result};
use crate::numkernel::hvec::functional as hfunctional;
use crate::numkernel::{
    eig_hermitian, hvec, solve_feasibility_from, AffinePSDProblem, ComplexMatrix, FeasibilityStatus, HermitianMatrix,
    DEFAULT_MAX_ITER,
};
use crate::scalar::{ci, creal, Cx, Real};

#[derive(Clone, Debug)]
pub struct WittstockReport<T: Real> {
    /// `φ₁, φ₂, φ₃, φ₄` in that order.
    pub parts: Vec<ChoiCertificate<T>>,
    /// Max read-out mismatch of `Σ σ_j C_j` against `f`.
    pub reconstruction: T,
    /// `max_j max(0, −λ_min(C_j))`.
    pub psd_violation: T,
    /// `max_j max(0, λ_max(Tr₁ C_j) − 1)`.
    pub cap_violation: T,
    pub cb_norm: T,
    pub status: FeasibilityStatus,
    /// `paulsen-compression` or `feasibility`.
    pub method: &'static str,
}

impl<T: Real> WittstockReport<T> {
    pub fn residual(&self) -> T {
        self.reconstruction.max(self.psd_violation).max(self.cap_violation)
    }
}

/// Signs of the four parts: `φ = Σ σ_j φ_j`.
pub fn wittstock_signs<T: Real>() -> [Cx<T>; 4] {
    [creal(T::one()), creal(-T::one()), ci(), -ci::<T>()]
}

/// `(reconstruction, psd, cap)` violations of four Choi blocks.
pub fn wittstock_residuals<T: Real>(f: &MatrixFunctional<T>, parts: &[ComplexMatrix<T>]) -> (T, T, T) {
    let d = f.system().ambient_dim();
    let m = f.level();
    let sigma = wittstock_signs::<T>();
    let mut combo = ComplexMatrix::zeros(d * m, d * m);
    for (c, s) in parts.iter().zip(sigma) {
        combo.axpy(s, c);
    }
    let recon = super::choi::readout_residual(f, &combo);
    let mut psd = T::zero();
    let mut cap = T::zero();
    for c in parts {
        psd = psd.max(-eig_hermitian(&HermitianMatrix::from_hermitian_part(c)).min());
        let marg = output_marginal(c, d, m);
        cap = cap.max(eig_hermitian(&HermitianMatrix::from_hermitian_part(&marg)).max() - T::one());
    }
    (recon, psd.max(T::zero()), cap.max(T::zero()))
}

fn problem<T: Real>(f: &MatrixFunctional<T>) -> AffinePSDProblem<T> {
    let d = f.system().ambient_dim();
    let m = f.level();
    let dm = d * m;
    let mut p = AffinePSDProblem::new(vec![dm, dm, dm, dm, m, m, m, m]);
    let hc = crate::numkernel::hdim(dm);
    let hm = crate::numkernel::hdim(m);
    let total = 4 * hc + 4 * hm;
    let sigma = wittstock_signs::<T>();
    for r in readouts(f) {
        let mut re_row = vec![T::zero(); total];
        let mut im_row = vec![T::zero(); total];
        for (j, s) in sigma.iter().enumerate() {
            let (re, im) = complex_rows(&r.g.scale(*s));
            re_row[j * hc..(j + 1) * hc].copy_from_slice(&re);
            im_row[j * hc..(j + 1) * hc].copy_from_slice(&im);
        }
        p.push(re_row, r.target.re);
        p.push(im_row, r.target.im);
    }
    let eye_d = ComplexMatrix::<T>::identity(d);
    let id_m = hvec(&ComplexMatrix::<T>::identity(m));
    for j in 0..4 {
        for (a, basis) in hvec_basis::<T>(m).iter().enumerate() {
            let mut row = vec![T::zero(); total];
            row[j * hc..(j + 1) * hc].copy_from_slice(&hfunctional(&place(&eye_d.kron(basis), dm, 0, 0)));
            row[4 * hc + j * hm + a] = T::one();
            p.push(row, id_m[a]);
        }
    }
    p
}

/// Decomposes `θ_f` for `‖f‖_cb ≤ 1 + tol` on a unital system or a full
/// matrix algebra.
pub fn wittstock_decompose<T: Real>(f: &MatrixFunctional<T>, tol: T) -> Result<WittstockReport<T>> {
    let sys = f.system();
    let d = sys.ambient_dim();
    if !(sys.is_unital() || sys.dim() == d * d) {
        return Err(Error::Invalid(format!(
            "decomposition needs a unital system or a full matrix algebra; '{}' is neither",
            sys.label()
        )));
    }
    let cb = dual_norm(f, tol);
    if cb.value > T::one() + tol {
        return Err(Error::Invalid(format!(
            "map is not a complete contraction: cb norm {:.9}",
            cb.value.as_f64()
        )));
    }
    let m = f.level();
    let dm = d * m;
    let j = cb.paulsen.as_ref().expect("SDP certificate").as_matrix().clone();
    let (j1, jt, j2) = (
        j.submatrix(0, 0, dm, dm),
        j.submatrix(0, dm, dm, dm),
        j.submatrix(dm, dm, dm, dm),
    );
    let quarter = T::lit(0.25);
    let lambdas = [creal(T::one()), creal(-T::one()), -ci::<T>(), ci()];
    let mut parts: Vec<ComplexMatrix<T>> = lambdas
        .iter()
        .map(|l| {
            let mut c = j1.add(&j2);
            c.axpy(*l, &jt);
            c.axpy(l.conj(), &jt.adjoint());
            c.scale_real(quarter).hermitian_part()
        })
        .collect();
    let (mut recon, mut psd, mut cap) = wittstock_residuals(f, &parts);
    let mut status = FeasibilityStatus::Feasible;
    let mut method = "paulsen-compression";
    if recon.max(psd).max(cap) > tol {
        let p = problem(f);
        let mut start = Vec::new();
        for c in &parts {
            start.extend(hvec(c));
        }
        for c in &parts {
            let slack = ComplexMatrix::identity(m).sub(&output_marginal(c, d, m));
            start.extend(hvec(&slack));
        }
        let r = solve_feasibility_from(&p, tol, DEFAULT_MAX_ITER, Some(&start))?;
        status = r.status;
        method = "feasibility";
        let blocks = p.split(&r.point);
        let candidate: Vec<ComplexMatrix<T>> = blocks[..4].iter().map(|b| b.as_matrix().clone()).collect();
        let (r2, p2, c2) = wittstock_residuals(f, &candidate);
        if r2.max(p2).max(c2) < recon.max(psd).max(cap) {
            parts = candidate;
            (recon, psd, cap) = (r2, p2, c2);
        }
    }
    let certs = parts
        .into_iter()
        .map(|c| {
            let h = HermitianMatrix::from_hermitian_part(&c);
            let lmin = eig_hermitian(&h).min();
            let marg = eig_hermitian(&HermitianMatrix::from_hermitian_part(&output_marginal(&c, d, m))).max();
            ChoiCertificate {
                choi: h,
                kind: ChoiKind::WittstockPair,
                residual: (-lmin).max(marg - T::one()).max(T::zero()),
            }
        })
        .collect();
    Ok(WittstockReport {
        parts: certs,
        reconstruction: recon,
        psd_violation: psd,
        cap_violation: cap,
        cb_norm: cb.value,
        status,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_full, build_linfty};
    use crate::rng::XorShiftRng;

    #[test]
    fn negative_half_trace() {
        let f = MatrixFunctional::trace(build_full(2).unwrap()).scale(creal(-0.5));
        let r = wittstock_decompose(&f, 1e-7).unwrap();
        assert!(
            r.residual() <= 1e-7,
            "{:?}",
            (r.reconstruction, r.psd_violation, r.cap_violation)
        );
    }

    #[test]
    fn half_transpose() {
        let f = MatrixFunctional::from_map(build_full(2).unwrap(), 2, |a| a.transpose().scale_real(0.5)).unwrap();
        let r = wittstock_decompose(&f, 1e-6).unwrap();
        assert!(
            r.residual() <= 1e-6,
            "{:?}",
            (r.reconstruction, r.psd_violation, r.cap_violation)
        );
        assert_eq!(r.parts.len(), 4);
    }

    #[test]
    fn random_contractions() {
        let mut rng = XorShiftRng::new(4);
        let sys = build_linfty(3).unwrap();
        for _ in 0..3 {
            let g = MatrixFunctional::random_self_adjoint(sys.clone(), 2, &mut rng);
            let t = dual_norm(&g, 1e-7).value;
            let f = g.scale(creal(1.0 / t));
            let r = wittstock_decompose(&f, 1e-6).unwrap();
            assert!(
                r.residual() <= 1e-6,
                "{:?}",
                (r.reconstruction, r.psd_violation, r.cap_violation)
            );
        }
    }

    #[test]
    fn joint_feasibility_from_cold_start() {
        let f = MatrixFunctional::from_map(build_full(2).unwrap(), 2, |a| a.transpose().scale_real(0.5)).unwrap();
        let p = problem(&f);
        let r = crate::numkernel::solve_feasibility(&p, 1e-8, DEFAULT_MAX_ITER).unwrap();
        assert!(r.is_feasible(), "{:?}", r.status);
        let parts: Vec<_> = p.split(&r.point)[..4].iter().map(|b| b.as_matrix().clone()).collect();
        let (recon, psd, cap) = wittstock_residuals(&f, &parts);
        assert!(recon.max(psd).max(cap) <= 1e-6, "{recon} {psd} {cap}");
    }

    #[test]
    fn rejects_large_maps() {
        let f = MatrixFunctional::trace(build_full(2).unwrap());
        assert!(wittstock_decompose(&f, 1e-7).is_err());
    }
}
