//! `‖f‖_{M_m(S*)} = ‖θ_f‖_cb`.
//!
//! Primary route: over all extensions `Θ: M_d → M_m` of `θ_f`, minimize `t`
//! such that `[[Ψ₁, Θ], [Θ*, Ψ₂]]` is CP with `Ψ_i(I) ⪯ t`. In Choi form this
//! is one PSD block `J = [[J₁, C_Θ], [C_Θ†, J₂]]` of size `2dm`, two slack
//! blocks `t·I − Tr₁ J_i ⪰ 0`, and the read-out of `C_Θ` on the basis of `S`.
//!
//! Cross-check: `‖θ_f‖_cb = ‖θ_f^{(m)}‖`, estimated by a see-saw over the
//! operator ball of `M_m(S)`.

use super::choi::{complex_rows, hvec_basis, output_marginal, place, readouts};
use super::functional::{theta_apply, MatrixFunctional};
use super::report::{LevelValue, NormMethod, NormReport, NormWitness};
use super::seesaw::{ascend, start_vectors, Mode};
use crate::numkernel::hvec::functional as hfunctional;
use crate::numkernel::{
    eig_hermitian, hdim, hvec, unhvec, AdmmSettings, AffineSet, ComplexMatrix, ConeSpec, ConicSolver, HermitianMatrix,
    PsdBlock,
};
use crate::opsys::{BallKind, Lmo};
use crate::rng::XorShiftRng;
use crate::scalar::Real;

fn max_eig<T: Real>(m: &ComplexMatrix<T>) -> T {
    eig_hermitian(&HermitianMatrix::from_hermitian_part(m)).max()
}

/// `max(λ_max(Tr₁ J₁), λ_max(Tr₁ J₂))` for a `2dm` Paulsen block.
pub fn paulsen_bound<T: Real>(j: &ComplexMatrix<T>, d: usize, m: usize) -> T {
    let dm = d * m;
    let j1 = j.submatrix(0, 0, dm, dm);
    let j2 = j.submatrix(dm, dm, dm, dm);
    max_eig(&output_marginal(&j1, d, m))
        .max(max_eig(&output_marginal(&j2, d, m)))
        .max(T::zero())
}

/// Read-out mismatch of the off-diagonal block of a Paulsen matrix.
pub fn paulsen_residual<T: Real>(f: &MatrixFunctional<T>, j: &ComplexMatrix<T>) -> T {
    let dm = f.system().ambient_dim() * f.level();
    super::choi::readout_residual(f, &j.submatrix(0, dm, dm, dm))
}

/// Extension SDP for `‖θ_f‖_cb`.
///
/// The reported value is a certified upper bound: the ADMM iterate is made
/// PSD by adding `ε·I` (which leaves the off-diagonal block and the
/// read-outs unchanged) and the marginals are re-measured.
pub fn dual_norm<T: Real>(f: &MatrixFunctional<T>, tol: T) -> NormReport<T> {
    let sys = f.system();
    let d = sys.ambient_dim();
    let m = f.level();
    if f.max_abs() == T::zero() {
        let mut r = NormReport::trivial(NormMethod::ExtensionSdp, m, tol);
        r.paulsen = Some(HermitianMatrix::zeros(2 * d * m));
        return r;
    }
    let dm = d * m;
    let big = 2 * dm;
    let hj = hdim(big);
    let hm = hdim(m);
    let total = hj + 2 * hm + 1;
    let t_index = total - 1;

    let mut rows: Vec<Vec<T>> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for r in readouts(f) {
        // Tr(G C_Θ) with C_Θ the (0, 1) block: G sits at block (1, 0).
        let (re, im) = complex_rows(&place(&r.g, big, dm, 0));
        for (row, b) in [(re, r.target.re), (im, r.target.im)] {
            let mut full = row;
            full.resize(total, T::zero());
            rows.push(full);
            rhs.push(b);
        }
    }
    let eye_d = ComplexMatrix::<T>::identity(d);
    let id_m = hvec(&ComplexMatrix::<T>::identity(m));
    for (slot, off) in [(0usize, 0usize), (1, dm)] {
        for (a, basis) in hvec_basis::<T>(m).iter().enumerate() {
            // hvec(Tr₁ J_slot)_a + hvec(S_slot)_a − t·hvec(I)_a = 0.
            let mut row = hfunctional(&place(&eye_d.kron(basis), big, off, off));
            row.resize(total, T::zero());
            row[hj + slot * hm + a] = T::one();
            row[t_index] = -id_m[a];
            rows.push(row);
            rhs.push(T::zero());
        }
    }
    let cone = ConeSpec {
        blocks: vec![
            PsdBlock { dim: big, cap: None },
            PsdBlock { dim: m, cap: None },
            PsdBlock { dim: m, cap: None },
        ],
        nonneg: 0,
        free: 1,
    };
    let affine = AffineSet::from_constraints(total, &rows, &rhs);
    let settings = AdmmSettings {
        eps_abs: 1e-11,
        eps_rel: 1e-10,
        max_iter: 50_000,
        ..AdmmSettings::default()
    };
    let mut solver = ConicSolver::new(cone, affine).with_settings(settings);
    let mut c = vec![T::zero(); total];
    c[t_index] = T::one();
    let sol = solver.minimize(&c, None);

    let j = unhvec(&sol.x[..hj], big);
    let lmin = eig_hermitian(&HermitianMatrix::from_hermitian_part(&j)).min();
    let eps = (-lmin).max(T::zero());
    let j = j.add(&ComplexMatrix::identity(big).scale_real(eps)).hermitian_part();
    let value = paulsen_bound(&j, d, m);
    let residual = paulsen_residual(f, &j);
    NormReport {
        value,
        method: NormMethod::ExtensionSdp,
        level: m,
        restarts: 0,
        tol,
        per_level: vec![LevelValue {
            level: m,
            raw: value.as_f64(),
            running: value.as_f64(),
        }],
        witness: None,
        paulsen: Some(HermitianMatrix::from_hermitian_part(&j)),
        residual,
        converged: sol.converged,
    }
}

/// `‖θ_f^{(m)}‖` over the operator ball of `M_m(S)`, by see-saw; a lower
/// bound for [`dual_norm`] that is exact at the global optimum.
pub fn cb_norm_seesaw<T: Real>(f: &MatrixFunctional<T>, restarts: usize, seed: u64, tol: T) -> NormReport<T> {
    let m = f.level();
    let mut lmo = Lmo::new(f.system().clone(), m, BallKind::Operator);
    let mut rng = XorShiftRng::fork(seed, 0x5A17);
    let mut best: Option<super::seesaw::SeeSawPoint<T>> = None;
    let starts = start_vectors::<T>(m, m, restarts.max(1), &mut rng);
    for (i, z) in starts.iter().enumerate() {
        // Pair each ζ with a different η so non-Hermitian optima are reachable.
        let eta = starts[(i + 1) % starts.len()].clone();
        for e in [z.clone(), eta] {
            let p = ascend(f, &mut lmo, z.clone(), e, Mode::General);
            if best.as_ref().map(|b| p.value > b.value).unwrap_or(true) {
                best = Some(p);
            }
        }
    }
    let b = best.expect("at least one start");
    let value = crate::numkernel::operator_norm(&theta_apply(f, &b.x).expect("same system"));
    NormReport {
        value,
        method: NormMethod::SeeSaw,
        level: m,
        restarts,
        tol,
        per_level: vec![LevelValue {
            level: m,
            raw: value.as_f64(),
            running: value.as_f64(),
        }],
        residual: b.residual,
        witness: Some(NormWitness {
            x: b.x,
            zeta: b.zeta,
            eta: b.eta,
        }),
        paulsen: None,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opsys::OperatorSystem;
    use std::sync::Arc;

    type M = ComplexMatrix<f64>;

    fn linf(n: usize) -> Arc<OperatorSystem<f64>> {
        let gens: Vec<M> = (0..n).map(|i| M::unit(n, i, i)).collect();
        Arc::new(OperatorSystem::new(&gens, true, format!("linf{n}")).unwrap())
    }

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
    fn examples() {
        let f = MatrixFunctional::scalar(linf(2), &[1.0, -1.0]).unwrap();
        let r = dual_norm(&f, 1e-7);
        assert!((r.value - 2.0).abs() < 1e-7, "{}", r.value);
        assert!(r.residual < 1e-8);
        let tr = dual_norm(&MatrixFunctional::trace(m2()), 1e-7);
        assert!((tr.value - 2.0).abs() < 1e-7, "{}", tr.value);
        assert_eq!(dual_norm(&MatrixFunctional::zero(m2(), 2), 1e-7).value, 0.0);
    }

    #[test]
    fn seesaw_matches_sdp() {
        let mut rng = XorShiftRng::new(9);
        for m in 1..=2 {
            let f = MatrixFunctional::random_self_adjoint(m2(), m, &mut rng);
            let a = dual_norm(&f, 1e-7);
            let b = cb_norm_seesaw(&f, 8, 1, 1e-7);
            assert!((a.value - b.value).abs() < 1e-6, "m={m}: {} vs {}", a.value, b.value);
        }
    }

    #[test]
    fn transpose_has_cb_norm_two() {
        let t = MatrixFunctional::from_map(m2(), 2, |a| a.transpose()).unwrap();
        let r = dual_norm(&t, 1e-7);
        assert!((r.value - 2.0).abs() < 1e-6, "{}", r.value);
    }
}
