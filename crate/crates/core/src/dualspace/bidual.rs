//! `sup{‖[ψ_kl(z_ij)]‖ : ψ ∈ M_n(S*)^+, ‖ψ‖_cb ≤ 1, n ≤ N}` for `z ∈ M_k(S)`.
//!
//! `ψ` is carried by a Choi matrix `C ⪰ 0` of a map `Ψ: M_d → M_n` with
//! `Ψ(I) = Tr₁ C ⪯ I`; every such `Ψ` restricts to a CP contraction on `S`,
//! and for unital `S` every CP contraction arises this way. The objective is
//! `‖Ψ^{(k)}(z)‖`, maximized by alternating an SDP step in `C` with a
//! singular-vector step.

use std::sync::Arc;

use super::choi::{hvec_basis, output_marginal};
use super::functional::apply_choi;
use super::report::{LevelValue, NormMethod, NormReport};
use super::seesaw::start_vectors;
use crate::numkernel::hvec::functional as hfunctional;
use crate::numkernel::{
    eig_hermitian, hdim, hvec, outer, top_singular, unhvec, AdmmSettings, AdmmState, AffineSet, ComplexMatrix,
    ConeSpec, ConicSolver, HermitianMatrix, PsdBlock,
};
use crate::opsys::{element_norm, MatrixElement, OperatorSystem};
use crate::rng::XorShiftRng;
use crate::scalar::{czero, Cx, Real};

const BIDUAL_ITERS: usize = 200;

#[derive(Clone, Copy, Debug)]
pub struct BidualSettings {
    pub level_max: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for BidualSettings {
    fn default() -> Self {
        Self {
            level_max: 4,
            tol: 1e-7,
            restarts: 16,
            seed: 0x5EED,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BidualReport<T: Real> {
    pub report: NormReport<T>,
    /// Choi matrix of the best `Ψ: M_d → M_n`.
    pub choi: HermitianMatrix<T>,
    /// Functional level `n` of the optimizer.
    pub functional_level: usize,
    pub element_norm: T,
    /// Top singular pair of `Ψ^{(k)}(z)`: `Ψ^{(k)}(z) ζ = value·η`.
    pub zeta: Vec<Cx<T>>,
    pub eta: Vec<Cx<T>>,
    /// Unital or a `*`-algebra: the sup is expected to equal `‖z‖`.
    pub flagged: bool,
}

/// `Ψ^{(k)}(z)` for the map with Choi matrix `choi`.
pub fn bidual_matrix<T: Real>(z: &MatrixElement<T>, choi: &ComplexMatrix<T>, n: usize) -> ComplexMatrix<T> {
    let d = z.system().ambient_dim();
    let k = z.level();
    let mut out = ComplexMatrix::zeros(k * n, k * n);
    for i in 0..k {
        for j in 0..k {
            let blk = apply_choi(choi, d, n, &z.concrete().block(i, j, d, d));
            out.set_block(i, j, &blk);
        }
    }
    out
}

/// Makes `C` PSD and `Tr₁ C ⪯ I` by a shift and a scaling.
pub fn repair_choi<T: Real>(c: &ComplexMatrix<T>, d: usize, n: usize) -> ComplexMatrix<T> {
    let h = c.hermitian_part();
    let lmin = eig_hermitian(&HermitianMatrix::from_hermitian_part(&h)).min();
    let h = if lmin < T::zero() {
        h.add(&ComplexMatrix::identity(h.rows()).scale_real(-lmin))
    } else {
        h
    };
    let top = eig_hermitian(&HermitianMatrix::from_hermitian_part(&output_marginal(&h, d, n))).max();
    if top > T::one() {
        h.scale_real(T::one() / top)
    } else {
        h
    }
}

struct ChoiStep<T: Real> {
    solver: ConicSolver<T>,
    warm: Option<AdmmState<T>>,
    d: usize,
    n: usize,
}

impl<T: Real> ChoiStep<T> {
    fn new(d: usize, n: usize) -> Self {
        let dn = d * n;
        let hc = hdim(dn);
        let hm = hdim(n);
        let total = hc + hm;
        let eye_d = ComplexMatrix::<T>::identity(d);
        let id = hvec(&ComplexMatrix::<T>::identity(n));
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (a, basis) in hvec_basis::<T>(n).iter().enumerate() {
            let mut row = hfunctional(&eye_d.kron(basis));
            row.resize(total, T::zero());
            row[hc + a] = T::one();
            rows.push(row);
            rhs.push(id[a]);
        }
        let cone = ConeSpec {
            blocks: vec![PsdBlock { dim: dn, cap: None }, PsdBlock { dim: n, cap: None }],
            nonneg: 0,
            free: 0,
        };
        let settings = AdmmSettings {
            eps_abs: 1e-10,
            eps_rel: 1e-9,
            max_iter: 4_000,
            ..AdmmSettings::default()
        };
        Self {
            solver: ConicSolver::new(cone, AffineSet::from_constraints(total, &rows, &rhs)).with_settings(settings),
            warm: None,
            d,
            n,
        }
    }

    /// `argmax Re Tr(G C)` over the feasible Choi matrices, repaired.
    fn maximize(&mut self, g: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let dn = self.d * self.n;
        let mut c: Vec<T> = hfunctional(g).iter().map(|a| -*a).collect();
        c.resize(self.solver.dim(), T::zero());
        let sol = self.solver.minimize(&c, self.warm.as_ref());
        self.warm = Some(sol.state);
        repair_choi(&unhvec(&sol.x[..hdim(dn)], dn), self.d, self.n)
    }
}

/// `G = Σ_ij z_ijᵀ ⊗ ζ_j η_i†`, so that `Re Tr(G C) = Re⟨η, Ψ^{(k)}(z) ζ⟩`.
fn objective<T: Real>(z: &MatrixElement<T>, zeta: &[Cx<T>], eta: &[Cx<T>], n: usize) -> ComplexMatrix<T> {
    let d = z.system().ambient_dim();
    let k = z.level();
    let mut g = ComplexMatrix::zeros(d * n, d * n);
    for i in 0..k {
        for j in 0..k {
            let zij = z.concrete().block(i, j, d, d).transpose();
            let vv = outer(&zeta[j * n..(j + 1) * n], &eta[i * n..(i + 1) * n]);
            g = g.add(&zij.kron(&vv));
        }
    }
    g
}

struct Point<T: Real> {
    value: T,
    choi: ComplexMatrix<T>,
    zeta: Vec<Cx<T>>,
    eta: Vec<Cx<T>>,
}

fn ascend<T: Real>(
    z: &MatrixElement<T>,
    step: &mut ChoiStep<T>,
    mut zeta: Vec<Cx<T>>,
    mut eta: Vec<Cx<T>>,
) -> Point<T> {
    let n = step.n;
    let mut best: Option<Point<T>> = None;
    for _ in 0..BIDUAL_ITERS {
        let choi = step.maximize(&objective(z, &zeta, &eta, n));
        let (value, u, v) = top_singular(&bidual_matrix(z, &choi, n));
        let improved = best
            .as_ref()
            .map(|b| value - b.value > T::floor_tol(1e-11) * (T::one() + value))
            .unwrap_or(true);
        if best.as_ref().map(|b| value >= b.value).unwrap_or(true) {
            best = Some(Point {
                value,
                choi,
                zeta: v.clone(),
                eta: u.clone(),
            });
        }
        if !improved {
            break;
        }
        zeta = v;
        eta = u;
    }
    best.expect("at least one iteration")
}

/// Choi matrix of `a ↦ Ψ(a) ⊕ 0` at output level `n + 1`.
fn pad_choi<T: Real>(c: &ComplexMatrix<T>, d: usize, n: usize) -> ComplexMatrix<T> {
    let m = n + 1;
    ComplexMatrix::from_fn(d * m, d * m, |r, s| {
        let (i, k) = (r / m, r % m);
        let (j, l) = (s / m, s % m);
        if k < n && l < n {
            c[(i * n + k, j * n + l)]
        } else {
            czero()
        }
    })
}

pub fn bidual_norm<T: Real>(z: &MatrixElement<T>, settings: BidualSettings) -> BidualReport<T> {
    let sys: &Arc<OperatorSystem<T>> = z.system();
    let d = sys.ambient_dim();
    let k = z.level();
    let tol = T::lit(settings.tol);
    let level_max = settings.level_max.max(1);
    let mut per_level = Vec::new();
    let mut best: Option<(usize, Point<T>)> = None;
    let mut prev: Option<ComplexMatrix<T>> = None;
    for n in 1..=level_max {
        let mut step = ChoiStep::new(d, n);
        let mut rng = XorShiftRng::fork(settings.seed, 0xB1 + n as u64);
        let mut level_best: Option<Point<T>> = None;
        let mut keep = |p: Point<T>| {
            if level_best.as_ref().map(|b| p.value > b.value).unwrap_or(true) {
                level_best = Some(p);
            }
        };
        if let Some(c) = &prev {
            let choi = pad_choi(c, d, n - 1);
            let (value, u, v) = top_singular(&bidual_matrix(z, &choi, n));
            keep(Point {
                value,
                choi: choi.clone(),
                zeta: v.clone(),
                eta: u.clone(),
            });
            keep(ascend(z, &mut step, v, u));
        }
        let starts = start_vectors::<T>(k, n, settings.restarts.max(1), &mut rng);
        for (i, s) in starts.iter().enumerate() {
            keep(ascend(z, &mut step, s.clone(), s.clone()));
            keep(ascend(z, &mut step, s.clone(), starts[(i + 1) % starts.len()].clone()));
        }
        let p = level_best.expect("at least one start");
        let running = best.as_ref().map(|(_, b)| b.value.max(p.value)).unwrap_or(p.value);
        per_level.push(LevelValue {
            level: n,
            raw: p.value.as_f64(),
            running: running.as_f64(),
        });
        prev = Some(p.choi.clone());
        if best.as_ref().map(|(_, b)| p.value > b.value).unwrap_or(true) {
            best = Some((n, p));
        }
    }
    let (n, p) = best.expect("at least one level");
    let choi = HermitianMatrix::from_hermitian_part(&p.choi);
    let lmin = eig_hermitian(&choi).min();
    let cap = eig_hermitian(&HermitianMatrix::from_hermitian_part(&output_marginal(&p.choi, d, n))).max();
    BidualReport {
        report: NormReport {
            value: p.value,
            method: NormMethod::SeeSaw,
            level: level_max,
            restarts: settings.restarts,
            tol,
            per_level,
            witness: None,
            paulsen: None,
            residual: (-lmin).max(cap - T::one()).max(T::zero()),
            converged: true,
        },
        choi,
        functional_level: n,
        element_norm: element_norm(z),
        zeta: p.zeta,
        eta: p.eta,
        flagged: sys.is_unital() || sys.is_algebra(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_full, build_linfty};
    use crate::numkernel::ComplexMatrix as M;

    fn quick() -> BidualSettings {
        BidualSettings {
            level_max: 2,
            restarts: 4,
            ..Default::default()
        }
    }

    #[test]
    fn unit_has_norm_one() {
        let z = MatrixElement::unit(build_full(2).unwrap(), 1).unwrap();
        assert!((bidual_norm(&z, quick()).report.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn signed_diagonal() {
        let z = MatrixElement::from_concrete(build_linfty(2).unwrap(), &M::diag_real(&[1.0, -1.0])).unwrap();
        assert!((bidual_norm(&z, quick()).report.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn matrix_unit_needs_level_two() {
        let z = MatrixElement::from_concrete(build_full(2).unwrap(), &M::unit(2, 0, 1)).unwrap();
        let r = bidual_norm(&z, quick());
        assert!(
            (r.report.per_level[0].raw - 0.5).abs() < 1e-6,
            "{:?}",
            r.report.per_level
        );
        assert!((r.report.value - 1.0).abs() < 1e-6, "{}", r.report.value);
        assert!(r.report.residual < 1e-9);
    }
}
