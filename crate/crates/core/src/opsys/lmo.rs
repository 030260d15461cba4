//! Linear maximization over the positive unit ball `{x ∈ M_n(S) : 0 ⪯ x ⪯ I}`
//! and the operator unit ball `{x ∈ M_n(S) : ‖x‖ ≤ 1}`.
//!
//! When `S` is closed under products the orthogonal projection onto `M_n(S)`
//! is a conditional expectation `E`, and both problems have closed forms:
//! the positive spectral projection of `E(H)` and the polar part of `E(W†)`.
//! Otherwise the problems are solved by ADMM and the iterate is repaired to
//! feasibility (shift and scale for unital `S`, scaling otherwise) with the
//! remaining violation reported.

use std::sync::Arc;

use super::element::{decompose, MatrixElement};
use super::system::OperatorSystem;
use crate::numkernel::hvec::functional;
use crate::numkernel::{
    eig_hermitian, hvec, unhvec, AdmmSettings, AdmmState, AffineSet, ComplexMatrix, ConeSpec, ConicSolver,
    HermitianMatrix, PsdBlock,
};
use crate::scalar::{ci, creal, Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallKind {
    /// `0 ⪯ x ⪯ I`.
    Positive,
    /// `‖x‖ ≤ 1`.
    Operator,
}

#[derive(Clone, Debug)]
pub struct LmoResult<T: Real> {
    pub x: MatrixElement<T>,
    /// `Re Tr(W x)` at the returned point.
    pub value: T,
    /// Remaining constraint violation of `x` (0 for the closed forms).
    pub residual: T,
}

/// Real orthonormal basis of `M_n(S)_sa` built from the system frame:
/// `E_ii ⊗ F`, `(E_ij + E_ji) ⊗ F/√2` and `(iE_ij − iE_ji) ⊗ F/√2`.
pub fn level_frame<T: Real>(system: &OperatorSystem<T>, n: usize) -> Vec<ComplexMatrix<T>> {
    let d = system.ambient_dim();
    let r = creal(T::lit(std::f64::consts::FRAC_1_SQRT_2));
    let mut out = Vec::with_capacity(n * n * system.dim());
    for i in 0..n {
        for j in i..n {
            for f in system.frame() {
                if i == j {
                    let mut m = ComplexMatrix::zeros(n * d, n * d);
                    m.set_block(i, i, f);
                    out.push(m);
                } else {
                    for phase in [creal(T::one()), ci()] {
                        let g = f.scale(phase * r);
                        let mut m = ComplexMatrix::zeros(n * d, n * d);
                        m.set_block(i, j, &g);
                        m.set_block(j, i, &g.adjoint());
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Stateful oracle for one system, level and ball; keeps the ADMM iterate
/// between calls.
#[derive(Clone, Debug)]
pub struct Lmo<T: Real> {
    system: Arc<OperatorSystem<T>>,
    level: usize,
    kind: BallKind,
    solver: Option<ConicSolver<T>>,
    warm: Option<AdmmState<T>>,
}

fn proj<T: Real>(system: &Arc<OperatorSystem<T>>, m: &ComplexMatrix<T>) -> MatrixElement<T> {
    MatrixElement::project(system.clone(), m).expect("level shape")
}

impl<T: Real> Lmo<T> {
    pub fn new(system: Arc<OperatorSystem<T>>, level: usize, kind: BallKind) -> Self {
        let solver = (!system.is_algebra()).then(|| Self::build(&system, level, kind));
        Self {
            system,
            level,
            kind,
            solver,
            warm: None,
        }
    }

    /// Forces the iterative path even for `*`-algebras (used to cross-check
    /// the closed forms).
    pub fn iterative(system: Arc<OperatorSystem<T>>, level: usize, kind: BallKind) -> Self {
        let solver = Some(Self::build(&system, level, kind));
        Self {
            system,
            level,
            kind,
            solver,
            warm: None,
        }
    }

    fn build(system: &OperatorSystem<T>, n: usize, kind: BallKind) -> ConicSolver<T> {
        let nd = n * system.ambient_dim();
        let settings = AdmmSettings {
            eps_abs: 1e-10,
            eps_rel: 1e-9,
            max_iter: 4_000,
            ..AdmmSettings::default()
        };
        match kind {
            BallKind::Positive => {
                let span: Vec<Vec<T>> = level_frame(system, n).iter().map(hvec).collect();
                let cone = ConeSpec {
                    blocks: vec![PsdBlock {
                        dim: nd,
                        cap: Some(T::one()),
                    }],
                    nonneg: 0,
                    free: 0,
                };
                ConicSolver::new(cone, AffineSet::from_span(nd * nd, &span, vec![T::zero(); nd * nd]))
                    .with_settings(settings)
            }
            BallKind::Operator => {
                // [[I, y], [y†, I]] ⪰ 0 with y ∈ M_n(S).
                let d = system.ambient_dim();
                let mut span = Vec::with_capacity(2 * n * n * system.dim());
                for i in 0..n {
                    for j in 0..n {
                        for b in system.basis() {
                            for phase in [creal(T::one()), ci()] {
                                let mut y = ComplexMatrix::zeros(nd, nd);
                                y.set_submatrix(i * d, j * d, &b.scale(phase));
                                let mut z = ComplexMatrix::zeros(2 * nd, 2 * nd);
                                z.set_submatrix(0, nd, &y);
                                z.set_submatrix(nd, 0, &y.adjoint());
                                span.push(hvec(&z));
                            }
                        }
                    }
                }
                let offset = hvec(&ComplexMatrix::identity(2 * nd));
                let cone = ConeSpec::psd(&[2 * nd]);
                ConicSolver::new(cone, AffineSet::from_span(4 * nd * nd, &span, offset)).with_settings(settings)
            }
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> BallKind {
        self.kind
    }

    pub fn system(&self) -> &Arc<OperatorSystem<T>> {
        &self.system
    }

    /// Maximizes `Re Tr(W x)` over the ball; `W` is `nd × nd`.
    pub fn maximize(&mut self, w: &ComplexMatrix<T>) -> LmoResult<T> {
        let x = match self.solver.is_some() {
            false => match self.kind {
                BallKind::Positive => self.closed_positive(w),
                BallKind::Operator => self.closed_operator(w),
            },
            true => self.iterate(w),
        };
        let (x, residual) = x;
        let value = w.matmul(x.concrete()).trace().re;
        LmoResult { x, value, residual }
    }

    fn closed_positive(&self, w: &ComplexMatrix<T>) -> (MatrixElement<T>, T) {
        let e = proj(&self.system, &w.hermitian_part());
        let h = HermitianMatrix::from_hermitian_part(e.concrete());
        let eig = eig_hermitian(&h);
        let scale = eig.min().abs().max(eig.max().abs());
        let thr = T::floor_tol(1e-12) * scale;
        let p = eig.reconstruct_with(|l| if l > thr { T::one() } else { T::zero() });
        (proj(&self.system, &p), T::zero())
    }

    fn closed_operator(&self, w: &ComplexMatrix<T>) -> (MatrixElement<T>, T) {
        let g = proj(&self.system, &w.adjoint());
        let g = g.concrete();
        let eig = eig_hermitian(&HermitianMatrix::from_hermitian_part(&g.adjoint_mul(g)));
        let top = eig.max().max(T::zero());
        let thr = T::floor_tol(1e-12) * top;
        let n = g.rows();
        let mut u = ComplexMatrix::zeros(n, n);
        for (c, &l) in eig.values.iter().enumerate() {
            if l > thr && l > T::zero() {
                let v = eig.column(c);
                let gv = g.matvec(&v);
                let s = l.sqrt();
                let gv: Vec<Cx<T>> = gv.iter().map(|z| z.unscale(s)).collect();
                u = u.add(&crate::numkernel::outer(&gv, &v));
            }
        }
        let x = proj(&self.system, &u);
        let nrm = x.norm();
        let x = if nrm > T::one() { x.scale(T::one() / nrm) } else { x };
        (x, T::zero())
    }

    fn iterate(&mut self, w: &ComplexMatrix<T>) -> (MatrixElement<T>, T) {
        let nd = self.level * self.system.ambient_dim();
        let solver = self.solver.as_mut().expect("iterative oracle");
        let c: Vec<T> = match self.kind {
            BallKind::Positive => functional(&w.hermitian_part()).iter().map(|a| -*a).collect(),
            BallKind::Operator => {
                let mut g = ComplexMatrix::zeros(2 * nd, 2 * nd);
                g.set_submatrix(nd, 0, w);
                functional(&g).iter().map(|a| -*a).collect()
            }
        };
        let sol = solver.minimize(&c, self.warm.as_ref());
        self.warm = Some(sol.state.clone());
        match self.kind {
            BallKind::Positive => {
                let x = proj(&self.system, &unhvec(&sol.x, nd));
                repair_positive(&self.system, x)
            }
            BallKind::Operator => {
                let z = unhvec(&sol.x, 2 * nd);
                let x = proj(&self.system, &z.submatrix(0, nd, nd, nd));
                let nrm = x.norm();
                let x = if nrm > T::one() { x.scale(T::one() / nrm) } else { x };
                (x, T::zero())
            }
        }
    }
}

/// Moves a near-feasible Hermitian element into `0 ⪯ x ⪯ I`; returns the
/// remaining violation `max(0, −λ_min)` (nonzero only without a unit).
pub fn repair_positive<T: Real>(system: &Arc<OperatorSystem<T>>, x: MatrixElement<T>) -> (MatrixElement<T>, T) {
    let h = HermitianMatrix::from_hermitian_part(x.concrete());
    let x = proj(system, h.as_matrix());
    let eig = eig_hermitian(&h);
    let (lo, hi) = (eig.min(), eig.max());
    if lo >= T::zero() && hi <= T::one() {
        return (x, T::zero());
    }
    if system.is_unital() {
        let a = lo.min(T::zero());
        let b = hi.max(T::one());
        let n = x.concrete().rows();
        let shifted = x
            .concrete()
            .sub(&ComplexMatrix::identity(n).scale_real(a))
            .scale_real(T::one() / (b - a));
        return (proj(system, &shifted), T::zero());
    }
    let x = if hi > T::one() { x.scale(T::one() / hi) } else { x };
    let scale = if hi > T::one() { hi } else { T::one() };
    (x, (-lo / scale).max(T::zero()))
}

/// Coefficient distance of an `nd × nd` matrix from `M_n(S)`.
pub fn subspace_distance<T: Real>(system: &OperatorSystem<T>, m: &ComplexMatrix<T>) -> T {
    let n = m.rows() / system.ambient_dim();
    decompose(system, n, m).1
}
