//! Properness of the dual cone `S*^+`.
//!
//! Two independent computations:
//! - the real span of sampled cone elements `M_n(S)^+` (extreme points of
//!   the positive ball, reached by the linear oracle), compared with
//!   `dim M_n(S)_sa`;
//! - the lineality space `S*^+ ∩ −S*^+`, found by an SDP over functionals
//!   `φ` for which both `φ` and `−φ` are restrictions of positive
//!   functionals `Tr(P ·)` on `M_d`.
//!
//! Level 1 decides properness: if `x ∈ M_n(S)^+` then every compression
//! `v* x v` (scalar `v`) lies in `S^+`, so the entries of `x` lie in the
//! complex span of `S^+`.

use serde::Serialize;
use std::sync::Arc;

use crate::numkernel::hvec::functional as hfunctional;
use crate::numkernel::{
    hdim, hvec, project_psd, unhvec, AdmmSettings, AffineSet, ComplexMatrix, ConeSpec, ConicSolver, HermitianMatrix,
    PsdBlock,
};
use crate::opsys::{level_frame, BallKind, Lmo, OperatorSystem};
use crate::rng::XorShiftRng;
use crate::scalar::Real;

/// Rank threshold on unit-normalized coordinate vectors.
pub const SPAN_RANK_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SpanLevel {
    pub level: usize,
    pub samples: usize,
    pub span_dim: usize,
    /// `dim_ℝ M_n(S)_sa = n²·dim S`.
    pub full_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProperReport {
    pub proper: bool,
    pub per_level: Vec<SpanLevel>,
    /// First level from which the span dimension ratio no longer changes.
    pub stabilized_level: usize,
}

/// `φ ≠ 0` with `φ = Tr(P ·)` and `−φ = Tr(Q ·)` on the frame, `P, Q ⪰ 0`.
#[derive(Clone, Debug)]
pub struct LinealityWitness {
    pub phi: Vec<f64>,
    pub p: ComplexMatrix<f64>,
    pub q: ComplexMatrix<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LinealityReport {
    /// `dim_ℝ (S*^+ ∩ −S*^+)` restricted to self-adjoint functionals.
    pub dim: usize,
    pub proper: bool,
    /// Largest coordinate norm among the sampled optimal `φ`.
    pub max_phi: f64,
    pub converged: bool,
    /// The largest sampled `φ`, when the lineality space is nontrivial.
    #[serde(skip)]
    pub witness: Option<LinealityWitness>,
}

/// Rank of `vectors` by modified Gram–Schmidt after unit normalization;
/// vectors shorter than `tol` count as zero.
pub fn real_rank<T: Real>(vectors: &[Vec<T>], tol: T) -> usize {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let n = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if n <= tol {
            continue;
        }
        let mut r: Vec<T> = v.iter().map(|x| *x / n).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = r.iter().zip(b).fold(T::zero(), |s, (a, b)| s + *a * *b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= c * *bi;
                }
            }
        }
        let rn = r.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if rn > tol {
            basis.push(r.iter().map(|x| *x / rn).collect());
        }
    }
    basis.len()
}

/// Extreme points of the positive ball of `M_n(S)` for the frame
/// directions `±F` and `2·dim` random ones.
fn sample_positives<T: Real>(sys: &Arc<OperatorSystem<T>>, n: usize, rng: &mut XorShiftRng) -> Vec<ComplexMatrix<T>> {
    let frame = level_frame(sys, n);
    let nd = n * sys.ambient_dim();
    let mut lmo = Lmo::new(sys.clone(), n, BallKind::Positive);
    let mut objectives: Vec<ComplexMatrix<T>> = Vec::new();
    for f in &frame {
        objectives.push(f.clone());
        objectives.push(f.scale_real(-T::one()));
    }
    for _ in 0..2 * frame.len() {
        objectives.push(ComplexMatrix::from_fn(nd, nd, |_, _| rng.complex::<T>()).hermitian_part());
    }
    objectives
        .iter()
        .map(|w| lmo.maximize(w).x.concrete().clone())
        .collect()
}

/// Real coordinates of Hermitian `x` along the level-`n` frame.
pub fn frame_coords<T: Real>(sys: &OperatorSystem<T>, n: usize, xs: &[ComplexMatrix<T>]) -> Vec<Vec<T>> {
    let frame = level_frame(sys, n);
    xs.iter()
        .map(|x| frame.iter().map(|f| f.inner(x).re).collect())
        .collect()
}

/// The positives sampled by [`dual_cone_proper`] at level `n`.
pub fn span_samples<T: Real>(sys: &Arc<OperatorSystem<T>>, n: usize, seed: u64) -> Vec<ComplexMatrix<T>> {
    sample_positives(sys, n, &mut XorShiftRng::fork(seed, 0x5A + n as u64))
}

fn span_level<T: Real>(sys: &Arc<OperatorSystem<T>>, n: usize, seed: u64) -> SpanLevel {
    let full_dim = level_frame(sys, n).len();
    let coords = frame_coords(sys, n, &span_samples(sys, n, seed));
    SpanLevel {
        level: n,
        samples: coords.len(),
        span_dim: real_rank(&coords, T::lit(SPAN_RANK_TOL)),
        full_dim,
    }
}

/// Span-density test at levels `1..=level_max`; proper iff the cone spans
/// `M_n(S)_sa` at every tested level.
pub fn dual_cone_proper<T: Real>(sys: &Arc<OperatorSystem<T>>, level_max: usize, seed: u64) -> ProperReport {
    let mut per_level = Vec::new();
    for n in 1..=level_max.max(1) {
        per_level.push(span_level(sys, n, seed));
    }
    let full = |l: &SpanLevel| l.span_dim == l.full_dim;
    let stabilized_level = per_level
        .iter()
        .position(|l| per_level.iter().skip(l.level).all(|k| full(k) == full(l)))
        .map(|i| i + 1)
        .unwrap_or(1);
    ProperReport {
        proper: per_level.iter().all(full),
        per_level,
        stabilized_level,
    }
}

/// Lineality dimension of the dual cone at level 1, by SDP.
///
/// Variables `P, Q, B₁, B₂ ⪰ 0` in `M_d` and `φ ∈ ℝ^k` with
/// `⟨F_t, P⟩ = φ_t`, `⟨F_t, Q⟩ = −φ_t`, `B₁ = I − Σ φ_t F_t`,
/// `B₂ = I + Σ φ_t F_t`. The feasible `φ` form a bounded piece of the
/// lineality subspace; maximizing `k` random linear objectives over it
/// yields points spanning it.
pub fn dual_cone_lineality<T: Real>(sys: &Arc<OperatorSystem<T>>, seed: u64) -> LinealityReport {
    let d = sys.ambient_dim();
    let frame = sys.frame();
    let k = frame.len();
    let h = hdim(d);
    let total = 4 * h + k;
    let phi0 = 4 * h;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (t, f) in frame.iter().enumerate() {
        let g = hfunctional(f);
        for (slot, sign) in [(0usize, -T::one()), (1, T::one())] {
            let mut row = vec![T::zero(); total];
            row[slot * h..(slot + 1) * h].copy_from_slice(&g);
            row[phi0 + t] = sign;
            rows.push(row);
            rhs.push(T::zero());
        }
    }
    let eye = hvec(&ComplexMatrix::<T>::identity(d));
    let fv: Vec<Vec<T>> = frame.iter().map(hvec).collect();
    for (slot, sign) in [(2usize, T::one()), (3, -T::one())] {
        for a in 0..h {
            let mut row = vec![T::zero(); total];
            row[slot * h + a] = T::one();
            for t in 0..k {
                row[phi0 + t] = sign * fv[t][a];
            }
            rows.push(row);
            rhs.push(eye[a]);
        }
    }
    let cone = ConeSpec {
        blocks: (0..4).map(|_| PsdBlock { dim: d, cap: None }).collect(),
        nonneg: 0,
        free: k,
    };
    let settings = AdmmSettings {
        eps_abs: 1e-10,
        eps_rel: 1e-9,
        max_iter: 20_000,
        ..AdmmSettings::default()
    };
    let mut solver = ConicSolver::new(cone, AffineSet::from_constraints(total, &rows, &rhs)).with_settings(settings);
    let mut rng = XorShiftRng::fork(seed, 0x11E);
    let mut phis = Vec::with_capacity(k);
    let mut warm = None;
    let mut converged = true;
    let mut max_phi = T::zero();
    let mut witness = None;
    for _ in 0..k {
        let mut c = vec![T::zero(); total];
        for ct in c[phi0..].iter_mut() {
            *ct = -rng.real::<T>();
        }
        let sol = solver.minimize(&c, warm.as_ref());
        converged &= sol.converged;
        let phi = sol.x[phi0..].to_vec();
        let norm = phi.iter().map(|x| *x * *x).sum::<T>().sqrt();
        if norm > max_phi {
            max_phi = norm;
            witness = Some(LinealityWitness {
                phi: phi.iter().map(|x| x.as_f64()).collect(),
                p: project_psd(&HermitianMatrix::from_hermitian_part(&unhvec(&sol.x[..h], d)))
                    .as_matrix()
                    .cast(),
                q: project_psd(&HermitianMatrix::from_hermitian_part(&unhvec(&sol.x[h..2 * h], d)))
                    .as_matrix()
                    .cast(),
            });
        }
        phis.push(phi);
        warm = Some(sol.state);
    }
    // Nonzero optima sit on the boundary ‖Σ φ_t F_t‖ = 1, hence ‖φ‖₂ ≥ 1;
    // anything below 1e−4 is solver noise.
    let dim = real_rank(&phis, T::lit(1e-4));
    LinealityReport {
        dim,
        proper: dim == 0,
        max_phi: max_phi.as_f64(),
        converged,
        witness: if dim > 0 { witness } else { None },
    }
}
