//! Splitting self-adjoint elements as differences of positives:
//! `value(x) = min { max(‖u‖, ‖v‖) : x = u − v, u, v ∈ M_n(S)^+ }`.

use std::sync::Arc;

use super::element::{cone_membership, MatrixElement};
use super::lmo::{level_frame, subspace_distance};
use super::system::OperatorSystem;
use crate::error::{Error, Result};
use crate::numkernel::{
    bisect_optimal, eig_hermitian, hvec, solve_feasibility, AffinePSDProblem, ComplexMatrix, Direction,
    HermitianMatrix, DEFAULT_BISECT_TOL, DEFAULT_MAX_ITER,
};
use crate::rng::XorShiftRng;
use crate::scalar::Real;

/// Norm cap beyond which an element is reported indecomposable.
pub const DECOMPOSITION_CAP: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionMethod {
    /// `x = x₊ − x₋` inside a `*`-algebra.
    SpectralParts,
    /// `u = (‖x‖1 + x)/2`, `v = (‖x‖1 − x)/2`.
    UnitShift,
    /// Bisection over the norm cap with conic feasibility.
    Bisection,
    /// No decomposition within [`DECOMPOSITION_CAP`].
    Indecomposable,
}

#[derive(Clone, Debug)]
pub struct DecompositionValue<T: Real> {
    /// `+∞` when indecomposable.
    pub value: T,
    /// `‖x‖`, a lower bound for `value`.
    pub lower_bound: T,
    pub witness: Option<(MatrixElement<T>, MatrixElement<T>)>,
    /// Worst of `‖u − v − x‖_max`, `−λ_min(u)`, `−λ_min(v)` and the distance
    /// of `u` from `M_n(S)`.
    pub residual: T,
    pub method: DecompositionMethod,
}

impl<T: Real> DecompositionValue<T> {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Residual of a claimed decomposition `x = u − v`.
pub fn witness_residual<T: Real>(x: &MatrixElement<T>, u: &MatrixElement<T>, v: &MatrixElement<T>) -> T {
    let diff = u.concrete().sub(v.concrete()).sub(x.concrete()).max_abs();
    let lu = cone_membership(u, T::zero()).min_eigenvalue;
    let lv = cone_membership(v, T::zero()).min_eigenvalue;
    let sys = x.system();
    let dist = subspace_distance(sys, u.concrete()).max(subspace_distance(sys, v.concrete()));
    diff.max(-lu).max(-lv).max(dist).max(T::zero())
}

fn finish<T: Real>(
    x: &MatrixElement<T>,
    lower_bound: T,
    u: MatrixElement<T>,
    v: MatrixElement<T>,
    method: DecompositionMethod,
) -> DecompositionValue<T> {
    let residual = witness_residual(x, &u, &v);
    let value = u.norm().max(v.norm());
    DecompositionValue {
        value,
        lower_bound,
        witness: Some((u, v)),
        residual,
        method,
    }
}

/// Feasibility instance for `U − V = x`, `U ∈ M_n(S)`, `0 ⪯ U, V ⪯ t`.
fn split_problem<T: Real>(x: &MatrixElement<T>, t: T) -> AffinePSDProblem<T> {
    let sys = x.system();
    let nd = x.concrete().rows();
    let h = nd * nd;
    let mut p = AffinePSDProblem::new(vec![nd, nd]).with_caps(vec![Some(t), Some(t)]);
    let target = hvec(x.concrete());
    for a in 0..h {
        let mut row = vec![T::zero(); 2 * h];
        row[a] = T::one();
        row[h + a] = -T::one();
        p.push(row, target[a]);
    }
    for c in complement(sys, x.level()) {
        let mut row = vec![T::zero(); 2 * h];
        row[..h].copy_from_slice(&c);
        p.push(row, T::zero());
    }
    p
}

/// Orthonormal basis of the complement of `M_n(S)_sa` in hvec coordinates.
fn complement<T: Real>(sys: &OperatorSystem<T>, n: usize) -> Vec<Vec<T>> {
    let nd = n * sys.ambient_dim();
    let h = nd * nd;
    let mut q: Vec<Vec<T>> = level_frame(sys, n).iter().map(hvec).collect();
    let inside = q.len();
    let dot = |a: &[T], b: &[T]| a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y);
    for e in 0..h {
        let mut v = vec![T::zero(); h];
        v[e] = T::one();
        for _ in 0..2 {
            for b in &q {
                let r = dot(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= r * *y;
                }
            }
        }
        let nv = dot(&v, &v).sqrt();
        if nv > T::lit(1e-8) {
            for x in v.iter_mut() {
                *x /= nv;
            }
            q.push(v);
        }
        if q.len() == h {
            break;
        }
    }
    q.split_off(inside)
}

/// Minimal `max(‖u‖, ‖v‖)` over decompositions `x = u − v` into cone elements.
///
/// `*`-algebras use the spectral parts and unital systems the unit shift,
/// both of which attain the lower bound `‖x‖`. Other systems first test the
/// cap [`DECOMPOSITION_CAP`] and then bisect (tolerance `1e−5`) between
/// `‖x‖` and the norm of the capped witness; a system with no decomposition
/// under the cap yields `+∞`.
pub fn decomposition_value<T: Real>(x: &MatrixElement<T>, tol: T) -> Result<DecompositionValue<T>> {
    if !x.is_self_adjoint() {
        return Err(Error::NotSelfAdjoint {
            asymmetry: x.hermitian_defect().as_f64(),
        });
    }
    let sys = x.system().clone();
    let nd = x.concrete().rows();
    let h = HermitianMatrix::from_hermitian_part(x.concrete());
    let eig = eig_hermitian(&h);
    let lower = eig.min().abs().max(eig.max().abs());

    if sys.is_algebra() {
        let up = eig.reconstruct_with(|l| l.max(T::zero()));
        let dn = eig.reconstruct_with(|l| (-l).max(T::zero()));
        let u = MatrixElement::project(sys.clone(), &up)?;
        let v = MatrixElement::project(sys, &dn)?;
        return Ok(finish(x, lower, u, v, DecompositionMethod::SpectralParts));
    }
    if sys.is_unital() {
        let half = T::lit(0.5);
        let id = ComplexMatrix::identity(nd).scale_real(lower);
        let u = MatrixElement::project(sys.clone(), &id.add(x.concrete()).scale_real(half))?;
        let v = MatrixElement::project(sys, &id.sub(x.concrete()).scale_real(half))?;
        return Ok(finish(x, lower, u, v, DecompositionMethod::UnitShift));
    }
    if lower == T::zero() {
        let z = MatrixElement::zero(sys, x.level());
        return Ok(finish(x, lower, z.clone(), z, DecompositionMethod::SpectralParts));
    }

    let cap = T::lit(DECOMPOSITION_CAP);
    let attempt = |t: T| -> Result<Option<(MatrixElement<T>, MatrixElement<T>)>> {
        let r = solve_feasibility(&split_problem(x, t), tol, DEFAULT_MAX_ITER)?;
        if !r.is_feasible() {
            return Ok(None);
        }
        let w = r.witness.expect("feasible witness");
        let u = MatrixElement::project(sys.clone(), w[0].as_matrix())?;
        // v is defined from u so that u − v = x holds exactly.
        let v = MatrixElement::project(sys.clone(), &u.concrete().sub(x.concrete()))?;
        Ok(Some((u, v)))
    };
    let Some((u, v)) = attempt(cap)? else {
        return Ok(DecompositionValue {
            value: T::infinity(),
            lower_bound: lower,
            witness: None,
            residual: T::zero(),
            method: DecompositionMethod::Indecomposable,
        });
    };
    let hi = u.norm().max(v.norm()).max(lower) + T::lit(DEFAULT_BISECT_TOL);
    let mut best = (hi, u, v);
    let lo = lower * (T::one() - T::floor_tol(1e-9));
    let bis = bisect_optimal(
        |t| {
            if t < lower {
                return Ok(false);
            }
            if t >= best.0 {
                return Ok(true);
            }
            match attempt(t)? {
                Some((u, v)) => {
                    let m = u.norm().max(v.norm());
                    if m < best.0 {
                        best = (m.max(t), u, v);
                    }
                    Ok(true)
                }
                None => Ok(false),
            }
        },
        lo,
        hi,
        T::lit(DEFAULT_BISECT_TOL),
        Direction::FeasibleAbove,
    );
    if let Err(e) = bis {
        if !matches!(e, Error::BracketNotStraddling { .. }) {
            return Err(e);
        }
    }
    let (_, u, v) = best;
    Ok(finish(x, lower, u, v, DecompositionMethod::Bisection))
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct DecompositionSample {
    pub level: usize,
    pub index: usize,
    /// `frame`, `signed-sum` or `random`.
    pub kind: &'static str,
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct LevelDecomposition {
    pub level: usize,
    pub samples: usize,
    pub r_hat: f64,
}

#[derive(Clone, Debug)]
pub struct DecompositionReport<T: Real> {
    /// Highest level evaluated.
    pub level: usize,
    pub sample_count: usize,
    /// Max over all sampled values; `+∞` if any sample is indecomposable.
    pub r_hat: T,
    pub worst: Option<MatrixElement<T>>,
    pub per_level: Vec<LevelDecomposition>,
    pub values: Vec<DecompositionSample>,
}

impl<T: Real> DecompositionReport<T> {
    pub fn is_finite(&self) -> bool {
        self.r_hat.is_finite()
    }
}

/// Structured unit-norm self-adjoint samples at level `n`: the frame of
/// `M_n(S)_sa`, signed sums of consecutive frame elements, and the total sum.
pub fn structured_samples<T: Real>(sys: &Arc<OperatorSystem<T>>, n: usize) -> Vec<MatrixElement<T>> {
    let frame = level_frame(sys, n);
    let mut raw: Vec<ComplexMatrix<T>> = frame.clone();
    for w in frame.windows(2) {
        raw.push(w[0].add(&w[1]));
        raw.push(w[0].sub(&w[1]));
    }
    if let Some(first) = frame.first() {
        let mut total = ComplexMatrix::zeros(first.rows(), first.cols());
        for f in &frame {
            total = total.add(f);
        }
        raw.push(total);
    }
    raw.iter()
        .filter_map(|m| MatrixElement::project(sys.clone(), m).ok())
        .map(|e| e.normalized())
        .filter(|e| e.norm() > T::lit(0.5))
        .collect()
}

/// `r̂_N`: largest decomposition value over structured samples plus
/// `sample_count` seeded random unit elements at each level `n ≤ N`.
///
/// Evaluation stops at the first indecomposable sample; the report then
/// carries `r̂ = +∞` and the values gathered so far.
pub fn decomposition_constant<T: Real>(
    sys: &Arc<OperatorSystem<T>>,
    level_max: usize,
    sample_count: usize,
    seed: u64,
    tol: T,
) -> Result<DecompositionReport<T>> {
    if level_max == 0 {
        return Err(Error::Invalid("level_max must be at least 1".into()));
    }
    let mut report = DecompositionReport {
        level: 0,
        sample_count: 0,
        r_hat: T::zero(),
        worst: None,
        per_level: Vec::new(),
        values: Vec::new(),
    };
    for n in 1..=level_max {
        let mut rng = XorShiftRng::fork(seed, n as u64);
        let structured = structured_samples(sys, n);
        let n_struct = structured.len();
        let random = (0..sample_count).map(|_| MatrixElement::random_self_adjoint(sys.clone(), n, &mut rng));
        let mut level_max_value = T::zero();
        let mut count = 0;
        report.level = n;
        for (index, x) in structured.into_iter().chain(random).enumerate() {
            if x.norm() <= T::lit(0.5) {
                continue;
            }
            let r = decomposition_value(&x, tol)?;
            count += 1;
            report.values.push(DecompositionSample {
                level: n,
                index,
                kind: if index < n_struct { "structured" } else { "random" },
                value: r.value.as_f64(),
                residual: r.residual.as_f64(),
            });
            if r.value > level_max_value {
                level_max_value = r.value;
            }
            if r.value > report.r_hat || report.worst.is_none() {
                report.r_hat = report.r_hat.max(r.value);
                report.worst = Some(x);
            }
            if !r.is_finite() {
                break;
            }
        }
        report.sample_count += count;
        report.per_level.push(LevelDecomposition {
            level: n,
            samples: count,
            r_hat: level_max_value.as_f64(),
        });
        if !report.r_hat.is_finite() {
            break;
        }
    }
    Ok(report)
}

/// The concrete unitization `S + ℂ·I_d ⊆ M_d`.
///
/// This realizes the unitization inside the given matrix algebra only; the
/// induced matrix norm need not coincide with the universal one, since a
/// complete contraction out of `S` need not extend contractively to it.
pub fn adjoin_unit<T: Real>(sys: &OperatorSystem<T>) -> Result<OperatorSystem<T>> {
    if sys.is_unital() {
        return Err(Error::AlreadyUnital);
    }
    let mut gens = sys.basis().to_vec();
    gens.push(ComplexMatrix::identity(sys.ambient_dim()));
    OperatorSystem::new(&gens, true, format!("{}+1", sys.label()))
}
