//! Alternating maximization of `Re⟨η, θ_f^{(n)}(x) ζ⟩` over a ball of
//! `M_n(S)` and unit vectors `ζ, η`.
//!
//! Each half-step is exact (a linear maximization in `x`, a spectral update
//! in `ζ, η`), so the objective is nondecreasing along a run.

use super::functional::{theta_apply, theta_dual, MatrixFunctional};
use crate::numkernel::{eig_hermitian, outer, top_singular, ComplexMatrix, HermitianMatrix};
use crate::opsys::{Lmo, MatrixElement};
use crate::rng::XorShiftRng;
use crate::scalar::{creal, czero, Cx, Real};

/// Iteration cap per ascent.
pub const ASCENT_ITERS: usize = 300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode<T: Real> {
    /// `θ(x)` Hermitian: maximize `σ⟨ζ, θ(x) ζ⟩` with `η = σζ`.
    Hermitian(T),
    /// Top singular pair.
    General,
}

#[derive(Clone, Debug)]
pub struct SeeSawPoint<T: Real> {
    pub x: MatrixElement<T>,
    pub zeta: Vec<Cx<T>>,
    pub eta: Vec<Cx<T>>,
    /// `Re⟨η, θ(x) ζ⟩` at the final point.
    pub value: T,
    /// Constraint violation of `x` reported by the oracle.
    pub residual: T,
    pub iterations: usize,
}

/// Spectral update for a fixed `x`: returns `(value, ζ, η)`.
pub fn best_vectors<T: Real>(theta: &ComplexMatrix<T>, mode: Mode<T>) -> (T, Vec<Cx<T>>, Vec<Cx<T>>) {
    match mode {
        Mode::Hermitian(sign) => {
            let h = HermitianMatrix::from_hermitian_part(&theta.scale_real(sign));
            let e = eig_hermitian(&h);
            let n = e.values.len();
            let z = e.column(n - 1);
            let eta = z.iter().map(|c| *c * sign).collect();
            (e.max(), z, eta)
        }
        Mode::General => {
            let (s, u, v) = top_singular(theta);
            (s, v, u)
        }
    }
}

/// Runs one ascent from `(ζ, η)`.
pub fn ascend<T: Real>(
    f: &MatrixFunctional<T>,
    lmo: &mut Lmo<T>,
    mut zeta: Vec<Cx<T>>,
    mut eta: Vec<Cx<T>>,
    mode: Mode<T>,
) -> SeeSawPoint<T> {
    let n = lmo.level();
    let mut best: Option<SeeSawPoint<T>> = None;
    for it in 1..=ASCENT_ITERS {
        let w = theta_dual(f, &outer(&zeta, &eta), n);
        let r = lmo.maximize(&w);
        let theta = theta_apply(f, &r.x).expect("same system");
        let (value, z, e) = best_vectors(&theta, mode);
        let improved = best
            .as_ref()
            .map(|b| value - b.value > T::floor_tol(1e-12) * (T::one() + value.abs()))
            .unwrap_or(true);
        if best.as_ref().map(|b| value >= b.value).unwrap_or(true) {
            best = Some(SeeSawPoint {
                x: r.x,
                zeta: z.clone(),
                eta: e.clone(),
                value,
                residual: r.residual,
                iterations: it,
            });
        }
        if !improved {
            break;
        }
        zeta = z;
        eta = e;
    }
    best.expect("at least one iteration")
}

/// Evaluates a fixed element and ascends from its best vectors.
pub fn ascend_from_element<T: Real>(
    f: &MatrixFunctional<T>,
    lmo: &mut Lmo<T>,
    x: &MatrixElement<T>,
    mode: Mode<T>,
) -> SeeSawPoint<T> {
    let theta = theta_apply(f, x).expect("same system");
    let (value, z, e) = best_vectors(&theta, mode);
    let start = SeeSawPoint {
        x: x.clone(),
        zeta: z.clone(),
        eta: e.clone(),
        value,
        residual: T::zero(),
        iterations: 0,
    };
    let run = ascend(f, lmo, z, e, mode);
    if run.value >= start.value {
        run
    } else {
        start
    }
}

/// Structured then random unit vectors in `ℂ^{n·m}`: the maximally
/// entangled vector, the first and last basis vectors, then seeded random.
pub fn start_vectors<T: Real>(n: usize, m: usize, count: usize, rng: &mut XorShiftRng) -> Vec<Vec<Cx<T>>> {
    let dim = n * m;
    let mut out = Vec::with_capacity(count);
    let r = n.min(m);
    let mut omega = vec![czero(); dim];
    let w = T::one() / T::lit((r as f64).sqrt());
    for i in 0..r {
        omega[i * m + i] = creal(w);
    }
    out.push(omega);
    let mut e0 = vec![czero(); dim];
    e0[0] = creal(T::one());
    out.push(e0);
    if dim > 1 {
        let mut e1 = vec![czero(); dim];
        e1[dim - 1] = creal(T::one());
        out.push(e1);
    }
    while out.len() < count {
        let mut v: Vec<Cx<T>> = (0..dim).map(|_| rng.complex()).collect();
        crate::numkernel::matrix::normalize(&mut v);
        out.push(v);
    }
    out.truncate(count.max(1));
    out
}
