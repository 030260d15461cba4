//! The ordered-space shadow of a diagonal operator system and the
//! comparison of its exact LP norms with the matrix computations.
//!
//! For `S` spanned by diagonal matrices, `S_sa` has real coordinates `c`
//! along the Hermitian frame and `x = diag(Φc)`. The cone is
//! `{c : Φc ≥ 0}` and the unit ball `{c : |Φc|_∞ ≤ 1}`; both are
//! converted to generator/vertex form by enumerating tight row subsets.

use serde::Serialize;

use super::ops::flat_norm;
use super::simplex::solve_dense;
use super::space::{Ball, OrderedSpace};
use crate::dualspace::{d_norm, dual_norm, DNormSettings, MatrixFunctional};
use crate::error::{Error, Result};
use crate::opsys::OperatorSystem;

const ENUM_TOL: f64 = 1e-9;

fn phi(sys: &OperatorSystem<f64>) -> Vec<Vec<f64>> {
    let d = sys.ambient_dim();
    (0..d)
        .map(|i| sys.frame().iter().map(|f| f[(i, i)].re).collect())
        .collect()
}

fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// One-dimensional null space of `rows` (`k − 1` rows in `ℝ^k`), if any.
fn null_vector(rows: &[Vec<f64>], k: usize) -> Option<Vec<f64>> {
    // Try each coordinate as the free one: fix it to 1 and solve the rest.
    for free in 0..k {
        let a: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| (0..k).filter(|&j| j != free).map(|j| r[j]).collect())
            .collect();
        let b: Vec<f64> = rows.iter().map(|r| -r[free]).collect();
        let sol = if rows.is_empty() {
            Some(Vec::new())
        } else {
            solve_dense(a, b)
        };
        if let Some(s) = sol {
            let mut v = Vec::with_capacity(k);
            let mut it = s.into_iter();
            for j in 0..k {
                v.push(if j == free { 1.0 } else { it.next().unwrap_or(0.0) });
            }
            return Some(v);
        }
    }
    None
}

fn push_unique(out: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    if !out.iter().any(|w| w.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 1e-8)) {
        out.push(v);
    }
}

fn apply(phi: &[Vec<f64>], c: &[f64]) -> Vec<f64> {
    phi.iter().map(|r| super::simplex::dot(r, c)).collect()
}

/// Extreme rays of `{c : Φc ≥ 0}` and vertices of `{c : |Φc|_∞ ≤ 1}`.
fn shadow_data(phi: &[Vec<f64>], k: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let d = phi.len();
    let mut rays = Vec::new();
    if k >= 1 {
        for set in subsets(d, k - 1) {
            let rows: Vec<Vec<f64>> = set.iter().map(|&i| phi[i].clone()).collect();
            let Some(r) = null_vector(&rows, k) else { continue };
            let residual = rows
                .iter()
                .map(|row| super::simplex::dot(row, &r).abs())
                .fold(0.0, f64::max);
            if residual > 1e-8 {
                continue;
            }
            for s in [1.0, -1.0] {
                let v: Vec<f64> = r.iter().map(|x| s * x).collect();
                let img = apply(phi, &v);
                let scale = img.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if scale > ENUM_TOL && img.iter().all(|x| *x >= -ENUM_TOL * scale) {
                    push_unique(&mut rays, v.iter().map(|x| x / scale).collect());
                }
            }
        }
    }
    let mut vertices = Vec::new();
    for set in subsets(d, k) {
        for bits in 0..1u32 << k {
            let a: Vec<Vec<f64>> = set.iter().map(|&i| phi[i].clone()).collect();
            let b: Vec<f64> = (0..k).map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            if let Some(c) = solve_dense(a, b) {
                if apply(phi, &c).iter().all(|x| x.abs() <= 1.0 + ENUM_TOL) {
                    push_unique(&mut vertices, c);
                }
            }
        }
    }
    (rays, vertices)
}

/// The ordered-space shadow of a diagonal system in frame coordinates.
pub fn diagonal_shadow(sys: &OperatorSystem<f64>) -> Result<OrderedSpace> {
    if !sys.is_diagonal() {
        return Err(Error::NonCommutative(format!(
            "{} is not spanned by diagonal matrices",
            sys.label()
        )));
    }
    let k = sys.frame().len();
    let (rays, vertices) = shadow_data(&phi(sys), k);
    OrderedSpace::new(k, rays, Ball::Polytope(vertices), format!("shadow:{}", sys.label()))
}

/// `f` on the frame; errors unless `f` is a self-adjoint scalar functional.
pub fn shadow_functional(f: &MatrixFunctional<f64>) -> Result<Vec<f64>> {
    if f.level() != 1 {
        return Err(Error::Invalid("the scalar oracle takes level-1 functionals".into()));
    }
    if !f.is_self_adjoint(1e-12) {
        return Err(Error::Invalid(
            "the scalar oracle takes self-adjoint functionals".into(),
        ));
    }
    Ok(f.system().frame().iter().map(|x| f.eval(x)[(0, 0)].re).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub d_norm: f64,
    pub flat_norm: f64,
    pub dual_norm: f64,
    /// Exact dual norm of `f` against the shadow ball.
    pub dual_ball_norm: f64,
    pub d_gap: f64,
    pub dual_gap: f64,
    pub tol: f64,
    pub passes: bool,
}

/// `|d_norm − flat_norm| ≤ tol` and `|dual_norm − dual ball norm| ≤ tol`.
pub fn oracle_compare(f: &MatrixFunctional<f64>, settings: DNormSettings, tol: f64) -> Result<OracleReport> {
    let space = diagonal_shadow(f.system())?;
    let fs = shadow_functional(f)?;
    let flat = flat_norm(&fs, &space)?.value;
    let dual_ball_norm = space.dual_ball_norm(&fs);
    let dn = d_norm(f, settings).value;
    let cb = dual_norm(f, settings.tol).value;
    let d_gap = (dn - flat).abs();
    let dual_gap = (cb - dual_ball_norm).abs();
    Ok(OracleReport {
        d_norm: dn,
        flat_norm: flat,
        dual_norm: cb,
        dual_ball_norm,
        d_gap,
        dual_gap,
        tol,
        passes: d_gap <= tol && dual_gap <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_linfty, build_toeplitz};
    use crate::numkernel::ComplexMatrix;
    use crate::opsys::make_system;

    #[test]
    fn linf_shadow_is_the_cube() {
        let s = diagonal_shadow(&build_linfty(3).unwrap()).unwrap();
        assert_eq!(s.cone().len(), 3);
        let Ball::Polytope(vs) = s.ball() else { panic!() };
        assert_eq!(vs.len(), 8);
    }

    #[test]
    fn proper_diagonal_subsystem() {
        // span{I, diag(1, 1, −1)}: the positives are spanned by diag(1,1,0)
        // and diag(0,0,1); reading the (3,3) entry has flat norm 1.
        let sys = make_system(
            &[ComplexMatrix::identity(3), ComplexMatrix::diag_real(&[1.0, 1.0, -1.0])],
            true,
            "sub",
        )
        .unwrap();
        let space = diagonal_shadow(&sys).unwrap();
        assert_eq!(space.cone().len(), 2);
        let f = MatrixFunctional::from_map(sys.clone(), 1, |a| ComplexMatrix::from_fn(1, 1, |_, _| a[(2, 2)])).unwrap();
        let r = oracle_compare(
            &f,
            DNormSettings {
                level_max: 2,
                restarts: 4,
                ..Default::default()
            },
            1e-6,
        )
        .unwrap();
        assert!(r.passes, "{r:?}");
        assert!((r.flat_norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn examples() {
        let s = build_linfty(2).unwrap();
        let r = oracle_compare(
            &MatrixFunctional::scalar(s.clone(), &[1.0, -1.0]).unwrap(),
            DNormSettings::default(),
            1e-6,
        )
        .unwrap();
        assert!(r.passes && (r.d_norm - 1.0).abs() < 1e-6, "{r:?}");
        let z = oracle_compare(&MatrixFunctional::zero(s, 1), DNormSettings::default(), 1e-6).unwrap();
        assert_eq!((z.d_norm, z.flat_norm), (0.0, 0.0));
        assert!(matches!(
            diagonal_shadow(&build_toeplitz(2).unwrap()),
            Err(Error::NonCommutative(_))
        ));
    }
}
