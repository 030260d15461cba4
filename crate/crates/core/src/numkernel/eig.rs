//! Hermitian matrices and their spectral routines (cyclic complex Jacobi).

use std::ops::Deref;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{creal, czero, Cx, Real};

/// A square complex matrix with `‖H − H†‖_F ≤ 1e−12·(1+‖H‖_F)`.
///
/// The tolerance is floored at a few hundred ulps for `f32`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real>(ComplexMatrix<T>);

impl<T: Real> Deref for HermitianMatrix<T> {
    type Target = ComplexMatrix<T>;
    fn deref(&self) -> &ComplexMatrix<T> {
        &self.0
    }
}

impl<T: Real> HermitianMatrix<T> {
    pub fn new(m: ComplexMatrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::shape(
                "Hermitian matrix",
                "square",
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        if !m.is_finite() {
            return Err(Error::Invalid("non-finite entries".into()));
        }
        let defect = m.hermitian_defect();
        let tol = T::floor_tol(1e-12) * (T::one() + m.frobenius_norm());
        if defect > tol {
            return Err(Error::NotHermitian {
                asymmetry: defect.as_f64(),
            });
        }
        Ok(Self(m.hermitian_part()))
    }

    /// Takes the Hermitian part without checking the defect.
    pub fn from_hermitian_part(m: &ComplexMatrix<T>) -> Self {
        Self(m.hermitian_part())
    }

    pub(crate) fn from_raw(m: ComplexMatrix<T>) -> Self {
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.0
    }
}

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> Eigen<T> {
    /// `Σ g(λ_i) v_i v_i†`.
    pub fn reconstruct_with(&self, mut g: impl FnMut(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let v = &self.vectors;
        let gl: Vec<T> = self.values.iter().map(|&l| g(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in gl.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * w;
                for j in i..n {
                    let z = a * v[(j, k)].conj();
                    out[(i, j)] += z;
                }
            }
        }
        for i in 0..n {
            out[(i, i)].im = T::zero();
            for j in 0..i {
                out[(i, j)] = out[(j, i)].conj();
            }
        }
        out
    }

    pub fn column(&self, k: usize) -> Vec<Cx<T>> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }
}

fn jacobi<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>) {
    let n = a.rows();
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let eps = T::epsilon();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= eps * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let r = b.norm();
                if r <= eps * eps * scale {
                    continue;
                }
                let e = b.unscale(r);
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (r + r);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                // U = [[c, s], [−ē s, ē c]] on the (p, q) plane.
                let u_pp = creal(c);
                let u_pq = creal(s);
                let u_qp = -e.conj() * s;
                let u_qq = e.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = czero();
                a[(q, p)] = czero();
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }
}

fn sorted<T: Real>(a: &ComplexMatrix<T>, v: ComplexMatrix<T>) -> Eigen<T> {
    let n = a.rows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = idx.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    Eigen { values, vectors }
}

/// Eigendecomposition `H = V diag(λ) V†`, eigenvalues ascending.
pub fn eig_hermitian<T: Real>(h: &HermitianMatrix<T>) -> Eigen<T> {
    let mut a = h.as_matrix().clone();
    let mut v = ComplexMatrix::identity(a.rows());
    jacobi(&mut a, &mut v);
    sorted(&a, v)
}

/// Same as [`eig_hermitian`], starting the rotations from a guessed basis.
///
/// When `guess` nearly diagonalizes `h` (successive iterates of a splitting
/// method) a single sweep usually suffices.
pub fn eig_hermitian_from<T: Real>(h: &HermitianMatrix<T>, guess: &ComplexMatrix<T>) -> Eigen<T> {
    let mut a = guess.adjoint_mul(&h.as_matrix().matmul(guess)).hermitian_part();
    let mut v = guess.clone();
    jacobi(&mut a, &mut v);
    sorted(&a, v)
}

/// Checked variant for arbitrary matrices.
pub fn eig_of<T: Real>(m: &ComplexMatrix<T>) -> Result<Eigen<T>> {
    Ok(eig_hermitian(&HermitianMatrix::new(m.clone())?))
}

/// Frobenius-nearest PSD matrix: `Σ_{λ_i>0} λ_i v_i v_i†`.
pub fn project_psd<T: Real>(h: &HermitianMatrix<T>) -> HermitianMatrix<T> {
    let e = eig_hermitian(h);
    HermitianMatrix(e.reconstruct_with(|l| l.max(T::zero())))
}

/// Frobenius-nearest matrix with spectrum in `[0, cap]`.
pub fn project_psd_capped<T: Real>(h: &HermitianMatrix<T>, cap: Option<T>) -> HermitianMatrix<T> {
    let e = eig_hermitian(h);
    HermitianMatrix(e.reconstruct_with(|l| clip(l, cap)))
}

#[inline]
pub(crate) fn clip<T: Real>(l: T, cap: Option<T>) -> T {
    let l = l.max(T::zero());
    match cap {
        Some(c) => l.min(c),
        None => l,
    }
}

/// Largest singular value, `sqrt(λ_max(A†A))`.
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    if a.rows() == 0 || a.cols() == 0 {
        return T::zero();
    }
    let g = if a.rows() < a.cols() {
        a.matmul(&a.adjoint())
    } else {
        a.adjoint_mul(a)
    };
    let e = eig_hermitian(&HermitianMatrix::from_hermitian_part(&g));
    e.max().max(T::zero()).sqrt()
}

/// Operator norm of a Hermitian matrix, `max(|λ_min|, |λ_max|)`.
pub fn hermitian_norm<T: Real>(h: &HermitianMatrix<T>) -> T {
    let e = eig_hermitian(h);
    e.min().abs().max(e.max().abs())
}

/// Top singular triple `(σ, u, v)` with `A v = σ u`.
pub fn top_singular<T: Real>(a: &ComplexMatrix<T>) -> (T, Vec<Cx<T>>, Vec<Cx<T>>) {
    let g = a.adjoint_mul(a);
    let e = eig_hermitian(&HermitianMatrix::from_hermitian_part(&g));
    let n = a.cols();
    let v = e.column(n - 1);
    let mut u = a.matvec(&v);
    let s = super::matrix::normalize(&mut u);
    if s <= T::epsilon() {
        let mut u0 = vec![czero(); a.rows()];
        u0[0] = creal(T::one());
        return (T::zero(), u0, v);
    }
    (s, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type M = ComplexMatrix<f64>;

    fn herm(m: M) -> HermitianMatrix<f64> {
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn identity_and_diagonal() {
        let e = eig_hermitian(&HermitianMatrix::<f64>::identity(3));
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        let d = herm(M::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap());
        let e = eig_hermitian(&d);
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_x_eigenvectors() {
        let x = herm(M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap());
        let e = eig_hermitian(&x);
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        // λ = −1 ↔ (1, −1)/√2 up to phase; λ = 1 ↔ (1, 1)/√2.
        let v0 = e.column(0);
        let v1 = e.column(1);
        let ov0 = (v0[0] * s - v0[1] * s).norm();
        let ov1 = (v1[0] * s + v1[1] * s).norm();
        assert!((ov0 - 1.0).abs() < 1e-13 && (ov1 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = M::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        match HermitianMatrix::new(m) {
            Err(Error::NotHermitian { asymmetry }) => assert!((asymmetry - 2f64.sqrt()).abs() < 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn complex_reconstruction_and_unitarity() {
        let m = M::from_fn(4, 4, |i, j| {
            cx((i + 2 * j) as f64 * 0.3 - 1.0, (i as f64 - j as f64) * 0.7)
        });
        let h = HermitianMatrix::from_hermitian_part(&m);
        let e = eig_hermitian(&h);
        let r = e.reconstruct_with(|l| l);
        assert!(r.sub(&h).frobenius_norm() < 1e-12 * (1.0 + h.frobenius_norm()));
        let vv = e.vectors.adjoint_mul(&e.vectors);
        assert!(vv.sub(&M::identity(4)).frobenius_norm() < 1e-12);
        for w in e.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn psd_projection_examples() {
        let d = herm(M::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap());
        let p = project_psd(&d);
        assert!(
            p.sub(&M::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap())
                .frobenius_norm()
                < 1e-15
        );
        let neg = herm(M::identity(3).scale_real(-1.0));
        assert!(project_psd(&neg).frobenius_norm() < 1e-15);
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&M::zeros(3, 3)), 0.0);
        let d = M::from_real(2, 2, &[3.0, 0.0, 0.0, -4.0]).unwrap();
        assert!((operator_norm(&d) - 4.0).abs() < 1e-12);
        let n = M::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((operator_norm(&n) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn f32_instantiation() {
        let m = ComplexMatrix::<f32>::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = eig_of(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-5 && (e.values[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn warm_start_agrees() {
        let m = M::from_fn(5, 5, |i, j| {
            cx(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.2)
        });
        let h = HermitianMatrix::from_hermitian_part(&m);
        let cold = eig_hermitian(&h);
        let warm = eig_hermitian_from(&h, &cold.vectors);
        for (a, b) in cold.values.iter().zip(&warm.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
