//! Real coordinates on Hermitian matrices.
//!
//! An `n × n` Hermitian matrix maps to `n²` reals: the diagonal first, then
//! `(√2·Re h_ij, √2·Im h_ij)` for `i < j` in row-major order. With this
//! scaling the Euclidean inner product equals `Re Tr(A B)`.

use super::matrix::ComplexMatrix;
use crate::scalar::{cx, Real};

#[inline]
pub fn hdim(n: usize) -> usize {
    n * n
}

/// Writes the coordinates of the Hermitian part of `m` into `out`.
pub fn hvec_into<T: Real>(m: &ComplexMatrix<T>, out: &mut [T]) {
    let n = m.rows();
    debug_assert_eq!(out.len(), n * n);
    let half = T::lit(0.5);
    let r2 = T::lit(std::f64::consts::SQRT_2);
    for i in 0..n {
        out[i] = m[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = (m[(i, j)] + m[(j, i)].conj()).scale(half);
            out[k] = r2 * z.re;
            out[k + 1] = r2 * z.im;
            k += 2;
        }
    }
}

pub fn hvec<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let mut out = vec![T::zero(); m.rows() * m.rows()];
    hvec_into(m, &mut out);
    out
}

pub fn unhvec<T: Real>(v: &[T], n: usize) -> ComplexMatrix<T> {
    debug_assert_eq!(v.len(), n * n);
    let mut m = ComplexMatrix::zeros(n, n);
    let ir2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..n {
        m[(i, i)] = cx(v[i], T::zero());
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let z = cx(v[k] * ir2, v[k + 1] * ir2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Coefficients `a` with `a · hvec(X) = Re Tr(G X)` for every Hermitian `X`.
pub fn functional<T: Real>(g: &ComplexMatrix<T>) -> Vec<T> {
    let n = g.rows();
    let mut a = vec![T::zero(); n * n];
    let ir2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    for i in 0..n {
        a[i] = g[(i, i)].re;
    }
    let mut k = n;
    for i in 0..n {
        for j in (i + 1)..n {
            let gij = g[(i, j)];
            let gji = g[(j, i)];
            a[k] = (gji.re + gij.re) * ir2;
            a[k + 1] = (gij.im - gji.im) * ir2;
            k += 2;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn sample(n: usize, s: f64) -> M {
        M::from_fn(n, n, |i, j| {
            cx((i as f64 + s) * (j as f64 - 0.5), (i as f64 - j as f64) * s)
        })
    }

    #[test]
    fn roundtrip_and_isometry() {
        let a = sample(3, 0.7).hermitian_part();
        let b = sample(3, -1.3).hermitian_part();
        let va = hvec(&a);
        let back = unhvec(&va, 3);
        assert!(back.sub(&a).frobenius_norm() < 1e-14);
        let dot: f64 = va.iter().zip(hvec(&b)).map(|(x, y)| x * y).sum();
        assert!((dot - a.inner(&b).re).abs() < 1e-12);
    }

    #[test]
    fn functional_matches_trace() {
        let g = sample(3, 2.1);
        let x = sample(3, 0.4).hermitian_part();
        let a = functional(&g);
        let lhs: f64 = a.iter().zip(hvec(&x)).map(|(p, q)| p * q).sum();
        let rhs = g.matmul(&x).trace().re;
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
