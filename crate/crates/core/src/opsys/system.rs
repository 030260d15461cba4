use crate::error::{Error, Result};
use crate::numkernel::hvec::{hvec, unhvec};
use crate::numkernel::ComplexMatrix;
use crate::scalar::{ci, creal, Cx, Real};

/// Relative tolerance for span, dependence and adjoint-closure tests.
pub const SPAN_TOL: f64 = 1e-10;

/// A self-adjoint subspace `S ⊆ M_d`.
///
/// `basis` is the Frobenius-orthonormalization (Gram–Schmidt, order
/// preserving) of the generators; every coefficient tensor and functional
/// value in the crate refers to it. `frame` is an orthonormal basis of the
/// Hermitian part `S_sa` over the reals, used for all real-coordinate work.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSystem<T: Real> {
    label: String,
    ambient_dim: usize,
    basis: Vec<ComplexMatrix<T>>,
    frame: Vec<ComplexMatrix<T>>,
    unital: bool,
    algebra: bool,
}

fn real_dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

fn distance_to_span<T: Real>(basis: &[ComplexMatrix<T>], m: &ComplexMatrix<T>) -> T {
    let mut r = m.clone();
    for b in basis {
        let c = b.inner(&r);
        r.axpy(-c, b);
    }
    r.frobenius_norm()
}

impl<T: Real> OperatorSystem<T> {
    /// Validates and orthonormalizes `matrices`.
    ///
    /// Rejects unequal or non-square shapes, linearly dependent generators,
    /// spans that are not adjoint-closed, and a `unital` flag when the
    /// identity is not in the span. A span containing the identity is
    /// always treated as unital.
    pub fn new(matrices: &[ComplexMatrix<T>], unital: bool, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let first = matrices
            .first()
            .ok_or_else(|| Error::Invalid("an operator system needs at least one generator".into()))?;
        let d = first.rows();
        if d == 0 {
            return Err(Error::Invalid("ambient dimension must be positive".into()));
        }
        for m in matrices {
            if !m.is_square() || m.rows() != d {
                return Err(Error::shape(
                    "generator",
                    format!("{d}x{d}"),
                    format!("{}x{}", m.rows(), m.cols()),
                ));
            }
            if !m.is_finite() {
                return Err(Error::Invalid("generator has non-finite entries".into()));
            }
        }
        let tol = T::floor_tol(SPAN_TOL);

        let mut basis: Vec<ComplexMatrix<T>> = Vec::with_capacity(matrices.len());
        for (index, m) in matrices.iter().enumerate() {
            let n0 = m.frobenius_norm();
            let mut r = m.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.inner(&r);
                    r.axpy(-c, b);
                }
            }
            let nr = r.frobenius_norm();
            if n0 == T::zero() || nr <= tol * n0 {
                return Err(Error::DependentGenerators {
                    index,
                    residual: if n0 == T::zero() { 0.0 } else { (nr / n0).as_f64() },
                });
            }
            basis.push(r.scale_real(T::one() / nr));
        }

        for (index, b) in basis.iter().enumerate() {
            let dist = distance_to_span(&basis, &b.adjoint());
            if dist > tol * T::lit(10.0) {
                return Err(Error::NotAdjointClosed {
                    index,
                    distance: dist.as_f64(),
                });
            }
        }

        let id_dist = distance_to_span(&basis, &ComplexMatrix::identity(d));
        let has_unit = id_dist <= tol * T::lit(10.0) * T::lit((d as f64).sqrt());
        if unital && !has_unit {
            return Err(Error::UnitNotInSpan {
                distance: id_dist.as_f64(),
            });
        }

        let frame = hermitian_frame(&basis);
        if frame.len() != basis.len() {
            return Err(Error::Solver(format!(
                "Hermitian frame has {} elements for a {}-dimensional span",
                frame.len(),
                basis.len()
            )));
        }
        let algebra = frame.iter().all(|a| {
            frame
                .iter()
                .all(|b| distance_to_span(&basis, &a.matmul(b)) <= T::floor_tol(1e-9) * T::lit(10.0))
        });

        Ok(Self {
            label,
            ambient_dim: d,
            basis,
            frame,
            unital: has_unit,
            algebra,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Ambient dimension `d` (`S ⊆ M_d`).
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Complex dimension `k` of the span.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix<T>] {
        &self.basis
    }

    pub fn frame(&self) -> &[ComplexMatrix<T>] {
        &self.frame
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// Closed under products, i.e. a (possibly non-unital) `*`-subalgebra of `M_d`.
    pub fn is_algebra(&self) -> bool {
        self.algebra
    }

    /// True when every basis matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        let tol = T::floor_tol(SPAN_TOL);
        self.basis
            .iter()
            .all(|b| (0..self.ambient_dim).all(|i| (0..self.ambient_dim).all(|j| i == j || b[(i, j)].norm() <= tol)))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Coefficients `⟨b_s, m⟩` of the orthogonal projection onto the span.
    pub fn coeffs_of(&self, m: &ComplexMatrix<T>) -> Vec<Cx<T>> {
        self.basis.iter().map(|b| b.inner(m)).collect()
    }

    pub fn combine(&self, coeffs: &[Cx<T>]) -> ComplexMatrix<T> {
        let d = self.ambient_dim;
        let mut out = ComplexMatrix::zeros(d, d);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out.axpy(*c, b);
        }
        out
    }

    /// `‖m − P_S(m)‖_F`.
    pub fn distance(&self, m: &ComplexMatrix<T>) -> T {
        distance_to_span(&self.basis, m)
    }

    pub fn contains(&self, m: &ComplexMatrix<T>) -> bool {
        self.distance(m) <= T::floor_tol(1e-8) * (T::one() + m.frobenius_norm())
    }

    /// Coefficients of the unit `I_d`, if it lies in the span.
    pub fn unit_coeffs(&self) -> Option<Vec<Cx<T>>> {
        self.unital
            .then(|| self.coeffs_of(&ComplexMatrix::identity(self.ambient_dim)))
    }
}

/// Real orthonormal basis of the Hermitian elements of `span(basis)`,
/// assuming the span is adjoint-closed.
fn hermitian_frame<T: Real>(basis: &[ComplexMatrix<T>]) -> Vec<ComplexMatrix<T>> {
    let n = basis.first().map(|b| b.rows()).unwrap_or(0);
    let half = creal(T::lit(0.5));
    let mut vecs: Vec<Vec<T>> = Vec::new();
    let tol = T::floor_tol(1e-8);
    for b in basis {
        let adj = b.adjoint();
        let re = b.add(&adj).scale(half);
        let im = b.sub(&adj).scale(half * -ci::<T>());
        for h in [re, im] {
            let mut v = hvec(&h);
            let n0 = real_dot(&v, &v).sqrt();
            if n0 <= tol {
                continue;
            }
            for _ in 0..2 {
                for q in &vecs {
                    let r = real_dot(q, &v);
                    for (x, y) in v.iter_mut().zip(q) {
                        *x -= r * *y;
                    }
                }
            }
            let nv = real_dot(&v, &v).sqrt();
            if nv > tol * n0.max(T::one()) {
                for x in v.iter_mut() {
                    *x /= nv;
                }
                vecs.push(v);
            }
        }
    }
    vecs.iter().map(|v| unhvec(v, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn diagonal_algebra_from_identity_and_z() {
        let s = OperatorSystem::new(&[M::identity(2), M::diag_real(&[1.0, -1.0])], true, "linf2").unwrap();
        assert_eq!(s.dim(), 2);
        assert!(s.is_unital() && s.is_algebra() && s.is_diagonal());
        assert!(s.contains(&M::unit(2, 0, 0)));
    }

    #[test]
    fn off_diagonal_accepted_single_unit_rejected() {
        let s = OperatorSystem::new(&[M::unit(2, 0, 1), M::unit(2, 1, 0)], false, "offdiag").unwrap();
        assert!(!s.is_unital());
        assert_eq!(s.frame().len(), 2);
        let e = OperatorSystem::new(&[M::unit(2, 0, 1)], false, "bad").unwrap_err();
        assert!(matches!(e, Error::NotAdjointClosed { index: 0, .. }));
    }

    #[test]
    fn dependent_and_missing_unit() {
        let e = OperatorSystem::new(&[M::identity(2), M::identity(2).scale_real(2.0)], false, "x").unwrap_err();
        assert!(matches!(e, Error::DependentGenerators { index: 1, .. }));
        let e = OperatorSystem::new(&[M::unit(2, 0, 0)], true, "x").unwrap_err();
        assert!(matches!(e, Error::UnitNotInSpan { .. }));
        let e = OperatorSystem::new(&[M::identity(2), M::identity(3)], false, "x").unwrap_err();
        assert!(matches!(e, Error::Shape { .. }));
    }

    #[test]
    fn frame_is_orthonormal_hermitian() {
        let s = OperatorSystem::new(
            &[M::unit(2, 0, 0), M::unit(2, 0, 1), M::unit(2, 1, 0), M::unit(2, 1, 1)],
            true,
            "m2",
        )
        .unwrap();
        for (i, a) in s.frame().iter().enumerate() {
            assert!(a.hermitian_defect() < 1e-14);
            for (j, b) in s.frame().iter().enumerate() {
                let ip = a.inner(b).re;
                assert!((ip - if i == j { 1.0 } else { 0.0 }).abs() < 1e-13);
            }
        }
    }
}
