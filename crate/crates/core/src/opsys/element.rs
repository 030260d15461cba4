use std::sync::Arc;

use super::system::OperatorSystem;
use crate::error::{Error, Result};
use crate::numkernel::{eig_hermitian, hermitian_norm, operator_norm, ComplexMatrix, HermitianMatrix};
use crate::rng::XorShiftRng;
use crate::scalar::{czero, Cx, Real};

/// Element of `M_n(S)`: the concrete `nd × nd` matrix together with its
/// coefficient tensor `coeffs[(i·n + j)·k + s]` on the system basis.
///
/// Row index `i·d + p` addresses entry `p` of block row `i`.
#[derive(Clone, Debug)]
pub struct MatrixElement<T: Real> {
    system: Arc<OperatorSystem<T>>,
    level: usize,
    concrete: ComplexMatrix<T>,
    coeffs: Vec<Cx<T>>,
}

pub(crate) fn same_system<T: Real>(a: &Arc<OperatorSystem<T>>, b: &Arc<OperatorSystem<T>>) -> Result<()> {
    if Arc::ptr_eq(a, b) || **a == **b {
        Ok(())
    } else {
        Err(Error::SystemMismatch {
            left: a.label().to_string(),
            right: b.label().to_string(),
        })
    }
}

/// Concrete matrix `Σ coeffs[i][j][s] · E_ij ⊗ b_s`.
pub(crate) fn assemble<T: Real>(system: &OperatorSystem<T>, n: usize, coeffs: &[Cx<T>]) -> ComplexMatrix<T> {
    let d = system.ambient_dim();
    let k = system.dim();
    let mut out = ComplexMatrix::zeros(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            let blk = system.combine(&coeffs[(i * n + j) * k..(i * n + j + 1) * k]);
            out.set_block(i, j, &blk);
        }
    }
    out
}

/// Blockwise coefficients of an `nd × nd` matrix and the Frobenius distance
/// from `M_n(S)`.
pub(crate) fn decompose<T: Real>(system: &OperatorSystem<T>, n: usize, m: &ComplexMatrix<T>) -> (Vec<Cx<T>>, T) {
    let d = system.ambient_dim();
    let mut coeffs = Vec::with_capacity(n * n * system.dim());
    let mut dist2 = T::zero();
    for i in 0..n {
        for j in 0..n {
            let blk = m.block(i, j, d, d);
            let c = system.coeffs_of(&blk);
            let r = system.combine(&c).sub(&blk).frobenius_norm();
            dist2 += r * r;
            coeffs.extend(c);
        }
    }
    (coeffs, dist2.sqrt())
}

impl<T: Real> MatrixElement<T> {
    pub fn from_coeffs(system: Arc<OperatorSystem<T>>, level: usize, coeffs: Vec<Cx<T>>) -> Result<Self> {
        let want = level * level * system.dim();
        if level == 0 || coeffs.len() != want {
            return Err(Error::shape("coefficient tensor", want, coeffs.len()));
        }
        let concrete = assemble(&system, level, &coeffs);
        Ok(Self {
            system,
            level,
            concrete,
            coeffs,
        })
    }

    /// Accepts an `nd × nd` matrix lying in `M_n(S)` up to `1e−8` relative
    /// Frobenius distance; the stored matrix is its projection.
    pub fn from_concrete(system: Arc<OperatorSystem<T>>, m: &ComplexMatrix<T>) -> Result<Self> {
        let d = system.ambient_dim();
        if !m.is_square() || m.rows() == 0 || m.rows() % d != 0 {
            return Err(Error::shape(
                "matrix element",
                format!("multiple of {d} square"),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        if !m.is_finite() {
            return Err(Error::Invalid("matrix element has non-finite entries".into()));
        }
        let n = m.rows() / d;
        let (coeffs, dist) = decompose(&system, n, m);
        if dist > T::floor_tol(1e-8) * (T::one() + m.frobenius_norm()) {
            return Err(Error::Invalid(format!(
                "matrix is at distance {:.3e} from M_{n}({})",
                dist.as_f64(),
                system.label()
            )));
        }
        Self::from_coeffs(system, n, coeffs)
    }

    /// Orthogonal projection of an arbitrary `nd × nd` matrix onto `M_n(S)`.
    pub fn project(system: Arc<OperatorSystem<T>>, m: &ComplexMatrix<T>) -> Result<Self> {
        let d = system.ambient_dim();
        if !m.is_square() || m.rows() == 0 || m.rows() % d != 0 {
            return Err(Error::shape(
                "matrix element",
                format!("multiple of {d} square"),
                format!("{}x{}", m.rows(), m.cols()),
            ));
        }
        let n = m.rows() / d;
        let (coeffs, _) = decompose(&system, n, m);
        Self::from_coeffs(system, n, coeffs)
    }

    pub fn zero(system: Arc<OperatorSystem<T>>, level: usize) -> Self {
        let k = system.dim();
        Self::from_coeffs(system, level.max(1), vec![czero(); level.max(1) * level.max(1) * k])
            .expect("zero element shape")
    }

    /// `1_n ⊗ I_d`, for unital systems.
    pub fn unit(system: Arc<OperatorSystem<T>>, level: usize) -> Result<Self> {
        let d = system.ambient_dim();
        if !system.is_unital() {
            return Err(Error::Invalid(format!("system {} is not unital", system.label())));
        }
        Self::from_concrete(system, &ComplexMatrix::identity(level * d))
    }

    /// Seeded self-adjoint element with unit operator norm (zero if the
    /// system has no nonzero self-adjoint elements at this level).
    pub fn random_self_adjoint(system: Arc<OperatorSystem<T>>, level: usize, rng: &mut XorShiftRng) -> Self {
        let d = system.ambient_dim();
        let frame = system.frame().to_vec();
        let mut m = ComplexMatrix::zeros(level * d, level * d);
        for i in 0..level {
            for j in i..level {
                let mut blk = ComplexMatrix::zeros(d, d);
                for f in &frame {
                    let c = if i == j {
                        Cx::new(rng.real::<T>(), T::zero())
                    } else {
                        rng.complex::<T>()
                    };
                    blk.axpy(c, f);
                }
                m.set_block(i, j, &blk);
                if i != j {
                    m.set_block(j, i, &blk.adjoint());
                }
            }
        }
        let e = Self::project(system, &m).expect("level shape");
        e.normalized()
    }

    /// Scaled to unit operator norm; zero stays zero.
    pub fn normalized(&self) -> Self {
        let nrm = self.norm();
        if nrm <= T::floor_tol(1e-14) {
            return self.clone();
        }
        self.scale(T::one() / nrm)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            system: self.system.clone(),
            level: self.level,
            concrete: self.concrete.scale_real(s),
            coeffs: self.coeffs.iter().map(|c| *c * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        if self.level != other.level {
            return Err(Error::shape("element level", self.level, other.level));
        }
        Ok(Self {
            system: self.system.clone(),
            level: self.level,
            concrete: self.concrete.sub(&other.concrete),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| *a - *b).collect(),
        })
    }

    pub fn system(&self) -> &Arc<OperatorSystem<T>> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn concrete(&self) -> &ComplexMatrix<T> {
        &self.concrete
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Coefficients of block `(i, j)` on the system basis.
    pub fn block_coeffs(&self, i: usize, j: usize) -> &[Cx<T>] {
        let k = self.system.dim();
        let n = self.level;
        &self.coeffs[(i * n + j) * k..(i * n + j + 1) * k]
    }

    pub fn hermitian_defect(&self) -> T {
        self.concrete.hermitian_defect()
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.hermitian_defect() <= T::floor_tol(1e-10) * (T::one() + self.concrete.frobenius_norm())
    }

    /// Operator norm of the concrete matrix.
    pub fn norm(&self) -> T {
        element_norm(self)
    }
}

/// Operator norm of `x.concrete`.
pub fn element_norm<T: Real>(x: &MatrixElement<T>) -> T {
    if x.is_self_adjoint() {
        hermitian_norm(&HermitianMatrix::from_hermitian_part(x.concrete()))
    } else {
        operator_norm(x.concrete())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport<T: Real> {
    pub member: bool,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: T,
    pub hermitian_defect: T,
}

/// `x ∈ M_n(S)^+`: self-adjoint with `λ_min ≥ −tol`.
pub fn cone_membership<T: Real>(x: &MatrixElement<T>, tol: T) -> ConeReport<T> {
    let h = HermitianMatrix::from_hermitian_part(x.concrete());
    let min_eigenvalue = eig_hermitian(&h).min();
    let hermitian_defect = x.hermitian_defect();
    ConeReport {
        member: x.is_self_adjoint() && min_eigenvalue >= -tol,
        min_eigenvalue,
        hermitian_defect,
    }
}

/// `(a ⊗ I_d)† x (a ⊗ I_d)` for a scalar `n × m` matrix `a`; a level-`m` element.
pub fn congruence<T: Real>(a: &ComplexMatrix<T>, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
    let n = x.level();
    if a.rows() != n || a.cols() == 0 {
        return Err(Error::shape(
            "congruence",
            format!("{n}xm scalar matrix"),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let m = a.cols();
    let k = x.system().dim();
    let mut coeffs = vec![czero::<T>(); m * m * k];
    for kk in 0..m {
        for l in 0..m {
            let out = &mut coeffs[(kk * m + l) * k..(kk * m + l + 1) * k];
            for i in 0..n {
                let aik = a[(i, kk)].conj();
                if aik == czero() {
                    continue;
                }
                for j in 0..n {
                    let w = aik * a[(j, l)];
                    if w == czero() {
                        continue;
                    }
                    for (o, c) in out.iter_mut().zip(x.block_coeffs(i, j)) {
                        *o += w * *c;
                    }
                }
            }
        }
    }
    MatrixElement::from_coeffs(x.system().clone(), m, coeffs)
}

/// Embeds a level-`n` element at level `n + extra` by padding with zero blocks.
pub fn embed<T: Real>(x: &MatrixElement<T>, level: usize) -> Result<MatrixElement<T>> {
    let n = x.level();
    if level < n {
        return Err(Error::shape("embedding level", format!(">= {n}"), level));
    }
    let a = ComplexMatrix::from_fn(
        n,
        level,
        |i, j| if i == j { Cx::new(T::one(), T::zero()) } else { czero() },
    );
    congruence(&a, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    type M = ComplexMatrix<f64>;

    fn linf2() -> Arc<OperatorSystem<f64>> {
        Arc::new(OperatorSystem::new(&[M::unit(2, 0, 0), M::unit(2, 1, 1)], true, "linf2").unwrap())
    }

    fn offdiag() -> Arc<OperatorSystem<f64>> {
        Arc::new(OperatorSystem::new(&[M::unit(2, 0, 1), M::unit(2, 1, 0)], false, "offdiag").unwrap())
    }

    #[test]
    fn cone_examples() {
        let s = linf2();
        let e = MatrixElement::unit(s.clone(), 2).unwrap();
        assert!(cone_membership(&e, 1e-9).member);
        let p = MatrixElement::from_concrete(s, &M::diag_real(&[1.0, 0.0])).unwrap();
        assert!(cone_membership(&p, 1e-9).member);
        let x = MatrixElement::from_concrete(offdiag(), &M::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap();
        let r = cone_membership(&x, 1e-9);
        assert!(!r.member && (r.min_eigenvalue + 1.0).abs() < 1e-12);
        assert!((element_norm(&x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norms() {
        let x = MatrixElement::from_concrete(linf2(), &M::diag_real(&[3.0, -4.0])).unwrap();
        assert!((x.norm() - 4.0).abs() < 1e-12);
        assert!((MatrixElement::unit(linf2(), 3).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn congruence_column_of_ones() {
        let x = MatrixElement::from_concrete(linf2(), &M::diag_real(&[1.0, 0.0])).unwrap();
        let a = M::from_real(1, 2, &[1.0, 1.0]).unwrap();
        let y = congruence(&a, &x).unwrap();
        let want = M::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0])
            .unwrap()
            .kron(&M::diag_real(&[1.0, 0.0]));
        assert!(y.concrete().sub(&want).max_abs() < 1e-14);
        let e = eig_hermitian(&HermitianMatrix::new(y.concrete().clone()).unwrap());
        assert!((e.max() - 2.0).abs() < 1e-12 && e.min().abs() < 1e-12);
        assert!(cone_membership(&y, 1e-9).member);
        let z = congruence(&M::zeros(1, 1), &x).unwrap();
        assert_eq!(z.norm(), 0.0);
        let id = congruence(&M::identity(1), &x).unwrap();
        assert!(id.concrete().sub(x.concrete()).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_outside_and_mismatch() {
        assert!(MatrixElement::from_concrete(offdiag(), &M::identity(2)).is_err());
        let a = MatrixElement::zero(linf2(), 1);
        let b = MatrixElement::zero(offdiag(), 1);
        assert!(matches!(a.sub(&b), Err(Error::SystemMismatch { .. })));
        assert!(congruence(&M::identity(2), &a).is_err());
        let c = MatrixElement::from_coeffs(linf2(), 1, vec![creal(1.0)]);
        assert!(c.is_err());
    }

    #[test]
    fn random_elements_are_unit_self_adjoint() {
        let mut rng = XorShiftRng::new(7);
        for n in 1..=3 {
            let x = MatrixElement::random_self_adjoint(linf2(), n, &mut rng);
            assert!(x.is_self_adjoint());
            assert!((x.norm() - 1.0).abs() < 1e-10);
        }
    }
}
