use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;
use crate::opsys::element::same_system;
use crate::opsys::json::{complex_from_json, complex_to_json};
use crate::opsys::{MatrixElement, OperatorSystem};
use crate::rng::XorShiftRng;
use crate::scalar::{cx, czero, Cx, Real};

/// `f ∈ M_m(S*)` stored as `values[(k·m + l)·K + s] = f_kl(b_s)` on the
/// orthonormal system basis `b_s` (`K = dim S`).
#[derive(Clone, Debug)]
pub struct MatrixFunctional<T: Real> {
    system: Arc<OperatorSystem<T>>,
    level: usize,
    values: Vec<Cx<T>>,
}

impl<T: Real> MatrixFunctional<T> {
    pub fn new(system: Arc<OperatorSystem<T>>, level: usize, values: Vec<Cx<T>>) -> Result<Self> {
        let want = level * level * system.dim();
        if level == 0 || values.len() != want {
            return Err(Error::shape("functional values", want, values.len()));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("functional has non-finite values".into()));
        }
        Ok(Self { system, level, values })
    }

    /// A scalar functional from its values on the basis.
    pub fn scalar(system: Arc<OperatorSystem<T>>, values: &[T]) -> Result<Self> {
        Self::new(system, 1, values.iter().map(|v| cx(*v, T::zero())).collect())
    }

    /// Restriction to `S` of a linear map `M_d → M_m`.
    pub fn from_map(
        system: Arc<OperatorSystem<T>>,
        level: usize,
        map: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
    ) -> Result<Self> {
        let k = system.dim();
        let mut values = vec![czero(); level * level * k];
        for (s, b) in system.basis().iter().enumerate() {
            let img = map(b);
            if img.rows() != level || img.cols() != level {
                return Err(Error::shape(
                    "map image",
                    format!("{level}x{level}"),
                    format!("{}x{}", img.rows(), img.cols()),
                ));
            }
            for kk in 0..level {
                for l in 0..level {
                    values[(kk * level + l) * k + s] = img[(kk, l)];
                }
            }
        }
        Self::new(system, level, values)
    }

    /// Restriction of the map with Choi matrix `C = Σ E_ij ⊗ Θ(E_ij)`.
    pub fn from_choi(system: Arc<OperatorSystem<T>>, level: usize, choi: &ComplexMatrix<T>) -> Result<Self> {
        let d = system.ambient_dim();
        if choi.rows() != d * level || choi.cols() != d * level {
            return Err(Error::shape("Choi matrix", d * level, choi.rows()));
        }
        Self::from_map(system, level, |a| apply_choi(choi, d, level, a))
    }

    pub fn zero(system: Arc<OperatorSystem<T>>, level: usize) -> Self {
        let n = level * level * system.dim();
        Self::new(system, level, vec![czero(); n]).expect("zero functional shape")
    }

    /// `a ↦ Tr(a)`.
    pub fn trace(system: Arc<OperatorSystem<T>>) -> Self {
        Self::from_map(system, 1, |a| ComplexMatrix::from_fn(1, 1, |_, _| a.trace())).expect("trace shape")
    }

    /// Seeded self-adjoint functional: random real values on the Hermitian
    /// frame, Hermitian `m × m` pattern.
    pub fn random_self_adjoint(system: Arc<OperatorSystem<T>>, level: usize, rng: &mut XorShiftRng) -> Self {
        let frame = system.frame().to_vec();
        // f(F_t) = H_t, Hermitian m × m.
        let images: Vec<ComplexMatrix<T>> = frame
            .iter()
            .map(|_| {
                let a = ComplexMatrix::from_fn(level, level, |i, j| {
                    if i == j {
                        cx(rng.real(), T::zero())
                    } else {
                        rng.complex()
                    }
                });
                a.hermitian_part()
            })
            .collect();
        Self::from_frame_images(system, level, &images)
    }

    /// Functional determined by its values on the Hermitian frame.
    pub fn from_frame_images(system: Arc<OperatorSystem<T>>, level: usize, images: &[ComplexMatrix<T>]) -> Self {
        let frame = system.frame().to_vec();
        Self::from_map(system, level, |a| {
            let mut out = ComplexMatrix::zeros(level, level);
            // a = Σ_t ⟨F_t, a⟩ F_t over ℂ.
            for (f, img) in frame.iter().zip(images) {
                out.axpy(f.inner(a), img);
            }
            out
        })
        .expect("frame image shape")
    }

    pub fn system(&self) -> &Arc<OperatorSystem<T>> {
        &self.system
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[Cx<T>] {
        &self.values
    }

    #[inline]
    pub fn value(&self, k: usize, l: usize, s: usize) -> Cx<T> {
        self.values[(k * self.level + l) * self.system.dim() + s]
    }

    /// `[f_kl(a)]` for `a ∈ S` (the orthogonal projection of `a` otherwise).
    pub fn eval(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.eval_coeffs(&self.system.coeffs_of(a))
    }

    pub fn eval_coeffs(&self, c: &[Cx<T>]) -> ComplexMatrix<T> {
        let m = self.level;
        let k = self.system.dim();
        ComplexMatrix::from_fn(m, m, |kk, l| {
            let row = &self.values[(kk * m + l) * k..(kk * m + l + 1) * k];
            row.iter().zip(c).fold(czero(), |acc, (f, x)| acc + *f * *x)
        })
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self {
            system: self.system.clone(),
            level: self.level,
            values: self.values.iter().map(|v| *v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_system(&self.system, &other.system)?;
        if self.level != other.level {
            return Err(Error::shape("functional level", self.level, other.level));
        }
        Ok(Self {
            system: self.system.clone(),
            level: self.level,
            values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect(),
        })
    }

    /// `(f*)_kl(a) = conj(f_lk(a†))`.
    pub fn adjoint(&self) -> Self {
        let sys = self.system.clone();
        let me = self.clone();
        let m = self.level;
        Self::from_map(sys, m, move |a| me.eval(&a.adjoint()).adjoint()).expect("adjoint shape")
    }

    /// Largest deviation of `f(F_t)` from Hermitian over the Hermitian frame.
    pub fn self_adjoint_defect(&self) -> T {
        self.system
            .frame()
            .iter()
            .map(|f| self.eval(f).hermitian_defect())
            .fold(T::zero(), T::max)
    }

    pub fn is_self_adjoint(&self, tol: T) -> bool {
        self.self_adjoint_defect() <= tol * (T::one() + self.max_abs())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Short stable digest of the values at 9 significant digits.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let text = format!(
            "{}|{}|{}",
            self.system.label(),
            self.level,
            self.values
                .iter()
                .map(|z| format!("{:.8e},{:.8e}", z.re.as_f64(), z.im.as_f64()))
                .collect::<Vec<_>>()
                .join(";")
        );
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn to_json(&self) -> Value {
        let k = self.system.dim();
        let m = self.level;
        let values: Vec<Value> = (0..m)
            .map(|kk| {
                Value::Array(
                    (0..m)
                        .map(|l| Value::Array((0..k).map(|s| complex_to_json(self.value(kk, l, s))).collect()))
                        .collect(),
                )
            })
            .collect();
        json!({"system": self.system.label(), "level": m, "values": values})
    }

    pub fn from_json(system: Arc<OperatorSystem<T>>, v: &Value) -> Result<Self> {
        use crate::opsys::json::err;
        let label = v
            .get("system")
            .and_then(Value::as_str)
            .ok_or_else(|| err("system", "expected a string"))?;
        if label != system.label() {
            return Err(Error::SystemMismatch {
                left: label.to_string(),
                right: system.label().to_string(),
            });
        }
        let m = v
            .get("level")
            .and_then(Value::as_u64)
            .filter(|m| *m > 0)
            .ok_or_else(|| err("level", "expected a positive integer"))? as usize;
        let k = system.dim();
        let rows = v
            .get("values")
            .and_then(Value::as_array)
            .ok_or_else(|| err("values", "expected a list"))?;
        if rows.len() != m {
            return Err(err("values", format!("expected {m} rows, found {}", rows.len())));
        }
        let mut values = vec![czero(); m * m * k];
        for (kk, row) in rows.iter().enumerate() {
            let rp = format!("values[{kk}]");
            let row = row.as_array().ok_or_else(|| err(&rp, "expected a list"))?;
            if row.len() != m {
                return Err(err(&rp, format!("expected {m} entries, found {}", row.len())));
            }
            for (l, cell) in row.iter().enumerate() {
                let cp = format!("{rp}[{l}]");
                let cell = cell.as_array().ok_or_else(|| err(&cp, "expected a list"))?;
                if cell.len() != k {
                    return Err(err(&cp, format!("expected {k} basis values, found {}", cell.len())));
                }
                for (s, z) in cell.iter().enumerate() {
                    values[(kk * m + l) * k + s] = complex_from_json(z, &format!("{cp}[{s}]"))?;
                }
            }
        }
        Self::new(system, m, values)
    }
}

/// `Θ(a) = Σ_ij a_ij Θ(E_ij)` read from `C = Σ E_ij ⊗ Θ(E_ij)` (`d·m` square).
pub fn apply_choi<T: Real>(choi: &ComplexMatrix<T>, d: usize, m: usize, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(m, m, |k, l| {
        let mut acc = czero();
        for i in 0..d {
            for j in 0..d {
                let aij = a[(i, j)];
                if aij != czero() {
                    acc += aij * choi[(i * m + k, j * m + l)];
                }
            }
        }
        acc
    })
}

/// `G = bᵀ ⊗ E_lk`, so that `Tr(G C) = Θ(b)_kl` for the Choi matrix `C`.
pub fn readout_matrix<T: Real>(b: &ComplexMatrix<T>, m: usize, k: usize, l: usize) -> ComplexMatrix<T> {
    b.transpose().kron(&ComplexMatrix::unit(m, l, k))
}

/// `θ_f^{(n)}(x)`: `nm × nm` with block `(i, j)` equal to `[f_kl(x_ij)]`.
pub fn theta_apply<T: Real>(f: &MatrixFunctional<T>, x: &MatrixElement<T>) -> Result<ComplexMatrix<T>> {
    same_system(f.system(), x.system())?;
    let n = x.level();
    let m = f.level();
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            out.set_block(i, j, &f.eval_coeffs(x.block_coeffs(i, j)));
        }
    }
    Ok(out)
}

/// `W` (`nd × nd`) with `Tr(θ_f^{(n)}(x) Y) = Tr(W x)` for all `x ∈ M_n(S)`,
/// where `Y` is `nm × nm`.
pub fn theta_dual<T: Real>(f: &MatrixFunctional<T>, y: &ComplexMatrix<T>, n: usize) -> ComplexMatrix<T> {
    let sys = f.system();
    let d = sys.ambient_dim();
    let k = sys.dim();
    let m = f.level();
    let mut w = ComplexMatrix::zeros(n * d, n * d);
    let adj: Vec<ComplexMatrix<T>> = sys.basis().iter().map(|b| b.adjoint()).collect();
    for i in 0..n {
        for j in 0..n {
            // Block (j, i) pairs with x_ij.
            let mut blk = ComplexMatrix::zeros(d, d);
            for s in 0..k {
                let mut c = czero();
                for kk in 0..m {
                    for l in 0..m {
                        c += f.value(kk, l, s) * y[(j * m + l, i * m + kk)];
                    }
                }
                if c != czero() {
                    blk.axpy(c, &adj[s]);
                }
            }
            w.set_block(j, i, &blk);
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::creal;

    type M = ComplexMatrix<f64>;

    fn linf2() -> Arc<OperatorSystem<f64>> {
        Arc::new(OperatorSystem::new(&[M::unit(2, 0, 0), M::unit(2, 1, 1)], true, "linf2").unwrap())
    }

    fn m2() -> Arc<OperatorSystem<f64>> {
        Arc::new(
            OperatorSystem::new(
                &[M::unit(2, 0, 0), M::unit(2, 0, 1), M::unit(2, 1, 0), M::unit(2, 1, 1)],
                true,
                "m2",
            )
            .unwrap(),
        )
    }

    #[test]
    fn theta_examples() {
        let s = linf2();
        let f = MatrixFunctional::scalar(s.clone(), &[1.0, 0.0]).unwrap();
        let x = MatrixElement::from_concrete(s.clone(), &M::diag_real(&[3.0, 5.0])).unwrap();
        assert!((theta_apply(&f, &x).unwrap()[(0, 0)] - creal(3.0)).norm() < 1e-14);

        let tr = MatrixFunctional::trace(m2());
        let id = MatrixElement::unit(m2(), 1).unwrap();
        assert!((theta_apply(&tr, &id).unwrap()[(0, 0)] - creal(2.0)).norm() < 1e-14);

        let g = MatrixFunctional::scalar(s.clone(), &[1.0, -1.0]).unwrap();
        let x2 =
            MatrixElement::from_concrete(s, &M::diag_real(&[1.0, 0.0]).direct_sum(&M::diag_real(&[0.0, 1.0]))).unwrap();
        let t = theta_apply(&g, &x2).unwrap();
        assert!(t.sub(&M::diag_real(&[1.0, -1.0])).max_abs() < 1e-14);
    }

    #[test]
    fn dual_pairing_identity() {
        let s = m2();
        let mut rng = XorShiftRng::new(1);
        let f = MatrixFunctional::random_self_adjoint(s.clone(), 2, &mut rng);
        let x = MatrixElement::random_self_adjoint(s, 2, &mut rng);
        let y = M::from_fn(4, 4, |_, _| rng.complex());
        let lhs = theta_apply(&f, &x).unwrap().matmul(&y).trace();
        let rhs = theta_dual(&f, &y, 2).matmul(x.concrete()).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn choi_readout_and_self_adjointness() {
        let s = m2();
        // Transpose map: Choi = SWAP.
        let swap = M::from_fn(4, 4, |r, c| {
            let (i, k) = (r / 2, r % 2);
            let (j, l) = (c / 2, c % 2);
            if i == l && k == j {
                creal(1.0)
            } else {
                czero()
            }
        });
        let f = MatrixFunctional::from_choi(s.clone(), 2, &swap).unwrap();
        let a = M::from_fn(2, 2, |i, j| cx((i + 2 * j) as f64, i as f64 - j as f64));
        assert!(f.eval(&a).sub(&a.transpose()).max_abs() < 1e-13);
        let g = readout_matrix(&s.basis()[1], 2, 0, 1);
        assert!((g.matmul(&swap).trace() - f.value(0, 1, 1)).norm() < 1e-14);
        assert!(f.is_self_adjoint(1e-12));
        let h = MatrixFunctional::new(s, 1, vec![cx(0.0, 1.0), czero(), czero(), czero()]).unwrap();
        assert!(!h.is_self_adjoint(1e-12));
        assert!(h.adjoint().add(&h).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = XorShiftRng::new(4);
        let f = MatrixFunctional::random_self_adjoint(m2(), 2, &mut rng);
        let g = MatrixFunctional::from_json(m2(), &f.to_json()).unwrap();
        assert_eq!(f.values(), g.values());
        assert_eq!(f.digest(), g.digest());
    }
}
