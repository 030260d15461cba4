//! Linear maps `φ: S → T` between operator systems and the dual map
//! `φ*: M_m(T*) → M_m(S*)`, `(φ*g)_kl = g_kl ∘ φ`.
//!
//! For a CP complete contraction `φ` the pullback does not increase the
//! positive-part norm: `φ^{(n)}` maps positive contractions of `M_n(S)` to
//! positive contractions of `M_n(T)`, and `θ_{φ*g}^{(n)} = θ_g^{(n)} ∘ φ^{(n)}`.

use serde::Serialize;
use std::sync::Arc;

use super::cbnorm::dual_norm;
use super::cp::{is_cp, CpReport, CpSettings};
use super::dnorm::{d_norm, d_norm_with_starts, DNormSettings};
use super::functional::MatrixFunctional;
use super::report::NormReport;
use crate::error::{Error, Result};
use crate::numkernel::ComplexMatrix;
use crate::opsys::{cone_membership, MatrixElement, OperatorSystem};
use crate::rng::XorShiftRng;
use crate::scalar::{czero, Cx, Real};

/// `φ` given by its images `φ(b_s) ∈ T` of the source basis.
#[derive(Clone, Debug)]
pub struct LinearMap<T: Real> {
    source: Arc<OperatorSystem<T>>,
    target: Arc<OperatorSystem<T>>,
    images: Vec<ComplexMatrix<T>>,
    /// Target-basis coefficients of each image.
    image_coeffs: Vec<Vec<Cx<T>>>,
}

impl<T: Real> LinearMap<T> {
    pub fn new(
        source: Arc<OperatorSystem<T>>,
        target: Arc<OperatorSystem<T>>,
        images: Vec<ComplexMatrix<T>>,
    ) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::shape("map images", source.dim(), images.len()));
        }
        let dt = target.ambient_dim();
        let mut image_coeffs = Vec::with_capacity(images.len());
        for (s, img) in images.iter().enumerate() {
            if img.rows() != dt || img.cols() != dt {
                return Err(Error::shape(
                    "map image",
                    format!("{dt}x{dt}"),
                    format!("{}x{}", img.rows(), img.cols()),
                ));
            }
            let dist = target.distance(img);
            if dist > T::lit(1e-8) * (T::one() + img.frobenius_norm()) {
                return Err(Error::Invalid(format!(
                    "image of basis element {s} is at distance {:.3e} from the target system",
                    dist.as_f64()
                )));
            }
            image_coeffs.push(target.coeffs_of(img));
        }
        let map = Self {
            source,
            target,
            images,
            image_coeffs,
        };
        let defect = map.adjoint_defect();
        if defect > T::lit(1e-8) {
            return Err(Error::NotAdjointPreserving {
                defect: defect.as_f64(),
            });
        }
        Ok(map)
    }

    /// Restriction to `S` of a map on `M_{d_S}` (images must land in `T`).
    pub fn from_fn(
        source: Arc<OperatorSystem<T>>,
        target: Arc<OperatorSystem<T>>,
        f: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
    ) -> Result<Self> {
        let images = source.basis().iter().map(f).collect();
        Self::new(source, target, images)
    }

    pub fn source(&self) -> &Arc<OperatorSystem<T>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<OperatorSystem<T>> {
        &self.target
    }

    pub fn images(&self) -> &[ComplexMatrix<T>] {
        &self.images
    }

    /// `φ(a)` for `a ∈ S`.
    pub fn apply(&self, a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let c = self.source.coeffs_of(a);
        let dt = self.target.ambient_dim();
        let mut out = ComplexMatrix::zeros(dt, dt);
        for (cs, img) in c.iter().zip(&self.images) {
            out.axpy(*cs, img);
        }
        out
    }

    /// `max_s ‖φ(b_s†) − φ(b_s)†‖_F`.
    pub fn adjoint_defect(&self) -> T {
        self.source
            .basis()
            .iter()
            .zip(&self.images)
            .map(|(b, img)| self.apply(&b.adjoint()).sub(&img.adjoint()).frobenius_norm())
            .fold(T::zero(), T::max)
    }

    /// `φ^{(n)}(x)` blockwise.
    pub fn amplify(&self, x: &MatrixElement<T>) -> Result<MatrixElement<T>> {
        if !Arc::ptr_eq(x.system(), &self.source) && **x.system() != *self.source {
            return Err(Error::SystemMismatch {
                left: x.system().label().to_string(),
                right: self.source.label().to_string(),
            });
        }
        let n = x.level();
        let kt = self.target.dim();
        let mut coeffs = vec![czero::<T>(); n * n * kt];
        for i in 0..n {
            for j in 0..n {
                let out = &mut coeffs[(i * n + j) * kt..(i * n + j + 1) * kt];
                for (cs, img) in x.block_coeffs(i, j).iter().zip(&self.image_coeffs) {
                    for (o, c) in out.iter_mut().zip(img) {
                        *o += *cs * *c;
                    }
                }
            }
        }
        MatrixElement::from_coeffs(self.target.clone(), n, coeffs)
    }

    /// `f ∈ M_{d_T}(S*)` with `θ_f = φ` (as a map into `M_{d_T}`).
    pub fn as_functional(&self) -> MatrixFunctional<T> {
        let m = self.target.ambient_dim();
        let k = self.source.dim();
        let mut values = vec![czero(); m * m * k];
        for (s, img) in self.images.iter().enumerate() {
            for a in 0..m {
                for b in 0..m {
                    values[(a * m + b) * k + s] = img[(a, b)];
                }
            }
        }
        MatrixFunctional::new(self.source.clone(), m, values).expect("image shape")
    }

    /// `φ*g ∈ M_m(S*)`.
    pub fn pullback(&self, g: &MatrixFunctional<T>) -> Result<MatrixFunctional<T>> {
        if **g.system() != *self.target {
            return Err(Error::SystemMismatch {
                left: g.system().label().to_string(),
                right: self.target.label().to_string(),
            });
        }
        let m = g.level();
        let k = self.source.dim();
        let mut values = vec![czero(); m * m * k];
        for (s, img) in self.images.iter().enumerate() {
            let v = g.eval(img);
            for a in 0..m {
                for b in 0..m {
                    values[(a * m + b) * k + s] = v[(a, b)];
                }
            }
        }
        MatrixFunctional::new(self.source.clone(), m, values)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualMapSample {
    pub index: usize,
    pub level: usize,
    /// `‖g‖^d`.
    pub g_d_norm: f64,
    /// `‖φ*g‖^d`.
    pub pullback_d_norm: f64,
    /// `‖φ*g‖^d / ‖g‖^d` (0 when both vanish).
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct DualMapReport<T: Real> {
    pub cp: CpReport<T>,
    pub cb_norm: NormReport<T>,
    pub completely_contractive: bool,
    /// CP and completely contractive: the contraction claim applies.
    pub asserted: bool,
    pub samples: Vec<DualMapSample>,
    pub max_ratio: f64,
    /// `max_ratio ≤ 1 + tol` when asserted, `None` otherwise.
    pub holds: Option<bool>,
}

#[derive(Clone, Copy, Debug)]
pub struct DualMapSettings {
    pub samples: usize,
    pub dnorm: DNormSettings,
}

impl Default for DualMapSettings {
    fn default() -> Self {
        Self {
            samples: 32,
            dnorm: DNormSettings::default(),
        }
    }
}

/// CP and complete-contractivity checks for `φ`, then the sampled
/// comparison `‖φ*g‖^d ≤ (1 + tol)·‖g‖^d` over seeded self-adjoint
/// `g ∈ M_m(T*)`, `m ∈ {1, 2}` alternating.
pub fn dual_map<T: Real>(phi: &LinearMap<T>, settings: DualMapSettings) -> Result<DualMapReport<T>> {
    let tol = T::lit(settings.dnorm.tol);
    let f = phi.as_functional();
    let cp = is_cp(
        &f,
        CpSettings {
            tol: settings.dnorm.tol,
            restarts: settings.dnorm.restarts,
            seed: settings.dnorm.seed,
            ..CpSettings::default()
        },
    )?;
    let cb_norm = dual_norm(&f, tol);
    let completely_contractive = cb_norm.value <= T::one() + T::lit(10.0) * tol;
    let asserted = cp.is_member() && completely_contractive;
    let mut rng = XorShiftRng::fork(settings.dnorm.seed, 0xD0A1);
    let mut samples = Vec::with_capacity(settings.samples);
    let mut max_ratio = 0.0f64;
    for index in 0..settings.samples {
        let level = 1 + index % 2;
        let g = MatrixFunctional::random_self_adjoint(phi.target().clone(), level, &mut rng);
        let pulled = phi.pullback(&g)?;
        let p = d_norm(&pulled, settings.dnorm);
        // The pushed-forward optimizer is a valid start only if it stays a
        // positive contraction.
        let mut starts = Vec::new();
        if let Some(w) = &p.witness {
            let y = phi.amplify(&w.x)?;
            if cone_membership(&y, T::floor_tol(1e-9)).member && y.norm() <= T::one() + T::floor_tol(1e-9) {
                starts.push(y);
            }
        }
        let q = d_norm_with_starts(&g, settings.dnorm, &starts);
        let (gv, pv) = (q.value.as_f64(), p.value.as_f64());
        let ratio = if gv > 0.0 {
            pv / gv
        } else if pv > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_ratio = max_ratio.max(ratio);
        samples.push(DualMapSample {
            index,
            level,
            g_d_norm: gv,
            pullback_d_norm: pv,
            ratio,
        });
    }
    Ok(DualMapReport {
        holds: asserted.then(|| max_ratio <= 1.0 + settings.dnorm.tol.max(1e-9)),
        cp,
        cb_norm,
        completely_contractive,
        asserted,
        samples,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_full, build_linfty};
    use crate::dualspace::CpStatus;

    fn quick() -> DualMapSettings {
        DualMapSettings {
            samples: 6,
            dnorm: DNormSettings {
                level_max: 2,
                restarts: 4,
                ..Default::default()
            },
        }
    }

    #[test]
    fn identity_on_linfty() {
        let s = build_linfty(2).unwrap();
        let phi = LinearMap::from_fn(s.clone(), s, |a| a.clone()).unwrap();
        let r = dual_map(&phi, quick()).unwrap();
        assert!(r.asserted);
        assert_eq!(r.holds, Some(true));
        assert!(r.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn diagonal_compression() {
        let phi = LinearMap::from_fn(build_full(2).unwrap(), build_linfty(2).unwrap(), |a| {
            ComplexMatrix::from_fn(2, 2, |i, j| if i == j { a[(i, i)] } else { czero() })
        })
        .unwrap();
        let r = dual_map(&phi, quick()).unwrap();
        assert!(r.asserted, "cp {:?} cb {}", r.cp.status, r.cb_norm.value);
        assert_eq!(r.holds, Some(true), "{}", r.max_ratio);
    }

    #[test]
    fn transpose_is_not_asserted() {
        let s = build_full(2).unwrap();
        let phi = LinearMap::from_fn(s.clone(), s, |a| a.transpose()).unwrap();
        let r = dual_map(&phi, quick()).unwrap();
        assert_eq!(r.cp.status, CpStatus::NonMember);
        assert!(!r.asserted);
        assert_eq!(r.holds, None);
    }

    #[test]
    fn rejects_non_adjoint_preserving() {
        let s = build_linfty(2).unwrap();
        let r = LinearMap::from_fn(s.clone(), s, |a| a.scale(Cx::new(0.0, 1.0)));
        assert!(matches!(r, Err(Error::NotAdjointPreserving { .. })));
    }
}
