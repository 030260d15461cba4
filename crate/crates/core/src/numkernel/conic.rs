//! Linear objectives over a cone intersected with an affine set, solved by
//! over-relaxed ADMM (Douglas–Rachford splitting between the two projections).
//!
//! `minimize c·v  subject to  v ∈ A (affine),  v ∈ K (cone)`

use super::affine::AffineSet;
use super::cone::{ConeProjector, ConeSpec};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct ConicProgram<T: Real> {
    pub cone: ConeSpec<T>,
    pub affine: AffineSet<T>,
    pub objective: Vec<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct AdmmSettings {
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub rho: f64,
    pub alpha: f64,
}

impl Default for AdmmSettings {
    fn default() -> Self {
        Self {
            eps_abs: 1e-10,
            eps_rel: 1e-9,
            max_iter: 20_000,
            rho: 1.0,
            alpha: 1.6,
        }
    }
}

/// Iterate carried between related solves.
#[derive(Clone, Debug)]
pub struct AdmmState<T: Real> {
    pub z: Vec<T>,
    pub u: Vec<T>,
    pub rho: T,
}

#[derive(Clone, Debug)]
pub struct ConicSolution<T: Real> {
    /// Affine-side iterate.
    pub x: Vec<T>,
    /// Cone-side iterate.
    pub z: Vec<T>,
    /// `c · x`.
    pub objective: T,
    /// `‖x − z‖`.
    pub primal_residual: T,
    pub dual_residual: T,
    pub iterations: usize,
    pub converged: bool,
    pub state: AdmmState<T>,
}

fn norm<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// A program whose cone projector (and eigenvector cache) persists across
/// solves with different objectives.
#[derive(Clone, Debug)]
pub struct ConicSolver<T: Real> {
    pub cone: ConeProjector<T>,
    pub affine: AffineSet<T>,
    pub settings: AdmmSettings,
}

impl<T: Real> ConicSolver<T> {
    pub fn new(cone: ConeSpec<T>, affine: AffineSet<T>) -> Self {
        Self {
            cone: ConeProjector::new(cone),
            affine,
            settings: AdmmSettings::default(),
        }
    }

    pub fn with_settings(mut self, s: AdmmSettings) -> Self {
        self.settings = s;
        self
    }

    pub fn dim(&self) -> usize {
        self.affine.dim()
    }

    pub fn minimize(&mut self, c: &[T], warm: Option<&AdmmState<T>>) -> ConicSolution<T> {
        let n = self.dim();
        assert_eq!(c.len(), n, "objective length");
        let s = self.settings;
        let alpha = T::lit(s.alpha);
        let eps_abs = T::floor_tol(s.eps_abs);
        let eps_rel = T::floor_tol(s.eps_rel);
        let sqrt_n = T::lit((n as f64).sqrt());
        let (mut z, mut u, mut rho) = match warm {
            Some(w) if w.z.len() == n => (w.z.clone(), w.u.clone(), w.rho),
            _ => (vec![T::zero(); n], vec![T::zero(); n], T::lit(s.rho)),
        };
        let mut x = vec![T::zero(); n];
        let mut xh = vec![T::zero(); n];
        let mut znew = vec![T::zero(); n];
        let mut rp = T::infinity();
        let mut rd = T::infinity();
        let mut converged = false;
        let mut it = 0;
        while it < s.max_iter {
            it += 1;
            for i in 0..n {
                x[i] = z[i] - u[i] - c[i] / rho;
            }
            self.affine.project(&mut x);
            for i in 0..n {
                xh[i] = alpha * x[i] + (T::one() - alpha) * z[i];
                znew[i] = xh[i] + u[i];
            }
            self.cone.project(&mut znew);
            let mut dz = T::zero();
            let mut pr = T::zero();
            for i in 0..n {
                u[i] += xh[i] - znew[i];
                let d = znew[i] - z[i];
                dz += d * d;
                let e = x[i] - znew[i];
                pr += e * e;
            }
            std::mem::swap(&mut z, &mut znew);
            rp = pr.sqrt();
            rd = rho * dz.sqrt();
            let scale_p = norm(&x).max(norm(&z));
            let scale_d = rho * norm(&u);
            let tol_p = eps_abs * sqrt_n + eps_rel * scale_p;
            let tol_d = eps_abs * sqrt_n + eps_rel * scale_d.max(norm(c));
            if rp <= tol_p && rd <= tol_d {
                converged = true;
                break;
            }
            if it % 25 == 0 {
                let np = rp / tol_p;
                let nd = rd / tol_d;
                let ten = T::lit(10.0);
                if np > ten * nd && rho < T::lit(1e8) {
                    rho *= T::lit(2.0);
                    for v in u.iter_mut() {
                        *v /= T::lit(2.0);
                    }
                } else if nd > ten * np && rho > T::lit(1e-8) {
                    rho /= T::lit(2.0);
                    for v in u.iter_mut() {
                        *v *= T::lit(2.0);
                    }
                }
            }
        }
        let objective = c.iter().zip(&x).fold(T::zero(), |acc, (a, b)| acc + *a * *b);
        ConicSolution {
            x,
            z: z.clone(),
            objective,
            primal_residual: rp,
            dual_residual: rd,
            iterations: it,
            converged,
            state: AdmmState { z, u, rho },
        }
    }
}

impl<T: Real> ConicProgram<T> {
    pub fn solve(self, settings: AdmmSettings) -> ConicSolution<T> {
        let c = self.objective.clone();
        ConicSolver::new(self.cone, self.affine)
            .with_settings(settings)
            .minimize(&c, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::cone::PsdBlock;
    use crate::numkernel::hvec::{functional, unhvec};
    use crate::numkernel::matrix::ComplexMatrix;
    use crate::scalar::cx;

    #[test]
    fn max_eigenvalue_as_sdp() {
        // max Tr(W X) s.t. X ⪰ 0, Tr X = 1  →  λ_max(W).
        let w = ComplexMatrix::<f64>::from_fn(3, 3, |i, j| {
            if i == j {
                cx([1.0, 2.0, -1.0][i], 0.0)
            } else if i < j {
                cx(0.5, 0.3)
            } else {
                cx(0.5, -0.3)
            }
        });
        let tr = functional(&ComplexMatrix::identity(3));
        let aff = AffineSet::from_constraints(9, &[tr], &[1.0]);
        let c: Vec<f64> = functional(&w).iter().map(|x| -x).collect();
        let prog = ConicProgram {
            cone: ConeSpec::psd(&[3]),
            affine: aff,
            objective: c,
        };
        let sol = prog.solve(AdmmSettings::default());
        assert!(sol.converged);
        let lmax = crate::numkernel::eig::eig_of(&w).unwrap().max();
        assert!((-sol.objective - lmax).abs() < 1e-7, "{} vs {}", -sol.objective, lmax);
        let x = unhvec(&sol.z, 3);
        assert!((x.trace().re - 1.0).abs() < 1e-7);
    }

    #[test]
    fn capped_box_linear_objective() {
        // max Tr(W X) over 0 ⪯ X ⪯ I equals the sum of positive eigenvalues.
        let w = ComplexMatrix::<f64>::diag_real(&[2.0, -1.0]);
        let spec = ConeSpec {
            blocks: vec![PsdBlock { dim: 2, cap: Some(1.0) }],
            nonneg: 0,
            free: 0,
        };
        let aff = AffineSet::from_constraints(4, &[], &[]);
        let c: Vec<f64> = functional(&w).iter().map(|x| -x).collect();
        let mut s = ConicSolver::new(spec, aff);
        let sol = s.minimize(&c, None);
        assert!((sol.objective + 2.0).abs() < 1e-8);
    }
}
