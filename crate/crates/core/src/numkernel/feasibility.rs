//! Conic feasibility: PSD blocks intersected with an affine subspace.

use serde::{Deserialize, Serialize};

use super::affine::AffineSet;
use super::cone::{ConeProjector, ConeSpec, PsdBlock};
use super::eig::HermitianMatrix;
use super::hvec::{hdim, unhvec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default feasibility tolerance.
pub const DEFAULT_FEAS_TOL: f64 = 1e-7;
/// Default iteration budget.
pub const DEFAULT_MAX_ITER: usize = 50_000;
/// Iterations over which a stalled gap is taken as infeasibility evidence.
pub const STALL_WINDOW: usize = 400;

/// `coeffs · v = rhs`, with `v` the concatenated hvec coordinates of the blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearConstraint<T: Real> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffinePSDProblem<T: Real> {
    pub blocks: Vec<usize>,
    /// Operator-norm cap per block (`None` for uncapped).
    pub caps: Vec<Option<T>>,
    pub constraints: Vec<LinearConstraint<T>>,
}

impl<T: Real> AffinePSDProblem<T> {
    pub fn new(blocks: Vec<usize>) -> Self {
        let caps = vec![None; blocks.len()];
        Self {
            blocks,
            caps,
            constraints: Vec::new(),
        }
    }

    pub fn with_caps(mut self, caps: Vec<Option<T>>) -> Self {
        self.caps = caps;
        self
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|&n| hdim(n)).sum()
    }

    pub fn offsets(&self) -> Vec<usize> {
        let mut o = vec![0];
        for &n in &self.blocks {
            o.push(o.last().unwrap() + hdim(n));
        }
        o
    }

    pub fn push(&mut self, coeffs: Vec<T>, rhs: T) {
        self.constraints.push(LinearConstraint { coeffs, rhs });
    }

    pub fn validate(&self) -> Result<()> {
        if self.caps.len() != self.blocks.len() {
            return Err(Error::shape("block caps", self.blocks.len(), self.caps.len()));
        }
        let d = self.total_dim();
        for (index, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != d {
                return Err(Error::ConstraintDimension {
                    index,
                    expected: d,
                    found: c.coeffs.len(),
                });
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invalid(format!("constraint {index} has non-finite data")));
            }
        }
        if let Some(c) = self.caps.iter().flatten().find(|c| !(**c >= T::zero())) {
            return Err(Error::Invalid(format!("negative block cap {c}")));
        }
        Ok(())
    }

    pub fn cone_spec(&self) -> ConeSpec<T> {
        ConeSpec {
            blocks: self
                .blocks
                .iter()
                .zip(&self.caps)
                .map(|(&dim, &cap)| PsdBlock { dim, cap })
                .collect(),
            nonneg: 0,
            free: 0,
        }
    }

    pub fn affine_set(&self) -> AffineSet<T> {
        let rows: Vec<Vec<T>> = self.constraints.iter().map(|c| c.coeffs.clone()).collect();
        let rhs: Vec<T> = self.constraints.iter().map(|c| c.rhs).collect();
        AffineSet::from_constraints(self.total_dim(), &rows, &rhs)
    }

    /// Largest absolute constraint violation at `v`.
    pub fn max_violation(&self, v: &[T]) -> T {
        self.constraints
            .iter()
            .map(|c| (c.coeffs.iter().zip(v).fold(T::zero(), |s, (a, x)| s + *a * *x) - c.rhs).abs())
            .fold(T::zero(), T::max)
    }

    pub fn split(&self, v: &[T]) -> Vec<HermitianMatrix<T>> {
        let off = self.offsets();
        self.blocks
            .iter()
            .enumerate()
            .map(|(k, &n)| HermitianMatrix::from_raw(unhvec(&v[off[k]..off[k + 1]], n)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityStatus {
    Feasible,
    InfeasibleEvidence,
    Undecided,
}

#[derive(Clone, Debug)]
pub struct FeasibilityResult<T: Real> {
    pub status: FeasibilityStatus,
    /// Block values (set when feasible).
    pub witness: Option<Vec<HermitianMatrix<T>>>,
    /// Max absolute constraint violation of the cone-side iterate.
    pub residual: T,
    /// Final distance between the cone-side and affine-side iterates.
    pub gap: T,
    pub iterations: usize,
    /// Final cone-side iterate in hvec coordinates.
    pub point: Vec<T>,
}

impl<T: Real> FeasibilityResult<T> {
    pub fn is_feasible(&self) -> bool {
        self.status == FeasibilityStatus::Feasible
    }
}

/// Dykstra-corrected alternating projections between the (capped) PSD product
/// cone and the affine subspace.
///
/// Declares `Feasible` once the cone iterate violates no constraint by more
/// than `tol`. Declares `InfeasibleEvidence` once the inter-set gap exceeds
/// `10·tol` and has shrunk by less than 0.1% over the last [`STALL_WINDOW`]
/// iterations. Otherwise returns `Undecided` after `max_iter` iterations.
pub fn solve_feasibility<T: Real>(p: &AffinePSDProblem<T>, tol: T, max_iter: usize) -> Result<FeasibilityResult<T>> {
    solve_feasibility_from(p, tol, max_iter, None)
}

pub fn solve_feasibility_from<T: Real>(
    p: &AffinePSDProblem<T>,
    tol: T,
    max_iter: usize,
    start: Option<&[T]>,
) -> Result<FeasibilityResult<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    p.validate()?;
    let dim = p.total_dim();
    let affine = p.affine_set();
    let mut cone = ConeProjector::new(p.cone_spec());

    let mut x: Vec<T> = match start {
        Some(s) if s.len() == dim => s.to_vec(),
        Some(s) => return Err(Error::shape("feasibility start", dim, s.len())),
        None => vec![T::zero(); dim],
    };
    let mut pa = vec![T::zero(); dim];
    let mut qc = vec![T::zero(); dim];
    let mut y = vec![T::zero(); dim];
    let mut gaps: Vec<T> = Vec::new();
    let stall = T::lit(1e-3);

    // Affine set empty: the gap can never close.
    if affine.inconsistency() > tol {
        let residual = p.max_violation(&x);
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::InfeasibleEvidence,
            witness: None,
            residual,
            gap: affine.inconsistency(),
            iterations: 0,
            point: x,
        });
    }

    for it in 1..=max_iter {
        for i in 0..dim {
            y[i] = x[i] + pa[i];
        }
        affine.project(&mut y);
        for i in 0..dim {
            pa[i] = x[i] + pa[i] - y[i];
            x[i] = y[i] + qc[i];
        }
        cone.project(&mut x);
        for i in 0..dim {
            qc[i] = y[i] + qc[i] - x[i];
        }
        let residual = p.max_violation(&x);
        if residual <= tol {
            let witness = p.split(&x);
            let gap = dist(&x, &y);
            return Ok(FeasibilityResult {
                status: FeasibilityStatus::Feasible,
                witness: Some(witness),
                residual,
                gap,
                iterations: it,
                point: x,
            });
        }
        let gap = dist(&x, &y);
        gaps.push(gap);
        if it > STALL_WINDOW {
            let old = gaps[it - 1 - STALL_WINDOW];
            if gap > tol * T::lit(10.0) && old - gap <= stall * gap {
                return Ok(FeasibilityResult {
                    status: FeasibilityStatus::InfeasibleEvidence,
                    witness: None,
                    residual,
                    gap,
                    iterations: it,
                    point: x,
                });
            }
        }
    }
    let residual = p.max_violation(&x);
    let gap = gaps.last().copied().unwrap_or(residual);
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Undecided,
        witness: None,
        residual,
        gap,
        iterations: max_iter,
        point: x,
    })
}

fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| (*x - *y) * (*x - *y)).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::eig::eig_hermitian;
    use crate::numkernel::hvec::functional;
    use crate::numkernel::matrix::ComplexMatrix;

    #[test]
    fn scalar_examples() {
        let mut p = AffinePSDProblem::<f64>::new(vec![1]);
        p.push(vec![1.0], 1.0);
        let r = solve_feasibility(&p, 1e-7, 1000).unwrap();
        assert!(r.is_feasible());
        assert!((r.witness.unwrap()[0][(0, 0)].re - 1.0).abs() < 1e-7);

        let mut q = AffinePSDProblem::<f64>::new(vec![1]);
        q.push(vec![1.0], -1.0);
        let r = solve_feasibility(&q, 1e-7, 5000).unwrap();
        assert_eq!(r.status, FeasibilityStatus::InfeasibleEvidence);
        assert!((r.gap - 1.0).abs() < 1e-6);
    }

    #[test]
    fn difference_of_capped_blocks() {
        // U − V = diag(1, −1), ‖U‖, ‖V‖ ≤ 1.
        let mut p = AffinePSDProblem::<f64>::new(vec![2, 2]).with_caps(vec![Some(1.0), Some(1.0)]);
        let target = ComplexMatrix::diag_real(&[1.0, -1.0]);
        for (i, j, im) in [(0, 0, false), (1, 1, false), (0, 1, false), (0, 1, true)] {
            let mut g = ComplexMatrix::<f64>::zeros(2, 2);
            let val = if im {
                g[(j, i)] = crate::scalar::cx(0.0, -1.0);
                target[(i, j)].im
            } else {
                g[(j, i)] = crate::scalar::cx(1.0, 0.0);
                target[(i, j)].re
            };
            let a = functional(&g);
            let mut coeffs = a.clone();
            coeffs.extend(a.iter().map(|x| -x));
            p.push(coeffs, val);
        }
        let r = solve_feasibility(&p, 1e-7, 50_000).unwrap();
        assert!(r.is_feasible(), "{:?}", r.status);
        let w = r.witness.unwrap();
        let diff = w[0].sub(&w[1]).sub(&target);
        assert!(diff.max_abs() < 1e-6);
        for b in &w {
            let e = eig_hermitian(b);
            assert!(e.min() >= -1e-7 && e.max() <= 1.0 + 1e-7);
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        let mut p = AffinePSDProblem::<f64>::new(vec![2]);
        p.push(vec![1.0, 0.0], 1.0);
        assert!(matches!(
            solve_feasibility(&p, 1e-7, 10),
            Err(Error::ConstraintDimension {
                index: 0,
                expected: 4,
                found: 2
            })
        ));
    }
}
