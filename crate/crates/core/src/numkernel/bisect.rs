//! Bisection for the threshold of a monotone feasibility predicate.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default bisection tolerance.
pub const DEFAULT_BISECT_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Infeasible below the threshold, feasible above.
    FeasibleAbove,
    /// Feasible below the threshold, infeasible above.
    FeasibleBelow,
}

#[derive(Clone, Copy, Debug)]
pub struct Bisection<T: Real> {
    /// Feasible endpoint of the final bracket.
    pub value: T,
    pub lo: T,
    pub hi: T,
    /// Predicate calls made inside the bracket (excludes the two endpoint checks).
    pub interior_calls: usize,
}

/// Locates the threshold of `feasible_at` on `[lo, hi]` to within `tol`.
///
/// Both endpoints are evaluated first; a bracket that does not straddle the
/// threshold is rejected with both evaluations reported. Exactly
/// `⌈log2((hi − lo)/tol)⌉` further calls are made.
pub fn bisect_optimal<T: Real, F>(mut feasible_at: F, lo: T, hi: T, tol: T, dir: Direction) -> Result<Bisection<T>>
where
    F: FnMut(T) -> Result<bool>,
{
    if !(tol > T::zero()) || !(hi > lo) {
        return Err(Error::Invalid(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let flo = feasible_at(lo)?;
    let fhi = feasible_at(hi)?;
    let ok = match dir {
        Direction::FeasibleAbove => !flo && fhi,
        Direction::FeasibleBelow => flo && !fhi,
    };
    if !ok {
        return Err(Error::BracketNotStraddling {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            lo_value: flo,
            hi_value: fhi,
        });
    }
    let steps = ((hi - lo) / tol).log2().ceil().max(T::zero()).to_usize().unwrap_or(0);
    let (mut a, mut b) = (lo, hi);
    let half = T::lit(0.5);
    for _ in 0..steps {
        let mid = (a + b) * half;
        let f = feasible_at(mid)?;
        match (dir, f) {
            (Direction::FeasibleAbove, true) | (Direction::FeasibleBelow, false) => b = mid,
            _ => a = mid,
        }
    }
    let value = match dir {
        Direction::FeasibleAbove => b,
        Direction::FeasibleBelow => a,
    };
    Ok(Bisection {
        value,
        lo: a,
        hi: b,
        interior_calls: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        let r = bisect_optimal(|t: f64| Ok(t >= 2.0), 0.0, 4.0, 1e-6, Direction::FeasibleAbove).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-6);
        assert_eq!(r.interior_calls, (4.0f64 / 1e-6).log2().ceil() as usize);
        let r = bisect_optimal(|t: f64| Ok(t >= 0.0), -1.0, 1.0, 1e-5, Direction::FeasibleAbove).unwrap();
        assert!(r.value.abs() <= 1e-5);
        let r = bisect_optimal(|t: f64| Ok(t <= 0.25), 0.0, 1.0, 1e-6, Direction::FeasibleBelow).unwrap();
        assert!((r.value - 0.25).abs() <= 1e-6);
    }

    #[test]
    fn rejects_non_straddling() {
        let e = bisect_optimal(|t: f64| Ok(t >= 5.0), 0.0, 4.0, 1e-3, Direction::FeasibleAbove).unwrap_err();
        assert_eq!(
            e,
            Error::BracketNotStraddling {
                lo: 0.0,
                hi: 4.0,
                lo_value: false,
                hi_value: false
            }
        );
    }
}
