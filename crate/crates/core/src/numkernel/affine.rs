//! Orthogonal projection onto affine subspaces of `ℝ^D`.

use crate::scalar::Real;

#[derive(Clone, Debug)]
enum Form<T: Real> {
    /// `{v : Q v = r}` with orthonormal rows `Q`.
    Null { q: Vec<Vec<T>>, rhs: Vec<T> },
    /// `{offset + B c}` with orthonormal columns `B` (stored as rows).
    Range { basis: Vec<Vec<T>>, offset: Vec<T> },
}

#[derive(Clone, Debug)]
pub struct AffineSet<T: Real> {
    dim: usize,
    form: Form<T>,
    /// Worst violation among constraints dropped as linearly dependent.
    inconsistency: T,
}

#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

#[inline]
fn axpy<T: Real>(y: &mut [T], s: T, x: &[T]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += s * *b;
    }
}

fn orthonormalize<T: Real>(rows: &[Vec<T>], mut rhs: Option<&mut Vec<T>>) -> (Vec<Vec<T>>, Vec<T>, T) {
    let mut q: Vec<Vec<T>> = Vec::new();
    let mut qb: Vec<T> = Vec::new();
    let mut worst = T::zero();
    let drop_tol = T::floor_tol(1e-10);
    for (i, row) in rows.iter().enumerate() {
        let norm0 = dot(row, row).sqrt();
        let mut a = row.clone();
        let mut b = rhs.as_ref().map(|r| r[i]).unwrap_or_else(T::zero);
        for _ in 0..2 {
            for (qj, bj) in q.iter().zip(&qb) {
                let r = dot(qj, &a);
                axpy(&mut a, -r, qj);
                b -= r * *bj;
            }
        }
        let norm = dot(&a, &a).sqrt();
        if norm0 == T::zero() || norm <= drop_tol * norm0 {
            let scale = norm0.max(T::one());
            worst = worst.max(b.abs() / scale);
            continue;
        }
        for x in a.iter_mut() {
            *x /= norm;
        }
        q.push(a);
        qb.push(b / norm);
    }
    if let Some(r) = rhs.as_mut() {
        r.clear();
    }
    (q, qb, worst)
}

impl<T: Real> AffineSet<T> {
    /// `{v : a_i · v = b_i}`; dependent rows are dropped and their
    /// inconsistency recorded.
    pub fn from_constraints(dim: usize, rows: &[Vec<T>], rhs: &[T]) -> Self {
        let mut r = rhs.to_vec();
        let (q, qb, worst) = orthonormalize(rows, Some(&mut r));
        Self {
            dim,
            form: Form::Null { q, rhs: qb },
            inconsistency: worst,
        }
    }

    /// `offset + span(spanning)`.
    pub fn from_span(dim: usize, spanning: &[Vec<T>], offset: Vec<T>) -> Self {
        let (basis, _, _) = orthonormalize(spanning, None);
        Self {
            dim,
            form: Form::Range { basis, offset },
            inconsistency: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine set itself.
    pub fn affine_dim(&self) -> usize {
        match &self.form {
            Form::Null { q, .. } => self.dim - q.len(),
            Form::Range { basis, .. } => basis.len(),
        }
    }

    /// Positive when the constraints have no common solution.
    pub fn inconsistency(&self) -> T {
        self.inconsistency
    }

    pub fn project(&self, v: &mut [T]) {
        match &self.form {
            Form::Null { q, rhs } => {
                let coefs: Vec<T> = q.iter().zip(rhs).map(|(qi, bi)| dot(qi, v) - *bi).collect();
                for (qi, c) in q.iter().zip(coefs) {
                    axpy(v, -c, qi);
                }
            }
            Form::Range { basis, offset } => {
                for (x, o) in v.iter_mut().zip(offset) {
                    *x -= *o;
                }
                let coefs: Vec<T> = basis.iter().map(|b| dot(b, v)).collect();
                for x in v.iter_mut() {
                    *x = T::zero();
                }
                for (b, c) in basis.iter().zip(coefs) {
                    axpy(v, c, b);
                }
                for (x, o) in v.iter_mut().zip(offset) {
                    *x += *o;
                }
            }
        }
    }

    pub fn distance(&self, v: &[T]) -> T {
        let mut p = v.to_vec();
        self.project(&mut p);
        p.iter().zip(v).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_onto_line() {
        // x + y = 2 in ℝ²
        let s = AffineSet::from_constraints(2, &[vec![1.0, 1.0]], &[2.0]);
        let mut v = vec![0.0f64, 0.0];
        s.project(&mut v);
        assert!((v[0] - 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
        assert_eq!(s.affine_dim(), 1);
    }

    #[test]
    fn dependent_and_inconsistent_rows() {
        let rows = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        let ok = AffineSet::from_constraints(2, &rows, &[1.0, 2.0]);
        assert!(ok.inconsistency() < 1e-14);
        let bad = AffineSet::from_constraints(2, &rows, &[1.0, 3.0]);
        assert!(bad.inconsistency() > 0.4);
    }

    #[test]
    fn range_form_matches_null_form() {
        let span = AffineSet::from_span(3, &[vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], vec![0.0; 3]);
        let null = AffineSet::from_constraints(3, &[vec![1.0, -1.0, 0.0]], &[0.0]);
        let mut a = vec![0.3f64, -2.0, 5.0];
        let mut b = a.clone();
        span.project(&mut a);
        null.project(&mut b);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
    }
}
