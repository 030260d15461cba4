//! Dense two-phase simplex with Bland's rule, and Lawson–Hanson NNLS.
//!
//! Standard form: `min cᵀx` subject to `Ax = b`, `x ≥ 0`. The optimal
//! basis also yields a dual `y` with `Aᵀy ≤ c` and `bᵀy = cᵀx`.

use crate::error::{Error, Result};

/// Smallest admissible pivot magnitude; also the reduced-cost threshold.
pub const PIVOT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Row multipliers: `Aᵀy ≤ c`, `bᵀy = value`.
    pub dual: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Rows with `≤`/`≥`/`=` over nonnegative variables, lowered to standard
/// form by one slack per inequality.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    vars: usize,
    rows: Vec<(Vec<f64>, Sense, f64)>,
}

impl LpBuilder {
    pub fn new(vars: usize) -> Self {
        Self { vars, rows: Vec::new() }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.vars);
        self.rows.push((coeffs, sense, rhs));
    }

    /// `min cᵀx`; the returned `x` has the builder's variables only and the
    /// dual one entry per row (`≤ 0` on `≤` rows, `≥ 0` on `≥` rows).
    pub fn minimize(&self, c: &[f64]) -> Result<LpOutcome> {
        let slacks = self.rows.iter().filter(|r| r.1 != Sense::Eq).count();
        let n = self.vars + slacks;
        let mut a = Vec::with_capacity(self.rows.len());
        let mut b = Vec::with_capacity(self.rows.len());
        let mut s = self.vars;
        for (coeffs, sense, rhs) in &self.rows {
            let mut row = coeffs.clone();
            row.resize(n, 0.0);
            match sense {
                Sense::Le => {
                    row[s] = 1.0;
                    s += 1;
                }
                Sense::Ge => {
                    row[s] = -1.0;
                    s += 1;
                }
                Sense::Eq => {}
            }
            a.push(row);
            b.push(*rhs);
        }
        let mut cost = c.to_vec();
        cost.resize(n, 0.0);
        Ok(match simplex(&cost, &a, &b)? {
            LpOutcome::Optimal(mut sol) => {
                sol.x.truncate(self.vars);
                LpOutcome::Optimal(sol)
            }
            other => other,
        })
    }

    /// Largest violation of the rows and of `x ≥ 0`.
    pub fn primal_check(&self, x: &[f64]) -> f64 {
        if x.len() != self.vars {
            return f64::INFINITY;
        }
        let mut viol = x.iter().fold(0.0f64, |m, v| m.max(-v));
        for (coeffs, sense, rhs) in &self.rows {
            let ax = dot(coeffs, x);
            viol = viol.max(match sense {
                Sense::Le => ax - rhs,
                Sense::Ge => rhs - ax,
                Sense::Eq => (ax - rhs).abs(),
            });
        }
        viol
    }

    /// For `max cᵀx`: the violation of dual feasibility of `y` (`y ≥ 0` on
    /// `≤` rows, `y ≤ 0` on `≥` rows, `Aᵀy ≥ c`) and the bound `bᵀy`.
    pub fn max_dual_check(&self, c: &[f64], y: &[f64]) -> (f64, f64) {
        if y.len() != self.rows.len() {
            return (f64::INFINITY, f64::INFINITY);
        }
        let mut viol = 0.0f64;
        for ((_, sense, _), yi) in self.rows.iter().zip(y) {
            match sense {
                Sense::Le => viol = viol.max(-yi),
                Sense::Ge => viol = viol.max(*yi),
                Sense::Eq => {}
            }
        }
        for (j, cj) in c.iter().enumerate() {
            let aty: f64 = self.rows.iter().zip(y).map(|(r, yi)| r.0[j] * yi).sum();
            viol = viol.max(cj - aty);
        }
        let bound = self.rows.iter().zip(y).map(|(r, yi)| r.2 * yi).sum();
        (viol, bound)
    }

    pub fn maximize(&self, c: &[f64]) -> Result<LpOutcome> {
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        Ok(match self.minimize(&neg)? {
            LpOutcome::Optimal(sol) => LpOutcome::Optimal(LpSolution {
                value: -sol.value,
                dual: sol.dual.iter().map(|v| -v).collect(),
                x: sol.x,
            }),
            other => other,
        })
    }
}

struct Tableau {
    /// `m` rows of `n + m` columns (originals then artificials) plus rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.t[r][col];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let width = self.t.first().map(|r| r.len() - 1).unwrap_or(0);
        let mut red: Vec<f64> = (0..width).map(|j| cost.get(j).copied().unwrap_or(0.0)).collect();
        for (row, &bi) in self.t.iter().zip(&self.basis) {
            let cb = cost.get(bi).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for (r, v) in red.iter_mut().zip(row) {
                    *r -= cb * v;
                }
            }
        }
        red
    }

    /// Bland-rule iterations on `cost` over the allowed columns.
    fn run(&mut self, cost: &[f64], allowed: usize) -> bool {
        let m = self.t.len();
        let limit = 50_000usize.max(100 * (allowed + m));
        for _ in 0..limit {
            let red = self.reduced_costs(cost);
            let Some(col) = (0..allowed).find(|&j| red[j] < -PIVOT_TOL) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][self.t[i].len() - 1] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
        true
    }
}

/// Solves `min cᵀx, Ax = b, x ≥ 0`.
pub fn simplex(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(Error::shape("linear program", m, b.len()));
    }
    if let Some(r) = a.iter().position(|r| r.len() != n) {
        return Err(Error::shape("linear program row", n, a[r].len()));
    }
    if c.iter().chain(b).chain(a.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("linear program has non-finite data".into()));
    }
    // Rows with negative rhs are negated so the artificial basis is feasible.
    let flip: Vec<f64> = b.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let mut row: Vec<f64> = a[i].iter().map(|v| v * flip[i]).collect();
        row.resize(n + m + 1, 0.0);
        row[n + i] = 1.0;
        row[n + m] = b[i] * flip[i];
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        n,
    };
    let phase1: Vec<f64> = (0..n + m).map(|j| if j >= n { 1.0 } else { 0.0 }).collect();
    tab.run(&phase1, n);
    let infeas: f64 = tab
        .basis
        .iter()
        .zip(&tab.t)
        .filter(|(bi, _)| **bi >= n)
        .map(|(_, row)| row[n + m])
        .sum();
    let scale = 1.0 + b.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if infeas > 1e-8 * scale {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and stay inert.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| tab.t[r][j].abs() > PIVOT_TOL) {
                tab.pivot(r, col);
            }
        }
    }
    if !tab.run(c, n) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (row, &bi) in tab.t.iter().zip(&tab.basis) {
        if bi < tab.n {
            x[bi] = row[n + m];
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    // Artificial column i has cost 0 and started as e_i, so its reduced
    // cost is −y_i (of the flipped system).
    let red = tab.reduced_costs(c);
    let dual = (0..m).map(|i| -red[n + i] * flip[i]).collect();
    Ok(LpOutcome::Optimal(LpSolution { x, value, dual }))
}

pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[r][k] -= f * a[col][k];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Least squares restricted to the columns in `set`, via normal equations.
fn passive_ls(cols: &[Vec<f64>], f: &[f64], set: &[usize]) -> Option<Vec<f64>> {
    let gram: Vec<Vec<f64>> = set
        .iter()
        .map(|&i| set.iter().map(|&j| dot(&cols[i], &cols[j])).collect())
        .collect();
    let rhs: Vec<f64> = set.iter().map(|&i| dot(&cols[i], f)).collect();
    solve_dense(gram, rhs)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `argmin_{w ≥ 0} ‖Σ w_i cols_i − f‖₂` (Lawson–Hanson active set).
pub fn nnls(cols: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    let k = cols.len();
    let mut w = vec![0.0; k];
    let mut passive: Vec<usize> = Vec::new();
    let residual = |w: &[f64]| -> Vec<f64> {
        let mut r = f.to_vec();
        for (wi, c) in w.iter().zip(cols) {
            for (ri, ci) in r.iter_mut().zip(c) {
                *ri -= wi * ci;
            }
        }
        r
    };
    for _ in 0..3 * k + 10 {
        let r = residual(&w);
        let grad: Vec<f64> = cols.iter().map(|c| dot(c, &r)).collect();
        let Some(j) = (0..k)
            .filter(|j| !passive.contains(j))
            .filter(|&j| grad[j] > 1e-12)
            .max_by(|&a, &b| grad[a].total_cmp(&grad[b]))
        else {
            break;
        };
        passive.push(j);
        loop {
            let Some(z) = passive_ls(cols, f, &passive) else {
                passive.pop();
                break;
            };
            if z.iter().all(|v| *v > 0.0) {
                for (&i, v) in passive.iter().zip(&z) {
                    w[i] = *v;
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (&i, zi) in passive.iter().zip(&z) {
                if *zi <= 0.0 {
                    alpha = alpha.min(w[i] / (w[i] - zi));
                }
            }
            for (&i, zi) in passive.iter().zip(&z) {
                w[i] += alpha * (zi - w[i]);
            }
            passive.retain(|&i| w[i] > 1e-14);
            for i in 0..k {
                if !passive.contains(&i) {
                    w[i] = 0.0;
                }
            }
            if passive.is_empty() {
                break;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(o: LpOutcome) -> LpSolution {
        match o {
            LpOutcome::Optimal(s) => s,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn small_lp_with_duals() {
        // max x + y, x + 2y ≤ 4, 3x + y ≤ 6: optimum (8/5, 6/5).
        let mut lp = LpBuilder::new(2);
        lp.row(vec![1.0, 2.0], Sense::Le, 4.0);
        lp.row(vec![3.0, 1.0], Sense::Le, 6.0);
        let s = optimal(lp.maximize(&[1.0, 1.0]).unwrap());
        assert!((s.value - 2.8).abs() < 1e-12);
        assert!((s.x[0] - 1.6).abs() < 1e-12 && (s.x[1] - 1.2).abs() < 1e-12);
        // Dual of the maximization: y ≥ 0, Aᵀy ≥ c, bᵀy = value.
        assert!((4.0 * s.dual[0] + 6.0 * s.dual[1] - 2.8).abs() < 1e-12);
        assert!(s.dual.iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LpBuilder::new(1);
        lp.row(vec![1.0], Sense::Ge, 2.0);
        lp.row(vec![1.0], Sense::Le, 1.0);
        assert_eq!(lp.minimize(&[1.0]).unwrap(), LpOutcome::Infeasible);
        let mut lp = LpBuilder::new(1);
        lp.row(vec![1.0], Sense::Ge, 2.0);
        assert_eq!(lp.maximize(&[1.0]).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_redundant_rows() {
        let mut lp = LpBuilder::new(2);
        lp.row(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.row(vec![2.0, 2.0], Sense::Eq, 2.0);
        let s = optimal(lp.minimize(&[1.0, 2.0]).unwrap());
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nnls_projects_onto_orthant() {
        let cols = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = nnls(&cols, &[2.0, -3.0]);
        assert_eq!(w, vec![2.0, 0.0]);
        let cols = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 0.0]];
        let w = nnls(&cols, &[0.5, 2.0]);
        let fit: Vec<f64> = (0..2)
            .map(|i| cols.iter().zip(&w).map(|(c, wi)| c[i] * wi).sum())
            .collect();
        assert!((fit[0] - 0.5).abs() < 1e-10 && (fit[1] - 2.0).abs() < 1e-10, "{fit:?}");
    }
}
