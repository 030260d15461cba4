//! Exact norms and order constants of an [`OrderedSpace`] by linear
//! programming over the cone weights `x = Σ w_g g`, `w ≥ 0`.

use serde::Serialize;

use super::simplex::{dot, nnls, LpBuilder, LpOutcome, Sense};
use super::space::{unit_vectors, Ball, OrderedSpace};
use crate::error::{Error, Result};

/// `x = M z` with `M` given column-wise over the first `cols.len()` LP
/// variables; appends the ball constraint `x ∈ B` using variables from
/// `aux` on. Returns the number of auxiliary variables used.
fn ball_rows(lp: &mut LpBuilder, space: &OrderedSpace, cols: &[(usize, Vec<f64>)], aux: usize) -> usize {
    let n = lp.vars();
    let d = space.dim();
    let expr = |i: usize| -> Vec<f64> {
        let mut row = vec![0.0; n];
        for (var, col) in cols {
            row[*var] += col[i];
        }
        row
    };
    match space.ball() {
        Ball::Linf => {
            for i in 0..d {
                lp.row(expr(i), Sense::Le, 1.0);
                lp.row(expr(i), Sense::Ge, -1.0);
            }
            0
        }
        Ball::L1 => {
            for i in 0..d {
                let mut row = expr(i);
                row[aux + i] = -1.0;
                row[aux + d + i] = 1.0;
                lp.row(row, Sense::Eq, 0.0);
            }
            let mut mass = vec![0.0; n];
            for v in mass[aux..aux + 2 * d].iter_mut() {
                *v = 1.0;
            }
            lp.row(mass, Sense::Le, 1.0);
            2 * d
        }
        Ball::Polytope(vs) => {
            for i in 0..d {
                let mut row = expr(i);
                for (p, v) in vs.iter().enumerate() {
                    row[aux + p] = -v[i];
                }
                lp.row(row, Sense::Eq, 0.0);
            }
            let mut mass = vec![0.0; n];
            for v in mass[aux..aux + vs.len()].iter_mut() {
                *v = 1.0;
            }
            lp.row(mass, Sense::Le, 1.0);
            vs.len()
        }
        Ball::L2 => unreachable!("ℓ2 balls are handled without LP"),
    }
}

fn ball_aux(space: &OrderedSpace) -> usize {
    match space.ball() {
        Ball::Linf | Ball::L2 => 0,
        Ball::L1 => 2 * space.dim(),
        Ball::Polytope(vs) => vs.len(),
    }
}

fn optimal(o: LpOutcome, what: &str) -> Result<super::simplex::LpSolution> {
    match o {
        LpOutcome::Optimal(s) => Ok(s),
        LpOutcome::Unbounded => Err(Error::MalformedSpace(format!("{what}: linear program is unbounded"))),
        LpOutcome::Infeasible => Err(Error::Solver(format!("{what}: linear program is infeasible"))),
    }
}

fn combine(cone: &[Vec<f64>], w: &[f64], d: usize) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for (g, wi) in cone.iter().zip(w) {
        for (xi, gi) in x.iter_mut().zip(g) {
            *xi += wi * gi;
        }
    }
    x
}

/// Gauge of `x` in the unit ball (`+∞` outside the span of a polytope).
pub fn gauge(space: &OrderedSpace, x: &[f64]) -> Result<f64> {
    if let Some(v) = space.ball_norm(x) {
        return Ok(v);
    }
    let Ball::Polytope(vs) = space.ball() else {
        unreachable!()
    };
    let mut lp = LpBuilder::new(vs.len());
    for i in 0..space.dim() {
        lp.row(vs.iter().map(|v| v[i]).collect(), Sense::Eq, x[i]);
    }
    match lp.minimize(&vec![1.0; vs.len()])? {
        LpOutcome::Optimal(s) => Ok(s.value),
        _ => Ok(f64::INFINITY),
    }
}

/// The LP `max f·Σ w_g g` over `w ≥ 0`, `Σ w_g g ∈ B` (not for ℓ2 balls).
pub fn flat_norm_lp(space: &OrderedSpace, f: &[f64]) -> (LpBuilder, Vec<f64>) {
    let k = space.cone().len();
    let mut lp = LpBuilder::new(k + ball_aux(space));
    let cols: Vec<(usize, Vec<f64>)> = space.cone().iter().cloned().enumerate().collect();
    ball_rows(&mut lp, space, &cols, k);
    let mut c: Vec<f64> = space.cone().iter().map(|g| dot(f, g)).collect();
    c.resize(lp.vars(), 0.0);
    (lp, c)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatNorm {
    pub value: f64,
    /// `+1` if attained at `f`, `−1` at `−f`.
    pub sign: f64,
    /// Cone weights of the maximizer.
    pub weights: Vec<f64>,
    pub x: Vec<f64>,
    /// Full LP point (weights then ball variables) of the attaining sign.
    pub lp_point: Option<Vec<f64>>,
    /// LP duals for `+f` and `−f`; each bounds its LP from above.
    pub duals: Option<[Vec<f64>; 2]>,
    /// `lp` or `nnls`.
    pub method: &'static str,
}

/// `sup{|f·x| : x ∈ K ∩ B}`.
pub fn flat_norm(f: &[f64], space: &OrderedSpace) -> Result<FlatNorm> {
    let d = space.dim();
    if f.len() != d {
        return Err(Error::shape("functional", d, f.len()));
    }
    let k = space.cone().len();
    if k == 0 {
        return Ok(FlatNorm {
            value: 0.0,
            sign: 1.0,
            weights: Vec::new(),
            x: vec![0.0; d],
            lp_point: None,
            duals: None,
            method: "lp",
        });
    }
    let mut best: Option<FlatNorm> = None;
    let mut duals: Vec<Vec<f64>> = Vec::new();
    for sign in [1.0, -1.0] {
        let fs: Vec<f64> = f.iter().map(|v| sign * v).collect();
        let cand = if *space.ball() == Ball::L2 {
            // sup over K ∩ B₂ of ⟨f, x⟩ is the length of the projection of f
            // onto K.
            let w = nnls(space.cone(), &fs);
            let p = combine(space.cone(), &w, d);
            let len = dot(&p, &p).sqrt();
            let scale = if len > 0.0 { 1.0 / len } else { 0.0 };
            FlatNorm {
                value: dot(&fs, &p) * scale,
                sign,
                weights: w.iter().map(|v| v * scale).collect(),
                x: p.iter().map(|v| v * scale).collect(),
                lp_point: None,
                duals: None,
                method: "nnls",
            }
        } else {
            let (lp, c) = flat_norm_lp(space, &fs);
            let s = optimal(lp.maximize(&c)?, "flat norm")?;
            let w = s.x[..k].to_vec();
            duals.push(s.dual);
            FlatNorm {
                value: s.value,
                sign,
                x: combine(space.cone(), &w, d),
                weights: w,
                lp_point: Some(s.x),
                duals: None,
                method: "lp",
            }
        };
        if best.as_ref().map(|b| cand.value > b.value).unwrap_or(true) {
            best = Some(cand);
        }
    }
    let mut best = best.expect("two signs");
    if let (Some(minus), Some(plus)) = (duals.pop(), duals.pop()) {
        best.duals = Some([plus, minus]);
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusReport {
    pub value: f64,
    /// Ball vertex where the radius is attained.
    pub worst_vertex: Vec<f64>,
    pub vertices: usize,
}

fn ball_vertices(space: &OrderedSpace) -> Result<Vec<Vec<f64>>> {
    let d = space.dim();
    Ok(match space.ball() {
        Ball::Linf => {
            if d > 16 {
                return Err(Error::Invalid(format!(
                    "ℓ∞ ball in dimension {d} has too many vertices"
                )));
            }
            // One of each ±v pair: the first sign is +.
            (0..1u32 << (d - 1))
                .map(|bits| {
                    (0..d)
                        .map(|i| if i > 0 && bits >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                        .collect()
                })
                .collect()
        }
        Ball::L1 => unit_vectors(d),
        Ball::Polytope(vs) => {
            let mut out: Vec<Vec<f64>> = Vec::new();
            for v in vs {
                let dup = out.iter().any(|w| {
                    w.iter()
                        .zip(v)
                        .all(|(a, b)| (a + b).abs() <= 1e-9 || (a - b).abs() <= 1e-9)
                });
                if !dup {
                    out.push(v.clone());
                }
            }
            out
        }
        Ball::L2 => {
            return Err(Error::Invalid("decomposition radius needs a polyhedral ball".into()));
        }
    })
}

/// Largest `ε` with `ε·B ⊆ (K ∩ B) − (K ∩ B)`.
///
/// The difference set `D` is convex and symmetric, so `ε·B ⊆ D` iff `ε·v ∈ D`
/// for each vertex `v` of `B` (one of each `±v`). Each vertex is one LP in
/// `(ε, w₁, w₂)`.
pub fn decomposition_radius(space: &OrderedSpace) -> Result<RadiusReport> {
    let vertices = ball_vertices(space)?;
    let k = space.cone().len();
    let aux = ball_aux(space);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in &vertices {
        let n = 1 + 2 * k + 2 * aux;
        let mut lp = LpBuilder::new(n);
        for i in 0..space.dim() {
            let mut row = vec![0.0; n];
            row[0] = v[i];
            for (g, gen) in space.cone().iter().enumerate() {
                row[1 + g] = -gen[i];
                row[1 + k + g] = gen[i];
            }
            lp.row(row, Sense::Eq, 0.0);
        }
        let first: Vec<(usize, Vec<f64>)> = space
            .cone()
            .iter()
            .enumerate()
            .map(|(g, x)| (1 + g, x.clone()))
            .collect();
        let second: Vec<(usize, Vec<f64>)> = space
            .cone()
            .iter()
            .enumerate()
            .map(|(g, x)| (1 + k + g, x.clone()))
            .collect();
        ball_rows(&mut lp, space, &first, 1 + 2 * k);
        ball_rows(&mut lp, space, &second, 1 + 2 * k + aux);
        let mut c = vec![0.0; n];
        c[0] = 1.0;
        let eps = optimal(lp.maximize(&c)?, "decomposition radius")?.value.max(0.0);
        if best.as_ref().map(|b| eps < b.0).unwrap_or(true) {
            best = Some((eps, v.clone()));
        }
    }
    let (value, worst_vertex) = best.unwrap_or((0.0, Vec::new()));
    Ok(RadiusReport {
        value,
        worst_vertex,
        vertices: vertices.len(),
    })
}

/// `x ∈ K`, by LP feasibility.
pub fn in_cone(space: &OrderedSpace, x: &[f64]) -> Result<bool> {
    let k = space.cone().len();
    if k == 0 {
        return Ok(x.iter().all(|v| v.abs() <= 1e-12));
    }
    let mut lp = LpBuilder::new(k);
    for i in 0..space.dim() {
        lp.row(space.cone().iter().map(|g| g[i]).collect(), Sense::Eq, x[i]);
    }
    Ok(matches!(lp.minimize(&vec![0.0; k])?, LpOutcome::Optimal(_)))
}

/// Whether `α·u − t ∈ K` for some `α ≥ 0`, with evidence either way.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Domination {
    /// Least `α` and weights with `α·u − t = Σ w_h h`, `w ≥ 0`.
    Scale { alpha: f64, weights: Vec<f64> },
    /// Farkas ray: `⟨y, u⟩ ≥ 0`, `⟨y, h⟩ ≤ 0` for all generators, `⟨y, t⟩ < 0`.
    Farkas { y: Vec<f64> },
}

impl Domination {
    pub fn alpha(&self) -> Option<f64> {
        match self {
            Domination::Scale { alpha, .. } => Some(*alpha),
            Domination::Farkas { .. } => None,
        }
    }
}

fn domination(space: &OrderedSpace, u: &[f64], t: &[f64]) -> Result<Domination> {
    let d = space.dim();
    let k = space.cone().len();
    let mut lp = LpBuilder::new(1 + k);
    for i in 0..d {
        let mut row = vec![u[i]];
        row.extend(space.cone().iter().map(|g| -g[i]));
        lp.row(row, Sense::Eq, t[i]);
    }
    let mut c = vec![0.0; 1 + k];
    c[0] = 1.0;
    if let LpOutcome::Optimal(s) = lp.minimize(&c)? {
        return Ok(Domination::Scale {
            alpha: s.value,
            weights: s.x[1..].to_vec(),
        });
    }
    // min ⟨t, y⟩ over the Farkas cone intersected with the box |y_i| ≤ 1,
    // y = y⁺ − y⁻.
    let mut lp = LpBuilder::new(2 * d);
    let split = |a: &[f64]| -> Vec<f64> { a.iter().copied().chain(a.iter().map(|v| -v)).collect() };
    lp.row(split(u), Sense::Ge, 0.0);
    for h in space.cone() {
        lp.row(split(h), Sense::Le, 0.0);
    }
    for i in 0..d {
        let mut row = vec![0.0; 2 * d];
        row[i] = 1.0;
        row[d + i] = 1.0;
        lp.row(row, Sense::Le, 1.0);
    }
    let s = optimal(lp.minimize(&split(t))?, "order unit ray")?;
    Ok(Domination::Farkas {
        y: (0..d).map(|i| s.x[i] - s.x[d + i]).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Obstruction {
    /// Test vector index: generators first, then `±e_i` as `k + 2i`, `k + 2i + 1`.
    pub index: usize,
    pub vector: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderUnitReport {
    pub is_order_unit: bool,
    /// Test vectors: generators normalized to unit gauge, then `±e_i`.
    pub tests: Vec<Vec<f64>>,
    /// Least `α` with `α·u ≥ t` per test vector; `None` if no `α` exists.
    pub scales: Vec<Option<f64>>,
    pub evidence: Vec<Domination>,
    pub obstruction: Option<Obstruction>,
    /// `min{‖v‖₁ : v ≥ ĝ for every normalized generator ĝ}`: any element
    /// dominating all unit-gauge generators has at least this ℓ₁ mass.
    pub forced_mass: f64,
    /// Minimizer `v` of the forced-mass LP and its weights: `v − ĝ = Σ w_h h`.
    pub mass_witness: Vec<f64>,
    pub mass_weights: Vec<Vec<f64>>,
    /// Dual certificate: `y_g` with `y_g ∈ K*`, `‖Σ y_g‖_∞ ≤ 1`; then
    /// `Σ ⟨y_g, ĝ⟩ ≤ forced_mass`.
    pub mass_dual: Vec<Vec<f64>>,
    pub normalized_generators: Vec<Vec<f64>>,
    pub u_mass: f64,
}

/// Whether `u ∈ K` dominates every element of the space up to scaling, with
/// the minimal ℓ₁ mass forced on any element dominating all unit-gauge
/// generators.
pub fn order_unit_check(u: &[f64], space: &OrderedSpace) -> Result<OrderUnitReport> {
    let d = space.dim();
    if u.len() != d {
        return Err(Error::shape("order unit candidate", d, u.len()));
    }
    if !in_cone(space, u)? {
        return Err(Error::NotInCone(format!(
            "{:?} is not in the cone of {}",
            u,
            space.label()
        )));
    }
    let mut normalized = Vec::new();
    for g in space.cone() {
        let s = gauge(space, g)?;
        normalized.push(if s.is_finite() && s > 0.0 {
            g.iter().map(|v| v / s).collect()
        } else {
            g.clone()
        });
    }
    let mut tests: Vec<Vec<f64>> = normalized.clone();
    for e in unit_vectors(d) {
        tests.push(e.clone());
        tests.push(e.iter().map(|v| -v).collect());
    }
    let mut evidence = Vec::with_capacity(tests.len());
    let mut obstruction = None;
    for (index, t) in tests.iter().enumerate() {
        let e = domination(space, u, t)?;
        if e.alpha().is_none() && obstruction.is_none() {
            obstruction = Some(Obstruction {
                index,
                vector: t.clone(),
            });
        }
        evidence.push(e);
    }
    let (forced_mass, mass_witness, mass_weights, mass_dual) = forced_mass(space, &normalized)?;
    Ok(OrderUnitReport {
        is_order_unit: obstruction.is_none(),
        scales: evidence.iter().map(Domination::alpha).collect(),
        tests,
        evidence,
        obstruction,
        forced_mass,
        mass_witness,
        mass_weights,
        mass_dual,
        normalized_generators: normalized,
        u_mass: u.iter().map(|v| v.abs()).sum(),
    })
}

/// `min ‖v‖₁` subject to `v − ĝ ∈ K` for all `ĝ`; variables `p, q ≥ 0`
/// (`v = p − q`) and one weight block per generator.
type Mass = (f64, Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>);

fn forced_mass(space: &OrderedSpace, gens: &[Vec<f64>]) -> Result<Mass> {
    let d = space.dim();
    let k = space.cone().len();
    if gens.is_empty() {
        return Ok((0.0, vec![0.0; d], Vec::new(), Vec::new()));
    }
    let n = 2 * d + k * gens.len();
    let mut lp = LpBuilder::new(n);
    for (gi, g) in gens.iter().enumerate() {
        for i in 0..d {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row[d + i] = -1.0;
            for (h, gen) in space.cone().iter().enumerate() {
                row[2 * d + gi * k + h] = -gen[i];
            }
            lp.row(row, Sense::Eq, g[i]);
        }
    }
    let mut c = vec![0.0; n];
    for v in c[..2 * d].iter_mut() {
        *v = 1.0;
    }
    let s = optimal(lp.minimize(&c)?, "forced mass")?;
    let v: Vec<f64> = (0..d).map(|i| s.x[i] - s.x[d + i]).collect();
    let w: Vec<Vec<f64>> = s.x[2 * d..].chunks(k).map(|c| c.to_vec()).collect();
    let y: Vec<Vec<f64>> = s.dual.chunks(d).map(|c| c.to_vec()).collect();
    Ok((s.value, v, w, y))
}

/// Solver-free check of the forced-mass dual: returns the feasibility
/// violation and the certified lower bound `Σ ⟨y_g, ĝ⟩`.
pub fn check_mass_dual(space: &OrderedSpace, gens: &[Vec<f64>], y: &[Vec<f64>]) -> (f64, f64) {
    let d = space.dim();
    if y.len() != gens.len() || y.iter().any(|r| r.len() != d) {
        return (f64::INFINITY, 0.0);
    }
    let mut viol = 0.0f64;
    for yg in y {
        for h in space.cone() {
            viol = viol.max(-dot(yg, h));
        }
    }
    for i in 0..d {
        let s: f64 = y.iter().map(|yg| yg[i]).sum();
        viol = viol.max(s.abs() - 1.0);
    }
    let bound = y.iter().zip(gens).map(|(yg, g)| dot(yg, g)).sum();
    (viol.max(0.0), bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_norm_on_linf2() {
        let s = OrderedSpace::linf(2).unwrap();
        assert!((flat_norm(&[1.0, -1.0], &s).unwrap().value - 1.0).abs() < 1e-12);
        assert!((flat_norm(&[1.0, 1.0], &s).unwrap().value - 2.0).abs() < 1e-12);
        assert_eq!(flat_norm(&[0.0, 0.0], &s).unwrap().value, 0.0);
    }

    #[test]
    fn flat_norm_dual_bounds_value() {
        let s = OrderedSpace::linf(3).unwrap();
        let f = [0.3, -1.2, 0.7];
        let r = flat_norm(&f, &s).unwrap();
        let fs: Vec<f64> = f.iter().map(|v| r.sign * v).collect();
        let (lp, c) = flat_norm_lp(&s, &fs);
        let [plus, minus] = r.duals.as_ref().unwrap();
        let (viol, bound) = lp.max_dual_check(&c, if r.sign > 0.0 { plus } else { minus });
        assert!(viol <= 1e-12);
        assert!((bound - r.value).abs() < 1e-12);
        assert!(lp.primal_check(r.lp_point.as_ref().unwrap()) <= 1e-12);
        assert!((r.value - 1.2).abs() < 1e-12);
    }

    #[test]
    fn flat_norm_l2_matches_projection() {
        let s = OrderedSpace::new(2, unit_vectors(2), Ball::L2, "l2").unwrap();
        let r = flat_norm(&[3.0, -4.0], &s).unwrap();
        assert!((r.value - 4.0).abs() < 1e-12);
        assert_eq!(r.sign, -1.0);
    }

    #[test]
    fn radius_examples() {
        for n in 1..=4 {
            assert!((decomposition_radius(&OrderedSpace::linf(n).unwrap()).unwrap().value - 1.0).abs() < 1e-12);
        }
        let zero = OrderedSpace::new(2, vec![], Ball::Linf, "zero").unwrap();
        assert_eq!(decomposition_radius(&zero).unwrap().value, 0.0);
        let l2 = OrderedSpace::new(2, unit_vectors(2), Ball::L2, "l2").unwrap();
        assert!(decomposition_radius(&l2).is_err());
    }

    #[test]
    fn order_units() {
        let s = OrderedSpace::linf(3).unwrap();
        assert!(order_unit_check(&[1.0, 1.0, 1.0], &s).unwrap().is_order_unit);
        let r = order_unit_check(&[1.0, 0.0, 1.0], &s).unwrap();
        assert!(!r.is_order_unit);
        assert_eq!(r.obstruction.unwrap().index, 1);
        let Domination::Farkas { y } = &r.evidence[1] else {
            panic!()
        };
        assert!(dot(y, &r.tests[1]) < -1e-9 && dot(y, &[1.0, 0.0, 1.0]) >= 0.0);
        let zero = OrderedSpace::new(2, vec![], Ball::Linf, "zero").unwrap();
        assert!(!order_unit_check(&[0.0, 0.0], &zero).unwrap().is_order_unit);
        assert!(matches!(order_unit_check(&[1.0, 0.0], &zero), Err(Error::NotInCone(_))));
    }

    #[test]
    fn l1_positives_force_mass_n() {
        for n in [2usize, 3, 5] {
            let s = OrderedSpace::l1(n).unwrap();
            let r = order_unit_check(&vec![1.0; n], &s).unwrap();
            assert!(r.is_order_unit);
            assert!((r.forced_mass - n as f64).abs() < 1e-9);
            let (viol, bound) = check_mass_dual(&s, &r.normalized_generators, &r.mass_dual);
            assert!(viol <= 1e-12 && (bound - n as f64).abs() < 1e-9, "{viol} {bound}");
        }
    }
}
