//! `‖f‖^d = sup_n sup{‖θ_f^{(n)}(x)‖ : x ∈ M_n(S)^+, ‖x‖ ≤ 1}`, truncated at
//! `n ≤ N` and estimated level by level with a multi-start see-saw.
//!
//! Each level is seeded with the previous level's optimizer embedded as
//! `x ⊕ 0`, so the per-level values are nondecreasing.

use super::functional::{theta_apply, MatrixFunctional};
use super::report::{LevelValue, NormMethod, NormReport, NormWitness};
use super::seesaw::{ascend, ascend_from_element, best_vectors, start_vectors, Mode, SeeSawPoint};
use crate::numkernel::operator_norm;
use crate::opsys::{embed, BallKind, Lmo, MatrixElement};
use crate::rng::XorShiftRng;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct DNormSettings {
    pub level_max: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DNormSettings {
    fn default() -> Self {
        Self {
            level_max: 4,
            tol: 1e-7,
            restarts: 16,
            seed: 0x5EED,
        }
    }
}

fn modes<T: Real>(f: &MatrixFunctional<T>) -> Vec<Mode<T>> {
    if f.is_self_adjoint(T::floor_tol(1e-10)) {
        vec![Mode::Hermitian(T::one()), Mode::Hermitian(-T::one())]
    } else {
        vec![Mode::General]
    }
}

fn norm_of<T: Real>(f: &MatrixFunctional<T>, p: &SeeSawPoint<T>) -> T {
    operator_norm(&theta_apply(f, &p.x).expect("same system"))
}

/// Best point at level `n` over the element starts and `restarts` vector starts.
fn level_search<T: Real>(
    f: &MatrixFunctional<T>,
    n: usize,
    restarts: usize,
    rng: &mut XorShiftRng,
    elements: &[MatrixElement<T>],
) -> (T, SeeSawPoint<T>) {
    let m = f.level();
    let mut lmo = Lmo::new(f.system().clone(), n, BallKind::Positive);
    let modes = modes(f);
    let mut best: Option<(T, SeeSawPoint<T>)> = None;
    let keep = |p: SeeSawPoint<T>, best: &mut Option<(T, SeeSawPoint<T>)>| {
        let v = norm_of(f, &p);
        if best.as_ref().map(|(b, _)| v > *b).unwrap_or(true) {
            *best = Some((v, p));
        }
    };
    for x in elements {
        // Ascend along the sign that is already better at the start.
        let theta = theta_apply(f, x).expect("same system");
        let mode = modes
            .iter()
            .copied()
            .max_by(|a, b| {
                best_vectors(&theta, *a)
                    .0
                    .partial_cmp(&best_vectors(&theta, *b).0)
                    .unwrap()
            })
            .expect("nonempty");
        keep(ascend_from_element(f, &mut lmo, x, mode), &mut best);
    }
    let starts = start_vectors::<T>(n, m, restarts.max(1), rng);
    for (i, z) in starts.iter().enumerate() {
        for &mode in &modes {
            match mode {
                Mode::Hermitian(s) => {
                    let eta = z.iter().map(|c| *c * s).collect();
                    keep(ascend(f, &mut lmo, z.clone(), eta, mode), &mut best);
                }
                Mode::General => {
                    let other = starts[(i + 1) % starts.len()].clone();
                    keep(ascend(f, &mut lmo, z.clone(), z.clone(), mode), &mut best);
                    keep(ascend(f, &mut lmo, z.clone(), other, mode), &mut best);
                }
            }
        }
    }
    best.expect("at least one start")
}

/// Truncated `‖f‖^d` with the default start set.
pub fn d_norm<T: Real>(f: &MatrixFunctional<T>, settings: DNormSettings) -> NormReport<T> {
    d_norm_with_starts(f, settings, &[])
}

/// As [`d_norm`], with extra positive contractions (any level) used as
/// starting points at every level they fit in.
pub fn d_norm_with_starts<T: Real>(
    f: &MatrixFunctional<T>,
    settings: DNormSettings,
    extra: &[MatrixElement<T>],
) -> NormReport<T> {
    let tol = T::lit(settings.tol);
    let level_max = settings.level_max.max(1);
    if f.max_abs() == T::zero() {
        let mut r = NormReport::trivial(NormMethod::SeeSaw, level_max, tol);
        r.per_level = (1..=level_max)
            .map(|level| LevelValue {
                level,
                raw: 0.0,
                running: 0.0,
            })
            .collect();
        r.restarts = settings.restarts;
        return r;
    }
    let sys = f.system().clone();
    let mut per_level = Vec::with_capacity(level_max);
    let mut prev: Option<MatrixElement<T>> = None;
    let mut best: Option<(T, SeeSawPoint<T>)> = None;
    for n in 1..=level_max {
        let mut elements = Vec::new();
        if let Some(x) = &prev {
            elements.push(embed(x, n).expect("level increases"));
        }
        if sys.is_unital() {
            elements.push(MatrixElement::unit(sys.clone(), n).expect("unital"));
        }
        for x in extra {
            if x.level() <= n && std::sync::Arc::ptr_eq(x.system(), &sys) {
                elements.push(embed(x, n).expect("level fits"));
            }
        }
        let mut rng = XorShiftRng::fork(settings.seed, 0xD0 + n as u64);
        let (v, p) = level_search(f, n, settings.restarts, &mut rng, &elements);
        let running = best.as_ref().map(|(b, _)| b.max(v)).unwrap_or(v);
        per_level.push(LevelValue {
            level: n,
            raw: v.as_f64(),
            running: running.as_f64(),
        });
        prev = Some(p.x.clone());
        if best.as_ref().map(|(b, _)| v > *b).unwrap_or(true) {
            best = Some((v, p));
        }
    }
    let (value, p) = best.expect("at least one level");
    let theta = theta_apply(f, &p.x).expect("same system");
    let (_, zeta, eta) = best_vectors(&theta, Mode::General);
    NormReport {
        value,
        method: NormMethod::SeeSaw,
        level: level_max,
        restarts: settings.restarts,
        tol,
        per_level,
        residual: p.residual,
        witness: Some(NormWitness { x: p.x, zeta, eta }),
        paulsen: None,
        converged: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ComplexMatrix;
    use crate::opsys::{cone_membership, OperatorSystem};
    use std::sync::Arc;

    type M = ComplexMatrix<f64>;

    fn linf(n: usize) -> Arc<OperatorSystem<f64>> {
        let gens: Vec<M> = (0..n).map(|i| M::unit(n, i, i)).collect();
        Arc::new(OperatorSystem::new(&gens, true, format!("linf{n}")).unwrap())
    }

    #[test]
    fn signed_diagonal_has_d_norm_one() {
        let f = MatrixFunctional::scalar(linf(2), &[1.0, -1.0]).unwrap();
        let r = d_norm(&f, DNormSettings::default());
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        let w = r.witness.unwrap();
        assert!(cone_membership(&w.x, 1e-9).member);
        assert!(w.x.norm() <= 1.0 + 1e-9);
        assert_eq!(r.per_level.len(), 4);
        for pair in r.per_level.windows(2) {
            assert!(pair[1].raw >= pair[0].raw - 1e-12);
        }
    }

    #[test]
    fn zero_functional() {
        let r = d_norm(&MatrixFunctional::zero(linf(2), 2), DNormSettings::default());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn trace_matches_cb_norm() {
        let s = Arc::new(
            OperatorSystem::new(
                &[M::unit(2, 0, 0), M::unit(2, 0, 1), M::unit(2, 1, 0), M::unit(2, 1, 1)],
                true,
                "m2",
            )
            .unwrap(),
        );
        let r = d_norm(
            &MatrixFunctional::trace(s),
            DNormSettings {
                level_max: 2,
                ..Default::default()
            },
        );
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }
}
