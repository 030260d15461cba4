use opsysdual::corpus::build_linfty;
use opsysdual::dualspace::{DNormSettings, MatrixFunctional};
use opsysdual::rng::XorShiftRng;
use opsysdual::scalar_layer::{decomposition_radius, flat_norm, oracle_compare, Ball, OrderedSpace};
use proptest::prelude::*;

type V3 = [f64; 3];

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn ice_cream(k: usize, aperture: f64) -> Vec<V3> {
    (0..k)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            [1.0, aperture * t.cos(), aperture * t.sin()]
        })
        .collect()
}

/// Ball facets `a·x ≤ 1` and the support function `h(a) = sup_{x∈B} a·x`.
fn ball_facets(ball: &Ball) -> Vec<V3> {
    match ball {
        Ball::Linf => (0..3)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut a = [0.0; 3];
                    a[i] = s;
                    a
                })
            })
            .collect(),
        Ball::L1 => (0..8)
            .map(|b| [0, 1, 2].map(|i| if b >> i & 1 == 1 { -1.0 } else { 1.0 }))
            .collect(),
        _ => unreachable!(),
    }
}

fn support(ball: &Ball, a: &V3) -> f64 {
    match ball {
        Ball::Linf => a.iter().map(|v| v.abs()).sum(),
        Ball::L1 => a.iter().fold(0.0, |m, v| m.max(v.abs())),
        _ => unreachable!(),
    }
}

fn solve3(rows: [&V3; 3], rhs: V3) -> Option<V3> {
    let det = dot(rows[0], &cross(rows[1], rows[2]));
    if det.abs() < 1e-12 {
        return None;
    }
    let cols = [
        cross(rows[1], rows[2]),
        cross(rows[2], rows[0]),
        cross(rows[0], rows[1]),
    ];
    Some([0, 1, 2].map(|j| (rhs[0] * cols[0][j] + rhs[1] * cols[1][j] + rhs[2] * cols[2][j]) / det))
}

fn push_unique(pts: &mut Vec<V3>, p: V3) {
    if !pts.iter().any(|q| sub(q, &p).iter().all(|v| v.abs() < 1e-9)) {
        pts.push(p);
    }
}

/// Brute force: cone facets from generator pairs, vertices of `K ∩ B` from
/// plane triples, then every supporting plane of `D = P − P` through three
/// of its points. `ε·B ⊆ D` iff `ε·h(a) ≤ b` for each facet `a·x ≤ b`.
fn brute_force_radius(gens: &[V3], ball: &Ball) -> f64 {
    let mut halfspaces: Vec<(V3, f64)> = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let n = cross(&gens[i], &gens[j]);
            if dot(&n, &n) < 1e-18 {
                continue;
            }
            let side: Vec<f64> = gens.iter().map(|g| dot(&n, g)).collect();
            if side.iter().all(|s| *s >= -1e-12) {
                halfspaces.push(([-n[0], -n[1], -n[2]], 0.0));
            } else if side.iter().all(|s| *s <= 1e-12) {
                halfspaces.push((n, 0.0));
            }
        }
    }
    halfspaces.extend(ball_facets(ball).into_iter().map(|a| (a, 1.0)));

    let h = &halfspaces;
    let mut vertices = Vec::new();
    for i in 0..h.len() {
        for j in i + 1..h.len() {
            for k in j + 1..h.len() {
                if let Some(x) = solve3([&h[i].0, &h[j].0, &h[k].0], [h[i].1, h[j].1, h[k].1]) {
                    if h.iter().all(|(a, b)| dot(a, &x) <= b + 1e-9) {
                        push_unique(&mut vertices, x);
                    }
                }
            }
        }
    }

    let mut diff = Vec::new();
    for p in &vertices {
        for q in &vertices {
            push_unique(&mut diff, sub(p, q));
        }
    }

    let mut eps = f64::INFINITY;
    for i in 0..diff.len() {
        for j in i + 1..diff.len() {
            for k in j + 1..diff.len() {
                let mut n = cross(&sub(&diff[j], &diff[i]), &sub(&diff[k], &diff[i]));
                let len = dot(&n, &n).sqrt();
                if len < 1e-9 {
                    continue;
                }
                n = n.map(|v| v / len);
                let b = dot(&n, &diff[i]);
                let vals: Vec<f64> = diff.iter().map(|p| dot(&n, p)).collect();
                let (a, b) = if vals.iter().all(|v| *v <= b + 1e-9) {
                    (n, b)
                } else if vals.iter().all(|v| *v >= b - 1e-9) {
                    (n.map(|v| -v), -b)
                } else {
                    continue;
                };
                eps = eps.min(b / support(ball, &a));
            }
        }
    }
    eps
}

fn space(gens: &[V3], ball: Ball) -> OrderedSpace {
    OrderedSpace::new(3, gens.iter().map(|g| g.to_vec()).collect(), ball, "ice-cream").unwrap()
}

#[test]
fn ice_cream_radius_matches_vertex_enumeration() {
    for ball in [Ball::Linf, Ball::L1] {
        for aperture in [0.5, 1.0, 1.5] {
            let gens = ice_cream(8, aperture);
            let lp = decomposition_radius(&space(&gens, ball.clone())).unwrap().value;
            let brute = brute_force_radius(&gens, &ball);
            assert!(lp > 1e-3, "{ball:?} aperture {aperture}: radius {lp}");
            assert!(
                (lp - brute).abs() <= 1e-7,
                "{ball:?} aperture {aperture}: LP {lp} vs brute force {brute}"
            );
        }
    }
}

#[test]
fn linfty_radius_is_one() {
    for n in 1..=6 {
        let r = decomposition_radius(&OrderedSpace::linf(n).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-9, "linf:{n}: {}", r.value);
    }
}

fn random_space(seed: u64, k: usize, l1: bool) -> OrderedSpace {
    let mut rng = XorShiftRng::new(seed);
    let cone = (0..k).map(|_| (0..3).map(|_| rng.uniform_pm1()).collect()).collect();
    OrderedSpace::new(3, cone, if l1 { Ball::L1 } else { Ball::Linf }, "random").unwrap()
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0f64..2.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flat_norm_is_a_seminorm(seed in any::<u64>(), k in 1usize..6, l1 in any::<bool>(), f in vec3(), g in vec3(), t in -3.0f64..3.0) {
        let s = random_space(seed, k, l1);
        let nf = flat_norm(&f, &s).unwrap().value;
        let ng = flat_norm(&g, &s).unwrap().value;
        let sum: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = f.iter().map(|a| t * a).collect();
        prop_assert!(flat_norm(&sum, &s).unwrap().value <= nf + ng + 1e-9);
        prop_assert!((flat_norm(&scaled, &s).unwrap().value - t.abs() * nf).abs() <= 1e-9 * (1.0 + nf * t.abs()));
        prop_assert!(nf <= s.dual_ball_norm(&f) + 1e-9);
    }

    /// Level-1 self-adjoint functionals on `ℓ∞^N` against the LP values.
    #[test]
    fn oracle_on_diagonal_systems(n in 1usize..5, seed in any::<u64>()) {
        let sys = build_linfty(n).unwrap();
        let mut rng = XorShiftRng::new(seed);
        let v: Vec<f64> = (0..n).map(|_| 2.0 * rng.uniform_pm1()).collect();
        let f = MatrixFunctional::scalar(sys, &v).unwrap();
        let settings = DNormSettings { level_max: 2, tol: 1e-7, restarts: 8, seed };
        let r = oracle_compare(&f, settings, 1e-6).unwrap();
        prop_assert!(r.passes, "d gap {:e}, dual gap {:e}", r.d_gap, r.dual_gap);
    }
}
