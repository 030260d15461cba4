use opsysdual::corpus::{parse_system_spec, random_system};
use opsysdual::numkernel::{operator_norm, ComplexMatrix};
use opsysdual::opsys::decomposition::witness_residual;
use opsysdual::opsys::{cone_membership, congruence, decomposition_value, element_norm, MatrixElement};
use opsysdual::rng::XorShiftRng;
use opsysdual::{Element, Matrix, System};
use proptest::prelude::*;

const TOL: f64 = 1e-8;

fn unital_system(pick: usize, seed: u64) -> System {
    match pick % 5 {
        0 => parse_system_spec("linfty:3").unwrap(),
        1 => parse_system_spec("m:2").unwrap(),
        2 => parse_system_spec("toeplitz:3").unwrap(),
        3 => parse_system_spec("path:3").unwrap(),
        _ => random_system(seed, 3, 2, true).unwrap(),
    }
}

/// `h + (|λ_min(h)| + shift)·1`, positive in a unital system.
fn positive(sys: &System, n: usize, shift: f64, rng: &mut XorShiftRng) -> Element {
    let h = MatrixElement::random_self_adjoint(sys.clone(), n, rng);
    let lam = cone_membership(&h, 0.0).min_eigenvalue;
    let unit = MatrixElement::unit(sys.clone(), n).unwrap();
    h.sub(&unit.scale(lam - shift)).unwrap()
}

fn add(x: &Element, y: &Element) -> Element {
    x.sub(&y.scale(-1.0)).unwrap()
}

fn random_scalar(r: usize, c: usize, rng: &mut XorShiftRng) -> Matrix {
    ComplexMatrix::from_fn(r, c, |_, _| rng.complex())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// `Σ a_i† x_i a_i` stays in the cone for positive `x_i` of mixed levels.
    #[test]
    fn cone_is_closed_under_congruence_sums(pick in 0usize..5, seed in any::<u64>(), m in 1usize..4, terms in 1usize..4) {
        let sys = unital_system(pick, seed);
        let mut rng = XorShiftRng::new(seed ^ 0xA5A5);
        let mut total = MatrixElement::zero(sys.clone(), m);
        for _ in 0..terms {
            let n = 1 + rng.below(3);
            let x = positive(&sys, n, 0.0, &mut rng);
            let a = random_scalar(n, m, &mut rng);
            total = add(&total, &congruence(&a, &x).unwrap());
        }
        let r = cone_membership(&total, TOL * (1.0 + total.norm()));
        prop_assert!(r.member, "λ_min = {}", r.min_eigenvalue);
    }

    /// Boundary elements are limits of interior ones and stay members;
    /// pushing past the boundary leaves the cone.
    #[test]
    fn cone_is_closed(pick in 0usize..5, seed in any::<u64>(), n in 1usize..4) {
        let sys = unital_system(pick, seed);
        let mut rng = XorShiftRng::new(seed);
        let x = positive(&sys, n, 0.0, &mut rng);
        let unit = MatrixElement::unit(sys.clone(), n).unwrap();
        for k in [1.0, 10.0, 1e3, 1e6] {
            prop_assert!(cone_membership(&add(&x, &unit.scale(1.0 / k)), 0.0).member);
        }
        prop_assert!(cone_membership(&x, TOL).member);
        prop_assert!(!cone_membership(&x.sub(&unit.scale(1e-4)).unwrap(), TOL).member);
    }

    #[test]
    fn decomposition_witness(pick in 0usize..5, seed in any::<u64>(), n in 1usize..3) {
        let sys = unital_system(pick, seed);
        let mut rng = XorShiftRng::new(seed.wrapping_add(3));
        let x = MatrixElement::random_self_adjoint(sys.clone(), n, &mut rng);
        let tol = 1e-7;
        let d = decomposition_value(&x, tol).unwrap();
        prop_assert!(d.is_finite());
        // Unital systems decompose at the unit shift.
        prop_assert!(d.value <= (1.0 + tol) * element_norm(&x) + tol);
        prop_assert!(d.value >= d.lower_bound - tol);
        let (u, v) = d.witness.unwrap();
        prop_assert!(witness_residual(&x, &u, &v) <= 10.0 * tol * (1.0 + d.value));
        prop_assert!(u.norm().max(v.norm()) <= d.value + 2.0 * tol);
    }

    /// Non-unital random systems: any finite value comes with a witness.
    #[test]
    fn decomposition_witness_non_unital(seed in any::<u64>(), k in 1usize..5) {
        let sys = random_system(seed, 3, k, false).unwrap();
        let mut rng = XorShiftRng::new(seed);
        let x = MatrixElement::random_self_adjoint(sys, 1, &mut rng);
        let tol = 1e-7;
        let d = decomposition_value(&x, tol).unwrap();
        if d.is_finite() {
            let (u, v) = d.witness.unwrap();
            prop_assert!(witness_residual(&x, &u, &v) <= 10.0 * tol * (1.0 + d.value));
            prop_assert!(u.norm().max(v.norm()) <= d.value + 2.0 * tol);
        } else {
            prop_assert!(d.witness.is_none());
        }
    }

    #[test]
    fn congruence_norm_bound(pick in 0usize..5, seed in any::<u64>(), n in 1usize..4, m in 1usize..4) {
        let sys = unital_system(pick, seed);
        let mut rng = XorShiftRng::new(seed ^ 7);
        let x = MatrixElement::random_self_adjoint(sys, n, &mut rng);
        let a = random_scalar(n, m, &mut rng);
        let y = congruence(&a, &x).unwrap();
        let an = operator_norm(&a);
        prop_assert!(y.norm() <= an * an * x.norm() * (1.0 + 1e-10) + 1e-12);
    }
}

#[test]
fn unital_decomposition_of_unit_ball_is_at_most_one() {
    let mut rng = XorShiftRng::new(11);
    for pick in 0..5 {
        let sys = unital_system(pick, 5);
        for n in 1..=3 {
            for _ in 0..4 {
                let x = MatrixElement::random_self_adjoint(sys.clone(), n, &mut rng).normalized();
                let d = decomposition_value(&x, 1e-8).unwrap();
                assert!(d.value <= 1.0 + 1e-8, "{}: {}", sys.label(), d.value);
            }
        }
    }
}
