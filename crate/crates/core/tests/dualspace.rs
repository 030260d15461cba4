use opsysdual::corpus::{build_full, build_linfty, build_toeplitz, corpus};
use opsysdual::dualspace::{
    bidual_norm, cb_norm_seesaw, d_norm, dual_cone_lineality, dual_cone_proper, dual_norm, is_cp, ratio_report,
    wittstock_decompose, wittstock_residuals, BidualSettings, CpSettings, DNormSettings, MatrixFunctional,
};
use opsysdual::numkernel::{operator_norm, ComplexMatrix};
use opsysdual::opsys::{element_norm, MatrixElement};
use opsysdual::rng::XorShiftRng;
use opsysdual::{Cx, Functional, System};
use proptest::prelude::*;

const TOL: f64 = 1e-7;

fn system(pick: usize) -> System {
    match pick % 4 {
        0 => build_linfty(2).unwrap(),
        1 => build_linfty(3).unwrap(),
        2 => build_full(2).unwrap(),
        _ => build_toeplitz(2).unwrap(),
    }
}

fn settings(level_max: usize, seed: u64) -> DNormSettings {
    DNormSettings {
        level_max,
        tol: TOL,
        restarts: 8,
        seed,
    }
}

fn random_general(sys: &System, m: usize, rng: &mut XorShiftRng) -> Functional {
    let values = (0..m * m * sys.dim()).map(|_| rng.complex::<f64>()).collect();
    MatrixFunctional::new(sys.clone(), m, values).unwrap()
}

fn random_cp(sys: &System, m: usize, rng: &mut XorShiftRng) -> Functional {
    let n = sys.ambient_dim() * m;
    let a = ComplexMatrix::<f64>::from_fn(n, n, |_, _| rng.complex());
    MatrixFunctional::from_choi(sys.clone(), m, &a.adjoint_mul(&a).scale_real(1.0 / n as f64)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_norm_is_below_dual_norm(pick in 0usize..4, seed in any::<u64>(), m in 1usize..3) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_general(&sys, m, &mut rng);
        let a = dual_norm(&f, TOL).value;
        let b = d_norm(&f, settings(2, seed)).value;
        prop_assert!(b <= a + 10.0 * TOL * (1.0 + a), "d {b} > dual {a}");
    }

    /// Adding levels never lowers the positive-part norm.
    #[test]
    fn d_norm_grows_with_level(pick in 0usize..4, seed in any::<u64>()) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_general(&sys, 1, &mut rng);
        let low = d_norm(&f, settings(1, seed)).value;
        let high = d_norm(&f, settings(3, seed));
        prop_assert!(high.value >= low - 1e-6 * (1.0 + low), "{} < {low}", high.value);
        prop_assert!(high.per_level.windows(2).all(|w| w[1].running >= w[0].running));
    }

    /// Unital systems: CP functionals have both norms equal to `‖f(1)‖`.
    #[test]
    fn cp_functionals_have_equal_norms(pick in 0usize..4, seed in any::<u64>(), m in 1usize..3) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_cp(&sys, m, &mut rng);
        prop_assert!(is_cp(&f, CpSettings::default()).unwrap().is_member());
        let at_unit = operator_norm(&f.eval(&ComplexMatrix::identity(sys.ambient_dim())));
        let a = dual_norm(&f, TOL).value;
        let b = d_norm(&f, settings(2 * m, seed)).value;
        prop_assert!((a - at_unit).abs() <= 1e-5 * (1.0 + at_unit), "dual {a} vs f(1) {at_unit}");
        prop_assert!((b - at_unit).abs() <= 1e-5 * (1.0 + at_unit), "d {b} vs f(1) {at_unit}");
    }

    #[test]
    fn four_bound(pick in 0usize..4, seed in any::<u64>(), m in 1usize..3) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_general(&sys, m, &mut rng);
        let r = ratio_report(&f, settings(2, seed));
        prop_assert_eq!(r.within_bounds(1e-3), Some(true), "ratio {}", r.ratio);
    }

    #[test]
    fn sdp_agrees_with_see_saw(pick in 0usize..4, seed in any::<u64>(), m in 1usize..3) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_general(&sys, m, &mut rng);
        let a = dual_norm(&f, TOL).value;
        let b = cb_norm_seesaw(&f, 16, seed, TOL).value;
        prop_assert!((a - b).abs() <= 10.0 * TOL * (1.0 + a), "SDP {a} vs see-saw {b}");
    }

    #[test]
    fn wittstock_parts_reconstruct(pick in 0usize..4, seed in any::<u64>()) {
        let sys = system(pick);
        let mut rng = XorShiftRng::new(seed);
        let f = random_general(&sys, 2, &mut rng);
        let nrm = dual_norm(&f, TOL).value;
        let f = f.scale(Cx::new(1.0 / nrm, 0.0));
        let r = wittstock_decompose(&f, TOL).unwrap();
        let parts: Vec<_> = r.parts.iter().map(|p| p.choi.as_matrix().clone()).collect();
        prop_assert_eq!(parts.len(), 4);
        let (recon, psd, cap) = wittstock_residuals(&f, &parts);
        prop_assert!(recon.max(psd).max(cap) <= 1e-6, "{recon:e} {psd:e} {cap:e}");
    }
}

/// Level-1 functionals on `ℓ∞^N`: the dual norm is the `ℓ1` norm of the
/// values, and for real values the positive part norm is the larger of the
/// positive and negative masses.
#[test]
fn linfty_closed_forms() {
    let mut rng = XorShiftRng::new(42);
    for n in 1..=4 {
        let sys = build_linfty(n).unwrap();
        for _ in 0..6 {
            let v: Vec<f64> = (0..n).map(|_| rng.uniform_pm1()).collect();
            let f = MatrixFunctional::scalar(sys.clone(), &v).unwrap();
            let l1: f64 = v.iter().map(|x| x.abs()).sum();
            let pos: f64 = v.iter().filter(|x| **x > 0.0).sum();
            let neg: f64 = -v.iter().filter(|x| **x < 0.0).sum::<f64>();
            let a = dual_norm(&f, TOL).value;
            let b = d_norm(&f, settings(2, 1)).value;
            assert!((a - l1).abs() <= 1e-6, "dual {a} vs {l1}");
            assert!((b - pos.max(neg)).abs() <= 1e-6, "d {b} vs {}", pos.max(neg));
        }
    }
}

#[test]
fn bidual_recovers_element_norm() {
    let settings = BidualSettings {
        level_max: 4,
        ..BidualSettings::default()
    };
    let mut rng = XorShiftRng::new(9);
    for sys in [build_linfty(2).unwrap(), build_full(2).unwrap()] {
        for k in 1..=2 {
            let z = MatrixElement::random_self_adjoint(sys.clone(), k, &mut rng).scale(0.5 + 2.0 * rng.unit());
            let r = bidual_norm(&z, settings);
            let norm = element_norm(&z);
            assert!(r.report.value <= norm + 1e-6 * (1.0 + norm));
            assert!(
                (r.report.value - norm).abs() <= 1e-2 * (1.0 + norm),
                "{} vs {norm}",
                r.report.value
            );
        }
    }
}

/// The span test and the lineality SDP agree, and match recorded expectations.
#[test]
fn properness_on_corpus() {
    for e in corpus().unwrap() {
        let span = dual_cone_proper(&e.system, 2, 3);
        let lin = dual_cone_lineality(&e.system, 3);
        assert_eq!(
            span.proper,
            lin.proper,
            "{}: span {:?} vs lineality dim {}",
            e.label(),
            span.proper,
            lin.dim
        );
        if let Some(p) = e.expected.dual_cone_proper {
            assert_eq!(span.proper, p, "{}", e.label());
        }
    }
}
