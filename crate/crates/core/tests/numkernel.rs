use opsysdual::numkernel::{
    bisect_optimal, eig_hermitian, functional, hermitian_norm, hvec, project_psd, solve_feasibility, AffinePSDProblem,
    ComplexMatrix, Direction, HermitianMatrix, DEFAULT_MAX_ITER,
};
use opsysdual::rng::XorShiftRng;
use proptest::prelude::*;

fn random_hermitian(n: usize, seed: u64, scale: f64) -> HermitianMatrix<f64> {
    let mut rng = XorShiftRng::new(seed);
    let a = ComplexMatrix::<f64>::from_fn(n, n, |_, _| rng.complex());
    HermitianMatrix::from_hermitian_part(&a.scale_real(scale))
}

fn frob(m: &ComplexMatrix<f64>) -> f64 {
    m.frobenius_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_projection_is_idempotent(n in 1usize..7, seed in any::<u64>(), scale in 0.01f64..100.0) {
        let h = random_hermitian(n, seed, scale);
        let p = project_psd(&h);
        let pp = project_psd(&p);
        prop_assert!(frob(&p.as_matrix().sub(pp.as_matrix())) <= 1e-10 * (1.0 + frob(p.as_matrix())));
        prop_assert!(eig_hermitian(&p).min() >= -1e-10 * (1.0 + hermitian_norm(&h)));
    }

    #[test]
    fn eigen_reconstruction(n in 1usize..9, seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let h = random_hermitian(n, seed, scale);
        let e = eig_hermitian(&h);
        let back = e.reconstruct_with(|x| x);
        let hf = frob(h.as_matrix());
        prop_assert!(frob(&h.as_matrix().sub(&back)) <= 1e-9 * (1.0 + hf));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    /// Constraints read off a planted PSD witness are satisfiable.
    #[test]
    fn planted_feasibility(n in 1usize..4, blocks in 1usize..3, k in 1usize..6, seed in any::<u64>()) {
        let mut rng = XorShiftRng::new(seed);
        let witness: Vec<ComplexMatrix<f64>> = (0..blocks)
            .map(|_| {
                let a = ComplexMatrix::<f64>::from_fn(n, n, |_, _| rng.complex());
                a.adjoint_mul(&a).add(&ComplexMatrix::identity(n).scale_real(0.1))
            })
            .collect();
        let mut p = AffinePSDProblem::new(vec![n; blocks]);
        for _ in 0..k {
            let mut coeffs = Vec::new();
            let mut rhs = 0.0;
            for w in &witness {
                let g = HermitianMatrix::from_hermitian_part(&ComplexMatrix::<f64>::from_fn(n, n, |_, _| rng.complex()));
                let a = functional(g.as_matrix());
                rhs += a.iter().zip(hvec(w)).map(|(x, y)| x * y).sum::<f64>();
                coeffs.extend(a);
            }
            p.push(coeffs, rhs);
        }
        let tol = 1e-7;
        let r = solve_feasibility(&p, tol, DEFAULT_MAX_ITER).unwrap();
        prop_assert!(r.is_feasible(), "status {:?}", r.status);
        prop_assert!(r.residual <= tol);
        for b in r.witness.unwrap() {
            prop_assert!(eig_hermitian(&b).min() >= -1e-9);
        }
    }

    /// Bisection against a brute-force scan at step `tol/10`.
    #[test]
    fn bisection_matches_scan(threshold in -5.0f64..5.0, tol in 1e-4f64..1e-2, above in any::<bool>()) {
        let (lo, hi) = (-6.0, 6.0);
        let dir = if above { Direction::FeasibleAbove } else { Direction::FeasibleBelow };
        let pred = |t: f64| if above { t >= threshold } else { t <= threshold };
        let b = bisect_optimal(|t| Ok(pred(t)), lo, hi, tol, dir).unwrap();
        let step = tol / 10.0;
        let steps = ((hi - lo) / step).ceil() as usize;
        let scan: Vec<f64> = (0..=steps).map(|i| lo + i as f64 * step).filter(|t| pred(*t)).collect();
        let edge = if above { scan[0] } else { *scan.last().unwrap() };
        prop_assert!(pred(b.value));
        prop_assert!((b.value - edge).abs() <= tol, "{} vs {}", b.value, edge);
    }
}
