use opsysdual::corpus::{corpus, parse_system_spec, random_system};
use opsysdual::numkernel::ComplexMatrix;
use opsysdual::opsys::make_system;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_systems_validate(seed in any::<u64>(), d in 1usize..5, k in 0usize..16, unital in any::<bool>()) {
        let max = d * d - usize::from(unital);
        let r = random_system(seed, d, k, unital);
        if k > max || k + usize::from(unital) == 0 {
            prop_assert!(r.is_err());
            return Ok(());
        }
        let sys = r.unwrap();
        prop_assert_eq!(sys.ambient_dim(), d);
        let has_unit = sys.contains(&ComplexMatrix::identity(d));
        prop_assert_eq!(sys.is_unital(), unital || has_unit);
        prop_assert!(sys.dim() <= k + usize::from(unital));
        let again = make_system(sys.basis(), sys.is_unital(), sys.label()).unwrap();
        prop_assert_eq!(again.dim(), sys.dim());
        for b in sys.basis() {
            prop_assert!(sys.contains(&b.adjoint()));
        }
        let same = random_system(seed, d, k, unital).unwrap();
        prop_assert_eq!(same.basis(), sys.basis());
    }
}

#[test]
fn corpus_matches_expectations() {
    let entries = corpus().unwrap();
    assert_eq!(entries.len(), 12);
    for e in &entries {
        if let Some(u) = e.expected.unital {
            assert_eq!(e.system.is_unital(), u, "{}", e.label());
        }
        if let Some(d) = e.expected.dim {
            assert_eq!(e.system.dim(), d, "{}", e.label());
        }
        let again = make_system(e.system.basis(), e.system.is_unital(), e.label()).unwrap();
        assert_eq!(again.dim(), e.system.dim());
    }
}

#[test]
fn bad_specs_are_rejected() {
    for spec in [
        "",
        "linfty",
        "linfty:x",
        "linfty:0",
        "m:0",
        "random:1:2:9",
        "nope:3",
        "graph:3:0-7",
    ] {
        assert!(parse_system_spec(spec).is_err(), "{spec}");
    }
}
