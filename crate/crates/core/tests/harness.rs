use lpvlfr::harness::alpv_isomorphic;
use lpvlfr::random::{self, AlpvDims, Redundancy};
use lpvlfr::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tol() -> RankTolerance {
    RankTolerance::default()
}

#[test]
fn planted_alpv_isomorphism_transfers_to_mr_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let sigma = random::random_alpv(&mut rng, AlpvDims { np: 2, nx: 3, nu: 1, ny: 2 });
        let t = Mat::identity(3, 3) * 2.0 + random::gaussian(&mut rng, 3, 3, 0.5);
        let image = apply_alpv_isomorphism(&sigma, &AlpvIsomorphism::new(t, &tol()).unwrap()).unwrap();
        let report = theorem_harness(&sigma, &image, &tol()).unwrap();
        assert!(report.all_pass(), "{:#?}", report.clauses);
        assert!(find_lfr_isomorphism(&report.m1, &report.m2, &tol()).unwrap().is_found());
    }
}

#[test]
fn independent_models_are_inequivalent_on_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let dims = AlpvDims { np: 1, nx: 2, nu: 1, ny: 1 };
    let (s1, s2) = (random::random_alpv(&mut rng, dims), random::random_alpv(&mut rng, dims));
    let report = theorem_harness(&s1, &s2, &tol()).unwrap();
    assert!(report.all_pass(), "{:#?}", report.clauses);
    assert!(report.clause("mr.equivalence").unwrap().detail.ends_with("false vs false"));
}

#[test]
fn padded_models_keep_every_clause() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kind in [Redundancy::Unreachable, Redundancy::Unobservable, Redundancy::Duplicated] {
        let sigma = random::random_alpv(&mut rng, AlpvDims { np: 2, nx: 2, nu: 1, ny: 1 });
        let padded = random::pad_alpv(&mut rng, &sigma, kind, 2);
        let report = theorem_harness(&sigma, &padded, &tol()).unwrap();
        assert!(!report.any_fail(), "{kind:?}: {:#?}", report.clauses);
        assert_eq!(alpv_isomorphic(&sigma, &padded, &tol()).unwrap(), harness::Isomorphic::No);
    }
}
