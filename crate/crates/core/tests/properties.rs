use lpvlfr::lfr::{compare_series, lfr_reach_matrices};
use lpvlfr::random::{self, AlpvDims};
use lpvlfr::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> RankTolerance {
    RankTolerance::default()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_sizes(rng: &mut ChaCha8Rng, d: usize) -> Vec<usize> {
    (0..d).map(|_| rng.random_range(0..=2)).collect()
}

/// A well-conditioned block-diagonal transformation.
fn random_iso(rng: &mut ChaCha8Rng, sizes: &[usize]) -> LfrIsomorphism {
    let blocks = sizes
        .iter()
        .map(|&n| Mat::identity(n, n) * 2.0 + random::gaussian(rng, n, n, 0.3))
        .collect();
    LfrIsomorphism::new(blocks, &tol()).expect("diagonally dominant")
}

/// An LFR with redundant states: an LPV-LFR, possibly padded with an
/// unreachable state per channel that still couples to the output.
fn padded_lpv_lfr(rng: &mut ChaCha8Rng, d: usize) -> LfrModel {
    let sizes = random_sizes(rng, d);
    let m = random::random_lpv_lfr(rng, 1, 1, &sizes);
    let mut part = canonical_partition(&m);
    let extra: Vec<usize> = (0..d).map(|_| rng.random_range(0..=1)).collect();
    let grow = |x: &Mat, r: usize, c: usize| {
        let mut out = Mat::zeros(x.nrows() + r, x.ncols() + c);
        out.view_mut((0, 0), x.shape()).copy_from(x);
        out
    };
    for i in 0..d {
        part.h[i] = grow(&part.h[i], 0, extra[i]);
        part.h[i].columns_mut(sizes[i], extra[i]).fill(1.0);
        part.g[i] = grow(&part.g[i], extra[i], 0);
        for j in 0..d {
            let mut f = grow(&part.f[i][j], extra[i], extra[j]);
            // junk feeds only junk; scheduling-to-scheduling junk is allowed
            // because nothing reaches it
            if extra[i] > 0 && extra[j] > 0 {
                f[(sizes[i], sizes[j])] = 0.7;
            }
            part.f[i][j] = f;
        }
        part.block_sizes[i] += extra[i];
    }
    assemble_lfr(&part, m.d()).expect("consistent shapes")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn series_is_invariant_under_isomorphism(seed in any::<u64>(), dense in any::<bool>()) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, 2);
        let m = if dense {
            let n: usize = sizes.iter().sum();
            LfrModel::new(
                sizes.clone(),
                random::gaussian(&mut r, n, n, 0.4),
                random::gaussian(&mut r, n, 2, 1.0),
                random::gaussian(&mut r, 1, n, 1.0),
                random::gaussian(&mut r, 1, 2, 1.0),
            ).unwrap()
        } else {
            random::random_lpv_lfr(&mut r, 1, 2, &sizes)
        };
        let image = apply_lfr_isomorphism(&m, &random_iso(&mut r, &sizes)).unwrap();
        let cmp = compare_series(&m, &image, 10, &tol()).unwrap();
        prop_assert!(cmp.max_deviation <= 1e-9 * cmp.scale.max(1.0), "{cmp:?}");
    }

    #[test]
    fn minimization_shrinks_preserves_and_is_idempotent(seed in any::<u64>(), d in 2usize..=3) {
        let mut r = rng(seed);
        let m = padded_lpv_lfr(&mut r, d);
        let (min, report) = minimize_lfr(&m, &tol()).unwrap();
        prop_assert!(report.minimal <= report.reachable && report.reachable <= report.original);
        prop_assert!(is_minimal_lfr(&min, &tol()).is_minimal());
        let horizon = m.dim() + min.dim();
        let cmp = compare_series(&m, &min, horizon, &tol()).unwrap();
        prop_assert!(cmp.max_deviation <= 1e-8 * cmp.scale.max(1.0), "{cmp:?}");
        let (again, _) = minimize_lfr(&min, &tol()).unwrap();
        prop_assert_eq!(again.block_sizes(), min.block_sizes());
        prop_assert!(find_lfr_isomorphism(&min, &again, &tol()).unwrap().is_found());
    }

    #[test]
    fn lpv_lfr_forbidden_coefficients_are_exactly_zero(seed in any::<u64>(), d in 2usize..=4) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, d);
        let m = random::random_lpv_lfr(&mut r, 2, 1, &sizes);
        for (w, c) in &lfr_series_table(&m, 5).coefficients {
            if w.has_adjacent_scheduling_letters() {
                prop_assert!(c.iter().all(|&v| v == 0.0), "word {w}");
            }
        }
    }

    #[test]
    fn structure_deciders_agree(seed in any::<u64>(), d in 2usize..=3, planted in any::<bool>()) {
        let mut r = rng(seed);
        let m = if planted {
            let mut sizes = random_sizes(&mut r, d);
            sizes[1] = sizes[1].max(1);
            random::random_lfr_with_forbidden_coefficient(&mut r, 1, 1, &sizes)
        } else {
            padded_lpv_lfr(&mut r, d)
        };
        let series = equivalent_to_lpv_lfr(&m, &tol());
        prop_assert_eq!(series, minimal_form_is_lpv_lfr(&m, &tol()).unwrap());
        prop_assert_eq!(series, !planted);
    }

    #[test]
    fn reach_ranks_are_nondecreasing(seed in any::<u64>(), d in 1usize..=3) {
        let mut r = rng(seed);
        let sizes = random_sizes(&mut r, d);
        let m = random::random_lpv_lfr(&mut r, 1, 1, &sizes);
        let mut prev = vec![0; d];
        for k in 0..5 {
            let ranks: Vec<usize> = lfr_reach_matrices(&m, k)
                .iter()
                .map(|x| numerical_rank(x, &tol()).unwrap())
                .collect();
            for i in 0..d {
                prop_assert!(ranks[i] >= prev[i] && ranks[i] <= sizes[i]);
            }
            prev = ranks;
        }
    }

    #[test]
    fn alpv_minimization_is_equivalent_and_minimal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = AlpvDims::sample(&mut r, 2, 2, 2);
        let base = random::random_alpv(&mut r, dims);
        let padded = random::pad_alpv(&mut r, &base, random::Redundancy::Unreachable, 1);
        let (min, report) = minimize_alpv(&padded, &tol()).unwrap();
        prop_assert!(report.minimal <= base.nx());
        prop_assert!(is_minimal_alpv(&min, &tol()).is_minimal());
        prop_assert!(alpv_io_equivalent(&padded, &min, &tol()).unwrap());
    }

    #[test]
    fn series_prefix_is_stable_and_causal(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = AlpvDims::sample(&mut r, 2, 3, 2);
        let sigma = random::random_alpv(&mut r, dims);
        let m = lpv_to_lfr_mr(&sigma, &tol()).unwrap();
        let len = 6;
        let u = random::random_signal(&mut r, sigma.nu(), len, 1.0);
        let p = random::random_signal(&mut r, sigma.np(), len, 0.5);
        let short = truncated_star_series(&m, &u, &p, 7, &tol()).unwrap();
        let long = truncated_star_series(&m, &u, &p, 13, &tol()).unwrap();
        for t in 0..=3 {
            prop_assert!((short.at(t) - long.at(t)).amax() <= 1e-9);
        }

        let t0 = 3;
        let mut samples = u.samples().to_vec();
        samples[t0] += Vector::from_element(sigma.nu(), 1.0);
        let bumped = Signal::new(sigma.nu(), samples).unwrap();
        let before = [
            simulate_alpv(&sigma, &u, &p, None).unwrap().y,
            simulate_lpv_lfr(&m, &u, &p, &tol()).unwrap(),
            long,
        ];
        let after = [
            simulate_alpv(&sigma, &bumped, &p, None).unwrap().y,
            simulate_lpv_lfr(&m, &bumped, &p, &tol()).unwrap(),
            truncated_star_series(&m, &bumped, &p, 13, &tol()).unwrap(),
        ];
        for (b, a) in before.iter().zip(&after) {
            for t in 0..t0 {
                prop_assert_eq!(b.at(t), a.at(t));
            }
        }
    }

    #[test]
    fn sequence_word_correspondence(seq in prop::collection::vec(0usize..=3, 1..6)) {
        let w = sequence_to_word(&seq, 3).unwrap();
        prop_assert!(!w.has_adjacent_scheduling_letters());
        prop_assert_eq!(word_to_sequence(&w), Some(seq));
    }

    #[test]
    fn round_trip_and_dimension_formula(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dims = AlpvDims::sample(&mut r, 3, 4, 2);
        let sigma = random::random_alpv(&mut r, dims);
        let m = lpv_to_lfr_mr(&sigma, &tol()).unwrap();
        let ranks: usize = (1..=sigma.np())
            .map(|i| numerical_rank(&sigma.coefficient_stack(i), &tol()).unwrap())
            .sum();
        prop_assert_eq!(m.dim(), sigma.nx() + ranks);
        prop_assert!(lfr_to_alpv(&m, &tol()).unwrap().max_deviation(&sigma).unwrap() <= 1e-10);
    }
}

#[test]
fn admissible_words_are_exactly_the_images_of_sequences() {
    // a word with c ones comes from a sequence of length c + 1, so sequences
    // of length <= 5 cover every word of length <= 4
    let np: usize = 2;
    let images: std::collections::BTreeSet<Word> = (1..=5usize)
        .flat_map(|k| {
            (0..(np + 1).pow(k as u32)).map(move |code| {
                let seq: Vec<usize> = (0..k).map(|i| code / (np + 1).pow(i as u32) % (np + 1)).collect();
                sequence_to_word(&seq, np).unwrap()
            })
        })
        .collect();
    for w in Word::all_up_to(np + 1, 4) {
        assert_eq!(images.contains(&w), !w.has_adjacent_scheduling_letters(), "word {w}");
    }
}
