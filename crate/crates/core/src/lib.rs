//! Affine LPV state-space models and linear fractional representations:
//! conversion in both directions, minimality and minimization, formal and
//! input-output equivalence, isomorphism search, and time-domain simulation.
//!
//! ```
//! use lpvlfr::{example1, is_minimal_lfr, lfr_to_alpv, lpv_to_lfr_mr, RankTolerance};
//!
//! let tol = RankTolerance::default();
//! let sigma = example1::alpv_sigma();
//! let lfr = lpv_to_lfr_mr(&sigma, &tol).unwrap();
//! assert_eq!(lfr.block_sizes(), &[2, 2]);
//! assert!(is_minimal_lfr(&lfr, &tol).is_minimal());
//! let back = lfr_to_alpv(&lfr, &tol).unwrap();
//! assert!(back.max_deviation(&sigma).unwrap() < 1e-10);
//! ```

pub mod alpv;
pub mod error;
pub mod example1;
pub mod harness;
pub mod isomorphism;
pub mod lfr;
pub mod model;
pub mod numerics;
pub mod random;
pub mod simulation;
pub mod transform;

pub use alpv::{
    alpv_equivalence_horizon, alpv_io_equivalent, alpv_markov_table, alpv_obs_matrix, alpv_reach_matrix,
    compare_markov, find_alpv_isomorphism, is_minimal_alpv, markov_parameter, minimize_alpv, simulate_alpv,
    MarkovTable, MinimizationReport, Minimality, SeriesComparison,
};
pub use error::{Error, Result};
pub use harness::{
    identifiability_falsify, theorem_harness, ClauseVerdict, HarnessReport, IdentifiabilityReport, Model,
    ParametrizationSample,
};
pub use isomorphism::IsomorphismSearch;
pub use lfr::{
    compare_series, equivalent_to_lpv_lfr, find_lfr_isomorphism, formal_io_coeff, forbidden_word_check,
    is_lpv_lfr, is_minimal_lfr, lfr_equivalence_horizon, lfr_obs_matrices, lfr_reach_matrices, lfr_series_table,
    minimal_form_is_lpv_lfr, minimize_lfr,
};
pub use model::{
    apply_alpv_isomorphism, apply_lfr_isomorphism, assemble_lfr, canonical_partition, AlpvIsomorphism, AlpvModel,
    CanonicalPartition, InputSignal, LfrIsomorphism, LfrModel, ScheduleSignal, SeriesTable, Signal, Trajectory,
    Word,
};
pub use numerics::{full_rank_factorization, numerical_rank, Mat, RankTolerance, Vector};
pub use simulation::{simulate_lpv_lfr, truncated_star_series};
pub use transform::{
    lfr_formal_comparison, lfr_formally_equivalent, lfr_to_alpv, lpv_lfr_io_equivalent, lpv_to_lfr, lpv_to_lfr_mr,
    sequence_to_word, word_to_sequence,
};
