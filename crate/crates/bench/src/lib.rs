//! Seeded fixtures shared by the benchmarks.

use lpvlfr::random::{self, AlpvDims};
use lpvlfr::{AlpvModel, LfrModel, RankTolerance, Signal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn tol() -> RankTolerance {
    RankTolerance::default()
}

/// Random ALPV with `np` parameters and `nx` states, single input and output.
pub fn alpv(np: usize, nx: usize) -> AlpvModel {
    random::random_alpv(&mut rng(1000 + (np * 31 + nx) as u64), AlpvDims { np, nx, nu: 1, ny: 1 })
}

/// Its MR transform plus a copy padded with unreachable states.
pub fn lfr_pair(np: usize, nx: usize) -> (LfrModel, LfrModel) {
    let mut r = rng(2000 + (np * 31 + nx) as u64);
    let sigma = random::random_alpv(&mut r, AlpvDims { np, nx, nu: 1, ny: 1 });
    let padded = random::pad_alpv(&mut r, &sigma, random::Redundancy::Unreachable, 2);
    let tol = tol();
    (
        lpvlfr::lpv_to_lfr_mr(&sigma, &tol).expect("random models convert"),
        lpvlfr::lpv_to_lfr_mr(&padded, &tol).expect("random models convert"),
    )
}

/// Input and schedule signals of length `len`.
pub fn signals(nu: usize, np: usize, len: usize) -> (Signal, Signal) {
    let mut r = rng(3000 + len as u64);
    (random::random_signal(&mut r, nu, len, 1.0), random::random_signal(&mut r, np, len, 0.5))
}
