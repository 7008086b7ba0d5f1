//! The motivating two-state, one-parameter example: an ALPV and three LFRs
//! computed from it (two inflated ones of dimension 5 and one of
//! dimension 4, the latter printed to four significant digits).

use crate::model::{AlpvModel, LfrModel};
use crate::numerics::Mat;

fn m(rows: usize, cols: usize, data: &[f64]) -> Mat {
    Mat::from_row_slice(rows, cols, data)
}

/// `np = 1, nx = 2, nu = ny = 1`.
pub fn alpv_sigma() -> AlpvModel {
    AlpvModel::new(
        vec![m(2, 2, &[1.0, 0.0, 0.0, 0.2]), m(2, 2, &[0.0, 2.0, 1.0, 1.0])],
        vec![m(2, 1, &[1.0, 0.0]), m(2, 1, &[0.0, 1.0])],
        vec![m(1, 2, &[1.0, 0.0]), m(1, 2, &[0.0, 1.0])],
        vec![Mat::zeros(1, 1), Mat::zeros(1, 1)],
    )
    .expect("example model is well formed")
}

/// Dimension-5 LFR with blocks `{2, 3}`.
pub fn lfr_m() -> LfrModel {
    #[rustfmt::skip]
    let a = m(5, 5, &[
        1.0, 0.0, 1.0, 0.0, 1.0,
        0.0, 0.2, 1.0, 0.0, 0.0,
        1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 2.0, 0.0, 0.0, 0.0,
        -1.0, 1.0, 0.0, 0.0, 0.0,
    ]);
    LfrModel::new(
        vec![2, 3],
        a,
        m(5, 1, &[1.0, 0.0, 1.0, 200.0, -1.0]),
        m(1, 5, &[1.0, 0.0, 0.5, 0.0, 0.5]),
        Mat::zeros(1, 1),
    )
    .expect("example model is well formed")
}

/// Second dimension-5 LFR, formally equivalent to [`lfr_m`]. It is in fact
/// isomorphic to [`lfr_m`] (second block of `T` has determinant -0.005).
pub fn lfr_m_tilde() -> LfrModel {
    #[rustfmt::skip]
    let a = m(5, 5, &[
        1.0, 0.0, 0.0, 1.0, 0.0,
        0.0, 0.2, 1.0, 0.0, 0.0,
        1.0, 1.0, 0.0, 0.0, 0.0,
        0.0, 2.0, 0.0, 0.0, 0.0,
        0.0, -2.0, 0.0, 0.0, 0.0,
    ]);
    LfrModel::new(
        vec![2, 3],
        a,
        m(5, 1, &[1.0, 0.0, 1.0, 0.0, 1.0]),
        m(1, 5, &[1.0, 0.0, 0.0, 0.5, 0.0]),
        Mat::zeros(1, 1),
    )
    .expect("example model is well formed")
}

/// Dimension-4 LFR with blocks `{2, 2}`, entries rounded to four digits.
pub fn lfr_m_hat() -> LfrModel {
    #[rustfmt::skip]
    let a = m(4, 4, &[
        1.0, 0.0, -1.196, 0.5429,
        0.0, 0.2, -0.8668, -0.9364,
        -0.3413, -1.519, 0.0, 0.0,
        -0.752, 0.338, 0.0, 0.0,
    ]);
    LfrModel::new(
        vec![2, 2],
        a,
        m(4, 1, &[1.0, 0.0, -0.3413, -0.752]),
        m(1, 4, &[1.0, 0.0, -0.598, 0.2714]),
        Mat::zeros(1, 1),
    )
    .expect("example model is well formed")
}

/// Tolerance matching the four-digit rounding of [`lfr_m_hat`].
pub const PRINTED_PRECISION_TOL: f64 = 5e-3;
