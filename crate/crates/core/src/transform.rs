//! ALPV <-> LPV-LFR transformations and the equivalence deciders built on them.

use crate::alpv::{alpv_io_equivalent, SeriesComparison};
use crate::error::{Error, Result};
use crate::lfr::{compare_series, is_lpv_lfr, lfr_equivalence_horizon, scheduling_coupling_magnitude};
use crate::model::{assemble_lfr, canonical_partition, AlpvModel, CanonicalPartition, LfrModel, Word};
use crate::numerics::{full_rank_factorization, hstack, max_abs, vstack, Mat, RankTolerance};

/// Build an LPV-LFR from `Σ` and one factor pair `(L_i, R_i)` per scheduling
/// coordinate with `L_i R_i = [A_i B_i; C_i D_i]`.
///
/// Channel 1 carries `(A_0, B_0, C_0)`; channel `i + 1` has one state per
/// column of `L_i`, with `[F_{1,i+1}; H_{i+1}] = L_i` and
/// `[F_{i+1,1}, G_{i+1}] = R_i`.
pub fn lpv_to_lfr(sigma: &AlpvModel, factors: &[(Mat, Mat)], tol: &RankTolerance) -> Result<LfrModel> {
    let (nx, nu, ny, np) = (sigma.nx(), sigma.nu(), sigma.ny(), sigma.np());
    if factors.len() != np {
        return Err(Error::Structure(format!(
            "{} factor pairs supplied for {np} scheduling coordinates",
            factors.len()
        )));
    }
    let mut sizes = vec![nx];
    for (i, (l, r)) in factors.iter().enumerate() {
        let k = l.ncols();
        if l.nrows() != nx + ny || r.shape() != (k, nx + nu) {
            return Err(Error::Structure(format!(
                "factor pair {} has shapes {}x{} and {}x{}, expected {}xk and kx{}",
                i + 1,
                l.nrows(),
                l.ncols(),
                r.nrows(),
                r.ncols(),
                nx + ny,
                nx + nu
            )));
        }
        let target = sigma.coefficient_stack(i + 1);
        let residual = max_abs(&(l * r - &target));
        if !tol.negligible(residual, max_abs(&target)) {
            return Err(Error::FactorMismatch { index: i + 1, residual });
        }
        sizes.push(k);
    }
    let d = np + 1;
    let mut f: Vec<Vec<Mat>> = sizes
        .iter()
        .map(|&ni| sizes.iter().map(|&nj| Mat::zeros(ni, nj)).collect())
        .collect();
    let mut h = vec![sigma.c()[0].clone()];
    let mut g = vec![sigma.b()[0].clone()];
    f[0][0] = sigma.a()[0].clone();
    for (i, (l, r)) in factors.iter().enumerate() {
        let c = i + 1;
        let k = sizes[c];
        f[0][c] = l.view((0, 0), (nx, k)).into_owned();
        h.push(l.view((nx, 0), (ny, k)).into_owned());
        f[c][0] = r.view((0, 0), (k, nx)).into_owned();
        g.push(r.view((0, nx), (k, nu)).into_owned());
    }
    debug_assert_eq!(h.len(), d);
    assemble_lfr(
        &CanonicalPartition {
            outputs: ny,
            inputs: nu,
            block_sizes: sizes,
            h,
            f,
            g,
        },
        &sigma.d()[0],
    )
}

/// Full-rank factor pairs of every stacked `[A_i B_i; C_i D_i]`, `i >= 1`.
pub fn mr_factors(sigma: &AlpvModel, tol: &RankTolerance) -> Result<Vec<(Mat, Mat)>> {
    (1..=sigma.np())
        .map(|i| full_rank_factorization(&sigma.coefficient_stack(i), tol))
        .collect()
}

/// [`lpv_to_lfr`] with full-rank factorizations, which gives channel
/// `i + 1` the size `rank [A_i B_i; C_i D_i]`.
pub fn lpv_to_lfr_mr(sigma: &AlpvModel, tol: &RankTolerance) -> Result<LfrModel> {
    let factors = mr_factors(sigma, tol)?;
    lpv_to_lfr(sigma, &factors, tol)
}

/// The ALPV read off an LPV-LFR: `A_0 = F_{1,1}`, `B_0 = G_1`, `C_0 = H_1`,
/// `D_0 = D` and `[A_i B_i; C_i D_i] = [F_{1,i+1}; H_{i+1}] [F_{i+1,1}, G_{i+1}]`.
///
/// A single-channel LFR is accepted and yields an `np = 0` model.
pub fn lfr_to_alpv(model: &LfrModel, tol: &RankTolerance) -> Result<AlpvModel> {
    ensure_lpv_lfr(model, tol)?;
    let part = canonical_partition(model);
    let (nx, nu, ny) = (part.block_sizes[0], part.inputs, part.outputs);
    let mut a = vec![part.f[0][0].clone()];
    let mut b = vec![part.g[0].clone()];
    let mut c = vec![part.h[0].clone()];
    let mut d = vec![model.d().clone()];
    for ch in 1..part.channels() {
        let left = vstack(part.block_sizes[ch], &[&part.f[0][ch], &part.h[ch]]);
        let right = hstack(part.block_sizes[ch], &[&part.f[ch][0], &part.g[ch]]);
        let stack = left * right;
        a.push(stack.view((0, 0), (nx, nx)).into_owned());
        b.push(stack.view((0, nx), (nx, nu)).into_owned());
        c.push(stack.view((nx, 0), (ny, nx)).into_owned());
        d.push(stack.view((nx, nx), (ny, nu)).into_owned());
    }
    AlpvModel::with_dims(nx, nu, ny, a, b, c, d)
}

/// Accepts LPV-LFRs and single-channel LFRs.
pub(crate) fn ensure_lpv_lfr(model: &LfrModel, tol: &RankTolerance) -> Result<()> {
    if model.channels() == 1 || is_lpv_lfr(model, tol) {
        return Ok(());
    }
    Err(Error::NotLpvLfr(format!(
        "scheduling-to-scheduling blocks F_ij (i, j > 1) reach {:.3e}",
        scheduling_coupling_magnitude(model)
    )))
}

/// Series comparison up to [`lfr_equivalence_horizon`].
pub fn lfr_formal_comparison(m1: &LfrModel, m2: &LfrModel, tol: &RankTolerance) -> Result<SeriesComparison> {
    let horizon = lfr_equivalence_horizon(m1, m2, tol)?;
    compare_series(m1, m2, horizon, tol)
}

/// Equality of the formal input-output maps.
pub fn lfr_formally_equivalent(m1: &LfrModel, m2: &LfrModel, tol: &RankTolerance) -> Result<bool> {
    Ok(lfr_formal_comparison(m1, m2, tol)?.equivalent)
}

/// Input-output equivalence of the ALPVs corresponding to two LPV-LFRs.
pub fn lpv_lfr_io_equivalent(m1: &LfrModel, m2: &LfrModel, tol: &RankTolerance) -> Result<bool> {
    if m1.signature() != m2.signature() {
        return Err(Error::Dimension(format!(
            "(p, m, d) = {:?} vs {:?}",
            m1.signature(),
            m2.signature()
        )));
    }
    alpv_io_equivalent(&lfr_to_alpv(m1, tol)?, &lfr_to_alpv(m2, tol)?, tol)
}

/// The LFR word whose coefficient equals the Markov parameter of the index
/// sequence `(j_1, .., j_k)`: `φ(j_1) 1 φ(j_2) 1 .. 1 φ(j_k)` with `φ(0) = ε`
/// and `φ(j) = j + 1`.
pub fn sequence_to_word(seq: &[usize], np: usize) -> Result<Word> {
    if seq.is_empty() {
        return Err(Error::Dimension("index sequences are nonempty".into()));
    }
    let mut letters = Vec::with_capacity(2 * seq.len());
    for (pos, &j) in seq.iter().enumerate() {
        if j > np {
            return Err(Error::LetterOutOfRange { letter: j, alphabet: np });
        }
        if pos > 0 {
            letters.push(1);
        }
        if j > 0 {
            letters.push(j + 1);
        }
    }
    Word::new(letters, np + 1)
}

/// Inverse of [`sequence_to_word`]; `None` for words with two adjacent letters > 1.
pub fn word_to_sequence(w: &Word) -> Option<Vec<usize>> {
    w.letters()
        .split(|&l| l == 1)
        .map(|seg| match seg {
            [] => Some(0),
            [l] => Some(l - 1),
            _ => None,
        })
        .collect()
}
