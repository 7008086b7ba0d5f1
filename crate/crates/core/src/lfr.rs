//! Formal input-output maps, reachability/observability, minimality,
//! minimization, isomorphism and LPV structure tests for LFRs.
//!
//! Channel indices are 0-based internally; words use letters `1..=d`.

use crate::alpv::{Minimality, MinimizationReport, SeriesComparison};
use crate::error::{Error, Result};
use crate::isomorphism::{search_affine, IsomorphismSearch};
use crate::model::{
    assemble_lfr, block_diagonal, block_offsets, canonical_partition, CanonicalPartition, LfrIsomorphism, LfrModel,
    SeriesTable, Word,
};
use crate::numerics::{
    column_space_basis, hstack, kron, max_abs, solve_right, vec_of, vstack, LinearConstraints, Mat, RankTolerance,
    Vector,
};

/// `Y_M(ε) = D`, `Y_M(i_1 .. i_k) = H_{i_k} F_{i_k,i_{k-1}} .. F_{i_2,i_1} G_{i_1}`.
pub fn formal_io_coeff(model: &LfrModel, w: &Word) -> Result<Mat> {
    let d = model.channels();
    if let Some(&bad) = w.letters().iter().find(|&&l| l == 0 || l > d) {
        return Err(Error::LetterOutOfRange { letter: bad, alphabet: d });
    }
    let part = canonical_partition(model);
    let letters = w.letters();
    let Some((&first, rest)) = letters.split_first() else {
        return Ok(model.d().clone());
    };
    let mut x = part.g[first - 1].clone();
    let mut at = first - 1;
    for &l in rest {
        x = &part.f[l - 1][at] * x;
        at = l - 1;
    }
    Ok(&part.h[at] * x)
}

/// Depth-first walk over all nonempty words of length `<= horizon`,
/// propagating `F .. G` per model so each word costs one block product.
pub(crate) fn walk_words<F>(parts: &[&CanonicalPartition], horizon: usize, mut visit: F)
where
    F: FnMut(&[usize], &[Mat]),
{
    fn rec<F: FnMut(&[usize], &[Mat])>(
        parts: &[&CanonicalPartition],
        word: &mut Vec<usize>,
        states: Vec<Mat>,
        horizon: usize,
        visit: &mut F,
    ) {
        let at = *word.last().expect("nonempty") - 1;
        let outs: Vec<Mat> = parts.iter().zip(&states).map(|(p, x)| &p.h[at] * x).collect();
        visit(word, &outs);
        if word.len() >= horizon {
            return;
        }
        for next in 0..parts[0].channels() {
            let ns: Vec<Mat> = parts.iter().zip(&states).map(|(p, x)| &p.f[next][at] * x).collect();
            word.push(next + 1);
            rec(parts, word, ns, horizon, visit);
            word.pop();
        }
    }
    if horizon == 0 {
        return;
    }
    for first in 0..parts[0].channels() {
        let states: Vec<Mat> = parts.iter().map(|p| p.g[first].clone()).collect();
        let mut word = vec![first + 1];
        rec(parts, &mut word, states, horizon, &mut visit);
    }
}

/// Every coefficient of `Y_M` on words of length `<= horizon`.
pub fn lfr_series_table(model: &LfrModel, horizon: usize) -> SeriesTable {
    let part = canonical_partition(model);
    let mut coefficients = std::collections::BTreeMap::new();
    coefficients.insert(Word::empty(), model.d().clone());
    walk_words(&[&part], horizon, |w, outs| {
        coefficients.insert(
            Word::new(w.to_vec(), part.channels()).expect("walk stays in alphabet"),
            outs[0].clone(),
        );
    });
    SeriesTable {
        outputs: model.outputs(),
        inputs: model.inputs(),
        alphabet: model.channels(),
        horizon,
        coefficients,
    }
}

fn check_signature(m1: &LfrModel, m2: &LfrModel) -> Result<()> {
    if m1.signature() != m2.signature() {
        return Err(Error::Dimension(format!(
            "(p, m, d) = {:?} vs {:?}",
            m1.signature(),
            m2.signature()
        )));
    }
    Ok(())
}

/// Coefficientwise comparison of two formal input-output maps on all words
/// of length `<= horizon`.
pub fn compare_series(m1: &LfrModel, m2: &LfrModel, horizon: usize, tol: &RankTolerance) -> Result<SeriesComparison> {
    check_signature(m1, m2)?;
    let (p1, p2) = (canonical_partition(m1), canonical_partition(m2));
    let mut dev = max_abs(&(m1.d() - m2.d()));
    let mut scale = max_abs(m1.d()).max(max_abs(m2.d()));
    let mut compared = 1;
    walk_words(&[&p1, &p2], horizon, |_, outs| {
        dev = dev.max(max_abs(&(&outs[0] - &outs[1])));
        scale = scale.max(max_abs(&outs[0])).max(max_abs(&outs[1]));
        compared += 1;
    });
    Ok(SeriesComparison {
        horizon,
        compared,
        max_deviation: dev,
        scale,
        equivalent: tol.negligible(dev, scale),
    })
}

/// `R^i_0 = G_i`, `R^i_{k+1} = [G_i, F_{i,1} R^1_k, .., F_{i,d} R^d_k]`.
pub fn lfr_reach_matrices(model: &LfrModel, k: usize) -> Vec<Mat> {
    let part = canonical_partition(model);
    let mut r = part.g.clone();
    for _ in 0..k {
        r = (0..part.channels())
            .map(|i| {
                let mut blocks = vec![part.g[i].clone()];
                blocks.extend((0..part.channels()).map(|j| &part.f[i][j] * &r[j]));
                hstack(part.block_sizes[i], &blocks.iter().collect::<Vec<_>>())
            })
            .collect();
    }
    r
}

/// `O^i_0 = H_i`, `O^i_{k+1} = [H_i; O^1_k F_{1,i}; ..; O^d_k F_{d,i}]`.
pub fn lfr_obs_matrices(model: &LfrModel, k: usize) -> Vec<Mat> {
    let part = canonical_partition(model);
    let mut o = part.h.clone();
    for _ in 0..k {
        o = (0..part.channels())
            .map(|i| {
                let mut blocks = vec![part.h[i].clone()];
                blocks.extend((0..part.channels()).map(|j| &o[j] * &part.f[j][i]));
                vstack(part.block_sizes[i], &blocks.iter().collect::<Vec<_>>())
            })
            .collect();
    }
    o
}

/// Per-channel limit subspaces of the reachability (or observability)
/// recursion, iterated until no channel's rank changes for one step.
#[derive(Debug, Clone)]
pub struct ChannelSpaces {
    pub bases: Vec<Mat>,
    /// `ranks[k][i] = rank R^i_k`.
    pub ranks: Vec<Vec<usize>>,
}

impl ChannelSpaces {
    /// First `k` at which every channel's rank equals its rank at `k + 1`.
    pub fn stabilized_at(&self) -> usize {
        self.ranks.len().saturating_sub(2)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.bases.iter().map(|b| b.ncols()).collect()
    }
}

fn channel_krylov(f: &[Vec<Mat>], g: &[Mat], sizes: &[usize], tol: &RankTolerance) -> ChannelSpaces {
    let d = sizes.len();
    let total: usize = sizes.iter().sum();
    let mut bases: Vec<Mat> = g.iter().map(|gi| column_space_basis(gi, tol)).collect();
    let mut ranks = vec![bases.iter().map(|b| b.ncols()).collect::<Vec<_>>()];
    loop {
        let next: Vec<Mat> = (0..d)
            .map(|i| {
                let mut blocks = vec![g[i].clone()];
                blocks.extend((0..d).map(|j| &f[i][j] * &bases[j]));
                column_space_basis(&hstack(sizes[i], &blocks.iter().collect::<Vec<_>>()), tol)
            })
            .collect();
        let next_ranks: Vec<usize> = next.iter().map(|b| b.ncols()).collect();
        let grew = next_ranks != *ranks.last().expect("nonempty");
        ranks.push(next_ranks);
        bases = next;
        if !grew || ranks.len() > total + 1 {
            break;
        }
    }
    ChannelSpaces { bases, ranks }
}

fn reach_spaces(part: &CanonicalPartition, tol: &RankTolerance) -> ChannelSpaces {
    channel_krylov(&part.f, &part.g, &part.block_sizes, tol)
}

fn obs_spaces(part: &CanonicalPartition, tol: &RankTolerance) -> ChannelSpaces {
    let d = part.channels();
    let ft: Vec<Vec<Mat>> = (0..d)
        .map(|i| (0..d).map(|j| part.f[j][i].transpose()).collect())
        .collect();
    let ht: Vec<Mat> = part.h.iter().map(|h| h.transpose()).collect();
    channel_krylov(&ft, &ht, &part.block_sizes, tol)
}

/// Limit column spaces of `R^i_k(M)`.
pub fn lfr_reachable_subspaces(model: &LfrModel, tol: &RankTolerance) -> ChannelSpaces {
    reach_spaces(&canonical_partition(model), tol)
}

/// Limit row spaces of `O^i_k(M)`, as column bases.
pub fn lfr_observable_subspaces(model: &LfrModel, tol: &RankTolerance) -> ChannelSpaces {
    obs_spaces(&canonical_partition(model), tol)
}

/// Reachable iff every `rank R^i_k = n_i` at the stabilized `k`; dually for observability.
pub fn is_minimal_lfr(model: &LfrModel, tol: &RankTolerance) -> Minimality {
    let sizes = model.block_sizes();
    Minimality::from_flags(
        lfr_reachable_subspaces(model, tol).dims() == sizes,
        lfr_observable_subspaces(model, tol).dims() == sizes,
    )
}

fn project_partition(part: &CanonicalPartition, bases: &[Mat]) -> CanonicalPartition {
    let d = part.channels();
    CanonicalPartition {
        outputs: part.outputs,
        inputs: part.inputs,
        block_sizes: bases.iter().map(|b| b.ncols()).collect(),
        h: (0..d).map(|i| &part.h[i] * &bases[i]).collect(),
        f: (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| bases[i].transpose() * &part.f[i][j] * &bases[j])
                    .collect()
            })
            .collect(),
        g: (0..d).map(|i| bases[i].transpose() * &part.g[i]).collect(),
    }
}

/// Per-channel restriction to the reachable subspaces followed by the
/// quotient by the unobservable ones.
pub fn minimize_lfr(model: &LfrModel, tol: &RankTolerance) -> Result<(LfrModel, MinimizationReport)> {
    let part = canonical_partition(model);
    let reach = reach_spaces(&part, tol);
    let restricted = project_partition(&part, &reach.bases);
    let obs = obs_spaces(&restricted, tol);
    let minimal = project_partition(&restricted, &obs.bases);
    let out = assemble_lfr(&minimal, model.d())?;
    let report = MinimizationReport {
        original: model.dim(),
        reachable: restricted.block_sizes.iter().sum(),
        minimal: out.dim(),
    };
    Ok((out, report))
}

fn joint_partition(m1: &LfrModel, m2: &LfrModel) -> CanonicalPartition {
    let (p1, p2) = (canonical_partition(m1), canonical_partition(m2));
    let d = p1.channels();
    CanonicalPartition {
        outputs: p1.outputs,
        inputs: p1.inputs,
        block_sizes: (0..d).map(|i| p1.block_sizes[i] + p2.block_sizes[i]).collect(),
        h: (0..d)
            .map(|i| hstack(p1.outputs, &[&p1.h[i], &(-&p2.h[i])]))
            .collect(),
        f: (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let mut blk = Mat::zeros(
                            p1.block_sizes[i] + p2.block_sizes[i],
                            p1.block_sizes[j] + p2.block_sizes[j],
                        );
                        blk.view_mut((0, 0), p1.f[i][j].shape()).copy_from(&p1.f[i][j]);
                        blk.view_mut((p1.block_sizes[i], p1.block_sizes[j]), p2.f[i][j].shape())
                            .copy_from(&p2.f[i][j]);
                        blk
                    })
                    .collect()
            })
            .collect(),
        g: (0..d)
            .map(|i| vstack(p1.inputs, &[&p1.g[i], &p2.g[i]]))
            .collect(),
    }
}

/// Word length up to which two formal input-output maps must agree for the
/// LFRs to be formally equivalent.
///
/// The difference LFR has dimension `N = dim M1 + dim M2`, so agreement on
/// words of length `<= N` suffices; the bound is tightened to `k + 1` when
/// the difference LFR's reachability recursion is already stable at `k`.
pub fn lfr_equivalence_horizon(m1: &LfrModel, m2: &LfrModel, tol: &RankTolerance) -> Result<usize> {
    check_signature(m1, m2)?;
    let joint = joint_partition(m1, m2);
    let spaces = reach_spaces(&joint, &tol.tightened());
    Ok((m1.dim() + m2.dim()).min(spaces.stabilized_at() + 1))
}

/// Max-abs residual of `T A = Ã T`, `T B = B̃`, `C = C̃ T`, `D = D̃`.
pub fn lfr_isomorphism_residual(m1: &LfrModel, m2: &LfrModel, t: &Mat) -> f64 {
    max_abs(&(t * m1.a() - m2.a() * t))
        .max(max_abs(&(t * m1.b() - m2.b())))
        .max(max_abs(&(m1.c() - m2.c() * t)))
        .max(max_abs(&(m1.d() - m2.d())))
}

fn lfr_magnitude(m: &LfrModel) -> f64 {
    max_abs(m.a()).max(max_abs(m.b())).max(max_abs(m.c())).max(max_abs(m.d()))
}

/// Search for a block-diagonal isomorphism from `m1` to `m2`.
pub fn find_lfr_isomorphism(
    m1: &LfrModel,
    m2: &LfrModel,
    tol: &RankTolerance,
) -> Result<IsomorphismSearch<LfrIsomorphism>> {
    check_signature(m1, m2)?;
    if m1.block_sizes() != m2.block_sizes() {
        return Err(Error::Dimension(format!(
            "block sizes {:?} and {:?} differ",
            m1.block_sizes(),
            m2.block_sizes()
        )));
    }
    let horizon = lfr_equivalence_horizon(m1, m2, tol)?;
    if !compare_series(m1, m2, horizon, tol)?.equivalent {
        return Ok(IsomorphismSearch::NotEquivalent);
    }
    let sizes = m1.block_sizes().to_vec();
    let scale = lfr_magnitude(m1).max(lfr_magnitude(m2));
    let acceptable = |res: f64| tol.negligible(res, scale);

    if is_minimal_lfr(m1, tol).is_minimal() && is_minimal_lfr(m2, tol).is_minimal() {
        let k = lfr_reachable_subspaces(m1, tol)
            .stabilized_at()
            .max(lfr_reachable_subspaces(m2, tol).stabilized_at());
        let (r1, r2) = (lfr_reach_matrices(m1, k), lfr_reach_matrices(m2, k));
        let blocks: Vec<Mat> = r1.iter().zip(&r2).map(|(a, b)| solve_right(a, b, tol)).collect();
        let residual = lfr_isomorphism_residual(m1, m2, &block_diagonal(&blocks));
        if !acceptable(residual) {
            return Ok(IsomorphismSearch::VerificationFailed { residual });
        }
        return Ok(match LfrIsomorphism::new(blocks, tol) {
            Ok(iso) => IsomorphismSearch::Found { iso, residual },
            Err(_) => IsomorphismSearch::VerificationFailed { residual },
        });
    }

    // Unknowns: entries of the diagonal blocks of T, column-major within the full n x n.
    let n = m1.dim();
    let off = block_offsets(&sizes);
    let mut positions = Vec::new();
    for (b, &nb) in sizes.iter().enumerate() {
        for c in 0..nb {
            for r in 0..nb {
                positions.push((off[b] + c) * n + off[b] + r);
            }
        }
    }
    let select = |full: &Mat| Mat::from_fn(full.nrows(), positions.len(), |i, k| full[(i, positions[k])]);
    let eye = Mat::identity(n, n);
    let mut sys = LinearConstraints::new(positions.len());
    sys.push(
        &select(&(kron(&m1.a().transpose(), &eye) - kron(&eye, m2.a()))),
        &Vector::zeros(n * n),
    );
    sys.push(&select(&kron(&m1.b().transpose(), &eye)), &vec_of(m2.b()));
    sys.push(&select(&kron(&Mat::identity(n, n), m2.c())), &vec_of(m1.c()));
    if !acceptable(max_abs(&(m1.d() - m2.d()))) {
        return Ok(IsomorphismSearch::Infeasible {
            residual: max_abs(&(m1.d() - m2.d())),
        });
    }
    search_affine(
        &sys,
        tol,
        |x| {
            let mut blocks = Vec::with_capacity(sizes.len());
            let mut at = 0;
            for &nb in &sizes {
                blocks.push(Mat::from_column_slice(nb, nb, &x.as_slice()[at..at + nb * nb]));
                at += nb * nb;
            }
            LfrIsomorphism::new(blocks, tol).ok()
        },
        |iso| {
            let res = lfr_isomorphism_residual(m1, m2, &iso.matrix());
            (res, acceptable(res))
        },
    )
}

/// Largest entry of the `F_{i,j}` blocks with `i, j > 1` (letters), i.e.
/// the blocks that must vanish in an LPV-LFR.
pub fn scheduling_coupling_magnitude(model: &LfrModel) -> f64 {
    let part = canonical_partition(model);
    let d = part.channels();
    let mut out = 0.0_f64;
    for i in 1..d {
        for j in 1..d {
            out = out.max(max_abs(&part.f[i][j]));
        }
    }
    out
}

/// `d > 1` and every `F_{i,j}` with `i, j > 1` is negligible.
pub fn is_lpv_lfr(model: &LfrModel, tol: &RankTolerance) -> bool {
    model.channels() > 1 && tol.negligible(scheduling_coupling_magnitude(model), max_abs(model.a()))
}

/// Result of testing `Y_M` on words with two adjacent letters both > 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ForbiddenWordCheck {
    pub horizon: usize,
    pub checked: usize,
    pub max_abs: f64,
    pub scale: f64,
    /// First word (in walk order) with the largest coefficient.
    pub witness: Option<Word>,
    pub holds: bool,
}

/// Word length bound for [`forbidden_word_check`]: `2 dim + 1`, tightened to
/// `k_r + k_o + 2` from the stabilization steps of the reachability and
/// observability recursions.
pub fn forbidden_word_horizon(model: &LfrModel, tol: &RankTolerance) -> usize {
    let part = canonical_partition(model);
    let tight = tol.tightened();
    let kr = reach_spaces(&part, &tight).stabilized_at();
    let ko = obs_spaces(&part, &tight).stabilized_at();
    (2 * model.dim() + 1).min(kr + ko + 2)
}

/// Check `Y_M(w) = 0` for every word up to the horizon in which two
/// adjacent letters both exceed 1.
pub fn forbidden_word_check(model: &LfrModel, tol: &RankTolerance) -> ForbiddenWordCheck {
    let horizon = forbidden_word_horizon(model, tol);
    let part = canonical_partition(model);
    let mut checked = 0;
    let mut worst = 0.0_f64;
    let mut scale = max_abs(model.d());
    let mut witness = None;
    walk_words(&[&part], horizon, |w, outs| {
        let v = max_abs(&outs[0]);
        scale = scale.max(v);
        if w.windows(2).any(|p| p[0] > 1 && p[1] > 1) {
            checked += 1;
            if v > worst {
                worst = v;
                witness = Some(Word::new(w.to_vec(), part.channels()).expect("in alphabet"));
            }
        }
    });
    ForbiddenWordCheck {
        horizon,
        checked,
        max_abs: worst,
        scale,
        witness,
        holds: tol.negligible(worst, scale),
    }
}

/// Whether `M` is formally equivalent to some LPV-LFR, decided by the
/// vanishing of `Y_M` on words with adjacent letters both > 1.
pub fn equivalent_to_lpv_lfr(model: &LfrModel, tol: &RankTolerance) -> bool {
    model.channels() > 1 && forbidden_word_check(model, tol).holds
}

/// The cross-check decider: minimize, then inspect the block structure.
pub fn minimal_form_is_lpv_lfr(model: &LfrModel, tol: &RankTolerance) -> Result<bool> {
    let (min, _) = minimize_lfr(model, tol)?;
    Ok(is_lpv_lfr(&min, tol))
}
