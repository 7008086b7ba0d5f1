//! Clause-by-clause checks of the ALPV <-> LPV-LFR transfer properties on a
//! concrete pair of models, and sampled identifiability falsification.

use std::fmt;

use crate::alpv::{alpv_io_equivalent, find_alpv_isomorphism, is_minimal_alpv};
use crate::error::{Error, Result};
use crate::isomorphism::IsomorphismSearch;
use crate::lfr::{find_lfr_isomorphism, is_minimal_lfr};
use crate::model::{AlpvModel, LfrModel};
use crate::numerics::RankTolerance;
use crate::transform::{lfr_formally_equivalent, lfr_to_alpv, lpv_lfr_io_equivalent, lpv_to_lfr_mr};

/// Either kind of model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Alpv(AlpvModel),
    Lfr(LfrModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Alpv(_) => "alpv",
            Model::Lfr(_) => "lfr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseVerdict {
    Pass,
    Fail,
    /// An isomorphism search could not settle one side.
    Inconclusive,
}

impl fmt::Display for ClauseVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClauseVerdict::Pass => "PASS",
            ClauseVerdict::Fail => "FAIL",
            ClauseVerdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: String,
    pub verdict: ClauseVerdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessReport {
    pub m1: LfrModel,
    pub m2: LfrModel,
    pub clauses: Vec<Clause>,
}

impl HarnessReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|c| c.verdict == ClauseVerdict::Pass)
    }

    pub fn any_fail(&self) -> bool {
        self.clauses.iter().any(|c| c.verdict == ClauseVerdict::Fail)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

/// Three-valued answer of an isomorphism query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Isomorphic {
    Yes,
    No,
    Unknown,
}

fn settle<T>(search: &IsomorphismSearch<T>) -> Isomorphic {
    if search.is_found() {
        Isomorphic::Yes
    } else if search.is_inconclusive() {
        Isomorphic::Unknown
    } else {
        Isomorphic::No
    }
}

/// Isomorphism query that answers `No` outright for mismatched state dimensions.
pub fn alpv_isomorphic(s1: &AlpvModel, s2: &AlpvModel, tol: &RankTolerance) -> Result<Isomorphic> {
    if s1.nx() != s2.nx() {
        return Ok(Isomorphic::No);
    }
    Ok(settle(&find_alpv_isomorphism(s1, s2, tol)?))
}

/// Isomorphism query that answers `No` outright for mismatched block sizes.
pub fn lfr_isomorphic(m1: &LfrModel, m2: &LfrModel, tol: &RankTolerance) -> Result<Isomorphic> {
    if m1.block_sizes() != m2.block_sizes() {
        return Ok(Isomorphic::No);
    }
    Ok(settle(&find_lfr_isomorphism(m1, m2, tol)?))
}

fn iff(name: impl Into<String>, left: bool, right: bool, what: &str) -> Clause {
    Clause {
        name: name.into(),
        verdict: if left == right { ClauseVerdict::Pass } else { ClauseVerdict::Fail },
        detail: format!("{what}: {left} vs {right}"),
    }
}

fn implies(name: impl Into<String>, premise: bool, conclusion: bool, what: &str) -> Clause {
    Clause {
        name: name.into(),
        verdict: if !premise || conclusion { ClauseVerdict::Pass } else { ClauseVerdict::Fail },
        detail: format!("{what}: premise {premise}, conclusion {conclusion}"),
    }
}

fn iso_clause(name: impl Into<String>, left: Isomorphic, right: Isomorphic, one_way: bool) -> Clause {
    use Isomorphic::*;
    let verdict = match (left, right) {
        (Unknown, _) | (_, Unknown) => ClauseVerdict::Inconclusive,
        (Yes, No) => ClauseVerdict::Fail,
        (No, Yes) if !one_way => ClauseVerdict::Fail,
        _ => ClauseVerdict::Pass,
    };
    Clause {
        name: name.into(),
        verdict,
        detail: format!("isomorphic: {left:?} vs {right:?}"),
    }
}

/// Transform both ALPVs by MR factorization and check, clause by clause:
///
/// * minimality, equivalence and isomorphism are each preserved in both
///   directions by the MR transform;
/// * reading the ALPVs back off the LFRs preserves minimality, equivalence
///   and isomorphism, and the MR transform of the read-back ALPV is formally
///   equivalent (isomorphic when minimal) to the LFR it came from.
pub fn theorem_harness(s1: &AlpvModel, s2: &AlpvModel, tol: &RankTolerance) -> Result<HarnessReport> {
    let m1 = lpv_to_lfr_mr(s1, tol)?;
    let m2 = lpv_to_lfr_mr(s2, tol)?;
    let mut clauses = Vec::new();

    let sigma_min = [is_minimal_alpv(s1, tol).is_minimal(), is_minimal_alpv(s2, tol).is_minimal()];
    let lfr_min = [is_minimal_lfr(&m1, tol).is_minimal(), is_minimal_lfr(&m2, tol).is_minimal()];
    for k in 0..2 {
        clauses.push(iff(
            format!("mr.minimality[{}]", k + 1),
            sigma_min[k],
            lfr_min[k],
            "ALPV minimal vs LFR minimal",
        ));
    }
    let sigma_eq = alpv_io_equivalent(s1, s2, tol)?;
    let lfr_eq = lfr_formally_equivalent(&m1, &m2, tol)?;
    clauses.push(iff("mr.equivalence", sigma_eq, lfr_eq, "ALPV io-equivalent vs LFR formally equivalent"));
    let sigma_iso = alpv_isomorphic(s1, s2, tol)?;
    let lfr_iso = lfr_isomorphic(&m1, &m2, tol)?;
    clauses.push(iso_clause("mr.isomorphism", sigma_iso, lfr_iso, false));

    let back = [lfr_to_alpv(&m1, tol)?, lfr_to_alpv(&m2, tol)?];
    for (k, (m, (s, b))) in [&m1, &m2].into_iter().zip([s1, s2].into_iter().zip(&back)).enumerate() {
        let dev = b.max_deviation(s)?;
        clauses.push(Clause {
            name: format!("readback.identity[{}]", k + 1),
            verdict: if tol.negligible(dev, s.magnitude()) {
                ClauseVerdict::Pass
            } else {
                ClauseVerdict::Fail
            },
            detail: format!("max deviation {dev:.3e}"),
        });
        clauses.push(implies(
            format!("readback.minimality[{}]", k + 1),
            lfr_min[k],
            is_minimal_alpv(b, tol).is_minimal(),
            "LFR minimal => read-back ALPV minimal",
        ));
        let remade = lpv_to_lfr_mr(b, tol)?;
        clauses.push(iff(
            format!("readback.mr-equivalence[{}]", k + 1),
            true,
            lfr_formally_equivalent(m, &remade, tol)?,
            "MR of read-back formally equivalent",
        ));
        if lfr_min[k] {
            clauses.push(iso_clause(
                format!("readback.mr-isomorphism[{}]", k + 1),
                Isomorphic::Yes,
                lfr_isomorphic(m, &remade, tol)?,
                false,
            ));
        }
    }
    clauses.push(iff(
        "readback.equivalence",
        lfr_eq,
        alpv_io_equivalent(&back[0], &back[1], tol)?,
        "LFR formally equivalent vs read-back ALPVs equivalent",
    ));
    clauses.push(iso_clause(
        "readback.isomorphism",
        lfr_iso,
        alpv_isomorphic(&back[0], &back[1], tol)?,
        true,
    ));
    Ok(HarnessReport { m1, m2, clauses })
}

/// Finitely many `(θ, model)` samples of a parametrization.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametrizationSample {
    pub entries: Vec<(Vec<f64>, Model)>,
}

/// A pair of distinct parameter values with equivalent models.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub first: usize,
    pub second: usize,
    pub theta_first: Vec<f64>,
    pub theta_second: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifiabilityReport {
    pub pairs_tested: usize,
    /// Every equivalent pair found, in index order.
    pub witnesses: Vec<Witness>,
    /// Pairs where formal and input-output equivalence disagree (LFR samples only).
    pub disagreements: Vec<(usize, usize)>,
}

impl IdentifiabilityReport {
    /// True when some pair of distinct parameters gives equivalent models.
    /// `false` only means "not falsified on this sample".
    pub fn falsified(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

/// Test every pair of sampled models for equivalence.
///
/// ALPV samples use input-output equivalence. LPV-LFR samples compute both
/// formal and input-output equivalence and record any disagreement; the
/// formal verdict decides the witness.
pub fn identifiability_falsify(sample: &ParametrizationSample, tol: &RankTolerance) -> Result<IdentifiabilityReport> {
    let entries = &sample.entries;
    if entries.len() < 2 {
        return Err(Error::Sample(format!("{} entries; need at least 2", entries.len())));
    }
    let kind = entries[0].1.kind();
    if let Some((i, _)) = entries.iter().enumerate().find(|(_, e)| e.1.kind() != kind) {
        return Err(Error::Sample(format!("entry {i} is {}, entry 0 is {kind}", entries[i].1.kind())));
    }
    let dim = entries[0].0.len();
    if let Some((i, _)) = entries.iter().enumerate().find(|(_, e)| e.0.len() != dim) {
        return Err(Error::Sample(format!("theta {i} has length {}, expected {dim}", entries[i].0.len())));
    }
    for (i, (theta, _)) in entries.iter().enumerate() {
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("theta"));
        }
        if let Some(j) = entries[..i].iter().position(|(t, _)| t == theta) {
            return Err(Error::Sample(format!("thetas {j} and {i} coincide")));
        }
    }

    let mut report = IdentifiabilityReport {
        pairs_tested: 0,
        witnesses: Vec::new(),
        disagreements: Vec::new(),
    };
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let equivalent = match (&entries[i].1, &entries[j].1) {
                (Model::Alpv(a), Model::Alpv(b)) => alpv_io_equivalent(a, b, tol)?,
                (Model::Lfr(a), Model::Lfr(b)) => {
                    let formal = lfr_formally_equivalent(a, b, tol)?;
                    if formal != lpv_lfr_io_equivalent(a, b, tol)? {
                        report.disagreements.push((i, j));
                    }
                    formal
                }
                _ => unreachable!("kinds checked above"),
            };
            report.pairs_tested += 1;
            if equivalent {
                report.witnesses.push(Witness {
                    first: i,
                    second: j,
                    theta_first: entries[i].0.clone(),
                    theta_second: entries[j].0.clone(),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;
    use crate::numerics::Mat;

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    /// `B_0 = [θ; 0]`, `C_0 = [1/θ, 0]` (or `[1, 0]`) with diagonal dynamics
    /// and a second input/output pair acting on the other state only.
    fn scaled_pair(theta: f64, reciprocal: bool) -> AlpvModel {
        let diag = |a: f64, b: f64| Mat::from_row_slice(2, 2, &[a, 0.0, 0.0, b]);
        AlpvModel::new(
            vec![diag(0.5, 0.2), diag(0.3, -0.1)],
            vec![Mat::from_row_slice(2, 1, &[theta, 0.0]), Mat::from_row_slice(2, 1, &[0.0, 1.0])],
            vec![
                Mat::from_row_slice(1, 2, &[if reciprocal { 1.0 / theta } else { 1.0 }, 0.0]),
                Mat::from_row_slice(1, 2, &[0.0, 1.0]),
            ],
            vec![Mat::zeros(1, 1), Mat::zeros(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn example_passes_every_clause() {
        let s = example1::alpv_sigma();
        let report = theorem_harness(&s, &s, &tol()).unwrap();
        assert!(report.all_pass(), "{:#?}", report.clauses);
        assert_eq!(report.m1.dim(), 4);
    }

    #[test]
    fn duplicated_state_embedding() {
        let s = example1::alpv_sigma();
        let dup = AlpvModel::new(
            s.a().iter().map(|a| crate::model::block_diagonal(&[a.clone(), a.clone()])).collect(),
            s.b().iter().map(|b| crate::numerics::vstack(1, &[b, b])).collect(),
            s.c().iter().map(|c| crate::numerics::hstack(1, &[&(c * 0.5), &(c * 0.5)])).collect(),
            s.d().to_vec(),
        )
        .unwrap();
        let report = theorem_harness(&s, &dup, &tol()).unwrap();
        assert!(!report.any_fail(), "{:#?}", report.clauses);
        assert!(report.clause("mr.minimality[2]").unwrap().detail.contains("false vs false"));
        assert!(report.clause("mr.equivalence").unwrap().detail.contains("true vs true"));
    }

    #[test]
    fn non_identifiable_parametrization_is_falsified() {
        let sample = ParametrizationSample {
            entries: [1.0, 2.0]
                .iter()
                .map(|&t| (vec![t], Model::Alpv(scaled_pair(t, true))))
                .collect(),
        };
        let report = identifiability_falsify(&sample, &tol()).unwrap();
        assert!(report.falsified());
        assert_eq!(report.witnesses[0].theta_first, vec![1.0]);
        assert_eq!(report.witnesses[0].theta_second, vec![2.0]);
    }

    #[test]
    fn identifiable_variant_is_not_falsified() {
        let sample = ParametrizationSample {
            entries: [1.0, 2.0]
                .iter()
                .map(|&t| (vec![t], Model::Alpv(scaled_pair(t, false))))
                .collect(),
        };
        assert!(!identifiability_falsify(&sample, &tol()).unwrap().falsified());
    }

    #[test]
    fn lfr_samples_compare_both_notions() {
        let entries: Vec<_> = [1.0, 2.0, 3.0]
            .iter()
            .map(|&t| (vec![t], Model::Lfr(lpv_to_lfr_mr(&scaled_pair(t, true), &tol()).unwrap())))
            .collect();
        let report = identifiability_falsify(&ParametrizationSample { entries }, &tol()).unwrap();
        assert_eq!(report.pairs_tested, 3);
        assert_eq!(report.witnesses.len(), 3);
        assert!(report.disagreements.is_empty());
    }

    #[test]
    fn repeated_model_is_falsified() {
        let s = Model::Alpv(example1::alpv_sigma());
        let sample = ParametrizationSample {
            entries: vec![(vec![0.0], s.clone()), (vec![1.0], s)],
        };
        assert!(identifiability_falsify(&sample, &tol()).unwrap().falsified());
    }

    #[test]
    fn malformed_samples_rejected() {
        let a = Model::Alpv(example1::alpv_sigma());
        let l = Model::Lfr(example1::lfr_m());
        let bad = [
            vec![(vec![1.0], a.clone())],
            vec![(vec![1.0], a.clone()), (vec![2.0], l)],
            vec![(vec![1.0], a.clone()), (vec![1.0, 2.0], a.clone())],
            vec![(vec![1.0], a.clone()), (vec![1.0], a)],
        ];
        for entries in bad {
            assert!(matches!(
                identifiability_falsify(&ParametrizationSample { entries }, &tol()),
                Err(Error::Sample(_))
            ));
        }
    }
}
