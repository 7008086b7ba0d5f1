//! Time-domain evaluation of LPV-LFRs under the scheduling-induced Δ:
//! channel 1 is a unit delay, channel `j > 1` multiplies by `p_{j-1}(t)`.

use crate::error::{Error, Result};
use crate::model::{canonical_partition, InputSignal, LfrModel, ScheduleSignal, Signal};
use crate::numerics::{RankTolerance, Vector};
use crate::transform::ensure_lpv_lfr;

fn check_signals(model: &LfrModel, u: &InputSignal, p: &ScheduleSignal) -> Result<()> {
    if u.dim() != model.inputs() || p.dim() + 1 != model.channels() {
        return Err(Error::Dimension(format!(
            "signals have dims (u: {}, p: {}), model expects ({}, {})",
            u.dim(),
            p.dim(),
            model.inputs(),
            model.channels() - 1
        )));
    }
    if u.len() != p.len() {
        return Err(Error::Dimension(format!(
            "input horizon {} differs from schedule horizon {}",
            u.len(),
            p.len()
        )));
    }
    Ok(())
}

/// Run the feedback loop `y = M ⋆ Δ(p) u` forward from a zero delay state.
///
/// The memoryless channels are resolved from the delayed channel and `u`
/// alone, so the blocks `F_{i,j}` with `i, j > 1` are taken to be zero; models
/// where they are not negligible are refused.
pub fn simulate_lpv_lfr(
    model: &LfrModel,
    u: &InputSignal,
    p: &ScheduleSignal,
    tol: &RankTolerance,
) -> Result<Signal> {
    ensure_lpv_lfr(model, tol)?;
    check_signals(model, u, p)?;
    let part = canonical_partition(model);
    let d = part.channels();
    let mut x = Vector::zeros(part.block_sizes[0]);
    let mut ys = Vec::with_capacity(u.len());
    for t in 0..u.len() {
        let ut = u.at(t);
        let mut y = &part.h[0] * &x + model.d() * ut;
        let mut next = &part.f[0][0] * &x + &part.g[0] * ut;
        for j in 1..d {
            let w = (&part.f[j][0] * &x + &part.g[j] * ut) * p.at(t)[j - 1];
            y += &part.h[j] * &w;
            next += &part.f[0][j] * &w;
        }
        ys.push(y);
        x = next;
    }
    Signal::new(model.outputs(), ys)
}

/// Apply the channel-`j` operator of Δ(p) to a signal.
fn delta(j: usize, h: Vec<Vector>, p: &ScheduleSignal) -> Vec<Vector> {
    if j == 0 {
        let (len, n) = (h.len(), h.first().map_or(0, |v| v.len()));
        std::iter::once(Vector::zeros(n)).chain(h).take(len).collect()
    } else {
        h.into_iter().enumerate().map(|(t, v)| v * p.at(t)[j - 1]).collect()
    }
}

/// `Σ_{|s| <= L} Y_M(s) δ_s u` with Δ = Δ(p).
///
/// Terms are grouped by word length: `S_{1,j} = δ_j(G_j u)`,
/// `S_{l+1,j} = δ_j(Σ_i F_{j,i} S_{l,i})`, `y = D u + Σ_l Σ_j H_j S_{l,j}`.
/// The value at time `t` is exact once `L >= 2t + 1`.
pub fn truncated_star_series(
    model: &LfrModel,
    u: &InputSignal,
    p: &ScheduleSignal,
    word_horizon: usize,
    tol: &RankTolerance,
) -> Result<Signal> {
    ensure_lpv_lfr(model, tol)?;
    check_signals(model, u, p)?;
    let part = canonical_partition(model);
    let d = part.channels();
    let len = u.len();
    let mut y: Vec<Vector> = u.samples().iter().map(|ut| model.d() * ut).collect();
    let mut s: Vec<Vec<Vector>> = (0..d)
        .map(|j| delta(j, u.samples().iter().map(|ut| &part.g[j] * ut).collect(), p))
        .collect();
    for level in 1..=word_horizon {
        for (j, sj) in s.iter().enumerate() {
            for (yt, st) in y.iter_mut().zip(sj) {
                *yt += &part.h[j] * st;
            }
        }
        if level == word_horizon {
            break;
        }
        s = (0..d)
            .map(|j| {
                let mixed = (0..len)
                    .map(|t| {
                        (0..d).fold(Vector::zeros(part.block_sizes[j]), |acc, i| acc + &part.f[j][i] * &s[i][t])
                    })
                    .collect();
                delta(j, mixed, p)
            })
            .collect();
    }
    Signal::new(model.outputs(), y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpv::simulate_alpv;
    use crate::example1;
    use crate::lfr::lfr_series_table;
    use crate::transform::{lfr_to_alpv, lpv_to_lfr_mr};
    use crate::model::Word;

    fn tol() -> RankTolerance {
        RankTolerance::default()
    }

    fn signals(len: usize) -> (Signal, Signal) {
        let u = Signal::from_rows(1, &(0..len).map(|t| vec![((t * 7 % 5) as f64 - 2.0) * 0.3]).collect::<Vec<_>>())
            .unwrap();
        let p = Signal::from_rows(1, &(0..len).map(|t| vec![(t as f64 * 0.7).sin() * 0.4]).collect::<Vec<_>>())
            .unwrap();
        (u, p)
    }

    #[test]
    fn loop_matches_alpv_recursion() {
        let sigma = example1::alpv_sigma();
        let m = lpv_to_lfr_mr(&sigma, &tol()).unwrap();
        let (u, p) = signals(20);
        let direct = simulate_alpv(&sigma, &u, &p, None).unwrap().y;
        let looped = simulate_lpv_lfr(&m, &u, &p, &tol()).unwrap();
        assert!(direct.max_deviation(&looped) <= 1e-10);
        let printed = simulate_lpv_lfr(&example1::lfr_m(), &u, &p, &tol()).unwrap();
        assert!(direct.max_deviation(&printed) <= 1e-10);
    }

    #[test]
    fn series_matches_loop_at_exact_horizon() {
        let m = example1::lfr_m_tilde();
        let (u, p) = signals(8);
        let looped = simulate_lpv_lfr(&m, &u, &p, &tol()).unwrap();
        let series = truncated_star_series(&m, &u, &p, 2 * 8 + 1, &tol()).unwrap();
        assert!(looped.max_deviation(&series) <= 1e-9);
    }

    #[test]
    fn horizon_zero_is_feedthrough() {
        let sigma = example1::alpv_sigma();
        let m = lpv_to_lfr_mr(&sigma, &tol()).unwrap();
        let (u, p) = signals(5);
        let y = truncated_star_series(&m, &u, &p, 0, &tol()).unwrap();
        assert!(y.magnitude() == 0.0);
    }

    #[test]
    fn series_matches_word_enumeration() {
        // brute force: Σ_s H δ F δ .. G u over every word up to length 4
        let m = example1::lfr_m();
        let part = canonical_partition(&m);
        let (u, p) = signals(4);
        let horizon = 4;
        let table = lfr_series_table(&m, horizon);
        let mut expected: Vec<Vector> = u.samples().iter().map(|ut| m.d() * ut).collect();
        for w in Word::all_up_to(2, horizon).into_iter().filter(|w| !w.is_empty()) {
            let letters = w.letters();
            let mut sig = delta(letters[0] - 1, u.samples().iter().map(|ut| &part.g[letters[0] - 1] * ut).collect(), &p);
            for pair in letters.windows(2) {
                let (from, to) = (pair[0] - 1, pair[1] - 1);
                sig = delta(to, sig.iter().map(|v| &part.f[to][from] * v).collect(), &p);
            }
            let last = *letters.last().unwrap() - 1;
            for (e, v) in expected.iter_mut().zip(&sig) {
                *e += &part.h[last] * v;
            }
            assert!(table.get(&w).is_some());
        }
        let series = truncated_star_series(&m, &u, &p, horizon, &tol()).unwrap();
        let expected = Signal::new(1, expected).unwrap();
        assert!(series.max_deviation(&expected) <= 1e-12);
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let m = example1::lfr_m_hat();
        let (_, p) = signals(6);
        let u = Signal::zeros(1, 6);
        assert_eq!(simulate_lpv_lfr(&m, &u, &p, &tol()).unwrap().magnitude(), 0.0);
        assert_eq!(truncated_star_series(&m, &u, &p, 13, &tol()).unwrap().magnitude(), 0.0);
    }

    #[test]
    fn zero_schedule_is_lti_run() {
        let m = example1::lfr_m();
        let (u, _) = signals(10);
        let p = Signal::zeros(1, 10);
        let sigma = lfr_to_alpv(&m, &tol()).unwrap();
        let lti = crate::model::AlpvModel::new(
            vec![sigma.a()[0].clone()],
            vec![sigma.b()[0].clone()],
            vec![sigma.c()[0].clone()],
            vec![sigma.d()[0].clone()],
        )
        .unwrap();
        let y_lti = simulate_alpv(&lti, &u, &Signal::zeros(0, 10), None).unwrap().y;
        assert!(simulate_lpv_lfr(&m, &u, &p, &tol()).unwrap().max_deviation(&y_lti) <= 1e-12);
    }

    #[test]
    fn mismatched_signals_rejected() {
        let m = example1::lfr_m();
        let (u, _) = signals(4);
        let p = Signal::zeros(2, 4);
        assert!(matches!(simulate_lpv_lfr(&m, &u, &p, &tol()), Err(Error::Dimension(_))));
        let short = Signal::zeros(1, 3);
        assert!(matches!(truncated_star_series(&m, &u, &short, 3, &tol()), Err(Error::Dimension(_))));
    }

    #[test]
    fn non_lpv_lfr_refused() {
        let m = example1::lfr_m();
        let mut a = m.a().clone();
        a[(3, 4)] = 0.5;
        let bad = LfrModel::new(vec![2, 3], a, m.b().clone(), m.c().clone(), m.d().clone()).unwrap();
        let (u, p) = signals(3);
        assert!(matches!(simulate_lpv_lfr(&bad, &u, &p, &tol()), Err(Error::NotLpvLfr(_))));
        assert!(matches!(truncated_star_series(&bad, &u, &p, 3, &tol()), Err(Error::NotLpvLfr(_))));
    }
}
