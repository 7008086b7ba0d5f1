//! Reachability, observability, minimality, Markov parameters, equivalence,
//! isomorphism and simulation for affine LPV models.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::isomorphism::{search_affine, square_from, IsomorphismSearch};
use crate::model::{AlpvIsomorphism, AlpvModel, ScheduleSignal, Signal, Trajectory, InputSignal};
use crate::numerics::{
    column_space_basis, hstack, kron, max_abs, numerical_rank, solve_right, vec_of, vstack, LinearConstraints, Mat,
    RankTolerance, Vector,
};

/// Reachability/observability verdict shared by ALPVs and LFRs.
///
/// For ALPVs `NotReachable` means "not span-reachable".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Minimality {
    Minimal,
    NotReachable,
    NotObservable,
    Neither,
}

impl Minimality {
    pub fn from_flags(reachable: bool, observable: bool) -> Self {
        match (reachable, observable) {
            (true, true) => Minimality::Minimal,
            (false, true) => Minimality::NotReachable,
            (true, false) => Minimality::NotObservable,
            (false, false) => Minimality::Neither,
        }
    }

    pub fn is_minimal(self) -> bool {
        self == Minimality::Minimal
    }
}

/// `R_0 = [B_0 .. B_np]`, `R_{n+1} = [R_0, A_0 R_n, .., A_np R_n]`.
///
/// The column count grows geometrically in `n`; use
/// [`reachable_subspace`] for rank questions.
pub fn alpv_reach_matrix(model: &AlpvModel, n: usize) -> Mat {
    let r0 = hstack(model.nx(), &model.b().iter().collect::<Vec<_>>());
    let mut r = r0.clone();
    for _ in 0..n {
        let mut parts = vec![r0.clone()];
        parts.extend(model.a().iter().map(|a| a * &r));
        r = hstack(model.nx(), &parts.iter().collect::<Vec<_>>());
    }
    r
}

/// `O_0 = [C_0; ..; C_np]`, `O_{n+1} = [O_0; O_n A_0; ..; O_n A_np]`.
pub fn alpv_obs_matrix(model: &AlpvModel, n: usize) -> Mat {
    let o0 = vstack(model.nx(), &model.c().iter().collect::<Vec<_>>());
    let mut o = o0.clone();
    for _ in 0..n {
        let mut parts = vec![o0.clone()];
        parts.extend(model.a().iter().map(|a| &o * a));
        o = vstack(model.nx(), &parts.iter().collect::<Vec<_>>());
    }
    o
}

/// Orthonormal bases of `im R_n` iterated until the rank stops growing.
#[derive(Debug, Clone)]
pub struct KrylovSpace {
    /// Basis of the limit subspace, as columns.
    pub basis: Mat,
    /// `ranks[n] = rank R_n` for `n = 0..=stabilized_at`.
    pub ranks: Vec<usize>,
}

impl KrylovSpace {
    /// First `n` with `rank R_n = rank R_{n+1}`.
    pub fn stabilized_at(&self) -> usize {
        self.ranks.len().saturating_sub(2)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Iterate `V <- orth[V_0, A_0 V, .., A_k V]` from `V_0 = orth[B_0 .. B_k]`.
pub(crate) fn krylov(a: &[Mat], b: &[Mat], n: usize, tol: &RankTolerance) -> KrylovSpace {
    let r0 = hstack(n, &b.iter().collect::<Vec<_>>());
    let mut basis = column_space_basis(&r0, tol);
    let mut ranks = vec![basis.ncols()];
    loop {
        let mut parts = vec![r0.clone()];
        parts.extend(a.iter().map(|ai| ai * &basis));
        let next = column_space_basis(&hstack(n, &parts.iter().collect::<Vec<_>>()), tol);
        ranks.push(next.ncols());
        let grew = next.ncols() > basis.ncols();
        basis = next;
        // rank can grow at most n times
        if !grew || ranks.len() > n + 1 {
            break;
        }
    }
    KrylovSpace { basis, ranks }
}

/// Limit of `im R_n(Σ)`; equals `im R_{nx-1}(Σ)`.
pub fn reachable_subspace(model: &AlpvModel, tol: &RankTolerance) -> KrylovSpace {
    krylov(model.a(), model.b(), model.nx(), tol)
}

/// Limit of the row space of `O_n(Σ)`, as a column basis.
pub fn observable_subspace(model: &AlpvModel, tol: &RankTolerance) -> KrylovSpace {
    let at: Vec<Mat> = model.a().iter().map(|a| a.transpose()).collect();
    let ct: Vec<Mat> = model.c().iter().map(|c| c.transpose()).collect();
    krylov(&at, &ct, model.nx(), tol)
}

/// Span-reachable iff `rank R_{nx-1} = nx`; observable iff `rank O_{nx-1} = nx`.
pub fn is_minimal_alpv(model: &AlpvModel, tol: &RankTolerance) -> Minimality {
    let nx = model.nx();
    Minimality::from_flags(
        reachable_subspace(model, tol).dim() == nx,
        observable_subspace(model, tol).dim() == nx,
    )
}

/// Dimensions before and after each minimization stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizationReport {
    pub original: usize,
    pub reachable: usize,
    pub minimal: usize,
}

fn project_alpv(model: &AlpvModel, basis: &Mat) -> Result<AlpvModel> {
    let bt = basis.transpose();
    AlpvModel::with_dims(
        basis.ncols(),
        model.nu(),
        model.ny(),
        model.a().iter().map(|a| &bt * a * basis).collect(),
        model.b().iter().map(|b| &bt * b).collect(),
        model.c().iter().map(|c| c * basis).collect(),
        model.d().to_vec(),
    )
}

/// Restrict to the reachable subspace, then quotient by the unobservable one.
pub fn minimize_alpv(model: &AlpvModel, tol: &RankTolerance) -> Result<(AlpvModel, MinimizationReport)> {
    let reach = reachable_subspace(model, tol);
    let restricted = project_alpv(model, &reach.basis)?;
    let obs = observable_subspace(&restricted, tol);
    let minimal = project_alpv(&restricted, &obs.basis)?;
    let report = MinimizationReport {
        original: model.nx(),
        reachable: restricted.nx(),
        minimal: minimal.nx(),
    };
    Ok((minimal, report))
}

/// Markov parameters indexed by sequences `(j_1, .., j_k)` over `{0..np}`.
///
/// A length-1 sequence `(j)` maps to `D_j`; a sequence of length `k >= 2`
/// maps to `C_{j_k} A_{j_{k-1}} .. A_{j_2} B_{j_1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovTable {
    pub np: usize,
    pub horizon: usize,
    pub entries: BTreeMap<Vec<usize>, Mat>,
}

impl MarkovTable {
    pub fn get(&self, seq: &[usize]) -> Option<&Mat> {
        self.entries.get(seq)
    }
}

/// One Markov parameter.
pub fn markov_parameter(model: &AlpvModel, seq: &[usize]) -> Result<Mat> {
    if let Some(&bad) = seq.iter().find(|&&j| j > model.np()) {
        return Err(Error::LetterOutOfRange {
            letter: bad,
            alphabet: model.np(),
        });
    }
    match seq {
        [] => Err(Error::Dimension("Markov parameters are indexed by nonempty sequences".into())),
        [j] => Ok(model.d()[*j].clone()),
        [first, middle @ .., last] => {
            let mut x = model.b()[*first].clone();
            for &j in middle {
                x = &model.a()[j] * x;
            }
            Ok(&model.c()[*last] * x)
        }
    }
}

/// Walk every sequence of length `2..=horizon`, calling `visit` with the
/// sequence and the propagated states `A_{j_{k-1}} .. B_{j_1}` of each model.
fn walk_markov<F>(models: &[&AlpvModel], horizon: usize, mut visit: F)
where
    F: FnMut(&[usize], &[&Mat]),
{
    fn rec<F: FnMut(&[usize], &[&Mat])>(
        models: &[&AlpvModel],
        seq: &mut Vec<usize>,
        states: Vec<Mat>,
        horizon: usize,
        visit: &mut F,
    ) {
        // seq currently holds j_1..j_{k-1}; append the output index
        let np = models[0].np();
        if seq.len() + 1 > horizon {
            return;
        }
        for last in 0..=np {
            seq.push(last);
            let outs: Vec<Mat> = models.iter().zip(&states).map(|(m, x)| &m.c()[last] * x).collect();
            let refs: Vec<&Mat> = outs.iter().collect();
            visit(seq, &refs);
            seq.pop();
        }
        if seq.len() + 2 > horizon {
            return;
        }
        for mid in 0..=np {
            let next: Vec<Mat> = models.iter().zip(&states).map(|(m, x)| &m.a()[mid] * x).collect();
            seq.push(mid);
            rec(models, seq, next, horizon, visit);
            seq.pop();
        }
    }
    let np = models[0].np();
    for first in 0..=np {
        let states: Vec<Mat> = models.iter().map(|m| m.b()[first].clone()).collect();
        let mut seq = vec![first];
        rec(models, &mut seq, states, horizon, &mut visit);
    }
}

/// All Markov parameters for sequences of length `1..=horizon`.
pub fn alpv_markov_table(model: &AlpvModel, horizon: usize) -> MarkovTable {
    let mut entries = BTreeMap::new();
    if horizon >= 1 {
        for j in 0..=model.np() {
            entries.insert(vec![j], model.d()[j].clone());
        }
    }
    walk_markov(&[model], horizon, |seq, outs| {
        entries.insert(seq.to_vec(), outs[0].clone());
    });
    MarkovTable {
        np: model.np(),
        horizon,
        entries,
    }
}

/// Outcome of a coefficient-by-coefficient comparison of two series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesComparison {
    pub horizon: usize,
    pub compared: usize,
    pub max_deviation: f64,
    /// Largest coefficient magnitude seen in either series.
    pub scale: f64,
    pub equivalent: bool,
}

fn check_signatures(m1: &AlpvModel, m2: &AlpvModel) -> Result<()> {
    if (m1.np(), m1.nu(), m1.ny()) != (m2.np(), m2.nu(), m2.ny()) {
        return Err(Error::Dimension(format!(
            "(np, nu, ny) = {:?} vs {:?}",
            (m1.np(), m1.nu(), m1.ny()),
            (m2.np(), m2.nu(), m2.ny())
        )));
    }
    Ok(())
}

/// Compare Markov parameters of two ALPVs on all sequences up to `horizon`.
pub fn compare_markov(m1: &AlpvModel, m2: &AlpvModel, horizon: usize, tol: &RankTolerance) -> Result<SeriesComparison> {
    check_signatures(m1, m2)?;
    let mut dev = 0.0_f64;
    let mut scale = 0.0_f64;
    let mut compared = 0;
    if horizon >= 1 {
        for j in 0..=m1.np() {
            dev = dev.max(max_abs(&(&m1.d()[j] - &m2.d()[j])));
            scale = scale.max(max_abs(&m1.d()[j])).max(max_abs(&m2.d()[j]));
            compared += 1;
        }
    }
    walk_markov(&[m1, m2], horizon, |_, outs| {
        dev = dev.max(max_abs(&(outs[0] - outs[1])));
        scale = scale.max(max_abs(outs[0])).max(max_abs(outs[1]));
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

/// Sequence length up to which Markov tables must agree for two ALPVs to be
/// input-output equivalent.
///
/// The difference system has dimension `N = nx1 + nx2`; its reachable space
/// is spanned by `A_w B_j` with `|w| <= N - 1`, so sequences of length
/// `N + 1` suffice. The bound is tightened to `k + 2` when `im R_k` of the
/// difference system is already stable at step `k`.
pub fn alpv_equivalence_horizon(m1: &AlpvModel, m2: &AlpvModel, tol: &RankTolerance) -> Result<usize> {
    check_signatures(m1, m2)?;
    let n = m1.nx() + m2.nx();
    let a: Vec<Mat> = (0..=m1.np())
        .map(|i| crate::model::block_diagonal(&[m1.a()[i].clone(), m2.a()[i].clone()]))
        .collect();
    let b: Vec<Mat> = (0..=m1.np())
        .map(|i| vstack(m1.nu(), &[&m1.b()[i], &m2.b()[i]]))
        .collect();
    let joint = krylov(&a, &b, n, &tol.tightened());
    Ok((n + 1).min(joint.stabilized_at() + 2))
}

/// Input-output equivalence via Markov-parameter agreement up to
/// [`alpv_equivalence_horizon`].
pub fn alpv_io_equivalent(m1: &AlpvModel, m2: &AlpvModel, tol: &RankTolerance) -> Result<bool> {
    let horizon = alpv_equivalence_horizon(m1, m2, tol)?;
    Ok(compare_markov(m1, m2, horizon, tol)?.equivalent)
}

/// Max-abs residual of `T A_i = A_i' T`, `T B_i = B_i'`, `C_i = C_i' T`, `D_i = D_i'`.
pub fn alpv_isomorphism_residual(m1: &AlpvModel, m2: &AlpvModel, t: &Mat) -> f64 {
    let mut res = 0.0_f64;
    for i in 0..=m1.np() {
        res = res
            .max(max_abs(&(t * &m1.a()[i] - &m2.a()[i] * t)))
            .max(max_abs(&(t * &m1.b()[i] - &m2.b()[i])))
            .max(max_abs(&(&m1.c()[i] - &m2.c()[i] * t)))
            .max(max_abs(&(&m1.d()[i] - &m2.d()[i])));
    }
    res
}

/// Search for an isomorphism from `m1` to `m2`.
///
/// Non-equivalent models are rejected up front. When both models are
/// minimal, `T` is reconstructed from `T R_k(m1) = R_k(m2)` and verified;
/// otherwise the defining equations are solved as an affine system and its
/// solution space is sampled for an invertible member.
pub fn find_alpv_isomorphism(
    m1: &AlpvModel,
    m2: &AlpvModel,
    tol: &RankTolerance,
) -> Result<IsomorphismSearch<AlpvIsomorphism>> {
    if m1.signature() != m2.signature() {
        return Err(Error::Dimension(format!(
            "signatures {:?} and {:?} differ",
            m1.signature(),
            m2.signature()
        )));
    }
    if !alpv_io_equivalent(m1, m2, tol)? {
        return Ok(IsomorphismSearch::NotEquivalent);
    }
    let nx = m1.nx();
    let scale = m1.magnitude().max(m2.magnitude());
    let acceptable = |res: f64| tol.negligible(res, scale);
    if is_minimal_alpv(m1, tol).is_minimal() && is_minimal_alpv(m2, tol).is_minimal() {
        let k = reachable_subspace(m1, tol)
            .stabilized_at()
            .max(reachable_subspace(m2, tol).stabilized_at());
        let r1 = alpv_reach_matrix(m1, k);
        let r2 = alpv_reach_matrix(m2, k);
        let t = solve_right(&r1, &r2, tol);
        let residual = alpv_isomorphism_residual(m1, m2, &t);
        if !acceptable(residual) {
            return Ok(IsomorphismSearch::VerificationFailed { residual });
        }
        return Ok(match AlpvIsomorphism::new(t, tol) {
            Ok(iso) => IsomorphismSearch::Found { iso, residual },
            Err(_) => IsomorphismSearch::VerificationFailed { residual },
        });
    }
    let mut sys = LinearConstraints::new(nx * nx);
    let eye = Mat::identity(nx, nx);
    for i in 0..=m1.np() {
        // vec(T A - A' T) = (A^T ⊗ I - I ⊗ A') vec T
        let block = kron(&m1.a()[i].transpose(), &eye) - kron(&eye, &m2.a()[i]);
        sys.push(&block, &Vector::zeros(nx * nx));
        sys.push(&kron(&m1.b()[i].transpose(), &eye), &vec_of(&m2.b()[i]));
        sys.push(&kron(&eye, &m2.c()[i]), &vec_of(&m1.c()[i]));
    }
    search_affine(
        &sys,
        tol,
        |x| AlpvIsomorphism::new(square_from(x.as_slice(), nx), tol).ok(),
        |iso| {
            let res = alpv_isomorphism_residual(m1, m2, iso.matrix());
            (res, acceptable(res))
        },
    )
}

/// Forward recursion from `x0` (zero when `None`).
pub fn simulate_alpv(
    model: &AlpvModel,
    u: &InputSignal,
    p: &ScheduleSignal,
    x0: Option<&Vector>,
) -> Result<Trajectory> {
    if u.dim() != model.nu() || p.dim() != model.np() {
        return Err(Error::Dimension(format!(
            "signals have dims (u: {}, p: {}), model expects ({}, {})",
            u.dim(),
            p.dim(),
            model.nu(),
            model.np()
        )));
    }
    if u.len() != p.len() {
        return Err(Error::Dimension(format!(
            "input horizon {} differs from schedule horizon {}",
            u.len(),
            p.len()
        )));
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != model.nx() => {
            return Err(Error::Dimension(format!("x0 has length {}, expected {}", x0.len(), model.nx())))
        }
        Some(x0) => x0.clone(),
        None => Vector::zeros(model.nx()),
    };
    let mut xs = Vec::with_capacity(u.len() + 1);
    let mut ys = Vec::with_capacity(u.len());
    for t in 0..u.len() {
        let (a, b, c, d) = model.frozen(p.at(t));
        ys.push(&c * &x + &d * u.at(t));
        let next = &a * &x + &b * u.at(t);
        xs.push(std::mem::replace(&mut x, next));
    }
    xs.push(x);
    Ok(Trajectory {
        x: xs,
        y: Signal::new(model.ny(), ys)?,
    })
}

/// Rank of the literal `R_n` matrix; exposed for cross-checking the
/// compressed iteration.
pub fn alpv_reach_rank(model: &AlpvModel, n: usize, tol: &RankTolerance) -> Result<usize> {
    numerical_rank(&alpv_reach_matrix(model, n), tol)
}
