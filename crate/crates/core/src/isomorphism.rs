//! Outcome type and the randomized invertible-member search shared by the
//! ALPV and LFR isomorphism finders.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::numerics::{affine_nullspace, AffineSolution, LinearConstraints, Mat, RankTolerance, Vector};

/// Number of random members of the solution space tried before giving up.
pub const INVERTIBILITY_DRAWS: usize = 32;

const SEARCH_SEED: u64 = 0x15_0f_0e_7a;

/// Result of an isomorphism search.
#[derive(Debug, Clone, PartialEq)]
pub enum IsomorphismSearch<T> {
    /// A verified isomorphism with the max-abs residual of its defining equations.
    Found { iso: T, residual: f64 },
    /// The models are not input-output equivalent, so no isomorphism exists.
    NotEquivalent,
    /// Both models are minimal and equivalent but the reconstructed
    /// transformation violates the defining equations.
    VerificationFailed { residual: f64 },
    /// The linear defining equations have no solution.
    Infeasible { residual: f64 },
    /// The defining equations are solvable but no sampled solution was
    /// invertible. Inconclusive in principle, though invertible solutions are
    /// generic whenever one exists.
    NoInvertibleSolution,
}

impl<T> IsomorphismSearch<T> {
    pub fn isomorphism(&self) -> Option<&T> {
        match self {
            IsomorphismSearch::Found { iso, .. } => Some(iso),
            _ => None,
        }
    }

    pub fn into_isomorphism(self) -> Option<T> {
        match self {
            IsomorphismSearch::Found { iso, .. } => Some(iso),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, IsomorphismSearch::Found { .. })
    }

    /// True only when the search could not settle the question.
    pub fn is_inconclusive(&self) -> bool {
        matches!(self, IsomorphismSearch::NoInvertibleSolution)
    }

    pub fn describe(&self) -> String {
        match self {
            IsomorphismSearch::Found { residual, .. } => format!("isomorphism found (residual {residual:.3e})"),
            IsomorphismSearch::NotEquivalent => "models are not input-output equivalent".into(),
            IsomorphismSearch::VerificationFailed { residual } => {
                format!("reconstructed transformation fails verification (residual {residual:.3e})")
            }
            IsomorphismSearch::Infeasible { residual } => {
                format!("defining equations infeasible (least-squares residual {residual:.3e})")
            }
            IsomorphismSearch::NoInvertibleSolution => format!(
                "no invertible solution found in {INVERTIBILITY_DRAWS} draws (inconclusive)"
            ),
        }
    }
}

/// Solve the defining equations and look for an invertible solution.
///
/// `build` maps a solution vector to the candidate transformation (`None`
/// when it is not invertible); `verify` returns the defining-equation
/// residual of a candidate and whether it is acceptable.
pub(crate) fn search_affine<T>(
    sys: &LinearConstraints,
    tol: &RankTolerance,
    build: impl Fn(&Vector) -> Option<T>,
    verify: impl Fn(&T) -> (f64, bool),
) -> Result<IsomorphismSearch<T>> {
    let (particular, basis) = match affine_nullspace(sys, tol)? {
        AffineSolution::Infeasible { residual } => return Ok(IsomorphismSearch::Infeasible { residual }),
        AffineSolution::Feasible { particular, basis, .. } => (particular, basis),
    };
    let try_candidate = |x: &Vector| -> Option<(T, f64)> {
        let iso = build(x)?;
        let (residual, ok) = verify(&iso);
        ok.then_some((iso, residual))
    };
    if basis.ncols() == 0 {
        return Ok(match try_candidate(&particular) {
            Some((iso, residual)) => IsomorphismSearch::Found { iso, residual },
            None => IsomorphismSearch::NoInvertibleSolution,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEARCH_SEED);
    for _ in 0..INVERTIBILITY_DRAWS {
        let z = Vector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut rng));
        let x = &particular + &basis * z;
        if let Some((iso, residual)) = try_candidate(&x) {
            return Ok(IsomorphismSearch::Found { iso, residual });
        }
    }
    Ok(IsomorphismSearch::NoInvertibleSolution)
}

/// Reshape a column-major vector slice into an `n x n` matrix.
pub(crate) fn square_from(x: &[f64], n: usize) -> Mat {
    Mat::from_column_slice(n, n, x)
}
