//! Rank-revealing primitives shared by every analysis module.
//!
//! All rank decisions go through a single [`RankTolerance`]. Singular values
//! are compared against `max(rel * sigma_max, abs)`; a value sitting exactly
//! on the threshold counts as zero.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Threshold pair used for every rank decision and numerical comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl RankTolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0 && rel.is_finite() && abs > 0.0 && abs.is_finite()) {
            return Err(Error::Structure(format!(
                "tolerances must be positive and finite (rel={rel}, abs={abs})"
            )));
        }
        Ok(Self { rel, abs })
    }

    /// Same absolute floor, different relative threshold.
    pub fn with_rel(self, rel: f64) -> Self {
        Self { rel, ..self }
    }

    /// Singular values at or below this value are treated as zero.
    pub fn rank_threshold(&self, sigma_max: f64) -> f64 {
        (self.rel * sigma_max).max(self.abs)
    }

    /// Whether a deviation is negligible relative to the magnitude `scale`
    /// of the quantities being compared (scales below one count as one).
    pub fn negligible(&self, deviation: f64, scale: f64) -> bool {
        deviation <= (self.rel * scale.max(1.0)).max(self.abs)
    }

    /// The tighter of `self` and the default policy. Used where a loose
    /// comparison tolerance must not shrink a sufficiency horizon.
    pub fn tightened(&self) -> Self {
        let d = Self::default();
        Self {
            rel: self.rel.min(d.rel),
            abs: self.abs.min(d.abs),
        }
    }
}

pub(crate) fn ensure_finite(x: &Mat, what: &'static str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Largest absolute entry; zero for an empty matrix.
pub fn max_abs(x: &Mat) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Thin SVD with singular triplets sorted by decreasing singular value.
struct SortedSvd {
    u: Mat,
    sigma: Vec<f64>,
    v: Mat,
}

fn sorted_svd(x: &Mat) -> SortedSvd {
    let (a, b) = x.shape();
    let k = a.min(b);
    if k == 0 {
        return SortedSvd {
            u: Mat::zeros(a, 0),
            sigma: Vec::new(),
            v: Mat::zeros(b, 0),
        };
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = Mat::from_fn(a, k, |r, c| u[(r, order[c])]);
    let v = Mat::from_fn(b, k, |r, c| v_t[(order[c], r)]);
    SortedSvd { u, sigma, v }
}

fn rank_of(sigma: &[f64], tol: &RankTolerance) -> usize {
    let Some(&top) = sigma.first() else {
        return 0;
    };
    let threshold = tol.rank_threshold(top);
    sigma.iter().take_while(|&&s| s > threshold).count()
}

/// Singular values in decreasing order.
pub fn singular_values(x: &Mat) -> Result<Vec<f64>> {
    ensure_finite(x, "matrix")?;
    Ok(sorted_svd(x).sigma)
}

/// Number of singular values above `max(rel * sigma_1, abs)`.
pub fn numerical_rank(x: &Mat, tol: &RankTolerance) -> Result<usize> {
    ensure_finite(x, "matrix")?;
    Ok(rank_of(&sorted_svd(x).sigma, tol))
}

/// Balanced full-rank factorization `X = L R` with `L = U_r S_r^{1/2}` and
/// `R = S_r^{1/2} V_r^T`, truncated at the numerical rank.
pub fn full_rank_factorization(x: &Mat, tol: &RankTolerance) -> Result<(Mat, Mat)> {
    ensure_finite(x, "matrix")?;
    let (a, b) = x.shape();
    let svd = sorted_svd(x);
    let r = rank_of(&svd.sigma, tol);
    let mut left = Mat::zeros(a, r);
    let mut right = Mat::zeros(r, b);
    for k in 0..r {
        let s = svd.sigma[k].sqrt();
        left.set_column(k, &(svd.u.column(k) * s));
        right.set_row(k, &(svd.v.column(k).transpose() * s));
    }
    Ok((left, right))
}

/// Orthonormal basis (as columns) of the column space of `x`.
pub fn column_space_basis(x: &Mat, tol: &RankTolerance) -> Mat {
    let svd = sorted_svd(x);
    let r = rank_of(&svd.sigma, tol);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis (as columns) of the row space of `x`.
pub fn row_space_basis(x: &Mat, tol: &RankTolerance) -> Mat {
    let svd = sorted_svd(x);
    let r = rank_of(&svd.sigma, tol);
    svd.v.columns(0, r).into_owned()
}

/// Minimum-norm least-squares solution of `X * T = Y` for `T`.
pub fn solve_right(x: &Mat, y: &Mat, tol: &RankTolerance) -> Mat {
    // T = Y X^+ with X^+ = V S^-1 U^T
    let svd = sorted_svd(x);
    let r = rank_of(&svd.sigma, tol);
    let mut pinv = Mat::zeros(x.ncols(), x.nrows());
    for k in 0..r {
        pinv += svd.v.column(k) * svd.u.column(k).transpose() / svd.sigma[k];
    }
    y * pinv
}

/// Concatenate blocks left to right. `rows` fixes the height when `parts` is
/// empty or all blocks are zero-width.
pub fn hstack(rows: usize, parts: &[&Mat]) -> Mat {
    let cols = parts.iter().map(|p| p.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        debug_assert_eq!(p.nrows(), rows);
        out.view_mut((0, at), p.shape()).copy_from(*p);
        at += p.ncols();
    }
    out
}

/// Concatenate blocks top to bottom.
pub fn vstack(cols: usize, parts: &[&Mat]) -> Mat {
    let rows = parts.iter().map(|p| p.nrows()).sum();
    let mut out = Mat::zeros(rows, cols);
    let mut at = 0;
    for p in parts {
        debug_assert_eq!(p.ncols(), cols);
        out.view_mut((at, 0), p.shape()).copy_from(*p);
        at += p.nrows();
    }
    out
}

/// A linear system `matrix * x = rhs` over vectorized unknowns.
#[derive(Debug, Clone)]
pub struct LinearConstraints {
    pub matrix: Mat,
    pub rhs: Vector,
}

impl LinearConstraints {
    pub fn new(unknowns: usize) -> Self {
        Self {
            matrix: Mat::zeros(0, unknowns),
            rhs: Vector::zeros(0),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.matrix.ncols()
    }

    /// Append the equations `block * x = rhs`.
    pub fn push(&mut self, block: &Mat, rhs: &Vector) {
        assert_eq!(block.ncols(), self.unknowns());
        assert_eq!(block.nrows(), rhs.len());
        self.matrix = vstack(self.unknowns(), &[&self.matrix, block]);
        let mut stacked = Vector::zeros(self.rhs.len() + rhs.len());
        stacked.rows_mut(0, self.rhs.len()).copy_from(&self.rhs);
        stacked.rows_mut(self.rhs.len(), rhs.len()).copy_from(rhs);
        self.rhs = stacked;
    }
}

/// Solution set of an affine system.
#[derive(Debug, Clone)]
pub enum AffineSolution {
    /// `particular + basis * z` solves the system for every `z`; `basis` has
    /// orthonormal columns spanning the nullspace.
    Feasible {
        particular: Vector,
        basis: Mat,
        residual: f64,
    },
    Infeasible {
        residual: f64,
    },
}

impl AffineSolution {
    pub fn is_feasible(&self) -> bool {
        matches!(self, AffineSolution::Feasible { .. })
    }
}

/// Particular solution and nullspace basis of `matrix * x = rhs`.
///
/// The system is declared feasible when the least-squares residual
/// (max-abs) is negligible against the magnitude of `rhs`.
pub fn affine_nullspace(sys: &LinearConstraints, tol: &RankTolerance) -> Result<AffineSolution> {
    ensure_finite(&sys.matrix, "constraint matrix")?;
    if !sys.rhs.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("constraint right-hand side"));
    }
    let k = sys.unknowns();
    let q = sys.matrix.nrows();
    // Pad with zero rows so the SVD yields a full set of right singular vectors.
    let padded = if q < k {
        vstack(k, &[&sys.matrix, &Mat::zeros(k - q, k)])
    } else {
        sys.matrix.clone()
    };
    let svd = sorted_svd(&padded);
    let r = rank_of(&svd.sigma, tol);
    let mut particular = Vector::zeros(k);
    for i in 0..r {
        let ui = svd.u.column(i);
        let coeff = ui.rows(0, q).dot(&sys.rhs) / svd.sigma[i];
        particular += svd.v.column(i) * coeff;
    }
    let residual = if q == 0 {
        0.0
    } else {
        (&sys.matrix * &particular - &sys.rhs).amax()
    };
    let scale = if q == 0 { 0.0 } else { sys.rhs.amax() };
    if !tol.negligible(residual, scale) {
        return Ok(AffineSolution::Infeasible { residual });
    }
    let basis = svd.v.columns(r, k - r).into_owned();
    Ok(AffineSolution::Feasible {
        particular,
        basis,
        residual,
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Mat::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Column-major vectorization.
pub fn vec_of(x: &Mat) -> Vector {
    Vector::from_column_slice(x.as_slice())
}
