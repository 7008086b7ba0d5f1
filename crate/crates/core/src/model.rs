//! Model value types: affine LPV state-space models, block-partitioned LFRs,
//! words over the channel alphabet, series tables, isomorphisms and signals.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{ensure_finite, hstack, max_abs, numerical_rank, vstack, Mat, RankTolerance, Vector};

/// Affine LPV model `x(k+1) = A(p)x + B(p)u`, `y = C(p)x + D(p)u` with
/// `A(p) = A_0 + sum_i p_i A_i` (same for B, C, D).
///
/// Index 0 of every coefficient list is the constant term; index `i >= 1`
/// multiplies scheduling coordinate `p_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlpvModel {
    nx: usize,
    nu: usize,
    ny: usize,
    a: Vec<Mat>,
    b: Vec<Mat>,
    c: Vec<Mat>,
    d: Vec<Mat>,
}

impl AlpvModel {
    /// Dimensions are taken from the matrices; every list must have the same
    /// (nonzero) length `np + 1` and consistent shapes.
    pub fn new(a: Vec<Mat>, b: Vec<Mat>, c: Vec<Mat>, d: Vec<Mat>) -> Result<Self> {
        let count = a.len();
        if count == 0 {
            return Err(Error::Structure("ALPV needs at least the constant term".into()));
        }
        if b.len() != count || c.len() != count || d.len() != count {
            return Err(Error::Structure(format!(
                "coefficient lists have lengths A:{} B:{} C:{} D:{}",
                a.len(),
                b.len(),
                c.len(),
                d.len()
            )));
        }
        let nx = a[0].nrows();
        let nu = b[0].ncols();
        let ny = c[0].nrows();
        Self::with_dims(nx, nu, ny, a, b, c, d)
    }

    /// Like [`AlpvModel::new`] but with explicit dimensions, which is needed
    /// when some dimension is zero and cannot be read off the matrices.
    pub fn with_dims(
        nx: usize,
        nu: usize,
        ny: usize,
        a: Vec<Mat>,
        b: Vec<Mat>,
        c: Vec<Mat>,
        d: Vec<Mat>,
    ) -> Result<Self> {
        let count = a.len();
        if count == 0 || b.len() != count || c.len() != count || d.len() != count {
            return Err(Error::Structure("coefficient lists must share length np + 1 >= 1".into()));
        }
        if nu == 0 || ny == 0 {
            return Err(Error::Structure(format!("input/output dimensions must be positive (nu={nu}, ny={ny})")));
        }
        for i in 0..count {
            let checks = [
                ("A", a[i].shape(), (nx, nx)),
                ("B", b[i].shape(), (nx, nu)),
                ("C", c[i].shape(), (ny, nx)),
                ("D", d[i].shape(), (ny, nu)),
            ];
            for (name, got, want) in checks {
                if got != want {
                    return Err(Error::Structure(format!(
                        "{name}_{i} is {}x{}, expected {}x{}",
                        got.0, got.1, want.0, want.1
                    )));
                }
            }
            ensure_finite(&a[i], "A_i")?;
            ensure_finite(&b[i], "B_i")?;
            ensure_finite(&c[i], "C_i")?;
            ensure_finite(&d[i], "D_i")?;
        }
        Ok(Self { nx, nu, ny, a, b, c, d })
    }

    pub fn np(&self) -> usize {
        self.a.len() - 1
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn nu(&self) -> usize {
        self.nu
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn a(&self) -> &[Mat] {
        &self.a
    }
    pub fn b(&self) -> &[Mat] {
        &self.b
    }
    pub fn c(&self) -> &[Mat] {
        &self.c
    }
    pub fn d(&self) -> &[Mat] {
        &self.d
    }

    /// `[A_i B_i; C_i D_i]`.
    pub fn coefficient_stack(&self, i: usize) -> Mat {
        let top = hstack(self.nx, &[&self.a[i], &self.b[i]]);
        let bottom = hstack(self.ny, &[&self.c[i], &self.d[i]]);
        vstack(self.nx + self.nu, &[&top, &bottom])
    }

    /// Largest entrywise difference to another model of the same signature.
    pub fn max_deviation(&self, other: &AlpvModel) -> Result<f64> {
        if self.signature() != other.signature() {
            return Err(Error::Dimension(format!(
                "signatures {:?} and {:?} differ",
                self.signature(),
                other.signature()
            )));
        }
        let mut dev = 0.0_f64;
        for i in 0..=self.np() {
            dev = dev
                .max(max_abs(&(&self.a[i] - &other.a[i])))
                .max(max_abs(&(&self.b[i] - &other.b[i])))
                .max(max_abs(&(&self.c[i] - &other.c[i])))
                .max(max_abs(&(&self.d[i] - &other.d[i])));
        }
        Ok(dev)
    }

    /// Largest absolute coefficient of the model.
    pub fn magnitude(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .chain(&self.d)
            .map(max_abs)
            .fold(0.0, f64::max)
    }

    /// `(np, nx, nu, ny)`.
    pub fn signature(&self) -> (usize, usize, usize, usize) {
        (self.np(), self.nx, self.nu, self.ny)
    }

    /// `A(p)`, `B(p)`, `C(p)`, `D(p)` at a scheduling value.
    pub fn frozen(&self, p: &Vector) -> (Mat, Mat, Mat, Mat) {
        let mut a = self.a[0].clone();
        let mut b = self.b[0].clone();
        let mut c = self.c[0].clone();
        let mut d = self.d[0].clone();
        for i in 1..=self.np() {
            let w = p[i - 1];
            a += &self.a[i] * w;
            b += &self.b[i] * w;
            c += &self.c[i] * w;
            d += &self.d[i] * w;
        }
        (a, b, c, d)
    }
}

/// Linear fractional representation `(p, m, d, {n_i}, A, B, C, D)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LfrModel {
    block_sizes: Vec<usize>,
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
}

impl LfrModel {
    pub fn new(block_sizes: Vec<usize>, a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::Structure("an LFR needs at least one channel".into()));
        }
        let n: usize = block_sizes.iter().sum();
        let (p, m) = d.shape();
        if p == 0 || m == 0 {
            return Err(Error::Structure(format!("D must be nonempty, got {p}x{m}")));
        }
        let checks = [
            ("A", a.shape(), (n, n)),
            ("B", b.shape(), (n, m)),
            ("C", c.shape(), (p, n)),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(Error::Structure(format!(
                    "{name} is {}x{}, expected {}x{} for block sizes {:?}",
                    got.0, got.1, want.0, want.1, block_sizes
                )));
            }
        }
        ensure_finite(&a, "A")?;
        ensure_finite(&b, "B")?;
        ensure_finite(&c, "C")?;
        ensure_finite(&d, "D")?;
        Ok(Self { block_sizes, a, b, c, d })
    }

    /// Output dimension `p`.
    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }
    /// Input dimension `m`.
    pub fn inputs(&self) -> usize {
        self.d.ncols()
    }
    /// Number of channels `d`.
    pub fn channels(&self) -> usize {
        self.block_sizes.len()
    }
    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }
    /// `n = sum n_i`.
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
    pub fn a(&self) -> &Mat {
        &self.a
    }
    pub fn b(&self) -> &Mat {
        &self.b
    }
    pub fn c(&self) -> &Mat {
        &self.c
    }
    pub fn d(&self) -> &Mat {
        &self.d
    }

    /// Starting row of every block, plus the total as the last entry.
    pub fn offsets(&self) -> Vec<usize> {
        block_offsets(&self.block_sizes)
    }

    /// `(p, m, d)`.
    pub fn signature(&self) -> (usize, usize, usize) {
        (self.outputs(), self.inputs(), self.channels())
    }

    pub fn max_deviation(&self, other: &LfrModel) -> Result<f64> {
        if self.signature() != other.signature() || self.block_sizes != other.block_sizes {
            return Err(Error::Dimension("LFR block structures differ".into()));
        }
        Ok(max_abs(&(&self.a - &other.a))
            .max(max_abs(&(&self.b - &other.b)))
            .max(max_abs(&(&self.c - &other.c)))
            .max(max_abs(&(&self.d - &other.d))))
    }
}

pub(crate) fn block_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len() + 1);
    let mut at = 0;
    out.push(0);
    for s in sizes {
        at += s;
        out.push(at);
    }
    out
}

/// Block decomposition `{H_i, F_ij, G_j}` of an LFR's `A`, `B`, `C`.
///
/// Channels are indexed from 0 here; channel `k` corresponds to letter `k+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPartition {
    pub outputs: usize,
    pub inputs: usize,
    pub block_sizes: Vec<usize>,
    /// `h[i]` is `p x n_i`.
    pub h: Vec<Mat>,
    /// `f[i][j]` is `n_i x n_j`.
    pub f: Vec<Vec<Mat>>,
    /// `g[j]` is `n_j x m`.
    pub g: Vec<Mat>,
}

impl CanonicalPartition {
    pub fn channels(&self) -> usize {
        self.block_sizes.len()
    }
}

/// Slice `A`, `B`, `C` into channel blocks. `D` is not partitioned.
pub fn canonical_partition(model: &LfrModel) -> CanonicalPartition {
    let off = model.offsets();
    let sizes = model.block_sizes();
    let d = sizes.len();
    let (p, m) = (model.outputs(), model.inputs());
    let h = (0..d)
        .map(|i| model.c().view((0, off[i]), (p, sizes[i])).into_owned())
        .collect();
    let g = (0..d)
        .map(|j| model.b().view((off[j], 0), (sizes[j], m)).into_owned())
        .collect();
    let f = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| model.a().view((off[i], off[j]), (sizes[i], sizes[j])).into_owned())
                .collect()
        })
        .collect();
    CanonicalPartition {
        outputs: p,
        inputs: m,
        block_sizes: sizes.to_vec(),
        h,
        f,
        g,
    }
}

/// Inverse of [`canonical_partition`].
pub fn assemble_lfr(part: &CanonicalPartition, d_matrix: &Mat) -> Result<LfrModel> {
    let dch = part.block_sizes.len();
    let (p, m) = (part.outputs, part.inputs);
    if part.h.len() != dch || part.g.len() != dch || part.f.len() != dch {
        return Err(Error::Structure("partition block lists disagree with channel count".into()));
    }
    if d_matrix.shape() != (p, m) {
        return Err(Error::Structure(format!(
            "D is {}x{}, expected {p}x{m}",
            d_matrix.nrows(),
            d_matrix.ncols()
        )));
    }
    let sizes = &part.block_sizes;
    for i in 0..dch {
        if part.h[i].shape() != (p, sizes[i]) || part.g[i].shape() != (sizes[i], m) {
            return Err(Error::Structure(format!("H/G block {} has the wrong shape", i + 1)));
        }
        if part.f[i].len() != dch {
            return Err(Error::Structure(format!("F row {} has {} blocks", i + 1, part.f[i].len())));
        }
        for j in 0..dch {
            if part.f[i][j].shape() != (sizes[i], sizes[j]) {
                return Err(Error::Structure(format!(
                    "F_{},{} is {}x{}, expected {}x{}",
                    i + 1,
                    j + 1,
                    part.f[i][j].nrows(),
                    part.f[i][j].ncols(),
                    sizes[i],
                    sizes[j]
                )));
            }
        }
    }
    let n: usize = sizes.iter().sum();
    let rows: Vec<Mat> = (0..dch)
        .map(|i| hstack(sizes[i], &part.f[i].iter().collect::<Vec<_>>()))
        .collect();
    let a = vstack(n, &rows.iter().collect::<Vec<_>>());
    let b = vstack(m, &part.g.iter().collect::<Vec<_>>());
    let c = hstack(p, &part.h.iter().collect::<Vec<_>>());
    LfrModel::new(sizes.clone(), a, b, c, d_matrix.clone())
}

/// Block-diagonal state transformation `T = diag[T_1, ..., T_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LfrIsomorphism {
    blocks: Vec<Mat>,
}

impl LfrIsomorphism {
    pub fn new(blocks: Vec<Mat>, tol: &RankTolerance) -> Result<Self> {
        for (i, t) in blocks.iter().enumerate() {
            if !t.is_square() {
                return Err(Error::Dimension(format!("T_{} is not square", i + 1)));
            }
            if numerical_rank(t, tol)? != t.nrows() {
                return Err(Error::Singular(format!("T_{} is not invertible", i + 1)));
            }
        }
        Ok(Self { blocks })
    }

    pub fn identity(block_sizes: &[usize]) -> Self {
        Self {
            blocks: block_sizes.iter().map(|&n| Mat::identity(n, n)).collect(),
        }
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|t| t.nrows()).collect()
    }

    /// The full block-diagonal matrix.
    pub fn matrix(&self) -> Mat {
        block_diagonal(&self.blocks)
    }

    pub fn inverse(&self) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, t)| invert(t).ok_or_else(|| Error::Singular(format!("T_{} is not invertible", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { blocks })
    }

    /// Blockwise product `self * other`.
    pub fn compose(&self, other: &LfrIsomorphism) -> Result<Self> {
        if self.block_sizes() != other.block_sizes() {
            return Err(Error::Dimension("isomorphism block sizes differ".into()));
        }
        Ok(Self {
            blocks: self.blocks.iter().zip(&other.blocks).map(|(s, t)| s * t).collect(),
        })
    }
}

pub(crate) fn invert(t: &Mat) -> Option<Mat> {
    if t.nrows() == 0 {
        return Some(t.clone());
    }
    t.clone().try_inverse()
}

pub(crate) fn block_diagonal(blocks: &[Mat]) -> Mat {
    let n = blocks.iter().map(|t| t.nrows()).sum();
    let mut out = Mat::zeros(n, n);
    let mut at = 0;
    for t in blocks {
        out.view_mut((at, at), t.shape()).copy_from(t);
        at += t.nrows();
    }
    out
}

/// Invertible state transformation between two ALPVs.
#[derive(Debug, Clone, PartialEq)]
pub struct AlpvIsomorphism {
    t: Mat,
}

impl AlpvIsomorphism {
    pub fn new(t: Mat, tol: &RankTolerance) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::Dimension("T is not square".into()));
        }
        if numerical_rank(&t, tol)? != t.nrows() {
            return Err(Error::Singular("T is not invertible".into()));
        }
        Ok(Self { t })
    }

    pub fn identity(nx: usize) -> Self {
        Self {
            t: Mat::identity(nx, nx),
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.t
    }

    pub fn inverse(&self) -> Result<Self> {
        invert(&self.t)
            .map(|t| Self { t })
            .ok_or_else(|| Error::Singular("T is not invertible".into()))
    }
}

/// `(p, m, d, {n_i}, TAT^-1, TB, CT^-1, D)`.
pub fn apply_lfr_isomorphism(model: &LfrModel, iso: &LfrIsomorphism) -> Result<LfrModel> {
    if iso.block_sizes() != model.block_sizes() {
        return Err(Error::Dimension(format!(
            "isomorphism blocks {:?} do not match model blocks {:?}",
            iso.block_sizes(),
            model.block_sizes()
        )));
    }
    let t = iso.matrix();
    let t_inv = iso.inverse()?.matrix();
    LfrModel::new(
        model.block_sizes().to_vec(),
        &t * model.a() * &t_inv,
        &t * model.b(),
        model.c() * &t_inv,
        model.d().clone(),
    )
}

/// `A_i' = T A_i T^-1`, `B_i' = T B_i`, `C_i' = C_i T^-1`, `D_i' = D_i`.
pub fn apply_alpv_isomorphism(model: &AlpvModel, iso: &AlpvIsomorphism) -> Result<AlpvModel> {
    if iso.t.nrows() != model.nx() {
        return Err(Error::Dimension(format!(
            "isomorphism is {}x{}, model has nx = {}",
            iso.t.nrows(),
            iso.t.ncols(),
            model.nx()
        )));
    }
    let t = &iso.t;
    let t_inv = iso.inverse()?.t;
    AlpvModel::with_dims(
        model.nx(),
        model.nu(),
        model.ny(),
        model.a().iter().map(|a| t * a * &t_inv).collect(),
        model.b().iter().map(|b| t * b).collect(),
        model.c().iter().map(|c| c * &t_inv).collect(),
        model.d().to_vec(),
    )
}

/// A word over the channel alphabet `{1, ..., d}`. The empty word is legal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>, alphabet: usize) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > alphabet) {
            return Err(Error::LetterOutOfRange { letter: bad, alphabet });
        }
        Ok(Self(letters))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when two consecutive letters both exceed 1.
    pub fn has_adjacent_scheduling_letters(&self) -> bool {
        self.0.windows(2).any(|w| w[0] > 1 && w[1] > 1)
    }

    /// Every word of length `<= horizon` in shortlex order.
    pub fn all_up_to(alphabet: usize, horizon: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..horizon {
            let mut next = Vec::with_capacity(layer.len() * alphabet);
            for w in &layer {
                for l in 1..=alphabet {
                    let mut letters = w.0.clone();
                    letters.push(l);
                    next.push(Word(letters));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let wide = self.0.iter().any(|&l| l > 9);
        for (k, l) in self.0.iter().enumerate() {
            if wide && k > 0 {
                write!(f, ".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Coefficients of a formal input-output map on every word up to a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub outputs: usize,
    pub inputs: usize,
    pub alphabet: usize,
    pub horizon: usize,
    pub coefficients: BTreeMap<Word, Mat>,
}

impl SeriesTable {
    pub fn get(&self, w: &Word) -> Option<&Mat> {
        self.coefficients.get(w)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Largest entrywise deviation between two tables over the same words.
    pub fn max_deviation(&self, other: &SeriesTable) -> Result<f64> {
        if self.coefficients.len() != other.coefficients.len() {
            return Err(Error::Dimension("series tables cover different word sets".into()));
        }
        let mut dev = 0.0_f64;
        for (w, x) in &self.coefficients {
            let y = other
                .get(w)
                .ok_or_else(|| Error::Dimension(format!("word {w} missing from table")))?;
            if x.shape() != y.shape() {
                return Err(Error::Dimension("coefficient shapes differ".into()));
            }
            dev = dev.max(max_abs(&(x - y)));
        }
        Ok(dev)
    }
}

/// A finite sequence of equally sized vectors, one per time step.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    dim: usize,
    samples: Vec<Vector>,
}

pub type InputSignal = Signal;
pub type ScheduleSignal = Signal;

impl Signal {
    pub fn new(dim: usize, samples: Vec<Vector>) -> Result<Self> {
        if let Some((t, s)) = samples.iter().enumerate().find(|(_, s)| s.len() != dim) {
            return Err(Error::Dimension(format!(
                "sample {t} has length {}, expected {dim}",
                s.len()
            )));
        }
        if samples.iter().any(|s| s.iter().any(|v| !v.is_finite())) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Self { dim, samples })
    }

    pub fn zeros(dim: usize, len: usize) -> Self {
        Self {
            dim,
            samples: vec![Vector::zeros(dim); len],
        }
    }

    /// Build from rows of plain numbers.
    pub fn from_rows(dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|r| Vector::from_column_slice(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vector] {
        &self.samples
    }

    pub fn at(&self, t: usize) -> &Vector {
        &self.samples[t]
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Signal, beta: f64) -> Result<Signal> {
        if self.dim != other.dim || self.len() != other.len() {
            return Err(Error::Dimension("signals differ in shape".into()));
        }
        Ok(Signal {
            dim: self.dim,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| x * alpha + y * beta)
                .collect(),
        })
    }

    /// Largest entrywise deviation between two signals of the same shape.
    pub fn max_deviation(&self, other: &Signal) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(x, y)| (x - y).amax())
            .fold(0.0, f64::max)
    }

    /// Largest absolute sample entry.
    pub fn magnitude(&self) -> f64 {
        self.samples.iter().map(|x| x.amax()).fold(0.0, f64::max)
    }
}

/// States `x(0..=K)` and outputs `y(0..K)` of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub x: Vec<Vector>,
    pub y: Signal,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example1;

    #[test]
    fn partition_of_example_lfr() {
        let part = canonical_partition(&example1::lfr_m());
        assert_eq!(part.f[0][0], Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.2]));
        assert_eq!(part.g[0], Mat::from_row_slice(2, 1, &[1.0, 0.0]));
        assert_eq!(part.h[0], Mat::from_row_slice(1, 2, &[1.0, 0.0]));
        assert_eq!(part.f[1][1], Mat::zeros(3, 3));
    }

    #[test]
    fn single_channel_partition_is_the_model() {
        let m = example1::lfr_m();
        let single = LfrModel::new(vec![5], m.a().clone(), m.b().clone(), m.c().clone(), m.d().clone()).unwrap();
        let part = canonical_partition(&single);
        assert_eq!(&part.f[0][0], m.a());
        assert_eq!(&part.g[0], m.b());
        assert_eq!(&part.h[0], m.c());
    }

    #[test]
    fn partition_round_trip_is_exact() {
        for m in [example1::lfr_m(), example1::lfr_m_tilde(), example1::lfr_m_hat()] {
            let back = assemble_lfr(&canonical_partition(&m), m.d()).unwrap();
            assert_eq!(back, m);
        }
    }

    #[test]
    fn zero_blocks_assemble_to_zero_model() {
        let sizes = vec![2, 0, 1];
        let part = CanonicalPartition {
            outputs: 1,
            inputs: 2,
            block_sizes: sizes.clone(),
            h: sizes.iter().map(|&n| Mat::zeros(1, n)).collect(),
            f: sizes
                .iter()
                .map(|&ni| sizes.iter().map(|&nj| Mat::zeros(ni, nj)).collect())
                .collect(),
            g: sizes.iter().map(|&n| Mat::zeros(n, 2)).collect(),
        };
        let m = assemble_lfr(&part, &Mat::zeros(1, 2)).unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.a(), &Mat::zeros(3, 3));
        assert_eq!(canonical_partition(&m), part);
    }

    #[test]
    fn assemble_rejects_bad_block() {
        let mut part = canonical_partition(&example1::lfr_m());
        part.f[0][1] = Mat::zeros(2, 2);
        assert!(matches!(
            assemble_lfr(&part, &Mat::zeros(1, 1)),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn lfr_shape_mismatch_is_structural_error() {
        let err = LfrModel::new(vec![2, 2], Mat::zeros(3, 3), Mat::zeros(3, 1), Mat::zeros(1, 3), Mat::zeros(1, 1));
        assert!(matches!(err, Err(Error::Structure(_))));
    }

    #[test]
    fn identity_isomorphism_is_noop() {
        let m = example1::lfr_m();
        let out = apply_lfr_isomorphism(&m, &LfrIsomorphism::identity(m.block_sizes())).unwrap();
        assert_eq!(out, m);
        let s = example1::alpv_sigma();
        let out = apply_alpv_isomorphism(&s, &AlpvIsomorphism::identity(2)).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn singular_isomorphism_rejected() {
        let tol = RankTolerance::default();
        let t = Mat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(AlpvIsomorphism::new(t.clone(), &tol), Err(Error::Singular(_))));
        assert!(matches!(
            LfrIsomorphism::new(vec![t, Mat::identity(3, 3)], &tol),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn isomorphism_size_mismatch_rejected() {
        let m = example1::lfr_m();
        let iso = LfrIsomorphism::identity(&[2, 2]);
        assert!(matches!(apply_lfr_isomorphism(&m, &iso), Err(Error::Dimension(_))));
    }

    #[test]
    fn words_validate_letters() {
        assert!(Word::new(vec![1, 2, 1], 2).is_ok());
        assert_eq!(
            Word::new(vec![1, 3], 2),
            Err(Error::LetterOutOfRange { letter: 3, alphabet: 2 })
        );
        assert!(Word::new(vec![0], 2).is_err());
        assert_eq!(Word::all_up_to(2, 3).len(), 15);
        assert_eq!(Word::empty().to_string(), "ε");
        assert_eq!(Word::new(vec![2, 1, 2], 2).unwrap().to_string(), "212");
    }

    #[test]
    fn signal_rejects_ragged_samples() {
        assert!(Signal::from_rows(2, &[vec![1.0, 2.0], vec![1.0]]).is_err());
    }
}
