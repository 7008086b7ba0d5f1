//! Random model and signal generators for tests and benchmarks.
//!
//! Dynamics matrices are scaled so that `A(p)` stays contractive-ish for
//! `|p_i| <= 1`, keeping multi-step simulations well scaled.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::model::{assemble_lfr, block_diagonal, AlpvModel, CanonicalPartition, LfrModel, Signal};
use crate::numerics::{hstack, vstack, Mat, Vector};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, scale: f64) -> Mat {
    Mat::from_fn(rows, cols, |_, _| {
        let v: f64 = StandardNormal.sample(rng);
        v * scale
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlpvDims {
    pub np: usize,
    pub nx: usize,
    pub nu: usize,
    pub ny: usize,
}

impl AlpvDims {
    /// `np` in `0..=max_np`, `nx` in `1..=max_nx`, `nu, ny` in `1..=max_io`.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, max_np: usize, max_nx: usize, max_io: usize) -> Self {
        AlpvDims {
            np: rng.random_range(0..=max_np),
            nx: rng.random_range(1..=max_nx),
            nu: rng.random_range(1..=max_io),
            ny: rng.random_range(1..=max_io),
        }
    }
}

fn dynamics_scale(dims: AlpvDims) -> f64 {
    0.8 / ((dims.np + 1) as f64 * (dims.nx.max(1) as f64).sqrt())
}

/// Random ALPV whose scheduling coefficient stacks `[A_i B_i; C_i D_i]`
/// have random rank (possibly zero).
pub fn random_alpv<R: Rng + ?Sized>(rng: &mut R, dims: AlpvDims) -> AlpvModel {
    let AlpvDims { np, nx, nu, ny } = dims;
    let s = dynamics_scale(dims);
    let mut a = vec![gaussian(rng, nx, nx, s)];
    let mut b = vec![gaussian(rng, nx, nu, 1.0)];
    let mut c = vec![gaussian(rng, ny, nx, 1.0)];
    let mut d = vec![gaussian(rng, ny, nu, 1.0)];
    for _ in 0..np {
        let full = (nx + ny).min(nx + nu);
        let r = rng.random_range(0..=full);
        let stack = gaussian(rng, nx + ny, r, 1.0) * gaussian(rng, r, nx + nu, 1.0 / (r.max(1) as f64).sqrt());
        let mut ab = stack.view((0, 0), (nx, nx + nu)).into_owned();
        ab.view_mut((0, 0), (nx, nx)).scale_mut(s);
        a.push(ab.view((0, 0), (nx, nx)).into_owned());
        b.push(ab.view((0, nx), (nx, nu)).into_owned());
        c.push(stack.view((nx, 0), (ny, nx)).into_owned());
        d.push(stack.view((nx, nx), (ny, nu)).into_owned());
    }
    AlpvModel::new(a, b, c, d).expect("generated shapes are consistent")
}

/// Ways of making an ALPV non-minimal while keeping its input-output map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Redundancy {
    /// Extra states that no input reaches.
    Unreachable,
    /// Extra states that never reach the output.
    Unobservable,
    /// The whole state duplicated, output split evenly between the copies.
    Duplicated,
}

/// Embed `sigma` into a larger, non-minimal ALPV with the same Markov parameters.
pub fn pad_alpv<R: Rng + ?Sized>(rng: &mut R, sigma: &AlpvModel, kind: Redundancy, extra: usize) -> AlpvModel {
    let (np, nx, nu, ny) = sigma.signature();
    let s = dynamics_scale(AlpvDims { np, nx: nx + extra, nu, ny });
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut c = Vec::new();
    for i in 0..=np {
        let (ai, bi, ci) = (&sigma.a()[i], &sigma.b()[i], &sigma.c()[i]);
        match kind {
            Redundancy::Unreachable => {
                let top = hstack(nx, &[ai, &gaussian(rng, nx, extra, s)]);
                let bottom = hstack(extra, &[&Mat::zeros(extra, nx), &gaussian(rng, extra, extra, s)]);
                a.push(vstack(nx + extra, &[&top, &bottom]));
                b.push(vstack(nu, &[bi, &Mat::zeros(extra, nu)]));
                c.push(hstack(ny, &[ci, &gaussian(rng, ny, extra, 1.0)]));
            }
            Redundancy::Unobservable => {
                let top = hstack(nx, &[ai, &Mat::zeros(nx, extra)]);
                let bottom = hstack(extra, &[&gaussian(rng, extra, nx, s), &gaussian(rng, extra, extra, s)]);
                a.push(vstack(nx + extra, &[&top, &bottom]));
                b.push(vstack(nu, &[bi, &gaussian(rng, extra, nu, 1.0)]));
                c.push(hstack(ny, &[ci, &Mat::zeros(ny, extra)]));
            }
            Redundancy::Duplicated => {
                a.push(block_diagonal(&[ai.clone(), ai.clone()]));
                b.push(vstack(nu, &[bi, bi]));
                c.push(hstack(ny, &[&(ci * 0.5), &(ci * 0.5)]));
            }
        }
    }
    let nx_new = a[0].nrows();
    AlpvModel::with_dims(nx_new, nu, ny, a, b, c, sigma.d().to_vec()).expect("padded shapes are consistent")
}

/// Random LPV-LFR with the given channel sizes (`F_{i,j} = 0` for `i, j > 1`).
pub fn random_lpv_lfr<R: Rng + ?Sized>(rng: &mut R, outputs: usize, inputs: usize, sizes: &[usize]) -> LfrModel {
    let d = sizes.len();
    let s = 0.8 / (d as f64 * (sizes[0].max(1) as f64).sqrt());
    let f = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i > 0 && j > 0 {
                        Mat::zeros(sizes[i], sizes[j])
                    } else {
                        gaussian(rng, sizes[i], sizes[j], s)
                    }
                })
                .collect()
        })
        .collect();
    let part = CanonicalPartition {
        outputs,
        inputs,
        block_sizes: sizes.to_vec(),
        h: sizes.iter().map(|&n| gaussian(rng, outputs, n, 1.0)).collect(),
        f,
        g: sizes.iter().map(|&n| gaussian(rng, n, inputs, 1.0)).collect(),
    };
    assemble_lfr(&part, &gaussian(rng, outputs, inputs, 1.0)).expect("generated shapes are consistent")
}

/// [`random_lpv_lfr`] with a nonzero `F_{2,2}`, which makes the coefficient
/// of the word `22` (generically) nonzero.
pub fn random_lfr_with_forbidden_coefficient<R: Rng + ?Sized>(
    rng: &mut R,
    outputs: usize,
    inputs: usize,
    sizes: &[usize],
) -> LfrModel {
    assert!(sizes.len() >= 2 && sizes[1] > 0, "needs a nonempty second channel");
    let m = random_lpv_lfr(rng, outputs, inputs, sizes);
    let mut a = m.a().clone();
    let n1 = sizes[0];
    a.view_mut((n1, n1), (sizes[1], sizes[1]))
        .copy_from(&gaussian(rng, sizes[1], sizes[1], 0.5));
    LfrModel::new(sizes.to_vec(), a, m.b().clone(), m.c().clone(), m.d().clone()).expect("same shapes")
}

/// Signal with i.i.d. entries uniform in `[-amplitude, amplitude]`.
pub fn random_signal<R: Rng + ?Sized>(rng: &mut R, dim: usize, len: usize, amplitude: f64) -> Signal {
    let samples = (0..len)
        .map(|_| Vector::from_fn(dim, |_, _| rng.random_range(-amplitude..=amplitude)))
        .collect();
    Signal::new(dim, samples).expect("finite samples")
}
