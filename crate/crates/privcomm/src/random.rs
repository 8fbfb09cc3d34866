//! Seeded generation of random states, unitaries and channels.
//!
//! Every generator takes an explicit RNG so results are reproducible from a
//! seed. Unitaries are Haar-distributed (QR of a Ginibre matrix with phase
//! fixing); density matrices are normalized Wishart (GG^dag / tr).

use crate::qstate::{C64, CMat, CVec, Channel, DensityMatrix, PureState, Unitary};
use crate::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_complex<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| standard_complex(rng))
}

/// Haar-random unitary of the given dimension.
pub fn haar_unitary<R: Rng>(rng: &mut R, dim: usize) -> Unitary {
    let g = ginibre(rng, dim, dim);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Unitary::new(q).expect("QR of Ginibre yields a unitary")
}

/// Haar-random pure state over the given dims.
pub fn random_pure<R: Rng>(rng: &mut R, dims: Vec<usize>) -> PureState {
    let n: usize = dims.iter().product();
    let mut v = CVec::from_fn(n, |_, _| standard_complex(rng));
    let norm = v.norm();
    v /= C64::new(norm, 0.0);
    PureState::new(dims, v).expect("normalized Gaussian vector is a pure state")
}

/// Full-rank random density matrix (normalized Wishart).
pub fn random_density<R: Rng>(rng: &mut R, dims: Vec<usize>) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ginibre(rng, n, n);
    let mut w = &g * g.adjoint();
    let tr = w.trace().re;
    w /= C64::new(tr, 0.0);
    DensityMatrix::new(dims, w).expect("normalized Wishart is a density matrix")
}

/// Random channel with the given number of Kraus operators: a Haar unitary on
/// dim*n_kraus restricted to the input block, split into blocks.
pub fn random_channel<R: Rng>(rng: &mut R, dim: usize, n_kraus: usize) -> Result<Channel> {
    let big = dim * n_kraus;
    let u = haar_unitary(rng, big);
    let mut kraus = Vec::with_capacity(n_kraus);
    for j in 0..n_kraus {
        let block = u.matrix().view((j * dim, 0), (dim, dim)).into_owned();
        kraus.push(block);
    }
    Channel::new(kraus)
}

/// Random probability vector (normalized exponentials, i.e. flat Dirichlet).
pub fn random_probs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}
