//! Closed-form Haar moments and frame potentials, plus Monte-Carlo oracles.

#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use crate::qcore::{
    channel_power, check_size, haar_random_state, haar_random_unitary, identity, kron_vec_power,
    lis_permutation_count, seeded, symmetric_projector, ComplexMatrix, Permutation, C64,
    PERMUTATION_CAP,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    State,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HaarMomentSpec {
    pub d: usize,
    pub k: usize,
    pub kind: MomentKind,
}

impl HaarMomentSpec {
    pub fn new(d: usize, k: usize, kind: MomentKind) -> Result<Self> {
        if d < 2 || k < 1 {
            return Err(Error::arg("Haar moments need d ≥ 2 and k ≥ 1"));
        }
        Ok(Self { d, k, kind })
    }

    pub fn frame_potential(&self) -> Estimate {
        match self.kind {
            MomentKind::State => Estimate::exact(haar_state_frame_potential(self.d, self.k)),
            MomentKind::Unitary => haar_unitary_frame_potential(self.d, self.k),
        }
    }

    pub fn moment(&self) -> Result<ComplexMatrix> {
        match self.kind {
            MomentKind::State => haar_state_moment(self.d, self.k),
            MomentKind::Unitary => haar_unitary_moment(self.d, self.k),
        }
    }
}

/// Scalar with a Monte-Carlo standard error (0 for exact values).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Self { mean, stderr: 0.0 }
    }

    pub fn from_samples(sum: f64, sum_sq: f64, n: usize) -> Self {
        let nf = n as f64;
        let mean = sum / nf;
        let var = if n > 1 { ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0) } else { 0.0 };
        Self { mean, stderr: (var / nf).sqrt() }
    }

    /// |mean − x| in units of the standard error (∞ if stderr = 0 and they differ).
    pub fn sigmas_from(&self, x: f64) -> f64 {
        let gap = (self.mean - x).abs();
        if gap == 0.0 {
            0.0
        } else {
            gap / self.stderr
        }
    }
}

/// Entrywise Monte-Carlo mean with per-entry standard errors.
#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub mean: ComplexMatrix,
    pub stderr: DMatrix<f64>,
    pub samples: usize,
}

/// (d−1)! k! / (d+k−1)! = 1 / binom(d+k−1, k).
pub fn haar_state_frame_potential(d: usize, k: usize) -> f64 {
    (1..=k).map(|i| i as f64 / (d - 1 + i) as f64).product()
}

/// ρ_Haar^(k) = Π_sym^(k) · (d−1)! k! / (d+k−1)!.
pub fn haar_state_moment(d: usize, k: usize) -> Result<ComplexMatrix> {
    Ok(symmetric_projector(d, k)?.scale(haar_state_frame_potential(d, k)))
}

/// E|tr V|^{2k}: k! for k ≤ d, otherwise the number of permutations of S_k
/// with longest increasing subsequence ≤ d. Beyond the enumeration cap the
/// value is a seeded Monte-Carlo estimate.
pub fn haar_unitary_frame_potential(d: usize, k: usize) -> Estimate {
    if k <= d {
        return Estimate::exact(crate::qcore::factorial(k) as f64);
    }
    if k <= PERMUTATION_CAP {
        return Estimate::exact(lis_permutation_count(k, d).expect("k within cap") as f64);
    }
    unitary_frame_potential_mc(d, k, 100_000, &mut seeded(0x5eed_f00d))
}

pub fn unitary_frame_potential_mc<R: Rng + ?Sized>(d: usize, k: usize, n: usize, rng: &mut R) -> Estimate {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let x = haar_random_unitary(d, rng).trace().norm_sqr().powi(k as i32);
        s += x;
        s2 += x * x;
    }
    Estimate::from_samples(s, s2, n)
}

pub fn state_frame_potential_mc<R: Rng + ?Sized>(d: usize, k: usize, n: usize, rng: &mut R) -> Estimate {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let a = haar_random_state(d, rng);
        let b = haar_random_state(d, rng);
        let x = a.dotc(&b).norm_sqr().powi(k as i32);
        s += x;
        s2 += x * x;
    }
    Estimate::from_samples(s, s2, n)
}

/// Empirical E[φ^{⊗k} φ^{⊗k}†] over Haar states.
pub fn haar_state_moment_mc<R: Rng + ?Sized>(d: usize, k: usize, n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let dim = (d as u128).pow(k as u32);
    check_size(dim, dim)?;
    let mut acc = ComplexMatrix::zeros(dim as usize, dim as usize);
    for _ in 0..n {
        let v = kron_vec_power(&haar_random_state(d, rng), k);
        acc.gerc(C64::new(1.0, 0.0), &v, &v, C64::new(1.0, 0.0));
    }
    Ok(acc.unscale(n as f64))
}

/// Empirical mean of (V* ⊗ V)^{⊗k} with entrywise standard errors.
pub fn haar_unitary_moment_mc<R: Rng + ?Sized>(d: usize, k: usize, n: usize, rng: &mut R) -> Result<MomentEstimate> {
    let dim = (d as u128).pow(2 * k as u32);
    check_size(dim, dim)?;
    let dim = dim as usize;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    let mut sq = DMatrix::<f64>::zeros(dim, dim);
    for _ in 0..n {
        let m = channel_power(&haar_random_unitary(d, rng), k)?;
        sq.zip_apply(&m, |s, z| *s += z.norm_sqr());
        sum += m;
    }
    let nf = n as f64;
    let mean = sum.unscale(nf);
    let stderr = DMatrix::from_fn(dim, dim, |r, c| {
        let var = (sq[(r, c)] / nf - mean[(r, c)].norm_sqr()).max(0.0);
        if n > 1 { (var / (nf - 1.0)).sqrt() } else { 0.0 }
    });
    Ok(MomentEstimate { mean, stderr, samples: n })
}

/// Exact E_Haar[(V* ⊗ V)^{⊗k}]: the orthogonal projector onto the span of the
/// vectorized permutation operators, built as A G⁺ Aᵀ with G the Gram matrix.
pub fn haar_unitary_moment(d: usize, k: usize) -> Result<ComplexMatrix> {
    let dim = (d as u128).pow(2 * k as u32);
    check_size(dim, dim)?;
    let dim = dim as usize;
    let perms = Permutation::all(k)?;
    let np = perms.len();
    let mut a = DMatrix::<f64>::zeros(dim, np);
    // Row index runs over ((a_1 c_1)(a_2 c_2)…); entry 1 iff c_j = a_{σ(j)}.
    let mut ac = alloc::vec![0usize; 2 * k];
    for row in 0..dim {
        let mut x = row;
        for slot in (0..2 * k).rev() {
            ac[slot] = x % d;
            x /= d;
        }
        for (col, s) in perms.iter().enumerate() {
            if (0..k).all(|j| ac[2 * j + 1] == ac[2 * s.apply(j)]) {
                a[(row, col)] = 1.0;
            }
        }
    }
    let g = a.transpose() * &a;
    let eig = SymmetricEigen::new(g);
    let tol = 1e-9 * eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut ginv = DMatrix::<f64>::zeros(np, np);
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l > tol {
            let v = eig.eigenvectors.column(i);
            ginv += (v * v.transpose()).unscale(l);
        }
    }
    let p = &a * ginv * a.transpose();
    Ok(p.map(|x| C64::new(x, 0.0)))
}

/// Haar average of V† O V: tr(O) 𝟙 / d.
pub fn heisenberg_first_twirl(o: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !o.is_square() {
        return Err(Error::arg("twirl needs a square operator"));
    }
    let d = o.nrows();
    Ok(identity(d) * (o.trace() / d as f64))
}

/// Frame potential recomputed from a channel moment: ‖E[V^{⊗k,k}]‖²_F.
pub fn frame_potential_from_moment(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
pub(crate) fn omega_projector(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = C64::new(1.0 / d as f64, 0.0);
        }
    }
    m
}

/// Eigenvalues of the state moment (used by invariant checks).
pub fn state_moment_spectrum(d: usize, k: usize) -> Result<Vec<f64>> {
    Ok(crate::qcore::hermitian_eigenvalues(&haar_state_moment(d, k)?))
}
