use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{check_size, ComplexMatrix, C64};
use crate::{Error, Result};

/// Largest k for which all of S_k is enumerated.
pub const PERMUTATION_CAP: usize = 10;

/// Permutation of {0..k−1}; `images[j] = π(j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(Error::arg("not a permutation"));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// From one-based images, e.g. `[2, 1]` for the transposition (1 2).
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::arg("one-based images must be ≥ 1"));
        }
        Self::new(images.iter().map(|i| i - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self { images: (0..k).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self { images: other.images.iter().map(|&j| self.images[j]).collect() }
    }

    /// Left-to-right product: `j ↦ other(self(j))`.
    pub fn then(&self, other: &Self) -> Self {
        other.compose(self)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            inv[i] = j;
        }
        Self { images: inv }
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut cycles = 0;
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
            }
        }
        cycles
    }

    pub fn longest_increasing_subsequence(&self) -> usize {
        let mut tails: Vec<usize> = Vec::new();
        for &x in &self.images {
            match tails.binary_search(&x) {
                Ok(_) => {}
                Err(p) if p == tails.len() => tails.push(x),
                Err(p) => tails[p] = x,
            }
        }
        tails.len()
    }

    /// All of S_k in lexicographic order.
    pub fn all(k: usize) -> Result<Vec<Self>> {
        if k > PERMUTATION_CAP {
            return Err(Error::Enumeration {
                requested: factorial(k),
                cap: factorial(PERMUTATION_CAP),
            });
        }
        let mut out = Vec::with_capacity(factorial(k) as usize);
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Self { images: cur.clone() });
            if !next_lexicographic(&mut cur) {
                break;
            }
        }
        Ok(out)
    }
}

fn next_lexicographic(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

pub fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Dimension of the symmetric subspace of (C^d)^{⊗k}.
pub fn symmetric_dimension(d: usize, k: usize) -> u128 {
    binomial((d + k - 1) as u64, k as u64)
}

fn digits(mut index: usize, d: usize, k: usize, out: &mut [usize]) {
    for j in (0..k).rev() {
        out[j] = index % d;
        index /= d;
    }
}

fn undigits(ds: &[usize], d: usize) -> usize {
    ds.iter().fold(0, |acc, &x| acc * d + x)
}

fn check_tensor(d: usize, k: usize) -> Result<usize> {
    let dim = (d as u128).saturating_pow(k as u32);
    check_size(dim, dim)?;
    Ok(dim as usize)
}

/// `V_π` on (C^d)^{⊗k}: slot j of the output carries input factor π(j).
pub fn permutation_operator(pi: &Permutation, d: usize, k: usize) -> Result<ComplexMatrix> {
    if pi.len() != k {
        return Err(Error::arg("permutation length differs from k"));
    }
    let dim = check_tensor(d, k)?;
    let mut m = ComplexMatrix::zeros(dim, dim);
    let mut inp = vec![0; k];
    let mut out = vec![0; k];
    for col in 0..dim {
        digits(col, d, k, &mut inp);
        for j in 0..k {
            out[j] = inp[pi.apply(j)];
        }
        m[(undigits(&out, d), col)] = C64::new(1.0, 0.0);
    }
    Ok(m)
}

/// Π_sym = (1/k!) Σ_π V_π.
pub fn symmetric_projector(d: usize, k: usize) -> Result<ComplexMatrix> {
    let perms = Permutation::all(k)?;
    let dim = check_tensor(d, k)?;
    let w = 1.0 / perms.len() as f64;
    let mut m = ComplexMatrix::zeros(dim, dim);
    let mut inp = vec![0; k];
    let mut out = vec![0; k];
    for col in 0..dim {
        digits(col, d, k, &mut inp);
        for pi in &perms {
            for j in 0..k {
                out[j] = inp[pi.apply(j)];
            }
            m[(undigits(&out, d), col)] += w;
        }
    }
    Ok(m)
}

/// Number of permutations of S_k whose longest increasing subsequence is ≤ d.
pub fn lis_permutation_count(k: usize, d: usize) -> Result<u128> {
    Ok(Permutation::all(k)?
        .iter()
        .filter(|p| p.longest_increasing_subsequence() <= d)
        .count() as u128)
}

/// Number of distinct rearrangements of a tuple (k!/Π multiplicity!).
pub fn distinct_arrangements(alpha: &[usize]) -> u128 {
    let mut sorted = alpha.to_vec();
    sorted.sort_unstable();
    let mut denom: u128 = 1;
    let mut run = 1;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    denom *= factorial(run);
    factorial(alpha.len()) / denom
}

/// Non-decreasing k-tuples over {0..d−1}: one representative per multiset.
pub fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    if d == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] + 1 < d {
                let v = cur[j] + 1;
                for x in cur[j..].iter_mut() {
                    *x = v;
                }
                break;
            }
        }
    }
}
