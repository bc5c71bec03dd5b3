#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::{check_size, ComplexMatrix, StateVector, C64};
use super::pauli::{PauliMask, PauliString};
use crate::Result;

/// Real linear combination of Pauli strings on `n_qubits`, applied matrix-free.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliMask)>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn push(&mut self, coef: f64, s: &PauliString) {
        assert_eq!(s.len(), self.n_qubits);
        self.terms.push((coef, s.mask()));
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits);
        let mut terms: Vec<_> = self.terms.iter().map(|&(c, m)| (a * c, m)).collect();
        terms.extend(other.terms.iter().map(|&(c, m)| (b * c, m)));
        Self { n_qubits: self.n_qubits, terms }
    }

    /// Upper bound on the spectral norm (Σ|c|).
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn apply_into(&self, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (c, m) in &self.terms {
            let w = m.phase * *c;
            for (b, amp) in psi.iter().enumerate() {
                let s = if (b & m.z).count_ones() % 2 == 0 { w } else { -w };
                out[b ^ m.x] += s * amp;
            }
        }
    }

    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let dim = self.dim();
        check_size(dim as u128, dim as u128)?;
        let mut m = ComplexMatrix::zeros(dim, dim);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        let mut e = vec![C64::new(0.0, 0.0); dim];
        for c in 0..dim {
            e[c] = C64::new(1.0, 0.0);
            self.apply_into(&e, &mut col);
            for r in 0..dim {
                m[(r, c)] = col[r];
            }
            e[c] = C64::new(0.0, 0.0);
        }
        Ok(m)
    }
}

/// `e^{−iHt}ψ` by Chebyshev expansion on the interval [−‖H‖, ‖H‖].
pub fn expm_apply(h: &PauliSum, t: f64, psi: &StateVector) -> StateVector {
    let dim = psi.len();
    let r = h.norm_bound();
    let b = r * t.abs();
    if b == 0.0 {
        return psi.clone();
    }
    let sgn = t.signum();
    let hs = |x: &[C64], out: &mut [C64]| {
        h.apply_into(x, out);
        out.iter_mut().for_each(|z| *z /= r);
    };
    let mut prev: Vec<C64> = psi.as_slice().to_vec();
    let mut cur = vec![C64::new(0.0, 0.0); dim];
    hs(&prev, &mut cur);
    let mut acc: Vec<C64> = prev.iter().map(|z| z * libm::jn(0, b)).collect();
    // c_n = 2(−i)^n J_n(b) for e^{−i b x}; t < 0 conjugates the phase.
    let minus_i = C64::new(0.0, -sgn);
    let mut phase = minus_i;
    let mut next = vec![C64::new(0.0, 0.0); dim];
    let n_max = (b.ceil() as i32) * 4 + 60;
    let mut n = 1;
    loop {
        let jn = libm::jn(n, b);
        let c = phase * (2.0 * jn);
        for (a, x) in acc.iter_mut().zip(&cur) {
            *a += c * x;
        }
        if (n as f64) > b && jn.abs() < 1e-17 || n >= n_max {
            break;
        }
        hs(&cur, &mut next);
        for ((nx, c), p) in next.iter_mut().zip(&cur).zip(&prev) {
            let _ = c;
            *nx = *nx * 2.0 - p;
        }
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
        phase *= minus_i;
        n += 1;
    }
    StateVector::from_vec(acc)
}
