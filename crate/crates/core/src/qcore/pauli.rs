use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::linalg::{check_size, ComplexMatrix, StateVector, C64, I, ONE, ZERO};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> ComplexMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        ComplexMatrix::from_row_slice(2, 2, &m)
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Tensor product of single-site Paulis; site 1 is the most significant qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

/// Bit-mask form: S|b⟩ = phase · (−1)^{|b∧z|} |b ⊕ x⟩.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
    pub phase: C64,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(l: usize) -> Self {
        Self { letters: alloc::vec![Pauli::I; l] }
    }

    /// Letter `p` on one-based `site`, identity elsewhere.
    pub fn single(l: usize, site: usize, p: Pauli) -> Self {
        let mut s = Self::identity(l);
        s.letters[site - 1] = p;
        s
    }

    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| Pauli::from_symbol(c).ok_or_else(|| Error::arg("Pauli letters are I, X, Y, Z")))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.symbol()).collect()
    }

    pub fn mask(&self) -> PauliMask {
        let l = self.len();
        let (mut x, mut z, mut ny) = (0usize, 0usize, 0u32);
        for (j, p) in self.letters.iter().enumerate() {
            let bit = 1usize << (l - 1 - j);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        PauliMask { x, z, phase: I.powu(ny) }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let dim = 1u128 << self.len();
        check_size(dim, dim)?;
        let mut out = ComplexMatrix::identity(1, 1);
        for p in &self.letters {
            out = out.kronecker(&p.matrix());
        }
        Ok(out)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        self.mask().apply(psi)
    }

    pub fn expectation(&self, psi: &StateVector) -> f64 {
        self.mask().expectation(psi.as_slice())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl PauliMask {
    #[inline]
    fn sign(&self, b: usize) -> f64 {
        if (b & self.z).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(psi.len());
        for (b, amp) in psi.iter().enumerate() {
            out[b ^ self.x] = self.phase * self.sign(b) * amp;
        }
        out
    }

    /// ⟨ψ|S|ψ⟩ (real for Hermitian S).
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (b, amp) in psi.iter().enumerate() {
            acc += psi[b ^ self.x].conj() * amp * self.sign(b);
        }
        (acc * self.phase).re
    }
}
