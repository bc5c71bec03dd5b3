#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::great_circle::GreatCircleLoop;
use crate::euler::CueParent;
use crate::lattice::ErgodicLattice;
use crate::qcore::{basis_state, identity, ComplexMatrix, StateVector, C64};
use crate::{Error, Result};

/// Parent unitary P(θ) on the m-torus.
#[derive(Clone, Debug)]
pub enum ParentUnitary {
    Identity { d: usize, m: usize },
    /// 2×2 Euler form with ξ(θ₁) = arccos √|1 − θ₁/π|; m = 2.
    QubitCue,
    GreatCircle(GreatCircleLoop),
    Lattice(Box<ErgodicLattice>),
    Cue(CueParent),
}

pub fn qubit_cue_parent(theta1: f64, theta2: f64) -> ComplexMatrix {
    let p = (1.0 - crate::wrap_angle(theta1) / PI).abs();
    let xi = libm::acos(libm::sqrt(p));
    let (s, c) = (libm::sin(xi), libm::cos(xi));
    let e = C64::from_polar(1.0, theta2);
    ComplexMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), -e * s, e.conj() * s, C64::new(c, 0.0)])
}

impl ParentUnitary {
    pub fn dim(&self) -> usize {
        match self {
            ParentUnitary::Identity { d, .. } => *d,
            ParentUnitary::QubitCue | ParentUnitary::GreatCircle(_) => 2,
            ParentUnitary::Lattice(l) => l.d,
            ParentUnitary::Cue(c) => c.d,
        }
    }

    pub fn tones(&self) -> usize {
        match self {
            ParentUnitary::Identity { m, .. } => *m,
            ParentUnitary::QubitCue => 2,
            ParentUnitary::GreatCircle(_) => 1,
            ParentUnitary::Lattice(l) => l.m,
            ParentUnitary::Cue(c) => c.tones(),
        }
    }

    pub fn eval(&self, theta: &[f64]) -> ComplexMatrix {
        match self {
            ParentUnitary::Identity { d, .. } => identity(*d),
            ParentUnitary::QubitCue => qubit_cue_parent(theta[0], theta[1]),
            ParentUnitary::GreatCircle(g) => g.parent(theta[0]),
            ParentUnitary::Lattice(l) => l.parent(theta),
            ParentUnitary::Cue(c) => c.eval(theta),
        }
    }
}

/// U(t) = P(ωt mod 2π) · e^{−iQt} · F†, with F = P(0) (𝟙 unless set).
#[derive(Clone, Debug)]
pub struct FloquetDecomposition {
    parent: ParentUnitary,
    omegas: Vec<f64>,
    quasienergies: Vec<f64>,
    frame: Option<ComplexMatrix>,
}

impl FloquetDecomposition {
    /// `quasienergies` is the full diagonal of Q (length d).
    pub fn new(
        parent: ParentUnitary,
        omegas: Vec<f64>,
        quasienergies: Vec<f64>,
        frame: Option<ComplexMatrix>,
    ) -> Result<Self> {
        if omegas.len() != parent.tones() {
            return Err(Error::arg("frequency count differs from the parent's tone count"));
        }
        if quasienergies.len() != parent.dim() {
            return Err(Error::arg("Q must have one quasienergy per level"));
        }
        if let Some(f) = &frame {
            if f.nrows() != parent.dim() {
                return Err(Error::arg("frame dimension mismatch"));
            }
        }
        Ok(Self { parent, omegas, quasienergies, frame })
    }

    pub fn dim(&self) -> usize {
        self.parent.dim()
    }

    pub fn tones(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn quasienergies(&self) -> &[f64] {
        &self.quasienergies
    }

    pub fn parent(&self) -> &ParentUnitary {
        &self.parent
    }

    pub fn frame(&self) -> ComplexMatrix {
        self.frame.clone().unwrap_or_else(|| identity(self.dim()))
    }

    /// Torus point ωt mod 2π.
    pub fn angles(&self, t: f64) -> Vec<f64> {
        self.omegas.iter().map(|w| crate::wrap_angle(w * t)).collect()
    }

    pub fn parent_at(&self, theta: &[f64]) -> ComplexMatrix {
        self.parent.eval(theta)
    }

    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        let mut p = self.parent.eval(&self.angles(t));
        for (c, q) in self.quasienergies.iter().enumerate() {
            let ph = C64::from_polar(1.0, -q * t);
            for r in 0..p.nrows() {
                p[(r, c)] *= ph;
            }
        }
        match &self.frame {
            Some(f) => p * f.adjoint(),
            None => p,
        }
    }

    /// |α(θ)⟩ = P(θ)|α⟩.
    pub fn qe_state(&self, alpha: usize, theta: &[f64]) -> StateVector {
        self.parent.eval(theta) * basis_state(self.dim(), alpha)
    }

    pub fn with_frame_at_origin(mut self) -> Self {
        let p0 = self.parent.eval(&vec![0.0; self.tones()]);
        self.frame = Some(p0);
        self
    }
}

/// Qubit drive with Q = diag(−q, q) that visits SU(2) uniformly.
pub fn qubit_cue_drive(omega1: f64, omega2: f64, q: f64) -> FloquetDecomposition {
    FloquetDecomposition::new(ParentUnitary::QubitCue, vec![omega1, omega2], vec![-q, q], None)
        .expect("qubit parent has two tones and two levels")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{density, max_abs, unitarity_error};
    use crate::quadrature::TorusQuadrature;

    #[test]
    fn origin_is_identity() {
        let dec = qubit_cue_drive(1.0, 2f64.sqrt(), 3f64.sqrt());
        assert!(max_abs(&(dec.unitary(0.0) - identity(2))) < 1e-15);
    }

    #[test]
    fn closed_form_matches_explicit_entries() {
        let (w1, w2, q) = (1.0, 2f64.sqrt(), 0.37);
        let dec = qubit_cue_drive(w1, w2, q);
        for t in [0.3, 2.0, 11.7] {
            let p = (1.0 - crate::wrap_angle(w1 * t) / PI).abs();
            let xi = libm::acos(libm::sqrt(p));
            let (s, c) = (libm::sin(xi), libm::cos(xi));
            let ph = |a: f64| C64::from_polar(1.0, a);
            let expected = ComplexMatrix::from_row_slice(
                2,
                2,
                &[ph(q * t) * c, -ph((w2 - q) * t) * s, ph(-(w2 - q) * t) * s, ph(-q * t) * c],
            );
            assert!(max_abs(&(dec.unitary(t) - expected)) < 1e-12);
        }
    }

    #[test]
    fn half_turn_maps_zero_to_one() {
        for theta2 in [0.0, 1.0, 4.0] {
            let v = qubit_cue_parent(PI, theta2) * basis_state(2, 0);
            assert!((v[1].norm() - 1.0).abs() < 1e-14);
            assert!((v[1] - C64::from_polar(1.0, -theta2)).norm() < 1e-14);
        }
    }

    #[test]
    fn grid_first_moment_is_maximally_mixed() {
        let q = TorusQuadrature::new(400);
        let mut acc = ComplexMatrix::zeros(2, 2);
        q.for_each(2, |t| acc += density(&(qubit_cue_parent(t[0], t[1]) * basis_state(2, 0))));
        let m = acc * C64::new(q.weight(2), 0.0);
        assert!(max_abs(&(m - identity(2).scale(0.5))) < 5e-3);
    }

    #[test]
    fn validation() {
        assert!(FloquetDecomposition::new(ParentUnitary::QubitCue, vec![1.0], vec![0.0, 0.0], None).is_err());
        assert!(FloquetDecomposition::new(ParentUnitary::QubitCue, vec![1.0, 2.0], vec![0.0], None).is_err());
        let dec = FloquetDecomposition::new(ParentUnitary::Identity { d: 3, m: 0 }, vec![], vec![0.1, 0.2, -0.3], None).unwrap();
        assert!(unitarity_error(&dec.unitary(5.0)) < 1e-14);
    }
}
