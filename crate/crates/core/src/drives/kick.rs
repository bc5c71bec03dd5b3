use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::qcore::{
    expm_hermitian, hermiticity_error, identity, matrix_log_principal, unitarity_error, ComplexMatrix,
};
use crate::{Error, Result};

/// π(3 − √5) = 2π(1 − 1/φ): golden-ratio default for the second tone.
pub const GOLDEN_OMEGA2: f64 = PI * (3.0 - 2.236_067_977_499_79);

/// Unitary kick together with a Hermitian generator, U = e^{−iH}.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub unitary: ComplexMatrix,
    pub generator: ComplexMatrix,
}

impl Gate {
    pub fn from_hamiltonian(h: &ComplexMatrix) -> Result<Self> {
        check_hermitian(h)?;
        Ok(Self { unitary: expm_hermitian(h, 1.0), generator: h.clone() })
    }

    /// Uses the principal logarithm as generator.
    pub fn from_unitary(u: ComplexMatrix) -> Result<Self> {
        if unitarity_error(&u) > 1e-10 {
            return Err(Error::arg("gate is not unitary"));
        }
        let generator = matrix_log_principal(&u)?;
        Ok(Self { unitary: u, generator })
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if hermiticity_error(h) > 1e-10 {
        return Err(Error::arg("Hamiltonian is not Hermitian"));
    }
    Ok(())
}

/// Gate applied at step n ≥ 1; U(n) = G_n ⋯ G_1.
#[derive(Clone, Debug)]
pub enum GateRule {
    Constant(Gate),
    /// Finite list: step n uses entry n − 1.
    Sequence(Vec<Gate>),
    /// Even n → `even`, odd n → `odd`.
    Alternating { even: Gate, odd: Gate },
    /// e^{−i[(1−x)h0 + x h1]}, x = (1 + cos(ω₂ n/ω₁))/2.
    Cosine { h0: ComplexMatrix, h1: ComplexMatrix, omega1: f64, omega2: f64 },
    /// `g1` when ω₂ n/ω₁ mod 2π lies in [2π − ω₂, 2π), else `g0`.
    Fibonacci { g0: Gate, g1: Gate, omega1: f64, omega2: f64 },
    /// Periodic cycle: step j applies V_{j mod n} V_{j−1 mod n}†.
    Cycle(Vec<Gate>),
}

#[derive(Clone, Debug)]
pub struct KickSequence {
    d: usize,
    rule: GateRule,
}

pub fn cosine_envelope(n: u64, omega1: f64, omega2: f64) -> f64 {
    let theta = crate::wrap_angle(omega2 * n as f64 / omega1);
    0.5 * (1.0 + libm::cos(theta))
}

pub fn fibonacci_selector(n: u64, omega1: f64, omega2: f64) -> bool {
    let theta = crate::wrap_angle(omega2 * n as f64 / omega1);
    theta >= TAU - omega2
}

impl KickSequence {
    pub fn new(d: usize, rule: GateRule) -> Result<Self> {
        let dims_ok = |g: &Gate| g.unitary.nrows() == d && g.unitary.is_square();
        let ok = match &rule {
            GateRule::Constant(g) => dims_ok(g),
            GateRule::Sequence(gs) | GateRule::Cycle(gs) => gs.iter().all(dims_ok),
            GateRule::Alternating { even, odd } => dims_ok(even) && dims_ok(odd),
            GateRule::Fibonacci { g0, g1, .. } => dims_ok(g0) && dims_ok(g1),
            GateRule::Cosine { h0, h1, .. } => h0.nrows() == d && h1.shape() == h0.shape(),
        };
        if !ok {
            return Err(Error::arg("gate dimensions differ from drive dimension"));
        }
        Ok(Self { d, rule })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rule(&self) -> &GateRule {
        &self.rule
    }

    pub fn period(&self) -> Option<usize> {
        match &self.rule {
            GateRule::Constant(_) => Some(1),
            GateRule::Alternating { .. } => Some(2),
            GateRule::Cycle(gs) => Some(gs.len()),
            _ => None,
        }
    }

    fn cosine_hamiltonian(h0: &ComplexMatrix, h1: &ComplexMatrix, x: f64) -> ComplexMatrix {
        h0.scale(1.0 - x) + h1.scale(x)
    }

    /// Hermitian generator of the step-n kick.
    pub fn generator(&self, n: u64) -> Result<ComplexMatrix> {
        Ok(match &self.rule {
            GateRule::Cosine { h0, h1, omega1, omega2 } => {
                Self::cosine_hamiltonian(h0, h1, cosine_envelope(n, *omega1, *omega2))
            }
            _ => self.gate_ref(n)?.generator.clone(),
        })
    }

    pub fn gate(&self, n: u64) -> Result<ComplexMatrix> {
        Ok(match &self.rule {
            GateRule::Cosine { .. } => expm_hermitian(&self.generator(n)?, 1.0),
            _ => self.gate_ref(n)?.unitary.clone(),
        })
    }

    fn gate_ref(&self, n: u64) -> Result<&Gate> {
        if n == 0 {
            return Err(Error::arg("kick steps start at n = 1"));
        }
        Ok(match &self.rule {
            GateRule::Constant(g) => g,
            GateRule::Sequence(gs) => gs
                .get(n as usize - 1)
                .ok_or_else(|| Error::arg("step beyond the end of the gate sequence"))?,
            GateRule::Alternating { even, odd } => {
                if n % 2 == 0 {
                    even
                } else {
                    odd
                }
            }
            GateRule::Fibonacci { g0, g1, omega1, omega2 } => {
                if fibonacci_selector(n, *omega1, *omega2) {
                    g1
                } else {
                    g0
                }
            }
            GateRule::Cycle(gs) => &gs[(n % gs.len() as u64) as usize],
            GateRule::Cosine { .. } => unreachable!("cosine gates are built on demand"),
        })
    }

    /// G_to ⋯ G_{from+1}.
    pub fn segment(&self, from: u64, to: u64) -> Result<ComplexMatrix> {
        let mut u = identity(self.d);
        for n in from + 1..=to {
            u = self.gate(n)? * u;
        }
        Ok(u)
    }
}

pub fn floquet_kick_drive(h0: &ComplexMatrix, h1: &ComplexMatrix) -> Result<KickSequence> {
    if h0.shape() != h1.shape() {
        return Err(Error::arg("h0 and h1 differ in shape"));
    }
    let rule = GateRule::Alternating { even: Gate::from_hamiltonian(h0)?, odd: Gate::from_hamiltonian(h1)? };
    KickSequence::new(h0.nrows(), rule)
}

pub fn cosine_drive(h0: &ComplexMatrix, h1: &ComplexMatrix, omega1: f64, omega2: f64) -> Result<KickSequence> {
    check_hermitian(h0)?;
    check_hermitian(h1)?;
    if omega1 == 0.0 {
        return Err(Error::arg("ω₁ must be nonzero"));
    }
    let rule = GateRule::Cosine { h0: h0.clone(), h1: h1.clone(), omega1, omega2 };
    KickSequence::new(h0.nrows(), rule)
}

pub fn fibonacci_drive(h0: &ComplexMatrix, h1: &ComplexMatrix, omega1: f64, omega2: f64) -> Result<KickSequence> {
    if !(omega2 > 0.0 && omega2 < TAU) {
        return Err(Error::arg("Fibonacci drive needs 0 < ω₂ < 2π"));
    }
    if omega1 == 0.0 {
        return Err(Error::arg("ω₁ must be nonzero"));
    }
    let rule = GateRule::Fibonacci {
        g0: Gate::from_hamiltonian(h0)?,
        g1: Gate::from_hamiltonian(h1)?,
        omega1,
        omega2,
    };
    KickSequence::new(h0.nrows(), rule)
}

/// Cycles through `designs` (first element 𝟙): U(j) = V_{j mod n}.
pub fn design_cycle_drive(designs: &[ComplexMatrix]) -> Result<KickSequence> {
    let first = designs.first().ok_or_else(|| Error::arg("design list is empty"))?;
    let d = first.nrows();
    if crate::qcore::max_abs(&(first - identity(d))) > 1e-10 {
        return Err(Error::arg("first design element must be the identity"));
    }
    if designs.iter().any(|v| v.nrows() != d || unitarity_error(v) > 1e-10) {
        return Err(Error::arg("design elements must be unitary of equal dimension"));
    }
    let n = designs.len();
    let gates = (0..n)
        .map(|j| Gate::from_unitary(&designs[j] * designs[(j + n - 1) % n].adjoint()))
        .collect::<Result<Vec<_>>>()?;
    KickSequence::new(d, GateRule::Cycle(gates))
}
