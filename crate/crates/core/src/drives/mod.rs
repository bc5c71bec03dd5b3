//! Drive families behind one [`DriveSpec`], and time evolution.

mod floquet;
mod great_circle;
mod kick;

use alloc::vec::Vec;

pub use floquet::{qubit_cue_drive, qubit_cue_parent, FloquetDecomposition, ParentUnitary};
pub use great_circle::{great_circle_3design_drive, octahedron_states, GreatCircleLoop, LOOP_ORDER};
pub use kick::{
    cosine_drive, cosine_envelope, design_cycle_drive, fibonacci_drive, fibonacci_selector,
    floquet_kick_drive, Gate, GateRule, KickSequence, GOLDEN_OMEGA2,
};

use crate::qcore::{identity, ComplexMatrix, StateVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum DriveSpec {
    Kick(KickSequence),
    Floquet(FloquetDecomposition),
}

impl DriveSpec {
    pub fn dim(&self) -> usize {
        match self {
            DriveSpec::Kick(k) => k.dim(),
            DriveSpec::Floquet(f) => f.dim(),
        }
    }

    pub fn as_floquet(&self) -> Option<&FloquetDecomposition> {
        match self {
            DriveSpec::Floquet(f) => Some(f),
            DriveSpec::Kick(_) => None,
        }
    }

    pub fn as_kick(&self) -> Option<&KickSequence> {
        match self {
            DriveSpec::Kick(k) => Some(k),
            DriveSpec::Floquet(_) => None,
        }
    }

    /// Calls `f(t, U(t))` for each requested time without storing the trace.
    pub fn visit(&self, times: &[f64], mut f: impl FnMut(f64, &ComplexMatrix)) -> Result<()> {
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::arg("times must be non-decreasing"));
        }
        match self {
            DriveSpec::Floquet(dec) => {
                for &t in times {
                    if !(t >= 0.0) {
                        return Err(Error::arg("times must be non-negative"));
                    }
                    f(t, &dec.unitary(t));
                }
            }
            DriveSpec::Kick(seq) => {
                let mut u = identity(seq.dim());
                let mut step = 0u64;
                for &t in times {
                    if !(t >= 0.0) || t != libm::trunc(t) {
                        return Err(Error::arg("kick drives are sampled at non-negative integer times"));
                    }
                    let target = t as u64;
                    while step < target {
                        step += 1;
                        u = seq.gate(step)? * u;
                    }
                    f(t, &u);
                }
            }
        }
        Ok(())
    }
}

/// Sampled unitaries and optionally the states they produce from ψ(0).
#[derive(Clone, Debug, Default)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub unitaries: Vec<ComplexMatrix>,
    pub states: Option<Vec<StateVector>>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trace holding only states (e.g. externally produced trajectories).
    pub fn from_states(times: Vec<f64>, states: Vec<StateVector>) -> Self {
        Self { times, unitaries: Vec::new(), states: Some(states) }
    }

    pub fn from_unitaries(times: Vec<f64>, unitaries: Vec<ComplexMatrix>) -> Self {
        Self { times, unitaries, states: None }
    }
}

pub fn evolve(spec: &DriveSpec, times: &[f64], psi0: Option<&StateVector>) -> Result<EvolutionTrace> {
    if let Some(p) = psi0 {
        if p.len() != spec.dim() {
            return Err(Error::arg("initial state dimension differs from drive"));
        }
    }
    let mut trace = EvolutionTrace {
        times: Vec::with_capacity(times.len()),
        unitaries: Vec::with_capacity(times.len()),
        states: psi0.map(|_| Vec::with_capacity(times.len())),
    };
    spec.visit(times, |t, u| {
        trace.times.push(t);
        if let (Some(states), Some(p)) = (trace.states.as_mut(), psi0) {
            states.push(u * p);
        }
        trace.unitaries.push(u.clone());
    })?;
    Ok(trace)
}

/// 0, 1, …, T−1 as sample times.
pub fn integer_times(t: usize) -> Vec<f64> {
    (0..t).map(|n| n as f64).collect()
}
