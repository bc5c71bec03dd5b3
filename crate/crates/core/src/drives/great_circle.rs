use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, TAU};

use super::floquet::{FloquetDecomposition, ParentUnitary};
use crate::qcore::{ComplexMatrix, StateVector, C64};

/// Bloch-sphere axes visited by the loop, in order (closed: last = first).
/// Every octahedron edge is traversed once and every corner is a right angle.
pub const LOOP_ORDER: [&str; 13] = ["z", "x", "y", "z", "-x", "y", "-z", "x", "-y", "-z", "-x", "-y", "z"];

fn axis_state(label: &str) -> StateVector {
    let h = FRAC_1_SQRT_2;
    let v = match label {
        "z" => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        "-z" => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        "x" => [C64::new(h, 0.0), C64::new(h, 0.0)],
        "-x" => [C64::new(h, 0.0), C64::new(-h, 0.0)],
        "y" => [C64::new(h, 0.0), C64::new(0.0, h)],
        "-y" => [C64::new(h, 0.0), C64::new(0.0, -h)],
        _ => unreachable!("unknown axis"),
    };
    StateVector::from_row_slice(&v)
}

/// The six octahedron states |0⟩, |1⟩, |±⟩, |±i⟩.
pub fn octahedron_states() -> Vec<StateVector> {
    ["z", "-z", "x", "-x", "y", "-y"].iter().map(|a| axis_state(a)).collect()
}

/// (a, b) ↦ (−b*, a*).
pub(crate) fn perp(v: &StateVector) -> StateVector {
    StateVector::from_row_slice(&[-v[1].conj(), v[0].conj()])
}

/// Closed constant-speed loop of quarter great circles on the Bloch sphere.
#[derive(Clone, Debug)]
pub struct GreatCircleLoop {
    arcs: Vec<(StateVector, StateVector)>,
}

impl Default for GreatCircleLoop {
    fn default() -> Self {
        Self::new()
    }
}

impl GreatCircleLoop {
    pub fn new() -> Self {
        let arcs = LOOP_ORDER
            .windows(2)
            .map(|w| {
                let a = axis_state(w[0]);
                let b = axis_state(w[1]);
                // Rephase b so ⟨a|b⟩ > 0; then the geodesic is cos τ a + sin τ c.
                let ov = a.dotc(&b);
                let b = b * (ov.conj() / ov.norm());
                let c = &b - &a * a.dotc(&b);
                let c = c.unscale(c.norm());
                (a, c)
            })
            .collect();
        Self { arcs }
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Loop state at θ ∈ [0, 2π).
    pub fn state(&self, theta: f64) -> StateVector {
        let n = self.arcs.len();
        let x = crate::wrap_angle(theta) / TAU * n as f64;
        let i = (x as usize).min(n - 1);
        let tau = (x - i as f64) * FRAC_PI_4;
        let (a, c) = &self.arcs[i];
        a * C64::new(libm::cos(tau), 0.0) + c * C64::new(libm::sin(tau), 0.0)
    }

    pub fn parent(&self, theta: f64) -> ComplexMatrix {
        let v = self.state(theta);
        let w = perp(&v);
        ComplexMatrix::from_columns(&[v, w])
    }

    /// Bloch-sphere length of the whole loop.
    pub fn bloch_length(&self) -> f64 {
        self.arcs.len() as f64 * core::f64::consts::FRAC_PI_2
    }
}

/// Qubit drive whose α = 0 quasienergy state runs along [`GreatCircleLoop`].
pub fn great_circle_3design_drive(omega: f64, q: f64) -> FloquetDecomposition {
    FloquetDecomposition::new(
        ParentUnitary::GreatCircle(GreatCircleLoop::new()),
        alloc::vec![omega],
        alloc::vec![-q, q],
        None,
    )
    .expect("loop parent is a one-tone qubit")
}
