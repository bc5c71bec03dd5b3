//! Uniform midpoint product grids on the m-torus.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusQuadrature {
    pub points_per_tone: usize,
    /// Doubling check threshold; `None` skips the refinement pass.
    pub doubling_tol: Option<f64>,
}

impl Default for TorusQuadrature {
    fn default() -> Self {
        Self { points_per_tone: 512, doubling_tol: Some(1e-3) }
    }
}

impl TorusQuadrature {
    pub fn new(points_per_tone: usize) -> Self {
        Self { points_per_tone, doubling_tol: None }
    }

    pub fn with_doubling(mut self, tol: f64) -> Self {
        self.doubling_tol = Some(tol);
        self
    }

    pub fn doubled(&self) -> Self {
        Self { points_per_tone: 2 * self.points_per_tone, doubling_tol: None }
    }

    pub fn point_count(&self, m: usize) -> usize {
        self.points_per_tone.pow(m as u32)
    }

    /// Calls `f(θ)` at every node; all nodes share weight 1/N^m.
    pub fn for_each(&self, m: usize, mut f: impl FnMut(&[f64])) {
        let n = self.points_per_tone;
        let h = TAU / n as f64;
        let mut idx = vec![0usize; m];
        let mut theta: Vec<f64> = vec![0.5 * h; m];
        loop {
            f(&theta);
            let mut j = 0;
            loop {
                if j == m {
                    return;
                }
                idx[j] += 1;
                if idx[j] < n {
                    theta[j] = (idx[j] as f64 + 0.5) * h;
                    break;
                }
                idx[j] = 0;
                theta[j] = 0.5 * h;
                j += 1;
            }
        }
    }

    pub fn weight(&self, m: usize) -> f64 {
        1.0 / self.point_count(m) as f64
    }
}
