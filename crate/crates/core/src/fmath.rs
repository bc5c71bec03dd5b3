//! Float helpers that work without `std`.

#[allow(unused_imports)]
pub(crate) use num_traits::Float;

use core::f64::consts::TAU;

/// x mod 2π in [0, 2π).
pub fn wrap_angle(x: f64) -> f64 {
    let r = x - TAU * libm::floor(x / TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}
