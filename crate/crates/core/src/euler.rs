//! Hurwitz Euler angles on SU(d), the measure-preserving angle map, and the
//! multi-tone drive whose temporal ensemble of unitaries is Haar.

#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use rand::Rng;

use crate::drives::{FloquetDecomposition, ParentUnitary};
use crate::haar::{haar_unitary_moment, haar_unitary_moment_mc, Estimate};
use crate::qcore::{channel_power, identity, max_abs, ComplexMatrix, C64};
use crate::{Error, Result};

/// Angle table ξ_{r,j}, φ_{r,j} (1 ≤ r ≤ j ≤ d−1) and η_j, stored row-major in j.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerAngles {
    d: usize,
    xi: Vec<f64>,
    phi: Vec<f64>,
    eta: Vec<f64>,
}

fn tri(r: usize, j: usize) -> usize {
    j * (j - 1) / 2 + (r - 1)
}

impl EulerAngles {
    pub fn zeros(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("Euler angles need d ≥ 2"));
        }
        let n = d * (d - 1) / 2;
        Ok(Self { d, xi: vec![0.0; n], phi: vec![0.0; n], eta: vec![0.0; d - 1] })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Always d² − 1.
    pub fn angle_count(&self) -> usize {
        self.xi.len() + self.phi.len() + self.eta.len()
    }

    pub fn xi(&self, r: usize, j: usize) -> f64 {
        self.xi[tri(r, j)]
    }

    pub fn phi(&self, r: usize, j: usize) -> f64 {
        self.phi[tri(r, j)]
    }

    pub fn eta(&self, j: usize) -> f64 {
        self.eta[j - 1]
    }

    pub fn set_xi(&mut self, r: usize, j: usize, v: f64) {
        self.xi[tri(r, j)] = v;
    }

    pub fn set_phi(&mut self, r: usize, j: usize, v: f64) {
        self.phi[tri(r, j)] = v;
    }

    pub fn set_eta(&mut self, j: usize, v: f64) {
        self.eta[j - 1] = v;
    }

    /// Uniform torus point mapped through [`measure_preserving_xi`].
    pub fn sample<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        let mut a = Self::zeros(d)?;
        for j in 1..d {
            for r in 1..=j {
                a.set_xi(r, j, measure_preserving_xi(rng.random::<f64>() * TAU, r));
                a.set_phi(r, j, rng.random::<f64>() * TAU);
            }
            a.set_eta(j, rng.random::<f64>() * TAU);
        }
        Ok(a)
    }
}

/// Identity except for the block on levels (j, j+1) (1-based):
/// [[cos ξ e^{iη}, −sin ξ e^{iφ}], [sin ξ e^{−iφ}, cos ξ e^{−iη}]].
pub fn rotation_matrix(j: usize, xi: f64, phi: f64, eta: f64, d: usize) -> Result<ComplexMatrix> {
    if j == 0 || j >= d {
        return Err(Error::arg("rotation level must satisfy 1 ≤ j ≤ d−1"));
    }
    let mut m = identity(d);
    let (s, c) = (libm::sin(xi), libm::cos(xi));
    let a = j - 1;
    m[(a, a)] = C64::from_polar(c, eta);
    m[(a, a + 1)] = -C64::from_polar(s, phi);
    m[(a + 1, a)] = C64::from_polar(s, -phi);
    m[(a + 1, a + 1)] = C64::from_polar(c, -eta);
    Ok(m)
}

/// V = E₁E₂⋯E_{d−1}, E_j = R_j(ξ_{j,j}) ⋯ R₂(ξ_{2,j}) R₁(ξ_{1,j}, φ_{1,j}, η_j).
///
/// For r ≥ 2 the phase φ_{r,j} sits on the diagonal of R_r. With the phase
/// in the off-diagonal slot the uniform-angle pushforward is not Haar for d ≥ 3.
pub fn hurwitz_unitary(angles: &EulerAngles) -> ComplexMatrix {
    let d = angles.d;
    let mut v = identity(d);
    for j in 1..d {
        for r in (1..=j).rev() {
            let g = if r == 1 {
                rotation_matrix(1, angles.xi(1, j), angles.phi(1, j), angles.eta(j), d)
            } else {
                rotation_matrix(r, angles.xi(r, j), 0.0, angles.phi(r, j), d)
            };
            v *= g.expect("levels in range");
        }
    }
    v
}

/// ξ(θ) = arcsin(|1 − θ/π|^{1/(2r)}), so that (sin ξ)^{2r} is uniform on [0, 1].
pub fn measure_preserving_xi(theta: f64, r: usize) -> f64 {
    let p = (1.0 - theta / PI).abs().min(1.0);
    libm::asin(libm::pow(p, 1.0 / (2 * r) as f64))
}

/// Pushforward of uniform angles through [`hurwitz_unitary`] against Haar.
#[derive(Clone, Debug)]
pub struct PushforwardReport {
    pub d: usize,
    pub samples: usize,
    /// Max entrywise gap of the first channel moment to the exact Haar value.
    pub k1_deviation: f64,
    /// Same gap against an independent Haar Monte-Carlo run of equal size.
    pub k1_deviation_mc: f64,
    /// Largest entrywise standard error of the Haar Monte-Carlo reference.
    pub k1_mc_stderr: f64,
    /// E|tr V|⁴ over the pushforward samples.
    pub k2_frame_potential: Estimate,
    /// Max entrywise gap of the second channel moment (d ≤ 3 only).
    pub k2_deviation: Option<f64>,
}

pub fn haar_pushforward_check<R: Rng + ?Sized>(d: usize, n_samples: usize, rng: &mut R) -> Result<PushforwardReport> {
    if d > 4 {
        return Err(Error::Size { requested: (d as u128).pow(4), cap: 256 });
    }
    if n_samples < 2 {
        return Err(Error::arg("pushforward check needs at least two samples"));
    }
    let with_k2 = d <= 3;
    let mut m1 = ComplexMatrix::zeros(d * d, d * d);
    let mut m2 = if with_k2 { Some(ComplexMatrix::zeros(d.pow(4), d.pow(4))) } else { None };
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n_samples {
        let v = hurwitz_unitary(&EulerAngles::sample(d, rng)?);
        let c1 = channel_power(&v, 1)?;
        if let Some(m2) = m2.as_mut() {
            *m2 += crate::qcore::kron(&c1, &c1)?;
        }
        m1 += c1;
        let x = v.trace().norm_sqr().powi(2);
        s += x;
        s2 += x * x;
    }
    let nf = n_samples as f64;
    let m1 = m1.unscale(nf);
    let mc = haar_unitary_moment_mc(d, 1, n_samples, rng)?;
    let k2_deviation = match m2 {
        Some(m2) => Some(max_abs(&(m2.unscale(nf) - haar_unitary_moment(d, 2)?))),
        None => None,
    };
    Ok(PushforwardReport {
        d,
        samples: n_samples,
        k1_deviation: max_abs(&(&m1 - haar_unitary_moment(d, 1)?)),
        k1_deviation_mc: max_abs(&(&m1 - &mc.mean)),
        k1_mc_stderr: mc.stderr.iter().fold(0.0f64, |a, &b| a.max(b)),
        k2_frame_potential: Estimate::from_samples(s, s2, n_samples),
        k2_deviation,
    })
}

/// √p for the first `count` primes after skipping `skip`, reduced mod 2 into (0, 2).
/// Nominally rationally independent; used as the default frequency family.
pub fn sqrt_prime_family(count: usize, skip: usize) -> Vec<f64> {
    let mut primes = Vec::with_capacity(count + skip);
    let mut n = 2u64;
    while primes.len() < count + skip {
        if (2..n).take_while(|p| p * p <= n).all(|p| n % p != 0) {
            primes.push(n);
        }
        n += 1;
    }
    primes[skip..]
        .iter()
        .map(|&p| {
            let r = libm::sqrt(p as f64);
            r - 2.0 * libm::floor(r / 2.0)
        })
        .collect()
}

/// Parent P(θ) on T^{d²−2} for the CUE drive: the Hurwitz matrix with
/// η_{d−1} = 0 and the off-diagonal phase of R₁ in E_{d−1} set to θ_{d²−2}.
/// The other angles take θ₁ … θ_{d²−3} in order θ_{r,j}, φ_{r,j} (r = 1..j), η_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CueParent {
    pub d: usize,
}

impl CueParent {
    pub fn tones(&self) -> usize {
        self.d * self.d - 2
    }

    pub fn angles(&self, theta: &[f64]) -> EulerAngles {
        let d = self.d;
        let mut a = EulerAngles::zeros(d).expect("d ≥ 2");
        let mut it = theta.iter().copied();
        for j in 1..d {
            for r in 1..=j {
                a.set_xi(r, j, measure_preserving_xi(it.next().expect("tone count"), r));
                if !(r == 1 && j == d - 1) {
                    a.set_phi(r, j, it.next().expect("tone count"));
                }
            }
            if j != d - 1 {
                a.set_eta(j, it.next().expect("tone count"));
            }
        }
        a.set_phi(1, d - 1, theta[self.tones() - 1]);
        a
    }

    pub fn eval(&self, theta: &[f64]) -> ComplexMatrix {
        hurwitz_unitary(&self.angles(theta))
    }
}

/// U(t) = P(ωt) e^{−iQt} P(0)† with Q = diag(−Σq, q₁, …, q_{d−1}).
pub fn cue_drive(d: usize, omegas: &[f64], quasienergies: &[f64]) -> Result<FloquetDecomposition> {
    if d < 2 {
        return Err(Error::arg("CUE drive needs d ≥ 2"));
    }
    if omegas.len() != d * d - 2 {
        return Err(Error::arg("CUE drive needs d² − 2 frequencies"));
    }
    if quasienergies.len() != d - 1 {
        return Err(Error::arg("CUE drive needs d − 1 quasienergies"));
    }
    let mut q = Vec::with_capacity(d);
    q.push(-quasienergies.iter().sum::<f64>());
    q.extend_from_slice(quasienergies);
    let parent = CueParent { d };
    let frame = parent.eval(&vec![0.0; parent.tones()]);
    FloquetDecomposition::new(ParentUnitary::Cue(parent), omegas.to_vec(), q, Some(frame))
}

/// [`cue_drive`] with the default √prime frequencies.
pub fn default_cue_drive(d: usize) -> Result<FloquetDecomposition> {
    let m = d * d - 2;
    let w = sqrt_prime_family(m + d - 1, 0);
    cue_drive(d, &w[..m], &w[m..])
}
