//! Kicked Ising chain: Floquet, Cosine and Fibonacci kick protocols,
//! optimized K-body observables and the Δ⁽¹⁾/Δ⁽²⁾ time series.

#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::drives::{cosine_envelope, fibonacci_selector, GOLDEN_OMEGA2};
use crate::ergodicity::PauliAccumulator;
use crate::qcore::{
    basis_state, expm_apply, expm_hermitian, ComplexMatrix, Pauli, PauliString, PauliSum, StateVector,
};
use crate::stats::{loglinear_fit, LinearFit};
use crate::{Error, Result};

/// Largest chain handled with dense kick unitaries.
pub const MAX_SITES: usize = 12;

/// H = Σ_j σ_j + Σ_{j≥2} σ_{j−1}σ_j + σ_1/10 for σ = X (H₀) or Z (H₁).
pub fn ising_pauli_sums(l: usize) -> Result<(PauliSum, PauliSum)> {
    if !(2..=MAX_SITES).contains(&l) {
        return Err(Error::arg("chain length must be between 2 and 12"));
    }
    let build = |p: Pauli| {
        let mut h = PauliSum::new(l);
        for j in 1..=l {
            let c = if j == 1 { 1.1 } else { 1.0 };
            h.push(c, &PauliString::single(l, j, p));
        }
        for j in 2..=l {
            let mut letters = vec![Pauli::I; l];
            letters[j - 2] = p;
            letters[j - 1] = p;
            h.push(1.0, &PauliString::new(letters));
        }
        h
    };
    Ok((build(Pauli::X), build(Pauli::Z)))
}

pub fn ising_hamiltonians(l: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (h0, h1) = ising_pauli_sums(l)?;
    Ok((h0.to_dense()?, h1.to_dense()?))
}

/// All Pauli strings with weight 1..=K on L sites, ordered by weight, then
/// by support (lexicographic), then by letters X < Y < Z.
pub fn kbody_basis(l: usize, k: usize) -> Vec<PauliString> {
    let mut out = Vec::new();
    let letters = [Pauli::X, Pauli::Y, Pauli::Z];
    for w in 1..=k.min(l) {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            for code in 0..3usize.pow(w as u32) {
                let mut s = vec![Pauli::I; l];
                let mut c = code;
                for &site in support.iter().rev() {
                    s[site] = letters[c % 3];
                    c /= 3;
                }
                out.push(PauliString::new(s));
            }
            // Next w-subset of 0..l.
            let mut i = w;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if support[i] < l - w + i {
                    support[i] += 1;
                    for j in i + 1..w {
                        support[j] = support[j - 1] + 1;
                    }
                    i = usize::MAX;
                    break;
                }
            }
            if i != usize::MAX {
                break;
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainDrive {
    Floquet,
    Cosine,
    Fibonacci,
}

impl ChainDrive {
    pub fn name(self) -> &'static str {
        match self {
            ChainDrive::Floquet => "floquet",
            ChainDrive::Cosine => "cosine",
            ChainDrive::Fibonacci => "fibonacci",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "floquet" => Some(ChainDrive::Floquet),
            "cosine" => Some(ChainDrive::Cosine),
            "fibonacci" => Some(ChainDrive::Fibonacci),
            _ => None,
        }
    }

    pub const ALL: [ChainDrive; 3] = [ChainDrive::Floquet, ChainDrive::Cosine, ChainDrive::Fibonacci];
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub l: usize,
    pub k: usize,
    pub drive: ChainDrive,
    pub t_opt: usize,
    pub t_max: usize,
    pub omega1: f64,
    pub omega2: f64,
}

impl ChainConfig {
    pub fn new(l: usize, k: usize, drive: ChainDrive) -> Result<Self> {
        let cfg = Self { l, k, drive, t_opt: 1000, t_max: 1_000_000, omega1: 1.0, omega2: GOLDEN_OMEGA2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_SITES).contains(&self.l) {
            return Err(Error::arg("chain length must be between 2 and 12"));
        }
        if self.k < 1 || self.k > self.l {
            return Err(Error::arg("observable body count must satisfy 1 ≤ K ≤ L"));
        }
        if self.t_opt < 1 || self.t_max < self.t_opt {
            return Err(Error::arg("need 1 ≤ T_opt ≤ T_max"));
        }
        if self.omega1 == 0.0 || !(self.omega2 > 0.0 && self.omega2 < core::f64::consts::TAU) {
            return Err(Error::arg("need ω₁ ≠ 0 and 0 < ω₂ < 2π"));
        }
        Ok(())
    }
}

/// Steps the chain state ψ(n) → ψ(n+1) with the n+1-th kick.
pub struct ChainPropagator {
    drive: ChainDrive,
    omega1: f64,
    omega2: f64,
    h0: PauliSum,
    h1: PauliSum,
    g0: ComplexMatrix,
    g1: ComplexMatrix,
    step: u64,
    psi: StateVector,
}

impl ChainPropagator {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        let (h0, h1) = ising_pauli_sums(cfg.l)?;
        let (g0, g1) = if cfg.drive == ChainDrive::Cosine {
            (ComplexMatrix::zeros(0, 0), ComplexMatrix::zeros(0, 0))
        } else {
            (expm_hermitian(&h0.to_dense()?, 1.0), expm_hermitian(&h1.to_dense()?, 1.0))
        };
        let psi = basis_state(1 << cfg.l, 0);
        Ok(Self { drive: cfg.drive, omega1: cfg.omega1, omega2: cfg.omega2, h0, h1, g0, g1, step: 0, psi })
    }

    pub fn state(&self) -> &StateVector {
        &self.psi
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn advance(&mut self) {
        let n = self.step + 1;
        self.psi = match self.drive {
            ChainDrive::Floquet => {
                if n % 2 == 0 {
                    &self.g0 * &self.psi
                } else {
                    &self.g1 * &self.psi
                }
            }
            ChainDrive::Fibonacci => {
                if fibonacci_selector(n, self.omega1, self.omega2) {
                    &self.g1 * &self.psi
                } else {
                    &self.g0 * &self.psi
                }
            }
            ChainDrive::Cosine => {
                let x = cosine_envelope(n, self.omega1, self.omega2);
                let h = self.h0.combine(1.0 - x, &self.h1, x);
                expm_apply(&h, 1.0, &self.psi)
            }
        };
        self.step = n;
    }
}

/// Optimized observable O = Σ_S J_S S / M (order 1) or Σ J_{S₁S₂} S₁⊗S₂ / M (order 2),
/// with M chosen so the infinite-temperature variance of O is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub order: usize,
    /// Raw coefficients J (length n or n×n row-major).
    pub coefficients: Vec<f64>,
    /// ‖J‖; the normalized coefficients are J / M.
    pub m: f64,
    pub degenerate: bool,
}

impl Observable {
    pub fn normalized(&self) -> Vec<f64> {
        if self.degenerate {
            return vec![0.0; self.coefficients.len()];
        }
        self.coefficients.iter().map(|j| j / self.m).collect()
    }
}

/// Order 1: J_S = mean⟨S⟩ (Haar value 0). Order 2: J_{S₁S₂} = mean⟨S₁⟩⟨S₂⟩ − δ/(d+1).
pub fn optimize_observable(moments: &PauliAccumulator, order: usize, dim: usize) -> Result<Observable> {
    let coefficients = match order {
        1 => moments.mean1(),
        2 => {
            if moments.order() != 2 {
                return Err(Error::arg("second-order observable needs pair moments"));
            }
            let n = moments.strings().len();
            let mut j = moments.mean2();
            for i in 0..n {
                j[i * n + i] -= 1.0 / (dim as f64 + 1.0);
            }
            j
        }
        _ => return Err(Error::arg("order must be 1 or 2")),
    };
    let m = coefficients.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(Observable { order, coefficients, m, degenerate: m < 1e-300 })
}

/// Δ(T) for a frozen observable from accumulated sums.
fn delta_from_sums(obs: &Observable, sum1: &[f64], sum2: &[f64], count: u64, dim: usize) -> f64 {
    if obs.degenerate {
        return 0.0;
    }
    let c = count as f64;
    let j = &obs.coefficients;
    match obs.order {
        1 => j.iter().zip(sum1).map(|(a, b)| a * b).sum::<f64>() / (c * obs.m),
        _ => {
            let n = sum1.len();
            let haar: f64 = (0..n).map(|i| j[i * n + i]).sum::<f64>() / (dim as f64 + 1.0);
            (j.iter().zip(sum2).map(|(a, b)| a * b).sum::<f64>() / c - haar) / obs.m
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaPoint {
    pub t: usize,
    pub delta1: f64,
    pub delta2: Option<f64>,
    /// Checkpoint earlier than T_opt: the observable comes from later data.
    pub pre_optimization: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSeries {
    pub config: ChainConfig,
    pub points: Vec<DeltaPoint>,
    pub observable1: Observable,
    pub observable2: Option<Observable>,
}

/// Runs ψ(0) = |0…0⟩ to max(checkpoints), freezes the observables at T_opt and
/// reports Δ⁽¹⁾ (and Δ⁽²⁾ if `second_order`) at each checkpoint. Temporal
/// averages use t = 0 … T−1.
pub fn delta_series(cfg: &ChainConfig, checkpoints: &[usize], second_order: bool) -> Result<DeltaSeries> {
    cfg.validate()?;
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints[0] == 0 {
        return Err(Error::arg("checkpoints must be positive and increasing"));
    }
    let t_end = *checkpoints.last().expect("nonempty");
    if t_end > cfg.t_max {
        return Err(Error::arg("checkpoint beyond T_max"));
    }
    let dim = 1usize << cfg.l;
    let strings = kbody_basis(cfg.l, cfg.k);
    let n = strings.len();
    let mut acc = PauliAccumulator::new(strings, if second_order { 2 } else { 1 })?;
    let mut prop = ChainPropagator::new(cfg)?;

    // Sums at early checkpoints, evaluated once the observable is known.
    let mut early: Vec<(usize, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut frozen: Option<(Observable, Option<Observable>)> = None;
    // Post-optimization running sums of J·e and eᵀJe.
    let (mut lin, mut quad) = (0.0f64, 0.0f64);
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut next = 0usize;

    let record = |t: usize, frozen: &(Observable, Option<Observable>), lin: f64, quad: f64, pts: &mut Vec<DeltaPoint>| {
        let (o1, o2) = frozen;
        let c = t as f64;
        let d1 = if o1.degenerate { 0.0 } else { lin / (c * o1.m) };
        let d2 = o2.as_ref().map(|o| {
            if o.degenerate {
                0.0
            } else {
                let haar: f64 = (0..n).map(|i| o.coefficients[i * n + i]).sum::<f64>() / (dim as f64 + 1.0);
                (quad / c - haar) / o.m
            }
        });
        pts.push(DeltaPoint { t, delta1: d1, delta2: d2, pre_optimization: t < cfg.t_opt });
    };

    for t in 1..=t_end {
        let e = if frozen.is_none() {
            acc.push(prop.state().as_slice())
        } else {
            acc.expectations(prop.state().as_slice())
        };
        if let Some((o1, o2)) = &frozen {
            lin += o1.coefficients.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>();
            if let Some(o2) = o2 {
                let mut s = 0.0;
                for i in 0..n {
                    let row = &o2.coefficients[i * n..(i + 1) * n];
                    s += e[i] * row.iter().zip(&e).map(|(a, b)| a * b).sum::<f64>();
                }
                quad += s;
            }
        }
        if t == cfg.t_opt {
            let o1 = optimize_observable(&acc, 1, dim)?;
            let o2 = if second_order { Some(optimize_observable(&acc, 2, dim)?) } else { None };
            let m1 = acc.mean1();
            lin = o1.coefficients.iter().zip(&m1).map(|(a, b)| a * b).sum::<f64>() * t as f64;
            if let Some(o2) = &o2 {
                let m2 = acc.mean2();
                quad = o2.coefficients.iter().zip(&m2).map(|(a, b)| a * b).sum::<f64>() * t as f64;
            }
            for (te, s1, s2) in early.drain(..) {
                let d1 = delta_from_sums(&o1, &s1, &s2, te as u64, dim);
                let d2 = o2.as_ref().map(|o| delta_from_sums(o, &s1, &s2, te as u64, dim));
                points.push(DeltaPoint { t: te, delta1: d1, delta2: d2, pre_optimization: true });
            }
            frozen = Some((o1, o2));
        }
        if next < checkpoints.len() && checkpoints[next] == t {
            match &frozen {
                Some(f) => record(t, f, lin, quad, &mut points),
                None => {
                    let c = acc.count() as f64;
                    let s1 = acc.mean1().iter().map(|x| x * c).collect();
                    let s2 = acc.mean2().iter().map(|x| x * c).collect();
                    early.push((t, s1, s2));
                }
            }
            next += 1;
        }
        if t < t_end {
            prop.advance();
        }
    }
    let (observable1, observable2) = match frozen {
        Some(f) => f,
        None => return Err(Error::arg("the run must reach T_opt")),
    };
    Ok(DeltaSeries { config: cfg.clone(), points, observable1, observable2 })
}

/// Late-time |Δ| per chain length and the log-linear fit of log|Δ| against L.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub drive: ChainDrive,
    pub l: usize,
    pub k: usize,
    pub order: usize,
    pub t: usize,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Fit of ln|Δ| against L (fixed K) or K (fixed L), per (drive, order).
    pub fits: Vec<(ChainDrive, usize, Option<LinearFit>)>,
}

/// Plateau values at `t_late` for each (drive, L, K). The fits run along L
/// when one K is given, otherwise along K. Fibonacci has no plateau and is
/// skipped.
pub fn scaling_sweep(
    drives: &[ChainDrive],
    ls: &[usize],
    ks: &[usize],
    second_order: bool,
    t_opt: usize,
    t_late: usize,
) -> Result<ScalingTable> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    for &drive in drives.iter().filter(|d| **d != ChainDrive::Fibonacci) {
        for &l in ls {
            for &k in ks {
                let mut cfg = ChainConfig::new(l, k, drive)?;
                cfg.t_opt = t_opt;
                cfg.t_max = t_late.max(t_opt);
                let s = delta_series(&cfg, &[t_late.max(t_opt)], second_order)?;
                let p = s.points.last().expect("one checkpoint");
                rows.push(ScalingRow { drive, l, k, order: 1, t: p.t, delta: p.delta1.abs() });
                if let Some(d2) = p.delta2 {
                    rows.push(ScalingRow { drive, l, k, order: 2, t: p.t, delta: d2.abs() });
                }
            }
        }
        for order in 1..=if second_order { 2 } else { 1 } {
            let sel: Vec<&ScalingRow> = rows.iter().filter(|r| r.drive == drive && r.order == order).collect();
            let xs: Vec<f64> = sel.iter().map(|r| if ks.len() == 1 { r.l as f64 } else { r.k as f64 }).collect();
            let ys: Vec<f64> = sel.iter().map(|r| r.delta).collect();
            fits.push((drive, order, loglinear_fit(&xs, &ys)));
        }
    }
    Ok(ScalingTable { rows, fits })
}
