//! Temporal-ensemble moments and the diagnostics built on them: deviations
//! from Haar, frame potentials over time, ε-net radius, speed-limit audit,
//! projective distance and the action bounds.

#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::drives::EvolutionTrace;
use crate::haar::{haar_state_frame_potential, haar_state_moment, haar_unitary_moment, Estimate, MomentKind};
use crate::qcore::{
    binomial, channel_power, check_size, frobenius, haar_random_state, is_unitary, kron_vec_power,
    matrix_log_principal, operator_norm_hermitian, pure_trace_distance, trace_distance, ComplexMatrix, PauliMask,
    PauliString, StateVector, C64,
};
use crate::{Error, Result};

/// Running sum of ψ^{⊗k}ψ^{⊗k}† (state) or (U*⊗U)^{⊗k} (unitary).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentAccumulator {
    kind: MomentKind,
    d: usize,
    k: usize,
    count: u64,
    sum: ComplexMatrix,
}

impl MomentAccumulator {
    pub fn new(kind: MomentKind, d: usize, k: usize) -> Result<Self> {
        if d < 1 || k < 1 {
            return Err(Error::arg("accumulator needs d ≥ 1 and k ≥ 1"));
        }
        let side = match kind {
            MomentKind::State => (d as u128).saturating_pow(k as u32),
            MomentKind::Unitary => (d as u128).saturating_pow(2 * k as u32),
        };
        check_size(side, side)?;
        Ok(Self { kind, d, k, count: 0, sum: ComplexMatrix::zeros(side as usize, side as usize) })
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push_state(&mut self, psi: &StateVector) -> Result<()> {
        if self.kind != MomentKind::State || psi.len() != self.d {
            return Err(Error::arg("state does not fit this accumulator"));
        }
        let v = kron_vec_power(psi, self.k);
        self.sum.gerc(C64::new(1.0, 0.0), &v, &v, C64::new(1.0, 0.0));
        self.count += 1;
        Ok(())
    }

    pub fn push_unitary(&mut self, u: &ComplexMatrix) -> Result<()> {
        if self.kind != MomentKind::Unitary || u.nrows() != self.d {
            return Err(Error::arg("unitary does not fit this accumulator"));
        }
        self.sum += channel_power(u, self.k)?;
        self.count += 1;
        Ok(())
    }

    /// Adds another accumulator of the same shape (disjoint sample windows).
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if (self.kind, self.d, self.k) != (other.kind, other.d, other.k) {
            return Err(Error::arg("cannot merge accumulators of different shape"));
        }
        self.sum += &other.sum;
        self.count += other.count;
        Ok(())
    }

    pub fn mean(&self) -> Result<ComplexMatrix> {
        if self.count == 0 {
            return Err(Error::arg("empty accumulator"));
        }
        Ok(self.sum.unscale(self.count as f64))
    }
}

/// Pauli-expectation moments: Σ_t ⟨S_i⟩ and, at order 2, Σ_t ⟨S_i⟩⟨S_j⟩.
/// These are tr(S_i ρ^(1)) and tr((S_i⊗S_j) ρ^(2)) without forming ρ.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliAccumulator {
    strings: Vec<PauliString>,
    masks: Vec<PauliMask>,
    order: usize,
    count: u64,
    sum1: Vec<f64>,
    sum2: Vec<f64>,
}

impl PauliAccumulator {
    pub fn new(strings: Vec<PauliString>, order: usize) -> Result<Self> {
        if !(order == 1 || order == 2) {
            return Err(Error::arg("Pauli accumulator supports orders 1 and 2"));
        }
        if strings.windows(2).any(|w| w[0].len() != w[1].len()) {
            return Err(Error::arg("Pauli strings must share a length"));
        }
        let n = strings.len();
        let masks = strings.iter().map(|s| s.mask()).collect();
        let sum2 = if order == 2 { vec![0.0; n * n] } else { Vec::new() };
        Ok(Self { strings, masks, order, count: 0, sum1: vec![0.0; n], sum2 })
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn expectations(&self, psi: &[C64]) -> Vec<f64> {
        self.masks.iter().map(|m| m.expectation(psi)).collect()
    }

    /// Adds a state and returns its expectation vector.
    pub fn push(&mut self, psi: &[C64]) -> Vec<f64> {
        let e = self.expectations(psi);
        self.push_expectations(&e);
        e
    }

    pub fn push_expectations(&mut self, e: &[f64]) {
        let n = self.sum1.len();
        for (s, x) in self.sum1.iter_mut().zip(e) {
            *s += x;
        }
        if self.order == 2 {
            for i in 0..n {
                let row = &mut self.sum2[i * n..(i + 1) * n];
                for (s, y) in row.iter_mut().zip(e) {
                    *s += e[i] * y;
                }
            }
        }
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.strings != other.strings || self.order != other.order {
            return Err(Error::arg("cannot merge Pauli accumulators over different strings"));
        }
        for (a, b) in self.sum1.iter_mut().zip(&other.sum1) {
            *a += b;
        }
        for (a, b) in self.sum2.iter_mut().zip(&other.sum2) {
            *a += b;
        }
        self.count += other.count;
        Ok(())
    }

    /// Mean ⟨S_i⟩.
    pub fn mean1(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum1.iter().map(|s| s / c).collect()
    }

    /// Mean ⟨S_i⟩⟨S_j⟩, row-major n×n (empty at order 1).
    pub fn mean2(&self) -> Vec<f64> {
        let c = self.count.max(1) as f64;
        self.sum2.iter().map(|s| s / c).collect()
    }
}

fn require_states(trace: &EvolutionTrace) -> Result<&[StateVector]> {
    match &trace.states {
        Some(s) if !s.is_empty() => Ok(s),
        _ => Err(Error::arg("trace carries no states")),
    }
}

pub fn accumulate_state_moment(trace: &EvolutionTrace, k: usize) -> Result<MomentAccumulator> {
    let states = require_states(trace)?;
    let mut acc = MomentAccumulator::new(MomentKind::State, states[0].len(), k)?;
    for s in states {
        acc.push_state(s)?;
    }
    Ok(acc)
}

pub fn accumulate_unitary_moment(trace: &EvolutionTrace, k: usize) -> Result<MomentAccumulator> {
    let first = trace.unitaries.first().ok_or_else(|| Error::arg("trace carries no unitaries"))?;
    let mut acc = MomentAccumulator::new(MomentKind::Unitary, first.nrows(), k)?;
    for u in &trace.unitaries {
        acc.push_unitary(u)?;
    }
    Ok(acc)
}

pub fn accumulate_pauli_moment(trace: &EvolutionTrace, strings: Vec<PauliString>, order: usize) -> Result<PauliAccumulator> {
    let states = require_states(trace)?;
    let mut acc = PauliAccumulator::new(strings, order)?;
    for s in states {
        acc.push(s.as_slice());
    }
    Ok(acc)
}

/// D(ρ_T^(k), ρ_Haar^(k)).
pub fn khse_deviation(acc: &MomentAccumulator) -> Result<f64> {
    if acc.kind != MomentKind::State {
        return Err(Error::arg("k-HSE deviation needs a state accumulator"));
    }
    trace_distance(&acc.mean()?, &haar_state_moment(acc.d, acc.k)?)
}

/// ‖E_T[U^{⊗k,k}] − E_Haar[V^{⊗k,k}]‖_F / ‖E_Haar[V^{⊗k,k}]‖_F.
pub fn unitary_deviation(acc: &MomentAccumulator) -> Result<f64> {
    if acc.kind != MomentKind::Unitary {
        return Err(Error::arg("k-UE deviation needs a unitary accumulator"));
    }
    let haar = haar_unitary_moment(acc.d, acc.k)?;
    Ok(frobenius(&(acc.mean()? - &haar)) / frobenius(&haar))
}

/// Mean of |⟨ψ(t′)|ψ(t)⟩|^{2k} (state) or |tr U(t′)†U(t)|^{2k} (unitary) over
/// pairs t ≠ t′. All ordered pairs when they fit the budget, otherwise
/// `pair_budget` uniformly drawn pairs.
pub fn frame_potential_time<R: Rng + ?Sized>(
    trace: &EvolutionTrace,
    k: usize,
    kind: MomentKind,
    pair_budget: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let n = trace.len();
    if n < 2 {
        return Err(Error::arg("frame potential needs at least two samples"));
    }
    let states = match kind {
        MomentKind::State => Some(require_states(trace)?),
        MomentKind::Unitary => {
            if trace.unitaries.len() != n {
                return Err(Error::arg("trace carries no unitaries"));
            }
            None
        }
    };
    let term = |i: usize, j: usize| -> f64 {
        let x = match states {
            Some(s) => s[j].dotc(&s[i]).norm_sqr(),
            None => (trace.unitaries[j].adjoint() * &trace.unitaries[i]).trace().norm_sqr(),
        };
        x.powi(k as i32)
    };
    let (mut s, mut s2, mut m) = (0.0, 0.0, 0usize);
    let all = (n as u128) * (n as u128 - 1);
    if all <= pair_budget as u128 {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let x = term(i, j);
                    s += x;
                    s2 += x * x;
                    m += 1;
                }
            }
        }
    } else {
        for _ in 0..pair_budget {
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let x = term(i, j);
            s += x;
            s2 += x * x;
            m += 1;
        }
    }
    Ok(Estimate::from_samples(s, s2, m))
}

/// Largest min-distance from Haar probe states to the list (a lower estimate
/// of the covering radius).
pub fn epsilon_net_radius<R: Rng + ?Sized>(states: &[StateVector], probe_count: usize, rng: &mut R) -> Result<f64> {
    let d = states.first().ok_or_else(|| Error::arg("ε-net needs a nonempty list"))?.len();
    let mut worst = 0.0f64;
    for _ in 0..probe_count {
        let p = haar_random_state(d, rng);
        // D = √(1 − |⟨a|b⟩|²): maximize the overlap instead of taking roots.
        let best = states.iter().map(|s| s.dotc(&p).norm_sqr()).fold(0.0f64, f64::max);
        worst = worst.max((1.0 - best).max(0.0).sqrt());
    }
    Ok(worst)
}

/// γ(d, k) = √(1 − ((d−1)! k! / (d+k−1)!)^{1/k}).
pub fn gamma_bound(d: usize, k: usize) -> f64 {
    (1.0 - haar_state_frame_potential(d, k).powf(1.0 / k as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedLimitReport {
    /// Σ_j D(ψ(t_{j−1}), ψ(t_j)).
    pub path_length: f64,
    /// Σ_j ‖H_j‖_∞.
    pub action: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks the path length of the state trajectory against the summed
/// generator norms. `generators[j]` drives states[j] → states[j+1].
pub fn speed_limit_audit(trace: &EvolutionTrace, generators: &[ComplexMatrix]) -> Result<SpeedLimitReport> {
    let states = require_states(trace)?;
    if states.len() != generators.len() + 1 {
        return Err(Error::arg("need exactly one generator per step"));
    }
    let path_length: f64 = states.windows(2).map(|w| pure_trace_distance(&w[0], &w[1])).sum();
    let action: f64 = generators.iter().map(operator_norm_hermitian).sum();
    let slack = action - path_length;
    Ok(SpeedLimitReport { path_length, action, slack, holds: slack >= -1e-12 * action.max(1.0) })
}

/// Σ_j ‖log(G_j)‖_∞ over the principal logarithms of the gates.
pub fn kick_action(gates: &[ComplexMatrix]) -> Result<f64> {
    let mut s = 0.0;
    for g in gates {
        s += operator_norm_hermitian(&matrix_log_principal(g)?);
    }
    Ok(s)
}

/// √(1 − |tr U†V|²/d²): zero iff U and V agree up to a phase.
pub fn pu_distance(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    if u.shape() != v.shape() || !u.is_square() {
        return Err(Error::arg("PU(d) distance needs square matrices of equal size"));
    }
    if !is_unitary(u, 1e-8) || !is_unitary(v, 1e-8) {
        return Err(Error::arg("PU(d) distance needs unitary inputs"));
    }
    let d = u.nrows() as f64;
    let o = (u.adjoint() * v).trace().norm_sqr() / (d * d);
    Ok((1.0 - o).max(0.0).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub d: usize,
    pub k: usize,
    pub gamma: f64,
    /// (√2 / 3k)(binom(k+d−1, k) − 1).
    pub b1: f64,
    /// C γ^{3−2d}.
    pub b2: f64,
    /// C = 2^{5−4d}(d−1)^{2−2d}(2d−3)^{2d−3}.
    pub c: f64,
    /// Optimal packing separation δ = 4(d−1)γ/(2d−3); B₂ applies when δ < 1.
    pub delta: f64,
}

impl BoundsReport {
    /// ⌈ε^{−2(d−1)}⌉ disjoint balls of radius ε/2.
    pub fn packing_n(&self, eps: f64) -> u128 {
        packing_n(eps, self.d)
    }

    pub fn b2_applies(&self) -> bool {
        self.delta < 1.0
    }

    /// max(B₁, B₂) with B₂ counted only where it applies.
    pub fn best(&self) -> f64 {
        if self.b2_applies() {
            self.b1.max(self.b2)
        } else {
            self.b1
        }
    }
}

pub fn packing_n(eps: f64, d: usize) -> u128 {
    let x = eps.powf(-2.0 * (d as f64 - 1.0));
    // Guard against 4.000000001 rounding up.
    let r = x.round();
    if (x - r).abs() < 1e-9 * r.max(1.0) {
        r as u128
    } else {
        x.ceil() as u128
    }
}

pub fn b_bounds(d: usize, k: usize) -> Result<BoundsReport> {
    if d < 2 || k < 1 {
        return Err(Error::arg("bounds need d ≥ 2 and k ≥ 1"));
    }
    let df = d as f64;
    let gamma = gamma_bound(d, k);
    let b1 = core::f64::consts::SQRT_2 / (3.0 * k as f64) * (binomial((k + d - 1) as u64, k as u64) as f64 - 1.0);
    let c = 2f64.powf(5.0 - 4.0 * df) * (df - 1.0).powf(2.0 - 2.0 * df) * (2.0 * df - 3.0).powf(2.0 * df - 3.0);
    let b2 = c * gamma.powf(3.0 - 2.0 * df);
    let delta = 4.0 * (df - 1.0) * gamma / (2.0 * df - 3.0);
    Ok(BoundsReport { d, k, gamma, b1, b2, c, delta })
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergencePoint {
    pub t: usize,
    pub deviation: f64,
    pub frame_potential: Estimate,
}

/// State-moment deviation and frame potential on growing prefixes of a trace.
/// Checkpoints are prefix lengths and must not exceed the trace length.
pub fn convergence_series<R: Rng + ?Sized>(
    trace: &EvolutionTrace,
    k: usize,
    checkpoints: &[usize],
    pair_budget: usize,
    rng: &mut R,
) -> Result<Vec<ConvergencePoint>> {
    let states = require_states(trace)?;
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints.last().is_some_and(|&c| c > states.len()) {
        return Err(Error::arg("checkpoints must increase and fit inside the trace"));
    }
    let mut acc = MomentAccumulator::new(MomentKind::State, states[0].len(), k)?;
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut done = 0;
    for &c in checkpoints {
        for s in &states[done..c] {
            acc.push_state(s)?;
        }
        done = c;
        let prefix = EvolutionTrace::from_states(trace.times[..c].to_vec(), states[..c].to_vec());
        out.push(ConvergencePoint {
            t: c,
            deviation: khse_deviation(&acc)?,
            frame_potential: frame_potential_time(&prefix, k, MomentKind::State, pair_budget, rng)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drives::{design_cycle_drive, evolve, integer_times, octahedron_states, qubit_cue_drive, DriveSpec};
    use crate::haar::{haar_unitary_frame_potential, omega_projector};
    use crate::qcore::{
        basis_state, expm_hermitian, haar_random_unitary, identity, kron_vec, max_abs, random_hermitian, seeded,
        Pauli,
    };
    use proptest::prelude::*;

    fn pauli_design() -> Vec<ComplexMatrix> {
        vec![identity(2), Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix()]
    }

    #[test]
    fn constant_and_alternating_trajectories() {
        let psi = crate::qcore::normalize(StateVector::from_row_slice(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]));
        let tr = EvolutionTrace::from_states(vec![0.0; 5], vec![psi.clone(); 5]);
        for k in 1..4 {
            let acc = accumulate_state_moment(&tr, k).unwrap();
            let v = kron_vec_power(&psi, k);
            assert!(max_abs(&(acc.mean().unwrap() - &v * v.adjoint())) < 1e-15);
        }
        let alt: Vec<_> = (0..10).map(|i| basis_state(2, i % 2)).collect();
        let acc = accumulate_state_moment(&EvolutionTrace::from_states(vec![0.0; 10], alt), 1).unwrap();
        assert!(max_abs(&(acc.mean().unwrap() - identity(2).scale(0.5))) < 1e-15);
        assert!((khse_deviation(&accumulate_state_moment(&tr, 1).unwrap()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_unitaries_give_identity_channel() {
        let tr = EvolutionTrace::from_unitaries(vec![0.0; 3], vec![identity(2); 3]);
        for k in 1..3 {
            let m = accumulate_unitary_moment(&tr, k).unwrap().mean().unwrap();
            assert!(max_abs(&(m - identity(2usize.pow(2 * k as u32)))) < 1e-15);
        }
    }

    #[test]
    fn pauli_cycle_is_exact_first_moment() {
        let seq = design_cycle_drive(&pauli_design()).unwrap();
        let tr = evolve(&DriveSpec::Kick(seq), &integer_times(4), None).unwrap();
        let acc = accumulate_unitary_moment(&tr, 1).unwrap();
        assert!(max_abs(&(acc.mean().unwrap() - omega_projector(2))) < 1e-15);
        assert!(unitary_deviation(&acc).unwrap() < 1e-15);
    }

    #[test]
    fn six_states_give_zero_deviation() {
        let tr = EvolutionTrace::from_states(vec![0.0; 6], octahedron_states());
        assert!(khse_deviation(&accumulate_state_moment(&tr, 3).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn haar_states_small_deviation() {
        let mut rng = seeded(21);
        let states: Vec<_> = (0..100_000).map(|_| haar_random_state(2, &mut rng)).collect();
        let tr = EvolutionTrace::from_states(vec![0.0; states.len()], states);
        assert!(khse_deviation(&accumulate_state_moment(&tr, 2).unwrap()).unwrap() < 5e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn merge_equals_concatenation(seed in any::<u64>(), split in 1usize..39) {
            let mut rng = seeded(seed);
            let states: Vec<_> = (0..40).map(|_| haar_random_state(3, &mut rng)).collect();
            let mut whole = MomentAccumulator::new(MomentKind::State, 3, 2).unwrap();
            let mut a = whole.clone();
            let mut b = whole.clone();
            for (i, s) in states.iter().enumerate() {
                whole.push_state(s).unwrap();
                if i < split { a.push_state(s).unwrap() } else { b.push_state(s).unwrap() }
            }
            let mut ab = a.clone();
            ab.merge(&b).unwrap();
            let mut ba = b.clone();
            ba.merge(&a).unwrap();
            prop_assert!(max_abs(&(ab.mean().unwrap() - whole.mean().unwrap())) < 1e-12);
            prop_assert!(max_abs(&(ba.mean().unwrap() - whole.mean().unwrap())) < 1e-12);
            let m = whole.mean().unwrap();
            prop_assert!(max_abs(&(&m - m.adjoint())) < 1e-10);
        }

        #[test]
        fn pu_distance_range(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let u = haar_random_unitary(3, &mut rng);
            let v = haar_random_unitary(3, &mut rng);
            let x = pu_distance(&u, &v).unwrap();
            prop_assert!((0.0..=1.0).contains(&x));
            let ph = C64::from_polar(1.0, 0.37);
            prop_assert!(pu_distance(&u, &u.map(|z| z * ph)).unwrap() < 1e-7);
        }

        #[test]
        fn speed_limit_on_random_kicks(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let mut psi = haar_random_state(4, &mut rng);
            let mut states = vec![psi.clone()];
            let mut gens = Vec::new();
            for _ in 0..50 {
                let h = random_hermitian(4, &mut rng);
                psi = expm_hermitian(&h, 1.0) * psi;
                states.push(psi.clone());
                gens.push(h);
            }
            let tr = EvolutionTrace::from_states(vec![0.0; states.len()], states);
            let rep = speed_limit_audit(&tr, &gens).unwrap();
            prop_assert!(rep.holds && rep.slack > 0.0);
        }
    }

    #[test]
    fn speed_limit_examples() {
        let tr = EvolutionTrace::from_states(vec![0.0, 1.0], vec![basis_state(2, 0); 2]);
        let rep = speed_limit_audit(&tr, &[ComplexMatrix::zeros(2, 2)]).unwrap();
        assert_eq!((rep.path_length, rep.action), (0.0, 0.0));
        let h = Pauli::X.matrix().scale(core::f64::consts::FRAC_PI_2);
        let s1 = expm_hermitian(&h, 1.0) * basis_state(2, 0);
        let tr = EvolutionTrace::from_states(vec![0.0, 1.0], vec![basis_state(2, 0), s1]);
        let rep = speed_limit_audit(&tr, &[h]).unwrap();
        assert!((rep.path_length - 1.0).abs() < 1e-12);
        assert!((rep.action - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(speed_limit_audit(&tr, &[]).is_err());
    }

    #[test]
    fn pu_distance_examples() {
        assert!((pu_distance(&identity(2), &Pauli::X.matrix()).unwrap() - 1.0).abs() < 1e-15);
        assert!(pu_distance(&identity(2), &identity(2).scale(2.0)).is_err());
    }

    #[test]
    fn frame_potential_examples() {
        let mut rng = seeded(2);
        let tr = EvolutionTrace::from_states(vec![0.0; 4], vec![basis_state(3, 1); 4]);
        let f = frame_potential_time(&tr, 2, MomentKind::State, 100, &mut rng).unwrap();
        assert_eq!(f.mean, 1.0);
        let tr = EvolutionTrace::from_unitaries(vec![0.0; 4], vec![identity(2); 4]);
        let f = frame_potential_time(&tr, 2, MomentKind::Unitary, 100, &mut rng).unwrap();
        assert!((f.mean - 16.0).abs() < 1e-12);
        let us: Vec<_> = (0..4000).map(|_| haar_random_unitary(2, &mut rng)).collect();
        let tr = EvolutionTrace::from_unitaries(vec![0.0; us.len()], us);
        let f = frame_potential_time(&tr, 2, MomentKind::Unitary, 400_000, &mut rng).unwrap();
        assert!(f.sigmas_from(haar_unitary_frame_potential(2, 2).mean) < 3.0, "{f:?}");
        assert!(frame_potential_time(&EvolutionTrace::from_states(vec![0.0], vec![basis_state(2, 0)]), 1, MomentKind::State, 10, &mut rng).is_err());
    }

    #[test]
    fn epsilon_net_examples() {
        let mut rng = seeded(8);
        let r = epsilon_net_radius(&[basis_state(2, 0)], 2000, &mut rng).unwrap();
        assert!(r > 0.99);
        let states: Vec<_> = (0..100_000).map(|_| haar_random_state(2, &mut rng)).collect();
        assert!(epsilon_net_radius(&states, 200, &mut rng).unwrap() < 0.05);
        let g = crate::drives::GreatCircleLoop::new();
        let curve: Vec<_> = (0..10_000).map(|i| g.state(core::f64::consts::TAU * i as f64 / 1e4)).collect();
        assert!(epsilon_net_radius(&curve, 5000, &mut rng).unwrap() < 0.45);
        assert!(epsilon_net_radius(&[], 10, &mut rng).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert!((gamma_bound(2, 1) - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((gamma_bound(3, 2) - (1.0 - (1.0f64 / 6.0).sqrt()).sqrt()).abs() < 1e-15);
        for k in 1..64 {
            assert!(gamma_bound(2, k + 1) < gamma_bound(2, k));
            assert!(gamma_bound(2, k) > 0.0 && gamma_bound(2, k) < 1.0);
        }
    }

    #[test]
    fn bounds_examples() {
        for d in 2..8 {
            let r = b_bounds(d, 1).unwrap();
            assert!((r.b1 - core::f64::consts::SQRT_2 / 3.0 * (d as f64 - 1.0)).abs() < 1e-14);
        }
        let r = b_bounds(2, 3).unwrap();
        assert!((r.b1 - core::f64::consts::SQRT_2 / 3.0).abs() < 1e-15);
        assert_eq!(r.packing_n(0.5), 4);
        assert_eq!(packing_n(0.5, 3), 16);
        assert_eq!(b_bounds(2, 1).unwrap().c, 2f64.powi(-3));
    }

    #[test]
    fn b2_is_the_optimized_packing_bound() {
        // max over δ of δ^{−2(d−1)}(δ − 2γ), by grid search.
        for d in 2..6 {
            for k in [10usize, 100, 1000] {
                let r = b_bounds(d, k).unwrap();
                if !r.b2_applies() {
                    continue;
                }
                let e = 2.0 * (d as f64 - 1.0);
                let best = (1..=200_000)
                    .map(|i| i as f64 / 200_000.0)
                    .map(|x| x.powf(-e) * (x - 2.0 * r.gamma))
                    .fold(f64::MIN, f64::max);
                assert!((best - r.b2).abs() < 1e-6 * r.b2, "d={d} k={k}: {best} vs {}", r.b2);
            }
        }
    }

    #[test]
    fn b2_exceeds_its_closed_lower_bound() {
        for d in 2..6 {
            for k in 1..400 {
                let r = b_bounds(d, k).unwrap();
                let lb = 8.0 / (4.0 * d as f64).powi(d as i32)
                    * (k as f64 / (k as f64 + 1.0).ln()).powf(d as f64 - 1.5);
                assert!(r.b2 >= lb, "d={d} k={k}: {} < {lb}", r.b2);
            }
        }
    }

    #[test]
    fn pauli_cycle_action_meets_bounds() {
        let designs = pauli_design();
        let n = designs.len();
        let gates: Vec<_> = (0..n).map(|j| &designs[(j + 1) % n] * designs[j].adjoint()).collect();
        let a = kick_action(&gates).unwrap();
        assert!(a <= n as f64 * core::f64::consts::PI + 1e-12);
        assert!(a >= b_bounds(2, 1).unwrap().b1);
    }

    #[test]
    fn unitary_design_implies_state_design() {
        let dec = qubit_cue_drive(1.0, 2f64.sqrt(), 3f64.sqrt() - 1.0);
        let psi0 = basis_state(2, 0);
        let tr = evolve(&DriveSpec::Floquet(dec), &integer_times(20_000), Some(&psi0)).unwrap();
        for k in 1..3 {
            let ua = accumulate_unitary_moment(&tr, k).unwrap();
            let sa = accumulate_state_moment(&tr, k).unwrap();
            // Contract the channel moment with ψ₀: ρ = Σ M[(ā a′), (b̄ b′)] ψ̄_ā ψ_b̄ … .
            let m = ua.mean().unwrap();
            let rho = contract_channel(&m, &psi0, k);
            assert!(max_abs(&(rho - sa.mean().unwrap())) < 1e-12);
            let haar_u = haar_unitary_moment(2, k).unwrap();
            let haar_rho = contract_channel(&haar_u, &psi0, k);
            assert!(max_abs(&(&haar_rho - haar_state_moment(2, k).unwrap())) < 1e-12);
            // D(ρ, ρ′) ≤ ½√(d^k)‖M − M′‖_∞ ≤ ‖M − M′‖_1 for d^k ≤ 4.
            let state_dev = trace_distance(&sa.mean().unwrap(), &haar_rho).unwrap();
            let chan_dev: f64 = (&m - &haar_u).singular_values().iter().sum();
            assert!(state_dev <= chan_dev + 1e-9, "k={k}: {state_dev} > {chan_dev}");
        }
    }

    /// Applies the vectorized k-fold channel to |ψ⟩⟨ψ|^{⊗k}.
    fn contract_channel(m: &ComplexMatrix, psi: &StateVector, k: usize) -> ComplexMatrix {
        // (U*⊗U)^{⊗k} acting on the vectorization ⊗_j (ψ̄ ⊗ ψ) gives ⊗_j (Ū ψ̄ ⊗ U ψ);
        // entry (ā a) per replica pairs ρ[a, ā] = (Uψ)_a (Uψ)*_ā.
        let d = psi.len();
        let v = kron_vec_power(&kron_vec(&psi.map(|z| z.conj()), psi), k);
        let out = m * v;
        let dk = d.pow(k as u32);
        let mut rho = ComplexMatrix::zeros(dk, dk);
        for idx in 0..out.len() {
            let (mut x, mut row, mut col) = (idx, 0usize, 0usize);
            let mut digits = vec![0usize; 2 * k];
            for s in (0..2 * k).rev() {
                digits[s] = x % d;
                x /= d;
            }
            for j in 0..k {
                col = col * d + digits[2 * j];
                row = row * d + digits[2 * j + 1];
            }
            rho[(row, col)] += out[idx];
        }
        rho
    }

    #[test]
    fn pauli_accumulator_matches_dense_moments() {
        let mut rng = seeded(4);
        for l in 1..4usize {
            let strings = crate::spinchain::kbody_basis(l, l);
            let states: Vec<_> = (0..50).map(|_| haar_random_state(1 << l, &mut rng)).collect();
            let tr = EvolutionTrace::from_states(vec![0.0; 50], states);
            let pa = accumulate_pauli_moment(&tr, strings.clone(), 2).unwrap();
            let r1 = accumulate_state_moment(&tr, 1).unwrap().mean().unwrap();
            let r2 = accumulate_state_moment(&tr, 2).unwrap().mean().unwrap();
            let mats: Vec<_> = strings.iter().map(|s| s.matrix().unwrap()).collect();
            let n = strings.len();
            let (m1, m2) = (pa.mean1(), pa.mean2());
            for i in 0..n {
                assert!(((&mats[i] * &r1).trace().re - m1[i]).abs() < 1e-10);
                for j in 0..n {
                    let op = crate::qcore::kron(&mats[i], &mats[j]).unwrap();
                    assert!(((op * &r2).trace().re - m2[i * n + j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn convergence_series_shapes() {
        let dec = qubit_cue_drive(1.0, 2f64.sqrt(), 0.5);
        let tr = evolve(&DriveSpec::Floquet(dec), &integer_times(1000), Some(&basis_state(2, 0))).unwrap();
        let s = convergence_series(&tr, 1, &[10, 100, 1000], 10_000, &mut seeded(1)).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s[2].deviation < s[0].deviation);
        assert!(convergence_series(&tr, 1, &[100, 10], 10, &mut seeded(1)).is_err());
    }
}
