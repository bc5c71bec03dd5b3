//! Frequency-lattice representation of quasienergy states: constraint
//! checks, shipped solutions, reconstruction, and the ρ_sym(α) criterion.

#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::drives::{FloquetDecomposition, ParentUnitary};
use crate::haar::haar_state_moment;
use crate::qcore::{
    check_size, distinct_arrangements, identity, kron_vec, max_abs, multisets, symmetric_projector,
    trace_distance, ComplexMatrix, StateVector, C64,
};
use crate::quadrature::TorusQuadrature;
use crate::{Error, Result};

/// Brute-force resonance enumeration limit (number of index-tuple pairs).
pub const ENUMERATION_CAP: u128 = 100_000_000;

/// Tolerance under which a lattice counts as orthonormal.
pub const VERIFIED_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeComponent {
    pub alpha: usize,
    pub n: Vec<i64>,
    pub vec: StateVector,
}

/// Finite set of Fourier components |α_n⟩, with |α(θ)⟩ = Σ_n e^{−in·θ}|α_n⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicLattice {
    pub d: usize,
    pub m: usize,
    pub components: Vec<LatticeComponent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalityReport {
    pub max_violation: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub k: usize,
    /// Deviation (max entry) per sorted α-tuple.
    pub per_alpha: Vec<(Vec<usize>, f64)>,
    pub max_violation: f64,
    pub pass: bool,
}

impl ErgodicLattice {
    pub fn new(d: usize, m: usize, components: Vec<LatticeComponent>) -> Result<Self> {
        if d < 2 {
            return Err(Error::arg("lattice needs d ≥ 2"));
        }
        let mut seen = BTreeMap::new();
        for c in &components {
            if c.alpha >= d || c.n.len() != m || c.vec.len() != d {
                return Err(Error::arg("component shape does not match (d, m)"));
            }
            if seen.insert((c.alpha, c.n.clone()), ()).is_some() {
                return Err(Error::arg("duplicate lattice component"));
            }
        }
        Ok(Self { d, m, components })
    }

    fn support(&self, alpha: usize) -> impl Iterator<Item = &LatticeComponent> {
        self.components.iter().filter(move |c| c.alpha == alpha)
    }

    /// |α(θ)⟩ for every α.
    pub fn states(&self, theta: &[f64]) -> Vec<StateVector> {
        let mut out = vec![StateVector::zeros(self.d); self.d];
        for c in &self.components {
            let ph: f64 = c.n.iter().zip(theta).map(|(n, t)| *n as f64 * t).sum();
            out[c.alpha] += &c.vec * C64::from_polar(1.0, -ph);
        }
        out
    }

    /// P(θ) = Σ_α |α(θ)⟩⟨α|.
    pub fn parent(&self, theta: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.states(theta))
    }
}

pub fn verify_orthonormality(lat: &ErgodicLattice, tol: f64) -> OrthonormalityReport {
    let mut worst = 0.0f64;
    for a in 0..lat.d {
        for b in 0..lat.d {
            // Overlap sums keyed by n′ = n_b − n_a.
            let mut sums: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
            for ca in lat.support(a) {
                for cb in lat.support(b) {
                    let shift: Vec<i64> = cb.n.iter().zip(&ca.n).map(|(x, y)| x - y).collect();
                    *sums.entry(shift).or_insert(C64::new(0.0, 0.0)) += ca.vec.dotc(&cb.vec);
                }
            }
            let zero = vec![0i64; lat.m];
            let diag = if a == b { 1.0 } else { 0.0 };
            if !sums.contains_key(&zero) {
                worst = worst.max(diag);
            }
            for (shift, s) in sums {
                let target = if shift == zero { diag } else { 0.0 };
                worst = worst.max((s - C64::new(target, 0.0)).norm());
            }
        }
    }
    OrthonormalityReport { max_violation: worst, pass: worst <= tol }
}

fn component_lists(lat: &ErgodicLattice, alphas: &[usize]) -> Vec<Vec<(Vec<i64>, StateVector)>> {
    alphas.iter().map(|&a| lat.support(a).map(|c| (c.n.clone(), c.vec.clone())).collect()).collect()
}

fn for_each_tuple(lists: &[Vec<(Vec<i64>, StateVector)>], m: usize, mut f: impl FnMut(&[i64], &StateVector)) {
    let k = lists.len();
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; k];
    loop {
        let mut n = vec![0i64; m];
        let mut v = StateVector::from_element(1, C64::new(1.0, 0.0));
        for (j, &i) in idx.iter().enumerate() {
            let (nj, vj) = &lists[j][i];
            for (a, b) in n.iter_mut().zip(nj) {
                *a += b;
            }
            v = kron_vec(&v, vj);
        }
        f(&n, &v);
        let mut j = k;
        loop {
            if j == 0 {
                return;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < lists[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Σ over resonant pairs ⊗_j |α_{j,n_j}⟩⟨α_{j,n′_j}| by direct pair enumeration.
pub fn resonant_sum_bruteforce(lat: &ErgodicLattice, alphas: &[usize]) -> Result<ComplexMatrix> {
    let lists = component_lists(lat, alphas);
    let tuples: u128 = lists.iter().map(|l| l.len() as u128).product();
    if tuples * tuples > ENUMERATION_CAP {
        return Err(Error::Enumeration { requested: tuples * tuples, cap: ENUMERATION_CAP });
    }
    let dim = (lat.d as u128).pow(alphas.len() as u32);
    check_size(dim, dim)?;
    let mut all = Vec::new();
    for_each_tuple(&lists, lat.m, |n, v| all.push((n.to_vec(), v.clone())));
    let mut acc = ComplexMatrix::zeros(dim as usize, dim as usize);
    for (n, v) in &all {
        for (n2, w) in &all {
            if n == n2 {
                acc.gerc(C64::new(1.0, 0.0), v, w, C64::new(1.0, 0.0));
            }
        }
    }
    Ok(acc)
}

/// Same sum as [`resonant_sum_bruteforce`], grouped by total frequency:
/// Σ_N w_N w_N† with w_N = Σ_{Σn_j = N} ⊗_j |α_{j,n_j}⟩.
pub fn resonant_sum_hashed(lat: &ErgodicLattice, alphas: &[usize]) -> Result<ComplexMatrix> {
    let dim = (lat.d as u128).pow(alphas.len() as u32);
    check_size(dim, dim)?;
    let lists = component_lists(lat, alphas);
    let mut groups: BTreeMap<Vec<i64>, StateVector> = BTreeMap::new();
    for_each_tuple(&lists, lat.m, |n, v| {
        *groups.entry(n.to_vec()).or_insert_with(|| StateVector::zeros(dim as usize)) += v;
    });
    let mut acc = ComplexMatrix::zeros(dim as usize, dim as usize);
    for w in groups.values() {
        acc.gerc(C64::new(1.0, 0.0), w, w, C64::new(1.0, 0.0));
    }
    Ok(acc)
}

fn constraint_report(
    lat: &ErgodicLattice,
    k: usize,
    tol: f64,
    sum: impl Fn(&ErgodicLattice, &[usize]) -> Result<ComplexMatrix>,
) -> Result<ConstraintReport> {
    let pi = symmetric_projector(lat.d, k)?;
    let haar = haar_state_moment(lat.d, k)?;
    let mut per_alpha = Vec::new();
    let mut worst = 0.0f64;
    for alphas in multisets(lat.d, k) {
        let m = sum(lat, &alphas)?;
        let p = distinct_arrangements(&alphas) as f64;
        let lhs = (&pi * m * &pi).scale(p);
        let dev = max_abs(&(lhs - &haar));
        worst = worst.max(dev);
        per_alpha.push((alphas, dev));
    }
    Ok(ConstraintReport { k, per_alpha, max_violation: worst, pass: worst <= tol })
}

/// k-th order constraints by brute-force resonance enumeration.
pub fn verify_khse_constraints(lat: &ErgodicLattice, k: usize, tol: f64) -> Result<ConstraintReport> {
    constraint_report(lat, k, tol, resonant_sum_bruteforce)
}

/// k-th order constraints via grouped partial sums.
pub fn verify_khse_constraints_fast(lat: &ErgodicLattice, k: usize, tol: f64) -> Result<ConstraintReport> {
    constraint_report(lat, k, tol, resonant_sum_hashed)
}

/// Reconstructed frame at θ with a flag for lattices that fail orthonormality.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub states: Vec<StateVector>,
    pub unverified: bool,
}

pub fn reconstruct_qe(lat: &ErgodicLattice, theta: &[f64]) -> Result<Reconstruction> {
    if theta.len() != lat.m {
        return Err(Error::arg("torus point has the wrong number of angles"));
    }
    Ok(Reconstruction { states: lat.states(theta), unverified: !verify_orthonormality(lat, VERIFIED_TOL).pass })
}

/// Floquet decomposition with P(θ) from the lattice and Q = diag(−Σq, q₁, …).
/// Carries the frame P(0) when it differs from 𝟙, so U(0) = 𝟙.
pub fn lattice_to_drive(lat: &ErgodicLattice, omegas: &[f64], quasienergies: &[f64]) -> Result<FloquetDecomposition> {
    if quasienergies.len() + 1 != lat.d {
        return Err(Error::arg("lattice drive needs d − 1 quasienergies"));
    }
    let mut q = Vec::with_capacity(lat.d);
    q.push(-quasienergies.iter().sum::<f64>());
    q.extend_from_slice(quasienergies);
    let p0 = lat.parent(&vec![0.0; lat.m]);
    let frame = if max_abs(&(&p0 - identity(lat.d))) > 1e-14 { Some(p0) } else { None };
    FloquetDecomposition::new(ParentUnitary::Lattice(alloc::boxed::Box::new(lat.clone())), omegas.to_vec(), q, frame)
}

fn qubit_from_alpha0(m: usize, zero: Vec<(Vec<i64>, StateVector)>) -> ErgodicLattice {
    let perp = |v: &StateVector| StateVector::from_row_slice(&[-v[1].conj(), v[0].conj()]);
    let mut comps = Vec::new();
    for (n, v) in zero {
        comps.push(LatticeComponent { alpha: 1, n: n.iter().map(|x| -x).collect(), vec: perp(&v) });
        comps.push(LatticeComponent { alpha: 0, n, vec: v });
    }
    ErgodicLattice::new(2, m, comps).expect("well-formed builtin")
}

/// |α_n⟩ = e^{2πinα/d}|n⟩/√d, n = 0..d−1.
pub fn el_11(d: usize) -> Result<ErgodicLattice> {
    let s = 1.0 / libm::sqrt(d as f64);
    let mut comps = Vec::new();
    for a in 0..d {
        for n in 0..d {
            let mut v = StateVector::zeros(d);
            v[n] = C64::from_polar(s, 2.0 * PI * (n * a) as f64 / d as f64);
            comps.push(LatticeComponent { alpha: a, n: vec![n as i64], vec: v });
        }
    }
    ErgodicLattice::new(d, 1, comps)
}

/// Single-tone qubit lattice with second-moment constraints satisfied; |0(0)⟩ = |0⟩.
pub fn el_12_qubit() -> ErgodicLattice {
    let s6 = 1.0 / libm::sqrt(6.0);
    let e = C64::from_polar(1.0, 3.0 * PI / 4.0);
    let re = |x: f64| C64::new(x, 0.0);
    let phi_p = StateVector::from_row_slice(&[re(-libm::sqrt(0.5 + s6)), e * libm::sqrt(0.5 - s6)]);
    let phi_m = StateVector::from_row_slice(&[re(-libm::sqrt(0.5 - s6)), -e * libm::sqrt(0.5 + s6)]);
    let ap = 0.5 * libm::sqrt(1.0 + 1.0 / libm::sqrt(3.0));
    let am = 0.5 * libm::sqrt(1.0 - 1.0 / libm::sqrt(3.0));
    qubit_from_alpha0(
        1,
        vec![
            (vec![0], &phi_m * re(-ap)),
            (vec![1], &phi_p * re(-am)),
            (vec![2], &phi_m * re(am)),
            (vec![3], &phi_p * re(-ap)),
        ],
    )
}

/// Two-tone qubit lattice with third-moment constraints satisfied; |0(0)⟩ = |0⟩.
pub fn el_23_qubit() -> ErgodicLattice {
    let re = |x: f64| C64::new(x, 0.0);
    let plus = StateVector::from_row_slice(&[re(FRAC_1_SQRT_2), re(FRAC_1_SQRT_2)]);
    let minus = StateVector::from_row_slice(&[re(FRAC_1_SQRT_2), re(-FRAC_1_SQRT_2)]);
    let (a, b) = (libm::sqrt(2.0 / 3.0), libm::sqrt(1.0 / 3.0));
    let v = &minus * re(a) - &plus * re(b);
    let vp = &plus * re(a) + &minus * re(b);
    let f = re(1.0 / (2.0 * core::f64::consts::SQRT_2));
    qubit_from_alpha0(
        2,
        vec![
            (vec![0, 0], (&plus + &v) * f),
            (vec![0, 1], (&minus - &vp) * f),
            (vec![1, 0], (&minus + &vp) * f),
            (vec![1, 1], (&plus - &v) * f),
        ],
    )
}

#[derive(Clone, Debug)]
pub struct BuiltinLattice {
    pub name: &'static str,
    pub lattice: ErgodicLattice,
    /// Highest order the constraints are satisfied at.
    pub k: usize,
}

pub fn builtin_lattices(d11: usize) -> Result<Vec<BuiltinLattice>> {
    Ok(vec![
        BuiltinLattice { name: "el-11", lattice: el_11(d11)?, k: 1 },
        BuiltinLattice { name: "el-12", lattice: el_12_qubit(), k: 2 },
        BuiltinLattice { name: "el-23", lattice: el_23_qubit(), k: 3 },
    ])
}

/// ρ_sym(α) with a grid-doubling consistency check.
#[derive(Clone, Debug)]
pub struct RhoSym {
    pub matrix: ComplexMatrix,
    pub trace: f64,
    /// Max entry shift between the grid and its doubling (None if not checked).
    pub doubling_shift: Option<f64>,
    pub under_resolved: bool,
}

fn rho_sym_on(dec: &FloquetDecomposition, alphas: &[usize], quad: &TorusQuadrature, pi: &ComplexMatrix) -> ComplexMatrix {
    let dim = pi.nrows();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    quad.for_each(dec.tones(), |theta| {
        let p = dec.parent_at(theta);
        let mut v = StateVector::from_element(1, C64::new(1.0, 0.0));
        for &a in alphas {
            v = kron_vec(&v, &p.column(a).into_owned());
        }
        acc.gerc(C64::new(1.0, 0.0), &v, &v, C64::new(1.0, 0.0));
    });
    let w = quad.weight(dec.tones()) * distinct_arrangements(alphas) as f64;
    (pi * acc * pi).scale(w)
}

/// P_α Π_sym E_θ[⊗_j α_j(θ)] Π_sym.
pub fn rho_sym_alpha(dec: &FloquetDecomposition, alphas: &[usize], quad: &TorusQuadrature) -> Result<RhoSym> {
    if alphas.is_empty() || alphas.iter().any(|&a| a >= dec.dim()) {
        return Err(Error::arg("α-tuple must be nonempty with entries below d"));
    }
    let pi = symmetric_projector(dec.dim(), alphas.len())?;
    let matrix = rho_sym_on(dec, alphas, quad, &pi);
    let (doubling_shift, under_resolved) = match quad.doubling_tol {
        Some(tol) => {
            let fine = rho_sym_on(dec, alphas, &quad.doubled(), &pi);
            let shift = max_abs(&(&fine - &matrix));
            (Some(shift), shift > tol)
        }
        None => (None, false),
    };
    let trace = matrix.trace().re;
    Ok(RhoSym { matrix, trace, doubling_shift, under_resolved })
}

#[derive(Clone, Debug)]
pub struct TheoremG2Report {
    pub k: usize,
    /// Trace distance to ρ_Haar^(k) per sorted α-tuple.
    pub per_alpha: Vec<(Vec<usize>, f64)>,
    pub max_deviation: f64,
    pub under_resolved: bool,
    pub pass: bool,
}

/// Max over α-tuples (up to ordering) of D(ρ_sym(α), ρ_Haar^(k)).
pub fn check_theorem_g2(dec: &FloquetDecomposition, k: usize, quad: &TorusQuadrature, tol: f64) -> Result<TheoremG2Report> {
    let haar = haar_state_moment(dec.dim(), k)?;
    let mut per_alpha = Vec::new();
    let mut worst = 0.0f64;
    let mut under = false;
    for alphas in multisets(dec.dim(), k) {
        let r = rho_sym_alpha(dec, &alphas, quad)?;
        under |= r.under_resolved;
        let dev = trace_distance(&r.matrix, &haar)?;
        worst = worst.max(dev);
        per_alpha.push((alphas, dev));
    }
    Ok(TheoremG2Report { k, per_alpha, max_deviation: worst, under_resolved: under, pass: worst <= tol })
}
