#[allow(unused_imports)]
use crate::fmath::Float;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type StateVector = DVector<C64>;

/// Default cap on dense entry counts (2^26 complex numbers, 1 GiB).
pub const SIZE_CAP: usize = 1 << 26;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn check_size(rows: u128, cols: u128) -> Result<()> {
    let n = rows.saturating_mul(cols);
    if n > SIZE_CAP as u128 {
        return Err(Error::Size { requested: n, cap: SIZE_CAP });
    }
    Ok(())
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn basis_state(d: usize, i: usize) -> StateVector {
    let mut v = StateVector::zeros(d);
    v[i] = ONE;
    v
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_size(
        (a.nrows() * b.nrows()) as u128,
        (a.ncols() * b.ncols()) as u128,
    )?;
    Ok(a.kronecker(b))
}

pub fn kron_vec(a: &StateVector, b: &StateVector) -> StateVector {
    let mut out = StateVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// `a ⊗ a ⊗ … ⊗ a` (k factors); k = 0 gives the 1×1 identity.
pub fn kron_power(a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    check_size(
        (a.nrows() as u128).saturating_pow(k as u32),
        (a.ncols() as u128).saturating_pow(k as u32),
    )?;
    let mut out = identity(1);
    for _ in 0..k {
        out = out.kronecker(a);
    }
    Ok(out)
}

pub fn kron_vec_power(v: &StateVector, k: usize) -> StateVector {
    let mut out = StateVector::from_element(1, ONE);
    for _ in 0..k {
        out = kron_vec(&out, v);
    }
    out
}

/// `(U* ⊗ U)^{⊗k}`, the k-fold channel representation.
pub fn channel_power(u: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let d = u.nrows() as u128;
    check_size(d.saturating_pow(2 * k as u32), d.saturating_pow(2 * k as u32))?;
    let single = u.map(|z| z.conj()).kronecker(u);
    kron_power(&single, k)
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    unitarity_error(u) <= tol
}

pub fn hermiticity_error(h: &ComplexMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(h - h.adjoint()))
}

pub fn is_hermitian(h: &ComplexMatrix, tol: f64) -> bool {
    hermiticity_error(h) <= tol
}

/// Density-matrix check: Hermitian, unit trace, PSD, all to `tol`.
pub fn is_density(rho: &ComplexMatrix, tol: f64) -> bool {
    if !is_hermitian(rho, tol) || (rho.trace() - ONE).norm() > tol {
        return false;
    }
    let (vals, _) = hermitian_eigen(rho);
    vals.iter().all(|&l| l >= -tol)
}

/// Eigenvalues (ascending) and eigenvectors of the Hermitian part of `h`.
pub fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = ComplexMatrix::from_fn(h.nrows(), h.ncols(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (vals, vecs)
}

pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Spectral norm of a Hermitian matrix.
pub fn operator_norm_hermitian(h: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(h).iter().fold(0.0, |a, l| a.max(l.abs()))
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_function(h: &ComplexMatrix, f: impl Fn(f64) -> C64) -> ComplexMatrix {
    let (vals, v) = hermitian_eigen(h);
    let mut scaled = v.clone();
    for (c, &l) in vals.iter().enumerate() {
        let w = f(l);
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= w;
        }
    }
    scaled * v.adjoint()
}

/// `e^{−iHt}` for Hermitian `H`.
pub fn expm_hermitian(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    hermitian_function(h, |l| C64::from_polar(1.0, -l * t))
}

/// Hermitian `H` with `e^{−iH} = u` and spectrum in (−π, π].
pub fn matrix_log_principal(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u.is_square() || unitarity_error(u) > 1e-8 {
        return Err(Error::arg("matrix_log_principal needs a unitary input"));
    }
    let d = u.nrows();
    let schur = Schur::try_new(u.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::arg("Schur iteration did not converge"))?;
    let (q, t) = schur.unpack();
    let mut scaled = q.clone();
    for c in 0..d {
        let mut phi = -t[(c, c)].arg();
        if phi <= -core::f64::consts::PI {
            phi = core::f64::consts::PI;
        }
        for r in 0..d {
            scaled[(r, c)] *= phi;
        }
    }
    let h = scaled * q.adjoint();
    Ok((&h + h.adjoint()).scale(0.5))
}

pub fn density(psi: &StateVector) -> ComplexMatrix {
    psi * psi.adjoint()
}

/// ½ Σ|λ(ρ − σ)| through a Hermitian eigendecomposition.
pub fn trace_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::arg("trace_distance: shape mismatch"));
    }
    if hermiticity_error(rho) > 1e-8 || hermiticity_error(sigma) > 1e-8 {
        return Err(Error::arg("trace_distance: non-Hermitian input"));
    }
    let diff = rho - sigma;
    Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>())
}

/// √(1 − |⟨ψ|φ⟩|²) for unit vectors.
pub fn pure_trace_distance(psi: &StateVector, phi: &StateVector) -> f64 {
    let ov = psi.dotc(phi).norm_sqr();
    (1.0 - ov).max(0.0).sqrt()
}

pub fn normalize(mut v: StateVector) -> StateVector {
    let n = v.norm();
    if n > 0.0 {
        v.unscale_mut(n);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{haar_random_unitary, random_hermitian, seeded};

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
    }

    #[test]
    fn kron_identity_and_bitflip() {
        assert_eq!(kron(&identity(2), &identity(2)).unwrap(), identity(4));
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        assert_eq!(xx * basis_state(4, 0), basis_state(4, 3));
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = seeded(1);
        let m: Vec<_> = (0..4).map(|_| haar_random_unitary(2, &mut rng) * C64::new(0.7, 0.2)).collect();
        let lhs = kron(&m[0], &m[1]).unwrap() * kron(&m[2], &m[3]).unwrap();
        let rhs = kron(&(&m[0] * &m[2]), &(&m[1] * &m[3])).unwrap();
        assert!(max_abs(&(lhs - rhs)) <= 1e-12);
    }

    #[test]
    fn kron_respects_cap() {
        let big = ComplexMatrix::zeros(1 << 14, 1);
        assert!(matches!(kron(&big, &big.transpose()), Err(Error::Size { .. })));
    }

    #[test]
    fn trace_distance_examples() {
        let z = basis_state(2, 0);
        let o = basis_state(2, 1);
        assert_eq!(trace_distance(&density(&z), &density(&z)).unwrap(), 0.0);
        assert!((trace_distance(&density(&z), &density(&o)).unwrap() - 1.0).abs() < 1e-14);
        let plus = normalize(z.clone() + &o);
        let eig = trace_distance(&density(&z), &density(&plus)).unwrap();
        let ov = pure_trace_distance(&z, &plus);
        assert!((eig - ov).abs() <= 1e-12);
        assert!((eig - 0.5f64.sqrt()).abs() <= 1e-12);
    }

    #[test]
    fn trace_distance_rejects_non_hermitian() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
        assert!(trace_distance(&a, &identity(2)).is_err());
    }

    #[test]
    fn log_of_identity_and_branch_edge() {
        assert!(max_abs(&matrix_log_principal(&identity(3)).unwrap()) < 1e-14);
        let u = ComplexMatrix::from_diagonal(&StateVector::from_vec(alloc::vec![ONE, -ONE]));
        let h = matrix_log_principal(&u).unwrap();
        assert!(h[(0, 0)].norm() < 1e-14);
        assert!((h[(1, 1)].re - core::f64::consts::PI).abs() < 1e-14);
        assert!((operator_norm_hermitian(&h) - core::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn log_round_trip_random() {
        let mut rng = seeded(7);
        for _ in 0..20 {
            let u = haar_random_unitary(4, &mut rng);
            let h = matrix_log_principal(&u).unwrap();
            assert!(max_abs(&(expm_hermitian(&h, 1.0) - &u)) <= 1e-10);
            assert!(operator_norm_hermitian(&h) <= core::f64::consts::PI + 1e-12);
            assert!(is_hermitian(&h, 1e-12));
        }
    }

    #[test]
    fn log_rejects_non_unitary() {
        assert!(matrix_log_principal(&identity(2).scale(2.0)).is_err());
    }

    #[test]
    fn expm_matches_series() {
        let mut rng = seeded(3);
        let h = random_hermitian(3, &mut rng);
        let mut term = identity(3);
        let mut sum = identity(3);
        let a = h.map(|z| z * C64::new(0.0, -0.3));
        for n in 1..40 {
            term = &term * &a / C64::new(n as f64, 0.0);
            sum += &term;
        }
        assert!(max_abs(&(sum - expm_hermitian(&h, 0.3))) < 1e-13);
    }
}
