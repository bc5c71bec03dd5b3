use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{ComplexMatrix, StateVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Independent stream `stream` under the same seed (one per worker/chunk).
pub fn substream(seed: u64, stream: u64) -> SeededRng {
    let mut rng = seeded(seed);
    rng.set_stream(stream);
    rng
}

/// Standard complex normal: E|z|² = 1.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary: Ginibre matrix, then modified Gram–Schmidt on columns, which
/// is the QR factorization with a real positive R diagonal.
pub fn haar_random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let mut q = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    for j in 0..d {
        for i in 0..j {
            let (qi, mut qj) = q.columns_range_pair_mut(i, j);
            let r = qi.dotc(&qj);
            qj.axpy(-r, &qi, C64::new(1.0, 0.0));
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

pub fn haar_random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    let v = StateVector::from_fn(d, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// GUE-like Hermitian matrix with O(1) entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    (&a + a.adjoint()).scale(0.5)
}
