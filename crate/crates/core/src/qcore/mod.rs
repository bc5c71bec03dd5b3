//! Dense complex linear algebra shared by every other module.

mod linalg;
mod pauli;
mod perm;
mod propagate;
mod random;

pub use linalg::*;
pub use pauli::{Pauli, PauliMask, PauliString};
pub use perm::{
    binomial, distinct_arrangements, factorial, lis_permutation_count, multisets,
    permutation_operator, symmetric_dimension, symmetric_projector, Permutation, PERMUTATION_CAP,
};
pub use propagate::{expm_apply, PauliSum};
pub use random::{
    complex_gaussian, haar_random_state, haar_random_unitary, random_hermitian, seeded, substream,
    SeededRng,
};
