use proptest::prelude::*;

use qergo_core::drives::qubit_cue_drive;
use qergo_core::ergodicity::{khse_deviation, MomentAccumulator};
use qergo_core::euler::{hurwitz_unitary, EulerAngles};
use qergo_core::haar::{frame_potential_from_moment, haar_state_frame_potential, haar_state_moment, MomentKind};
use qergo_core::lattice::{builtin_lattices, verify_khse_constraints, verify_orthonormality};
use qergo_core::qcore::{basis_state, seeded, symmetric_dimension, unitarity_error};

#[test]
fn haar_state_moment_matches_its_frame_potential() {
    for (d, k) in [(2, 1), (2, 3), (3, 2), (4, 2)] {
        let m = haar_state_moment(d, k).unwrap();
        let fp = haar_state_frame_potential(d, k);
        assert!((frame_potential_from_moment(&m) - fp).abs() < 1e-12, "d={d} k={k}");
        assert!((fp * symmetric_dimension(d, k) as f64 - 1.0).abs() < 1e-12);
    }
}

#[test]
fn builtin_lattices_are_exact_designs() {
    for b in builtin_lattices(3).unwrap() {
        assert!(verify_orthonormality(&b.lattice, 1e-10).pass, "{}", b.name);
        let rep = verify_khse_constraints(&b.lattice, b.k, 1e-10).unwrap();
        assert!(rep.pass, "{}: {}", b.name, rep.max_violation);
    }
}

#[test]
fn qubit_cue_first_moment_converges() {
    let drive = qubit_cue_drive(1.0, core::f64::consts::SQRT_2, 0.732_050_807_568_877_2);
    let mut acc = MomentAccumulator::new(MomentKind::State, 2, 1).unwrap();
    let psi0 = basis_state(2, 0);
    for t in 0..20_000 {
        acc.push_state(&(drive.unitary(t as f64) * &psi0)).unwrap();
    }
    assert!(khse_deviation(&acc).unwrap() < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hurwitz_parametrisation_is_unitary(d in 2usize..6, seed in any::<u64>()) {
        let angles = EulerAngles::sample(d, &mut seeded(seed)).unwrap();
        prop_assert!(unitarity_error(&hurwitz_unitary(&angles)) < 1e-12);
    }
}
