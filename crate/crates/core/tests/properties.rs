use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stabgap::averages::{extrinsic_ase, extrinsic_ase_embedding, group_intrinsic_ase};
use stabgap::estimate::{haar_embedding, haar_state};
use stabgap::magic::{linear_se, renyi_se, se_upper_bound};
use stabgap::wh::random_clifford;
use stabgap::HilbertSpec;

fn host() -> impl Strategy<Value = HilbertSpec> {
    prop_oneof![
        (2usize..=7).prop_map(|d| HilbertSpec::qudit(d).unwrap()),
        (1usize..=3).prop_map(|n| HilbertSpec::qubits(n).unwrap()),
        Just(HilbertSpec::multiqudit(3, 2).unwrap()),
        Just(HilbertSpec::multiqudit(4, 2).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_bounds(spec in host(), seed in any::<u64>()) {
        let psi = haar_state(spec.dim(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let m = linear_se(&spec, &psi).unwrap();
        prop_assert!((0.0..1.0).contains(&m));
        let r2 = renyi_se(&spec, &psi, 2.0).unwrap();
        prop_assert!(r2 <= se_upper_bound(&spec, 2.0).unwrap() + 1e-9);
        prop_assert!((r2 - (-(1.0 - m).ln())).abs() < 1e-9);
    }

    #[test]
    fn clifford_invariance(spec in host(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = haar_state(spec.dim(), &mut rng).unwrap();
        let u = random_clifford(&spec, &mut rng).unwrap();
        let moved: Vec<_> = (&u * nalgebra::DVector::from_column_slice(psi.amplitudes())).iter().copied().collect();
        let moved = stabgap::PureState::new(moved).unwrap();
        let a = linear_se(&spec, &psi).unwrap();
        let b = linear_se(&spec, &moved).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn subspace_routes_agree(spec in host(), seed in any::<u64>(), frac in 0.0f64..1.0) {
        let ds = 1 + ((spec.dim() - 1) as f64 * frac) as usize;
        let emb = haar_embedding(&spec, ds, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let a = extrinsic_ase(&emb.projector()).unwrap();
        let b = extrinsic_ase_embedding(&emb).unwrap();
        prop_assert!((a - b).abs() < 1e-8);
        prop_assert!((0.0..=1.0).contains(&a));
        if ds == spec.dim() {
            prop_assert!((a - group_intrinsic_ase(&spec)).abs() < 1e-9);
        }
    }
}
