use proptest::prelude::*;
use rand::Rng;

use logent::linalg::{self, Complex, ComplexMatrix, Subsystem};
use logent::state::{self, sample, DensityMatrix, PureState};

fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.max_abs_diff(b).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn dagger_is_an_involution(seed in any::<u64>(), r in 1usize..7, c in 1usize..7) {
        let m = sample::ginibre(&mut state::rng(seed), r, c);
        prop_assert_eq!(m.dagger().dagger(), m);
    }

    #[test]
    fn trace_is_cyclic(seed in any::<u64>(), n in 1usize..=16, k in 1usize..=16) {
        let mut rng = state::rng(seed);
        let a = sample::ginibre(&mut rng, n, k);
        let b = sample::ginibre(&mut rng, k, n);
        let ab = linalg::trace(&a.matmul(&b).unwrap()).unwrap();
        let ba = linalg::trace(&b.matmul(&a).unwrap()).unwrap();
        let scale = 1.0 + ab.norm();
        prop_assert!((ab - ba).norm() <= 1e-12 * scale, "{ab} vs {ba}");
    }

    #[test]
    fn kron_is_associative_and_multiplies_traces(
        seed in any::<u64>(), a in 1usize..4, b in 1usize..4, c in 1usize..4,
    ) {
        let mut rng = state::rng(seed);
        let x = sample::ginibre(&mut rng, a, a);
        let y = sample::ginibre(&mut rng, b, b);
        let z = sample::ginibre(&mut rng, c, c);
        let left = linalg::kron(&linalg::kron(&x, &y), &z);
        let right = linalg::kron(&x, &linalg::kron(&y, &z));
        prop_assert!(max_diff(&left, &right) <= 1e-14);

        let t = linalg::trace(&linalg::kron(&x, &y)).unwrap();
        let tt = linalg::trace(&x).unwrap() * linalg::trace(&y).unwrap();
        prop_assert!((t - tt).norm() <= 1e-12 * (1.0 + tt.norm()));
    }

    #[test]
    fn partial_trace_of_kron_recovers_factor(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut rng = state::rng(seed);
        let a = sample::ginibre(&mut rng, da, da);
        let b = sample::ginibre(&mut rng, db, db);
        let ab = linalg::kron(&a, &b);
        let keep_a = linalg::partial_trace(&ab, da, db, Subsystem::A).unwrap();
        let keep_b = linalg::partial_trace(&ab, da, db, Subsystem::B).unwrap();
        prop_assert!(max_diff(&keep_a, &a.scale(linalg::trace(&b).unwrap())) <= 1e-12);
        prop_assert!(max_diff(&keep_b, &b.scale(linalg::trace(&a).unwrap())) <= 1e-12);
    }

    #[test]
    fn eigenvalues_of_rotated_diagonal(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = state::rng(seed);
        let mut d: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let p = sample::unitary(&mut rng, n);
        let m = p
            .matmul(&ComplexMatrix::from_real_diagonal(&d))
            .unwrap()
            .matmul(&p.dagger())
            .unwrap()
            .hermitian_part()
            .unwrap();
        d.sort_by(f64::total_cmp);
        let got = linalg::hermitian_eigenvalues(&m).unwrap();
        for (x, y) in got.iter().zip(&d) {
            prop_assert!((x - y).abs() <= 1e-9, "{got:?} vs {d:?}");
        }
    }

    #[test]
    fn eigenvectors_diagonalize(seed in any::<u64>(), n in 1usize..=10) {
        let rho = state::random_density(n, seed);
        let eig = rho.eigen();
        let back = eig
            .vectors
            .matmul(&ComplexMatrix::from_real_diagonal(&eig.values))
            .unwrap()
            .matmul(&eig.vectors.dagger())
            .unwrap();
        prop_assert!(max_diff(&back, rho.matrix()) <= 1e-10);
        prop_assert!(eig.vectors.unitarity_deviation().unwrap() <= 1e-10);
    }

    #[test]
    fn entropy_range_and_eigenvalue_route(seed in any::<u64>(), n in 1usize..=12) {
        let rho = state::random_density(n, seed);
        let h = rho.logical_entropy();
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= 1.0 - 1.0 / n as f64 + 1e-9);
        let lambdas = linalg::hermitian_eigenvalues(rho.matrix()).unwrap();
        let via_eigen = 1.0 - lambdas.iter().map(|l| l * l).sum::<f64>();
        prop_assert!((h - via_eigen).abs() <= 1e-10);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = state::rng(seed);
        let rho = sample::density(&mut rng, n);
        let u = sample::unitary(&mut rng, n);
        let h = rho.logical_entropy();
        prop_assert!((rho.conjugate_by(&u).unwrap().logical_entropy() - h).abs() <= 1e-10);
    }

    #[test]
    fn pure_states_have_zero_entropy(seed in any::<u64>(), n in 1usize..=12) {
        let rho = state::random_pure_state(n, seed).density();
        prop_assert!(rho.logical_entropy().abs() <= 1e-9);
        let spec = rho.spectrum();
        prop_assert!((spec[n - 1] - 1.0).abs() <= 1e-9);
        prop_assert!(spec[..n - 1].iter().all(|l| l.abs() <= 1e-9));
    }

    #[test]
    fn rank_two_states_have_positive_entropy(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = state::rng(seed);
        let rho = sample::density_with_rank(&mut rng, n, 2);
        prop_assert!(rho.logical_entropy() > 1e-9);
        prop_assert!(rho.spectrum()[n - 1] < 1.0 - 1e-9);
    }

    #[test]
    fn random_density_is_valid(seed in any::<u64>(), n in 1usize..=16) {
        let rho = state::random_density(n, seed);
        prop_assert!(state::validate_density(rho.matrix().clone(), 1e-9).is_ok());
    }

    #[test]
    fn random_unitary_is_unitary(seed in any::<u64>(), n in 1usize..=16) {
        prop_assert!(state::random_unitary(n, seed).unitarity_deviation().unwrap() <= 1e-10);
    }
}

#[test]
fn maximally_mixed_attains_the_upper_bound_only() {
    for n in 1..=8 {
        let h = DensityMatrix::maximally_mixed(n).logical_entropy();
        assert!((h - (1.0 - 1.0 / n as f64)).abs() < 1e-12);
    }
    for seed in 0..50 {
        let rho = state::random_density(4, seed);
        assert!(rho.logical_entropy() < 0.75 - 1e-9);
    }
}

#[test]
fn zero_entropy_only_for_rank_one() {
    let mixed = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0 - 1e-4, 1e-4])).unwrap();
    assert!(mixed.logical_entropy() > 1e-9);
    let pure = PureState::new(vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)])
        .unwrap()
        .density();
    assert!(pure.logical_entropy().abs() < 1e-12);
}
