use std::f64::consts::PI;

use proptest::prelude::*;
use rand::Rng;

use logent::channel::{self, CouplingModel};
use logent::classical::{self, Distribution, Partition};
use logent::fuzz;
use logent::linalg::{self, Complex, ComplexMatrix, Subsystem};
use logent::measurement;
use logent::mixing;
use logent::state::{self, sample, DensityMatrix};
use logent::zoo::{self, AmplitudeDamping};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

fn random_model<R: Rng>(rng: &mut R, ds: usize, de: usize) -> CouplingModel {
    let env_init = rng.random_range(0..de);
    CouplingModel::new(sample::unitary(rng, ds * de), ds, de, env_init).unwrap()
}

#[test]
fn kraus_route_matches_partial_trace_route() {
    let mut worst: f64 = 0.0;
    for trial in 0..500 {
        let mut rng = state::rng(fuzz::trial_seed(500, trial));
        let ds = rng.random_range(1..=5);
        let de = rng.random_range(1..=4);
        let rho = fuzz::random_density_any_rank(&mut rng, ds);
        let model = random_model(&mut rng, ds, de);
        let kraus = channel::extract_kraus(&model).unwrap();
        let via_kraus = channel::apply_channel(&rho, &kraus).unwrap();
        let joint = channel::couple(&rho, &model).unwrap();
        let via_trace = channel::trace_out_environment(&joint, ds, de).unwrap();
        worst = worst.max(via_kraus.matrix().max_abs_diff(via_trace.matrix()).unwrap());
    }
    assert!(worst <= 1e-10, "{worst:e}");
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn extracted_kraus_sets_are_complete_and_trace_preserving(
        seed in any::<u64>(), ds in 1usize..=5, de in 1usize..=4,
    ) {
        let mut rng = state::rng(seed);
        let model = random_model(&mut rng, ds, de);
        let kraus = channel::extract_kraus(&model).unwrap();
        prop_assert!(kraus.completeness_deviation() <= 1e-9);
        let rho = sample::density(&mut rng, ds);
        let out = channel::apply_channel(&rho, &kraus).unwrap();
        prop_assert!((linalg::trace(out.matrix()).unwrap().re - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn pure_inputs_satisfy_the_bound_and_its_proof_steps(
        seed in any::<u64>(), ds in 1usize..=5, de in 1usize..=4,
    ) {
        let mut rng = state::rng(seed);
        let rho = sample::pure_state(&mut rng, ds).density();
        let model = random_model(&mut rng, ds, de);
        let r = channel::verify_theorem(&rho, &model).unwrap();
        prop_assert!(r.hypothesis_pure);
        prop_assert!(r.slack >= -1e-9);
        prop_assert!((r.projected_entropy - r.bound).abs() <= 1e-9);
        prop_assert!(r.entropy <= r.projected_entropy + 1e-9);
        prop_assert!(r.holds());
    }

    #[test]
    fn bound_is_total_off_block_mass(seed in any::<u64>(), ds in 1usize..=5, de in 1usize..=4) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, ds);
        let model = random_model(&mut rng, ds, de);
        let joint = channel::couple(&rho, &model).unwrap();
        let blocks = channel::block_decompose(&joint, ds, de).unwrap();
        let diag: f64 = (0..de).map(|i| blocks.block(i, i).frobenius_sq()).sum();
        let expected = joint.matrix().frobenius_sq() - diag;
        prop_assert!((channel::off_block_bound(&blocks) - expected).abs() <= 1e-10);
        prop_assert!(blocks.reassemble().max_abs_diff(joint.matrix()).unwrap() == 0.0);
    }

    #[test]
    fn system_only_unitary_gives_no_noise(seed in any::<u64>(), ds in 1usize..=5, de in 1usize..=4) {
        let mut rng = state::rng(seed);
        let rho = sample::pure_state(&mut rng, ds).density();
        let model = CouplingModel::system_only(&sample::unitary(&mut rng, ds), de).unwrap();
        let r = channel::verify_theorem(&rho, &model).unwrap();
        prop_assert!(r.bound.abs() <= 1e-12);
        prop_assert!(r.entropy.abs() <= 1e-10);
    }

    #[test]
    fn exchange_entropy_routes_agree_and_respect_the_bound(
        seed in any::<u64>(), ds in 1usize..=3, de in 1usize..=3,
    ) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, ds);
        let model = random_model(&mut rng, ds, de);
        let r = channel::exchange_entropy(&rho, &model).unwrap();
        prop_assert_eq!(r.dim_r, rho.rank(channel::RANK_TOL));
        prop_assert!((r.exchange_entropy - r.kraus_entropy).abs() <= 1e-10);
        prop_assert!(r.slack >= -1e-9);
    }

    #[test]
    fn projection_never_lowers_entropy(seed in any::<u64>(), d in 1usize..=12, aligned in any::<bool>()) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, d);
        let ps = if aligned {
            measurement::projectors_from_partition(&fuzz::random_partition(&mut rng, d), d).unwrap()
        } else {
            fuzz::random_rotated_projectors(&mut rng, d)
        };
        prop_assert!(measurement::corollary2_check(&rho, &ps).unwrap());
        let projected = measurement::project(&rho, &ps).unwrap();
        prop_assert!((linalg::trace(projected.matrix()).unwrap().re - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn purity_splits_into_blocks_and_off_block_mass(seed in any::<u64>(), d in 1usize..=16) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, d);
        let part = fuzz::random_partition(&mut rng, d);
        let ps = measurement::projectors_from_partition(&part, d).unwrap();
        let dec = measurement::proposition1_decomposition(&rho, &ps).unwrap();
        prop_assert!(dec.residual() <= 1e-10);
        let gain = measurement::corollary1_check(&rho, &ps).unwrap();
        prop_assert!((gain - dec.off_block_mass).abs() <= 1e-10);
    }

    #[test]
    fn projection_commutes_with_block_respecting_permutations(seed in any::<u64>(), d in 2usize..=10) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, d);
        let part = fuzz::random_partition(&mut rng, d);
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let mut p = ComplexMatrix::zeros(d, d);
        for (i, &j) in perm.iter().enumerate() {
            p[(j, i)] = Complex::new(1.0, 0.0);
        }
        // Index i moves to perm[i]; relabel the partition the same way.
        let mut labels = vec![0; d];
        for (i, &j) in perm.iter().enumerate() {
            labels[j] = part.label(i);
        }
        let moved_part = Partition::from_labels(&labels).unwrap();
        let ps = measurement::projectors_from_partition(&part, d).unwrap();
        let moved_ps = measurement::projectors_from_partition(&moved_part, d).unwrap();

        let then_move = measurement::project(&rho, &ps).unwrap().conjugate_by(&p).unwrap();
        let move_then = measurement::project(&rho.conjugate_by(&p).unwrap(), &moved_ps).unwrap();
        prop_assert!(then_move.matrix().max_abs_diff(move_then.matrix()).unwrap() <= 1e-14);
    }

    #[test]
    fn off_block_mass_matches_bound_on_coupled_joints(
        seed in any::<u64>(), ds in 1usize..=4, de in 1usize..=4,
    ) {
        let mut rng = state::rng(seed);
        let rho = fuzz::random_density_any_rank(&mut rng, ds);
        let model = random_model(&mut rng, ds, de);
        let joint = channel::couple(&rho, &model).unwrap();
        let ps = measurement::projectors_from_partition(&channel::environment_partition(ds, de), ds * de).unwrap();
        let dec = measurement::proposition1_decomposition(&joint, &ps).unwrap();
        let bound = channel::off_block_bound(&channel::block_decompose(&joint, ds, de).unwrap());
        prop_assert!((dec.off_block_mass - bound).abs() <= 1e-12);
    }

    #[test]
    fn mixing_inequality(seed in any::<u64>(), n in 2usize..=6, d in 1usize..=8) {
        let mut rng = state::rng(seed);
        let e = fuzz::random_ensemble(&mut rng, n, d);
        let r = mixing::proposition2_check(&e);
        prop_assert!(r.slack >= -1e-9);
        prop_assert!(r.holds);
    }

    #[test]
    fn orthogonal_supports_give_equality(seed in any::<u64>(), n in 2usize..=6, extra in 0usize..=3) {
        let mut rng = state::rng(seed);
        let e = fuzz::random_orthogonal_ensemble(&mut rng, n, n + extra);
        let r = mixing::proposition2_check(&e);
        prop_assert!(r.orthogonal_support);
        prop_assert!(r.slack.abs() <= 1e-9);
    }

    #[test]
    fn spectral_decomposition_bound_forms_agree(seed in any::<u64>(), n in 1usize..=4, d in 1usize..=6) {
        let mut rng = state::rng(seed);
        let e = fuzz::random_ensemble(&mut rng, n, d);
        let b = mixing::spectral_bound(&e);
        prop_assert!((b.flat - b.grouped).abs() <= 1e-10);
        let r = mixing::proposition2_check(&mixing::spectral_ensemble(&e).unwrap());
        prop_assert!((r.rhs - b.grouped).abs() <= 1e-10);
        prop_assert!((r.lhs - mixing::mix(&e).logical_entropy()).abs() <= 1e-10);
        prop_assert!(r.slack >= -1e-9);
    }

    #[test]
    fn purification_reduces_back(seed in any::<u64>(), d in 1usize..=6) {
        let rho = state::random_density(d, seed);
        let psi = mixing::purify(&rho);
        let back = linalg::partial_trace(&psi.density().into_matrix(), d, d, Subsystem::A).unwrap();
        prop_assert!(back.max_abs_diff(rho.matrix()).unwrap() <= 1e-9);

        let (min_psi, r) = mixing::purify_minimal(&rho, channel::RANK_TOL).unwrap();
        let back = linalg::partial_trace(&min_psi.density().into_matrix(), d, r, Subsystem::A).unwrap();
        prop_assert!(back.max_abs_diff(rho.matrix()).unwrap() <= 1e-9);
    }

    #[test]
    fn schmidt_symmetry(seed in any::<u64>(), da in 1usize..=5, db in 1usize..=5) {
        let psi = state::random_pure_state(da * db, seed);
        let (ha, hb) = mixing::schmidt_entropy_symmetry(&psi, da, db).unwrap();
        prop_assert!((ha - hb).abs() <= 1e-10);
    }

    #[test]
    fn pure_ensemble_chain(seed in any::<u64>(), n in 2usize..=5, d in 1usize..=5) {
        let mut rng = state::rng(seed);
        let e = fuzz::random_pure_ensemble(&mut rng, n, d);
        let chain = mixing::purification_chain(&e).unwrap();
        prop_assert!(chain.holds(), "{chain:?}");
        prop_assert!(mixing::proof_step_b_check(&e).unwrap());
    }

    #[test]
    fn refinement_never_lowers_partition_entropy(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = state::rng(seed);
        let p = fuzz::random_distribution(&mut rng, n);
        let part = fuzz::random_partition(&mut rng, n);
        let block = rng.random_range(0..part.num_blocks());
        let size = part.blocks()[block].len();
        let positions: Vec<usize> = (0..size).filter(|_| rng.random_bool(0.5)).collect();
        let finer = part.split_block(block, &positions).unwrap();
        let coarse = classical::partition_entropy(&p, &part).unwrap();
        let fine = classical::partition_entropy(&p, &finer).unwrap();
        prop_assert!(fine >= coarse - 1e-12);
        prop_assert!((classical::dit_count(&p, &part).unwrap() - coarse).abs() <= 1e-12);
    }

    #[test]
    fn bridge_holds(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = state::rng(seed);
        let p = fuzz::random_distribution(&mut rng, n);
        let part = fuzz::random_partition(&mut rng, n);
        prop_assert!(classical::bridge_check(&p, &part).unwrap());
    }

    #[test]
    fn distribution_entropy_matches_diagonal_density(seed in any::<u64>(), n in 1usize..=32) {
        let p = fuzz::random_distribution(&mut state::rng(seed), n);
        let quantum = DensityMatrix::from_probabilities(p.probs()).logical_entropy();
        prop_assert!((classical::logical_entropy_dist(&p) - quantum).abs() <= 1e-12);
        prop_assert!((classical::distinction_mass(&p) - quantum).abs() <= 1e-12);
    }
}

#[test]
fn discrete_partition_bridge_reduces_to_distribution_entropy() {
    let p = Distribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
    let r = classical::bridge_report(&p, &Partition::discrete(4)).unwrap();
    assert!((r.quantum - classical::logical_entropy_dist(&p)).abs() < 1e-15);
    let r = classical::bridge_report(&p, &Partition::indiscrete(4)).unwrap();
    assert!(r.classical.abs() < 1e-15 && r.quantum.abs() < 1e-15);
}

/// The diagonal state keeps its full distribution entropy under any block
/// measurement, so only the discrete partition matches the partition entropy.
#[test]
fn diagonal_state_does_not_see_the_partition() {
    let p = Distribution::uniform(4);
    let rho = DensityMatrix::from_probabilities(p.probs());
    let ps = measurement::projectors_from_partition(&Partition::contiguous(2, 2), 4).unwrap();
    let h = measurement::project(&rho, &ps).unwrap().logical_entropy();
    assert!((h - 0.75).abs() < 1e-15);
    let classical = classical::partition_entropy(&p, &Partition::contiguous(2, 2)).unwrap();
    assert!((classical - 0.5).abs() < 1e-15);
}

fn random_qubit<R: Rng>(rng: &mut R) -> (f64, Complex, f64) {
    let a: f64 = rng.random();
    let c = 1.0 - a;
    let r: f64 = rng.random();
    let b = Complex::from_polar(r * (a * c).sqrt(), rng.random::<f64>() * 2.0 * PI);
    (a, b, c)
}

#[test]
fn amplitude_damping_closed_forms_on_grid() {
    let mut rng = state::rng(77);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = random_qubit(&mut rng);
        let rho = zoo::qubit_density(a, b, c).unwrap();
        for k in 0..64 {
            let theta = 2.0 * PI * k as f64 / 64.0;
            let model = AmplitudeDamping::new(theta).model();
            let out = channel::apply_channel(&rho, &channel::extract_kraus(&model).unwrap()).unwrap();
            worst = worst.max((out.purity() - zoo::ad_closed_form_purity(a, b, c, theta).unwrap()).abs());

            let joint = channel::couple(&rho, &model).unwrap();
            let blocks = channel::block_decompose(&joint, 2, 2).unwrap();
            let bound = channel::off_block_bound(&blocks);
            worst = worst.max((bound - zoo::ad_closed_form_bound(a, b, c, theta).unwrap()).abs());

            let (p0, p1) = zoo::ad_closed_form_block_purities(a, b, c, theta).unwrap();
            worst = worst.max((blocks.block(0, 0).frobenius_sq() - p0).abs());
            worst = worst.max((blocks.block(1, 1).frobenius_sq() - p1).abs());
        }
    }
    assert!(worst <= 1e-10, "{worst:e}");
}
