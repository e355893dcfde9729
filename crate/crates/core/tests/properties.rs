use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qinfer::inference::{check_bound, discriminate, fisher_info, fisher_info_direct};
use qinfer::measurements::{naimark_dilate, prob};
use qinfer::models::qfi;
use qinfer::tomography::{behavioral_distance, channel_from_choi, choi_state, Channel};
use qinfer::{random, Subsystem};

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random::hermitian(d, &mut rng);
        let eig = h.eig_hermitian().unwrap();
        prop_assert!(eig.reconstruct().max_diff(&h) < 1e-10);
    }

    #[test]
    fn probabilities_form_a_distribution(seed in any::<u64>(), d in 1usize..5, n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random::density_matrix(d, &mut rng);
        let m = random::povm(d, n, &mut rng);
        let p = prob(&rho, &m).unwrap();
        prop_assert!(p.iter().all(|&x| x >= -1e-12));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fisher_never_exceeds_quantum_fisher(seed in any::<u64>(), d in 2usize..4, n in 2usize..5, theta in -1.5f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random::model(d, &mut rng);
        let m = random::povm(d, n, &mut rng);
        let report = check_bound(&model, theta, &m).unwrap();
        prop_assert!(report.fisher <= report.quantum * (1.0 + 1e-8) + 1e-9);
        prop_assert!((report.fisher - fisher_info(&model, theta, &m).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random::density_matrix(da, &mut rng);
        let b = random::density_matrix(db, &mut rng);
        let ab = a.tensor(&b);
        let ra = ab.partial_trace((da, db), Subsystem::First).unwrap();
        let rb = ab.partial_trace((da, db), Subsystem::Second).unwrap();
        prop_assert!(ra.matrix().max_diff(a.matrix()) < 1e-12);
        prop_assert!(rb.matrix().max_diff(b.matrix()) < 1e-12);
    }

    #[test]
    fn choi_roundtrip_preserves_behaviour(seed in any::<u64>(), d in 2usize..4, k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = Channel::new(random::kraus_operators(d, k, &mut rng)).unwrap();
        let back = channel_from_choi(&choi_state(&ch).unwrap()).unwrap();
        prop_assert!(back.kraus().len() <= d * d);
        prop_assert!(behavioral_distance(&ch, &back).unwrap() < 1e-9);
    }

    #[test]
    fn dilation_reproduces_statistics(seed in any::<u64>(), d in 1usize..4, n in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random::povm(d, n, &mut rng);
        let states: Vec<_> = (0..4).map(|_| random::density_matrix(d, &mut rng)).collect();
        let dil = naimark_dilate(&m).unwrap();
        prop_assert!(dil.reproduction_residual(&m, &states).unwrap() < 1e-10);
    }
}

#[test]
fn analytic_and_direct_fisher_agree_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let model = random::model(3, &mut rng);
        let m = random::povm(3, 4, &mut rng);
        let a = fisher_info(&model, 0.4, &m).unwrap();
        let b = fisher_info_direct(&model, 0.4, &m).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-5 * (1.0 + a));
    }
}

#[test]
fn qfi_is_unitarily_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let model = random::model(3, &mut rng);
    let u = random::unitary(3, &mut rng);
    let rotated = {
        let model = model.clone();
        qinfer::models::ParametricModel::new(3, 1, move |t: &[f64]| model.state_at(t)?.conjugate_by(&u))
    };
    for theta in [-0.8, 0.1, 1.2] {
        assert_abs_diff_eq!(qfi(&model, theta).unwrap(), qfi(&rotated, theta).unwrap(), epsilon = 1e-6);
    }
}

#[test]
fn discrimination_success_is_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let states: Vec<_> = (0..3).map(|_| random::density_matrix(2, &mut rng)).collect();
    let priors = [0.2, 0.5, 0.3];
    let m = random::povm(2, 5, &mut rng);
    let r = discriminate(&states, &priors, &m).unwrap();
    assert!(r.success_probability >= 0.5 - 1e-12 && r.success_probability <= 1.0 + 1e-12);
    assert_eq!(r.rule.len(), m.len());
}
