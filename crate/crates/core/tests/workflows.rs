use approx::assert_abs_diff_eq;

use qinfer::inference::{attaining_measurement, mle_1d, monte_carlo_variance, qcrb, MonteCarloConfig};
use qinfer::io::{read_samples_csv, write_samples_csv, ChannelFile, PovmFile, StateFile};
use qinfer::measurements::{sample, triad};
use qinfer::models::{great_circle_model, qfi, spin_half_longitude_model};
use qinfer::states::spin_half_pure;
use qinfer::tomography::{apply_channel, behavioral_distance, channel_from_choi, choi_state, Channel};
use qinfer::ComplexMatrix;

#[test]
fn sample_store_and_estimate() {
    let model = spin_half_longitude_model(1.0);
    let theta0 = 0.6;
    let m = attaining_measurement(&model, theta0).unwrap();
    let rho = model.state_at(&[theta0]).unwrap();
    let data = sample(&rho, &m, 4000, 99).unwrap();

    let mut buf = Vec::new();
    write_samples_csv(&mut buf, &data).unwrap();
    let back = read_samples_csv(buf.as_slice()).unwrap();
    assert_eq!(back, data);

    let est = mle_1d(&model, &m, &back, (theta0 - 1.0, theta0 + 1.0)).unwrap();
    let sd = (qcrb(&model, theta0).unwrap() / 4000.0).sqrt();
    assert!((est - theta0).abs() < 5.0 * sd, "estimate {est} too far from {theta0}");
}

#[test]
fn monte_carlo_matches_quantum_bound_for_great_circle() {
    let model = great_circle_model(&ComplexMatrix::identity(2)).unwrap();
    let theta0 = 0.3;
    let m = attaining_measurement(&model, theta0).unwrap();
    let cfg = MonteCarloConfig { n: 500, reps: 400, seed: 5, range: (theta0 - 1.5, theta0 + 1.5) };
    let r = monte_carlo_variance(&model, theta0, &m, &cfg).unwrap();
    assert_abs_diff_eq!(r.var_cr, r.var_qcr, epsilon = 1e-12);
    assert_abs_diff_eq!(r.var_qcr, 1.0 / (500.0 * qfi(&model, theta0).unwrap()), epsilon = 1e-12);
    assert!((r.var_emp / r.var_qcr - 1.0).abs() < 0.25);
}

#[test]
fn files_roundtrip_through_json() {
    let rho = spin_half_pure(0.8, 1.1);
    let s: StateFile = serde_json::from_str(&serde_json::to_string(&StateFile::from_state(&rho)).unwrap()).unwrap();
    assert_eq!(s.to_state().unwrap().matrix().max_diff(rho.matrix()), 0.0);

    let t = triad();
    let p: PovmFile = serde_json::from_str(&serde_json::to_string(&PovmFile::from_povm(&t)).unwrap()).unwrap();
    assert_eq!(p.to_povm().unwrap().labels(), t.labels());

    let ch = channel_from_choi(&choi_state(&Channel::identity(2)).unwrap()).unwrap();
    let c: ChannelFile = serde_json::from_str(&serde_json::to_string(&ChannelFile::from_channel(&ch)).unwrap()).unwrap();
    let ch2 = c.to_channel().unwrap();
    assert!(behavioral_distance(&ch, &ch2).unwrap() < 1e-15);
    let out = apply_channel(&ch2, &rho).unwrap();
    assert!(out.matrix().max_diff(rho.matrix()) < 1e-12);
}
