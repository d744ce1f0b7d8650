use std::path::PathBuf;

use mcpqe::chem::{read_fcidump, SpinOrbitalIntegrals};
use mcpqe::engine::{deterministic_pqe, estimate_residuals, run_ground, run_ground_from, trajectory_csv, PropagationConfig, Restart, System};
use mcpqe::oracle::fci_ground_energy;
use mcpqe::qubit::GroupingStrategy;
use mcpqe::sim::NoiseModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture(rel: &str) -> SpinOrbitalIntegrals {
    read_fcidump(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)).unwrap()
}

fn h3p() -> System {
    System::from_integrals(&fixture("h3p/r2.0.fcidump"), 0, GroupingStrategy::XyPattern).unwrap()
}

/// For a non-exact ansatz the propagation settles where the projected
/// residuals vanish, which is not the linked-residual solution.
#[test]
fn exact_propagation_reaches_the_projective_fixed_point_on_h4() {
    let ints = fixture("h4/r1.5.fcidump");
    let sys = System::from_integrals(&ints, 0, GroupingStrategy::default()).unwrap();
    let run = run_ground(&sys, &PropagationConfig { n_steps: 4000, ..Default::default() }, None).unwrap();
    let e = run.final_energy();
    assert!((run.final_shift() - e).abs() < 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = estimate_residuals(&run.ansatz, &sys, e, &PropagationConfig::default(), &mut rng).unwrap();
    let worst = r.r.iter().fold(0.0f64, |w, x| w.max(x.abs()));
    assert!(worst < 1e-7, "{worst}");
    let fci = fci_ground_energy(&ints).unwrap() - sys.offset;
    let linked = deterministic_pqe(&sys.ansatz(), &sys, 1e-10, 500).unwrap().energy;
    assert!((e - fci).abs() > 1e-4 && (linked - fci).abs() > 1e-4, "{e} {linked} {fci}");
}

#[test]
fn runs_are_reproducible_and_seed_dependent() {
    let sys = h3p();
    let cfg = PropagationConfig { noise: NoiseModel::Shots(100), n_hamil: 3, rounding: true, n_steps: 300, seed: 5, ..Default::default() };
    let a = run_ground(&sys, &cfg, None).unwrap();
    let b = run_ground(&sys, &cfg, None).unwrap();
    assert_eq!(trajectory_csv(&a.records, a.offset), trajectory_csv(&b.records, b.offset));
    let c = run_ground(&sys, &PropagationConfig { seed: 6, ..cfg }, None).unwrap();
    assert_ne!(trajectory_csv(&a.records, a.offset), trajectory_csv(&c.records, c.offset));
}

#[test]
fn restart_continues_bit_for_bit() {
    let sys = h3p();
    let cfg = PropagationConfig { noise: NoiseModel::Shots(200), n_hamil: 4, rounding: true, n_steps: 400, seed: 2, ..Default::default() };
    let whole = run_ground(&sys, &cfg, None).unwrap();
    let half = PropagationConfig { n_steps: 150, ..cfg };
    let first = run_ground(&sys, &half, None).unwrap();
    let text = first.restart.to_text();
    let rest = run_ground_from(&sys, &PropagationConfig { n_steps: 250, ..cfg }, Restart::parse(&text).unwrap(), None).unwrap();
    let joined: Vec<_> = first.records.iter().chain(&rest.records).cloned().collect();
    assert_eq!(trajectory_csv(&joined, sys.offset), trajectory_csv(&whole.records, sys.offset));
    assert_eq!(rest.ansatz, whole.ansatz);
}

#[test]
fn warm_start_grows_before_the_shift_moves() {
    let sys = h3p();
    let converged = deterministic_pqe(&sys.ansatz(), &sys, 1e-10, 500).unwrap().ansatz;
    let cfg = PropagationConfig { n_steps: 50, ..Default::default() };
    let start = Restart::fresh(converged.clone(), &cfg);
    let norm: f64 = converged.amplitudes().iter().map(|t| t.abs()).sum();
    assert!((start.growth_target - 110.0 * (1.0 + norm)).abs() < 1e-9);
    let fresh = Restart::fresh(sys.ansatz(), &cfg);
    assert!((fresh.growth_target - 110.0).abs() < 1e-12);
}

#[test]
fn sampled_residuals_are_unbiased() {
    let sys = h3p();
    let mut state = deterministic_pqe(&sys.ansatz(), &sys, 1e-10, 500).unwrap().ansatz;
    let half: Vec<f64> = state.amplitudes().iter().map(|t| 0.5 * t).collect();
    state.set_amplitudes(&half);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let full = estimate_residuals(&state, &sys, 0.0, &PropagationConfig::default(), &mut rng).unwrap().r;
    let cfg = PropagationConfig { n_hamil: 3, full_reference_residual: false, ..Default::default() };
    let n = 4000;
    let mut sum = vec![0.0; full.len()];
    let mut sum_sq = vec![0.0; full.len()];
    for _ in 0..n {
        let r = estimate_residuals(&state, &sys, 0.0, &cfg, &mut rng).unwrap().r;
        for (i, x) in r.iter().enumerate() {
            sum[i] += x;
            sum_sq[i] += x * x;
        }
    }
    for i in 0..full.len() {
        let m = sum[i] / n as f64;
        let se = ((sum_sq[i] / n as f64 - m * m).max(0.0) / n as f64).sqrt();
        assert!((m - full[i]).abs() <= 4.5 * se + 1e-12, "component {i}: {m} vs {} (se {se})", full[i]);
    }
}
