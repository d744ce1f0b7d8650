use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chem::{hydrogen_chain_integrals, read_fcidump, Length, SpinOrbitalIntegrals};
use crate::engine::{
    analytic_spawn_distribution, deterministic_pqe, folded_scan, generation_distribution, kl_divergence, mcpqe_total_shots,
    run_folded_spectrum, run_ground_from, sample_spawn_targets, trajectory_csv, FoldedResult, PropagationConfig, Restart,
    RunResult, System, TrialWavefunction,
};
use crate::oracle::{build_sector_hamiltonian, fci_spectrum, DeterminantBasis, Spectrum};
use crate::sim::{prepare_state, NoiseModel};
use crate::stats::{reblock, ReblockResult};

use super::config::{ExperimentConfig, Mode, Omega, SystemSource, TrialSpec};
use super::{Cli, CliError, Command};

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Command::Reblock { file, column, discard } = &cli.command {
        return cmd_reblock(file, column, *discard, cli.out.as_deref());
    }
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let cwd = std::env::current_dir()?;
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set '{kv}' is not key=value")))?;
        cfg.set(k.trim(), v.trim(), &cwd)?;
    }
    if let Some(s) = cli.seed {
        cfg.propagation.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    cfg.check()?;
    match &cli.command {
        Command::Run => match cfg.mode {
            Mode::Ground => cmd_run(&cfg),
            Mode::Folded => cmd_fs(&cfg, None),
            Mode::Pqe => cmd_pqe(&cfg),
            Mode::Scan => cmd_scan(&cfg),
        },
        Command::Scan => cmd_scan(&cfg),
        Command::Fs { omega } => cmd_fs(&cfg, *omega),
        Command::Pqe => cmd_pqe(&cfg),
        Command::Groups => cmd_groups(&cfg),
        Command::Fci { states } => cmd_fci(&cfg, *states),
        Command::Spawn => cmd_spawn(&cfg),
        Command::Reblock { .. } => unreachable!("handled above"),
    }
}

fn integrals_for(source: &SystemSource, spacing: Option<Length>) -> Result<SpinOrbitalIntegrals, CliError> {
    match source {
        SystemSource::Fcidump(p) => {
            if !p.is_file() {
                return Err(CliError::Config(format!("FCIDUMP file {} not found", p.display())));
            }
            Ok(read_fcidump(p)?)
        }
        SystemSource::Chain { atoms, spacing: s, charge } => Ok(hydrogen_chain_integrals(*atoms, spacing.unwrap_or(*s), *charge)?),
    }
}

fn source(cfg: &ExperimentConfig) -> Result<&SystemSource, CliError> {
    cfg.source.as_ref().ok_or_else(|| CliError::Config("no system given (fcidump, fixture or chain_* keys)".into()))
}

/// System for the first configured reference (the aufbau determinant by
/// default), and the active-space integrals for the oracle.
fn system_for(cfg: &ExperimentConfig, ints: &SpinOrbitalIntegrals) -> Result<(System, SpinOrbitalIntegrals), CliError> {
    let active = ints.freeze_core(cfg.frozen_core)?;
    let mut sys = System::from_integrals(ints, cfg.frozen_core, cfg.grouping)?;
    if let Some(&r) = cfg.references.first() {
        check_reference(&sys, &active, r)?;
        sys = sys.with_reference(r);
    }
    Ok((sys, active))
}

fn check_reference(sys: &System, active: &SpinOrbitalIntegrals, r: u64) -> Result<(), CliError> {
    let basis_ok = DeterminantBasis::for_integrals(active).index_of(r).is_some();
    if r >> sys.n_qubits != 0 || !basis_ok {
        return Err(CliError::Config(format!("reference {r:#b} is not a determinant of the system's sector")));
    }
    Ok(())
}

fn spectrum(active: &SpinOrbitalIntegrals) -> Result<(DeterminantBasis, Spectrum), CliError> {
    let basis = DeterminantBasis::for_integrals(active);
    let sp = fci_spectrum(&build_sector_hamiltonian(active, &basis))?;
    Ok((basis, sp))
}

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.out)?;
    Ok(cfg.out.clone())
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), contents).map_err(|e| CliError::Config(format!("{}: {e}", dir.join(name).display())))
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("summary serialises") + "\n"
}

fn trial_for(cfg: &ExperimentConfig, active: &SpinOrbitalIntegrals) -> Result<Option<TrialWavefunction>, CliError> {
    let t = match &cfg.trial {
        None => return Ok(None),
        Some(TrialSpec::Explicit(d, c)) => TrialWavefunction::new(d.clone(), c.clone())?,
        Some(TrialSpec::Fci(d)) => {
            let (basis, sp) = spectrum(active)?;
            let v = sp.vector(0);
            let c = d
                .iter()
                .map(|det| {
                    basis.index_of(*det).map(|i| v[i]).ok_or_else(|| CliError::Config(format!("trial determinant {det:#b} is outside the sector")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            TrialWavefunction::new(d.clone(), c)?
        }
    };
    Ok(Some(t))
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub plateau: bool,
}

impl Estimate {
    fn from(r: &Option<ReblockResult>) -> Option<Self> {
        r.as_ref().map(|r| Estimate { mean: r.mean, std_err: r.std_err, plateau: r.converged })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ShotAccounting {
    pub n_param: u64,
    pub n_iter: u64,
    pub n_hamil: u64,
    pub n_shots: u64,
    /// `(n_param + 1) n_iter n_hamil n_shots`.
    pub total: u64,
    /// Circuit repetitions actually simulated.
    pub simulated: u64,
}

/// Summary of one propagation. Energies in `shift` / `projected` / `trial`
/// are relative to `reference_energy` (correlation energies for a
/// Hartree-Fock reference).
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub n_qubits: usize,
    pub n_parameters: usize,
    pub n_groups: usize,
    pub reference: String,
    pub reference_energy: f64,
    pub steps: usize,
    pub shift_started: Option<usize>,
    pub divergent_steps: usize,
    pub shift: Option<Estimate>,
    pub projected: Option<Estimate>,
    pub trial: Option<Estimate>,
    pub fci_energy: Option<f64>,
    pub fci_correlation: Option<f64>,
    pub shots: ShotAccounting,
}

fn shot_accounting(sys: &System, cfg: &PropagationConfig, run: &RunResult) -> ShotAccounting {
    let n_param = run.ansatz.len() as u64;
    let n_iter = run.records.len() as u64;
    let n_hamil = if cfg.n_hamil > 0 { cfg.n_hamil } else { sys.groups.len() } as u64;
    let n_shots = match cfg.noise {
        NoiseModel::Shots(n) => n,
        _ => 0,
    };
    ShotAccounting { n_param, n_iter, n_hamil, n_shots, total: mcpqe_total_shots(n_param, n_iter, n_hamil, n_shots), simulated: run.shots }
}

fn summarise(sys: &System, cfg: &PropagationConfig, run: &RunResult, fci: Option<f64>) -> RunSummary {
    RunSummary {
        n_qubits: sys.n_qubits,
        n_parameters: run.ansatz.len(),
        n_groups: sys.groups.len(),
        reference: format!("{:#b}", sys.reference),
        reference_energy: sys.offset,
        steps: run.records.len(),
        shift_started: run.shift_started,
        divergent_steps: run.divergent,
        shift: Estimate::from(&run.shift_stats),
        projected: Estimate::from(&run.energy_stats),
        trial: Estimate::from(&run.trial_stats),
        fci_energy: fci,
        fci_correlation: fci.map(|e| e - sys.offset),
        shots: shot_accounting(sys, cfg, run),
    }
}

fn fmt_est(e: &Option<Estimate>) -> String {
    e.as_ref().map(|e| format!("{:.6} +/- {:.6}", e.mean, e.std_err)).unwrap_or_else(|| "n/a".into())
}

fn write_run_files(dir: &Path, run: &RunResult) -> Result<(), CliError> {
    write(dir, "trajectory.csv", &trajectory_csv(&run.records, run.offset))?;
    for (name, stats) in [("shift", &run.shift_stats), ("energy", &run.energy_stats), ("trial", &run.trial_stats)] {
        if let Some(s) = stats {
            write(dir, &format!("reblock_{name}.csv"), &s.to_csv())?;
        }
    }
    write(dir, "restart.txt", &run.restart.to_text())
}

fn cmd_run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let (sys, active) = system_for(cfg, &ints)?;
    let trial = trial_for(cfg, &active)?;
    let start = match &cfg.restart {
        Some(p) => Restart::parse(&fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?)?,
        None => Restart::fresh(sys.ansatz(), &cfg.propagation),
    };
    let run = run_ground_from(&sys, &cfg.propagation, start, trial.as_ref())?;
    let fci = spectrum(&active).ok().map(|(_, s)| s.ground_energy());
    let summary = summarise(&sys, &cfg.propagation, &run, fci);
    let dir = out_dir(cfg)?;
    write_run_files(&dir, &run)?;
    write(&dir, "summary.json", &json(&summary))?;
    println!(
        "S = {}  E = {}  E_trial = {}  FCI = {}  divergent {}  shots {} (formula {})",
        fmt_est(&summary.shift),
        fmt_est(&summary.projected),
        fmt_est(&summary.trial),
        summary.fci_correlation.map(|e| format!("{e:.6}")).unwrap_or_else(|| "n/a".into()),
        summary.divergent_steps,
        summary.shots.simulated,
        summary.shots.total
    );
    Ok(())
}

fn resolve_omega(o: Omega, sp: Option<&Spectrum>) -> Result<f64, CliError> {
    match o {
        Omega::Value(v) => Ok(v),
        Omega::Fci(k) => sp
            .and_then(|s| s.values.get(k).copied())
            .ok_or_else(|| CliError::Config(format!("omega = fci:{k} is not an available eigenvalue"))),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FoldedSummary {
    pub omega: f64,
    pub energy: f64,
    pub energy_from_shift: f64,
    pub energy_projected: f64,
    pub folded: f64,
    pub folded_from_shift: f64,
    pub expectation: f64,
    pub variance: f64,
    pub nearest_fci: Option<f64>,
    pub run: RunSummary,
}

fn folded_summary(sys: &System, cfg: &PropagationConfig, r: &FoldedResult, sp: Option<&Spectrum>) -> FoldedSummary {
    let nearest = sp.and_then(|s| s.values.iter().copied().min_by(|a, b| (a - r.energy).abs().total_cmp(&(b - r.energy).abs())));
    let fs = sys.folded(r.omega);
    FoldedSummary {
        omega: r.omega,
        energy: r.energy,
        energy_from_shift: r.energy_shift,
        energy_projected: r.energy_projected,
        folded: r.e_folded,
        folded_from_shift: r.e_folded_shift,
        expectation: r.expectation,
        variance: r.variance,
        nearest_fci: nearest,
        run: summarise(&fs, cfg, &r.run, None),
    }
}

fn cmd_fs(cfg: &ExperimentConfig, omega: Option<f64>) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let (sys, active) = system_for(cfg, &ints)?;
    let sp = spectrum(&active).ok().map(|(_, s)| s);
    let omega = match (omega, cfg.omega.first()) {
        (Some(w), _) => w,
        (None, Some(&o)) => resolve_omega(o, sp.as_ref())?,
        (None, None) => return Err(CliError::Config("folded-spectrum runs need omega".into())),
    };
    let r = run_folded_spectrum(&sys, omega, &cfg.propagation, None)?;
    let summary = folded_summary(&sys, &cfg.propagation, &r, sp.as_ref());
    let dir = out_dir(cfg)?;
    write_run_files(&dir, &r.run)?;
    write(&dir, "summary.json", &json(&summary))?;
    println!(
        "omega = {:.6}  E = {:.6}  E(shift) = {:.6}  E(projected) = {:.6}  <H> = {:.6}  nearest FCI = {}",
        omega,
        r.energy,
        r.energy_shift,
        r.energy_projected,
        r.expectation,
        summary.nearest_fci.map(|e| format!("{e:.6}")).unwrap_or_else(|| "n/a".into())
    );
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct PqeSummary {
    energy: f64,
    correlation: f64,
    iterations: usize,
    residual: f64,
    fci_energy: Option<f64>,
}

fn cmd_pqe(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let (sys, active) = system_for(cfg, &ints)?;
    let r = deterministic_pqe(&sys.ansatz(), &sys, cfg.pqe_tolerance, cfg.pqe_max_iterations)?;
    let fci = spectrum(&active).ok().map(|(_, s)| s.ground_energy());
    let s = PqeSummary { energy: r.energy + sys.offset, correlation: r.energy, iterations: r.iterations, residual: r.residual, fci_energy: fci };
    let dir = out_dir(cfg)?;
    let mut hist = String::from("iteration,energy,max_residual\n");
    for (k, (e, n)) in r.history.iter().enumerate() {
        writeln!(hist, "{k},{:.12e},{:.12e}", e + sys.offset, n).unwrap();
    }
    write(&dir, "pqe_history.csv", &hist)?;
    write(&dir, "ansatz.txt", &r.ansatz.dump())?;
    write(&dir, "summary.json", &json(&s))?;
    println!("E = {:.10}  iterations {}  max |r| = {:.3e}", s.energy, s.iterations, s.residual);
    Ok(())
}

/// Geometries of a scan, labelled for output.
fn scan_points(cfg: &ExperimentConfig) -> Result<Vec<(String, SpinOrbitalIntegrals)>, CliError> {
    if !cfg.scan_fcidumps.is_empty() {
        return cfg
            .scan_fcidumps
            .iter()
            .map(|p| Ok((p.display().to_string(), integrals_for(&SystemSource::Fcidump(p.clone()), None)?)))
            .collect();
    }
    let src = source(cfg)?;
    cfg.scan_spacings.iter().map(|&l| Ok((l.to_string(), integrals_for(src, Some(l))?))).collect()
}

fn cmd_scan(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let points = scan_points(cfg)?;
    let dir = out_dir(cfg)?;
    if cfg.scan_folded {
        return folded_scan_cmd(cfg, &points, &dir);
    }
    let mut csv = String::from("index,geometry,shift,shift_err,e_proj,e_proj_err,e_trial,e_trial_err,reference_energy,fci_correlation,error\n");
    let mut warm: Option<Vec<f64>> = None;
    for (i, (label, ints)) in points.iter().enumerate() {
        let row = (|| -> Result<(RunResult, System, Option<f64>), CliError> {
            let (sys, active) = system_for(cfg, ints)?;
            let mut a = sys.ansatz();
            if let Some(t) = &warm {
                a.set_amplitudes(t);
            }
            let trial = trial_for(cfg, &active)?;
            let run = run_ground_from(&sys, &cfg.propagation, Restart::fresh(a, &cfg.propagation), trial.as_ref())?;
            let fci = spectrum(&active).ok().map(|(_, s)| s.ground_energy());
            Ok((run, sys, fci))
        })();
        match row {
            Ok((run, sys, fci)) => {
                let e = |s: &Option<ReblockResult>| s.as_ref().map(|s| (s.mean, s.std_err)).unwrap_or((f64::NAN, f64::NAN));
                let (sm, se) = e(&run.shift_stats);
                let (em, ee) = e(&run.energy_stats);
                let trial = run.trial_stats.as_ref().map(|t| format!("{:.12e},{:.12e}", t.mean, t.std_err)).unwrap_or_else(|| ",".into());
                let fc = fci.map(|f| format!("{:.12e}", f - sys.offset)).unwrap_or_default();
                writeln!(csv, "{i},{label},{sm:.12e},{se:.12e},{em:.12e},{ee:.12e},{trial},{:.12e},{fc},", sys.offset).unwrap();
                println!("{label}: S = {sm:.6} +/- {se:.6}  E = {em:.6} +/- {ee:.6}");
                warm = Some(run.ansatz.amplitudes());
            }
            Err(err) => {
                writeln!(csv, "{i},{label},,,,,,,,,\"{err}\"").unwrap();
                eprintln!("{label}: {err}");
                warm = None;
            }
        }
    }
    write(&dir, "scan.csv", &csv)
}

fn folded_scan_cmd(cfg: &ExperimentConfig, points: &[(String, SpinOrbitalIntegrals)], dir: &Path) -> Result<(), CliError> {
    let mut csv = String::from(
        "state,reference,index,geometry,omega,energy,energy_from_shift,energy_projected,expectation,variance,folded,switched,nearest_fci,error\n",
    );
    if points.is_empty() {
        return write(dir, "scan.csv", &csv);
    }
    let base: Vec<(System, SpinOrbitalIntegrals)> = points.iter().map(|(_, i)| system_for(cfg, i)).collect::<Result<_, _>>()?;
    let spectra: Vec<Option<Spectrum>> = base.iter().map(|(_, a)| spectrum(a).ok().map(|(_, s)| s)).collect();
    let refs = if cfg.references.is_empty() { vec![base[0].0.reference] } else { cfg.references.clone() };
    for (k, &r) in refs.iter().enumerate() {
        let omega0 = match cfg.omega.get(k).or(cfg.omega.first()) {
            Some(&o) => resolve_omega(o, spectra[0].as_ref())?,
            None => return Err(CliError::Config("folded scans need omega".into())),
        };
        check_reference(&base[0].0, &base[0].1, r)?;
        let systems: Vec<System> = base.iter().map(|(s, _)| s.with_reference(r)).collect();
        for p in folded_scan(&systems, omega0, &cfg.propagation, cfg.scan_window) {
            let label = &points[p.index].0;
            match &p.result {
                Ok(res) => {
                    let near = spectra[p.index].as_ref().and_then(|s| {
                        s.values.iter().copied().min_by(|a, b| (a - res.energy).abs().total_cmp(&(b - res.energy).abs()))
                    });
                    writeln!(
                        csv,
                        "{k},{r:#b},{},{label},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{},{},",
                        p.index,
                        p.omega,
                        res.energy,
                        res.energy_shift,
                        res.energy_projected,
                        res.expectation,
                        res.variance,
                        res.e_folded,
                        u8::from(p.switched),
                        near.map(|e| format!("{e:.12e}")).unwrap_or_default()
                    )
                    .unwrap();
                }
                Err(err) => writeln!(csv, "{k},{r:#b},{},{label},{:.12e},,,,,,,,,\"{err}\"", p.index, p.omega).unwrap(),
            }
        }
        println!("state {k} ({r:#b}) done");
    }
    write(dir, "scan.csv", &csv)
}

fn cmd_groups(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let (sys, _) = system_for(cfg, &ints)?;
    let total: f64 = sys.groups.iter().map(|g| g.weight).sum();
    let diag: f64 = sys.groups.iter().filter(|g| g.is_diagonal).map(|g| g.weight).sum();
    let mut csv = String::from("index,n_terms,weight,diagonal,basis\n");
    for (k, g) in sys.groups.iter().enumerate() {
        writeln!(csv, "{k},{},{:.12e},{},{}", g.len(), g.weight, u8::from(g.is_diagonal), g.basis.to_word(sys.n_qubits)).unwrap();
    }
    let dir = out_dir(cfg)?;
    write(&dir, "groups.csv", &csv)?;
    println!(
        "{} groups, {} terms, diagonal weight share {:.4}",
        sys.groups.len(),
        sys.operator.len(),
        if total > 0.0 { diag / total } else { 0.0 }
    );
    Ok(())
}

fn cmd_fci(cfg: &ExperimentConfig, states: Option<usize>) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let active = ints.freeze_core(cfg.frozen_core)?;
    let (basis, sp) = spectrum(&active)?;
    let e_ref = active.reference_energy();
    let n = states.unwrap_or(sp.values.len()).min(sp.values.len());
    let mut csv = String::from("state,energy,correlation,dominant,weight\n");
    for k in 0..n {
        let v = sp.vector(k);
        let i = v.iamax();
        writeln!(csv, "{k},{:.12e},{:.12e},{:#b},{:.6}", sp.values[k], sp.values[k] - e_ref, basis.determinants[i], v[i] * v[i]).unwrap();
        println!("{k:>4} {:.10} ({:+.8})", sp.values[k], sp.values[k] - e_ref);
    }
    let dir = out_dir(cfg)?;
    write(&dir, "fci.csv", &csv)
}

fn cmd_reblock(file: &Path, column: &str, discard: usize, out: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(file).map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| CliError::Config(format!("{} is empty", file.display())))?;
    let col = header
        .split(',')
        .position(|h| h.trim() == column)
        .ok_or_else(|| CliError::Config(format!("no column '{column}' in {}", file.display())))?;
    let mut series = Vec::new();
    for (i, l) in lines.enumerate() {
        let cell = l.split(',').nth(col).unwrap_or("").trim();
        let v: f64 = cell.parse().map_err(|_| CliError::Config(format!("row {}: '{cell}' is not a number", i + 2)))?;
        series.push(v);
    }
    let r = reblock(&series, discard)?;
    print!("{}", r.to_csv());
    println!("# mean {:.10} std_err {:.3e} plateau {}", r.mean, r.std_err, r.converged);
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write(dir, &format!("reblock_{column}.csv"), &r.to_csv())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct SpawnSummary {
    kl_spawn: f64,
    kl_uniform: f64,
    samples: usize,
}

fn cmd_spawn(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let ints = integrals_for(source(cfg)?, None)?;
    let (sys, active) = system_for(cfg, &ints)?;
    let fermion = sys.fermion.as_ref().ok_or_else(|| CliError::Config("spawning needs a fermionic Hamiltonian".into()))?;
    let state = deterministic_pqe(&sys.ansatz(), &sys, cfg.pqe_tolerance, cfg.pqe_max_iterations)?.ansatz;
    let psi = prepare_state(sys.n_qubits, sys.reference, &state.build_circuit()).map_err(crate::engine::EngineError::from)?;
    let basis = DeterminantBasis::for_integrals(&active).determinants;
    let p_tilde = analytic_spawn_distribution(psi.amplitudes(), fermion, &basis);
    let p_gen = generation_distribution(psi.amplitudes(), &sys.hamiltonian, &basis);
    let uniform = vec![1.0 / basis.len() as f64; basis.len()];
    let kl_spawn = kl_divergence(&p_tilde, &p_gen)?;
    let kl_uniform = kl_divergence(&uniform, &p_gen)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.propagation.seed);
    let samples = sample_spawn_targets(&psi, fermion, cfg.spawn_samples, &mut rng)?;
    let mut counts = vec![0usize; basis.len()];
    for s in &samples {
        if let Ok(i) = basis.binary_search(s) {
            counts[i] += 1;
        }
    }
    let mut csv = String::from("determinant,p_spawn,p_gen,empirical\n");
    for (i, d) in basis.iter().enumerate() {
        writeln!(csv, "{d:#b},{:.12e},{:.12e},{:.12e}", p_tilde[i], p_gen[i], counts[i] as f64 / samples.len().max(1) as f64).unwrap();
    }
    let dir = out_dir(cfg)?;
    write(&dir, "spawn.csv", &csv)?;
    write(&dir, "summary.json", &json(&SpawnSummary { kl_spawn, kl_uniform, samples: samples.len() }))?;
    println!("KL(p_spawn || p_gen) = {kl_spawn:.4}  KL(uniform || p_gen) = {kl_uniform:.4}");
    Ok(())
}
