//! Flat `key = value` experiment files.
//!
//! Blank lines and `#` comments are ignored, every key may appear once and
//! unknown keys are rejected. Lengths always carry a unit (`A` or `a0`).

use std::path::{Path, PathBuf};

use crate::chem::Length;
use crate::engine::PropagationConfig;
use crate::qubit::{GroupSampling, GroupingStrategy};
use crate::sim::NoiseModel;

use super::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum SystemSource {
    Fcidump(PathBuf),
    Chain { atoms: usize, spacing: Length, charge: i32 },
}

/// Hydrogen-chain keys as read; combined into a source by `check`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChainKeys {
    pub atoms: Option<usize>,
    pub spacing: Option<Length>,
    pub charge: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Ground,
    Folded,
    Pqe,
    Scan,
}

/// Folding point: a value in Hartree, or the k-th oracle eigenvalue of the
/// first geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Omega {
    Value(f64),
    Fci(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialSpec {
    /// Coefficients from the oracle ground state.
    Fci(Vec<u64>),
    Explicit(Vec<u64>, Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub source: Option<SystemSource>,
    pub chain: ChainKeys,
    pub frozen_core: usize,
    /// References for the run; several only make sense for folded scans.
    pub references: Vec<u64>,
    pub grouping: GroupingStrategy,
    pub mode: Mode,
    pub propagation: PropagationConfig,
    /// One per reference, or a single value shared by all.
    pub omega: Vec<Omega>,
    /// Folded-spectrum scans when true, ground-state scans otherwise.
    pub scan_folded: bool,
    pub scan_spacings: Vec<Length>,
    pub scan_fcidumps: Vec<PathBuf>,
    pub scan_window: f64,
    pub trial: Option<TrialSpec>,
    pub pqe_tolerance: f64,
    pub pqe_max_iterations: usize,
    pub restart: Option<PathBuf>,
    pub spawn_samples: usize,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            source: None,
            chain: ChainKeys::default(),
            frozen_core: 0,
            references: Vec::new(),
            grouping: GroupingStrategy::default(),
            mode: Mode::default(),
            propagation: PropagationConfig::default(),
            omega: Vec::new(),
            scan_folded: false,
            scan_spacings: Vec::new(),
            scan_fcidumps: Vec::new(),
            scan_window: 0.05,
            trial: None,
            pqe_tolerance: 1e-8,
            pqe_max_iterations: 500,
            restart: None,
            spawn_samples: 100_000,
            out: PathBuf::from("."),
        }
    }
}

fn bad(key: &str, value: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key} = {value}: {why}"))
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| bad(key, v, e))
}

fn flag(key: &str, v: &str) -> Result<bool, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, v, "expected true or false")),
    }
}

/// `0b...`, `0x...` or decimal.
pub fn parse_mask(text: &str) -> Result<u64, String> {
    let t = text.trim().replace('_', "");
    let r = if let Some(b) = t.strip_prefix("0b") {
        u64::from_str_radix(b, 2)
    } else if let Some(h) = t.strip_prefix("0x") {
        u64::from_str_radix(h, 16)
    } else {
        t.parse()
    };
    r.map_err(|_| format!("bad determinant mask '{text}'"))
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty())
}

/// Either explicit lengths (`0.8A 0.9A`) or a range `start:stop:step unit`
/// with the stop included.
fn parse_lengths(key: &str, v: &str) -> Result<Vec<Length>, CliError> {
    if v.contains(':') {
        let (range, unit) = v.trim().rsplit_once(char::is_whitespace).ok_or_else(|| bad(key, v, "range needs a unit"))?;
        let parts: Vec<f64> = range.split(':').map(|p| num(key, p.trim())).collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(bad(key, v, "range is start:stop:step"));
        };
        if !(step > 0.0) || stop < start {
            return Err(bad(key, v, "range must be increasing with a positive step"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return (0..n)
            .map(|k| {
                let x = ((start + step * k as f64) * 1e10).round() / 1e10;
                Length::parse(&format!("{x}{unit}")).map_err(|e| bad(key, v, e))
            })
            .collect();
    }
    list(v).map(|t| Length::parse(t).map_err(|e| bad(key, v, e))).collect()
}

fn parse_omega(key: &str, v: &str) -> Result<Omega, CliError> {
    match v.strip_prefix("fci:") {
        Some(k) => Ok(Omega::Fci(num(key, k)?)),
        None => Ok(Omega::Value(num(key, v)?)),
    }
}

/// Looks for `fixtures/<name>.fcidump` in `base` and its ancestors. A
/// directory holding a single FCIDUMP also matches, so `h2` finds
/// `fixtures/h2/r0.7414.fcidump`.
fn find_fixture(name: &str, base: &Path) -> Option<PathBuf> {
    base.ancestors().find_map(|d| {
        let root = d.join("fixtures");
        let file = root.join(format!("{name}.fcidump"));
        if file.is_file() {
            return Some(file);
        }
        let mut dumps: Vec<PathBuf> = std::fs::read_dir(root.join(name))
            .ok()?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "fcidump"))
            .collect();
        (dumps.len() == 1).then(|| dumps.remove(0))
    })
}

fn resolve(path: &str, base: &Path) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_absolute() || !base.join(&p).exists() {
        p
    } else {
        base.join(p)
    }
}

impl ExperimentConfig {
    /// Reads `path`; relative paths inside resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = std::collections::HashSet::new();
        let mut pending = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(CliError::Config(format!("line {}: '{k}' given twice", i + 1)));
            }
            pending.push((k.to_string(), v.to_string()));
        }
        for (k, v) in &pending {
            cfg.set(k, v, base)?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    /// Applies one `key = value` pair (also used for command-line overrides).
    pub fn set(&mut self, key: &str, v: &str, base: &Path) -> Result<(), CliError> {
        let p = &mut self.propagation;
        match key {
            "fcidump" => self.source = Some(SystemSource::Fcidump(resolve(v, base))),
            "fixture" => {
                let path = find_fixture(v, base)
                    .or_else(|| std::env::current_dir().ok().and_then(|d| find_fixture(v, &d)))
                    .ok_or_else(|| bad(key, v, "no matching file under fixtures/"))?;
                self.source = Some(SystemSource::Fcidump(path));
            }
            "chain_atoms" => self.chain.atoms = Some(num(key, v)?),
            "chain_spacing" => self.chain.spacing = Some(Length::parse(v).map_err(|e| bad(key, v, e))?),
            "chain_charge" => self.chain.charge = num(key, v)?,
            "frozen_core" => self.frozen_core = num(key, v)?,
            "reference" | "references" => {
                self.references = list(v).map(|t| parse_mask(t).map_err(|e| bad(key, v, e))).collect::<Result<_, _>>()?
            }
            "grouping" => {
                self.grouping = match v {
                    "ffd" | "first_fit_decreasing" => GroupingStrategy::FirstFitDecreasing,
                    "xy" | "xy_pattern" => GroupingStrategy::XyPattern,
                    _ => return Err(bad(key, v, "expected ffd or xy")),
                }
            }
            "mode" => {
                self.mode = match v {
                    "ground" => Mode::Ground,
                    "folded" | "fs" => Mode::Folded,
                    "pqe" => Mode::Pqe,
                    "scan" => Mode::Scan,
                    _ => return Err(bad(key, v, "expected ground, folded, pqe or scan")),
                }
            }
            "delta_beta" => p.delta_beta = num(key, v)?,
            "n_steps" => p.n_steps = num(key, v)?,
            "n0" => p.n0 = num(key, v)?,
            "target_population" => p.target_population = Some(num(key, v)?),
            "zeta" => p.zeta = num(key, v)?,
            "shift_interval" => p.shift_interval = num(key, v)?,
            "noise" => {
                let (kind, arg) = v.split_once(':').map(|(a, b)| (a.trim(), Some(b.trim()))).unwrap_or((v, None));
                p.noise = match (kind, arg) {
                    ("exact", None) => NoiseModel::Exact,
                    ("shots", Some(n)) => NoiseModel::Shots(num(key, n)?),
                    ("gaussian", Some(s)) => NoiseModel::Gaussian(num(key, s)?),
                    _ => return Err(bad(key, v, "expected exact, shots:N or gaussian:SIGMA")),
                }
            }
            "n_shots_reference" => p.n_shots_reference = Some(num(key, v)?),
            "n_hamil" => p.n_hamil = num(key, v)?,
            "group_sampling" => {
                p.group_sampling = match v {
                    "diagonal_always" => GroupSampling::DiagonalAlways,
                    "plain" => GroupSampling::Plain,
                    _ => return Err(bad(key, v, "expected diagonal_always or plain")),
                }
            }
            "full_reference_residual" => p.full_reference_residual = flag(key, v)?,
            "rounding" => p.rounding = flag(key, v)?,
            "rounding_inclusive" => p.rounding_inclusive = flag(key, v)?,
            "freeze_n0" => p.freeze_n0 = flag(key, v)?,
            "s0_floor" => p.s0_floor = num(key, v)?,
            "discard_fraction" => p.discard_fraction = num(key, v)?,
            "seed" => p.seed = num(key, v)?,
            "omega" => self.omega = list(v).map(|t| parse_omega(key, t)).collect::<Result<_, _>>()?,
            "scan_folded" => self.scan_folded = flag(key, v)?,
            "scan_spacings" => self.scan_spacings = parse_lengths(key, v)?,
            "scan_fcidumps" => self.scan_fcidumps = list(v).map(|t| resolve(t, base)).collect(),
            "scan_window" => self.scan_window = num(key, v)?,
            "trial" => {
                let dets: Vec<u64> = list(v).map(|t| parse_mask(t).map_err(|e| bad(key, v, e))).collect::<Result<_, _>>()?;
                self.trial = Some(match self.trial.take() {
                    Some(TrialSpec::Explicit(_, c)) => TrialSpec::Explicit(dets, c),
                    _ => TrialSpec::Fci(dets),
                });
            }
            "trial_coefficients" => {
                let dets = match self.trial.take() {
                    Some(TrialSpec::Fci(d)) | Some(TrialSpec::Explicit(d, _)) => d,
                    None => Vec::new(),
                };
                self.trial = Some(if v == "fci" {
                    TrialSpec::Fci(dets)
                } else {
                    TrialSpec::Explicit(dets, list(v).map(|t| num(key, t)).collect::<Result<_, _>>()?)
                });
            }
            "pqe_tolerance" => self.pqe_tolerance = num(key, v)?,
            "pqe_max_iterations" => self.pqe_max_iterations = num(key, v)?,
            "restart" => self.restart = Some(resolve(v, base)),
            "spawn_samples" => self.spawn_samples = num(key, v)?,
            "out" => self.out = PathBuf::from(v),
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Cross-field checks; also turns the chain keys into a source.
    pub fn check(&mut self) -> Result<(), CliError> {
        let c = self.chain;
        if c != ChainKeys::default() {
            if matches!(self.source, Some(SystemSource::Fcidump(_))) {
                return Err(CliError::Config("give either an FCIDUMP or a hydrogen chain, not both".into()));
            }
            let atoms = c.atoms.ok_or_else(|| CliError::Config("chain_atoms is required for a hydrogen chain".into()))?;
            let spacing = c
                .spacing
                .or_else(|| self.scan_spacings.first().copied())
                .ok_or_else(|| CliError::Config("chain_spacing is required for a hydrogen chain".into()))?;
            self.source = Some(SystemSource::Chain { atoms, spacing, charge: c.charge });
        }
        if let Some(TrialSpec::Explicit(d, c)) = &self.trial {
            if d.len() != c.len() {
                return Err(CliError::Config("trial and trial_coefficients differ in length".into()));
            }
        }
        if matches!(self.trial, Some(TrialSpec::Fci(ref d)) | Some(TrialSpec::Explicit(ref d, _)) if d.is_empty()) {
            return Err(CliError::Config("trial_coefficients given without trial determinants".into()));
        }
        if self.omega.len() > 1 && self.omega.len() != self.references.len() {
            return Err(CliError::Config("omega needs one value per reference".into()));
        }
        if !self.scan_spacings.is_empty() && !self.scan_fcidumps.is_empty() {
            return Err(CliError::Config("give scan_spacings or scan_fcidumps, not both".into()));
        }
        if !self.scan_spacings.is_empty() && !matches!(self.source, Some(SystemSource::Chain { .. })) {
            return Err(CliError::Config("scan_spacings needs a hydrogen-chain system".into()));
        }
        self.propagation.validate().map_err(|e| CliError::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(t: &str) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::parse(t, Path::new("."))
    }

    #[test]
    fn chain_and_propagation_keys() {
        let c = parse(
            "# H3+\nchain_atoms = 3\nchain_spacing = 2.0 A\nchain_charge = 1\nnoise = shots:1000\nzeta = 0.1\nseed = 7\nreference = 0b11\n",
        )
        .unwrap();
        assert_eq!(c.source, Some(SystemSource::Chain { atoms: 3, spacing: Length::Angstrom(2.0), charge: 1 }));
        assert_eq!(c.propagation.noise, NoiseModel::Shots(1000));
        assert_eq!(c.propagation.zeta, 0.1);
        assert_eq!(c.propagation.seed, 7);
        assert_eq!(c.references, vec![3]);
    }

    #[test]
    fn rejects_unknown_duplicate_and_unitless() {
        assert!(matches!(parse("n_stpes = 10"), Err(CliError::Config(_))));
        assert!(matches!(parse("zeta = 1\nzeta = 2"), Err(CliError::Config(_))));
        assert!(matches!(parse("chain_atoms = 2\nchain_spacing = 0.74"), Err(CliError::Config(_))));
        assert!(matches!(parse("chain_atoms = 2"), Err(CliError::Config(_))));
        assert!(matches!(parse("noise = shots"), Err(CliError::Config(_))));
        assert!(matches!(parse("delta_beta = -1"), Err(CliError::Config(_))));
    }

    #[test]
    fn scan_ranges_include_the_end() {
        let c = parse("chain_atoms = 3\nchain_spacing = 0.8A\nchain_charge = 1\nscan_spacings = 0.8:1.0:0.1 A").unwrap();
        assert_eq!(c.scan_spacings.len(), 3);
        assert!((c.scan_spacings[2].angstrom() - 1.0).abs() < 1e-12);
        let c = parse("chain_atoms = 2\nchain_spacing = 1.4a0\nscan_spacings = 1.0a0, 1.4a0").unwrap();
        assert_eq!(c.scan_spacings, vec![Length::Bohr(1.0), Length::Bohr(1.4)]);
    }

    #[test]
    fn omega_and_trial_forms() {
        let c = parse("references = 0b11 0b1001\nomega = fci:0 -0.5\ntrial = 0b11 0b1100\ntrial_coefficients = 0.9 -0.1").unwrap();
        assert_eq!(c.omega, vec![Omega::Fci(0), Omega::Value(-0.5)]);
        assert_eq!(c.trial, Some(TrialSpec::Explicit(vec![3, 12], vec![0.9, -0.1])));
        assert!(parse("references = 0b11 0b1001 0b110\nomega = 1 2").is_err());
        assert_eq!(parse_mask("0x3").unwrap(), 3);
        assert_eq!(parse_mask("12").unwrap(), 12);
    }
}
