use std::fmt::Write as _;

use rand_chacha::ChaCha8Rng;

use crate::ansatz::AnsatzState;

use super::{EngineError, TrajectoryRecord};

/// Trajectory CSV. Energies are relative to `offset`, which is written as
/// a final column so absolute values can be recovered.
pub fn trajectory_csv(records: &[TrajectoryRecord], offset: f64) -> String {
    let mut out = String::from("step,beta,shift,e_proj,n_tot,s0,flags,e_proj_numerator,groups_drawn,kept,e_trial,e_physical,e_ref\n");
    for r in records {
        let opt = |v: Option<f64>| v.map(|e| format!("{e:.12e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.6},{:.12e},{:.12e},{:.12e},{:.12e},{},{:.12e},{},{},{},{},{:.12e}",
            r.step, r.beta, r.shift, r.e_proj, r.n_tot, r.s0, r.flags, r.e_proj_numerator, r.groups_drawn, r.kept, opt(r.e_trial), opt(r.e_physical), offset
        )
        .unwrap();
    }
    out
}

/// `(n_param + 1) n_iter n_hamil n_shots`.
pub fn mcpqe_total_shots(n_param: u64, n_iter: u64, n_hamil: u64, n_shots: u64) -> u64 {
    (n_param + 1) * n_iter * n_hamil * n_shots
}

/// Two energy evaluations per SPSA iteration: `2 n_iter n_hamil n_shots`.
pub fn vqe_spsa_total_shots(n_iter: u64, n_hamil: u64, n_shots: u64) -> u64 {
    2 * n_iter * n_hamil * n_shots
}

/// Everything needed to continue a run bit-for-bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Restart {
    pub ansatz: AnsatzState,
    pub shift: f64,
    pub n_ref: f64,
    pub varying: bool,
    pub n_tot_ref: f64,
    pub since_update: usize,
    /// `N_tot` at which the shift starts to vary.
    pub growth_target: f64,
    /// Steps completed so far.
    pub step: usize,
    pub rng: ChaCha8Rng,
}

impl Restart {
    pub fn to_text(&self) -> String {
        let seed: String = self.rng.get_seed().iter().map(|b| format!("{b:02x}")).collect();
        let mut out = String::new();
        writeln!(out, "shift {:e}", self.shift).unwrap();
        writeln!(out, "n_ref {:e}", self.n_ref).unwrap();
        writeln!(out, "varying {}", self.varying).unwrap();
        writeln!(out, "n_tot_ref {:e}", self.n_tot_ref).unwrap();
        writeln!(out, "since_update {}", self.since_update).unwrap();
        writeln!(out, "growth_target {:e}", self.growth_target).unwrap();
        writeln!(out, "step {}", self.step).unwrap();
        writeln!(out, "rng_seed {seed}").unwrap();
        writeln!(out, "rng_stream {}", self.rng.get_stream()).unwrap();
        writeln!(out, "rng_word_pos {}", self.rng.get_word_pos()).unwrap();
        out.push_str("ansatz\n");
        out.push_str(&self.ansatz.dump());
        out
    }

    pub fn parse(text: &str) -> Result<Self, EngineError> {
        let (head, ansatz) = text
            .split_once("ansatz\n")
            .ok_or_else(|| EngineError::Config("restart file has no ansatz section".into()))?;
        let mut fields = std::collections::HashMap::new();
        for line in head.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| EngineError::Config(format!("malformed restart line '{line}'")))?;
            fields.insert(k, v.trim());
        }
        fn get<T: std::str::FromStr>(f: &std::collections::HashMap<&str, &str>, k: &str) -> Result<T, EngineError> {
            f.get(k)
                .ok_or_else(|| EngineError::Config(format!("restart file is missing '{k}'")))?
                .parse()
                .map_err(|_| EngineError::Config(format!("bad value for '{k}' in restart file")))
        }
        let seed_hex: String = get(&fields, "rng_seed")?;
        if seed_hex.len() != 64 {
            return Err(EngineError::Config("rng_seed must be 64 hex digits".into()));
        }
        let mut seed = [0u8; 32];
        for (i, b) in seed.iter_mut().enumerate() {
            *b = u8::from_str_radix(&seed_hex[2 * i..2 * i + 2], 16)
                .map_err(|_| EngineError::Config("rng_seed must be 64 hex digits".into()))?;
        }
        let mut rng = <ChaCha8Rng as rand::SeedableRng>::from_seed(seed);
        rng.set_stream(get(&fields, "rng_stream")?);
        rng.set_word_pos(get(&fields, "rng_word_pos")?);
        Ok(Self {
            ansatz: AnsatzState::parse(ansatz)?,
            shift: get(&fields, "shift")?,
            n_ref: get(&fields, "n_ref")?,
            varying: get(&fields, "varying")?,
            n_tot_ref: get(&fields, "n_tot_ref")?,
            since_update: get(&fields, "since_update")?,
            growth_target: get(&fields, "growth_target")?,
            step: get(&fields, "step")?,
            rng,
        })
    }
}
