//! C interface to the `mcpqe` engine.
//!
//! Every function returns an [`McpqeStatus`]. On failure a message is kept
//! per thread and can be read with [`mcpqe_last_error_message`]. Handles are
//! opaque and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use mcpqe::chem::{hydrogen_chain_integrals, read_fcidump, Length};
use mcpqe::cli::CliError;
use mcpqe::engine::{run_folded_spectrum, run_ground, PropagationConfig, RunResult, System};
use mcpqe::oracle::{build_sector_hamiltonian, fci_spectrum, DeterminantBasis};
use mcpqe::qubit::GroupingStrategy;
use mcpqe::sim::NoiseModel;

/// Result codes. 2, 3 and 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McpqeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Numerical = 3,
    NotConverged = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McpqeGrouping {
    FirstFitDecreasing = 0,
    XyPattern = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McpqeNoise {
    Exact = 0,
    /// `noise_parameter` shots per measured string.
    Shots = 1,
    /// `noise_parameter` is the standard deviation.
    Gaussian = 2,
}

/// Propagation settings. Start from [`mcpqe_run_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct McpqeRunOptions {
    pub delta_beta: f64,
    pub n_steps: u64,
    pub n0: f64,
    pub zeta: f64,
    pub shift_interval: u64,
    pub noise: McpqeNoise,
    pub noise_parameter: f64,
    /// Groups drawn per step; 0 uses the whole Hamiltonian.
    pub n_hamil: u64,
    pub rounding: bool,
    pub discard_fraction: f64,
    pub seed: u64,
}

/// Reblocked estimates of one run. Energies are relative to
/// `reference_energy` except `folded_energy`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct McpqeRunSummary {
    pub shift_mean: f64,
    pub shift_error: f64,
    pub energy_mean: f64,
    pub energy_error: f64,
    pub final_shift: f64,
    pub final_energy: f64,
    pub reference_energy: f64,
    /// Absolute energy recovered from a folded-spectrum run, NaN otherwise.
    pub folded_energy: f64,
    pub steps: u64,
    pub divergent_steps: u64,
    pub shots: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McpqeSeries {
    Shift = 0,
    ProjectedEnergy = 1,
    Population = 2,
    ReferenceOverlap = 3,
}

/// A molecular Hamiltonian with its reference determinant.
pub struct McpqeSystem {
    system: System,
    fci: Option<Vec<f64>>,
}

/// The trajectory and estimates of a finished run.
pub struct McpqeRun {
    run: RunResult,
    summary: McpqeRunSummary,
}

const EVEN_BITS: u64 = 0x5555_5555_5555_5555;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(McpqeStatus, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e.exit_code() {
            3 => McpqeStatus::Numerical,
            4 => McpqeStatus::NotConverged,
            _ => McpqeStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(McpqeStatus::InvalidInput, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> McpqeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            McpqeStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            McpqeStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(McpqeStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn grouping(g: McpqeGrouping) -> GroupingStrategy {
    match g {
        McpqeGrouping::FirstFitDecreasing => GroupingStrategy::FirstFitDecreasing,
        McpqeGrouping::XyPattern => GroupingStrategy::XyPattern,
    }
}

fn to_config(o: &McpqeRunOptions) -> Result<PropagationConfig, Failure> {
    let noise = match o.noise {
        McpqeNoise::Exact => NoiseModel::Exact,
        McpqeNoise::Shots => {
            if !(o.noise_parameter >= 1.0 && o.noise_parameter.fract() == 0.0) {
                return Err(invalid("shot count must be a positive integer"));
            }
            NoiseModel::Shots(o.noise_parameter as u64)
        }
        McpqeNoise::Gaussian => NoiseModel::Gaussian(o.noise_parameter),
    };
    let cfg = PropagationConfig {
        delta_beta: o.delta_beta,
        n_steps: o.n_steps as usize,
        n0: o.n0,
        zeta: o.zeta,
        shift_interval: o.shift_interval as usize,
        noise,
        n_hamil: o.n_hamil as usize,
        rounding: o.rounding,
        discard_fraction: o.discard_fraction,
        seed: o.seed,
        ..Default::default()
    };
    cfg.validate().map_err(|e| Failure::from(CliError::from(e)))?;
    Ok(cfg)
}

fn summarise(run: &RunResult, offset: f64, folded_energy: f64) -> McpqeRunSummary {
    let (sm, se) = run.shift_stats.as_ref().map_or((f64::NAN, f64::NAN), |s| (s.mean, s.std_err));
    let (em, ee) = run.energy_stats.as_ref().map_or((f64::NAN, f64::NAN), |s| (s.mean, s.std_err));
    McpqeRunSummary {
        shift_mean: sm,
        shift_error: se,
        energy_mean: em,
        energy_error: ee,
        final_shift: run.final_shift(),
        final_energy: run.final_energy(),
        reference_energy: offset,
        folded_energy,
        steps: run.records.len() as u64,
        divergent_steps: run.divergent as u64,
        shots: run.shots,
    }
}

unsafe fn store_system(system: System, fci: Option<Vec<f64>>, out: *mut *mut McpqeSystem) {
    *out = Box::into_raw(Box::new(McpqeSystem { system, fci }));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mcpqe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failure on this thread, or NULL after a success.
/// The pointer stays valid until the next call into the library on this
/// thread.
#[no_mangle]
pub extern "C" fn mcpqe_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn mcpqe_run_options_default() -> McpqeRunOptions {
    let d = PropagationConfig::default();
    McpqeRunOptions {
        delta_beta: d.delta_beta,
        n_steps: d.n_steps as u64,
        n0: d.n0,
        zeta: d.zeta,
        shift_interval: d.shift_interval as u64,
        noise: McpqeNoise::Exact,
        noise_parameter: 0.0,
        n_hamil: 0,
        rounding: false,
        discard_fraction: d.discard_fraction,
        seed: d.seed,
    }
}

/// Loads an FCIDUMP file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_system_from_fcidump(
    path: *const c_char,
    frozen_core: u32,
    grouping_kind: McpqeGrouping,
    out: *mut *mut McpqeSystem,
) -> McpqeStatus {
    guard(|| {
        non_null(path, "path")?;
        non_null(out, "out")?;
        let path = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let ints = read_fcidump(Path::new(path)).map_err(|e| Failure::from(CliError::from(e)))?;
        let system = System::from_integrals(&ints, frozen_core as usize, grouping(grouping_kind))
            .map_err(|e| Failure::from(CliError::from(e)))?;
        let active = ints.freeze_core(frozen_core as usize).map_err(|e| Failure::from(CliError::from(e)))?;
        let basis = DeterminantBasis::for_integrals(&active);
        let fci = fci_spectrum(&build_sector_hamiltonian(&active, &basis)).ok().map(|s| s.values.iter().copied().collect());
        store_system(system, fci, out);
        Ok(())
    })
}

/// Builds a linear hydrogen chain in the minimal basis.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_system_from_chain(
    n_atoms: u32,
    spacing_angstrom: f64,
    charge: i32,
    grouping_kind: McpqeGrouping,
    out: *mut *mut McpqeSystem,
) -> McpqeStatus {
    guard(|| {
        non_null(out, "out")?;
        let ints = hydrogen_chain_integrals(n_atoms as usize, Length::Angstrom(spacing_angstrom), charge)
            .map_err(|e| Failure::from(CliError::from(e)))?;
        let system = System::from_integrals(&ints, 0, grouping(grouping_kind)).map_err(|e| Failure::from(CliError::from(e)))?;
        let basis = DeterminantBasis::for_integrals(&ints);
        let fci = fci_spectrum(&build_sector_hamiltonian(&ints, &basis)).ok().map(|s| s.values.iter().copied().collect());
        store_system(system, fci, out);
        Ok(())
    })
}

/// # Safety
/// `system` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_system_free(system: *mut McpqeSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Qubit count, commuting-group count and reference energy.
///
/// # Safety
/// `system` must be a live handle; output pointers may be NULL.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_system_info(
    system: *const McpqeSystem,
    n_qubits: *mut u32,
    n_groups: *mut u32,
    reference_energy: *mut f64,
) -> McpqeStatus {
    guard(|| {
        non_null(system, "system")?;
        let s = &(*system).system;
        if !n_qubits.is_null() {
            *n_qubits = s.n_qubits as u32;
        }
        if !n_groups.is_null() {
            *n_groups = s.groups.len() as u32;
        }
        if !reference_energy.is_null() {
            *reference_energy = s.offset;
        }
        Ok(())
    })
}

/// Replaces the reference determinant (bit `q` = spin-orbital `q`). The
/// new determinant must have the same number of electrons of each spin.
///
/// # Safety
/// `system` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_system_set_reference(system: *mut McpqeSystem, reference: u64) -> McpqeStatus {
    guard(|| {
        non_null(system, "system")?;
        let s = &mut (*system).system;
        // even bits are alpha spin-orbitals
        let spins = |m: u64| ((m & EVEN_BITS).count_ones(), (m & !EVEN_BITS).count_ones());
        if reference >> s.n_qubits != 0 || spins(reference) != spins(s.reference) {
            return Err(invalid(format!("reference {reference:#b} is outside the system's spin sector")));
        }
        *s = s.with_reference(reference);
        Ok(())
    })
}

/// Exact eigenvalues of the reference sector, ascending. `*count` receives
/// the number available; at most `capacity` are written.
///
/// # Safety
/// `values` must hold `capacity` doubles (may be NULL when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn mcpqe_fci_energies(
    system: *const McpqeSystem,
    values: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> McpqeStatus {
    guard(|| {
        non_null(system, "system")?;
        non_null(count, "count")?;
        let fci = (*system).fci.as_ref().ok_or_else(|| invalid("sector too large for the dense solver"))?;
        *count = fci.len();
        if capacity > 0 {
            non_null(values, "values")?;
            let n = capacity.min(fci.len());
            ptr::copy_nonoverlapping(fci.as_ptr(), values, n);
        }
        Ok(())
    })
}

unsafe fn finish_run(run: RunResult, offset: f64, folded: f64, out: *mut *mut McpqeRun, summary: *mut McpqeRunSummary) {
    let s = summarise(&run, offset, folded);
    if !summary.is_null() {
        *summary = s;
    }
    *out = Box::into_raw(Box::new(McpqeRun { run, summary: s }));
}

/// Ground-state propagation.
///
/// # Safety
/// `system`, `options` and `out` must be valid; `summary` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_run_ground(
    system: *const McpqeSystem,
    options: *const McpqeRunOptions,
    out: *mut *mut McpqeRun,
    summary: *mut McpqeRunSummary,
) -> McpqeStatus {
    guard(|| {
        non_null(system, "system")?;
        non_null(options, "options")?;
        non_null(out, "out")?;
        let cfg = to_config(&*options)?;
        let sys = &(*system).system;
        let run = run_ground(sys, &cfg, None).map_err(|e| Failure::from(CliError::from(e)))?;
        finish_run(run, sys.offset, f64::NAN, out, summary);
        Ok(())
    })
}

/// Folded-spectrum propagation around `omega` (absolute energy).
///
/// # Safety
/// As for [`mcpqe_run_ground`].
#[no_mangle]
pub unsafe extern "C" fn mcpqe_run_folded(
    system: *const McpqeSystem,
    omega: f64,
    options: *const McpqeRunOptions,
    out: *mut *mut McpqeRun,
    summary: *mut McpqeRunSummary,
) -> McpqeStatus {
    guard(|| {
        non_null(system, "system")?;
        non_null(options, "options")?;
        non_null(out, "out")?;
        if !omega.is_finite() {
            return Err(invalid("omega must be finite"));
        }
        let cfg = to_config(&*options)?;
        let sys = &(*system).system;
        let r = run_folded_spectrum(sys, omega, &cfg, None).map_err(|e| Failure::from(CliError::from(e)))?;
        let offset = sys.folded(omega).offset;
        finish_run(r.run, offset, r.energy, out, summary);
        Ok(())
    })
}

/// # Safety
/// `run` must be a live handle and `summary` valid.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_run_summary(run: *const McpqeRun, summary: *mut McpqeRunSummary) -> McpqeStatus {
    guard(|| {
        non_null(run, "run")?;
        non_null(summary, "summary")?;
        *summary = (*run).summary;
        Ok(())
    })
}

/// Copies one per-step series. `*count` receives the step count; fails
/// with `BufferTooSmall` (after writing `capacity` values) when it does
/// not fit.
///
/// # Safety
/// `values` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_run_series(
    run: *const McpqeRun,
    which: McpqeSeries,
    values: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> McpqeStatus {
    guard(|| {
        non_null(run, "run")?;
        non_null(count, "count")?;
        let rec = &(*run).run.records;
        *count = rec.len();
        if capacity == 0 {
            return Ok(());
        }
        non_null(values, "values")?;
        for (i, r) in rec.iter().take(capacity).enumerate() {
            *values.add(i) = match which {
                McpqeSeries::Shift => r.shift,
                McpqeSeries::ProjectedEnergy => r.e_proj,
                McpqeSeries::Population => r.n_tot,
                McpqeSeries::ReferenceOverlap => r.s0,
            };
        }
        if capacity < rec.len() {
            return Err(Failure(McpqeStatus::BufferTooSmall, format!("{} steps do not fit in {capacity}", rec.len())));
        }
        Ok(())
    })
}

/// # Safety
/// `run` must come from this library or be NULL; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn mcpqe_run_free(run: *mut McpqeRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}
