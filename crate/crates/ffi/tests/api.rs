use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use mcpqe_ffi::*;

fn last_error() -> String {
    let p = mcpqe_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn h2_chain() -> *mut McpqeSystem {
    let mut sys = ptr::null_mut();
    let s = unsafe { mcpqe_system_from_chain(2, 0.7414, 0, McpqeGrouping::FirstFitDecreasing, &mut sys) };
    assert_eq!(s, McpqeStatus::Ok);
    assert!(mcpqe_last_error_message().is_null());
    sys
}

fn fci(sys: *const McpqeSystem) -> Vec<f64> {
    let mut n = 0usize;
    assert_eq!(unsafe { mcpqe_fci_energies(sys, ptr::null_mut(), 0, &mut n) }, McpqeStatus::Ok);
    let mut v = vec![0.0; n];
    assert_eq!(unsafe { mcpqe_fci_energies(sys, v.as_mut_ptr(), n, &mut n) }, McpqeStatus::Ok);
    v
}

#[test]
fn ground_run_matches_the_exact_energy() {
    let sys = h2_chain();
    let (mut nq, mut ng, mut e_ref) = (0u32, 0u32, 0.0);
    assert_eq!(unsafe { mcpqe_system_info(sys, &mut nq, &mut ng, &mut e_ref) }, McpqeStatus::Ok);
    assert_eq!(nq, 4);
    assert!(ng > 0);
    let levels = fci(sys);
    assert!(levels.windows(2).all(|w| w[0] <= w[1]));

    let opts = McpqeRunOptions { n_steps: 400, ..mcpqe_run_options_default() };
    let mut run = ptr::null_mut();
    let mut sum = unsafe { std::mem::zeroed::<McpqeRunSummary>() };
    assert_eq!(unsafe { mcpqe_run_ground(sys, &opts, &mut run, &mut sum) }, McpqeStatus::Ok);
    assert_eq!(sum.steps, 400);
    assert_eq!(sum.shots, 0);
    assert!(sum.folded_energy.is_nan());
    assert!((sum.reference_energy - e_ref).abs() < 1e-12);
    assert!((sum.shift_mean + e_ref - levels[0]).abs() < 1e-8);
    assert!((sum.energy_mean + e_ref - levels[0]).abs() < 1e-8);

    let mut again = unsafe { std::mem::zeroed::<McpqeRunSummary>() };
    assert_eq!(unsafe { mcpqe_run_summary(run, &mut again) }, McpqeStatus::Ok);
    assert_eq!(again.final_shift, sum.final_shift);

    let mut buf = vec![0.0; 400];
    let mut n = 0usize;
    assert_eq!(unsafe { mcpqe_run_series(run, McpqeSeries::ReferenceOverlap, buf.as_mut_ptr(), buf.len(), &mut n) }, McpqeStatus::Ok);
    assert_eq!(n, 400);
    assert!(buf.iter().all(|x| x.is_finite() && *x > 0.0));
    assert_eq!(
        unsafe { mcpqe_run_series(run, McpqeSeries::Shift, buf.as_mut_ptr(), 10, &mut n) },
        McpqeStatus::BufferTooSmall
    );
    assert_eq!(n, 400);
    assert_eq!(buf[9], {
        let mut full = vec![0.0; 400];
        unsafe { mcpqe_run_series(run, McpqeSeries::Shift, full.as_mut_ptr(), 400, &mut n) };
        full[9]
    });

    unsafe {
        mcpqe_run_free(run);
        mcpqe_system_free(sys);
        mcpqe_run_free(ptr::null_mut());
        mcpqe_system_free(ptr::null_mut());
    }
}

#[test]
fn folded_run_recovers_an_excited_level() {
    let sys = h2_chain();
    let levels = fci(sys);
    let target = levels[1];
    let opts = McpqeRunOptions { n_steps: 2000, ..mcpqe_run_options_default() };
    let mut run = ptr::null_mut();
    let mut sum = unsafe { std::mem::zeroed::<McpqeRunSummary>() };
    assert_eq!(unsafe { mcpqe_run_folded(sys, target + 0.01, &opts, &mut run, &mut sum) }, McpqeStatus::Ok);
    let nearest = levels.iter().map(|e| (e - sum.folded_energy).abs()).fold(f64::INFINITY, f64::min);
    assert!(nearest < 1e-5, "{} vs {levels:?}", sum.folded_energy);
    unsafe {
        mcpqe_run_free(run);
        mcpqe_system_free(sys);
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut sys = ptr::null_mut();
    let missing = CString::new("/no/such/file.fcidump").unwrap();
    let s = unsafe { mcpqe_system_from_fcidump(missing.as_ptr(), 0, McpqeGrouping::XyPattern, &mut sys) };
    assert_eq!(s, McpqeStatus::InvalidInput);
    assert!(sys.is_null());
    assert!(last_error().contains("file.fcidump"), "{}", last_error());

    let s = unsafe { mcpqe_system_from_fcidump(ptr::null(), 0, McpqeGrouping::XyPattern, &mut sys) };
    assert_eq!(s, McpqeStatus::NullPointer);
    assert!(last_error().contains("null"));

    let sys = h2_chain();
    let mut run = ptr::null_mut();
    let bad = McpqeRunOptions { delta_beta: -1.0, ..mcpqe_run_options_default() };
    assert_eq!(unsafe { mcpqe_run_ground(sys, &bad, &mut run, ptr::null_mut()) }, McpqeStatus::InvalidInput);
    let shots = McpqeRunOptions { noise: McpqeNoise::Shots, noise_parameter: 2.5, ..mcpqe_run_options_default() };
    assert_eq!(unsafe { mcpqe_run_ground(sys, &shots, &mut run, ptr::null_mut()) }, McpqeStatus::InvalidInput);
    assert!(last_error().contains("shot"));
    assert!(run.is_null());

    let opts = mcpqe_run_options_default();
    assert_eq!(unsafe { mcpqe_run_folded(sys, f64::NAN, &opts, &mut run, ptr::null_mut()) }, McpqeStatus::InvalidInput);
    assert!(last_error().contains("omega"));

    // One alpha and one beta electron: moving the alpha one keeps the sector.
    assert_eq!(unsafe { mcpqe_system_set_reference(sys, 0b0110) }, McpqeStatus::Ok);
    assert_eq!(unsafe { mcpqe_system_set_reference(sys, 0b0101) }, McpqeStatus::InvalidInput);
    assert_eq!(unsafe { mcpqe_system_info(ptr::null(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) }, McpqeStatus::NullPointer);
    unsafe { mcpqe_system_free(sys) };
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(mcpqe_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    assert!(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/mcpqe.h").is_file());
}
