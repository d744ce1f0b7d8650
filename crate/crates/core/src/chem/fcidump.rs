//! FCIDUMP reader and writer.
//!
//! The header is a Fortran namelist `&FCI NORB=..,NELEC=..,MS2=.. &END`
//! (a lone `/` also ends it). Each body line is `value i j k l` with
//! 1-based orbital indices:
//!
//! | indices       | meaning            |
//! |---------------|--------------------|
//! | `i j k l > 0` | `(ij|kl)`          |
//! | `i j 0 0`     | `h_ij`             |
//! | `i 0 0 0`     | orbital energy     |
//! | `0 0 0 0`     | core energy        |

use std::fmt::Write as _;
use std::path::Path;

use super::{ChemError, SpinOrbitalIntegrals};

fn perr(line: usize, msg: impl Into<String>) -> ChemError {
    ChemError::Parse { line, msg: msg.into() }
}

fn parse_value(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "e").parse().ok()
}

/// Header key/value pairs, keys upper-cased. List-valued keys such as
/// ORBSYM keep only their first element, which is enough to ignore them.
fn parse_header(text: &str) -> Vec<(String, String)> {
    let norm = text.replace(',', " ").replace(" =", "=").replace("= ", "=");
    norm.split_whitespace()
        .filter_map(|tok| tok.split_once('='))
        .map(|(k, v)| (k.trim_start_matches('&').to_ascii_uppercase(), v.to_string()))
        .collect()
}

/// Parses FCIDUMP text.
pub fn parse_fcidump(text: &str) -> Result<SpinOrbitalIntegrals, ChemError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut header = String::new();
    let mut body_start = None;
    for (n, line) in lines.iter().enumerate() {
        let upper = line.trim().to_ascii_uppercase();
        let end = upper.find("&END").or_else(|| upper.ends_with('/').then(|| upper.len() - 1));
        let (content, done) = match end {
            Some(pos) => (&line.trim()[..pos], true),
            None => (line.trim(), false),
        };
        header.push(' ');
        header.push_str(content);
        if done {
            body_start = Some(n + 1);
            break;
        }
    }
    let body_start = body_start.ok_or_else(|| perr(lines.len().max(1), "header not terminated by &END"))?;
    let kv = parse_header(&header);
    let get = |key: &str| kv.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
    let header_line = body_start.max(1);
    let norb: usize = get("NORB")
        .ok_or_else(|| perr(header_line, "missing NORB"))?
        .parse()
        .map_err(|_| perr(header_line, "NORB is not an integer"))?;
    let nelec: usize = get("NELEC")
        .ok_or_else(|| perr(header_line, "missing NELEC"))?
        .parse()
        .map_err(|_| perr(header_line, "NELEC is not an integer"))?;
    let ms2: i32 = match get("MS2") {
        Some(v) => v.parse().map_err(|_| perr(header_line, "MS2 is not an integer"))?,
        None => 0,
    };

    let mut ints = SpinOrbitalIntegrals::new(norb, nelec, ms2);
    let mut eps: Vec<Option<f64>> = vec![None; norb];
    for (n, line) in lines.iter().enumerate().skip(body_start) {
        let lineno = n + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(perr(lineno, format!("expected 5 fields, found {}", toks.len())));
        }
        let v = parse_value(toks[0]).ok_or_else(|| perr(lineno, format!("non-numeric value '{}'", toks[0])))?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            *slot = tok.parse().map_err(|_| perr(lineno, format!("bad index '{tok}'")))?;
            if *slot > norb {
                return Err(perr(lineno, format!("index {} out of range [0, {norb}]", *slot)));
            }
        }
        match idx {
            [0, 0, 0, 0] => ints.core_energy = v,
            [i, 0, 0, 0] => eps[i - 1] = Some(v),
            [i, j, 0, 0] if i > 0 && j > 0 => ints.set_h(i - 1, j - 1, v),
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => ints.set_g(i - 1, j - 1, k - 1, l - 1, v),
            _ => return Err(perr(lineno, format!("unrecognised index pattern {idx:?}"))),
        }
    }
    if eps.iter().all(Option::is_some) && norb > 0 {
        ints.orbital_energies = Some(eps.into_iter().map(Option::unwrap).collect());
    }
    ints.validate()?;
    Ok(ints)
}

pub fn read_fcidump(path: &Path) -> Result<SpinOrbitalIntegrals, ChemError> {
    let text = std::fs::read_to_string(path).map_err(|e| ChemError::Io { path: path.display().to_string(), source: e })?;
    parse_fcidump(&text)
}

/// Serialises one canonical representative per permutation class, with
/// values printed in shortest round-trip form.
pub fn write_fcidump(ints: &SpinOrbitalIntegrals) -> String {
    let n = ints.n_spatial;
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, ints.n_electrons, ints.ms2).unwrap();
    writeln!(out, "  ORBSYM={orbsym},").unwrap();
    writeln!(out, "  ISYM=1,").unwrap();
    writeln!(out, " &END").unwrap();
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if i * (i + 1) / 2 + j < k * (k + 1) / 2 + l {
                        continue;
                    }
                    let v = ints.g(i, j, k, l);
                    if v != 0.0 {
                        writeln!(out, "{:e} {} {} {} {}", v, i + 1, j + 1, k + 1, l + 1).unwrap();
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            let v = ints.h(i, j);
            if v != 0.0 {
                writeln!(out, "{:e} {} {} 0 0", v, i + 1, j + 1).unwrap();
            }
        }
    }
    if let Some(eps) = &ints.orbital_energies {
        for (i, e) in eps.iter().enumerate() {
            writeln!(out, "{:e} {} 0 0 0", e, i + 1).unwrap();
        }
    }
    writeln!(out, "{:e} 0 0 0 0", ints.core_energy).unwrap();
    out
}
