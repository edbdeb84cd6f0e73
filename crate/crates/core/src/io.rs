//! CSV and metadata files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::biphoton::JsaGrid;
use crate::error::{Error, Result};
use crate::grid::{RealGrid2D, SampledComplexFunction};
use crate::pump::CavityPhase;

fn check(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::RejectedValue {
            what: format!("non-finite {what}"),
        })
    }
}

/// CSV text for a sampled complex function: `axis,re,im`.
pub fn complex_function_csv(f: &SampledComplexFunction, axis_name: &str) -> Result<String> {
    let mut out = String::new();
    let a = f.axis;
    writeln!(out, "# axis={axis_name} min={:e} max={:e} n={}", a.start, a.end(), a.len).unwrap();
    writeln!(out, "{axis_name},re,im").unwrap();
    for (x, v) in a.values().zip(&f.values) {
        check(v.re, "sample")?;
        check(v.im, "sample")?;
        writeln!(out, "{x:e},{:e},{:e}", v.re, v.im).unwrap();
    }
    Ok(out)
}

/// CSV text for a real (τ, Ω) grid, τ outer.
pub fn real_grid_csv(g: &RealGrid2D, omega_name: &str, omega_scale: f64) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# axis1=tau_s min={:e} max={:e} n={}", g.tau.start, g.tau.end(), g.tau.len).unwrap();
    writeln!(
        out,
        "# axis2={omega_name} min={:e} max={:e} n={}",
        g.omega.start * omega_scale,
        g.omega.end() * omega_scale,
        g.omega.len
    )
    .unwrap();
    writeln!(out, "tau_s,{omega_name},value").unwrap();
    for (it, t) in g.tau.values().enumerate() {
        for (iw, w) in g.omega.values().enumerate() {
            let v = g.get(it, iw);
            check(v, "grid value")?;
            writeln!(out, "{t:e},{:e},{v:e}", w * omega_scale).unwrap();
        }
    }
    Ok(out)
}

/// CSV text for a joint spectral amplitude, signal outer.
pub fn jsa_csv(jsa: &JsaGrid) -> Result<String> {
    let n = jsa.axes.len();
    let mut out = String::with_capacity(n * n * 64);
    let (lo, hi) = (jsa.omega_s(0), jsa.omega_s(n - 1));
    writeln!(out, "# axis1=omega_s_rad_s min={lo:e} max={hi:e} n={n}").unwrap();
    writeln!(out, "# axis2=omega_i_rad_s min={lo:e} max={hi:e} n={n}").unwrap();
    writeln!(out, "omega_s_rad_s,omega_i_rad_s,re,im").unwrap();
    for j in 0..n {
        let ws = jsa.omega_s(j);
        for k in 0..n {
            let v = jsa.get(j, k);
            check(v.re, "amplitude")?;
            check(v.im, "amplitude")?;
            writeln!(out, "{ws:e},{:e},{:e},{:e}", jsa.omega_i(k), v.re, v.im).unwrap();
        }
    }
    Ok(out)
}

/// `key = value` lines in the given order.
pub fn metadata_text(entries: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in entries {
        writeln!(out, "{k} = {v}").unwrap();
    }
    out
}

/// Write through a temporary sibling and rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, contents)?;
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn table_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Table {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn parse_row<const N: usize>(path: &Path, line_no: usize, line: &str) -> Result<[f64; N]> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != N {
        return Err(table_error(path, line_no, format!("expected {N} columns, found {}: `{line}`", fields.len())));
    }
    let mut out = [0.0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        let x: f64 = f.parse().map_err(|_| table_error(path, line_no, format!("not a number: `{f}`")))?;
        if !x.is_finite() {
            return Err(table_error(path, line_no, format!("non-finite value: `{f}`")));
        }
        *slot = x;
    }
    Ok(out)
}

/// Parse a two-column table `omega_rad_s,phase_rad` (a header line is optional).
pub fn parse_cavity_phase(text: &str, path: &Path) -> Result<CavityPhase> {
    let mut omega = Vec::new();
    let mut phase = Vec::new();
    for (n, (line_no, line)) in data_lines(text).enumerate() {
        if n == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let [w, p] = parse_row::<2>(path, line_no, line)?;
        if omega.last().is_some_and(|&last| w <= last) {
            return Err(table_error(path, line_no, "frequencies must be strictly increasing"));
        }
        omega.push(w);
        phase.push(p);
    }
    if omega.is_empty() {
        return Err(table_error(path, 0, "no data rows"));
    }
    CavityPhase::new(omega, phase)
}

pub fn read_cavity_phase(path: &Path) -> Result<CavityPhase> {
    let text = fs::read_to_string(path)?;
    parse_cavity_phase(&text, path)
}

/// Resolve a path written in a scenario file relative to that file's directory.
pub fn resolve_relative(config_path: &Path, file: &str) -> PathBuf {
    let p = Path::new(file);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Read back a complex-function CSV as (axis, value) pairs.
pub fn parse_complex_function_csv(text: &str, path: &Path) -> Result<Vec<(f64, Complex64)>> {
    let mut out = Vec::new();
    for (n, (line_no, line)) in data_lines(text).enumerate() {
        if n == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let [x, re, im] = parse_row::<3>(path, line_no, line)?;
        out.push((x, Complex64::new(re, im)));
    }
    Ok(out)
}

/// Read back a real-grid CSV as (τ, Ω, value) triples.
pub fn parse_real_grid_csv(text: &str, path: &Path) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::new();
    for (n, (line_no, line)) in data_lines(text).enumerate() {
        if n == 0 && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        out.push(parse_row::<3>(path, line_no, line)?);
    }
    Ok(out)
}
