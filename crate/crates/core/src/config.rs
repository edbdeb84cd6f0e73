//! Scenario description language.
//!
//! ```text
//! # comment
//! [device]
//! length_mm = 2
//! vg_m_per_s = 92600000
//! theta_deg_arcmin = 9.37        # or n_signal / n_idler
//!
//! [pulse]
//! wavelength_nm = 775
//! duration_ps = 3.2
//! cavity_phase_file = "cavity.csv"   # optional
//!
//! [beam]                         # repeatable, order preserved
//! position_mm = 0.5
//! tilt_arcmin = 9.37
//! waist_um = 200
//! amplitude = 1                  # optional
//! phase_rad = 0                  # optional
//!
//! [grid]                         # optional, every key defaults
//! omega_minus_halfspan_rad_per_ps = 9.5
//! omega_minus_points = 1024
//! tau_halfspan_ps = 15
//! tau_points = 256
//! big_omega_halfspan_rad_per_ps = 6
//! big_omega_points = 256
//! ```
//!
//! Values are decimal floats; `cavity_phase_file` alone takes a double-quoted
//! string. A key may appear once per section, `[device]`, `[pulse]` and
//! `[grid]` once per file. [`Scenario::to_canonical_text`] prints the fully
//! resolved scenario; printing a parsed canonical text reproduces it byte for byte.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::biphoton::{default_omega_minus_halfspan, DEFAULT_OMEGA_MINUS_POINTS};
use crate::device::{self, DeviceParams, DEFAULT_GROUP_VELOCITY, SMALL_ANGLE_CUTOFF, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::pump::{BeamSpec, PumpPulse};

pub const DEFAULT_TAU_POINTS: usize = 256;
pub const DEFAULT_BIG_OMEGA_POINTS: usize = 256;

/// Axis ranges and point counts for the sampled quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub omega_minus_halfspan: f64,
    pub omega_minus_points: usize,
    pub tau_halfspan: f64,
    pub tau_points: usize,
    pub big_omega_halfspan: f64,
    pub big_omega_points: usize,
}

impl GridSpec {
    /// Grids sized from the beams' spectral widths and displacements.
    pub fn default_for(beams: &[BeamSpec], device: &DeviceParams) -> GridSpec {
        let min_width = beams.iter().map(|b| b.spectral_width(device)).fold(f64::INFINITY, f64::min);
        let max_delay = beams.iter().map(|b| b.delay(device).abs()).fold(0.0, f64::max);
        let max_detuning = beams.iter().map(|b| b.center_detuning(device).abs()).fold(0.0, f64::max);
        let per_ps = |x: f64| printable(x, |v| v * 1e12, |v| v / 1e12);
        GridSpec {
            omega_minus_halfspan: per_ps(default_omega_minus_halfspan(beams, device)),
            omega_minus_points: DEFAULT_OMEGA_MINUS_POINTS,
            tau_halfspan: printable(max_delay + 6.0 * SQRT_2 / min_width, |v| v / 1e12, |v| v * 1e12),
            tau_points: DEFAULT_TAU_POINTS,
            big_omega_halfspan: per_ps(max_detuning + 6.0 * min_width / SQRT_2),
            big_omega_points: DEFAULT_BIG_OMEGA_POINTS,
        }
    }
}

/// Everything needed to run a simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub device: DeviceParams,
    pub pulse: PumpPulse,
    pub beams: Vec<BeamSpec>,
    pub grids: GridSpec,
    pub cavity_phase_file: Option<String>,
    /// (amplitude, phase) as written, for exact reprinting.
    beam_polar: Vec<(f64, f64)>,
}

impl Scenario {
    pub fn new(device: DeviceParams, pulse: PumpPulse, beams: Vec<BeamSpec>, grids: Option<GridSpec>) -> Result<Scenario> {
        if beams.is_empty() {
            return Err(Error::Semantic {
                key: "beam".into(),
                message: "at least one [beam] section is required".into(),
            });
        }
        let grids = grids.unwrap_or_else(|| GridSpec::default_for(&beams, &device));
        let beam_polar = beams.iter().map(|b| (b.weight.norm(), b.weight.arg())).collect();
        Ok(Scenario {
            device,
            pulse,
            beams,
            grids,
            cavity_phase_file: None,
            beam_polar,
        })
    }

    /// Same scenario with a different beam list (grids unchanged).
    pub fn with_beams(&self, beams: Vec<BeamSpec>) -> Scenario {
        let beam_polar = beams.iter().map(|b| (b.weight.norm(), b.weight.arg())).collect();
        Scenario {
            beams,
            beam_polar,
            ..self.clone()
        }
    }

    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[device]\n");
        entry(&mut out, "length_mm", display(self.device.length, |x| x / 1e3, |x| x * 1e3));
        entry(&mut out, "vg_m_per_s", fmt_num(self.device.group_velocity));
        match self.device.indices {
            Some((ns, ni)) => {
                entry(&mut out, "n_signal", fmt_num(ns));
                entry(&mut out, "n_idler", fmt_num(ni));
            }
            None => entry(
                &mut out,
                "theta_deg_arcmin",
                display(self.device.theta_deg, device::arcmin_to_rad, device::rad_to_arcmin),
            ),
        }
        out.push_str("\n[pulse]\n");
        entry(&mut out, "wavelength_nm", display(self.pulse.center_wavelength, |x| x / 1e9, |x| x * 1e9));
        entry(&mut out, "duration_ps", display(self.pulse.duration, |x| x / 1e12, |x| x * 1e12));
        if let Some(path) = &self.cavity_phase_file {
            entry(&mut out, "cavity_phase_file", format!("\"{path}\""));
        }
        for (beam, polar) in self.beams.iter().zip(&self.beam_polar) {
            out.push_str("\n[beam]\n");
            entry(&mut out, "position_mm", display(beam.position, |x| x / 1e3, |x| x * 1e3));
            entry(&mut out, "tilt_arcmin", display(beam.tilt, device::arcmin_to_rad, device::rad_to_arcmin));
            entry(&mut out, "waist_um", display(beam.waist, |x| x / 1e6, |x| x * 1e6));
            let (amplitude, phase) = if Complex64::from_polar(polar.0, polar.1) == beam.weight {
                *polar
            } else {
                (beam.weight.norm(), beam.weight.arg())
            };
            entry(&mut out, "amplitude", fmt_num(amplitude));
            entry(&mut out, "phase_rad", fmt_num(phase));
        }
        let g = &self.grids;
        out.push_str("\n[grid]\n");
        entry(&mut out, "omega_minus_halfspan_rad_per_ps", display(g.omega_minus_halfspan, |x| x * 1e12, |x| x / 1e12));
        entry(&mut out, "omega_minus_points", g.omega_minus_points.to_string());
        entry(&mut out, "tau_halfspan_ps", display(g.tau_halfspan, |x| x / 1e12, |x| x * 1e12));
        entry(&mut out, "tau_points", g.tau_points.to_string());
        entry(&mut out, "big_omega_halfspan_rad_per_ps", display(g.big_omega_halfspan, |x| x * 1e12, |x| x / 1e12));
        entry(&mut out, "big_omega_points", g.big_omega_points.to_string());
        out
    }
}

fn entry(out: &mut String, key: &str, value: String) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(&value);
    out.push('\n');
}

/// Shortest round-trip decimal; plain notation for moderate magnitudes.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 {
        "0".to_string()
    } else if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Nearest value that the canonical text can reproduce exactly.
fn printable(si: f64, to_si: impl Fn(f64) -> f64, from_si: impl Fn(f64) -> f64) -> f64 {
    to_si(from_si(si))
}

/// Display-unit text for an SI value that parses back to exactly `si`.
fn display(si: f64, to_si: impl Fn(f64) -> f64, from_si: impl Fn(f64) -> f64) -> String {
    let d0 = from_si(si);
    let (mut up, mut down) = (d0, d0);
    if to_si(d0) == si {
        return fmt_num(d0);
    }
    for _ in 0..16 {
        up = up.next_up();
        down = down.next_down();
        if to_si(up) == si {
            return fmt_num(up);
        }
        if to_si(down) == si {
            return fmt_num(down);
        }
    }
    fmt_num(d0)
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Number(f64),
    Text(String),
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: Value,
    line: usize,
    text: String,
}

#[derive(Debug)]
struct Section {
    name: &'static str,
    entries: Vec<Entry>,
    used: Vec<bool>,
}

impl Section {
    fn new(name: &'static str) -> Self {
        Section {
            name,
            entries: Vec::new(),
            used: Vec::new(),
        }
    }

    fn find(&mut self, key: &str) -> Option<&Entry> {
        let idx = self.entries.iter().position(|e| e.key == key)?;
        self.used[idx] = true;
        Some(&self.entries[idx])
    }

    fn number(&mut self, key: &str) -> Result<Option<(f64, String)>> {
        let name = self.name;
        match self.find(key) {
            None => Ok(None),
            Some(Entry {
                value: Value::Number(x), text, ..
            }) => Ok(Some((*x, text.clone()))),
            Some(e) => Err(Error::Semantic {
                key: key.into(),
                message: format!("expected a number in [{name}] (line {}: `{}`)", e.line, e.text),
            }),
        }
    }

    fn unknown_keys(&self) -> Result<()> {
        if let Some(idx) = self.used.iter().position(|u| !u) {
            let e = &self.entries[idx];
            return Err(Error::Semantic {
                key: e.key.clone(),
                message: format!("unknown key in [{}] (line {}: `{}`)", self.name, e.line, e.text),
            });
        }
        Ok(())
    }
}

fn out_of_range(key: &str, line: &str, requirement: &str) -> Error {
    Error::Semantic {
        key: key.into(),
        message: format!("{requirement} (`{line}`)"),
    }
}

fn positive(section: &mut Section, key: &str) -> Result<Option<f64>> {
    match section.number(key)? {
        Some((x, _)) if x > 0.0 => Ok(Some(x)),
        Some((_, line)) => Err(out_of_range(key, &line, "must be positive")),
        None => Ok(None),
    }
}

fn required_positive(section: &mut Section, key: &str) -> Result<f64> {
    let name = section.name;
    positive(section, key)?.ok_or_else(|| Error::Semantic {
        key: key.into(),
        message: format!("missing required key in [{name}]"),
    })
}

fn points(section: &mut Section, key: &str) -> Result<Option<usize>> {
    match section.number(key)? {
        None => Ok(None),
        Some((x, line)) => {
            if x.fract() != 0.0 || !(16.0..=1e7).contains(&x) || (x as usize) % 2 == 1 {
                return Err(out_of_range(key, &line, "must be an even integer >= 16"));
            }
            Ok(Some(x as usize))
        }
    }
}

/// Parse and validate a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut device: Option<Section> = None;
    let mut pulse: Option<Section> = None;
    let mut grid: Option<Section> = None;
    let mut beams: Vec<Section> = Vec::new();
    let mut current: Option<&'static str> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = strip_comment(raw);
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let column = raw[..indent].chars().count() + 1;
        let syntax = |column: usize, message: &str| Error::Syntax {
            line: line_no,
            column,
            message: format!("{message} in `{raw}`"),
        };
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(syntax(column, "section header must end with `]`"));
            };
            let name = name.trim();
            if !is_identifier(name) {
                return Err(syntax(column + 1, "invalid section name"));
            }
            let (slot, known): (Option<&mut Option<Section>>, &'static str) = match name {
                "device" => (Some(&mut device), "device"),
                "pulse" => (Some(&mut pulse), "pulse"),
                "grid" => (Some(&mut grid), "grid"),
                "beam" => (None, "beam"),
                other => {
                    return Err(Error::Semantic {
                        key: other.into(),
                        message: format!("unknown section (line {line_no}: `{raw}`)"),
                    })
                }
            };
            match slot {
                Some(slot) => {
                    if slot.is_some() {
                        return Err(Error::Semantic {
                            key: known.into(),
                            message: format!("section may appear only once (line {line_no}: `{raw}`)"),
                        });
                    }
                    *slot = Some(Section::new(known));
                }
                None => beams.push(Section::new("beam")),
            }
            current = Some(known);
            continue;
        }
        let Some(eq) = trimmed.find('=') else {
            return Err(syntax(column, "expected `key = value`"));
        };
        let key = trimmed[..eq].trim();
        if !is_identifier(key) {
            return Err(syntax(column, "invalid key"));
        }
        let value_text = trimmed[eq + 1..].trim();
        let value_column = column + trimmed[..eq + 1].chars().count() + (trimmed[eq + 1..].len() - trimmed[eq + 1..].trim_start().len());
        let value = parse_value(value_text).map_err(|m| syntax(value_column, m))?;
        let Some(name) = current else {
            return Err(syntax(column, "entry outside of any section"));
        };
        let section = match name {
            "device" => device.as_mut(),
            "pulse" => pulse.as_mut(),
            "grid" => grid.as_mut(),
            _ => beams.last_mut(),
        }
        .expect("current section exists");
        if section.entries.iter().any(|e| e.key == key) {
            return Err(Error::Semantic {
                key: key.into(),
                message: format!("duplicate key in [{name}] (line {line_no}: `{raw}`)"),
            });
        }
        section.entries.push(Entry {
            key: key.into(),
            value,
            line: line_no,
            text: raw.to_string(),
        });
        section.used.push(false);
    }

    let missing = |name: &str| Error::Semantic {
        key: name.into(),
        message: "missing required section".into(),
    };
    let mut device_s = device.ok_or_else(|| missing("device"))?;
    let mut pulse_s = pulse.ok_or_else(|| missing("pulse"))?;
    if beams.is_empty() {
        return Err(missing("beam"));
    }

    let wavelength = required_positive(&mut pulse_s, "wavelength_nm")? / 1e9;
    let duration = required_positive(&mut pulse_s, "duration_ps")? / 1e12;
    let cavity_phase_file = match pulse_s.find("cavity_phase_file") {
        None => None,
        Some(Entry {
            value: Value::Text(t), ..
        }) => Some(t.clone()),
        Some(e) => {
            return Err(Error::Semantic {
                key: "cavity_phase_file".into(),
                message: format!("expected a quoted path (line {}: `{}`)", e.line, e.text),
            })
        }
    };
    pulse_s.unknown_keys()?;
    let pulse = PumpPulse::new(wavelength, duration)?;

    let device = parse_device(&mut device_s, wavelength)?;
    device_s.unknown_keys()?;

    let mut beam_specs = Vec::with_capacity(beams.len());
    let mut polar = Vec::with_capacity(beams.len());
    for mut s in beams {
        let position = s.number("position_mm")?.map_or(0.0, |v| v.0) / 1e3;
        let tilt = match s.number("tilt_arcmin")? {
            None => 0.0,
            Some((a, line)) => {
                let t = device::arcmin_to_rad(a);
                if t.abs() >= SMALL_ANGLE_CUTOFF {
                    return Err(out_of_range("tilt_arcmin", &line, "tilt must stay below the 0.05 rad small-angle cutoff"));
                }
                t
            }
        };
        let waist = required_positive(&mut s, "waist_um")? / 1e6;
        let amplitude = positive(&mut s, "amplitude")?.unwrap_or(1.0);
        let phase = s.number("phase_rad")?.map_or(0.0, |v| v.0);
        s.unknown_keys()?;
        beam_specs.push(BeamSpec::new(position, tilt, waist, Complex64::from_polar(amplitude, phase))?);
        polar.push((amplitude, phase));
    }

    let mut grids = GridSpec::default_for(&beam_specs, &device);
    if let Some(mut g) = grid {
        if let Some(x) = positive(&mut g, "omega_minus_halfspan_rad_per_ps")? {
            grids.omega_minus_halfspan = x * 1e12;
        }
        if let Some(n) = points(&mut g, "omega_minus_points")? {
            grids.omega_minus_points = n;
        }
        if let Some(x) = positive(&mut g, "tau_halfspan_ps")? {
            grids.tau_halfspan = x / 1e12;
        }
        if let Some(n) = points(&mut g, "tau_points")? {
            grids.tau_points = n;
        }
        if let Some(x) = positive(&mut g, "big_omega_halfspan_rad_per_ps")? {
            grids.big_omega_halfspan = x * 1e12;
        }
        if let Some(n) = points(&mut g, "big_omega_points")? {
            grids.big_omega_points = n;
        }
        g.unknown_keys()?;
    }

    let mut scenario = Scenario::new(device, pulse, beam_specs, Some(grids))?;
    scenario.beam_polar = polar;
    scenario.cavity_phase_file = cavity_phase_file;
    Ok(scenario)
}

fn parse_device(s: &mut Section, wavelength: f64) -> Result<DeviceParams> {
    let length = required_positive(s, "length_mm")? / 1e3;
    let vg = match s.number("vg_m_per_s")? {
        None => DEFAULT_GROUP_VELOCITY,
        Some((v, _)) if v > 0.0 && v < SPEED_OF_LIGHT => v,
        Some((_, line)) => return Err(out_of_range("vg_m_per_s", &line, "must lie strictly between 0 and c")),
    };
    let theta = s.number("theta_deg_arcmin")?;
    let ns = s.number("n_signal")?;
    let ni = s.number("n_idler")?;
    match (theta, ns, ni) {
        (theta, Some((ns, ls)), Some((ni, _))) => {
            if !(ns > 0.0) {
                return Err(out_of_range("n_signal", &ls, "must be positive"));
            }
            if !(ni > 0.0) {
                return Err(Error::Semantic {
                    key: "n_idler".into(),
                    message: "must be positive".into(),
                });
            }
            if ((ns - ni) / 2.0).abs() > 1.0 {
                return Err(out_of_range("n_signal", &ls, "|n_signal - n_idler|/2 must not exceed 1"));
            }
            let d = DeviceParams::from_indices(length, vg, wavelength, ns, ni)?;
            if let Some((t, line)) = theta {
                let rad = device::arcmin_to_rad(t);
                if (rad.sin() - (ns - ni) / 2.0).abs() > 1e-12 {
                    return Err(out_of_range(
                        "theta_deg_arcmin",
                        &line,
                        "inconsistent with n_signal/n_idler: sin(theta_deg) must equal (n_signal - n_idler)/2",
                    ));
                }
            }
            Ok(d)
        }
        (_, Some(_), None) => Err(Error::Semantic {
            key: "n_idler".into(),
            message: "n_signal given without n_idler".into(),
        }),
        (_, None, Some(_)) => Err(Error::Semantic {
            key: "n_signal".into(),
            message: "n_idler given without n_signal".into(),
        }),
        (Some((t, line)), None, None) => {
            if t.abs() >= 5400.0 {
                return Err(out_of_range("theta_deg_arcmin", &line, "must lie within ±90°"));
            }
            DeviceParams::new(length, vg, wavelength, device::arcmin_to_rad(t))
        }
        (None, None, None) => Err(Error::Semantic {
            key: "theta_deg_arcmin".into(),
            message: "missing required key in [device] (or give n_signal and n_idler)".into(),
        }),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut in_string = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => in_string = !in_string,
            '#' if !in_string => return &line[..i],
            _ => {}
        }
    }
    line
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

fn parse_value(text: &str) -> std::result::Result<Value, &'static str> {
    if text.is_empty() {
        return Err("missing value");
    }
    if let Some(rest) = text.strip_prefix('"') {
        let Some(inner) = rest.strip_suffix('"') else {
            return Err("unterminated string");
        };
        if inner.contains('"') || inner.is_empty() {
            return Err("malformed string");
        }
        return Ok(Value::Text(inner.to_string()));
    }
    if !is_decimal(text) {
        return Err("expected a decimal number");
    }
    let x: f64 = text.parse().map_err(|_| "expected a decimal number")?;
    if !x.is_finite() {
        return Err("number out of range");
    }
    Ok(Value::Number(x))
}

/// `[+-]? (digits [. digits?] | . digits) ([eE] [+-]? digits)?`
fn is_decimal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return false;
        }
    }
    i == b.len()
}
