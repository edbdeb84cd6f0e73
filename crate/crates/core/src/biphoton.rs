//! Phase-matching amplitude f₋ and the joint spectral amplitude.
//!
//! Three routes compute f₋(ω₋) = ∫ φ(z)·exp(iω₋z/v̄_g) dz:
//!
//! * [`f_minus_finite`] integrates a sampled envelope over the device length
//!   with the composite trapezoid rule;
//! * [`f_minus_infinite`] sums the closed-form transforms of every beam
//!   (device length taken to infinity);
//! * [`f_minus_gaussian`] is the single-beam closed form, used as oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::config::Scenario;
use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::grid::{Axis, SampledComplexFunction};
use crate::pump::{self, BeamSpec, PumpPulse};

/// Which computation of f₋ to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Finite,
    Infinite,
    Gaussian,
}

impl std::str::FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "finite" => Ok(Route::Finite),
            "infinite" => Ok(Route::Infinite),
            "gaussian" => Ok(Route::Gaussian),
            other => Err(format!("unknown route `{other}` (expected finite, infinite or gaussian)")),
        }
    }
}

/// `coef·exp(−α(ω−μ)² + iωτ)`, the transform of one tilted Gaussian beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent {
    pub coef: Complex64,
    pub center: f64,
    pub alpha: f64,
    pub delay: f64,
}

impl GaussianComponent {
    /// Exact Fourier transform of [`pump::beam_field`] (times `exp(ik_deg z)`).
    pub fn from_beam(beam: &BeamSpec, device: &DeviceParams) -> Self {
        let cos = beam.incidence_angle(device).cos();
        let q = beam.carrier(device);
        let width = beam.spectral_width(device);
        GaussianComponent {
            coef: beam.weight * (PI.sqrt() * beam.waist / cos) * Complex64::from_polar(1.0, -q * beam.position),
            center: beam.center_detuning(device),
            alpha: 1.0 / (width * width),
            delay: beam.delay(device),
        }
    }

    pub fn eval(&self, omega: f64) -> Complex64 {
        let d = omega - self.center;
        self.coef * Complex64::from_polar((-self.alpha * d * d).exp(), omega * self.delay)
    }

    /// `∫ self(ω)·other(ω)* dω`.
    pub fn inner(&self, other: &GaussianComponent) -> Complex64 {
        let a = self.alpha + other.alpha;
        let b = Complex64::new(
            2.0 * (self.alpha * self.center + other.alpha * other.center),
            self.delay - other.delay,
        );
        let c = -self.alpha * self.center * self.center - other.alpha * other.center * other.center;
        self.coef * other.coef.conj() * (PI / a).sqrt() * (b * b / (4.0 * a) + c).exp()
    }

    /// `∫ self(Ω−ω)·other(Ω+ω)*·exp(2iτω) dω`.
    pub fn cross_wigner(&self, other: &GaussianComponent, tau: f64, omega: f64) -> Complex64 {
        let p = omega - self.center;
        let q = omega - other.center;
        let a = self.alpha + other.alpha;
        let b = Complex64::new(
            2.0 * (self.alpha * p - other.alpha * q),
            2.0 * tau - self.delay - other.delay,
        );
        let exponent = b * b / (4.0 * a) - self.alpha * p * p - other.alpha * q * q
            + Complex64::new(0.0, omega * (self.delay - other.delay));
        self.coef * other.coef.conj() * (PI / a).sqrt() * exponent.exp()
    }
}

/// Single-beam closed form with unit peak magnitude for unit weight:
/// `w·e^{−iqz₀}·e^{iω₋τ₀}·exp(−(ω₋−ω₋⁽⁰⁾)²/Δω²)`.
pub fn f_minus_gaussian(beam: &BeamSpec, device: &DeviceParams, omega_minus: f64) -> Complex64 {
    let component = GaussianComponent::from_beam(beam, device);
    let scale = beam.incidence_angle(device).cos() / (PI.sqrt() * beam.waist);
    component.eval(omega_minus) * scale
}

/// Fourier-limit route: sum of the per-beam closed forms, normalized on the grid.
pub fn f_minus_infinite(beams: &[BeamSpec], device: &DeviceParams, grid: &Axis) -> SampledComplexFunction {
    infinite_unnormalized(beams, device, grid).normalized()
}

fn infinite_unnormalized(beams: &[BeamSpec], device: &DeviceParams, grid: &Axis) -> SampledComplexFunction {
    let components: Vec<GaussianComponent> = beams.iter().map(|b| GaussianComponent::from_beam(b, device)).collect();
    SampledComplexFunction::from_fn(*grid, |w| components.iter().map(|c| c.eval(w)).sum())
}

/// Finite-length route: trapezoid quadrature of `φ(z)·exp(iω₋z/v̄_g)` over the
/// device, normalized on the ω₋ grid.
pub fn f_minus_finite(envelope: &SampledComplexFunction, device: &DeviceParams, grid: &Axis) -> Result<SampledComplexFunction> {
    Ok(finite_unnormalized(envelope, device, grid)?.normalized())
}

fn finite_unnormalized(envelope: &SampledComplexFunction, device: &DeviceParams, grid: &Axis) -> Result<SampledComplexFunction> {
    pump::check_domain(&envelope.axis, device)?;
    let omega_max = grid.start.abs().max(grid.end().abs());
    let max_step = pump::max_z_step(omega_max / device.group_velocity);
    if envelope.axis.step > max_step * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse {
            step: envelope.axis.step,
            max_step,
        });
    }
    let zs = envelope.axis;
    let n = zs.len;
    let weights: Vec<Complex64> = envelope
        .values
        .iter()
        .enumerate()
        .map(|(k, phi)| if k == 0 || k == n - 1 { phi * 0.5 * zs.step } else { phi * zs.step })
        .collect();
    let values = chirp_sum(&weights, &zs, grid, 1.0 / device.group_velocity);
    SampledComplexFunction::new(*grid, values)
}

/// `Σ_k a_k·exp(i·ω_j·z_k·rate)` for every node of `grid`, by Bluestein's
/// chirp-z factorization `jk = (j² + k² − (j−k)²)/2`.
fn chirp_sum(a: &[Complex64], zs: &Axis, grid: &Axis, rate: f64) -> Vec<Complex64> {
    let (n, m) = (a.len(), grid.len);
    let alpha = grid.step * zs.step * rate;
    // exp(iα·k²/2) with k² reduced exactly before scaling
    let chirp = |k: i64| Complex64::from_polar(1.0, 0.5 * alpha * (k * k) as f64);
    let size = (n + m - 1).next_power_of_two();
    let mut u = vec![Complex64::new(0.0, 0.0); size];
    for (k, (slot, ak)) in u.iter_mut().zip(a).enumerate() {
        let base = Complex64::from_polar(1.0, grid.start * zs.value(k) * rate);
        *slot = ak * base * chirp(k as i64);
    }
    let mut v = vec![Complex64::new(0.0, 0.0); size];
    for (j, slot) in v.iter_mut().take(m).enumerate() {
        *slot = chirp(j as i64).conj();
    }
    for k in 1..n {
        v[size - k] = chirp(k as i64).conj();
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(size);
    forward.process(&mut u);
    forward.process(&mut v);
    for (x, y) in u.iter_mut().zip(&v) {
        *x *= y / size as f64;
    }
    planner.plan_fft_inverse(size).process(&mut u);
    (0..m)
        .map(|j| u[j] * chirp(j as i64) * Complex64::from_polar(1.0, j as f64 * grid.step * zs.start * rate))
        .collect()
}

/// Default ω₋ grid: ±(8·Δω_min + max|ω₋⁽⁰⁾|), 1024 points.
pub fn default_omega_minus_halfspan(beams: &[BeamSpec], device: &DeviceParams) -> f64 {
    let min_width = beams.iter().map(|b| b.spectral_width(device)).fold(f64::INFINITY, f64::min);
    let spread = beams.iter().map(|b| b.center_detuning(device).abs()).fold(0.0, f64::max);
    8.0 * min_width + spread
}

pub const DEFAULT_OMEGA_MINUS_POINTS: usize = 1024;

/// f₋ for a beam list by the chosen route, not normalized.
pub fn f_minus_raw(beams: &[BeamSpec], device: &DeviceParams, grid: &Axis, route: Route) -> Result<SampledComplexFunction> {
    match route {
        Route::Finite => {
            let omega_max = grid.start.abs().max(grid.end().abs());
            let zs = pump::z_grid(beams, device, omega_max / device.group_velocity);
            let env = pump::pump_envelope(beams, device, &zs)?;
            finite_unnormalized(&env, device, grid)
        }
        Route::Infinite => Ok(infinite_unnormalized(beams, device, grid)),
        Route::Gaussian => {
            let [beam] = beams else {
                return Err(Error::InvalidParameter {
                    name: "route",
                    reason: format!("the gaussian route handles exactly one beam, got {}", beams.len()),
                });
            };
            Ok(SampledComplexFunction::from_fn(*grid, |w| f_minus_gaussian(beam, device, w)))
        }
    }
}

/// Normalized f₋ for a beam list by the chosen route.
pub fn f_minus(beams: &[BeamSpec], device: &DeviceParams, grid: &Axis, route: Route) -> Result<SampledComplexFunction> {
    Ok(f_minus_raw(beams, device, grid, route)?.normalized())
}

/// `|⟨f₋ᵃ|f₋ᵇ⟩|` of the normalized closed forms.
pub fn component_overlap(a: &BeamSpec, b: &BeamSpec, device: &DeviceParams) -> Result<f64> {
    if a.waist != b.waist {
        return Err(Error::WaistMismatch { a: a.waist, b: b.waist });
    }
    let ga = GaussianComponent::from_beam(a, device);
    let gb = GaussianComponent::from_beam(b, device);
    let norm = (ga.inner(&ga).re * gb.inner(&gb).re).sqrt();
    Ok((ga.inner(&gb).norm() / norm).min(1.0))
}

/// Square (ω_s, ω_i) grid centered on ω_p⁽⁰⁾/2; both axes are detunings from
/// that center and share one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsaAxes {
    pub center: f64,
    pub axis: Axis,
}

impl JsaAxes {
    /// `len` points of spacing `step` on each axis.
    pub fn new(center: f64, step: f64, len: usize) -> Result<Self> {
        Ok(JsaAxes {
            center,
            axis: Axis::centered(step, len)?,
        })
    }

    /// Axes covering an ω₋ half-span and an ω₊ half-span (relative to ω_p) at
    /// spacing `step`, widened by `margin` on each side.
    pub fn covering(center: f64, omega_minus_halfspan: f64, omega_plus_halfspan: f64, margin: f64, step: f64) -> Result<Self> {
        let half = (omega_minus_halfspan + omega_plus_halfspan) / 2.0 + margin;
        let mut len = (2.0 * half / step).ceil() as usize + 1;
        if len % 2 == 1 {
            len += 1;
        }
        JsaAxes::new(center, step, len)
    }

    /// Default axes for a scenario: ω₋ grid step and span, ω₊ span 8/τ_p.
    pub fn for_scenario(scenario: &Scenario, margin: f64) -> Result<Self> {
        let g = &scenario.grids;
        let step = 2.0 * g.omega_minus_halfspan / (g.omega_minus_points - 1) as f64;
        JsaAxes::covering(
            scenario.device.pump_center_omega / 2.0,
            g.omega_minus_halfspan,
            8.0 / scenario.pulse.duration,
            margin,
            step,
        )
    }

    pub fn len(&self) -> usize {
        self.axis.len
    }

    pub fn is_empty(&self) -> bool {
        self.axis.len == 0
    }

    pub fn step(&self) -> f64 {
        self.axis.step
    }

    /// Axis of all differences ω_s − ω_i on the grid.
    pub fn difference_axis(&self) -> Axis {
        let n = self.axis.len;
        Axis {
            start: -((n - 1) as f64) * self.axis.step,
            step: self.axis.step,
            len: 2 * n - 1,
        }
    }
}

/// Joint spectral amplitude, row-major with ω_s outer.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    pub axes: JsaAxes,
    pub amplitude: Vec<Complex64>,
}

impl JsaGrid {
    pub fn omega_s(&self, j: usize) -> f64 {
        self.axes.center + self.axes.axis.value(j)
    }

    pub fn omega_i(&self, k: usize) -> f64 {
        self.omega_s(k)
    }

    pub fn norm_sqr(&self) -> f64 {
        let h = self.axes.step();
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * h * h
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.amplitude[j * self.axes.len() + k]
    }
}

/// Unnormalized factors on the grid: `f₊` at `ω_s+ω_i` (index `j+k`) and
/// `f₋` at `ω_s−ω_i` (index `j−k+n−1`).
pub fn jsa_factors(
    beams: &[BeamSpec],
    device: &DeviceParams,
    pulse: &PumpPulse,
    axes: &JsaAxes,
    route: Route,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let f_minus = f_minus_raw(beams, device, &axes.difference_axis(), route)?;
    let n = axes.len();
    let plus_start = 2.0 * axes.center + 2.0 * axes.axis.start;
    let f_plus = (0..2 * n - 1)
        .map(|m| pump::pump_spectrum(pulse, plus_start + m as f64 * axes.step()))
        .collect();
    Ok((f_plus, f_minus.values))
}

/// `A(ω_s, ω_i) = f₊(ω_s+ω_i)·f₋(ω_s−ω_i)`, L2-normalized.
pub fn assemble_jsa_from(
    beams: &[BeamSpec],
    device: &DeviceParams,
    pulse: &PumpPulse,
    axes: &JsaAxes,
    route: Route,
) -> Result<JsaGrid> {
    let (f_plus, f_minus) = jsa_factors(beams, device, pulse, axes, route)?;
    let n = axes.len();
    let mut amplitude = vec![Complex64::new(0.0, 0.0); n * n];
    amplitude.par_chunks_mut(n).enumerate().for_each(|(j, row)| {
        for (k, a) in row.iter_mut().enumerate() {
            *a = f_plus[j + k] * f_minus[j + n - 1 - k];
        }
    });
    let mut jsa = JsaGrid { axes: *axes, amplitude };
    let norm = jsa.norm_sqr().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::RejectedValue {
            what: "joint spectral amplitude (zero or non-finite norm)".into(),
        });
    }
    for a in &mut jsa.amplitude {
        *a /= norm;
    }
    Ok(jsa)
}

/// JSA of a scenario on its default axes.
pub fn assemble_jsa(scenario: &Scenario, route: Route) -> Result<JsaGrid> {
    let axes = JsaAxes::for_scenario(scenario, 0.0)?;
    assemble_jsa_from(&scenario.beams, &scenario.device, &scenario.pulse, &axes, route)
}
