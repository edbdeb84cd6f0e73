//! Generalized Hong-Ou-Mandel measurement and pump-displacement tomography.
//!
//! With the idler arm delayed by `δτ` and frequency-shifted by `δμ`, the
//! coincidence probability of a normalized JSA is
//! `P_c = ½[1 − Re Σ A'(ω_s,ω_i)·A'*(ω_i,ω_s)·h²]`, which equals
//! `½[1 − g·W(δτ/2 + t*, δμ + w*)]` with `g ≈ 1` and offsets ≈ 0. The
//! constants are measured by [`HomCalibration`] instead of being assumed.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::biphoton::{assemble_jsa_from, f_minus, jsa_factors, JsaAxes, JsaGrid, Route};
use crate::config::Scenario;
use crate::device::{DeviceParams, PhaseSpacePoint, SMALL_ANGLE_CUTOFF};
use crate::error::{Error, Result};
use crate::grid::{Axis, RealGrid2D};
use crate::pump::BeamSpec;
use crate::wigner::wigner_transform;

/// Largest fraction of the JSA norm a row shift may wrap around.
const WRAP_TOLERANCE: f64 = 1e-8;

/// Where the displacement is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomRoute {
    /// Delay line and frequency shifter in the idler arm.
    Interferometer,
    /// Pump spot translated and tilted, interferometer left balanced.
    PumpEngineered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomSetting {
    pub arm_delay: f64,
    pub arm_shift: f64,
    pub route: HomRoute,
}

impl HomSetting {
    pub fn interferometer(arm_delay: f64, arm_shift: f64) -> Result<Self> {
        if !(arm_delay.is_finite() && arm_shift.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "hom setting",
                reason: format!("non-finite displacement ({arm_delay}, {arm_shift})"),
            });
        }
        Ok(HomSetting {
            arm_delay,
            arm_shift,
            route: HomRoute::Interferometer,
        })
    }
}

/// Swap overlap of a frequency-shifted JSA, resolved by the index
/// difference `d = k − j` so that any delay costs O(n).
#[derive(Debug, Clone)]
pub struct SwapProfile {
    step: f64,
    n: usize,
    diagonals: Vec<Complex64>,
}

impl SwapProfile {
    pub fn new(jsa: &JsaGrid, arm_shift: f64) -> Result<Self> {
        let n = jsa.axes.len();
        let h = jsa.axes.step();
        let shifted = if arm_shift == 0.0 {
            jsa.amplitude.clone()
        } else {
            shift_idler(jsa, arm_shift)?
        };
        let mut transposed = vec![Complex64::new(0.0, 0.0); n * n];
        for block in (0..n).step_by(32) {
            for j in 0..n {
                for k in block..(block + 32).min(n) {
                    transposed[k * n + j] = shifted[j * n + k];
                }
            }
        }
        let mut diagonals = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
        for j in 0..n {
            let row = &shifted[j * n..(j + 1) * n];
            let swapped = &transposed[j * n..(j + 1) * n];
            let out = &mut diagonals[n - 1 - j..2 * n - 1 - j];
            for ((o, a), b) in out.iter_mut().zip(row).zip(swapped) {
                *o += a * b.conj();
            }
        }
        Ok(SwapProfile { step: h, n, diagonals })
    }

    /// `Σ A'(s,i)·A'*(i,s)·h²` at the given idler delay.
    pub fn overlap(&self, arm_delay: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, self.step * arm_delay);
        let first = -(self.n as f64 - 1.0);
        let mut phasor = Complex64::from_polar(1.0, first * self.step * arm_delay);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in self.diagonals.iter().enumerate() {
            if k % 64 == 0 {
                phasor = Complex64::from_polar(1.0, (first + k as f64) * self.step * arm_delay);
            }
            acc += c * phasor;
            phasor *= rot;
        }
        acc * self.step * self.step
    }

    pub fn coincidence(&self, arm_delay: f64) -> f64 {
        (0.5 * (1.0 - self.overlap(arm_delay).re)).clamp(0.0, 1.0)
    }
}

/// `A(s, i − δμ)` by a Fourier shift along every row.
fn shift_idler(jsa: &JsaGrid, arm_shift: f64) -> Result<Vec<Complex64>> {
    let n = jsa.axes.len();
    let h = jsa.axes.step();
    let samples = arm_shift / h;
    if samples.abs() >= n as f64 {
        return Err(Error::ShiftExceedsGrid { shift: arm_shift });
    }
    let reach = samples.abs().ceil() as usize;
    let wrapped: f64 = (0..n)
        .flat_map(|j| {
            let cols: Box<dyn Iterator<Item = usize>> = if samples > 0.0 {
                Box::new(n - reach..n)
            } else {
                Box::new(0..reach)
            };
            cols.map(move |k| jsa.get(j, k).norm_sqr())
        })
        .sum::<f64>()
        * h
        * h;
    if wrapped > WRAP_TOLERANCE * jsa.norm_sqr() {
        return Err(Error::ShiftExceedsGrid { shift: arm_shift });
    }

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let ramp: Vec<Complex64> = (0..n)
        .map(|m| {
            let freq = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
            Complex64::from_polar(1.0 / n as f64, -2.0 * std::f64::consts::PI * freq * samples / n as f64)
        })
        .collect();
    let mut out = jsa.amplitude.clone();
    out.par_chunks_mut(n).for_each(|row| {
        forward.process(row);
        for (v, r) in row.iter_mut().zip(&ramp) {
            *v *= r;
        }
        inverse.process(row);
    });
    Ok(out)
}

/// Coincidence probability of the interferometer route.
pub fn hom_coincidence(jsa: &JsaGrid, setting: &HomSetting) -> Result<f64> {
    if setting.route != HomRoute::Interferometer {
        return Err(Error::InvalidParameter {
            name: "route",
            reason: "a JSA alone can only be measured through the interferometer route; use pump_engineered_coincidence".into(),
        });
    }
    Ok(SwapProfile::new(jsa, setting.arm_shift)?.coincidence(setting.arm_delay))
}

/// Coincidence surface over (delay, shift); delays along the τ axis of the result.
pub fn coincidence_surface(jsa: &JsaGrid, delays: &Axis, shifts: &Axis) -> Result<RealGrid2D> {
    let columns: Vec<Vec<f64>> = (0..shifts.len)
        .into_par_iter()
        .map(|iw| {
            let profile = SwapProfile::new(jsa, shifts.value(iw))?;
            Ok(delays.values().map(|t| profile.coincidence(t)).collect())
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; delays.len * shifts.len];
    for (iw, col) in columns.iter().enumerate() {
        for (it, v) in col.iter().enumerate() {
            values[it * shifts.len + iw] = *v;
        }
    }
    RealGrid2D::new(*delays, *shifts, values)
}

/// Beams whose state has Wigner function `W(τ − dtau, Ω − domega)`.
///
/// Every beam is translated by `v̄_g·dtau` (carrier phase included) and
/// re-tilted so that its own detuning moves by exactly `domega`; its waist is
/// rescaled to keep the projected spot size.
pub fn displace_beams(beams: &[BeamSpec], device: &DeviceParams, dtau: f64, domega: f64) -> Result<Vec<BeamSpec>> {
    let dz = dtau * device.group_velocity;
    let dsin = domega / (device.group_velocity * device.pump_wavenumber());
    beams
        .iter()
        .map(|b| {
            let moved = b.translated(dz, device);
            let theta = moved.incidence_angle(device);
            let target = theta.sin() + dsin;
            if target.abs() >= 1.0 {
                return Err(Error::AngleOutOfRange {
                    delta_theta: f64::NAN,
                    limit: SMALL_ANGLE_CUTOFF,
                });
            }
            let new_theta = target.asin();
            let tilt = new_theta - device.theta_deg;
            if tilt.abs() >= SMALL_ANGLE_CUTOFF {
                return Err(Error::AngleOutOfRange {
                    delta_theta: tilt,
                    limit: SMALL_ANGLE_CUTOFF,
                });
            }
            let waist = moved.waist * new_theta.cos() / theta.cos();
            let limit = device.length / 2.0 - 2.0 * waist;
            if moved.position.abs() > limit {
                return Err(Error::BeamLeavesDevice {
                    position: moved.position,
                    limit,
                });
            }
            Ok(BeamSpec { tilt, waist, ..moved })
        })
        .collect()
}

/// Coincidence at zero interferometer displacement for a pump displaced so
/// that it reproduces the interferometer setting `(arm_delay, arm_shift)`.
pub fn pump_engineered_coincidence(scenario: &Scenario, axes: &JsaAxes, route: Route, arm_delay: f64, arm_shift: f64) -> Result<f64> {
    let beams = displace_beams(&scenario.beams, &scenario.device, -arm_delay / 2.0, -arm_shift)?;
    zero_displacement_coincidence(scenario, &beams, axes, route)
}

fn zero_displacement_coincidence(scenario: &Scenario, beams: &[BeamSpec], axes: &JsaAxes, route: Route) -> Result<f64> {
    let (f_plus, f_minus) = jsa_factors(beams, &scenario.device, &scenario.pulse, axes, route)?;
    let overlap = factorized_swap_overlap(&f_plus, &f_minus)?;
    Ok((0.5 * (1.0 - overlap)).clamp(0.0, 1.0))
}

/// Normalized swap overlap `Σ A(j,k)·A*(k,j) / Σ|A|²` of `A = f₊[j+k]·f₋[j−k+n−1]`
/// on the n×n grid, without forming `A`: both sums depend on `j+k` only
/// through `|f₊|²`, summed here per difference index.
pub fn factorized_swap_overlap(f_plus: &[Complex64], f_minus: &[Complex64]) -> Result<f64> {
    let n = f_plus.len().div_ceil(2);
    let p2: Vec<f64> = f_plus.iter().map(|v| v.norm_sqr()).collect();
    // band[d] = Σ |f₊[u]|² over u = |d|, |d|+2, …, 2n−2−|d|
    let mut band = vec![0.0; n];
    for d in (0..n).rev() {
        let inner = if d + 2 < n { band[d + 2] } else { 0.0 };
        band[d] = if d == n - 1 { p2[d] } else { inner + p2[d] + p2[2 * n - 2 - d] };
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for d in -(n as i64 - 1)..n as i64 {
        let b = band[d.unsigned_abs() as usize];
        let a = f_minus[(n as i64 - 1 + d) as usize];
        num += b * a * f_minus[(n as i64 - 1 - d) as usize].conj();
        den += b * a.norm_sqr();
    }
    if !(den > 0.0 && den.is_finite()) {
        return Err(Error::RejectedValue {
            what: "joint spectral amplitude (zero or non-finite norm)".into(),
        });
    }
    Ok(num.re / den)
}

/// Affine link `1 − 2P_c = gain·W(δτ/2 + tau_offset, δμ + omega_offset)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomCalibration {
    pub gain: f64,
    pub tau_offset: f64,
    pub omega_offset: f64,
}

impl HomCalibration {
    /// Fit from three coincidences of a centered Gaussian reference of width
    /// `width`: at `(0, 0)`, `(delay_step, 0)` and `(0, shift_step)`.
    pub fn from_points(width: f64, delay_step: f64, shift_step: f64, p: [f64; 3]) -> Result<Self> {
        let y = p.map(|v| 1.0 - 2.0 * v);
        if y.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "calibration",
                reason: format!("reference coincidences {p:?} leave no visibility"),
            });
        }
        let l = y.map(f64::ln);
        let w2 = width * width;
        let tau_offset = (2.0 * (l[0] - l[1]) / w2 - delay_step * delay_step / 4.0) / delay_step;
        let omega_offset = ((w2 / 2.0) * (l[0] - l[2]) - shift_step * shift_step) / (2.0 * shift_step);
        let reference = (-2.0 * omega_offset * omega_offset / w2).exp() * (-tau_offset * tau_offset * w2 / 2.0).exp();
        Ok(HomCalibration {
            gain: y[0] / reference,
            tau_offset,
            omega_offset,
        })
    }

    /// Calibrate on a single centered beam with the scenario's first waist,
    /// sampled exactly like the measurements it will serve.
    pub fn measure(scenario: &Scenario, axes: &JsaAxes, route: Route) -> Result<Self> {
        let waist = scenario.beams[0].waist;
        let reference = BeamSpec::new(0.0, 0.0, waist, Complex64::new(1.0, 0.0))?;
        let width = reference.spectral_width(&scenario.device);
        let (delay_step, shift_step) = (2.0 / width, width / 2.0);
        let jsa = assemble_jsa_from(&[reference], &scenario.device, &scenario.pulse, axes, route)?;
        let centered = SwapProfile::new(&jsa, 0.0)?;
        let shifted = SwapProfile::new(&jsa, shift_step)?;
        let p = [centered.coincidence(0.0), centered.coincidence(delay_step), shifted.coincidence(0.0)];
        HomCalibration::from_points(width, delay_step, shift_step, p)
    }

    /// Predicted coincidence for a setting, given any Wigner evaluator.
    pub fn predict(&self, wigner: impl Fn(f64, f64) -> f64, arm_delay: f64, arm_shift: f64) -> f64 {
        0.5 * (1.0 - self.gain * wigner(arm_delay / 2.0 + self.tau_offset, arm_shift + self.omega_offset))
    }
}

/// `½[1 − gain·W(point)]`, clamped to [0, 1]; the flag reports clamping.
pub fn coincidence_from_wigner(w: &RealGrid2D, point: PhaseSpacePoint, gain: f64) -> Result<(f64, bool)> {
    let value = w.interpolate(point.tau, point.omega_minus).ok_or(Error::PointOffGrid {
        tau: point.tau,
        omega: point.omega_minus,
    })?;
    let p = 0.5 * (1.0 - gain * value);
    let clamped = p.clamp(0.0, 1.0);
    Ok((clamped, clamped != p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TomographyResult {
    pub reconstructed: RealGrid2D,
    pub direct: RealGrid2D,
    /// Row-major like the grids; false where a displaced beam would leave the device.
    pub valid: Vec<bool>,
    pub invalid_count: usize,
    pub affine_gain: f64,
    pub tau_offset: f64,
    pub omega_offset: f64,
    pub max_abs_error: f64,
    pub rms_error: f64,
    pub peak: f64,
}

/// JSA axes wide enough for every displaced state of a scan.
pub fn tomography_jsa_axes(scenario: &Scenario, omega_targets: &Axis) -> Result<JsaAxes> {
    let reach = omega_targets.start.abs().max(omega_targets.end().abs());
    let g = &scenario.grids;
    let step = 2.0 * g.omega_minus_halfspan / (g.omega_minus_points - 1) as f64;
    JsaAxes::covering(
        scenario.device.pump_center_omega / 2.0,
        g.omega_minus_halfspan + reach,
        8.0 / scenario.pulse.duration,
        0.0,
        step,
    )
}

/// Reconstruct `W(τ*, Ω*)` on the target grid from zero-displacement
/// coincidences of displaced pumps, and compare with the direct transform.
pub fn tomography_scan(scenario: &Scenario, tau_targets: &Axis, omega_targets: &Axis, route: Route) -> Result<TomographyResult> {
    let axes = tomography_jsa_axes(scenario, omega_targets)?;
    let calibration = HomCalibration::measure(scenario, &axes, route)?;

    let g = &scenario.grids;
    let f_axis = Axis::symmetric(g.omega_minus_halfspan, g.omega_minus_points)?;
    let f = f_minus(&scenario.beams, &scenario.device, &f_axis, route)?;
    let direct = wigner_transform(&f, tau_targets, omega_targets)?;

    let nw = omega_targets.len;
    let targets: Vec<(usize, usize)> = (0..tau_targets.len).flat_map(|it| (0..nw).map(move |iw| (it, iw))).collect();
    let samples: Vec<Option<f64>> = targets
        .par_iter()
        .map(|&(it, iw)| {
            let dtau = calibration.tau_offset - tau_targets.value(it);
            let domega = calibration.omega_offset - omega_targets.value(iw);
            let beams = match displace_beams(&scenario.beams, &scenario.device, dtau, domega) {
                Ok(b) => b,
                Err(Error::BeamLeavesDevice { .. } | Error::AngleOutOfRange { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            let p = zero_displacement_coincidence(scenario, &beams, &axes, route)?;
            Ok(Some((1.0 - 2.0 * p) / calibration.gain))
        })
        .collect::<Result<_>>()?;

    let valid: Vec<bool> = samples.iter().map(Option::is_some).collect();
    let values: Vec<f64> = samples.iter().map(|s| s.unwrap_or(0.0)).collect();
    let reconstructed = RealGrid2D::new(*tau_targets, *omega_targets, values)?;

    let mut max_abs_error = 0.0f64;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for (k, ok) in valid.iter().enumerate() {
        if *ok {
            let e = (reconstructed.values[k] - direct.values[k]).abs();
            max_abs_error = max_abs_error.max(e);
            sum_sq += e * e;
            count += 1;
        }
    }
    let rms_error = if count > 0 { (sum_sq / count as f64).sqrt() } else { 0.0 };
    Ok(TomographyResult {
        peak: direct.max_abs(),
        reconstructed,
        direct,
        invalid_count: valid.len() - count,
        valid,
        affine_gain: calibration.gain,
        tau_offset: calibration.tau_offset,
        omega_offset: calibration.omega_offset,
        max_abs_error,
        rms_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_scenario;
    use crate::device::arcmin_to_rad;
    use crate::wigner::{wigner_gaussian_oracle, MultibeamWigner};

    const SINGLE: &str = "[device]\nlength_mm = 2\ntheta_deg_arcmin = 9.37\n[pulse]\nwavelength_nm = 775\nduration_ps = 3.2\n[beam]\nwaist_um = 200\n";

    fn jsa_for(s: &Scenario, margin: f64) -> JsaGrid {
        let axes = JsaAxes::for_scenario(s, margin).unwrap();
        assemble_jsa_from(&s.beams, &s.device, &s.pulse, &axes, Route::Finite).unwrap()
    }

    #[test]
    fn symmetric_state_bunches() {
        let s = parse_scenario(SINGLE).unwrap();
        let jsa = jsa_for(&s, 0.0);
        let p0 = hom_coincidence(&jsa, &HomSetting::interferometer(0.0, 0.0).unwrap()).unwrap();
        assert!(p0 <= 1e-6, "{p0}");
        let width = s.beams[0].spectral_width(&s.device);
        let far = hom_coincidence(&jsa, &HomSetting::interferometer(10.0 / width, 0.0).unwrap()).unwrap();
        assert!((far - 0.5).abs() < 1e-3, "{far}");
    }

    #[test]
    fn surface_follows_wigner() {
        let s = parse_scenario(SINGLE).unwrap();
        let b = &s.beams[0];
        let width = b.spectral_width(&s.device);
        let jsa = jsa_for(&s, 2.0 * width);
        let profile = SwapProfile::new(&jsa, 0.7 * width).unwrap();
        for t in [-2.0 / width, 0.0, 0.9 / width] {
            let w = wigner_gaussian_oracle(b, &s.device, t / 2.0, 0.7 * width);
            assert!((profile.coincidence(t) - 0.5 * (1.0 - w)).abs() < 1e-8);
        }
    }

    #[test]
    fn calibration_recovers_ideal_constants() {
        let s = parse_scenario(SINGLE).unwrap();
        let axes = JsaAxes::for_scenario(&s, 1e12).unwrap();
        let c = HomCalibration::measure(&s, &axes, Route::Finite).unwrap();
        assert!((c.gain - 1.0).abs() < 1e-8, "{c:?}");
        assert!(c.tau_offset.abs() < 1e-20 && c.omega_offset.abs() < 1e2, "{c:?}");
    }

    #[test]
    fn calibration_inverts_synthetic_points() {
        let width = 2.0;
        let (g, t, w) = (0.8, 0.05, -0.1);
        let model = |dt: f64, dm: f64| {
            let (a, b) = (dt / 2.0 + t, dm + w);
            0.5 * (1.0 - g * (-2.0 * b * b / (width * width)).exp() * (-a * a * width * width / 2.0).exp())
        };
        let (d1, m1) = (2.0 / width, width / 2.0);
        let c = HomCalibration::from_points(width, d1, m1, [model(0.0, 0.0), model(d1, 0.0), model(0.0, m1)]).unwrap();
        assert!((c.gain - g).abs() < 1e-12 && (c.tau_offset - t).abs() < 1e-12 && (c.omega_offset - w).abs() < 1e-12);
    }

    #[test]
    fn shift_off_grid_is_rejected() {
        let s = parse_scenario(SINGLE).unwrap();
        let jsa = jsa_for(&s, 0.0);
        let span = jsa.axes.step() * jsa.axes.len() as f64;
        assert!(matches!(SwapProfile::new(&jsa, 0.6 * span), Err(Error::ShiftExceedsGrid { .. })));
    }

    #[test]
    fn cat_midpoint_antibunches() {
        let text = SINGLE.replace("[beam]\nwaist_um = 200\n", "[beam]\nposition_mm = 0.5\nwaist_um = 200\n[beam]\nposition_mm = -0.5\nwaist_um = 200\nphase_rad = 3.141592653589793\n");
        let s = parse_scenario(&text).unwrap();
        let jsa = jsa_for(&s, 0.0);
        let p = SwapProfile::new(&jsa, 0.0).unwrap().coincidence(0.0);
        let w = MultibeamWigner::new(&s.beams, &s.device).unwrap().eval(0.0, 0.0);
        assert!(w < 0.0);
        assert!(p > 0.5 && (p - 0.5 * (1.0 - w)).abs() < 1e-8, "{p} {w}");
    }

    #[test]
    fn displaced_beams_shift_the_oracle() {
        let s = parse_scenario(SINGLE).unwrap();
        let beams = vec![
            BeamSpec::new(0.2e-3, arcmin_to_rad(9.37), 200e-6, Complex64::new(1.0, 0.0)).unwrap(),
            BeamSpec::new(-0.2e-3, arcmin_to_rad(-9.37), 200e-6, Complex64::new(0.0, 1.0)).unwrap(),
        ];
        let (dt, dw) = (1.3e-12, -0.8e12);
        let moved = displace_beams(&beams, &s.device, dt, dw).unwrap();
        for (b, orig) in moved.iter().zip(&beams) {
            assert!((b.spectral_width(&s.device) / orig.spectral_width(&s.device) - 1.0).abs() < 1e-12);
        }
        let a = crate::biphoton::GaussianComponent::from_beam(&beams[0], &s.device);
        let b = crate::biphoton::GaussianComponent::from_beam(&moved[0], &s.device);
        for w in [-1e12, 0.0, 2e12] {
            let expect = a.eval(w - dw) * Complex64::from_polar(1.0, (w - dw) * dt);
            let got = b.eval(w);
            assert!((expect - got).norm() < 1e-9 * a.coef.norm(), "{expect} {got}");
        }
        assert!(matches!(
            displace_beams(&beams, &s.device, 10e-12, 0.0),
            Err(Error::BeamLeavesDevice { .. })
        ));
    }

    #[test]
    fn factorized_overlap_matches_full_grid() {
        let text = SINGLE.replace("[beam]\nwaist_um = 200\n", "[beam]\nposition_mm = 0.3\ntilt_arcmin = 4\nwaist_um = 200\n[beam]\nposition_mm = -0.2\nwaist_um = 200\nphase_rad = 1\n");
        let s = parse_scenario(&text).unwrap();
        let axes = JsaAxes::for_scenario(&s, 0.0).unwrap();
        let jsa = assemble_jsa_from(&s.beams, &s.device, &s.pulse, &axes, Route::Finite).unwrap();
        let full = SwapProfile::new(&jsa, 0.0).unwrap().coincidence(0.0);
        let fast = zero_displacement_coincidence(&s, &s.beams, &axes, Route::Finite).unwrap();
        assert!((full - fast).abs() < 1e-13, "{full} {fast}");
    }

    #[test]
    fn from_wigner_flags_clamping() {
        let a = Axis::symmetric(1.0, 3).unwrap();
        let w = RealGrid2D::from_fn(a, a, |_, _| -3.0);
        let (p, clamped) = coincidence_from_wigner(&w, PhaseSpacePoint::new(0.0, 0.0).unwrap(), 1.0).unwrap();
        assert_eq!((p, clamped), (1.0, true));
        let z = RealGrid2D::from_fn(a, a, |_, _| 0.0);
        assert_eq!(coincidence_from_wigner(&z, PhaseSpacePoint::new(0.5, 0.5).unwrap(), 1.0).unwrap(), (0.5, false));
        assert!(matches!(
            coincidence_from_wigner(&z, PhaseSpacePoint::new(2.0, 0.0).unwrap(), 1.0),
            Err(Error::PointOffGrid { .. })
        ));
    }
}
