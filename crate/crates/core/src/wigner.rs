//! Chronocyclic Wigner function of the phase-matching amplitude.
//!
//! `W(τ, Ω) = ∫ f₋(Ω−ω)·f₋*(Ω+ω)·exp(2iτω) dω`
//!
//! With `∫|f₋|² = 1` a single Gaussian beam has peak value 1, the marginals are
//! `∫W dτ = π|f₋(Ω)|²` and `∫W dΩ = π|F(τ)|²`, and the total volume is π.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::biphoton::GaussianComponent;
use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::grid::{Axis, RealGrid2D, SampledComplexFunction};
use crate::pump::BeamSpec;

const RESIDUE_LIMIT: f64 = 1e-10;
const HALF_GRID_TOL: f64 = 1e-6;

/// Wigner function of a sampled amplitude on the (τ, Ω) grid.
///
/// Ω nodes that fall on the half-integer lattice of the amplitude's axis use
/// the exact discrete pair sum; other nodes interpolate the amplitude linearly.
pub fn wigner_transform(f: &SampledComplexFunction, tau: &Axis, omega: &Axis) -> Result<RealGrid2D> {
    let (w, residue) = wigner_with_residue(f, tau, omega)?;
    let scale = w.max_abs();
    if residue > RESIDUE_LIMIT * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidueTooLarge { residue, scale });
    }
    Ok(w)
}

/// Real part of the Wigner sum and the largest imaginary part left over.
pub fn wigner_with_residue(f: &SampledComplexFunction, tau: &Axis, omega: &Axis) -> Result<(RealGrid2D, f64)> {
    let fa = f.axis;
    for w in [omega.start, omega.end()] {
        if w < fa.start - 1e-9 * fa.step || w > fa.end() + 1e-9 * fa.step {
            return Err(Error::SupportExceeded {
                value: w,
                min: fa.start,
                max: fa.end(),
            });
        }
    }
    let columns: Vec<(Vec<f64>, f64)> = (0..omega.len)
        .into_par_iter()
        .map(|iw| column(f, tau, omega.value(iw)))
        .collect();

    let mut residue = 0.0f64;
    let mut values = vec![0.0; tau.len * omega.len];
    for (iw, (col, res)) in columns.iter().enumerate() {
        residue = residue.max(*res);
        for (it, v) in col.iter().enumerate() {
            values[it * omega.len + iw] = *v;
        }
    }
    Ok((RealGrid2D::new(*tau, *omega, values)?, residue))
}

/// One Ω column: (real values over τ, largest imaginary residue).
fn column(f: &SampledComplexFunction, tau: &Axis, big_omega: f64) -> (Vec<f64>, f64) {
    let fa = f.axis;
    let h = fa.step;
    let m_frac = 2.0 * fa.position(big_omega);
    let m_round = m_frac.round();
    let on_lattice = (m_frac - m_round).abs() < HALF_GRID_TOL && m_round >= 0.0;
    // pairs[k] multiplies exp(iτ·(first + k·step)) and the sum is weighted by dw
    let (pairs, first, step, dw): (Vec<Complex64>, f64, f64, f64) = if on_lattice {
        let m = m_round as i64;
        let n = fa.len as i64;
        let i_hi = m.min(n - 1);
        let i_lo = (m - (n - 1)).max(0);
        // i descending so that (j − i) increases
        let pairs = (i_lo..=i_hi)
            .rev()
            .map(|i| f.values[i as usize] * f.values[(m - i) as usize].conj())
            .collect();
        (pairs, (m - 2 * i_hi) as f64 * h, 2.0 * h, h)
    } else {
        let max_offset = (big_omega - fa.start).min(fa.end() - big_omega).max(0.0);
        let kmax = (max_offset / (h / 2.0)).floor() as i64;
        let pairs = (-kmax..=kmax)
            .map(|k| {
                let w = k as f64 * h / 2.0;
                f.interpolate(big_omega - w) * f.interpolate(big_omega + w).conj()
            })
            .collect();
        (pairs, -(kmax as f64) * h, h, h / 2.0)
    };

    let mut out = Vec::with_capacity(tau.len);
    let mut residue = 0.0f64;
    for t in tau.values() {
        let rot = Complex64::from_polar(1.0, t * step);
        let mut phasor = Complex64::from_polar(1.0, t * first);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, p) in pairs.iter().enumerate() {
            if k % 64 == 0 {
                phasor = Complex64::from_polar(1.0, t * (first + k as f64 * step));
            }
            acc += p * phasor;
            phasor *= rot;
        }
        acc *= dw;
        residue = residue.max(acc.im.abs());
        out.push(acc.re);
    }
    (out, residue)
}

/// Closed-form Wigner function of one normalized Gaussian beam.
pub fn wigner_gaussian_oracle(beam: &BeamSpec, device: &DeviceParams, tau: f64, omega: f64) -> f64 {
    let width = beam.spectral_width(device);
    let dw = omega - beam.center_detuning(device);
    let dt = tau - beam.delay(device);
    (-2.0 * dw * dw / (width * width)).exp() * (-dt * dt * width * width / 2.0).exp()
}

/// Closed-form Wigner function of a superposition of Gaussian beams with a common waist.
#[derive(Debug, Clone)]
pub struct MultibeamWigner {
    components: Vec<GaussianComponent>,
    norm: f64,
}

impl MultibeamWigner {
    pub fn new(beams: &[BeamSpec], device: &DeviceParams) -> Result<Self> {
        if let Some(first) = beams.first() {
            if let Some(other) = beams.iter().find(|b| b.waist != first.waist) {
                return Err(Error::WaistMismatch {
                    a: first.waist,
                    b: other.waist,
                });
            }
        }
        let components: Vec<GaussianComponent> = beams.iter().map(|b| GaussianComponent::from_beam(b, device)).collect();
        let norm: f64 = components
            .iter()
            .flat_map(|a| components.iter().map(move |b| a.inner(b).re))
            .sum();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter {
                name: "beams",
                reason: "superposition has zero norm".into(),
            });
        }
        Ok(MultibeamWigner { components, norm })
    }

    pub fn eval(&self, tau: f64, omega: f64) -> f64 {
        let mut total = 0.0;
        for a in &self.components {
            for b in &self.components {
                total += a.cross_wigner(b, tau, omega).re;
            }
        }
        total / self.norm
    }

    pub fn grid(&self, tau: &Axis, omega: &Axis) -> RealGrid2D {
        RealGrid2D::from_fn(*tau, *omega, |t, w| self.eval(t, w))
    }
}

pub fn wigner_multibeam_oracle(beams: &[BeamSpec], device: &DeviceParams, tau: f64, omega: f64) -> Result<f64> {
    Ok(MultibeamWigner::new(beams, device)?.eval(tau, omega))
}

/// `n`-point Ω axis around `center` whose nodes all sit on the exact
/// half-step lattice of `f_axis`, with a step close to `2·halfspan/(n−1)`.
/// The axis is symmetric about `center` when that is compatible with the
/// lattice and otherwise off by a quarter of the amplitude step.
pub fn snapped_omega_axis(f_axis: &Axis, center: f64, halfspan: f64, n: usize) -> Result<Axis> {
    if n < 2 {
        return Axis::new(snap(f_axis, center), f_axis.step, 1);
    }
    let unit = f_axis.step / 2.0;
    let raw = 2.0 * halfspan / (n - 1) as f64;
    let step = (raw / unit).round().max(1.0) * unit;
    let start = snap(f_axis, center - step * (n - 1) as f64 / 2.0);
    Axis::new(start, step, n)
}

fn snap(f_axis: &Axis, x: f64) -> f64 {
    let half = f_axis.step / 2.0;
    f_axis.start + ((x - f_axis.start) / half).round() * half
}

/// `∫W dτ` for every Ω node.
pub fn marginal_over_tau(w: &RealGrid2D) -> Vec<f64> {
    (0..w.omega.len)
        .map(|iw| (0..w.tau.len).map(|it| w.get(it, iw)).sum::<f64>() * w.tau.step)
        .collect()
}

/// `∫W dΩ` for every τ node.
pub fn marginal_over_omega(w: &RealGrid2D) -> Vec<f64> {
    (0..w.tau.len)
        .map(|it| (0..w.omega.len).map(|iw| w.get(it, iw)).sum::<f64>() * w.omega.step)
        .collect()
}

/// `∬W dτ dΩ`.
pub fn volume(w: &RealGrid2D) -> f64 {
    w.values.iter().sum::<f64>() * w.tau.step * w.omega.step
}

/// A local maximum of the smoothed Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub tau: f64,
    pub omega: f64,
    pub value: f64,
}

/// Summary numbers of a sampled Wigner function.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMetrics {
    /// Peaks in descending order of height.
    pub peaks: Vec<Peak>,
    pub max_value: f64,
    /// 1/e half-widths through the global maximum.
    pub tau_width: Option<f64>,
    pub omega_width: Option<f64>,
    pub negativity_volume: f64,
    pub min_value: f64,
    /// Oscillation period along Ω of the central τ row.
    pub fringe_period_omega: Option<f64>,
    /// Oscillation period along τ of the central Ω column.
    pub fringe_period_tau: Option<f64>,
}

/// Peaks, widths, negativity and fringe periods of `w`.
///
/// Peaks are found on a copy smoothed with a minimum-uncertainty Gaussian
/// (so interference fringes do not count as peaks) and reported where the
/// smoothed map exceeds half of its maximum.
pub fn wigner_metrics(w: &RealGrid2D) -> Result<WignerMetrics> {
    let max_value = w.max();
    if !(max_value > 0.0) {
        return Err(Error::NoPeaks);
    }
    let smooth = husimi(w);
    let peaks = find_peaks(&smooth, w);
    if peaks.is_empty() {
        return Err(Error::NoPeaks);
    }
    let (it, iw) = w.argmax();
    let tau_line: Vec<f64> = (0..w.tau.len).map(|k| w.get(k, iw)).collect();
    let omega_line: Vec<f64> = (0..w.omega.len).map(|k| w.get(it, k)).collect();
    let min_value = w.values.iter().copied().fold(f64::INFINITY, f64::min);
    let negativity_volume = -w.values.iter().map(|v| v.min(0.0)).sum::<f64>() * w.tau.step * w.omega.step;

    let row: Vec<f64> = (0..w.omega.len).map(|k| w.get(w.tau.len / 2, k)).collect();
    let col: Vec<f64> = (0..w.tau.len).map(|k| w.get(k, w.omega.len / 2)).collect();
    Ok(WignerMetrics {
        peaks,
        max_value,
        tau_width: half_width(&tau_line, it, w.tau.step),
        omega_width: half_width(&omega_line, iw, w.omega.step),
        negativity_volume,
        min_value,
        fringe_period_omega: fringe_period(&row, w.omega.step),
        fringe_period_tau: fringe_period(&col, w.tau.step),
    })
}

fn gaussian_kernel(step: f64, sigma_sq_inv: f64, len: usize) -> Vec<f64> {
    // exp(−x²·sigma_sq_inv), truncated where it drops below 1e-12
    let reach = ((27.6 / sigma_sq_inv).sqrt() / step).ceil() as usize;
    let reach = reach.min(len);
    (0..=2 * reach)
        .map(|k| {
            let x = (k as f64 - reach as f64) * step;
            (-x * x * sigma_sq_inv).exp()
        })
        .collect()
}

fn convolve(line: &[f64], kernel: &[f64]) -> Vec<f64> {
    let reach = kernel.len() / 2;
    (0..line.len())
        .map(|i| {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                let j = i as i64 + k as i64 - reach as i64;
                if j >= 0 && (j as usize) < line.len() {
                    acc += line[j as usize] * kv;
                }
            }
            acc
        })
        .collect()
}

fn husimi(w: &RealGrid2D) -> RealGrid2D {
    let span_omega = w.omega.end() - w.omega.start;
    let span_tau = w.tau.end() - w.tau.start;
    let d2 = if span_tau > 0.0 && span_omega > 0.0 {
        2.0 * span_omega / span_tau
    } else {
        1.0
    };
    let k_omega = gaussian_kernel(w.omega.step, 2.0 / d2, w.omega.len);
    let k_tau = gaussian_kernel(w.tau.step, d2 / 2.0, w.tau.len);
    let (nt, nw) = (w.tau.len, w.omega.len);
    let mut rows = Vec::with_capacity(nt * nw);
    for it in 0..nt {
        rows.extend(convolve(&w.values[it * nw..(it + 1) * nw], &k_omega));
    }
    let mut out = vec![0.0; nt * nw];
    for iw in 0..nw {
        let col: Vec<f64> = (0..nt).map(|it| rows[it * nw + iw]).collect();
        for (it, v) in convolve(&col, &k_tau).into_iter().enumerate() {
            out[it * nw + iw] = v;
        }
    }
    RealGrid2D {
        tau: w.tau,
        omega: w.omega,
        values: out,
    }
}

fn parabola_offset(a: f64, b: f64, c: f64) -> f64 {
    let denom = a - 2.0 * b + c;
    if denom.abs() > 0.0 {
        (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    }
}

fn find_peaks(smooth: &RealGrid2D, raw: &RealGrid2D) -> Vec<Peak> {
    let (nt, nw) = (smooth.tau.len, smooth.omega.len);
    let top = smooth.max();
    if !(top > 0.0) {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for it in 0..nt {
        for iw in 0..nw {
            let v = smooth.get(it, iw);
            if v < 0.5 * top {
                continue;
            }
            let mut is_max = true;
            'scan: for dt in -1i64..=1 {
                for dw in -1i64..=1 {
                    if dt == 0 && dw == 0 {
                        continue;
                    }
                    let (jt, jw) = (it as i64 + dt, iw as i64 + dw);
                    if jt < 0 || jw < 0 || jt >= nt as i64 || jw >= nw as i64 {
                        continue;
                    }
                    let u = smooth.get(jt as usize, jw as usize);
                    // ties broken towards the lower index so plateaus yield one peak
                    if u > v || (u == v && (jt, jw) < (it as i64, iw as i64)) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if !is_max {
                continue;
            }
            let ft = if it > 0 && it + 1 < nt {
                parabola_offset(smooth.get(it - 1, iw), v, smooth.get(it + 1, iw))
            } else {
                0.0
            };
            let fw = if iw > 0 && iw + 1 < nw {
                parabola_offset(smooth.get(it, iw - 1), v, smooth.get(it, iw + 1))
            } else {
                0.0
            };
            let tau = smooth.tau.value(it) + ft * smooth.tau.step;
            let omega = smooth.omega.value(iw) + fw * smooth.omega.step;
            peaks.push(Peak {
                tau,
                omega,
                value: raw.interpolate(tau, omega).unwrap_or(raw.get(it, iw)),
            });
        }
    }
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    peaks
}

/// Mean distance from `center` to the 1/e crossings on both sides.
fn half_width(line: &[f64], center: usize, step: f64) -> Option<f64> {
    let peak = line[center];
    let level = peak / std::f64::consts::E;
    let crossing = |dir: i64| -> Option<f64> {
        let mut k = center as i64;
        loop {
            let next = k + dir;
            if next < 0 || next >= line.len() as i64 {
                return None;
            }
            let (a, b) = (line[k as usize], line[next as usize]);
            if b < level {
                let t = (a - level) / (a - b);
                return Some((k - center as i64).abs() as f64 * step + t * step);
            }
            k = next;
        }
    };
    match (crossing(-1), crossing(1)) {
        (Some(l), Some(r)) => Some((l + r) / 2.0),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// Period of the dominant non-DC oscillation of `line`.
pub fn fringe_period(line: &[f64], step: f64) -> Option<f64> {
    let n = line.len();
    if n < 4 {
        return None;
    }
    let padded = (8 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = line.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);
    let mag: Vec<f64> = buf[..=padded / 2].iter().map(|c| c.norm()).collect();
    // leave the DC lobe
    let mut k = 1;
    while k < mag.len() && mag[k] <= mag[k - 1] {
        k += 1;
    }
    if k >= mag.len() - 1 {
        return None;
    }
    let (mut best, mut best_v) = (k, mag[k]);
    for (j, &v) in mag.iter().enumerate().skip(k) {
        if v > best_v {
            best = j;
            best_v = v;
        }
    }
    if best + 1 >= mag.len() || !(best_v > mag[best - 1] && best_v > mag[best + 1]) {
        return None;
    }
    if best_v < 1e-6 * mag[0].max(best_v) {
        return None;
    }
    let bin = best as f64 + parabola_offset(mag[best - 1], best_v, mag[best + 1]);
    Some(padded as f64 * step / bin)
}
