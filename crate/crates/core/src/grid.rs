//! Uniformly sampled axes and the sampled containers built on them.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform axis `start + k·step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl Axis {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite() && start.is_finite()) || len == 0 {
            return Err(Error::InvalidParameter {
                name: "axis",
                reason: format!("need finite start, positive step and at least one point (start={start}, step={step}, len={len})"),
            });
        }
        Ok(Axis { start, step, len })
    }

    /// `len` points spanning `[-halfspan, halfspan]` inclusive.
    pub fn symmetric(halfspan: f64, len: usize) -> Result<Self> {
        if len < 2 || !(halfspan > 0.0) {
            return Err(Error::InvalidParameter {
                name: "axis",
                reason: format!("symmetric axis needs halfspan > 0 and >= 2 points (halfspan={halfspan}, len={len})"),
            });
        }
        Axis::new(-halfspan, 2.0 * halfspan / (len - 1) as f64, len)
    }

    /// Symmetric axis with a prescribed step; for odd `len` the origin is a node.
    pub fn centered(step: f64, len: usize) -> Result<Self> {
        Axis::new(-step * (len as f64 - 1.0) / 2.0, step, len)
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.value(k))
    }

    /// Fractional index of `x`.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.start) / self.step
    }

    /// Index of the node nearest to `x`, if `x` lies within half a step of the axis.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let p = self.position(x).round();
        if p < 0.0 || p > (self.len - 1) as f64 {
            None
        } else {
            Some(p as usize)
        }
    }
}

/// Complex amplitude sampled along one uniform axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledComplexFunction {
    pub axis: Axis,
    pub values: Vec<Complex64>,
}

impl SampledComplexFunction {
    pub fn new(axis: Axis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != axis.len {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("{} samples for an axis of {} points", values.len(), axis.len),
            });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::RejectedValue {
                what: "sampled function".into(),
            });
        }
        Ok(SampledComplexFunction { axis, values })
    }

    pub fn from_fn(axis: Axis, f: impl Fn(f64) -> Complex64) -> Self {
        let values = axis.values().map(f).collect();
        SampledComplexFunction { axis, values }
    }

    /// Riemann approximation of `∫|f|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.axis.step
    }

    /// Scale so that `Σ|f|²·step = 1`. A vanishing function is left untouched.
    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for v in &mut self.values {
                *v /= n;
            }
        }
        self
    }

    /// Linear interpolation, zero outside the sampled window.
    pub fn interpolate(&self, x: f64) -> Complex64 {
        let p = self.axis.position(x);
        let last = (self.axis.len - 1) as f64;
        if !(0.0..=last).contains(&p) {
            return Complex64::new(0.0, 0.0);
        }
        let i = p.floor() as usize;
        if i + 1 >= self.axis.len {
            return self.values[self.axis.len - 1];
        }
        let t = p - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}

/// Real function on a (τ, Ω) grid, stored row-major with τ outer.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid2D {
    pub tau: Axis,
    pub omega: Axis,
    pub values: Vec<f64>,
}

impl RealGrid2D {
    pub fn new(tau: Axis, omega: Axis, values: Vec<f64>) -> Result<Self> {
        if values.len() != tau.len * omega.len {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: format!("{} values for a {}x{} grid", values.len(), tau.len, omega.len),
            });
        }
        Ok(RealGrid2D { tau, omega, values })
    }

    pub fn from_fn(tau: Axis, omega: Axis, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(tau.len * omega.len);
        for t in tau.values() {
            for w in omega.values() {
                values.push(f(t, w));
            }
        }
        RealGrid2D { tau, omega, values }
    }

    #[inline]
    pub fn get(&self, it: usize, iw: usize) -> f64 {
        self.values[it * self.omega.len + iw]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// (τ index, Ω index) of the global maximum.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (k, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = k;
            }
        }
        (best / self.omega.len, best % self.omega.len)
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, tau: f64, omega: f64) -> Option<f64> {
        let pt = self.tau.position(tau);
        let pw = self.omega.position(omega);
        let eps = 1e-9;
        let lt = (self.tau.len - 1) as f64;
        let lw = (self.omega.len - 1) as f64;
        if pt < -eps || pt > lt + eps || pw < -eps || pw > lw + eps {
            return None;
        }
        let pt = pt.clamp(0.0, lt);
        let pw = pw.clamp(0.0, lw);
        let (it, iw) = (pt.floor() as usize, pw.floor() as usize);
        let it1 = (it + 1).min(self.tau.len - 1);
        let iw1 = (iw + 1).min(self.omega.len - 1);
        let (ft, fw) = (pt - it as f64, pw - iw as f64);
        let v = self.get(it, iw) * (1.0 - ft) * (1.0 - fw)
            + self.get(it1, iw) * ft * (1.0 - fw)
            + self.get(it, iw1) * (1.0 - ft) * fw
            + self.get(it1, iw1) * ft * fw;
        Some(v)
    }
}
