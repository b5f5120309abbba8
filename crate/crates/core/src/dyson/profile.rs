use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result};

/// Radial function sampled at `r_k = k·h`, `k = 0..=K`, with `values[K] = 0`.
///
/// Integrals use the trapezoid rule with `r²` weight; the kinetic term uses
/// forward differences weighted at the cell midpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub h: f64,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(h: f64, values: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Domain(format!(
                "grid spacing must be positive, got {h}"
            )));
        }
        if values.len() < 3 {
            return Err(Error::Domain("profile needs at least 3 grid points".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Invariant {
                index: k,
                reason: "profile values must be finite and nonnegative".into(),
            });
        }
        Ok(Self { h, values })
    }

    /// Samples `f` on `[0, radius]` with `points` cells, forcing `Φ(R) = 0`.
    pub fn sample<F: Fn(f64) -> f64>(radius: f64, points: usize, f: F) -> Result<Self> {
        if points < 2 {
            return Err(Error::Domain("need at least 2 cells".into()));
        }
        let h = radius / points as f64;
        let mut values: Vec<f64> = (0..=points).map(|k| f(k as f64 * h)).collect();
        values[points] = 0.0;
        Self::new(h, values)
    }

    /// Normalized Gaussian `(2a/π)^{3/4} e^{−a r²}`.
    pub fn gaussian(a: f64, radius: f64, points: usize) -> Result<Self> {
        let c = (2.0 * a / PI).powf(0.75);
        Self::sample(radius, points, |r| c * (-a * r * r).exp())
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn radius(&self) -> f64 {
        self.h * self.cells() as f64
    }

    pub fn r(&self, k: usize) -> f64 {
        self.h * k as f64
    }

    /// Quadrature weight of node `k` for `∫ f d³x`.
    pub fn weight(&self, k: usize) -> f64 {
        let r = self.r(k);
        let w = 4.0 * PI * r * r * self.h;
        if k == self.cells() {
            0.5 * w
        } else {
            w
        }
    }

    /// Coupling of nodes `k` and `k+1` in the kinetic form.
    pub fn coupling(&self, k: usize) -> f64 {
        let r = self.r(k) + 0.5 * self.h;
        4.0 * PI * r * r / self.h
    }

    /// `∫ Φ^s d³x`.
    pub fn power_integral(&self, s: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| self.weight(k) * v.powf(s))
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.power_integral(2.0)
    }

    /// `∫ |∇Φ|²`.
    pub fn kinetic(&self) -> f64 {
        self.values
            .windows(2)
            .enumerate()
            .map(|(k, w)| self.coupling(k) * (w[1] - w[0]).powi(2))
            .sum()
    }

    /// `½∫|∇Φ|² − I₀∫Φ^{5/2}`.
    pub fn energy(&self, i0: f64) -> f64 {
        0.5 * self.kinetic() - i0 * self.power_integral(2.5)
    }

    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::Domain("cannot normalize a zero profile".into()));
        }
        let s = m.sqrt().recip();
        Ok(Self {
            h: self.h,
            values: self.values.iter().map(|v| v * s).collect(),
        })
    }

    /// Linear interpolation, zero beyond the grid.
    pub fn value_at(&self, r: f64) -> f64 {
        let x = r.abs() / self.h;
        let k = x.floor() as usize;
        if k >= self.cells() {
            return 0.0;
        }
        let t = x - k as f64;
        (1.0 - t) * self.values[k] + t * self.values[k + 1]
    }

    /// Largest increase `Φ(r_{k+1}) − Φ(r_k)` along the grid.
    pub fn monotonicity_violation(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// `max_{r ≥ 0.9R} Φ / max Φ`.
    pub fn boundary_ratio(&self) -> f64 {
        let peak = self.values.iter().cloned().fold(0.0, f64::max);
        let start = (0.9 * self.cells() as f64).floor() as usize;
        let edge = self.values[start..].iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            edge / peak
        } else {
            0.0
        }
    }
}

/// Closed-form Gaussian values `(T, P)` for `(2a/π)^{3/4}e^{−ar²}`.
pub fn gaussian_integrals(a: f64) -> (f64, f64) {
    let t = 3.0 * a;
    let p = (2.0 * a / PI).powf(15.0 / 8.0) * (2.0 * PI / (5.0 * a)).powf(1.5);
    (t, p)
}

pub fn gaussian_energy(a: f64, i0: f64) -> f64 {
    let (t, p) = gaussian_integrals(a);
    0.5 * t - i0 * p
}

/// Width minimizing the Gaussian energy, and that energy.
pub fn gaussian_optimum(i0: f64) -> (f64, f64) {
    let kappa = (2.0 / PI).powf(15.0 / 8.0) * (2.0 * PI / 5.0).powf(1.5);
    let a = (i0 * kappa / 4.0).powf(1.6);
    (a, gaussian_energy(a, i0))
}

/// Grid version of `φ₀(x) = n^{3/10} Φ(n^{1/5} x)`: spacing `h n^{−1/5}`.
pub fn scale_condensate(profile: &RadialProfile, n: f64) -> Result<RadialProfile> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    let s = n.powf(0.3);
    RadialProfile::new(
        profile.h * n.powf(-0.2),
        profile.values.iter().map(|v| v * s).collect(),
    )
}
