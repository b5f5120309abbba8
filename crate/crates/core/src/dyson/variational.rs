use serde::{Deserialize, Serialize};

use super::profile::{gaussian_optimum, RadialProfile};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationalConfig {
    pub radius: f64,
    pub points: usize,
    /// Relative energy change over `window` accepted steps.
    pub tol: f64,
    pub window: usize,
    pub max_iterations: usize,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Allowed `max_{r≥0.9R} Φ / max Φ` at convergence.
    pub boundary_tol: f64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            radius: 60.0,
            points: 2000,
            tol: 1e-10,
            window: 10,
            max_iterations: 20_000,
            initial_step: 1.0,
            max_step: 1e3,
            min_step: 1e-12,
            boundary_tol: 1e-8,
        }
    }
}

impl VariationalConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius", self.radius),
            ("tol", self.tol),
            ("initial_step", self.initial_step),
            ("max_step", self.max_step),
            ("min_step", self.min_step),
            ("boundary_tol", self.boundary_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.points < 10 {
            return Err(Error::Domain("points must be at least 10".into()));
        }
        if self.window == 0 {
            return Err(Error::Domain("window must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationalResult {
    pub profile: RadialProfile,
    /// `A = −(½T − I₀P)`.
    pub a: f64,
    pub energy: f64,
    /// `∫|∇Φ|²`.
    pub kinetic: f64,
    /// `∫Φ^{5/2}`.
    pub potential: f64,
    pub i0: f64,
    pub iterations: usize,
    pub accepted: usize,
    /// `|T − ¾I₀P| / T`.
    pub virial_kinetic: f64,
    /// `|A − ⅝I₀P| / A`.
    pub virial_energy: f64,
    /// Weighted norm of the projected gradient.
    pub stationarity: f64,
    pub boundary_ratio: f64,
    pub monotonicity_violation: f64,
    /// Energies of the accepted iterates, starting with the initial guess.
    pub energy_trace: Vec<f64>,
}

/// Unknowns `Φ_1 … Φ_{K−1}`; `Φ_0 = Φ_1` and `Φ_K = 0`.
struct Grid {
    w: Vec<f64>,
    /// `a[k]` couples unknown `k` and `k+1` (index into the unknown vector).
    a: Vec<f64>,
}

impl Grid {
    fn new(profile: &RadialProfile) -> Self {
        let m = profile.cells() - 1;
        let w = (1..=m).map(|k| profile.weight(k)).collect();
        let a = (1..=m).map(|k| profile.coupling(k)).collect();
        Self { w, a }
    }

    fn len(&self) -> usize {
        self.w.len()
    }

    /// `K Φ` for the stiffness matrix `K`, so that `⟨Φ, KΦ⟩ = ∫|∇Φ|²`.
    fn stiffness(&self, x: &[f64]) -> Vec<f64> {
        let m = self.len();
        (0..m)
            .map(|i| {
                let mut s = self.a[i] * (x[i] - if i + 1 < m { x[i + 1] } else { 0.0 });
                if i > 0 {
                    s += self.a[i - 1] * (x[i] - x[i - 1]);
                }
                s
            })
            .collect()
    }

    fn energy(&self, x: &[f64], i0: f64) -> f64 {
        let kx = self.stiffness(x);
        let t: f64 = x.iter().zip(&kx).map(|(a, b)| a * b).sum();
        let p: f64 = x.iter().zip(&self.w).map(|(v, w)| w * v.powf(2.5)).sum();
        0.5 * t - i0 * p
    }

    fn normalize(&self, x: &mut [f64]) {
        let m: f64 = x.iter().zip(&self.w).map(|(v, w)| w * v * v).sum();
        let s = m.sqrt().recip();
        x.iter_mut().for_each(|v| *v *= s);
    }

    /// Solves `(W + τK) y = rhs` by the Thomas algorithm.
    fn solve_shifted(&self, tau: f64, rhs: &[f64]) -> Vec<f64> {
        let m = self.len();
        let diag: Vec<f64> = (0..m)
            .map(|i| self.w[i] + tau * (self.a[i] + if i > 0 { self.a[i - 1] } else { 0.0 }))
            .collect();
        let off: Vec<f64> = (0..m.saturating_sub(1)).map(|i| -tau * self.a[i]).collect();
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        c[0] = if m > 1 { off[0] / diag[0] } else { 0.0 };
        d[0] = rhs[0] / diag[0];
        for i in 1..m {
            let den = diag[i] - off[i - 1] * c[i - 1];
            if i + 1 < m {
                c[i] = off[i] / den;
            }
            d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / den;
        }
        let mut y = vec![0.0; m];
        y[m - 1] = d[m - 1];
        for i in (0..m - 1).rev() {
            y[i] = d[i] - c[i] * y[i + 1];
        }
        y
    }

    fn to_profile(&self, template: &RadialProfile, x: &[f64]) -> RadialProfile {
        let mut values = Vec::with_capacity(x.len() + 2);
        values.push(x[0]);
        values.extend_from_slice(x);
        values.push(0.0);
        RadialProfile {
            h: template.h,
            values,
        }
    }
}

fn unknowns(profile: &RadialProfile) -> Vec<f64> {
    profile.values[1..profile.cells()].to_vec()
}

/// `∂E/∂Φ_k` for the unknowns `k = 1 … K−1`, with `Φ_0` tied to `Φ_1`.
pub fn discrete_gradient(profile: &RadialProfile, i0: f64) -> Vec<f64> {
    let grid = Grid::new(profile);
    let x = unknowns(profile);
    let kx = grid.stiffness(&x);
    kx.iter()
        .zip(&x)
        .zip(&grid.w)
        .map(|((k, v), w)| k - 2.5 * i0 * w * v.powf(1.5))
        .collect()
}

/// Energy with `Φ_0 = Φ_1` enforced, as seen by the minimizer.
pub fn tied_energy(profile: &RadialProfile, i0: f64) -> f64 {
    Grid::new(profile).energy(&unknowns(profile), i0)
}

/// Minimizes `½∫|∇Φ|² − I₀∫Φ^{5/2}` over radial `Φ ≥ 0` with `∫Φ² = 1`.
///
/// Each step solves `(1 + τL)Φ* = Φ + τ(N(Φ) + μΦ)` with `L = −Δ_h`,
/// `N = (5/2)I₀Φ^{3/2}` and `μ = ⟨Φ, LΦ − N⟩`, then clamps at zero and
/// renormalizes. Steps that raise the energy are retried with `τ/2`.
pub fn minimize_variational(i0: f64, cfg: &VariationalConfig) -> Result<VariationalResult> {
    cfg.validate()?;
    let (a0, _) = gaussian_optimum(i0);
    let init = RadialProfile::gaussian(a0, cfg.radius, cfg.points)?;
    minimize_from(&init, i0, cfg)
}

pub fn minimize_from(
    init: &RadialProfile,
    i0: f64,
    cfg: &VariationalConfig,
) -> Result<VariationalResult> {
    cfg.validate()?;
    if !(i0 > 0.0) {
        return Err(Error::Domain(format!("I0 must be positive, got {i0}")));
    }
    let grid = Grid::new(init);
    let mut x = unknowns(init);
    grid.normalize(&mut x);
    let mut energy = grid.energy(&x, i0);
    let mut trace = vec![energy];
    let mut tau = cfg.initial_step;
    let mut iterations = 0;
    let converged = loop {
        if iterations >= cfg.max_iterations {
            break false;
        }
        iterations += 1;
        let kx = grid.stiffness(&x);
        let nl: Vec<f64> = x.iter().map(|v| 2.5 * i0 * v.powf(1.5)).collect();
        // μ = ⟨Φ, LΦ − N⟩_w with L = W⁻¹K.
        let mu: f64 = (0..x.len())
            .map(|i| x[i] * (kx[i] - grid.w[i] * nl[i]))
            .sum();
        let rhs: Vec<f64> = (0..x.len())
            .map(|i| grid.w[i] * (x[i] + tau * (nl[i] + mu * x[i])))
            .collect();
        let mut y = grid.solve_shifted(tau, &rhs);
        y.iter_mut().for_each(|v| *v = v.max(0.0));
        grid.normalize(&mut y);
        let e = grid.energy(&y, i0);
        if !e.is_finite() {
            return Err(Error::Convergence(
                "non-finite energy during minimization".into(),
            ));
        }
        if e > energy {
            tau *= 0.5;
            if tau < cfg.min_step {
                break false;
            }
            continue;
        }
        x = y;
        energy = e;
        trace.push(e);
        tau = (1.5 * tau).min(cfg.max_step);
        let n = trace.len();
        if n > cfg.window && (trace[n - 1 - cfg.window] - e).abs() < cfg.tol * e.abs() {
            break true;
        }
    };
    if !converged {
        return Err(Error::Convergence(format!(
            "variational minimizer did not converge in {iterations} iterations (step {tau:.3e})"
        )));
    }
    let profile = grid.to_profile(init, &x);
    let boundary_ratio = profile.boundary_ratio();
    if boundary_ratio > cfg.boundary_tol {
        return Err(Error::Infeasible(format!(
            "grid too small: boundary ratio {boundary_ratio:.3e} exceeds {:.1e} at R = {}",
            cfg.boundary_tol, cfg.radius
        )));
    }
    let kinetic = profile.kinetic();
    let potential = profile.power_integral(2.5);
    let a = -(0.5 * kinetic - i0 * potential);
    let grad = discrete_gradient(&profile, i0);
    let mu: f64 = grad.iter().zip(&x).map(|(g, v)| g * v).sum();
    let stationarity = grad
        .iter()
        .zip(&x)
        .zip(&grid.w)
        .map(|((g, v), w)| (g - mu * w * v).powi(2) / w)
        .sum::<f64>()
        .sqrt();
    Ok(VariationalResult {
        a,
        energy: -a,
        kinetic,
        potential,
        i0,
        iterations,
        accepted: trace.len() - 1,
        virial_kinetic: (kinetic - 0.75 * i0 * potential).abs() / kinetic,
        virial_energy: (a - 0.625 * i0 * potential).abs() / a,
        stationarity,
        boundary_ratio,
        monotonicity_violation: profile.monotonicity_violation(),
        energy_trace: trace,
        profile,
    })
}
