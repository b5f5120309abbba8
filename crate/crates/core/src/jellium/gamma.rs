use std::f64::consts::PI;

use serde::Serialize;

use super::profile::EdgeProfile;
use crate::kernels::{g, radial_moments, RadialMoments};
use crate::quad::{integrate_to_infinity, QuadConfig};
use crate::{Error, Result};

/// Momentum scale `(8πρ)^{1/4}` of the pairing symbol.
pub fn momentum_scale(rho: f64) -> f64 {
    (8.0 * PI * rho).powf(0.25)
}

/// `2^{−3/4} π^{−9/4}`.
fn depletion_prefactor() -> f64 {
    2f64.powf(-0.75) * PI.powf(-2.25)
}

/// Smallest `ρ` for which `z₀² ≥ 0` at the cutoff with moment `M0(ε)`.
pub fn feasibility_threshold(m0: f64) -> f64 {
    (depletion_prefactor() * m0).powi(4)
}

/// `γ_ε` through its density and the condensate weight `z₀²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaSymbol {
    pub eps: f64,
    pub rho: f64,
    pub n: f64,
    /// `2^{−3/4} ρ^{−1/4} π^{−9/4} ∫g_ε`, the depleted fraction.
    pub depleted_fraction: f64,
    /// `z₀² = n (1 − depleted_fraction)`.
    pub z0_sq: f64,
    /// `∫ρ_γ = n · depleted_fraction`.
    pub trace_gamma: f64,
    /// `max |z₀²φ₀² + ρ_γ − nφ₀²|` over the sampling grid.
    pub neutrality_residual: f64,
    pub moments: RadialMoments,
}

impl GammaSymbol {
    /// `ρ_γ(x) = n · depleted_fraction · φ₀(x)²`.
    pub fn rho_gamma(&self, phi0_sq: f64) -> f64 {
        self.n * self.depleted_fraction * phi0_sq
    }

    /// `(2π)^{−3}(n/ρ)∫g_ε(p/s) d³p`, the same trace by phase-space scaling.
    pub fn phase_space_trace(&self) -> f64 {
        (2.0 * PI).powi(-3) * self.n / self.rho
            * momentum_scale(self.rho).powi(3)
            * self.moments.m0.value
    }
}

pub fn build_gamma_symbol(profile: &EdgeProfile, eps: f64, samples: usize) -> Result<GammaSymbol> {
    let moments = radial_moments(eps)?;
    build_with_moments(profile, eps, samples, moments)
}

pub(crate) fn build_with_moments(
    profile: &EdgeProfile,
    eps: f64,
    samples: usize,
    moments: RadialMoments,
) -> Result<GammaSymbol> {
    let rho = profile.rho;
    let depleted = depletion_prefactor() * rho.powf(-0.25) * moments.m0.value;
    if depleted > 1.0 {
        return Err(Error::Infeasible(format!(
            "ρ = {rho} is below the feasibility threshold ρ = {:.6e} for ε = {eps}",
            feasibility_threshold(moments.m0.value)
        )));
    }
    let n = profile.n;
    let z0_sq = n * (1.0 - depleted);
    let sym = GammaSymbol {
        eps,
        rho,
        n,
        depleted_fraction: depleted,
        z0_sq,
        trace_gamma: n * depleted,
        neutrality_residual: 0.0,
        moments,
    };
    let m = samples.max(2);
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let x = [i, j, k].map(|v| profile.l * v as f64 / (m - 1) as f64);
                let f2 = profile.phi0(x).powi(2);
                worst = worst.max((z0_sq * f2 + sym.rho_gamma(f2) - n * f2).abs());
            }
        }
    }
    Ok(GammaSymbol {
        neutrality_residual: worst,
        ..sym
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangePair {
    /// `2 (Tr A²)^{1/2} (Tr(−ΔA²))^{1/2}` with phase-space upper bounds.
    pub cauchy_schwarz_hardy_value: f64,
    /// `2 ‖A‖ (Tr γ)^{1/2} (Tr(−Δγ))^{1/2}`-type norm bound.
    pub norm_bound_value: f64,
}

/// Upper bounds on `∬|A(x,y)|²/|x−y|` for `A = γ_ε` and `A = √(γ_ε(γ_ε+1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeBound {
    pub eps: f64,
    /// `sup g_ε = g(ε)`.
    pub norm_gamma: f64,
    pub trace_gamma: f64,
    /// Phase-space bound on `Tr(−Δγ)`.
    pub kinetic_gamma: f64,
    pub gamma: ExchangePair,
    pub pair: ExchangePair,
    /// `norm_bound_value(γ) / (ε⁻² ρ L³)`.
    pub scaled_gamma: f64,
}

fn radial_moment<F: Fn(f64) -> f64>(eps: f64, f: F) -> Result<f64> {
    Ok(integrate_to_infinity(
        |p| 4.0 * PI * p * p * f(p),
        eps,
        QuadConfig::new(1e-11, 1e-11),
    )?
    .value)
}

pub fn exchange_bound(profile: &EdgeProfile, sym: &GammaSymbol) -> Result<ExchangeBound> {
    let eps = sym.eps;
    if !(eps > 0.0) {
        return Err(Error::Divergence(
            "exchange bound needs ε > 0: ‖γ_ε‖ is unbounded at ε = 0".into(),
        ));
    }
    let s = momentum_scale(sym.rho);
    let pre = (2.0 * PI).powi(-3) * sym.n / sym.rho;
    let k0 = profile.kinetic();
    // (2π)^{−3}(n/ρ)∫F(f(p))(p² + ∫|∇φ₀|²) d³p for F = t, t².
    let m0 = sym.moments.m0.value;
    let m2 = sym.moments.m2.value;
    let q0 = radial_moment(eps, |p| g(p).powi(2))?;
    let q2 = radial_moment(eps, |p| (p * g(p)).powi(2))?;
    let tr = pre * s.powi(3) * m0;
    let kin = pre * (s.powi(5) * m2 + k0 * s.powi(3) * m0);
    let tr_sq = pre * s.powi(3) * q0;
    let kin_sq = pre * (s.powi(5) * q2 + k0 * s.powi(3) * q0);
    let norm = g(eps);
    let gamma = ExchangePair {
        cauchy_schwarz_hardy_value: 2.0 * (tr_sq * kin_sq).sqrt(),
        norm_bound_value: 2.0 * norm * (tr * kin).sqrt(),
    };
    let pair = ExchangePair {
        cauchy_schwarz_hardy_value: 2.0 * ((tr_sq + tr) * (kin_sq + kin)).sqrt(),
        norm_bound_value: 2.0 * (norm + 1.0) * (tr * kin).sqrt(),
    };
    Ok(ExchangeBound {
        eps,
        norm_gamma: norm,
        trace_gamma: tr,
        kinetic_gamma: kin,
        gamma,
        pair,
        scaled_gamma: gamma.norm_bound_value * eps * eps / (sym.rho * profile.l.powi(3)),
    })
}
