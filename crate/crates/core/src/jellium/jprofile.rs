use std::f64::consts::PI;

use serde::Serialize;

use super::profile::EdgeProfile;
use crate::quad::{fixed_legendre, gauss_legendre};

/// `|∫₀^L e^{iτt} η(t)²/c² dt|`, using the reflection symmetry of `η`.
pub fn edge_transform_abs(profile: &EdgeProfile, tau: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (l, r) = (profile.l, profile.r);
    let half = 0.5 * l;
    let plateau = if tau == 0.0 {
        half - r
    } else {
        (tau * (half - r)).sin() / tau
    };
    let panels = ((tau * r / PI).ceil() as usize).max(2);
    let h = r / panels as f64;
    let f = |t: f64| (tau * (half - t)).cos() * profile.unit(t).powi(2);
    let ramp: f64 = (0..panels)
        .map(|k| fixed_legendre(f, k as f64 * h, (k + 1) as f64 * h, rule))
        .sum();
    2.0 * (plateau + ramp).abs()
}

/// `j(τ) = (2π)⁻¹ n^{1/3} ρ^{−1/3} |(η²)^(τ)|²`.
pub fn j_tau(profile: &EdgeProfile, tau: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let c2 = profile.c * profile.c;
    c2 * edge_transform_abs(profile, tau, rule).powi(2) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JProfileReport {
    pub l: f64,
    pub r: f64,
    /// `∫j` from `n^{1/3}ρ^{−1/3}∫η⁴`.
    pub integral_exact: f64,
    /// `∫j` by quadrature in `τ`.
    pub integral_quadrature: f64,
    pub lower: f64,
    pub sandwich_1d: bool,
    /// `∫J = (∫j)³`.
    pub integral_3d: f64,
    pub sandwich_3d: bool,
    /// `∫_{|τ|>(3L)^{−1/2}} j`.
    pub tail_1d: f64,
    /// `3 tail_1d L^{1/2}`, bounding `L^{1/2}∫_{|q|>L^{−1/2}} J`.
    pub tail_constant: f64,
    /// `max τ² L j(τ)` over `10/L ≤ τ ≤ 100/r`.
    pub decay_max: f64,
}

pub fn j_profile_checks(profile: &EdgeProfile) -> JProfileReport {
    let rule = gauss_legendre(20);
    let (l, r) = (profile.l, profile.r);
    let j = |t: f64| j_tau(profile, t, &rule);
    let exact = profile.c.powi(2) * profile.integrate(|t| profile.unit(t).powi(4), 4);
    // Panels of one oscillation period 2π/L out to T, plus a τ⁻⁶ tail.
    let top = 200.0 / r;
    let width = 2.0 * PI / l;
    let panels = (top / width).ceil() as usize;
    let half: f64 = (0..panels)
        .map(|k| fixed_legendre(j, k as f64 * width, (k + 1) as f64 * width, &rule))
        .sum();
    let end = panels as f64 * width;
    let quadrature = 2.0 * (half + j(end) * end / 5.0);
    let a = (3.0 * l).powf(-0.5);
    let sub = (a / width).ceil() as usize;
    let step = a / sub as f64;
    let core: f64 = (0..sub)
        .map(|k| fixed_legendre(j, k as f64 * step, (k + 1) as f64 * step, &rule))
        .sum();
    let tail = exact - 2.0 * core;
    let lower = 1.0 - 2.0 * r / l;
    let decay_max = (0..200)
        .map(|k| {
            let t = (10.0 / l) * ((100.0 / r) / (10.0 / l)).powf(k as f64 / 199.0);
            t * t * l * j(t)
        })
        .fold(0.0, f64::max);
    let tol = 1e-12;
    JProfileReport {
        l,
        r,
        integral_exact: exact,
        integral_quadrature: quadrature,
        lower,
        sandwich_1d: lower <= exact + tol && exact <= 1.0 + tol,
        integral_3d: exact.powi(3),
        sandwich_3d: lower.powi(3) <= exact.powi(3) + tol && exact.powi(3) <= 1.0 + tol,
        tail_1d: tail,
        tail_constant: 3.0 * tail * l.sqrt(),
        decay_max,
    }
}
