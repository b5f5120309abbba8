//! The pairing function `g`, its cut-off version `g_ε`, the constant `I₀`
//! and the radial momentum moments shared by both gas models.

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, Integral, QuadConfig};

/// Momentum above which `g` is evaluated in the cancellation-free form.
/// The naive form loses about `8·log₁₀ p` digits, so the switch sits at 1.
pub const STABLE_SWITCH: f64 = 1.0;

/// `u = (p⁴+1)/(p²√(p⁴+2))`; `g = (u−1)/2`.
pub fn g_naive(p: f64) -> f64 {
    let p2 = p * p;
    let p4 = p2 * p2;
    let u = (p4 + 1.0) / (p2 * (p4 + 2.0).sqrt());
    0.5 * (u - 1.0)
}

/// `g = (u²−1)/(2(u+1))` written in `t = p⁻⁴`, accurate and overflow-free for large `p`.
pub fn g_stable(p: f64) -> f64 {
    let t = (p * p).recip().powi(2);
    let u = (1.0 + t) / (1.0 + 2.0 * t).sqrt();
    t * t / (2.0 * (1.0 + 2.0 * t) * (u + 1.0))
}

/// The pairing function `g(p)`.
pub fn g(p: f64) -> f64 {
    let p = p.abs();
    if p < STABLE_SWITCH {
        g_naive(p)
    } else {
        g_stable(p)
    }
}

/// `√(g(g+1)) = 1/(2p²√(p⁴+2))`.
pub fn pair_root(p: f64) -> f64 {
    let p2 = p * p;
    if p < STABLE_SWITCH {
        1.0 / (2.0 * p2 * (p2 * p2 + 2.0).sqrt())
    } else {
        let t = p2.recip().powi(2);
        t / (2.0 * (1.0 + 2.0 * t).sqrt())
    }
}

/// `√(g(g+1)) − g`.
pub fn pair_amplitude(p: f64) -> f64 {
    pair_root(p) - g(p)
}

/// `g_ε(p)`: zero for `|p| ≤ ε`, `g(p)` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumKernel {
    pub eps: f64,
}

impl MomentumKernel {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!(
                "cutoff ε = {eps} must be a finite nonnegative number"
            )));
        }
        Ok(Self { eps })
    }

    pub fn eval(&self, p: f64) -> f64 {
        if p.abs() <= self.eps {
            0.0
        } else {
            g(p)
        }
    }
}

/// `1 + x⁴ − x²√(x⁴+2)` in the equivalent form `1/(1 + x⁴ + x²√(x⁴+2))`.
pub fn i0_integrand(x: f64) -> f64 {
    let x2 = x * x;
    1.0 / (1.0 + x2 * x2 + x2 * (x2 * x2 + 2.0).sqrt())
}

/// `I₀ = (2/π)^{3/4} ∫₀^∞ (1 + x⁴ − x²√(x⁴+2)) dx`.
pub const I0: f64 = 0.574_447_353_215_854;

/// Gamma-function form of `I₀`: `2^{3/2} Γ(3/4) / (5 π^{1/4} Γ(5/4))`.
pub fn i0_closed_form() -> f64 {
    2f64.powf(1.5) * gamma(0.75) / (5.0 * PI.powf(0.25) * gamma(1.25))
}

/// The often-quoted `4^{5/4} Γ(3/4) / (5 π^{1/4} Γ(5/4))`, which is `2 I₀`.
pub fn i0_printed_closed_form() -> f64 {
    4f64.powf(1.25) * gamma(0.75) / (5.0 * PI.powf(0.25) * gamma(1.25))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct I0Values {
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub closed_form: f64,
    pub printed_closed_form: f64,
}

impl I0Values {
    pub fn relative_gap(&self) -> f64 {
        ((self.quadrature - self.closed_form) / self.closed_form).abs()
    }

    pub fn printed_relative_gap(&self) -> f64 {
        ((self.quadrature - self.printed_closed_form) / self.printed_closed_form).abs()
    }
}

pub fn compute_i0() -> Result<I0Values> {
    let pref = (2.0 / PI).powf(0.75);
    let int = integrate_to_infinity(i0_integrand, 0.0, QuadConfig::new(1e-14, 1e-14))?;
    Ok(I0Values {
        quadrature: pref * int.value,
        quadrature_error: pref * int.error,
        closed_form: i0_closed_form(),
        printed_closed_form: i0_printed_closed_form(),
    })
}

/// The four radial moments of `g_ε`, each `∫_{|p|>ε} (…) d³p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialMoments {
    pub eps: f64,
    /// `∫ g_ε`
    pub m0: Integral,
    /// `∫ p² g_ε`
    pub m2: Integral,
    /// `∫ (√(g_ε(g_ε+1)) − g_ε) p⁻²`
    pub x: Integral,
    /// `∫ g_ε(g_ε+1)`, present only for `ε > 0`.
    pub v: Option<Integral>,
}

fn moment_cfg() -> QuadConfig {
    QuadConfig::new(1e-11, 1e-12)
}

fn radial<F: Fn(f64) -> f64>(eps: f64, f: F) -> Result<Integral> {
    let int = integrate_to_infinity(|p| 4.0 * PI * p * p * f(p), eps, moment_cfg())?;
    if int.error > 1e-9 {
        return Err(Error::Quadrature {
            value: int.value,
            error: int.error,
        });
    }
    Ok(int)
}

pub fn radial_moments(eps: f64) -> Result<RadialMoments> {
    MomentumKernel::new(eps)?;
    Ok(RadialMoments {
        eps,
        m0: radial(eps, g)?,
        m2: radial(eps, |p| p * p * g(p))?,
        x: radial(eps, |p| pair_amplitude(p) / (p * p))?,
        v: if eps > 0.0 {
            Some(variance_moment(eps)?)
        } else {
            None
        },
    })
}

/// `∫_{|p|>ε} g(g+1) d³p`, which grows like `π/(2ε)` as `ε → 0`.
///
/// The radial integrand is `π/(p²(p⁴+2)) = π/(2p²) − (π/2) p²/(p⁴+2)`; the
/// singular part is integrated exactly.
pub fn variance_moment(eps: f64) -> Result<Integral> {
    if eps <= 0.0 {
        return Err(Error::Divergence(
            "∫ g(g+1) diverges without a momentum cutoff (ε must be positive)".into(),
        ));
    }
    let rest = integrate_to_infinity(|p| p * p / (p.powi(4) + 2.0), eps, moment_cfg())?;
    Ok(Integral {
        value: PI / (2.0 * eps) - 0.5 * PI * rest.value,
        error: 0.5 * PI * rest.error,
        evaluations: rest.evaluations,
    })
}

/// Moment `X` with the naive integrand `√(g(g+1)) − g`, kept for cross-checks.
pub fn x_moment_naive(eps: f64) -> Result<Integral> {
    radial(eps, |p| {
        let gv = g(p);
        ((gv * (gv + 1.0)).sqrt() - gv) / (p * p)
    })
}

/// Scan of `h ↦ p²h + p⁻²(h − √(h(h+1)))` against the closed-form minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub p: f64,
    pub g: f64,
    pub argmin: f64,
    pub grid_step: f64,
    pub within_step: bool,
    /// `|(2g+1)/(2√(g(g+1))) − (1+p⁴)| / (1+p⁴)`
    pub stationarity: f64,
}

pub fn pair_objective(p: f64, h: f64) -> f64 {
    let p2 = p * p;
    // h − √(h(h+1)) = −h/(h + √(h(h+1)))
    let tail = if h > 0.0 {
        -h / (h + (h * (h + 1.0)).sqrt())
    } else {
        0.0
    };
    p2 * h + tail / p2
}

pub fn check_g_optimality(p: f64, grid_points: usize) -> Result<OptimalityReport> {
    if !(p > 0.0) {
        return Err(Error::Domain(format!("momentum p = {p} must be positive")));
    }
    if grid_points < 2 {
        return Err(Error::Domain("need at least two grid points".into()));
    }
    let gp = g(p);
    let top = 4.0 * gp + 1.0;
    let step = top / (grid_points - 1) as f64;
    let (best, _) = (0..grid_points)
        .map(|k| {
            let h = k as f64 * step;
            (h, pair_objective(p, h))
        })
        .fold(
            (0.0, f64::INFINITY),
            |acc, (h, v)| if v < acc.1 { (h, v) } else { acc },
        );
    let p4 = p.powi(4);
    let lhs = (2.0 * gp + 1.0) / (2.0 * pair_root(p));
    Ok(OptimalityReport {
        p,
        g: gp,
        argmin: best,
        grid_step: step,
        within_step: (best - gp).abs() <= step,
        stationarity: (lhs - (1.0 + p4)).abs() / (1.0 + p4),
    })
}

/// Pointwise and integrated forms of the identity that makes `g` optimal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketReport {
    pub points: usize,
    /// Largest `|lhs − rhs| / (1 + |rhs|)` over the grid.
    pub pointwise_residual: f64,
    pub failures: Vec<f64>,
    pub integrated: f64,
    pub i0: f64,
    pub integrated_relative_gap: f64,
}

pub fn bracket_lhs(p: f64) -> f64 {
    2.0 * (p.powi(4) * g(p) - pair_amplitude(p))
}

pub fn bracket_rhs(p: f64) -> f64 {
    -i0_integrand(p)
}

/// `2^{−1/4} π^{−7/4}`, converting `M2 − X` into units of `I₀`.
pub fn bracket_prefactor() -> f64 {
    2f64.powf(-0.25) * PI.powf(-1.75)
}

pub fn check_bracket_identity() -> Result<BracketReport> {
    let points = 100;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for k in 0..points {
        let p = 10f64.powf(-3.0 + 6.0 * k as f64 / (points - 1) as f64);
        let rhs = bracket_rhs(p);
        let r = (bracket_lhs(p) - rhs).abs() / (1.0 + rhs.abs());
        worst = worst.max(r);
        if r > 1e-10 {
            failures.push(p);
        }
    }
    let m = radial_moments(0.0)?;
    let integrated = bracket_prefactor() * (m.m2.value - m.x.value);
    let i0 = compute_i0()?.quadrature;
    Ok(BracketReport {
        points,
        pointwise_residual: worst,
        failures,
        integrated,
        i0,
        integrated_relative_gap: ((integrated + i0) / i0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_at_one() {
        assert!((g(1.0) - (1.0 / 3f64.sqrt() - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn small_p_limit() {
        let p = 1e-6;
        assert!((p * p * g(p) - 2f64.powf(-1.5)).abs() < 1e-9);
    }

    #[test]
    fn large_p_limit() {
        for p in [1e2f64, 1e4, 1e6] {
            let v = p.powi(8) * g(p);
            assert!((v - 0.25).abs() < 1e-7, "p = {p}: {v}");
        }
    }

    #[test]
    fn seam_agreement() {
        for p in [0.5, 0.9, 1.0, 1.1, 2.0] {
            let (a, b) = (g_naive(p), g_stable(p));
            assert!(((a - b) / b).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn root_identity() {
        for p in [1e-3, 0.3, 1.0, 4.0, 50.0] {
            let gv = g(p);
            let direct = (gv * (gv + 1.0)).sqrt();
            assert!(((direct - pair_root(p)) / pair_root(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn cutoff() {
        let k = MomentumKernel::new(0.5).unwrap();
        assert_eq!(k.eval(0.5), 0.0);
        assert_eq!(k.eval(0.6), g(0.6));
        assert!(MomentumKernel::new(-1.0).is_err());
    }

    #[test]
    fn i0_value() {
        let v = compute_i0().unwrap();
        assert!((v.closed_form - I0).abs() < 1e-15);
        assert!(v.relative_gap() < 1e-8);
        assert!((v.printed_closed_form / v.quadrature - 2.0).abs() < 1e-12);
        assert!(v.quadrature_error < 1e-10);
        assert_eq!(i0_integrand(0.0), 1.0);
    }

    #[test]
    fn variance_needs_cutoff() {
        assert!(matches!(variance_moment(0.0), Err(Error::Divergence(_))));
        let m = radial_moments(0.0).unwrap();
        assert!(m.v.is_none());
    }

    #[test]
    fn x_forms_agree() {
        let a = radial_moments(0.0).unwrap().x.value;
        let b = x_moment_naive(0.0).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn bracket_at_one() {
        assert!((bracket_lhs(1.0) + (2.0 - 3f64.sqrt())).abs() < 1e-15);
        assert!((bracket_rhs(1.0) + (2.0 - 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn variance_matches_direct_quadrature() {
        let eps = 0.3;
        let direct = integrate_to_infinity(
            |p| 4.0 * PI * p * p * g(p) * (g(p) + 1.0),
            eps,
            moment_cfg(),
        )
        .unwrap();
        assert!((variance_moment(eps).unwrap().value - direct.value).abs() < 1e-9);
    }

    #[test]
    fn eps_v_limit() {
        let eps = 1e-4;
        let v = variance_moment(eps).unwrap().value;
        assert!((eps * v - PI / 2.0).abs() < 1e-3);
    }
}
