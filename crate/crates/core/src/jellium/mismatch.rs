use std::f64::consts::PI;

use serde::Serialize;

use super::profile::EdgeProfile;
use crate::quad::{fixed_legendre, gauss_legendre, integrate_to_infinity, QuadConfig};
use crate::{Error, Result};

/// The two one-dimensional factors of the charge mismatch `n φ₀² − ρ`:
/// `E = η²/c²` and the indicator of `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Edge,
    Box,
}

struct Correlator<'a> {
    profile: &'a EdgeProfile,
    rule: (Vec<f64>, Vec<f64>),
}

impl<'a> Correlator<'a> {
    fn new(profile: &'a EdgeProfile) -> Self {
        Self {
            profile,
            rule: gauss_legendre(20),
        }
    }

    fn eval(&self, f: Factor, t: f64) -> f64 {
        match f {
            Factor::Edge => self.profile.unit(t).powi(2),
            Factor::Box => {
                if (0.0..=self.profile.l).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `C_{AB}(u) = ∫ A(x) B(x + u) dx`, piecewise exact up to the rule.
    fn correlation(&self, a: Factor, b: Factor, u: f64) -> f64 {
        let l = self.profile.l;
        let lo = (-u).max(0.0);
        let hi = (l - u).min(l);
        if hi <= lo {
            return 0.0;
        }
        let mut cuts: Vec<f64> = self
            .profile
            .breaks()
            .iter()
            .flat_map(|&p| [p, p - u])
            .filter(|&p| p > lo && p < hi)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let f = |x: f64| self.eval(a, x) * self.eval(b, x + u);
        cuts.windows(2)
            .map(|w| fixed_legendre(f, w[0], w[1], &self.rule))
            .sum()
    }

    /// Breakpoints of `C_{AB}` on `[0, L]`.
    fn lag_breaks(&self) -> Vec<f64> {
        let (l, r) = (self.profile.l, self.profile.r);
        vec![0.0, r, l - 2.0 * r, l - r, l]
    }

    /// `K_{AB}(t) = ∬ A(x) B(y) e^{−t²(x−y)²} dx dy`.
    fn gaussian_overlap(&self, a: Factor, b: Factor, t: f64) -> f64 {
        let l = self.profile.l;
        let mut cuts = self.lag_breaks();
        if t > 0.0 {
            for k in [0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 9.0] {
                cuts.push(k / t);
            }
        }
        let top = if t > 0.0 { (9.0 / t).min(l) } else { l };
        cuts.retain(|&c| c <= top);
        cuts.push(top);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let f = |u: f64| {
            let w = (-t * t * u * u).exp();
            if w == 0.0 {
                0.0
            } else {
                w * (self.correlation(a, b, u) + self.correlation(a, b, -u))
            }
        };
        cuts.windows(2)
            .map(|w| fixed_legendre(f, w[0], w[1], &self.rule))
            .sum()
    }
}

/// `C_{AB}(u)` for the mismatch factors of `profile`.
pub fn factor_correlation(profile: &EdgeProfile, a: Factor, b: Factor, u: f64) -> f64 {
    Correlator::new(profile).correlation(a, b, u)
}

/// `K_{AB}(t)`.
pub fn factor_gaussian_overlap(profile: &EdgeProfile, a: Factor, b: Factor, t: f64) -> f64 {
    Correlator::new(profile).gaussian_overlap(a, b, t)
}

/// `∬_{[0,L]²} e^{−t²(x−y)²} dx dy` in closed form.
pub fn box_gaussian_overlap(l: f64, t: f64) -> f64 {
    if t == 0.0 {
        return l * l;
    }
    use statrs::function::erf::erf;
    2.0 * (l * PI.sqrt() / (2.0 * t) * erf(t * l) - (-(-t * t * l * l).exp_m1()) / (2.0 * t * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Phi0Metrics {
    /// `∫|∇φ₀|²`.
    pub kinetic: f64,
    /// `∬ (nφ₀² − ρ)(x) |x−y|⁻¹ (nφ₀² − ρ)(y)`.
    pub mismatch: f64,
    pub mismatch_error: f64,
    /// `mismatch / (ρ² L³ r²)`.
    pub mismatch_ratio: f64,
}

/// Uses `1/|x| = (2/√π)∫₀^∞ e^{−t²|x|²} dt`, which factorizes the
/// six-dimensional Coulomb integral into one-dimensional Gaussian overlaps.
pub fn phi0_metrics(profile: &EdgeProfile) -> Result<Phi0Metrics> {
    let cor = Correlator::new(profile);
    let f = |t: f64| {
        let ee = cor.gaussian_overlap(Factor::Edge, Factor::Edge, t);
        let eb = cor.gaussian_overlap(Factor::Edge, Factor::Box, t);
        let bb = box_gaussian_overlap(profile.l, t);
        ee.powi(3) - 2.0 * eb.powi(3) + bb.powi(3)
    };
    let scale = profile.rho * profile.rho * 2.0 / PI.sqrt();
    let int = integrate_to_infinity(f, 0.0, QuadConfig::new(0.0, 1e-10))?;
    let mismatch = scale * int.value;
    let error = scale * int.error;
    if !(mismatch.is_finite()) || error > 1e-6 * mismatch.abs().max(1e-300) {
        return Err(Error::Quadrature {
            value: mismatch,
            error,
        });
    }
    let (l, r) = (profile.l, profile.r);
    Ok(Phi0Metrics {
        kinetic: profile.kinetic(),
        mismatch,
        mismatch_error: error,
        mismatch_ratio: mismatch / (profile.rho.powi(2) * l.powi(3) * r * r),
    })
}

/// Position-space evaluation `∫ Ch(u)/|u| d³u` with the charge
/// autocorrelation `Ch`, by product Gauss-Legendre over rays in the positive
/// octant. Meant for small boxes.
pub fn mismatch_position_space(profile: &EdgeProfile, angular: usize) -> f64 {
    let cor = Correlator::new(profile);
    let (l, r) = (profile.l, profile.r);
    let corr = |u: f64| {
        (
            cor.correlation(Factor::Edge, Factor::Edge, u),
            cor.correlation(Factor::Edge, Factor::Box, u),
            (l - u.abs()).max(0.0),
        )
    };
    let charge = |u: [f64; 3]| {
        let a = corr(u[0]);
        let b = corr(u[1]);
        let c = corr(u[2]);
        // E-B and B-E lags are mirror images; both factors are even in u.
        a.0 * b.0 * c.0 - 2.0 * a.1 * b.1 * c.1 + a.2 * b.2 * c.2
    };
    let rule = gauss_legendre(angular);
    let radial_rule = gauss_legendre(16);
    let lag_breaks = [r, l - 2.0 * r, l - r];
    let ray = |theta: f64, phi: f64| {
        let n = [
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ];
        let rmax = n
            .iter()
            .map(|c| if *c > 0.0 { l / c } else { f64::INFINITY })
            .fold(f64::INFINITY, f64::min);
        let mut cuts: Vec<f64> = n
            .iter()
            .flat_map(|&c| {
                lag_breaks
                    .iter()
                    .map(move |b| if c > 0.0 { b / c } else { f64::INFINITY })
            })
            .filter(|&x| x < rmax)
            .collect();
        cuts.push(0.0);
        cuts.push(rmax);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let f = |s: f64| s * charge([s * n[0], s * n[1], s * n[2]]);
        cuts.windows(2)
            .map(|w| fixed_legendre(f, w[0], w[1], &radial_rule))
            .sum::<f64>()
    };
    let theta_part = |phi: f64| {
        let split = (1.0 / phi.cos().max(phi.sin())).atan();
        let g = |theta: f64| theta.sin() * ray(theta, phi);
        fixed_legendre(g, 0.0, split, &rule) + fixed_legendre(g, split, 0.5 * PI, &rule)
    };
    let octant = fixed_legendre(theta_part, 0.0, 0.25 * PI, &rule)
        + fixed_legendre(theta_part, 0.25 * PI, 0.5 * PI, &rule);
    8.0 * profile.rho * profile.rho * octant
}
