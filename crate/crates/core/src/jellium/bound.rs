use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gamma::{build_with_moments, exchange_bound, ExchangeBound, GammaSymbol};
use super::mismatch::{phi0_metrics, Phi0Metrics};
use super::profile::{EdgeProfile, RampShape};
use crate::kernels::{bracket_prefactor, g, pair_amplitude, radial_moments, I0};
use crate::quad::{integrate, QuadConfig};
use crate::report::{ratio, BoundReport, BoundTerm, Constants, EqTag, Exponent, TermKind};
use crate::{Error, Result};

/// Exponent `κ` of the cutoff schedule `ε = ρ^{−κ}`.
pub fn eps_schedule_exponent() -> Exponent {
    ratio(1, 12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JelliumParams {
    pub rho: f64,
    /// Fixed cutoff; `None` selects `ε = ρ^{−1/12}`.
    #[serde(default)]
    pub eps: Option<f64>,
    /// Box side in units of `ρ^{−1/3}`.
    #[serde(default = "default_l")]
    pub l: f64,
    /// Edge width in units of `ρ^{−1/3}`.
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub shape: RampShape,
    #[serde(default)]
    pub constants: Constants,
    #[serde(default = "default_samples")]
    pub neutrality_samples: usize,
}

fn default_l() -> f64 {
    40.0
}
fn default_r() -> f64 {
    1.0
}
fn default_samples() -> usize {
    17
}

impl JelliumParams {
    pub fn new(rho: f64, eps: Option<f64>) -> Self {
        Self {
            rho,
            eps,
            l: default_l(),
            r: default_r(),
            shape: RampShape::default(),
            constants: Constants::default(),
            neutrality_samples: default_samples(),
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.eps.unwrap_or_else(|| self.rho.powf(-1.0 / 12.0))
    }

    /// Profile with lengths converted from `ρ^{−1/3}` units.
    pub fn profile(&self) -> Result<EdgeProfile> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::Domain(format!(
                "density must be positive, got {}",
                self.rho
            )));
        }
        let unit = self.rho.powf(-1.0 / 3.0);
        EdgeProfile::new(self.l * unit, self.r * unit, self.rho, self.shape)
    }
}

/// Comparison of the main term with `−I₀ρ^{5/4}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldyLimit {
    pub eps: f64,
    pub main: f64,
    /// `−I₀ ρ^{5/4}`.
    pub reference: f64,
    /// `main / reference`.
    pub ratio: f64,
    /// `(main − reference) / |reference|`.
    pub deviation: f64,
    /// Same deviation from the integrand on `|p| < ε` alone.
    pub deviation_direct: f64,
    #[serde(serialize_with = "ser_exp")]
    pub deviation_exponent: Option<Exponent>,
}

fn ser_exp<S: serde::Serializer>(
    e: &Option<Exponent>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_str(&crate::report::format_exponent(e)),
        None => s.serialize_none(),
    }
}

/// `2^{−1/4}π^{−7/4} ∫_{|p|<ε} (p²g − (√(g(g+1)) − g)p⁻²) d³p / I₀`, negated:
/// the relative amount by which the cutoff raises the main term.
pub fn foldy_deviation_direct(eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let int = integrate(
        |p| 4.0 * PI * p * p * (p * p * g(p) - pair_amplitude(p) / (p * p)),
        0.0,
        eps,
        QuadConfig::new(1e-11, 1e-10),
    )?;
    Ok(-bracket_prefactor() * int.value / I0)
}

pub fn foldy_limit(rho: f64, eps: f64, scheduled: bool) -> Result<FoldyLimit> {
    let m = radial_moments(eps)?;
    let main = rho.powf(1.25) * bracket_prefactor() * (m.m2.value - m.x.value);
    let reference = -I0 * rho.powf(1.25);
    Ok(FoldyLimit {
        eps,
        main,
        reference,
        ratio: main / reference,
        deviation: (main - reference) / reference.abs(),
        deviation_direct: foldy_deviation_direct(eps)?,
        deviation_exponent: Some(if scheduled {
            ratio(5, 4) - eps_schedule_exponent()
        } else {
            ratio(5, 4)
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JelliumReport {
    pub params: JelliumParams,
    pub profile: EdgeProfile,
    pub symbol: GammaSymbol,
    pub metrics: Phi0Metrics,
    pub exchange: ExchangeBound,
    pub bound: BoundReport,
    pub foldy_limit: FoldyLimit,
}

/// Energy per volume of the jellium trial state, term by term.
pub fn assemble_jellium(params: &JelliumParams) -> Result<JelliumReport> {
    let profile = params.profile()?;
    let eps = params.cutoff();
    if !(eps > 0.0) {
        return Err(Error::Divergence(
            "the jellium bound needs ε > 0 for the exchange terms".into(),
        ));
    }
    let rho = params.rho;
    let moments = radial_moments(eps)?;
    let symbol = build_with_moments(&profile, eps, params.neutrality_samples, moments)?;
    let metrics = phi0_metrics(&profile)?;
    let exchange = exchange_bound(&profile, &symbol)?;
    let scheduled = params.eps.is_none();
    let foldy = foldy_limit(rho, eps, scheduled)?;
    let (l, r) = (profile.l, profile.r);
    let vol = l.powi(3);
    let k0 = profile.kinetic();
    let c = params.constants.get("C");
    let x = symbol.moments.x.value;
    let exch_exp = if scheduled {
        ratio(1, 1) + eps_schedule_exponent() * 2
    } else {
        ratio(1, 1)
    };
    let terms = vec![
        BoundTerm::new(
            "main",
            TermKind::Main,
            foldy.main,
            EqTag::CoulombOneComponent,
            Some(ratio(5, 4)),
        ),
        BoundTerm::new(
            "condensate_kinetic",
            TermKind::Correction,
            0.5 * symbol.z0_sq * k0 / vol,
            EqTag::EdgeKinetic,
            None,
        ),
        BoundTerm::new(
            "mismatch",
            TermKind::Correction,
            0.5 * metrics.mismatch / vol,
            EqTag::Mismatch,
            Some(ratio(2, 1)),
        ),
        BoundTerm::new(
            "exchange_gamma",
            TermKind::Correction,
            0.5 * exchange
                .gamma
                .cauchy_schwarz_hardy_value
                .min(exchange.gamma.norm_bound_value)
                / vol,
            EqTag::Exchange,
            Some(exch_exp),
        ),
        BoundTerm::new(
            "exchange_pair",
            TermKind::Correction,
            0.5 * exchange
                .pair
                .cauchy_schwarz_hardy_value
                .min(exchange.pair.norm_bound_value)
                / vol,
            EqTag::Exchange,
            Some(exch_exp),
        ),
        BoundTerm::new(
            "kinetic_packet",
            TermKind::Correction,
            0.5 * symbol.trace_gamma * k0 / vol,
            EqTag::KineticOneComponent,
            None,
        ),
        BoundTerm::new(
            "depletion",
            TermKind::Correction,
            (rho - symbol.z0_sq / vol) * rho.powf(0.25) * bracket_prefactor() * x,
            EqTag::Neutrality,
            Some(ratio(1, 1)),
        ),
        BoundTerm::new(
            "coulomb_packet_error",
            TermKind::Error,
            c * symbol.z0_sq / vol
                * (1.0 / (eps * l.sqrt()) + rho.powf(0.25) * (r / l + l.powf(-0.5))),
            EqTag::CoulombOneComponent,
            None,
        )
        .with_constant("C", c),
    ];
    let bound = BoundReport::new("one-component energy per volume", "rho", rho, terms);
    Ok(JelliumReport {
        params: params.clone(),
        profile,
        symbol,
        metrics,
        exchange,
        bound,
        foldy_limit: foldy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_is_linear_and_positive() {
        let mut prev: Option<f64> = None;
        for k in 0..5 {
            let eps = 1e-2 / 2f64.powi(k);
            let f = foldy_limit(1e6, eps, false).unwrap();
            assert!(f.deviation > 0.0);
            assert!((f.deviation - f.deviation_direct).abs() < 1e-8, "{f:?}");
            if let Some(p) = prev {
                let q = f.deviation / p;
                assert!((0.45..=0.55).contains(&q), "{q}");
            }
            prev = Some(f.deviation);
        }
        assert!(foldy_limit(1e6, 1e-5, false).unwrap().deviation <= 1e-4);
    }

    #[test]
    fn scheduled_exponent() {
        let f = foldy_limit(1e12, 1e12f64.powf(-1.0 / 12.0), true).unwrap();
        assert_eq!(f.deviation_exponent, Some(ratio(7, 6)));
        assert_eq!(ratio(5, 4) - ratio(1, 12), ratio(7, 6));
    }

    #[test]
    fn report_terms_are_nonnegative_except_main() {
        let rep = assemble_jellium(&JelliumParams::new(1e8, None)).unwrap();
        for t in &rep.bound.terms {
            if t.kind != TermKind::Main {
                assert!(t.value >= 0.0, "{t:?}");
            }
        }
        assert!(rep.bound.main < 0.0);
        assert!(rep.symbol.neutrality_residual <= 1e-12 * rep.params.rho);
        let sum: f64 = rep.bound.terms.iter().map(|t| t.value).sum();
        assert!((sum - rep.bound.total).abs() <= 1e-12 * rep.bound.total.abs());
    }
}
