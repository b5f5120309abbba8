use std::f64::consts::PI;

use serde::Serialize;

use super::packet::c_chi;
use super::profile::{scale_condensate, RadialProfile};
use crate::kernels::{g, radial_moments, RadialMoments};
use crate::report::{ratio, BoundReport, BoundTerm, Constants, EqTag, Exponent, TermKind};
use crate::{Error, Result};

/// Default exponent `κ` in `ℓ n^{2/5} = n^κ`.
pub fn default_kappa() -> Exponent {
    ratio(2, 35)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialParameters {
    pub n: f64,
    /// `ℓ = n^{κ − 2/5}`.
    pub kappa: Exponent,
    pub eps: f64,
    pub constants: Constants,
}

impl TrialParameters {
    pub fn new(n: f64, eps: f64) -> Result<Self> {
        let p = Self {
            n,
            kappa: default_kappa(),
            eps,
            constants: Constants::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0) || !self.n.is_finite() {
            return Err(Error::Domain(format!("n must be positive, got {}", self.n)));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::Domain(format!(
                "ε must be nonnegative, got {}",
                self.eps
            )));
        }
        Ok(())
    }

    pub fn ell(&self) -> f64 {
        self.n.powf(to_f64(self.kappa) - 0.4)
    }

    /// `|ℓ n^{2/5} / n^κ − 1|`.
    pub fn schedule_residual(&self) -> f64 {
        (self.ell() * self.n.powf(0.4) / self.n.powf(to_f64(self.kappa)) - 1.0).abs()
    }
}

fn to_f64(e: Exponent) -> f64 {
    *e.numer() as f64 / *e.denom() as f64
}

/// Phase-space reductions of the coherent-packet trial state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSpaceTraces {
    pub n: f64,
    pub eps: f64,
    pub ell: f64,
    /// `Tr γ`.
    pub trace_gamma: f64,
    /// `(2π)^{−3}∬ p² f`, the main part of `Tr(−Δγ)`.
    pub kinetic_main: f64,
    /// `c_χ ℓ^{−2} Tr γ`, the packet part of `Tr(−Δγ)`.
    pub kinetic_packet_correction: f64,
    /// `(2π)^{−3}∬ f(f+1)`; `None` when `ε = 0`.
    pub variance_integral: Option<f64>,
    pub c_chi: f64,
    pub phi_32: f64,
    pub phi_52: f64,
    pub moments: RadialMoments,
}

/// `2^{−3/4}π^{−9/4}`.
fn trace_prefactor() -> f64 {
    2f64.powf(-0.75) * PI.powf(-2.25)
}

pub fn phase_space_traces(
    profile: &RadialProfile,
    params: &TrialParameters,
) -> Result<PhaseSpaceTraces> {
    params.validate()?;
    let moments = radial_moments(params.eps)?;
    traces_with_moments(profile, params, moments)
}

fn traces_with_moments(
    profile: &RadialProfile,
    params: &TrialParameters,
    moments: RadialMoments,
) -> Result<PhaseSpaceTraces> {
    let n = params.n;
    let ell = params.ell();
    let phi_32 = profile.power_integral(1.5);
    let phi_52 = profile.power_integral(2.5);
    let trace_gamma = trace_prefactor() * n.powf(0.6) * phi_32 * moments.m0.value;
    let c = c_chi()?;
    Ok(PhaseSpaceTraces {
        n,
        eps: params.eps,
        ell,
        trace_gamma,
        kinetic_main: 2f64.powf(0.75) * PI.powf(-1.75) * n.powf(1.4) * phi_52 * moments.m2.value,
        kinetic_packet_correction: c * trace_gamma / (ell * ell),
        variance_integral: moments
            .v
            .map(|v| trace_prefactor() * n.powf(0.6) * phi_32 * v.value),
        c_chi: c,
        phi_32,
        phi_52,
        moments,
    })
}

/// `(2π)^{−3}∬ f(u,p) du dp` evaluated directly with
/// `f(u,p) = g_ε(p / (8πnφ₀(u)²)^{1/4})`: grid rule in `u`, midpoint rule in
/// `θ` with `p = tan θ` for each node.
pub fn trace_gamma_direct(profile: &RadialProfile, n: f64, eps: f64, panels: usize) -> Result<f64> {
    let phi0 = scale_condensate(profile, n)?;
    let dtheta = 0.5 * PI / panels as f64;
    let mut total = 0.0;
    for k in 1..=phi0.cells() {
        let v = phi0.values[k];
        if v <= 0.0 {
            continue;
        }
        let scale = (8.0 * PI * n * v * v).powf(0.25);
        let mut inner = 0.0;
        for i in 0..panels {
            let th = (i as f64 + 0.5) * dtheta;
            let p = th.tan();
            let q = p / scale;
            if q <= eps {
                continue;
            }
            inner += 4.0 * PI * p * p * g(q) / th.cos().powi(2);
        }
        total += phi0.weight(k) * inner * dtheta;
    }
    Ok(total / (2.0 * PI).powi(3))
}

/// Grand-canonical upper bound: main term plus packet correction and the two
/// error families of the `ℓ` schedule.
pub fn assemble_bound(profile: &RadialProfile, params: &TrialParameters) -> Result<BoundReport> {
    let t = phase_space_traces(profile, params)?;
    let n = params.n;
    let kappa = params.kappa;
    let x = n.powf(to_f64(kappa));
    let kinetic = 0.5 * profile.kinetic();
    let pref = 2f64.powf(-0.25) * PI.powf(-1.75);
    let main = n.powf(1.4) * (kinetic + pref * t.phi_52 * (t.moments.m2.value - t.moments.x.value));
    let c_loc = params.constants.get("C");
    let c_conv = params.constants.get("C");
    let seven_fifths = ratio(7, 5);
    let terms = vec![
        BoundTerm::new(
            "main",
            TermKind::Main,
            main,
            EqTag::PairingEnergy,
            Some(seven_fifths),
        ),
        BoundTerm::new(
            "kinetic_packet",
            TermKind::Correction,
            0.5 * t.kinetic_packet_correction,
            EqTag::KineticExpectation,
            Some(seven_fifths - kappa * 2),
        ),
        BoundTerm::new(
            "localization_error",
            TermKind::Error,
            c_loc * n.powf(1.4) * x.powi(3) * n.powf(-0.2),
            EqTag::CoulombLowerBound,
            Some(seven_fifths + kappa * 3 - ratio(1, 5)),
        )
        .with_constant("C", c_loc),
        BoundTerm::new(
            "convolution_error",
            TermKind::Error,
            c_conv * n.powf(1.4) * x.powf(-0.5),
            EqTag::ConvolutionEstimate,
            Some(seven_fifths - kappa / 2),
        )
        .with_constant("C", c_conv),
        BoundTerm::new(
            "expected_particles",
            TermKind::Info,
            n + t.trace_gamma,
            EqTag::ExpectedNumber,
            Some(ratio(1, 1)),
        ),
        BoundTerm::new(
            "trace_gamma",
            TermKind::Info,
            t.trace_gamma,
            EqTag::TraceGamma,
            Some(ratio(3, 5)),
        ),
        BoundTerm::new(
            "main_per_n75",
            TermKind::Info,
            main / n.powf(1.4),
            EqTag::PairingEnergy,
            Some(ratio(0, 1)),
        ),
    ];
    Ok(BoundReport::new(
        "two-component grand-canonical bound",
        "n",
        n,
        terms,
    ))
}

/// Exponent of the correction in the fixed-`N` bound: `7/5 − 3/50`.
pub fn fixed_n_tail_exponent() -> Exponent {
    // M^{−3/5} ⟨𝒩²⟩^{7/10} Var^{3/10} with M ∝ N^{3/5}, ⟨𝒩²⟩ ∝ N², Var ∝ N.
    ratio(-3, 5) * ratio(3, 5) + ratio(7, 10) * 2 + ratio(3, 10)
}

/// `M^{−3/5}⟨𝒩²⟩^{7/10}(⟨𝒩²⟩ − ⟨𝒩⟩²)^{3/10}`.
pub fn tail_term(m: f64, second_moment: f64, variance: f64) -> f64 {
    m.powf(-0.6) * second_moment.powf(0.7) * variance.powf(0.3)
}

/// Fixed particle number `N`: grand-canonical bound at `n = N − C₀N^{3/5}`
/// plus the large-number tail.
pub fn fixed_n_bound(
    profile: &RadialProfile,
    big_n: f64,
    eps: f64,
    constants: &Constants,
) -> Result<BoundReport> {
    if !(eps > 0.0) {
        return Err(Error::Divergence(
            "fixed-N bound needs ε > 0: the number variance diverges at ε = 0".into(),
        ));
    }
    let c0 = constants.get("C0");
    let c2 = constants.get("C2");
    let c = constants.get("C");
    let n = big_n - c0 * big_n.powf(0.6);
    if !(n > 0.0) {
        return Err(Error::Infeasible(format!(
            "N = {big_n} too small: n = N − C0·N^(3/5) = {n} is not positive"
        )));
    }
    let params = TrialParameters {
        n,
        kappa: default_kappa(),
        eps,
        constants: constants.clone(),
    };
    let gc = assemble_bound(profile, &params)?;
    let t = phase_space_traces(profile, &params)?;
    let variance_integral = t.variance_integral.unwrap_or(f64::INFINITY);
    let expected = n + t.trace_gamma;
    let variance = n + 2.0 * variance_integral;
    let second = variance + expected * expected;
    let m = c2 * big_n.powf(0.6);
    let tail = c * tail_term(m, second, variance);
    let mut terms: Vec<BoundTerm> = gc
        .terms
        .into_iter()
        .filter(|t| t.kind != TermKind::Info)
        .collect();
    terms.push(
        BoundTerm::new(
            "large_number_tail",
            TermKind::Error,
            tail,
            EqTag::LargeNumberTail,
            Some(fixed_n_tail_exponent()),
        )
        .with_constant("C", c),
    );
    terms.push(
        BoundTerm::new(
            "n",
            TermKind::Info,
            n,
            EqTag::FixedNumber,
            Some(ratio(1, 1)),
        )
        .with_constant("C0", c0),
    );
    terms.push(BoundTerm::new(
        "expected_particles",
        TermKind::Info,
        expected,
        EqTag::ExpectedNumber,
        Some(ratio(1, 1)),
    ));
    terms.push(BoundTerm::new(
        "number_variance",
        TermKind::Info,
        variance,
        EqTag::LargeNumberTail,
        Some(ratio(1, 1)),
    ));
    terms.push(BoundTerm::new(
        "variance_constant",
        TermKind::Info,
        2.0 * variance_integral / n.powf(0.6),
        EqTag::LargeNumberTail,
        Some(ratio(0, 1)),
    ));
    terms.push(
        BoundTerm::new(
            "tail_cutoff",
            TermKind::Info,
            m,
            EqTag::LargeNumberTail,
            Some(ratio(3, 5)),
        )
        .with_constant("C2", c2),
    );
    Ok(BoundReport::new(
        "two-component fixed-N bound",
        "N",
        big_n,
        terms,
    ))
}
