use std::f64::consts::PI;

use serde::Serialize;

use crate::quad::{integrate_to_infinity, integrate_with_breaks, QuadConfig};
use crate::{Error, Result};

/// Unit-norm window `χ(x) = (2/π)^{3/4} e^{−x²}`.
pub fn chi(r: f64) -> f64 {
    (2.0 / PI).powf(0.75) * (-r * r).exp()
}

/// `χ_ℓ(x) = ℓ^{−3/2} χ(x/ℓ)`.
pub fn chi_ell(ell: f64, r: f64) -> f64 {
    ell.powf(-1.5) * chi(r / ell)
}

/// `(2π)^{−3}|χ̂_ℓ(q)|² = ℓ³(2π)^{−3/2} e^{−ℓ²q²/2}` for `f̂(q) = ∫e^{iqx}f`.
pub fn j_ell(ell: f64, q: f64) -> f64 {
    ell.powi(3) * (2.0 * PI).powf(-1.5) * (-0.5 * ell * ell * q * q).exp()
}

fn cfg() -> QuadConfig {
    QuadConfig::new(1e-14, 1e-13)
}

/// `∫|∇χ|²`, by radial quadrature.
pub fn c_chi() -> Result<f64> {
    Ok(integrate_to_infinity(
        |r| 4.0 * PI * r * r * (2.0 * r * chi(r)).powi(2),
        0.0,
        cfg(),
    )?
    .value)
}

/// `∫ j_ℓ(q) d³q`.
pub fn j_mass(ell: f64) -> Result<f64> {
    Ok(integrate_to_infinity(|q| 4.0 * PI * q * q * j_ell(ell, q), 0.0, cfg())?.value)
}

/// Coherent packet `θ_{u,p}(x) = e^{ipx} χ_ℓ(x − u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianPacket {
    pub u: [f64; 3],
    pub p: [f64; 3],
    pub ell: f64,
}

impl GaussianPacket {
    pub fn new(u: [f64; 3], p: [f64; 3], ell: f64) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(Error::Domain(format!(
                "packet width must be positive, got {ell}"
            )));
        }
        Ok(Self { u, p, ell })
    }

    /// `∫|θ_{u,p}|²`; independent of `u` and `p`.
    pub fn norm_squared(&self) -> Result<f64> {
        let ell = self.ell;
        Ok(
            integrate_to_infinity(|r| 4.0 * PI * r * r * chi_ell(ell, r).powi(2), 0.0, cfg())?
                .value,
        )
    }
}

/// `(j_ℓ * |·|⁻²)(p)` for `|p| = p`. The angular integral is done in closed
/// form, leaving `∫ j_ℓ(q) (2πq/p) ln|(p+q)/(p−q)| dq` with a break at `q = p`.
pub fn convolved_inverse_square(ell: f64, p: f64) -> Result<f64> {
    if !(ell > 0.0) || !(p > 0.0) {
        return Err(Error::Domain(format!(
            "need ℓ > 0 and p > 0, got ℓ = {ell}, p = {p}"
        )));
    }
    let s = 1.0 / ell;
    let top = p + 40.0 * s;
    let mut breaks: Vec<f64> = [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0]
        .iter()
        .map(|k| k * s)
        .chain([0.0, p, top])
        .filter(|b| *b <= top)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let f = |q: f64| {
        if q == p || q == 0.0 {
            return 0.0;
        }
        j_ell(ell, q) * (2.0 * PI * q / p) * ((p + q) / (p - q)).abs().ln()
    };
    let int = integrate_with_breaks(f, &breaks, QuadConfig::new(1e-15, 1e-12))?;
    Ok(int.value)
}

/// `ℓ^{−1/2} p^{−5/2}`.
pub fn convolution_estimate(ell: f64, p: f64) -> f64 {
    ell.powf(-0.5) * p.powf(-2.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionCheck {
    pub ell: f64,
    pub p: f64,
    pub convolved: f64,
    pub gap: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn check_convolution(ell: f64, p: f64) -> Result<ConvolutionCheck> {
    let convolved = convolved_inverse_square(ell, p)?;
    let gap = (p.powi(-2) - convolved).abs();
    let bound = convolution_estimate(ell, p);
    Ok(ConvolutionCheck {
        ell,
        p,
        convolved,
        gap,
        bound,
        ok: gap <= bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainStep {
    pub name: String,
    pub value: f64,
    pub constant: String,
}

/// Packet Coulomb expectation with the condensate frozen at `φ₀(u)` on the
/// packet support, and the error terms of the lower-bound chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaKernel {
    /// `4π (j_ℓ * |·|⁻²)(p) φ₀(u)²`.
    pub value: f64,
    pub phi0_u: f64,
    /// `δ' = (n^{2/5}ℓ) n^{−1/5}`.
    pub delta_prime: f64,
    pub chain: Vec<ChainStep>,
    /// Chain lower bound `value − C(n^{2/5}ℓ)³n^{−2/5}`.
    pub lower_bound: f64,
    pub estimate: ConvolutionCheck,
}

pub fn theta_kernel_expectation(
    phi0_u: f64,
    p: f64,
    n: f64,
    ell: f64,
    c: f64,
) -> Result<ThetaKernel> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("n must be positive, got {n}")));
    }
    let estimate = check_convolution(ell, p)?;
    let value = 4.0 * PI * estimate.convolved * phi0_u * phi0_u;
    let x = n.powf(0.4) * ell;
    let delta_prime = x * n.powf(-0.2);
    let step = |name: &str, v: f64| ChainStep {
        name: name.into(),
        value: v,
        constant: "C".into(),
    };
    let combined = c * x.powi(3) * n.powf(-0.4);
    let chain = vec![
        step(
            "lipschitz_remainder",
            c * x.powi(4) * n.powf(-0.6) / delta_prime,
        ),
        step("amplitude_shift", c * delta_prime * x * x * n.powf(-0.2)),
        step("combined", combined),
    ];
    Ok(ThetaKernel {
        value,
        phi0_u,
        delta_prime,
        chain,
        lower_bound: value - combined,
        estimate,
    })
}
