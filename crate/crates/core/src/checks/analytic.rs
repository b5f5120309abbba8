use rand::Rng;

use super::{CheckResult, Suite};
use crate::berezin::trial_rng;
use crate::dyson::{
    assemble_bound, c_chi, check_convolution, discrete_gradient, fixed_n_tail_exponent,
    gaussian_optimum, j_mass, minimize_variational, tied_energy, RadialProfile, TrialParameters,
    VariationalConfig,
};
use crate::jellium::{
    build_gamma_symbol, foldy_limit, hardy_check, j_profile_checks, random_hardy_instance,
    EdgeProfile, RampShape,
};
use crate::kernels::{check_bracket_identity, check_g_optimality, compute_i0, I0};
use crate::report::ratio;
use crate::{Error, Result};

pub(super) fn kernels() -> Result<Vec<CheckResult>> {
    let s = Suite::Kernels;
    let mut out = Vec::new();
    let i0 = compute_i0()?;
    out.push(CheckResult::at_most(
        s,
        "i0_printed_closed_form",
        i0.printed_relative_gap(),
        1e-8,
        format!(
            "quadrature {:.12} vs printed Gamma form {:.12}",
            i0.quadrature, i0.printed_closed_form
        ),
    ));
    out.push(CheckResult::at_most(
        s,
        "i0_corrected_closed_form",
        i0.relative_gap(),
        1e-8,
        format!(
            "quadrature {:.12} vs corrected Gamma form {:.12}",
            i0.quadrature, i0.closed_form
        ),
    ));

    let br = check_bracket_identity()?;
    out.push(CheckResult::at_most(
        s,
        "bracket_pointwise",
        br.pointwise_residual,
        1e-10,
        format!("{} log-spaced momenta", br.points),
    ));
    out.push(CheckResult::at_most(
        s,
        "bracket_integrated",
        br.integrated_relative_gap,
        1e-6,
        format!("integrated {:.12} vs -I0", br.integrated),
    ));

    let mut misses = 0;
    let mut stationarity: f64 = 0.0;
    for k in 0..20 {
        let p = 10f64.powf(-2.0 + 3.0 * k as f64 / 19.0);
        let r = check_g_optimality(p, 20_001)?;
        if !r.within_step {
            misses += 1;
        }
        stationarity = stationarity.max(r.stationarity);
    }
    out.push(CheckResult::flag(
        s,
        "g_argmin",
        misses == 0,
        misses as f64,
        "momenta where the scanned argmin is off by more than one step",
    ));
    out.push(CheckResult::at_most(
        s,
        "g_stationarity",
        stationarity,
        1e-8,
        "max relative stationarity residual",
    ));
    Ok(out)
}

/// Centered five-point derivative of the tied energy at node `k`.
pub fn finite_difference_gradient(profile: &RadialProfile, k: usize, i0: f64) -> f64 {
    let shifted = |dv: f64| {
        let mut q = profile.clone();
        q.values[k] += dv;
        q.values[0] = q.values[1];
        tied_energy(&q, i0)
    };
    let d = 2e-3 * profile.values[k];
    (8.0 * (shifted(d) - shifted(-d)) - (shifted(2.0 * d) - shifted(-2.0 * d))) / (12.0 * d)
}

fn gradient_gap(profile: &RadialProfile, nodes: &[usize]) -> f64 {
    let g = discrete_gradient(profile, I0);
    nodes
        .iter()
        .map(|&k| {
            let fd = finite_difference_gradient(profile, k, I0);
            (fd - g[k - 1]).abs() / g[k - 1].abs()
        })
        .fold(0.0, f64::max)
}

pub(super) fn dyson() -> Result<Vec<CheckResult>> {
    let s = Suite::Dyson;
    let mut out = Vec::new();
    let cfg = VariationalConfig::default();
    let res = minimize_variational(I0, &cfg)?;
    out.push(CheckResult::at_most(
        s,
        "virial_kinetic",
        res.virial_kinetic,
        1e-3,
        format!("|T - 3/4 I0 P| / T at A = {:.8}", res.a),
    ));
    out.push(CheckResult::at_most(
        s,
        "virial_energy",
        res.virial_energy,
        1e-3,
        "|A - 5/8 I0 P| / A",
    ));
    out.push(CheckResult::at_most(
        s,
        "mass_conservation",
        (res.profile.mass() - 1.0).abs(),
        1e-12,
        "|int Phi^2 - 1|",
    ));
    out.push(CheckResult::at_most(
        s,
        "boundary_tail",
        res.boundary_ratio,
        cfg.boundary_tol,
        "max Phi beyond 0.9R relative to max Phi",
    ));
    let fine = VariationalConfig {
        points: 2 * cfg.points,
        ..cfg
    };
    let refined = minimize_variational(I0, &fine)?;
    out.push(CheckResult::at_most(
        s,
        "grid_refinement",
        (refined.a - res.a).abs() / res.a,
        5e-3,
        format!("A = {:.8} at h, {:.8} at h/2", res.a, refined.a),
    ));
    let gaussian = RadialProfile::gaussian(0.01, cfg.radius, cfg.points)?;
    let gap = gradient_gap(&res.profile, &[1, 10, 100, 300])
        .max(gradient_gap(&gaussian, &[1, 10, 100, 300, 700]));
    out.push(CheckResult::at_most(
        s,
        "gradient_vs_finite_differences",
        gap,
        1e-6,
        "max relative gap, minimizer and a Gaussian",
    ));
    let (_, gauss_energy) = gaussian_optimum(I0);
    out.push(CheckResult::flag(
        s,
        "beats_gaussian",
        res.energy <= gauss_energy,
        res.energy - gauss_energy,
        "minimizer energy minus best Gaussian energy",
    ));

    let report = assemble_bound(&res.profile, &TrialParameters::new(1e8, 0.0)?)?;
    let exp = |name: &str| {
        report
            .term(name)
            .and_then(|t| t.exponent)
            .ok_or_else(|| Error::Invariant {
                index: 0,
                reason: format!("term {name} has no exponent"),
            })
    };
    let main = exp("main")?;
    let balanced = main == ratio(7, 5)
        && exp("localization_error")? - main == ratio(-1, 35)
        && exp("convolution_error")? - main == ratio(-1, 35)
        && fixed_n_tail_exponent() == ratio(67, 50);
    out.push(CheckResult::flag(
        s,
        "exponent_balance",
        balanced,
        0.0,
        "7/5 main, -1/35 relative errors, 67/50 fixed-N tail",
    ));

    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for ell in [0.3, 1.0, 10.0] {
        for p in [0.3, 1.0, 3.0] {
            let c = check_convolution(ell, p)?;
            worst = worst.max(c.gap / c.bound);
            if !c.ok {
                bad += 1;
            }
        }
    }
    out.push(CheckResult::at_most(
        s,
        "convolution_estimate",
        worst,
        1.0,
        format!("max gap / bound over 9 pairs, {bad} violations"),
    ));
    let mut mass: f64 = 0.0;
    for ell in [0.3, 1.0, 10.0] {
        mass = mass.max((j_mass(ell)? - 1.0).abs());
    }
    out.push(CheckResult::at_most(
        s,
        "j_normalization",
        mass,
        1e-10,
        "max |int j_ell - 1|",
    ));
    out.push(CheckResult::at_most(
        s,
        "packet_kinetic_constant",
        (c_chi()? - 3.0).abs(),
        1e-10,
        "|int |grad chi|^2 - 3|",
    ));
    Ok(out)
}

pub(super) fn jellium(seed: u64) -> Result<Vec<CheckResult>> {
    let s = Suite::Jellium;
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    let mut feasible = 0;
    for rho in [1e2, 1e4, 1e6, 1e8] {
        let unit = f64::powf(rho, -1.0 / 3.0);
        let profile = EdgeProfile::new(40.0 * unit, unit, rho, RampShape::Smoothstep)?;
        for eps in [1e-2, 0.1, f64::powf(rho, -1.0 / 12.0)] {
            match build_gamma_symbol(&profile, eps, 17) {
                Ok(sym) => {
                    feasible += 1;
                    worst = worst.max(sym.neutrality_residual / rho);
                }
                Err(Error::Infeasible(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let mut r = CheckResult::at_most(
        s,
        "neutrality",
        worst,
        1e-12,
        format!("max residual / rho over {feasible} feasible (rho, eps)"),
    );
    r.passed &= feasible > 0;
    out.push(r);

    let mut devs = Vec::new();
    for k in 0..5 {
        devs.push(foldy_limit(1e6, 1e-2 / 2f64.powi(k), false)?.deviation);
    }
    let positive = devs.iter().all(|&d| d > 0.0);
    let ratios: Vec<f64> = devs.windows(2).map(|w| w[1] / w[0]).collect();
    let off = ratios.iter().map(|q| (q - 0.5).abs()).fold(0.0, f64::max);
    let mut r = CheckResult::at_most(
        s,
        "foldy_halving",
        off,
        0.05,
        format!("max |ratio - 1/2| when eps halves from 1e-2, ratios {ratios:?}"),
    );
    r.passed &= positive;
    out.push(r);

    let mut sandwiches = 0;
    let cases = [
        (40.0, 1.0, RampShape::Smoothstep),
        (40.0, 1.0, RampShape::Cosine),
        (24.0, 3.0, RampShape::Smoothstep),
    ];
    for (l, rr, shape) in cases {
        let rep = j_profile_checks(&EdgeProfile::new(l, rr, 1.0, shape)?);
        if rep.sandwich_1d && rep.sandwich_3d {
            sandwiches += 1;
        }
    }
    out.push(CheckResult::flag(
        s,
        "j_sandwich",
        sandwiches == cases.len(),
        sandwiches as f64,
        "profiles whose J integral lies in the stated sandwich",
    ));

    let mut rng = trial_rng(seed, 2_000);
    let mut slack = f64::INFINITY;
    let mut holds = true;
    for _ in 0..12 {
        let dim = rng.gen_range(1..=8);
        let (basis, coeffs) = random_hardy_instance(&mut rng, dim);
        let h = hardy_check(&basis, &coeffs)?;
        holds &= h.holds;
        slack = slack.min((h.chain - h.exchange) / h.chain);
    }
    let mut r = CheckResult::at_least_minus(
        s,
        "hardy_chain",
        slack,
        1e-12,
        "min relative slack of the Hardy chain over 12 instances",
    );
    r.passed &= holds;
    out.push(r);
    Ok(out)
}
