//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 1 cannot pass: the stated closed form is exactly twice the
//! integral. It is reported as FAIL and listed in `UNATTAINABLE`; the target
//! exits nonzero if any other criterion fails or if criterion 1 starts passing.

use std::process::Command;
use std::time::{Duration, Instant};

use cbose_core::berezin::{
    probe_operator_concavity, run_berezin_lieb_trials, FrameKind, Mode, ScalarFunction, Shape,
    TrialConfig,
};
use cbose_core::checks::{finite_difference_gradient, run_suite, Suite};
use cbose_core::dyson::{
    assemble_bound, check_convolution, discrete_gradient, fixed_n_tail_exponent, j_mass,
    minimize_variational, TrialParameters, VariationalConfig,
};
use cbose_core::jellium::{
    build_gamma_symbol, foldy_limit, j_profile_checks, EdgeProfile, RampShape,
};
use cbose_core::kernels::{check_bracket_identity, check_g_optimality, compute_i0, I0};
use cbose_core::report::ratio;
use cbose_core::Error;

const UNATTAINABLE: &[usize] = &[1];
const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let start = Instant::now();
    let mut v = f();
    let took = start.elapsed();
    v.passed &= took < limit;
    v.detail = format!(
        "{}; {:.3}s (limit {}s)",
        v.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    v
}

fn i0_dual() -> Verdict {
    timed(Duration::from_secs(1), || {
        let v = compute_i0().unwrap();
        let gap = v.printed_relative_gap();
        let near = (v.quadrature - 1.148895).abs() <= 1e-6;
        verdict(
            gap <= 1e-8 && near,
            format!(
                "quadrature {:.10}, stated closed form {:.10}, relative gap {gap:.3e} (tol 1e-8); corrected form gap {:.1e}",
                v.quadrature,
                v.printed_closed_form,
                v.relative_gap()
            ),
        )
    })
}

fn bracket() -> Verdict {
    timed(Duration::from_secs(5), || {
        let b = check_bracket_identity().unwrap();
        verdict(
            b.points == 100 && b.pointwise_residual <= 1e-10 && b.integrated_relative_gap <= 1e-6,
            format!(
                "{} points, worst residual/(1+|rhs|) {:.2e} (tol 1e-10); integrated {:.12} vs -I0, gap {:.2e} (tol 1e-6)",
                b.points, b.pointwise_residual, b.integrated, b.integrated_relative_gap
            ),
        )
    })
}

fn g_optimality() -> Verdict {
    let mut misses = 0;
    let mut stationarity: f64 = 0.0;
    for k in 0..20 {
        let p = 10f64.powf(-2.0 + 3.0 * k as f64 / 19.0);
        let r = check_g_optimality(p, 20_001).unwrap();
        misses += usize::from(!r.within_step);
        stationarity = stationarity.max(r.stationarity);
    }
    verdict(
        misses == 0 && stationarity <= 1e-8,
        format!("20 momenta in [1e-2, 10]: {misses} argmin misses, stationarity {stationarity:.2e} (tol 1e-8)"),
    )
}

fn fock_suite() -> Verdict {
    timed(Duration::from_secs(60), || {
        let results = run_suite(Suite::Fock, SEED).unwrap();
        let required = [
            "coherent_mean",
            "coherent_variance",
            "squeezed_mean",
            "squeezed_variance",
            "squeezed_moments",
            "ccr",
            "wick_m2",
            "wick_m3",
            "one_pdm_vs_oracle",
            "two_pdm_vs_oracle",
        ];
        let missing: Vec<&str> = required
            .iter()
            .copied()
            .filter(|n| !results.iter().any(|r| r.name == *n))
            .collect();
        let failed: Vec<String> = results
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.name.clone())
            .collect();
        let wick = results
            .iter()
            .filter(|r| r.name.starts_with("wick"))
            .map(|r| r.value)
            .fold(0.0, f64::max);
        let pdm = results
            .iter()
            .filter(|r| r.name.ends_with("pdm_vs_oracle"))
            .map(|r| r.value)
            .fold(0.0, f64::max);
        verdict(
            missing.is_empty() && failed.is_empty() && wick <= 1e-9 && pdm <= 1e-8,
            format!(
                "{} checks, failed {failed:?}, missing {missing:?}; Wick gap {wick:.1e} (tol 1e-9), pdm gap {pdm:.1e} (tol 1e-8)",
                results.len()
            ),
        )
    })
}

fn berezin_lieb() -> Verdict {
    let cfg = TrialConfig {
        trials: 200,
        max_dim: 8,
        seed: SEED,
        kind: FrameKind::Random,
    };
    let mut ok = true;
    let mut worst = f64::INFINITY;
    let mut dilation: f64 = 0.0;
    let mut failures = 0;
    for (f, shape) in [
        (ScalarFunction::PairAmplitude, Shape::Concave),
        (ScalarFunction::PairVariance, Shape::Convex),
    ] {
        for mode in [Mode::Operator, Mode::Scalar] {
            let s = run_berezin_lieb_trials(&cfg, f, mode, shape).unwrap();
            ok &= s.trials == 200 && s.failures == 0 && s.worst_margin >= -1e-10;
            failures += s.failures;
            worst = worst.min(s.worst_margin);
            dilation = dilation.max(s.max_dilation_residual);
        }
    }
    verdict(
        ok && dilation <= 1e-10,
        format!("4 x 200 frames: {failures} failures, worst margin {worst:.2e} (tol -1e-10), dilation {dilation:.1e} (tol 1e-10)"),
    )
}

fn concavity_probe() -> Verdict {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for f in [ScalarFunction::Sqrt, ScalarFunction::PairAmplitude] {
        for dim in [3, 6] {
            let r = probe_operator_concavity(f, dim, 500, SEED).unwrap();
            ok &= r.worst_margin >= -1e-10;
            worst = worst.min(r.worst_margin);
        }
    }
    let sq = probe_operator_concavity(ScalarFunction::Square, 3, 500, SEED).unwrap();
    verdict(
        ok && !sq.counterexamples.is_empty(),
        format!(
            "500 pairs at d = 3, 6: worst margin {worst:.2e} (tol -1e-10); t^2 violations {}",
            sq.counterexamples.len()
        ),
    )
}

fn variational() -> Verdict {
    timed(Duration::from_secs(300), || {
        let cfg = VariationalConfig::default();
        let res = minimize_variational(I0, &cfg).unwrap();
        let fine = minimize_variational(
            I0,
            &VariationalConfig {
                points: 2 * cfg.points,
                ..cfg
            },
        )
        .unwrap();
        let shift = (fine.a - res.a).abs() / res.a;
        let g = discrete_gradient(&res.profile, I0);
        let grad = [1usize, 10, 100, 300]
            .iter()
            .map(|&k| {
                ((finite_difference_gradient(&res.profile, k, I0) - g[k - 1]) / g[k - 1]).abs()
            })
            .fold(0.0, f64::max);
        verdict(
            res.virial_kinetic <= 1e-3 && res.virial_energy <= 1e-3 && shift <= 5e-3 && grad <= 1e-6,
            format!(
                "A = {:.8} (h/2: {:.8}, shift {shift:.1e}, tol 5e-3); virial {:.1e}, {:.1e} (tol 1e-3); gradient gap {grad:.1e} (tol 1e-6)",
                res.a, fine.a, res.virial_kinetic, res.virial_energy
            ),
        )
    })
}

fn exponent_arithmetic() -> Verdict {
    let res = minimize_variational(I0, &VariationalConfig::default()).unwrap();
    let report = assemble_bound(&res.profile, &TrialParameters::new(1e8, 0.0).unwrap()).unwrap();
    let exp = |name: &str| report.term(name).and_then(|t| t.exponent).unwrap();
    let main = exp("main");
    let loc = exp("localization_error") - main;
    let conv = exp("convolution_error") - main;
    let tail = fixed_n_tail_exponent();
    verdict(
        main == ratio(7, 5)
            && loc == ratio(-1, 35)
            && conv == ratio(-1, 35)
            && tail == ratio(67, 50),
        format!("main {main}, relative errors {loc} and {conv}, fixed-N tail {tail}"),
    )
}

fn one_component() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut feasible = 0;
    for rho in [1e2, 1e4, 1e6, 1e8, 1e10] {
        let unit = f64::powf(rho, -1.0 / 3.0);
        for shape in [RampShape::Smoothstep, RampShape::Cosine] {
            let profile = EdgeProfile::new(40.0 * unit, unit, rho, shape).unwrap();
            for eps in [1e-3, 1e-2, 0.1, 0.5, f64::powf(rho, -1.0 / 12.0)] {
                match build_gamma_symbol(&profile, eps, 17) {
                    Ok(s) => {
                        feasible += 1;
                        worst = worst.max(s.neutrality_residual / rho);
                    }
                    Err(Error::Infeasible(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
    let devs: Vec<f64> = (0..5)
        .map(|k| {
            foldy_limit(1e6, 1e-2 / 2f64.powi(k), false)
                .unwrap()
                .deviation
        })
        .collect();
    let ratios: Vec<f64> = devs.windows(2).map(|w| w[1] / w[0]).collect();
    let halving = devs.iter().all(|&d| d > 0.0) && ratios.iter().all(|q| (0.45..=0.55).contains(q));
    verdict(
        feasible > 0 && worst <= 1e-12 && halving,
        format!(
            "neutrality max residual/rho {worst:.1e} over {feasible} feasible (tol 1e-12); deviation ratios {:?}",
            ratios.iter().map(|q| format!("{q:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn convolution() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for ell in [0.3, 1.0, 10.0] {
        for p in [0.3, 1.0, 3.0] {
            let c = check_convolution(ell, p).unwrap();
            ok &= c.gap <= c.bound;
            worst = worst.max(c.gap / c.bound);
        }
    }
    let mass = [0.3, 1.0, 10.0]
        .iter()
        .map(|&l| (j_mass(l).unwrap() - 1.0).abs())
        .fold(0.0, f64::max);
    let mut sandwiches = 0;
    for (l, r, shape) in [
        (40.0, 1.0, RampShape::Smoothstep),
        (40.0, 1.0, RampShape::Cosine),
        (24.0, 3.0, RampShape::Smoothstep),
    ] {
        let rep = j_profile_checks(&EdgeProfile::new(l, r, 1.0, shape).unwrap());
        sandwiches += usize::from(rep.sandwich_1d && rep.sandwich_3d);
    }
    verdict(
        ok && mass <= 1e-10 && sandwiches == 3,
        format!("9 pairs, max gap/bound {worst:.3}; max |int j - 1| {mass:.1e} (tol 1e-10); J sandwich {sandwiches}/3"),
    )
}

fn cli_determinism() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_cbose");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let a = run(&["verify", "--seed", "7"]);
    let b = run(&["verify", "--seed", "7"]);
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let c = run(&["constants", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap_or_default();
    let r = &json["results"];
    let emitted =
        r["I0"]["quadrature"].is_f64() && r["I0"]["closed_form"].is_f64() && r["A"].is_f64();
    verdict(
        identical && c.status.success() && emitted,
        format!(
            "verify byte-identical: {identical} ({} bytes); constants exit {:?}, I0 {} / {}, A {}",
            a.stdout.len(),
            c.status.code(),
            r["I0"]["quadrature"],
            r["I0"]["closed_form"],
            r["A"]
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("I0 dual computation", i0_dual),
        ("bracket identity", bracket),
        ("g-optimality", g_optimality),
        ("Fock oracle suite", fock_suite),
        ("Berezin-Lieb trials", berezin_lieb),
        ("operator-concavity probe", concavity_probe),
        ("variational minimizer", variational),
        ("two-component exponent arithmetic", exponent_arithmetic),
        ("one-component neutrality and deviation", one_component),
        ("convolution estimate", convolution),
        ("CLI determinism", cli_determinism),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let k = i + 1;
        let v = check();
        let tag = if v.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {k:>2} {name}: {}", v.detail);
        if v.passed == UNATTAINABLE.contains(&k) {
            unexpected.push(k);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected; known unattainable {UNATTAINABLE:?}");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
