use rand::Rng;

use super::{CheckResult, Suite};
use crate::berezin::{
    check_berezin_lieb, make_frame, probe_operator_concavity, run_berezin_lieb_trials, trial_rng,
    FrameKind, Mode, ScalarFunction, Shape, TrialConfig, INEQUALITY_TOL,
};
use crate::linalg::{apply_matrix_function, max_abs_diff, random_psd, CMatrix};
use crate::Result;

const S: Suite = Suite::Berezin;

pub(super) fn berezin(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let cfg = TrialConfig {
        trials: 200,
        max_dim: 8,
        seed,
        kind: FrameKind::Random,
    };
    let mut dilation: f64 = 0.0;
    for (function, shape) in [
        (ScalarFunction::PairAmplitude, Shape::Concave),
        (ScalarFunction::PairVariance, Shape::Convex),
    ] {
        for mode in [Mode::Operator, Mode::Scalar] {
            let s = run_berezin_lieb_trials(&cfg, function, mode, shape)?;
            dilation = dilation.max(s.max_dilation_residual);
            let name = format!(
                "{}_{}_{}",
                shape_name(shape),
                mode_name(mode),
                function.label()
            );
            let mut r = CheckResult::at_least_minus(
                S,
                &name,
                s.worst_margin,
                INEQUALITY_TOL,
                format!(
                    "worst margin over {} frames, {} failures",
                    s.trials, s.failures
                ),
            );
            r.passed &= s.failures == 0;
            out.push(r);
        }
    }
    out.push(CheckResult::at_most(
        S,
        "dilation_unitarity",
        dilation,
        1e-10,
        "max residual of the block unitaries",
    ));

    // Tight frame with a constant symbol gives equality.
    let mut rng = trial_rng(seed, 1_000);
    let mut equality: f64 = 0.0;
    for d in [2usize, 5] {
        let frame = make_frame(&mut rng, d, 3 * d, FrameKind::Tight)?;
        let level = rng.gen_range(0.2..3.0);
        let symbol = vec![level; frame.len()];
        for mode in [Mode::Operator, Mode::Scalar] {
            let r = check_berezin_lieb(
                &frame,
                &symbol,
                |t| ScalarFunction::PairAmplitude.eval(t),
                mode,
                Shape::Concave,
            )?;
            equality = equality.max(r.margin.abs());
        }
    }
    out.push(CheckResult::at_most(
        S,
        "tight_frame_equality",
        equality,
        1e-12,
        "|defect| for constant symbols on tight frames",
    ));

    let mut identity: f64 = 0.0;
    for _ in 0..10 {
        let d = rng.gen_range(1..=6);
        let a = random_psd(&mut rng, d, d, 1.5);
        let f = apply_matrix_function(&a, |t| (t * (t + 1.0)).sqrt())?;
        let id = CMatrix::identity(d, d);
        identity = identity.max(max_abs_diff(&(&f * &f), &(&a * (&a + &id))));
    }
    out.push(CheckResult::at_most(
        S,
        "matrix_function_identity",
        identity,
        1e-10,
        "max |xi(A)^2 - A(A+1)|",
    ));

    for function in [ScalarFunction::Sqrt, ScalarFunction::PairAmplitude] {
        for dim in [3usize, 6] {
            let rep = probe_operator_concavity(function, dim, 500, seed)?;
            let mut r = CheckResult::at_least_minus(
                S,
                &format!("concavity_{}_d{dim}", function.label()),
                rep.worst_margin,
                INEQUALITY_TOL,
                format!("worst midpoint margin over {} pairs", rep.trials),
            );
            r.passed &= rep.concave_consistent;
            out.push(r);
        }
    }
    let rep = probe_operator_concavity(ScalarFunction::Square, 3, 500, seed)?;
    out.push(CheckResult::flag(
        S,
        "square_not_operator_concave",
        !rep.counterexamples.is_empty(),
        rep.counterexamples.len() as f64,
        format!(
            "violating pairs among {} (worst margin {:e})",
            rep.trials, rep.worst_margin
        ),
    ));
    Ok(out)
}

fn shape_name(s: Shape) -> &'static str {
    match s {
        Shape::Concave => "concave",
        Shape::Convex => "convex",
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Operator => "operator",
        Mode::Scalar => "scalar",
    }
}
