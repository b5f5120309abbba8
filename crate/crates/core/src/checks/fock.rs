use std::sync::Arc;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{CheckResult, Suite};
use crate::berezin::trial_rng;
use crate::bogolubov::{
    pairing_count, validate_pair, wick_expectation, BogolubovData, Ladder, SpectralPairs,
};
use crate::fock::ops::{lower_vector, raise_vector, symmetrize_two_body};
use crate::fock::{
    annihilation, bogolubov_by_displacement, creation, expectation, prepare_state,
    second_quantize_one_body, second_quantize_two_body, FockOperator, OccupationBasis, PrepConfig,
    PreparedState, StateSpec,
};
use crate::linalg::{c, random_hermitian, random_unit_complex, CMatrix, CVector, C64};
use crate::Result;

const S: Suite = Suite::Fock;
const N_MAX: usize = 14;
const ORACLE_TOL: f64 = 1e-8;
const WICK_TOL: f64 = 1e-9;

/// `⟨ψ| X₁ ⋯ X_k |ψ⟩` by applying the ladder operators right to left. The
/// basis should leave room above the support of `psi` for the raising steps.
pub fn ladder_string_oracle(basis: &OccupationBasis, ops: &[Ladder], psi: &CVector) -> C64 {
    let mut v = psi.clone();
    for op in ops.iter().rev() {
        v = match op {
            Ladder::Create(f) => raise_vector(basis, f, &v),
            Ladder::Annihilate(f) => lower_vector(basis, f, &v),
        };
    }
    psi.dotc(&v)
}

/// Squeezed-state moment `⟨(a*)ʲ a^{j+2k}⟩` from the derivative formula, using
/// `(x⁻¹ d/dx)^k (1−x²)^{−1/2} = (2k−1)!! (1−x²)^{−1/2−k}`.
pub fn squeezed_moment_formula(lambda: C64, j: usize, k: usize) -> C64 {
    assert!(j <= 2, "derivative order above 2 is not tabulated");
    let x = lambda.norm();
    let u = 1.0 - x * x;
    let s = 0.5 + k as f64;
    let double_factorial: f64 = (1..2 * k).step_by(2).map(|m| m as f64).product();
    let deriv = match j {
        0 => u.powf(-s),
        1 => 2.0 * s * x * u.powf(-s - 1.0),
        _ => 2.0 * s * u.powf(-s - 1.0) + 4.0 * s * (s + 1.0) * x * x * u.powf(-s - 2.0),
    };
    (-lambda).powu(k as u32) * (u.sqrt() * x.powi(j as i32) * double_factorial * deriv)
}

/// Zero-pad amplitudes onto a larger graded basis of the same dimension.
fn pad(v: &CVector, len: usize) -> CVector {
    let mut out = CVector::zeros(len);
    out.rows_mut(0, v.len()).copy_from(v);
    out
}

fn basis(d: usize, n_max: usize) -> Result<Arc<OccupationBasis>> {
    Ok(Arc::new(OccupationBasis::build(d, n_max)?))
}

fn prep(b: &Arc<OccupationBasis>, spec: &StateSpec) -> Result<PreparedState> {
    prepare_state(b, spec, &PrepConfig::default())
}

/// Random real orthonormal pair states in `d ≤ 2` with `λ` drawn from
/// `[λ_max/3, λ_max)`, and a condensate of the given norm.
pub(crate) fn random_data(
    rng: &mut ChaCha8Rng,
    d: usize,
    lambda_max: f64,
    phi_norm: f64,
) -> Result<BogolubovData> {
    let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let vectors = if d == 1 {
        vec![DVector::from_vec(vec![1.0])]
    } else {
        vec![
            DVector::from_vec(vec![theta.cos(), theta.sin()]),
            DVector::from_vec(vec![-theta.sin(), theta.cos()]),
        ]
    };
    let lambdas = (0..d)
        .map(|_| rng.gen_range(lambda_max / 3.0..lambda_max))
        .collect();
    let pairs = SpectralPairs::new(d, vectors, lambdas)?;
    let phi = random_unit_complex(rng, d) * c(phi_norm);
    BogolubovData::from_spectral(pairs, phi)
}

fn random_ladder(rng: &mut ChaCha8Rng, d: usize) -> Ladder {
    let f = random_unit_complex(rng, d) * c(rng.gen_range(0.5..1.5));
    if rng.gen_bool(0.5) {
        Ladder::Create(f)
    } else {
        Ladder::Annihilate(f)
    }
}

fn number_like(b: &OccupationBasis, e: &CVector, v: &CVector) -> CVector {
    raise_vector(b, e, &lower_vector(b, e, v))
}

/// Mean and variance of `a*(e)a(e)`.
fn mode_statistics(b: &OccupationBasis, e: &CVector, psi: &CVector) -> (f64, f64) {
    let once = number_like(b, e, psi);
    let mean = psi.dotc(&once).re;
    (mean, once.norm_squared() - mean * mean)
}

pub(super) fn run(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let b2 = basis(2, N_MAX)?;

    // Coherent state.
    let mut rng = trial_rng(seed, 0);
    let phi = random_unit_complex(&mut rng, 2) * c(0.8);
    let st = prep(&b2, &StateSpec::Coherent(phi.clone()))?;
    let e = &phi / c(phi.norm());
    let (mean, var) = mode_statistics(&b2, &e, &st.vector.amplitudes);
    let n2 = phi.norm_squared();
    let detail = format!("|phi|^2 = {n2}, defect {:e}", st.defect);
    out.push(CheckResult::at_most(
        S,
        "coherent_mean",
        (mean - n2).abs(),
        ORACLE_TOL,
        detail.clone(),
    ));
    out.push(CheckResult::at_most(
        S,
        "coherent_variance",
        (var - n2).abs(),
        ORACLE_TOL,
        detail,
    ));
    let resid = lower_vector(&b2, &phi, &st.vector.amplitudes) - &st.vector.amplitudes * c(n2);
    out.push(CheckResult::at_most(
        S,
        "coherent_characterization",
        resid.norm(),
        10.0 * st.defect.sqrt() + 1e-14,
        "|(a(phi) - |phi|^2) C|",
    ));

    // Squeezed state along a complex unit vector.
    let lambda = C64::new(0.12, 0.09);
    let psi = random_unit_complex(&mut rng, 2);
    let st = prep(
        &b2,
        &StateSpec::Squeezed {
            lambda,
            psi: psi.clone(),
        },
    )?;
    let l2 = lambda.norm_sqr();
    let (mean, var) = mode_statistics(&b2, &psi, &st.vector.amplitudes);
    let detail = format!("|lambda| = {}, defect {:e}", lambda.norm(), st.defect);
    out.push(CheckResult::at_most(
        S,
        "squeezed_mean",
        (mean - l2 / (1.0 - l2)).abs(),
        ORACLE_TOL,
        detail.clone(),
    ));
    out.push(CheckResult::at_most(
        S,
        "squeezed_variance",
        (var - 2.0 * l2 / (1.0 - l2).powi(2)).abs(),
        ORACLE_TOL,
        detail,
    ));
    let amps = &st.vector.amplitudes;
    let resid = lower_vector(&b2, &psi, amps) + raise_vector(&b2, &psi, amps) * lambda;
    out.push(CheckResult::at_most(
        S,
        "squeezed_characterization",
        resid.norm(),
        10.0 * st.defect.sqrt() + 1e-14,
        "|(a(psi) + lambda a*(psi)) S|",
    ));

    // Moment formula on a single mode, small and moderate |λ|.
    let mut worst: f64 = 0.0;
    let cases = [
        (C64::new(0.08, -0.06), N_MAX),
        (C64::new(0.12, -0.09), 40),
        (C64::new(0.6, 0.0), 120),
        (C64::new(-0.3, 0.4), 80),
    ];
    for (lambda, n_max) in cases {
        let b1 = basis(1, n_max)?;
        let one = CVector::from_vec(vec![c(1.0)]);
        let st = prep(
            &b1,
            &StateSpec::Squeezed {
                lambda,
                psi: one.clone(),
            },
        )?;
        let lower_pow = |m: usize| {
            (0..m).fold(st.vector.amplitudes.clone(), |v, _| {
                lower_vector(&b1, &one, &v)
            })
        };
        for j in 0..=2 {
            for k in 0..=2 {
                let oracle = lower_pow(j).dotc(&lower_pow(j + 2 * k));
                let formula = squeezed_moment_formula(lambda, j, k);
                worst = worst.max((oracle - formula).norm() / formula.norm().max(1.0));
            }
        }
    }
    out.push(CheckResult::at_most(
        S,
        "squeezed_moments",
        worst,
        ORACLE_TOL,
        "max relative gap over j,k <= 2 and four lambda",
    ));

    // Canonical commutation relation away from the cutoff.
    let f = random_unit_complex(&mut rng, 2);
    let g = random_unit_complex(&mut rng, 2) * c(0.7);
    let a = annihilation(&b2, &f)?;
    let ad = creation(&b2, &g)?;
    let comm = &a.matrix * &ad.matrix - &ad.matrix * &a.matrix;
    let fg = f.dotc(&g);
    let inner = b2.sector(0).start..b2.sector(N_MAX - 1).end;
    let mut ccr: f64 = 0.0;
    for r in inner.clone() {
        for col in inner.clone() {
            let target = if r == col { fg } else { C64::new(0.0, 0.0) };
            ccr = ccr.max((comm[(r, col)] - target).norm());
        }
    }
    out.push(CheckResult::at_most(
        S,
        "ccr",
        ccr,
        1e-12,
        "max entry of [a(f),a*(g)] - (f,g)",
    ));

    // Quasi-free state: odd moments and the pairing rule.
    let mut rng = trial_rng(seed, 1);
    let data = random_data(&mut rng, 2, 0.1, 0.0)?;
    let st = prep(&b2, &StateSpec::Bogolubov(data.clone()))?;
    let wide = basis(2, N_MAX + 6)?;
    let psi = pad(&st.vector.amplitudes, wide.len());
    let mut odd: f64 = 0.0;
    for len in [1usize, 3] {
        for _ in 0..6 {
            let ops: Vec<Ladder> = (0..len).map(|_| random_ladder(&mut rng, 2)).collect();
            odd = odd.max(ladder_string_oracle(&wide, &ops, &psi).norm());
        }
    }
    out.push(CheckResult::at_most(
        S,
        "odd_moments_vanish",
        odd,
        1e-10,
        "max |<odd string>|",
    ));
    for m in [2usize, 3] {
        let mut worst: f64 = 0.0;
        let mut pairings = 0;
        for _ in 0..8 {
            let ops: Vec<Ladder> = (0..2 * m).map(|_| random_ladder(&mut rng, 2)).collect();
            let w = wick_expectation(&ops, |x, y| data.quasi_free_two_point(x, y))?;
            pairings = w.pairings;
            worst = worst.max((w.value - ladder_string_oracle(&wide, &ops, &psi)).norm());
        }
        let name = format!("wick_m{m}");
        let ok_count = pairings == pairing_count(2 * m);
        let mut r = CheckResult::at_most(
            S,
            &name,
            worst,
            WICK_TOL,
            format!("{pairings} pairings, 8 random strings"),
        );
        r.passed &= ok_count;
        out.push(r);
    }

    // Displaced quasi-free states against the closed forms.
    let mut rng = trial_rng(seed, 2);
    let data = random_data(&mut rng, 2, 0.12, 0.7)?;
    let st = prep(&b2, &StateSpec::Bogolubov(data.clone()))?;
    let psi = &st.vector.amplitudes;
    let disp = bogolubov_by_displacement(&b2, &data, &PrepConfig::default())?;
    let route_gap = (psi - &disp.vector.amplitudes)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most(
        S,
        "bogolubov_routes_agree",
        route_gap,
        1e-10,
        "max amplitude gap between the two constructions",
    ));
    let pair = validate_pair(data.gamma1(), data.xi1());
    out.push(CheckResult::at_most(
        S,
        "symplectic_projection",
        pair.symplectic.max(pair.relation).max(pair.commutation),
        1e-10,
        "largest pair-relation residual",
    ));

    let mut one: f64 = 0.0;
    let mut two: f64 = 0.0;
    for _ in 0..6 {
        let u1 = random_unit_complex(&mut rng, 2);
        let u2 = random_unit_complex(&mut rng, 2);
        let v1 = random_unit_complex(&mut rng, 2);
        let v2 = random_unit_complex(&mut rng, 2);
        let oracle1 = lower_vector(&b2, &u1, psi).dotc(&lower_vector(&b2, &v1, psi));
        one = one.max((data.one_pdm(&u1, &v1)? - oracle1).norm());
        let left = lower_vector(&b2, &u2, &lower_vector(&b2, &u1, psi));
        let right = lower_vector(&b2, &v2, &lower_vector(&b2, &v1, psi));
        two = two.max((data.two_pdm(&u1, &u2, &v2, &v1)? - left.dotc(&right)).norm());
    }
    let detail = format!("d=2, N_max={N_MAX}, defect {:e}", st.defect);
    out.push(CheckResult::at_most(
        S,
        "one_pdm_vs_oracle",
        one,
        ORACLE_TOL,
        detail.clone(),
    ));
    out.push(CheckResult::at_most(
        S,
        "two_pdm_vs_oracle",
        two,
        ORACLE_TOL,
        detail,
    ));

    let t = random_hermitian(&mut rng, 2);
    let w = symmetrize_two_body(&random_hermitian(&mut rng, 4), 2);
    let h = FockOperator {
        basis: b2.clone(),
        matrix: second_quantize_one_body(&b2, &t)?.matrix
            + second_quantize_two_body(&b2, &w)?.matrix,
    };
    let oracle = expectation(&h, &st.vector)?.re;
    let closed = data.quadratic_expectation(&t, &w)?;
    out.push(CheckResult::at_most(
        S,
        "quadratic_expectation_vs_oracle",
        (oracle - closed).abs(),
        ORACLE_TOL,
        "random Hermitian T and swap-symmetric W",
    ));

    // Number variance with γφ = 0.
    let lambda = rng.gen_range(0.05..0.15);
    let pairs = SpectralPairs::new(2, vec![DVector::from_vec(vec![1.0, 0.0])], vec![lambda])?;
    let phi = CVector::from_vec(vec![c(0.0), C64::from_polar(0.8, rng.gen_range(0.0..6.0))]);
    let data = BogolubovData::from_spectral(pairs, phi)?;
    let st = prep(&b2, &StateSpec::Bogolubov(data.clone()))?;
    let (mean, second) = (0..b2.len()).fold((0.0, 0.0), |(m, s), i| {
        let p = st.vector.amplitudes[i].norm_sqr();
        let n = b2.total(i) as f64;
        (m + p * n, s + p * n * n)
    });
    let gamma = data.gamma1();
    let id = CMatrix::identity(2, 2);
    let predicted = data.phi().norm_squared() + 2.0 * (gamma * (gamma + &id)).trace().re;
    out.push(CheckResult::at_most(
        S,
        "number_variance",
        (second - mean * mean - predicted).abs(),
        ORACLE_TOL,
        "|phi|^2 + 2 Tr gamma(gamma+1)",
    ));

    // Truncation monotonicity.
    let loose = PrepConfig {
        defect_tolerance: 1.0,
        ..PrepConfig::default()
    };
    let data = random_data(&mut rng, 2, 0.4, 1.2)?;
    let mut last = f64::INFINITY;
    let mut increases = 0;
    for n in 2..=N_MAX {
        let b = basis(2, n)?;
        let defect = prepare_state(&b, &StateSpec::Bogolubov(data.clone()), &loose)?.defect;
        if defect > last {
            increases += 1;
        }
        last = defect;
    }
    out.push(CheckResult::flag(
        S,
        "truncation_monotone",
        increases == 0,
        increases as f64,
        "number of N_max steps where the defect grew",
    ));

    Ok(out)
}
