use std::sync::Arc;

use cbose_core::berezin::{
    check_berezin_lieb, random_instance, run_berezin_lieb_trials, trial_rng, FrameKind, Mode,
    ScalarFunction, Shape, TrialConfig,
};
use cbose_core::bogolubov::{validate_pair, BogolubovData, SpectralPairs};
use cbose_core::dyson::{assemble_bound, scale_condensate, RadialProfile, TrialParameters};
use cbose_core::fock::ops::{lower_vector, raise_vector};
use cbose_core::fock::{prepare_state, OccupationBasis, PrepConfig, StateSpec};
use cbose_core::jellium::{
    build_gamma_symbol, hardy_check, random_hardy_instance, EdgeProfile, RampShape,
};
use cbose_core::kernels::{g, radial_moments, MomentumKernel};
use cbose_core::linalg::{c, CVector, C64};
use cbose_core::report::TermKind;
use cbose_core::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cvec(parts: &[(f64, f64)]) -> CVector {
    CVector::from_iterator(parts.len(), parts.iter().map(|&(re, im)| C64::new(re, im)))
}

/// Orthonormal real pair states from the QR factor of a random matrix.
fn orthonormal(d: usize, seed: u64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(d, d, |_, _| rand::Rng::gen_range(&mut rng, -1.0..1.0));
    let q = m.qr().q();
    (0..d).map(|k| q.column(k).into_owned()).collect()
}

fn data(d: usize, seed: u64, lambdas: &[f64], phi: CVector) -> BogolubovData {
    let vs = orthonormal(d, seed);
    let pairs = SpectralPairs::new(d, vs[..lambdas.len()].to_vec(), lambdas.to_vec()).unwrap();
    BogolubovData::from_spectral(pairs, phi).unwrap()
}

fn complex_pair() -> impl Strategy<Value = (f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symplectic_block_is_a_projection(
        d in 1usize..6,
        seed in any::<u64>(),
        lambdas in prop::collection::vec(0.0..0.95f64, 1..6),
    ) {
        let k = lambdas.len().min(d);
        let bd = data(d, seed, &lambdas[..k], CVector::zeros(d));
        let rep = validate_pair(bd.gamma1(), bd.xi1());
        prop_assert!(rep.ok, "{rep:?}");
    }

    #[test]
    fn density_matrices_are_sesquilinear(
        seed in any::<u64>(),
        l1 in 0.0..0.8f64,
        l2 in 0.0..0.8f64,
        phi in prop::collection::vec(complex_pair(), 3),
        vecs in prop::collection::vec(prop::collection::vec(complex_pair(), 3), 5),
        alpha in complex_pair(),
    ) {
        let bd = data(3, seed, &[l1, l2], cvec(&phi));
        let v: Vec<CVector> = vecs.iter().map(|x| cvec(x)).collect();
        let a = C64::new(alpha.0, alpha.1);
        let mix = &v[0] * a + &v[4];
        // Antilinear in the first slot, linear in the second.
        let lhs = bd.one_pdm(&v[1], &mix).unwrap();
        let rhs = bd.one_pdm(&v[1], &v[0]).unwrap() * a.conj() + bd.one_pdm(&v[1], &v[4]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let lhs = bd.one_pdm(&mix, &v[1]).unwrap();
        let rhs = bd.one_pdm(&v[0], &v[1]).unwrap() * a + bd.one_pdm(&v[4], &v[1]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let lhs = bd.two_pdm(&mix, &v[1], &v[2], &v[3]).unwrap();
        let rhs = bd.two_pdm(&v[0], &v[1], &v[2], &v[3]).unwrap() * a + bd.two_pdm(&v[4], &v[1], &v[2], &v[3]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        let lhs = bd.two_pdm(&v[1], &v[2], &v[3], &mix).unwrap();
        let rhs = bd.two_pdm(&v[1], &v[2], &v[3], &v[0]).unwrap() * a.conj() + bd.two_pdm(&v[1], &v[2], &v[3], &v[4]).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn truncation_defect_never_grows(
        seed in any::<u64>(),
        l1 in 0.0..0.6f64,
        l2 in 0.0..0.6f64,
        phi in prop::collection::vec(complex_pair(), 2),
    ) {
        let bd = data(2, seed, &[l1, l2], cvec(&phi));
        let loose = PrepConfig { defect_tolerance: 1.0, ..PrepConfig::default() };
        let mut last = f64::INFINITY;
        for n in 0..=12 {
            let b = Arc::new(OccupationBasis::build(2, n).unwrap());
            let defect = prepare_state(&b, &StateSpec::Bogolubov(bd.clone()), &loose).unwrap().defect;
            prop_assert!(defect <= last * (1.0 + 1e-12) + 1e-300, "n={n}: {defect} > {last}");
            last = defect;
        }
    }

    #[test]
    fn characterizations_hold_within_the_defect(
        phi in prop::collection::vec(complex_pair(), 2),
        lam in (0.0..0.15f64, 0.0..std::f64::consts::TAU),
        psi in prop::collection::vec(complex_pair(), 2),
    ) {
        let b = Arc::new(OccupationBasis::build(2, 14).unwrap());
        let phi = cvec(&phi) * c(0.8 / 2f64.sqrt());
        let st = prepare_state(&b, &StateSpec::Coherent(phi.clone()), &PrepConfig::default()).unwrap();
        let v = &st.vector.amplitudes;
        let r = lower_vector(&b, &phi, v) - v * c(phi.norm_squared());
        prop_assert!(r.norm() <= 10.0 * st.defect.sqrt() + 1e-14);

        let psi = cvec(&psi);
        prop_assume!(psi.norm() > 1e-3);
        let psi = &psi / c(psi.norm());
        let lambda = C64::from_polar(lam.0, lam.1);
        let st = prepare_state(&b, &StateSpec::Squeezed { lambda, psi: psi.clone() }, &PrepConfig::default()).unwrap();
        let v = &st.vector.amplitudes;
        let r = lower_vector(&b, &psi, v) + raise_vector(&b, &psi, v) * lambda;
        prop_assert!(r.norm() <= 10.0 * st.defect.sqrt() + 1e-14);
    }

    #[test]
    fn berezin_lieb_concave_and_convex(seed in any::<u64>(), tight in any::<bool>()) {
        let kind = if tight { FrameKind::Tight } else { FrameKind::Random };
        let mut rng = trial_rng(seed, 0);
        let (frame, symbol) = random_instance(&mut rng, 8, kind).unwrap();
        for mode in [Mode::Scalar, Mode::Operator] {
            let r = check_berezin_lieb(&frame, &symbol, |t| ScalarFunction::PairAmplitude.eval(t), mode, Shape::Concave).unwrap();
            prop_assert!(r.ok, "{r:?}");
            let r = check_berezin_lieb(&frame, &symbol, |t| ScalarFunction::PairVariance.eval(t), mode, Shape::Convex).unwrap();
            prop_assert!(r.ok, "{r:?}");
        }
    }

    #[test]
    fn berezin_trials_are_deterministic(seed in any::<u64>()) {
        let cfg = TrialConfig { trials: 12, max_dim: 6, seed, kind: FrameKind::Random };
        let a = run_berezin_lieb_trials(&cfg, ScalarFunction::PairAmplitude, Mode::Operator, Shape::Concave).unwrap();
        let b = run_berezin_lieb_trials(&cfg, ScalarFunction::PairAmplitude, Mode::Operator, Shape::Concave).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cutoff_kernel_is_below_g(eps in 0.0..3.0f64, p in 1e-4..1e4f64) {
        let k = MomentumKernel::new(eps).unwrap();
        prop_assert!(k.eval(p) <= g(p));
        prop_assert!(g(p) > 0.0);
        prop_assert!(g(p * 1.01) < g(p));
    }

    #[test]
    fn hardy_chain_dominates(seed in any::<u64>(), dim in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (basis, coeffs) = random_hardy_instance(&mut rng, dim);
        let h = hardy_check(&basis, &coeffs).unwrap();
        prop_assert!(h.holds, "{h:?}");
    }

    #[test]
    fn condensate_scaling_preserves_mass(n in 1.0..1e8f64) {
        let p = RadialProfile::gaussian(0.4, 20.0, 400).unwrap();
        let s = scale_condensate(&p, n).unwrap();
        prop_assert!((s.mass() - p.mass()).abs() <= 1e-12);
        prop_assert!((s.kinetic() - n.powf(0.4) * p.kinetic()).abs() <= 1e-8 * s.kinetic());
    }

    #[test]
    fn two_component_total_is_sum_of_terms(n in 1e3..1e12f64, eps in 0.0..0.5f64) {
        let p = RadialProfile::gaussian(0.3, 30.0, 600).unwrap();
        let r = assemble_bound(&p, &TrialParameters::new(n, eps).unwrap()).unwrap();
        let sum: f64 = r.terms.iter().filter(|t| t.kind != TermKind::Info).map(|t| t.value).sum();
        prop_assert!((r.total - sum).abs() <= 1e-12 * sum.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn moments_shrink_with_the_cutoff(e1 in 0.0..2.0f64, de in 0.01..1.0f64) {
        let a = radial_moments(e1).unwrap();
        let b = radial_moments(e1 + de).unwrap();
        prop_assert!(b.m0.value <= a.m0.value);
        prop_assert!(b.m2.value <= a.m2.value);
        prop_assert!(b.x.value <= a.x.value);
        prop_assert!(a.m0.value >= 0.0 && a.m2.value >= 0.0 && a.x.value >= 0.0);
    }

    #[test]
    fn neutrality_is_exact(log_rho in 1.0..9.0f64, eps in 0.005..1.0f64, l in 10.0..60.0f64, r in 0.2..2.0f64, cosine in any::<bool>()) {
        let rho = 10f64.powf(log_rho);
        let unit = rho.powf(-1.0 / 3.0);
        let shape = if cosine { RampShape::Cosine } else { RampShape::Smoothstep };
        let profile = EdgeProfile::new(l * unit, r * unit, rho, shape).unwrap();
        match build_gamma_symbol(&profile, eps, 9) {
            Ok(sym) => prop_assert!(sym.neutrality_residual <= 1e-12 * rho),
            Err(Error::Infeasible(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
