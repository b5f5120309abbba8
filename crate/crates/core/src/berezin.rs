//! Finite-frame Berezin-Lieb inequalities and operator-concavity probes.

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_matrix_function, c, hermitian_eigen, max_abs_diff, max_eigenvalue, min_eigenvalue,
    random_psd, CMatrix, CVector, C64,
};

/// Slack allowed on either side of an inequality.
pub const INEQUALITY_TOL: f64 = 1e-10;

/// Weighted family of vectors `ω_i` with frame operator `S = Σ μ_i |ω_i⟩⟨ω_i| ≤ I`.
#[derive(Debug, Clone)]
pub struct Frame {
    vectors: Vec<CVector>,
    weights: Vec<f64>,
    dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameKind {
    Random,
    Tight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Scalar,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Concave,
    Convex,
}

/// Named scalar functions used by the checks and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarFunction {
    Identity,
    Sqrt,
    /// `√(t(t+1)) − t`
    PairAmplitude,
    /// `t(t+1)`
    PairVariance,
    Square,
}

impl ScalarFunction {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            Self::Identity => t,
            Self::Sqrt => t.sqrt(),
            // Rationalized form, accurate for large t.
            Self::PairAmplitude if t <= 0.0 => 0.0,
            Self::PairAmplitude => t / ((t * (t + 1.0)).sqrt() + t),
            Self::PairVariance => t * (t + 1.0),
            Self::Square => t * t,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Identity => "t",
            Self::Sqrt => "sqrt(t)",
            Self::PairAmplitude => "sqrt(t(t+1))-t",
            Self::PairVariance => "t(t+1)",
            Self::Square => "t^2",
        }
    }
}

impl Frame {
    pub fn new(dim: usize, vectors: Vec<CVector>, weights: Vec<f64>) -> Result<Self> {
        if vectors.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: weights.len(),
            });
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(Error::Invariant {
                index: i,
                reason: format!("weight {} is not a nonnegative number", weights[i]),
            });
        }
        let frame = Self {
            vectors,
            weights,
            dim,
        };
        let top = max_eigenvalue(&frame.frame_operator())?;
        if top > 1.0 + 1e-12 {
            return Err(Error::Infeasible(format!(
                "frame operator norm {top} exceeds 1"
            )));
        }
        Ok(frame)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn frame_operator(&self) -> CMatrix {
        quantize_unchecked(self, |_| 1.0)
    }

    /// Analysis operator into `ℓ²` with the weights absorbed:
    /// row `i` is `√μ_i ω_i^H`, so that `U^H U = S`.
    pub fn analysis_operator(&self) -> CMatrix {
        let mut u = CMatrix::zeros(self.len(), self.dim);
        for (i, (v, &w)) in self.vectors.iter().zip(&self.weights).enumerate() {
            let s = w.sqrt();
            for j in 0..self.dim {
                u[(i, j)] = v[j].conj() * s;
            }
        }
        u
    }
}

/// Random frame (rescaled so that `‖S‖ = 1`) or tight frame (`S = I`).
pub fn make_frame<R: Rng>(rng: &mut R, dim: usize, count: usize, kind: FrameKind) -> Result<Frame> {
    if dim == 0 || count == 0 {
        return Err(Error::Domain(
            "frame needs a positive dimension and count".into(),
        ));
    }
    let gaussian = |rng: &mut R| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    match kind {
        FrameKind::Random => {
            let vectors: Vec<CVector> = (0..count)
                .map(|_| CVector::from_fn(dim, |_, _| gaussian(rng)))
                .collect();
            let weights: Vec<f64> = (0..count).map(|_| rng.gen_range(0.1..1.0)).collect();
            let raw = Frame {
                vectors,
                weights,
                dim,
            };
            let top = max_eigenvalue(&raw.frame_operator())?;
            let weights = raw.weights.iter().map(|w| w / top).collect();
            Frame::new(dim, raw.vectors, weights)
        }
        FrameKind::Tight => {
            if count < dim {
                return Err(Error::Infeasible(format!(
                    "tight frame in dimension {dim} needs at least {dim} vectors, got {count}"
                )));
            }
            let g = CMatrix::from_fn(count, dim, |_, _| gaussian(rng));
            // Orthonormal columns: the rows of q^H give a Parseval frame.
            let q = QR::new(g).q();
            let mut vectors = Vec::with_capacity(count);
            let mut weights = Vec::with_capacity(count);
            for i in 0..count {
                let mu: f64 = rng.gen_range(0.5..1.5);
                let col = CVector::from_fn(dim, |j, _| q[(i, j)].conj());
                vectors.push(col / c(mu.sqrt()));
                weights.push(mu);
            }
            Frame::new(dim, vectors, weights)
        }
    }
}

fn quantize_unchecked<F: Fn(usize) -> f64>(frame: &Frame, f: F) -> CMatrix {
    let mut m = CMatrix::zeros(frame.dim, frame.dim);
    for (i, (v, &w)) in frame.vectors.iter().zip(&frame.weights).enumerate() {
        let coeff = f(i) * w;
        if coeff != 0.0 {
            m += v * v.adjoint() * c(coeff);
        }
    }
    m
}

/// `Σ f_i μ_i |ω_i⟩⟨ω_i|`.
pub fn quantize_symbol(frame: &Frame, symbol: &[f64]) -> Result<CMatrix> {
    check_symbol(frame, symbol)?;
    Ok(quantize_unchecked(frame, |i| symbol[i]))
}

fn check_symbol(frame: &Frame, symbol: &[f64]) -> Result<()> {
    if symbol.len() != frame.len() {
        return Err(Error::DimensionMismatch {
            expected: frame.len(),
            found: symbol.len(),
        });
    }
    if let Some(i) = symbol.iter().position(|f| !(*f >= 0.0 && f.is_finite())) {
        return Err(Error::Invariant {
            index: i,
            reason: format!("symbol value {} is not a nonnegative number", symbol[i]),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerezinLiebReport {
    pub mode: Mode,
    pub shape: Shape,
    /// Oriented so that the inequality holds iff `margin ≥ −1e-10`.
    pub margin: f64,
    pub ok: bool,
}

/// Concave: `Tr ξ(Q_f) ≥ Σ μ ξ(f)‖ω‖²` (scalar) or `ξ(Q_f) ≥ Q_{ξ∘f}` (operator).
/// Convex reverses both.
pub fn check_berezin_lieb<F: Fn(f64) -> f64>(
    frame: &Frame,
    symbol: &[f64],
    xi: F,
    mode: Mode,
    shape: Shape,
) -> Result<BerezinLiebReport> {
    check_symbol(frame, symbol)?;
    let x0 = xi(0.0);
    match shape {
        Shape::Concave if x0 < 0.0 => {
            return Err(Error::Domain(format!(
                "concave case needs ξ(0) ≥ 0, got {x0}"
            )));
        }
        Shape::Convex if x0 > 0.0 => {
            return Err(Error::Domain(format!(
                "convex case needs ξ(0) ≤ 0, got {x0}"
            )));
        }
        _ => {}
    }
    let q = quantize_unchecked(frame, |i| symbol[i]);
    let lhs = apply_matrix_function(&q, &xi)?;
    let sign = match shape {
        Shape::Concave => 1.0,
        Shape::Convex => -1.0,
    };
    let margin = match mode {
        Mode::Scalar => {
            let upper = lhs.trace().re;
            let lower: f64 = frame
                .vectors
                .iter()
                .zip(&frame.weights)
                .zip(symbol)
                .map(|((v, &w), &f)| w * xi(f) * v.norm_squared())
                .sum();
            sign * (upper - lower)
        }
        Mode::Operator => {
            let rhs = quantize_unchecked(frame, |i| xi(symbol[i]));
            min_eigenvalue(&((lhs - rhs) * c(sign)))?
        }
    };
    Ok(BerezinLiebReport {
        mode,
        shape,
        margin,
        ok: margin >= -INEQUALITY_TOL,
    })
}

/// Unitarity and half-sum residuals of the two block dilations built from
/// the analysis operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DilationReport {
    pub unitarity_u: f64,
    pub unitarity_v: f64,
    pub half_sum: f64,
    pub intertwining: f64,
}

/// `(√(I − U*U), √(I − UU*))` from one singular value decomposition, so that
/// the intertwining `U√(I − U*U) = √(I − UU*)U` holds to rounding even when
/// `‖U‖ = 1`.
fn defect_operators(u: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (m, d) = (u.nrows(), u.ncols());
    let svd = u
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("SVD of the analysis operator did not converge".into()))?;
    let (w, vt) = match (svd.u, svd.v_t) {
        (Some(w), Some(vt)) => (w, vt),
        _ => return Err(Error::Eigen("SVD factors missing".into())),
    };
    let v = vt.adjoint();
    let root = CVector::from_iterator(
        svd.singular_values.len(),
        svd.singular_values
            .iter()
            .map(|&s| c(((1.0 - s) * (1.0 + s)).max(0.0).sqrt())),
    );
    let side = |q: &CMatrix, n: usize| {
        let proj = q * q.adjoint();
        CMatrix::identity(n, n) - &proj + q * CMatrix::from_diagonal(&root) * q.adjoint()
    };
    Ok((side(&v, d), side(&w, m)))
}

pub fn check_dilation(frame: &Frame, symbol: &[f64]) -> Result<DilationReport> {
    check_symbol(frame, symbol)?;
    let u = frame.analysis_operator();
    let (m, d) = (u.nrows(), u.ncols());
    let (a, b) = defect_operators(&u)?;
    let intertwining = max_abs_diff(&(&b * &u), &(&u * &a));

    let assemble = |sign_tr: f64, sign_br: f64| {
        let mut w = CMatrix::zeros(d + m, d + m);
        w.view_mut((0, 0), (d, d)).copy_from(&a);
        w.view_mut((0, d), (d, m))
            .copy_from(&(u.adjoint() * c(sign_tr)));
        w.view_mut((d, 0), (m, d)).copy_from(&u);
        w.view_mut((d, d), (m, m)).copy_from(&(&b * c(sign_br)));
        w
    };
    let big_u = assemble(-1.0, 1.0);
    let big_v = assemble(1.0, -1.0);
    let id = CMatrix::identity(d + m, d + m);
    let unitarity = |w: &CMatrix| {
        max_abs_diff(&(w.adjoint() * w), &id).max(max_abs_diff(&(w * w.adjoint()), &id))
    };

    let mut bb = CMatrix::zeros(d + m, d + m);
    for (i, &f) in symbol.iter().enumerate() {
        bb[(d + i, d + i)] = c(f);
    }
    let mult = CMatrix::from_diagonal(&CVector::from_iterator(m, symbol.iter().map(|&f| c(f))));
    let half = (big_u.adjoint() * &bb * &big_u + big_v.adjoint() * &bb * &big_v) * c(0.5);
    let mut expected = CMatrix::zeros(d + m, d + m);
    expected
        .view_mut((0, 0), (d, d))
        .copy_from(&(u.adjoint() * &mult * &u));
    expected
        .view_mut((d, d), (m, m))
        .copy_from(&(&b * &mult * &b));

    Ok(DilationReport {
        unitarity_u: unitarity(&big_u),
        unitarity_v: unitarity(&big_v),
        half_sum: max_abs_diff(&half, &expected),
        intertwining,
    })
}

/// Deterministic generator for trial `index` of a seeded batch.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub max_dim: usize,
    pub seed: u64,
    pub kind: FrameKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub function: &'static str,
    pub mode: Mode,
    pub shape: Shape,
    pub trials: usize,
    pub failures: usize,
    pub worst_margin: f64,
    pub max_dilation_residual: f64,
}

/// Random frames of dimension `1..=max_dim` with random nonnegative symbols.
pub fn random_instance(
    rng: &mut ChaCha8Rng,
    max_dim: usize,
    kind: FrameKind,
) -> Result<(Frame, Vec<f64>)> {
    let dim = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(dim..=3 * dim);
    let frame = make_frame(rng, dim, count, kind)?;
    let scale = rng.gen_range(0.1..4.0);
    let symbol = (0..count).map(|_| scale * rng.gen::<f64>()).collect();
    Ok((frame, symbol))
}

/// Batch of Berezin-Lieb checks run in parallel, merged by trial index.
pub fn run_berezin_lieb_trials(
    cfg: &TrialConfig,
    function: ScalarFunction,
    mode: Mode,
    shape: Shape,
) -> Result<TrialSummary> {
    if cfg.max_dim == 0 {
        return Err(Error::Domain("max_dim must be positive".into()));
    }
    let results: Vec<(f64, f64)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(cfg.seed, i as u64);
            let (frame, symbol) = random_instance(&mut rng, cfg.max_dim, cfg.kind)?;
            let report = check_berezin_lieb(&frame, &symbol, |t| function.eval(t), mode, shape)?;
            let dil = check_dilation(&frame, &symbol)?;
            Ok((
                report.margin,
                dil.unitarity_u.max(dil.unitarity_v).max(dil.half_sum),
            ))
        })
        .collect::<Result<_>>()?;
    Ok(TrialSummary {
        function: function.label(),
        mode,
        shape,
        trials: cfg.trials,
        failures: results.iter().filter(|(m, _)| *m < -INEQUALITY_TOL).count(),
        worst_margin: results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min),
        max_dilation_residual: results.iter().map(|r| r.1).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub function: &'static str,
    pub dim: usize,
    pub trials: usize,
    pub worst_margin: f64,
    pub counterexamples: Vec<Counterexample>,
    pub concave_consistent: bool,
}

/// Midpoint concavity `ξ((A+B)/2) ≥ (ξ(A)+ξ(B))/2` on random PSD pairs.
pub fn probe_operator_concavity(
    function: ScalarFunction,
    dim: usize,
    trials: usize,
    seed: u64,
) -> Result<ConcavityReport> {
    if dim == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let margins: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let rank_a = rng.gen_range(1..=dim);
            let rank_b = rng.gen_range(1..=dim);
            let sa = rng.gen_range(0.05..3.0);
            let sb = rng.gen_range(0.05..3.0);
            let a = random_psd(&mut rng, dim, rank_a, sa);
            let b = random_psd(&mut rng, dim, rank_b, sb);
            let xi = |t: f64| function.eval(t);
            let mid = apply_matrix_function(&((&a + &b) * c(0.5)), xi)?;
            let avg = (apply_matrix_function(&a, xi)? + apply_matrix_function(&b, xi)?) * c(0.5);
            let (vals, _) = hermitian_eigen(&(mid - avg))?;
            Ok(vals[0])
        })
        .collect::<Result<_>>()?;
    let counterexamples: Vec<Counterexample> = margins
        .iter()
        .enumerate()
        .filter(|(_, &m)| m < -INEQUALITY_TOL)
        .map(|(trial, &margin)| Counterexample { trial, margin })
        .collect();
    Ok(ConcavityReport {
        function: function.label(),
        dim,
        trials,
        worst_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        concave_consistent: counterexamples.is_empty(),
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vector_frame() {
        let f = Frame::new(1, vec![CVector::from_vec(vec![c(2.0)])], vec![0.25]).unwrap();
        assert!((f.frame_operator()[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tight_frame_is_parseval() {
        let mut rng = trial_rng(5, 0);
        let f = make_frame(&mut rng, 4, 9, FrameKind::Tight).unwrap();
        let (vals, _) = hermitian_eigen(&f.frame_operator()).unwrap();
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn tight_frame_needs_enough_vectors() {
        let mut rng = trial_rng(5, 0);
        assert!(matches!(
            make_frame(&mut rng, 4, 3, FrameKind::Tight),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn random_frame_is_contraction() {
        let mut rng = trial_rng(6, 0);
        let f = make_frame(&mut rng, 5, 7, FrameKind::Random).unwrap();
        assert!(max_eigenvalue(&f.frame_operator()).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn quantize_trace() {
        let mut rng = trial_rng(7, 0);
        let (frame, symbol) = random_instance(&mut rng, 5, FrameKind::Random).unwrap();
        let q = quantize_symbol(&frame, &symbol).unwrap();
        let expected: f64 = frame
            .vectors()
            .iter()
            .zip(frame.weights())
            .zip(&symbol)
            .map(|((v, w), f)| f * w * v.norm_squared())
            .sum();
        assert!((q.trace().re - expected).abs() < 1e-12);
    }

    #[test]
    fn constant_symbol_on_tight_frame_is_equality() {
        let mut rng = trial_rng(8, 0);
        let frame = make_frame(&mut rng, 3, 6, FrameKind::Tight).unwrap();
        let symbol = vec![0.7; 6];
        for mode in [Mode::Scalar, Mode::Operator] {
            let r = check_berezin_lieb(
                &frame,
                &symbol,
                |t| ScalarFunction::PairAmplitude.eval(t),
                mode,
                Shape::Concave,
            )
            .unwrap();
            assert!(r.margin.abs() < 1e-12, "{mode:?}: {}", r.margin);
        }
    }

    #[test]
    fn negative_symbol_rejected() {
        let frame = Frame::new(1, vec![CVector::from_vec(vec![c(1.0)])], vec![1.0]).unwrap();
        assert!(quantize_symbol(&frame, &[-1.0]).is_err());
    }

    #[test]
    fn concave_hypothesis_enforced() {
        let frame = Frame::new(1, vec![CVector::from_vec(vec![c(1.0)])], vec![1.0]).unwrap();
        let err = check_berezin_lieb(&frame, &[1.0], |t| t - 1.0, Mode::Scalar, Shape::Concave);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn pair_amplitude_matches_naive_form() {
        for t in [0.0f64, 1e-3, 0.5, 3.0, 40.0] {
            let naive = (t * (t + 1.0)).sqrt() - t;
            assert!((ScalarFunction::PairAmplitude.eval(t) - naive).abs() < 1e-13);
        }
    }
}
