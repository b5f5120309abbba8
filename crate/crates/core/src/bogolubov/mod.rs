//! Closed-form description of displaced quasi-free (Bogolubov) states:
//! the data `(φ, γ₁, ξ₁)`, their compatibility relations, the pairing rule
//! and the one- and two-particle density matrices.

mod wick;

pub use wick::{pairing_count, wick_expectation, WickValue, MAX_WICK_LEN};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_residual, CMatrix, CVector, C64};

/// Largest one-body dimension handled by this module.
pub const MAX_DIM: usize = 64;

const GRAM_TOL: f64 = 1e-12;
const LAMBDA_MAX: f64 = 1.0 - 1e-9;
const DEGENERACY_TOL: f64 = 1e-10;
/// Threshold below which [`PairReport::ok`] holds.
pub const PAIR_TOL: f64 = 1e-10;

/// Orthonormal real pair states `ψ_α` with parameters `λ_α ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPairs {
    dim: usize,
    vectors: Vec<DVector<f64>>,
    lambdas: Vec<f64>,
}

impl SpectralPairs {
    pub fn new(dim: usize, vectors: Vec<DVector<f64>>, lambdas: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Domain(format!(
                "one-body dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if vectors.len() != lambdas.len() {
            return Err(Error::DimensionMismatch {
                expected: vectors.len(),
                found: lambdas.len(),
            });
        }
        for (a, (v, &l)) in vectors.iter().zip(&lambdas).enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if !(0.0..LAMBDA_MAX).contains(&l) {
                return Err(Error::Invariant {
                    index: a,
                    reason: format!("λ = {l} outside [0, 1 - 1e-9)"),
                });
            }
            if !v.iter().all(|x| x.is_finite()) {
                return Err(Error::Invariant {
                    index: a,
                    reason: "non-finite pair state".into(),
                });
            }
        }
        for a in 0..vectors.len() {
            for b in 0..=a {
                let g = vectors[a].dot(&vectors[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                if (g - target).abs() > GRAM_TOL {
                    return Err(Error::Invariant {
                        index: a,
                        reason: format!("Gram entry ({a},{b}) = {g} is not {target}"),
                    });
                }
            }
        }
        Ok(Self {
            dim,
            vectors,
            lambdas,
        })
    }

    /// No pairs: pure coherent data.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::new(dim, Vec::new(), Vec::new())
    }

    /// Inverse of the map `λ ↦ λ²/(1-λ²)`: eigen-decompose a real PSD `γ`
    /// and read off `λ = √(g/(1+g))` for every eigenvalue `g`.
    ///
    /// Eigenvectors of (numerically) equal eigenvalues are replaced by the
    /// Gram-Schmidt orthonormalization of the projected standard basis, in
    /// index order, so the result does not depend on the eigensolver.
    pub fn from_gamma(gamma: &DMatrix<f64>) -> Result<Self> {
        let d = gamma.nrows();
        if gamma.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: gamma.ncols(),
            });
        }
        let asym = (gamma - gamma.transpose()).amax();
        if asym > 1e-12 {
            return Err(Error::NotHermitian { residual: asym });
        }
        let eig = SymmetricEigen::try_new(gamma.clone(), f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

        let mut vectors = Vec::with_capacity(d);
        let mut lambdas = Vec::with_capacity(d);
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d
                && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < DEGENERACY_TOL
            {
                end += 1;
            }
            let group = &order[start..end];
            let g = group.iter().map(|&i| eig.eigenvalues[i]).sum::<f64>() / group.len() as f64;
            if g < -1e-10 {
                return Err(Error::Domain(format!("γ has negative eigenvalue {g}")));
            }
            let g = g.max(0.0);
            let lambda = (g / (1.0 + g)).sqrt();
            for v in canonical_eigenbasis(&eig.eigenvectors, group, d) {
                vectors.push(v);
                lambdas.push(lambda);
            }
            start = end;
        }
        Self::new(d, vectors, lambdas)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    /// `(λ_α, ψ_α)` with `ψ_α` promoted to complex coefficients.
    pub fn iter(&self) -> impl Iterator<Item = (f64, CVector)> + '_ {
        self.lambdas
            .iter()
            .zip(&self.vectors)
            .map(|(&l, v)| (l, v.map(|x| C64::new(x, 0.0))))
    }

    /// `Σ λ²/(1-λ²)`, the trace of `γ₁`.
    pub fn occupation_sum(&self) -> f64 {
        self.lambdas.iter().map(|l| l * l / (1.0 - l * l)).sum()
    }
}

fn canonical_eigenbasis(vecs: &DMatrix<f64>, group: &[usize], d: usize) -> Vec<DVector<f64>> {
    let mut projector = DMatrix::<f64>::zeros(d, d);
    for &i in group {
        let v = vecs.column(i);
        projector += v * v.transpose();
    }
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(group.len());
    for k in 0..d {
        if out.len() == group.len() {
            break;
        }
        let mut w = projector.column(k).into_owned();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for u in &out {
                let p = u.dot(&w);
                w -= u * p;
            }
        }
        let n = w.norm();
        if n > 1e-6 {
            out.push(w / n);
        }
    }
    out
}

/// Residuals of the relations tying `γ₁` and `ξ₁` together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairReport {
    pub ok: bool,
    /// `‖ξ*ξ − γ(γ+1)‖`
    pub relation: f64,
    /// `‖ξγ − γξ‖`
    pub commutation: f64,
    /// `‖ΓDΓ − Γ‖` with `D = diag(−1, 1)`
    pub symplectic: f64,
}

/// Check the compatibility relations of a pair `(γ₁, ξ₁)` (Frobenius norms).
pub fn validate_pair(gamma: &CMatrix, xi: &CMatrix) -> PairReport {
    let d = gamma.nrows();
    if gamma.shape() != (d, d) || xi.shape() != (d, d) {
        return PairReport {
            ok: false,
            relation: f64::INFINITY,
            commutation: f64::INFINITY,
            symplectic: f64::INFINITY,
        };
    }
    let id = CMatrix::identity(d, d);
    let relation = (xi.adjoint() * xi - gamma * (gamma + &id)).norm();
    let commutation = (xi * gamma - gamma * xi).norm();
    let block = symplectic_block(gamma, xi);
    let mut dmat = CMatrix::identity(2 * d, 2 * d);
    for i in 0..d {
        dmat[(i, i)] = C64::new(-1.0, 0.0);
    }
    let symplectic = (&block * dmat * &block - &block).norm();
    PairReport {
        ok: relation <= PAIR_TOL && commutation <= PAIR_TOL && symplectic <= PAIR_TOL,
        relation,
        commutation,
        symplectic,
    }
}

/// `Γ = [[γ, ξ], [ξ*, 1+γ]]`.
pub fn symplectic_block(gamma: &CMatrix, xi: &CMatrix) -> CMatrix {
    let d = gamma.nrows();
    let mut block = CMatrix::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(gamma);
    block.view_mut((0, d), (d, d)).copy_from(xi);
    block.view_mut((d, 0), (d, d)).copy_from(&xi.adjoint());
    block
        .view_mut((d, d), (d, d))
        .copy_from(&(gamma + CMatrix::identity(d, d)));
    block
}

/// Condensate vector plus pair data, with the derived `γ₁` and `ξ₁`.
#[derive(Debug, Clone)]
pub struct BogolubovData {
    phi: CVector,
    pairs: SpectralPairs,
    gamma1: CMatrix,
    xi1: CMatrix,
}

impl BogolubovData {
    /// `γ₁ = Σ λ²/(1-λ²) |ψ⟩⟨ψ|`, `ξ₁ = Σ −λ/(1-λ²) ψψᵀ`.
    pub fn from_spectral(pairs: SpectralPairs, phi: CVector) -> Result<Self> {
        let d = pairs.dim();
        if phi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: phi.len(),
            });
        }
        let mut gamma1 = CMatrix::zeros(d, d);
        let mut xi1 = CMatrix::zeros(d, d);
        for (l, psi) in pairs.iter() {
            let denom = 1.0 - l * l;
            let outer = &psi * psi.transpose();
            gamma1 += &outer * C64::new(l * l / denom, 0.0);
            xi1 += &outer * C64::new(-l / denom, 0.0);
        }
        let report = validate_pair(&gamma1, &xi1);
        if !report.ok {
            return Err(Error::Invariant {
                index: 0,
                reason: format!("pair relations fail: {report:?}"),
            });
        }
        Ok(Self {
            phi,
            pairs,
            gamma1,
            xi1,
        })
    }

    pub fn phi(&self) -> &CVector {
        &self.phi
    }

    pub fn pairs(&self) -> &SpectralPairs {
        &self.pairs
    }

    pub fn gamma1(&self) -> &CMatrix {
        &self.gamma1
    }

    pub fn xi1(&self) -> &CMatrix {
        &self.xi1
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn symplectic_block(&self) -> CMatrix {
        symplectic_block(&self.gamma1, &self.xi1)
    }

    /// `ξ₁(f, g) = fᵀ ξ g`, bilinear.
    pub fn xi(&self, f: &CVector, g: &CVector) -> C64 {
        (f.transpose() * &self.xi1 * g)[(0, 0)]
    }

    /// `(v, γ₁ u)`.
    pub fn gamma(&self, v: &CVector, u: &CVector) -> C64 {
        v.dotc(&(&self.gamma1 * u))
    }

    fn check(&self, vs: &[&CVector]) -> Result<()> {
        for v in vs {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim(),
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    /// `⟨a*(u) a(v)⟩ = (v, γ₁u) + (v, φ)(φ, u)`.
    pub fn one_pdm(&self, u: &CVector, v: &CVector) -> Result<C64> {
        self.check(&[u, v])?;
        Ok(self.gamma(v, u) + v.dotc(&self.phi) * self.phi.dotc(u))
    }

    /// The ten terms of `⟨a*(u₁) a*(u₂) a(v₂) a(v₁)⟩`.
    pub fn two_pdm_terms(
        &self,
        u1: &CVector,
        u2: &CVector,
        v2: &CVector,
        v1: &CVector,
    ) -> Result<[TwoPdmTerm; 10]> {
        self.check(&[u1, u2, v2, v1])?;
        let phi = &self.phi;
        let (v1p, v2p) = (v1.dotc(phi), v2.dotc(phi));
        let (pu1, pu2) = (phi.dotc(u1), phi.dotc(u2));
        let xi_u = self.xi(u1, u2);
        let xi_v = self.xi(v1, v2).conj();
        let g11 = self.gamma(v1, u1);
        let g12 = self.gamma(v1, u2);
        let g21 = self.gamma(v2, u1);
        let g22 = self.gamma(v2, u2);
        let t = |name, value| TwoPdmTerm { name, value };
        Ok([
            t("condensate", v1p * v2p * pu1 * pu2),
            t("pair_creation", xi_u * v1p * v2p),
            t("pair_annihilation", xi_v * pu1 * pu2),
            t("mixed_v2u1", g21 * v1p * pu2),
            t("mixed_v1u2", g12 * v2p * pu1),
            t("mixed_v2u2", g22 * v1p * pu1),
            t("mixed_v1u1", g11 * v2p * pu2),
            t("direct", g11 * g22),
            t("exchange", g12 * g21),
            t("pairing", xi_v * xi_u),
        ])
    }

    pub fn two_pdm(&self, u1: &CVector, u2: &CVector, v2: &CVector, v1: &CVector) -> Result<C64> {
        Ok(self
            .two_pdm_terms(u1, u2, v2, v1)?
            .iter()
            .map(|t| t.value)
            .sum())
    }

    /// Ordered two-point function of the undisplaced quasi-free state.
    pub fn quasi_free_two_point(&self, x: &Ladder, y: &Ladder) -> C64 {
        match (x, y) {
            (Ladder::Create(f), Ladder::Annihilate(g)) => self.gamma(g, f),
            (Ladder::Annihilate(f), Ladder::Create(g)) => self.gamma(f, g) + f.dotc(g),
            (Ladder::Create(f), Ladder::Create(g)) => self.xi(f, g),
            (Ladder::Annihilate(f), Ladder::Annihilate(g)) => self.xi(f, g).conj(),
        }
    }

    /// `⟨Σ T_{αβ} a*_α a_β + ½ Σ W a*_α a*_β a_ν a_μ⟩` in the standard basis.
    pub fn quadratic_expectation(&self, t: &CMatrix, w: &CMatrix) -> Result<f64> {
        let d = self.dim();
        if t.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: t.nrows(),
            });
        }
        if w.shape() != (d * d, d * d) {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: w.nrows(),
            });
        }
        let residual = hermitian_residual(t).max(hermitian_residual(w));
        if residual > 1e-12 {
            return Err(Error::NotHermitian { residual });
        }
        let swap = crate::fock::ops::swap_residual(w, d);
        if swap > 1e-12 {
            return Err(Error::SwapAsymmetry { residual: swap });
        }
        let phi = &self.phi;
        let one = (t * &self.gamma1).trace() + phi.dotc(&(t * phi));

        let basis: Vec<CVector> = (0..d)
            .map(|i| {
                let mut e = CVector::zeros(d);
                e[i] = C64::new(1.0, 0.0);
                e
            })
            .collect();
        let mut two = C64::new(0.0, 0.0);
        for a in 0..d {
            for b in 0..d {
                for m in 0..d {
                    for n in 0..d {
                        let wv = w[(a * d + b, m * d + n)];
                        if wv == C64::new(0.0, 0.0) {
                            continue;
                        }
                        two += wv * self.two_pdm(&basis[a], &basis[b], &basis[n], &basis[m])?;
                    }
                }
            }
        }
        Ok((one + two * 0.5).re)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPdmTerm {
    pub name: &'static str,
    pub value: C64,
}

/// A creation or annihilation operator with its one-body argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Ladder {
    Create(CVector),
    Annihilate(CVector),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(lambda: f64) -> BogolubovData {
        let pairs =
            SpectralPairs::new(1, vec![DVector::from_vec(vec![1.0])], vec![lambda]).unwrap();
        BogolubovData::from_spectral(pairs, CVector::zeros(1)).unwrap()
    }

    #[test]
    fn zero_lambda_gives_zero_data() {
        let pairs = SpectralPairs::new(
            2,
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![0.0, 1.0]),
            ],
            vec![0.0, 0.0],
        )
        .unwrap();
        let data = BogolubovData::from_spectral(pairs, CVector::zeros(2)).unwrap();
        assert_eq!(data.gamma1().norm(), 0.0);
        assert_eq!(data.xi1().norm(), 0.0);
    }

    #[test]
    fn half_lambda_values() {
        let data = single(0.5);
        assert!((data.gamma1()[(0, 0)].re - 1.0 / 3.0).abs() < 1e-15);
        assert!((data.xi1()[(0, 0)].re + 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_map_roundtrip() {
        let gamma = DMatrix::from_vec(1, 1, vec![1.0 / 3.0]);
        let pairs = SpectralPairs::from_gamma(&gamma).unwrap();
        assert!((pairs.lambdas()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn degenerate_eigenbasis_is_canonical() {
        let gamma = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.2, 0.5]));
        let pairs = SpectralPairs::from_gamma(&gamma).unwrap();
        let v = pairs.vectors();
        assert!((v[0][0].abs() - 1.0).abs() < 1e-12);
        assert!((v[1][1].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validate_detects_perturbation() {
        let data = single(0.5);
        assert!(validate_pair(data.gamma1(), data.xi1()).ok);
        let mut xi = data.xi1().clone();
        xi[(0, 0)] += C64::new(1e-3, 0.0);
        let r = validate_pair(data.gamma1(), &xi);
        assert!(!r.ok);
        assert!(r.relation > 5e-4 && r.relation < 5e-3);
    }

    #[test]
    fn rejects_bad_gram() {
        let err = SpectralPairs::new(
            2,
            vec![
                DVector::from_vec(vec![1.0, 0.0]),
                DVector::from_vec(vec![0.1, 1.0]),
            ],
            vec![0.1, 0.2],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invariant { index: 1, .. }));
    }

    #[test]
    fn rejects_lambda_one() {
        let err = SpectralPairs::new(1, vec![DVector::from_vec(vec![1.0])], vec![1.0]).unwrap_err();
        assert!(matches!(err, Error::Invariant { index: 0, .. }));
    }

    #[test]
    fn single_mode_quartic() {
        let data = single(0.5);
        let e = CVector::from_vec(vec![C64::new(1.0, 0.0)]);
        let v = data.two_pdm(&e, &e, &e, &e).unwrap();
        assert!((v.re - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn coherent_quartic() {
        let z = C64::new(0.6, -0.3);
        let data = BogolubovData::from_spectral(
            SpectralPairs::empty(1).unwrap(),
            CVector::from_vec(vec![z]),
        )
        .unwrap();
        let e = CVector::from_vec(vec![C64::new(1.0, 0.0)]);
        let v = data.two_pdm(&e, &e, &e, &e).unwrap();
        assert!((v - C64::new(z.norm_sqr().powi(2), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn number_expectation() {
        let pairs = SpectralPairs::new(
            2,
            vec![
                DVector::from_vec(vec![0.6, 0.8]),
                DVector::from_vec(vec![-0.8, 0.6]),
            ],
            vec![0.3, 0.2],
        )
        .unwrap();
        let phi = CVector::from_vec(vec![C64::new(0.5, 0.1), C64::new(-0.2, 0.3)]);
        let data = BogolubovData::from_spectral(pairs.clone(), phi.clone()).unwrap();
        let n = data
            .quadratic_expectation(&CMatrix::identity(2, 2), &CMatrix::zeros(4, 4))
            .unwrap();
        assert!((n - phi.norm_squared() - pairs.occupation_sum()).abs() < 1e-14);
    }
}
