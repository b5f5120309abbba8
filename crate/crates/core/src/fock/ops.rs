use std::sync::Arc;

use super::basis::OccupationBasis;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_residual, CMatrix, CVector, C64};

/// Largest basis on which dense operator matrices are built.
pub const OPERATOR_CAP: usize = 4_096;

const HERMITIAN_TOL: f64 = 1e-12;

/// State vector on a fixed occupation basis.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub basis: Arc<OccupationBasis>,
    pub amplitudes: CVector,
}

/// Dense operator on a fixed occupation basis.
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub basis: Arc<OccupationBasis>,
    pub matrix: CMatrix,
}

impl FockVector {
    pub fn vacuum(basis: Arc<OccupationBasis>) -> Self {
        let mut amplitudes = CVector::zeros(basis.len());
        amplitudes[0] = C64::new(1.0, 0.0);
        Self { basis, amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// Probability mass in each particle-number sector.
    pub fn sector_masses(&self) -> Vec<f64> {
        sector_masses(&self.basis, &self.amplitudes)
    }

    /// Inner product antilinear in `self`.
    pub fn overlap(&self, other: &FockVector) -> Result<C64> {
        same_basis(&self.basis, &other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

pub(crate) fn sector_masses(basis: &OccupationBasis, v: &CVector) -> Vec<f64> {
    (0..=basis.max_total())
        .map(|n| basis.sector(n).map(|i| v[i].norm_sqr()).sum())
        .collect()
}

impl FockOperator {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        same_basis(&self.basis, &v.basis)?;
        Ok(FockVector {
            basis: self.basis.clone(),
            amplitudes: &self.matrix * &v.amplitudes,
        })
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            basis: self.basis.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator> {
        same_basis(&self.basis, &other.basis)?;
        Ok(FockOperator {
            basis: self.basis.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }
}

fn same_basis(a: &OccupationBasis, b: &OccupationBasis) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch)
    }
}

fn check_operator_size(basis: &OccupationBasis) -> Result<()> {
    if basis.len() > OPERATOR_CAP {
        return Err(Error::Sizing {
            what: "dense Fock operator",
            count: basis.len(),
            cap: OPERATOR_CAP,
        });
    }
    Ok(())
}

fn check_mode_vector(basis: &OccupationBasis, f: &CVector) -> Result<()> {
    if f.len() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: f.len(),
        });
    }
    Ok(())
}

/// `a*(f) v`, dropping components pushed past the truncation.
pub fn raise_vector(basis: &OccupationBasis, f: &CVector, v: &CVector) -> CVector {
    let mut out = CVector::zeros(basis.len());
    for s in 0..basis.len() {
        let amp = v[s];
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        let occ = basis.occupation(s);
        for (mode, &fi) in f.iter().enumerate() {
            if let Some(t) = basis.raised(s, mode) {
                out[t] += fi * amp * (occ[mode] as f64 + 1.0).sqrt();
            }
        }
    }
    out
}

/// `a(f) v`, antilinear in `f`.
pub fn lower_vector(basis: &OccupationBasis, f: &CVector, v: &CVector) -> CVector {
    let mut out = CVector::zeros(basis.len());
    for s in 0..basis.len() {
        let amp = v[s];
        if amp == C64::new(0.0, 0.0) {
            continue;
        }
        let occ = basis.occupation(s);
        for (mode, &fi) in f.iter().enumerate() {
            if let Some(t) = basis.lowered(s, mode) {
                out[t] += fi.conj() * amp * (occ[mode] as f64).sqrt();
            }
        }
    }
    out
}

/// Matrix of the creation operator `a*(f)` (linear in `f`).
/// The annihilation operator `a(f)` is its adjoint.
pub fn creation(basis: &Arc<OccupationBasis>, f: &CVector) -> Result<FockOperator> {
    check_operator_size(basis)?;
    check_mode_vector(basis, f)?;
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for s in 0..n {
        let occ = basis.occupation(s);
        for (mode, &fi) in f.iter().enumerate() {
            if let Some(t) = basis.raised(s, mode) {
                m[(t, s)] += fi * (occ[mode] as f64 + 1.0).sqrt();
            }
        }
    }
    Ok(FockOperator {
        basis: basis.clone(),
        matrix: m,
    })
}

pub fn annihilation(basis: &Arc<OccupationBasis>, f: &CVector) -> Result<FockOperator> {
    Ok(creation(basis, f)?.adjoint())
}

/// Particle number operator.
pub fn number_operator(basis: &Arc<OccupationBasis>) -> Result<FockOperator> {
    check_operator_size(basis)?;
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for s in 0..n {
        m[(s, s)] = C64::new(basis.total(s) as f64, 0.0);
    }
    Ok(FockOperator {
        basis: basis.clone(),
        matrix: m,
    })
}

/// `dΓ(T) = Σ T_{αβ} a*_α a_β`.
pub fn second_quantize_one_body(basis: &Arc<OccupationBasis>, t: &CMatrix) -> Result<FockOperator> {
    check_operator_size(basis)?;
    let d = basis.dim();
    if t.nrows() != d || t.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: t.nrows().max(t.ncols()),
        });
    }
    let residual = hermitian_residual(t);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for s in 0..n {
        let occ = basis.occupation(s);
        for beta in 0..d {
            let Some(mid) = basis.lowered(s, beta) else {
                continue;
            };
            let c_beta = (occ[beta] as f64).sqrt();
            let mid_occ = basis.occupation(mid);
            for alpha in 0..d {
                let tab = t[(alpha, beta)];
                if tab == C64::new(0.0, 0.0) {
                    continue;
                }
                // The particle number is unchanged, so raising cannot leave the basis.
                let target = basis
                    .raised(mid, alpha)
                    .expect("raise after lower stays in basis");
                m[(target, s)] += tab * c_beta * (mid_occ[alpha] as f64 + 1.0).sqrt();
            }
        }
    }
    Ok(FockOperator {
        basis: basis.clone(),
        matrix: m,
    })
}

/// `½ Σ W_{(αβ),(μν)} a*_α a*_β a_ν a_μ` for a `d²×d²` matrix `W` acting on
/// `h ⊗ h` with row index `α·d + β`.
pub fn second_quantize_two_body(basis: &Arc<OccupationBasis>, w: &CMatrix) -> Result<FockOperator> {
    check_operator_size(basis)?;
    let d = basis.dim();
    let dd = d * d;
    if w.nrows() != dd || w.ncols() != dd {
        return Err(Error::DimensionMismatch {
            expected: dd,
            found: w.nrows().max(w.ncols()),
        });
    }
    let residual = hermitian_residual(w);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let swap = swap_residual(w, d);
    if swap > HERMITIAN_TOL {
        return Err(Error::SwapAsymmetry { residual: swap });
    }
    let n = basis.len();
    let mut m = CMatrix::zeros(n, n);
    for s in 0..n {
        let occ = basis.occupation(s);
        for mu in 0..d {
            let Some(s1) = basis.lowered(s, mu) else {
                continue;
            };
            let c1 = (occ[mu] as f64).sqrt();
            let occ1 = basis.occupation(s1);
            for nu in 0..d {
                let Some(s2) = basis.lowered(s1, nu) else {
                    continue;
                };
                let c2 = c1 * (occ1[nu] as f64).sqrt();
                let occ2 = basis.occupation(s2);
                for beta in 0..d {
                    let s3 = basis
                        .raised(s2, beta)
                        .expect("raise after lower stays in basis");
                    let c3 = c2 * (occ2[beta] as f64 + 1.0).sqrt();
                    let occ3 = basis.occupation(s3);
                    for alpha in 0..d {
                        let wv = w[(alpha * d + beta, mu * d + nu)];
                        if wv == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let s4 = basis
                            .raised(s3, alpha)
                            .expect("raise after lower stays in basis");
                        m[(s4, s)] += 0.5 * wv * c3 * (occ3[alpha] as f64 + 1.0).sqrt();
                    }
                }
            }
        }
    }
    Ok(FockOperator {
        basis: basis.clone(),
        matrix: m,
    })
}

/// Max deviation of `W` from `Ex W Ex` where `Ex` swaps the tensor factors.
pub fn swap_residual(w: &CMatrix, d: usize) -> f64 {
    let mut r: f64 = 0.0;
    for a in 0..d {
        for b in 0..d {
            for m in 0..d {
                for n in 0..d {
                    let x = w[(a * d + b, m * d + n)] - w[(b * d + a, n * d + m)];
                    r = r.max(x.norm());
                }
            }
        }
    }
    r
}

/// `⟨v, A v⟩`.
pub fn expectation(op: &FockOperator, v: &FockVector) -> Result<C64> {
    same_basis(&op.basis, &v.basis)?;
    Ok(v.amplitudes.dotc(&(&op.matrix * &v.amplitudes)))
}

/// Tensor product `A ⊗ B` on `h ⊗ h`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Symmetrize `W ↦ ½(W + Ex W Ex)`.
pub fn symmetrize_two_body(w: &CMatrix, d: usize) -> CMatrix {
    let mut out = w.clone();
    for a in 0..d {
        for b in 0..d {
            for m in 0..d {
                for n in 0..d {
                    out[(a * d + b, m * d + n)] =
                        0.5 * (w[(a * d + b, m * d + n)] + w[(b * d + a, n * d + m)]);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn e(d: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[i] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn single_mode_creation_entries() {
        let b = Arc::new(OccupationBasis::build(1, 4).unwrap());
        let a = creation(&b, &e(1, 0)).unwrap();
        for n in 0..4 {
            assert!((a.matrix[(n + 1, n)].re - ((n + 1) as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn commutator_below_cutoff() {
        let b = Arc::new(OccupationBasis::build(2, 6).unwrap());
        let f = CVector::from_vec(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7)]);
        let g = CVector::from_vec(vec![C64::new(1.1, -0.4), C64::new(0.5, 0.2)]);
        let ag = annihilation(&b, &g).unwrap();
        let af = creation(&b, &f).unwrap();
        let comm = &ag.matrix * &af.matrix - &af.matrix * &ag.matrix;
        let gf = g.dotc(&f);
        for s in b.sector(0).start..b.sector(5).end {
            for t in 0..b.len() {
                let expected = if s == t { gf } else { C64::new(0.0, 0.0) };
                assert!((comm[(t, s)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn one_body_identity_is_number() {
        let b = Arc::new(OccupationBasis::build(3, 4).unwrap());
        let id = CMatrix::identity(3, 3);
        let n1 = second_quantize_one_body(&b, &id).unwrap();
        let n2 = number_operator(&b).unwrap();
        assert!(max_abs_diff(&n1.matrix, &n2.matrix) < 1e-14);
    }

    #[test]
    fn two_body_identity_is_pair_count() {
        let b = Arc::new(OccupationBasis::build(2, 5).unwrap());
        let w = CMatrix::identity(4, 4);
        let op = second_quantize_two_body(&b, &w).unwrap();
        for s in 0..b.len() {
            let n = b.total(s) as f64;
            assert!((op.matrix[(s, s)].re - 0.5 * n * (n - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let b = Arc::new(OccupationBasis::build(2, 2).unwrap());
        let mut t = CMatrix::zeros(2, 2);
        t[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            second_quantize_one_body(&b, &t),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_swap_asymmetric() {
        let b = Arc::new(OccupationBasis::build(2, 2).unwrap());
        let mut w = CMatrix::zeros(4, 4);
        // |00><00| is swap-symmetric, |01><01| alone is not.
        w[(1, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            second_quantize_two_body(&b, &w),
            Err(Error::SwapAsymmetry { .. })
        ));
    }

    #[test]
    fn basis_mismatch_is_reported() {
        let b1 = Arc::new(OccupationBasis::build(2, 2).unwrap());
        let b2 = Arc::new(OccupationBasis::build(2, 3).unwrap());
        let n = number_operator(&b1).unwrap();
        assert_eq!(
            expectation(&n, &FockVector::vacuum(b2)).unwrap_err(),
            Error::BasisMismatch
        );
    }

    #[test]
    fn dense_operator_cap() {
        let b = Arc::new(OccupationBasis::build(3, 30).unwrap());
        assert!(matches!(number_operator(&b), Err(Error::Sizing { .. })));
    }
}
