//! Small dense helpers shared by the Fock, Bogolubov and Berezin-Lieb code.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const PSD_CLAMP: f64 = 1e-10;

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `(x, y) = Σ conj(x_i) y_i`, antilinear in the first slot.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    x.dotc(y)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermitian_residual(a: &CMatrix) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn real_matrix(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(DVector<f64>, CMatrix)> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let sym = (a + a.adjoint()) * c(0.5);
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(vals.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn max_eigenvalue(a: &CMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(vals.iter().copied().fold(f64::NEG_INFINITY, f64::max))
}

/// Spectral calculus `ξ(A)` for a positive semi-definite `A`.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` are clamped to zero; anything more
/// negative is rejected. Eigenvalues below the numerical-rank floor
/// `64 ε max|λ|` are also set to zero, so that `ξ` with an infinite slope at
/// the origin (such as `√t`) does not turn rounding noise into `O(√ε)` errors.
pub fn apply_matrix_function<F: Fn(f64) -> f64>(a: &CMatrix, xi: F) -> Result<CMatrix> {
    let res = hermitian_residual(a);
    if res > 1e-10 * (1.0 + max_abs(a)) {
        return Err(Error::NotHermitian { residual: res });
    }
    let (vals, vecs) = hermitian_eigen(a)?;
    let floor = 64.0 * f64::EPSILON * vals.amax();
    let mut scaled = vecs.clone();
    for (k, &lam) in vals.iter().enumerate() {
        if lam < -PSD_CLAMP {
            return Err(Error::Domain(format!(
                "eigenvalue {lam:e} below the PSD clamp -{PSD_CLAMP:e}"
            )));
        }
        let v = xi(if lam < floor { 0.0 } else { lam });
        scaled.column_mut(k).scale_mut(v);
    }
    Ok(&scaled * vecs.adjoint())
}

pub fn random_unit_complex<R: Rng>(rng: &mut R, n: usize) -> CVector {
    let v = CVector::from_fn(n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let norm = v.norm();
    v / c(norm)
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    (&m + m.adjoint()) * c(0.5)
}

/// Random PSD matrix `G G^H` with `G` of the given rank.
pub fn random_psd<R: Rng>(rng: &mut R, n: usize, rank: usize, scale: f64) -> CMatrix {
    let g = CMatrix::from_fn(n, rank, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    &g * g.adjoint() * c(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_function_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_psd(&mut rng, 5, 5, 1.0);
        let b = apply_matrix_function(&a, |t| t).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn sqrt_t_t_plus_one_on_one_third() {
        let a = CMatrix::from_diagonal_element(1, 1, c(1.0 / 3.0));
        let b = apply_matrix_function(&a, |t| (t * (t + 1.0)).sqrt()).unwrap();
        assert!((b[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn functional_square_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_psd(&mut rng, 6, 3, 0.7);
        let s = apply_matrix_function(&a, |t| (t * (t + 1.0)).sqrt()).unwrap();
        let lhs = &s * &s;
        let rhs = &a * (&a + CMatrix::identity(6, 6));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn negative_eigenvalue_rejected() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0), c(-1e-3)]));
        assert!(matches!(
            apply_matrix_function(&a, |t| t.sqrt()),
            Err(Error::Domain(_))
        ));
    }
}
