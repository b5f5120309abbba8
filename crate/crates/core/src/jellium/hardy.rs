use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use statrs::function::erf::erf;

use crate::{Error, Result};

/// Isotropic Gaussian `e^{−a|x−A|²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gaussian {
    pub exponent: f64,
    pub center: [f64; 3],
}

fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

/// `∫ G_i G_j`.
pub fn overlap(gi: &Gaussian, gj: &Gaussian) -> f64 {
    let p = gi.exponent + gj.exponent;
    let mu = gi.exponent * gj.exponent / p;
    (PI / p).powf(1.5) * (-mu * dist2(gi.center, gj.center)).exp()
}

/// `∫ ∇G_i · ∇G_j`.
pub fn gradient_overlap(gi: &Gaussian, gj: &Gaussian) -> f64 {
    let p = gi.exponent + gj.exponent;
    let mu = gi.exponent * gj.exponent / p;
    2.0 * mu * (3.0 - 2.0 * mu * dist2(gi.center, gj.center)) * overlap(gi, gj)
}

/// `G_i G_j = k e^{−p|x−P|²}` as `(k, p, P)`.
fn product(gi: &Gaussian, gj: &Gaussian) -> (f64, f64, [f64; 3]) {
    let p = gi.exponent + gj.exponent;
    let mu = gi.exponent * gj.exponent / p;
    let c = [0, 1, 2].map(|k| (gi.exponent * gi.center[k] + gj.exponent * gj.center[k]) / p);
    ((-mu * dist2(gi.center, gj.center)).exp(), p, c)
}

/// `∬ e^{−p|x−P|²} |x−y|⁻¹ e^{−q|y−Q|²}`.
pub fn gaussian_coulomb(p: f64, pc: [f64; 3], q: f64, qc: [f64; 3]) -> f64 {
    let w = (PI / p).powf(1.5) * (PI / q).powf(1.5);
    let s = (p * q / (p + q)).sqrt();
    let r = dist2(pc, qc).sqrt();
    let f = if r * s < 1e-8 {
        2.0 * s / PI.sqrt() * (1.0 - (s * r).powi(2) / 3.0)
    } else {
        erf(s * r) / r
    };
    w * f
}

/// Exchange integral and its Hardy chain for `γ(x,y) = Σ C_ij G_i(x) G_j(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyCheck {
    pub dim: usize,
    /// `∬ |γ(x,y)|² / |x−y|`.
    pub exchange: f64,
    /// `∬ |γ|²`.
    pub hilbert_schmidt: f64,
    /// `∬ |∇_x γ|²`.
    pub gradient: f64,
    /// `2 (∬|γ|²)^{1/2} (∬|∇_xγ|²)^{1/2}`.
    pub chain: f64,
    pub holds: bool,
}

pub fn hardy_check(basis: &[Gaussian], coeffs: &DMatrix<f64>) -> Result<HardyCheck> {
    let d = basis.len();
    if d == 0 || d > 16 {
        return Err(Error::Sizing {
            what: "Gaussian basis",
            count: d,
            cap: 16,
        });
    }
    if coeffs.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: coeffs.nrows(),
        });
    }
    let s = DMatrix::from_fn(d, d, |i, j| overlap(&basis[i], &basis[j]));
    let t = DMatrix::from_fn(d, d, |i, j| gradient_overlap(&basis[i], &basis[j]));
    let prods: Vec<Vec<(f64, f64, [f64; 3])>> = (0..d)
        .map(|i| (0..d).map(|k| product(&basis[i], &basis[k])).collect())
        .collect();
    let mut exchange = 0.0;
    for i in 0..d {
        for k in 0..d {
            let (ki, p, pc) = prods[i][k];
            for j in 0..d {
                for l in 0..d {
                    let (kj, q, qc) = prods[j][l];
                    exchange +=
                        coeffs[(i, j)] * coeffs[(k, l)] * ki * kj * gaussian_coulomb(p, pc, q, qc);
                }
            }
        }
    }
    let hs = (coeffs * &s * coeffs * &s).trace();
    let grad = (coeffs * &t * coeffs * &s).trace();
    let chain = 2.0 * (hs * grad).sqrt();
    Ok(HardyCheck {
        dim: d,
        exchange,
        hilbert_schmidt: hs,
        gradient: grad,
        chain,
        holds: exchange <= chain * (1.0 + 1e-12),
    })
}

/// Random basis in a box of side 3 and a random PSD coefficient matrix.
pub fn random_hardy_instance<R: Rng>(rng: &mut R, dim: usize) -> (Vec<Gaussian>, DMatrix<f64>) {
    let basis = (0..dim)
        .map(|_| Gaussian {
            exponent: rng.gen_range(0.3..3.0),
            center: [0; 3].map(|_| rng.gen_range(0.0..3.0)),
        })
        .collect();
    let b = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
    (basis, &b * b.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_to_infinity, QuadConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coulomb_self_energy_matches_radial_quadrature() {
        let p = 1.7;
        let norm = (p / PI).powf(1.5);
        let got = norm * norm * gaussian_coulomb(p, [0.0; 3], p, [0.0; 3]);
        // Unit Gaussian charge of exponent p has potential erf(√p r)/r.
        let direct = integrate_to_infinity(
            |r| {
                4.0 * PI
                    * r
                    * r
                    * norm
                    * (-p * r * r).exp()
                    * if r > 0.0 {
                        erf(p.sqrt() * r) / r
                    } else {
                        2.0 * (p / PI).sqrt()
                    }
            },
            0.0,
            QuadConfig::default(),
        )
        .unwrap()
        .value;
        assert!((got - direct).abs() < 1e-10, "{got} vs {direct}");
        assert!((got - (2.0 * p / PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kinetic_of_single_gaussian() {
        let g = Gaussian {
            exponent: 0.8,
            center: [1.0, 2.0, 0.5],
        };
        // ∫|∇e^{−ar²}|² = 3a (π/(2a))^{3/2}.
        let want = 3.0 * 0.8 * (PI / 1.6).powf(1.5);
        assert!((gradient_overlap(&g, &g) - want).abs() < 1e-13);
    }

    #[test]
    fn chain_dominates_exchange() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in [1, 4, 9, 16] {
            let (b, c) = random_hardy_instance(&mut rng, dim);
            let h = hardy_check(&b, &c).unwrap();
            assert!(h.holds && h.exchange > 0.0, "{h:?}");
        }
    }
}
