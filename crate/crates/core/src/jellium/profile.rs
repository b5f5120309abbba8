use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::quad::gauss_legendre;
use crate::{Error, Result};

/// Ramp `s: [0,1] → [0,1]` with `s(0) = 0`, `s(1) = 1`, `s'(0) = s'(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RampShape {
    /// `3t² − 2t³`
    #[default]
    Smoothstep,
    /// `(1 − cos πt)/2`
    Cosine,
}

impl RampShape {
    pub fn eval(self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Self::Smoothstep => t * t * (3.0 - 2.0 * t),
            Self::Cosine => 0.5 * (1.0 - (PI * t).cos()),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        match self {
            Self::Smoothstep => 6.0 * t * (1.0 - t),
            Self::Cosine => 0.5 * PI * (PI * t).sin(),
        }
    }

    /// `∫₀¹ s²`.
    pub fn square_integral(self) -> f64 {
        match self {
            Self::Smoothstep => 13.0 / 35.0,
            Self::Cosine => 3.0 / 8.0,
        }
    }

    /// `∫₀¹ s'²`.
    pub fn derivative_square_integral(self) -> f64 {
        match self {
            Self::Smoothstep => 6.0 / 5.0,
            Self::Cosine => PI * PI / 8.0,
        }
    }

    pub fn max_derivative(self) -> f64 {
        match self {
            Self::Smoothstep => 1.5,
            Self::Cosine => 0.5 * PI,
        }
    }
}

/// `η` on `[0, L]`: ramp of width `r` at both ends, plateau `c` between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeProfile {
    pub l: f64,
    pub r: f64,
    pub rho: f64,
    pub shape: RampShape,
    pub c: f64,
    /// `n = ρ / c⁶`.
    pub n: f64,
}

impl EdgeProfile {
    pub fn new(l: f64, r: f64, rho: f64, shape: RampShape) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Domain(format!("box side must be positive, got {l}")));
        }
        if !(r > 0.0 && r < 0.25 * l) {
            return Err(Error::Infeasible(format!(
                "edge width r = {r} must lie in (0, L/4) for L = {l}"
            )));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!(
                "density must be positive, got {rho}"
            )));
        }
        let c2 = 1.0 / (l - 2.0 * r + 2.0 * r * shape.square_integral());
        Ok(Self {
            l,
            r,
            rho,
            shape,
            c: c2.sqrt(),
            n: rho / c2.powi(3),
        })
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.c * self.unit(t)
    }

    /// `η / c`, equal to 1 on the plateau.
    pub fn unit(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.l {
            0.0
        } else if t < self.r {
            self.shape.eval(t / self.r)
        } else if t > self.l - self.r {
            self.shape.eval((self.l - t) / self.r)
        } else {
            1.0
        }
    }

    pub fn eta_prime(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.l {
            0.0
        } else if t < self.r {
            self.c * self.shape.derivative(t / self.r) / self.r
        } else if t > self.l - self.r {
            -self.c * self.shape.derivative((self.l - t) / self.r) / self.r
        } else {
            0.0
        }
    }

    /// `φ₀(x) = η(x₁)η(x₂)η(x₃)`.
    pub fn phi0(&self, x: [f64; 3]) -> f64 {
        self.eta(x[0]) * self.eta(x[1]) * self.eta(x[2])
    }

    /// Breakpoints `0, r, L−r, L` of the piecewise definition.
    pub fn breaks(&self) -> [f64; 4] {
        [0.0, self.r, self.l - self.r, self.l]
    }

    /// `∫ f(t) dt` over `[0, L]` with Gauss-Legendre panels on each piece.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, panels: usize) -> f64 {
        let rule = gauss_legendre(20);
        let b = self.breaks();
        let mut total = 0.0;
        for w in b.windows(2) {
            let m = if w[1] - w[0] > self.r {
                panels.max(1) * 4
            } else {
                panels.max(1)
            };
            let h = (w[1] - w[0]) / m as f64;
            for k in 0..m {
                let a = w[0] + k as f64 * h;
                total += crate::quad::fixed_legendre(&f, a, a + h, &rule);
            }
        }
        total
    }

    /// `∫ η²`, computed by quadrature.
    pub fn norm_squared(&self) -> f64 {
        self.integrate(|t| self.eta(t).powi(2), 4)
    }

    /// `∫ η'²` in closed form.
    pub fn eta_prime_square_integral(&self) -> f64 {
        2.0 * self.c * self.c * self.shape.derivative_square_integral() / self.r
    }

    /// `∫ |∇φ₀|² = 3 ∫η'²`.
    pub fn kinetic(&self) -> f64 {
        3.0 * self.eta_prime_square_integral()
    }

    /// Measured constant in `|η'| ≤ C r⁻¹ L^{−1/2}`.
    pub fn derivative_constant(&self) -> f64 {
        self.c * self.shape.max_derivative() * self.l.sqrt()
    }

    /// `ρ(L − 2r)³ ≤ n ≤ ρL³`.
    pub fn number_sandwich_holds(&self) -> bool {
        let lo = self.rho * (self.l - 2.0 * self.r).powi(3);
        let hi = self.rho * self.l.powi(3);
        lo <= self.n * (1.0 + 1e-14) && self.n <= hi * (1.0 + 1e-14)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_plateau() {
        for shape in [RampShape::Smoothstep, RampShape::Cosine] {
            let p = EdgeProfile::new(20.0, 2.0, 3.0, shape).unwrap();
            assert!((p.norm_squared() - 1.0).abs() < 1e-12);
            assert!(p.number_sandwich_holds());
            assert!((0..=2000).all(|k| p.eta(k as f64 * 0.01) <= p.c * (1.0 + 1e-15)));
            let s2 =
                crate::quad::integrate(|t| shape.eval(t).powi(2), 0.0, 1.0, Default::default())
                    .unwrap();
            assert!((s2.value - shape.square_integral()).abs() < 1e-13);
            let d2 = crate::quad::integrate(
                |t| shape.derivative(t).powi(2),
                0.0,
                1.0,
                Default::default(),
            )
            .unwrap();
            assert!((d2.value - shape.derivative_square_integral()).abs() < 1e-13);
        }
    }

    #[test]
    fn smoothstep_plateau_formula() {
        let (l, r) = (10.0, 1.5);
        let p = EdgeProfile::new(l, r, 1.0, RampShape::Smoothstep).unwrap();
        assert!((p.c * p.c - 1.0 / (l - 2.0 * r + 26.0 * r / 35.0)).abs() < 1e-15);
        let q = EdgeProfile::new(l, 1e-9, 2.0, RampShape::Smoothstep).unwrap();
        assert!((q.c * q.c * l - 1.0).abs() < 1e-9);
        assert!((q.n / (2.0 * l.powi(3)) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn kinetic_matches_quadrature_and_scales() {
        let p = EdgeProfile::new(30.0, 2.0, 1.0, RampShape::Smoothstep).unwrap();
        let q = p.integrate(|t| p.eta_prime(t).powi(2), 8);
        assert!((q - p.eta_prime_square_integral()).abs() < 1e-13);
        let scaled: Vec<f64> = [50.0, 100.0, 400.0]
            .iter()
            .map(|&l| {
                let e = EdgeProfile::new(l, 1.0, 1.0, RampShape::Smoothstep).unwrap();
                e.r * e.l * e.eta_prime_square_integral()
            })
            .collect();
        assert!(scaled.iter().all(|v| *v < 2.5));
        let sup = (0..=3000)
            .map(|k| p.eta_prime(k as f64 * 0.01).abs())
            .fold(0.0, f64::max);
        assert!(sup <= p.derivative_constant() / (p.r * p.l.sqrt()) * (1.0 + 1e-12));
    }

    #[test]
    fn infeasible_width() {
        assert!(matches!(
            EdgeProfile::new(4.0, 1.0, 1.0, RampShape::Smoothstep),
            Err(Error::Infeasible(_))
        ));
    }
}
