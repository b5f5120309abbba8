use std::sync::Arc;

use super::basis::{OccupationBasis, DEFAULT_STATE_CAP};
use super::ops::{lower_vector, raise_vector, sector_masses, FockVector};
use crate::bogolubov::BogolubovData;
use crate::error::{Error, Result};
use crate::linalg::{CVector, C64};

/// Trial states with closed-form or series descriptions.
#[derive(Debug, Clone)]
pub enum StateSpec {
    /// Coherent state `|φ⟩_C`.
    Coherent(CVector),
    /// Single-mode squeezed state with parameter `λ` along a unit vector `ψ`.
    Squeezed { lambda: C64, psi: CVector },
    /// Displaced quasi-free state.
    Bogolubov(BogolubovData),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrepConfig {
    /// Largest tolerated probability mass above `N_max`.
    pub defect_tolerance: f64,
    /// Extra particle numbers carried while building the state.
    pub margin: usize,
    pub state_cap: usize,
}

impl Default for PrepConfig {
    fn default() -> Self {
        Self {
            defect_tolerance: 1e-12,
            margin: 30,
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

/// A prepared state and the mass it lost to truncation.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub vector: FockVector,
    pub defect: f64,
}

/// Build `spec` on `basis`, failing if more than `cfg.defect_tolerance` of its
/// mass lies above the cutoff. The returned vector is renormalized.
pub fn prepare_state(
    basis: &Arc<OccupationBasis>,
    spec: &StateSpec,
    cfg: &PrepConfig,
) -> Result<PreparedState> {
    let d = basis.dim();
    let ext = OccupationBasis::build_with_cap(d, basis.max_total() + cfg.margin, cfg.state_cap)?;
    let amps = match spec {
        StateSpec::Coherent(phi) => {
            check_len(d, phi)?;
            coherent_amplitudes(&ext, phi)
        }
        StateSpec::Squeezed { lambda, psi } => {
            check_len(d, psi)?;
            if lambda.norm() >= 1.0 {
                return Err(Error::Domain(format!(
                    "|λ| = {} must be below 1",
                    lambda.norm()
                )));
            }
            let nrm = psi.norm();
            if (nrm - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!("ψ must be normalized, |ψ| = {nrm}")));
            }
            squeeze(&ext, *lambda, psi, &vacuum(&ext))
                * C64::new((1.0 - lambda.norm_sqr()).powf(0.25), 0.0)
        }
        StateSpec::Bogolubov(data) => {
            check_len(d, data.phi())?;
            bogolubov_direct(&ext, data)
        }
    };
    truncate(basis, &ext, amps, cfg.defect_tolerance)
}

/// Bogolubov state built as `U_φ` applied to the quasi-free state, with
/// `U_φ = e^{-|φ|²/2} e^{a*(φ)} e^{-a(φ)}`. Independent of the route used by
/// [`prepare_state`].
pub fn bogolubov_by_displacement(
    basis: &Arc<OccupationBasis>,
    data: &BogolubovData,
    cfg: &PrepConfig,
) -> Result<PreparedState> {
    let d = basis.dim();
    check_len(d, data.phi())?;
    let ext = OccupationBasis::build_with_cap(d, basis.max_total() + cfg.margin, cfg.state_cap)?;
    let mut v = vacuum(&ext);
    for (lambda, psi) in data.pairs().iter() {
        v = squeeze(&ext, C64::new(lambda, 0.0), &psi, &v)
            * C64::new((1.0 - lambda * lambda).powf(0.25), 0.0);
    }
    let phi = data.phi();
    let neg_phi = -phi.clone();
    // e^{-a(φ)} then e^{a*(φ)}: both series terminate on a finite basis.
    v = nilpotent_exp(&v, |x| lower_vector(&ext, &neg_phi, x));
    v = nilpotent_exp(&v, |x| raise_vector(&ext, phi, x));
    v *= C64::new((-0.5 * phi.norm_squared()).exp(), 0.0);
    truncate(basis, &ext, v, cfg.defect_tolerance)
}

fn check_len(d: usize, v: &CVector) -> Result<()> {
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    Ok(())
}

fn vacuum(basis: &OccupationBasis) -> CVector {
    let mut v = CVector::zeros(basis.len());
    v[0] = C64::new(1.0, 0.0);
    v
}

fn coherent_amplitudes(basis: &OccupationBasis, phi: &CVector) -> CVector {
    let n_max = basis.max_total();
    // powers[i][n] = φ_i^n / √(n!)
    let powers: Vec<Vec<C64>> = phi
        .iter()
        .map(|&p| {
            let mut row = Vec::with_capacity(n_max + 1);
            row.push(C64::new(1.0, 0.0));
            for n in 1..=n_max {
                let prev = row[n - 1];
                row.push(prev * p / (n as f64).sqrt());
            }
            row
        })
        .collect();
    let pref = (-0.5 * phi.norm_squared()).exp();
    CVector::from_iterator(
        basis.len(),
        basis.states().iter().map(|occ| {
            occ.iter()
                .enumerate()
                .fold(C64::new(pref, 0.0), |acc, (i, &n)| {
                    acc * powers[i][n as usize]
                })
        }),
    )
}

/// `exp(X) v` for a nilpotent `X` (a pure raising or pure lowering map).
fn nilpotent_exp<F: Fn(&CVector) -> CVector>(v: &CVector, x: F) -> CVector {
    let mut sum = v.clone();
    let mut term = v.clone();
    let mut k = 1usize;
    loop {
        term = x(&term) / C64::new(k as f64, 0.0);
        if term.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            break;
        }
        sum += &term;
        k += 1;
    }
    sum
}

/// `exp(-λ/2 a*(ψ)²) v` (unnormalized).
fn squeeze(basis: &OccupationBasis, lambda: C64, psi: &CVector, v: &CVector) -> CVector {
    let half = -lambda / 2.0;
    nilpotent_exp(v, |x| {
        raise_vector(basis, psi, &raise_vector(basis, psi, x)) * half
    })
}

/// `U_φ e^{-λ/2 a*(ψ)²} U_φ* = e^{-λ/2 (a*(ψ) - c)²}` with `c = (φ, ψ)`, applied
/// mode by mode to the coherent state.
fn bogolubov_direct(basis: &OccupationBasis, data: &BogolubovData) -> CVector {
    let phi = data.phi();
    let mut v = coherent_amplitudes(basis, phi);
    for (lambda, psi) in data.pairs().iter() {
        let c = phi.dotc(&psi);
        let lam = C64::new(lambda, 0.0);
        let pref = (-lam * c * c / 2.0).exp() * (1.0 - lambda * lambda).powf(0.25);
        v = nilpotent_exp(&v, |x| {
            let once = raise_vector(basis, &psi, x);
            let twice = raise_vector(basis, &psi, &once);
            twice * (-lam / 2.0) + once * (lam * c)
        }) * pref;
    }
    v
}

fn truncate(
    basis: &Arc<OccupationBasis>,
    ext: &OccupationBasis,
    amps: CVector,
    tol: f64,
) -> Result<PreparedState> {
    let masses = sector_masses(ext, &amps);
    // tails[k] = mass strictly above k, summed from the top down.
    let mut tails = vec![0.0; masses.len()];
    let mut acc = 0.0;
    for k in (0..masses.len()).rev() {
        tails[k] = acc;
        acc += masses[k];
    }
    let n_max = basis.max_total();
    let defect = tails[n_max];
    if defect > tol {
        let required = tails
            .iter()
            .position(|&t| t <= tol)
            .unwrap_or(ext.max_total());
        return Err(Error::Truncation {
            defect,
            tolerance: tol,
            required_n_max: required,
        });
    }
    let kept = amps.rows(0, basis.len()).into_owned();
    let norm = kept.norm();
    Ok(PreparedState {
        vector: FockVector {
            basis: basis.clone(),
            amplitudes: kept / C64::new(norm, 0.0),
        },
        defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ops::{annihilation, expectation, number_operator};

    fn basis(d: usize, n: usize) -> Arc<OccupationBasis> {
        Arc::new(OccupationBasis::build(d, n).unwrap())
    }

    #[test]
    fn coherent_is_eigenvector_of_annihilation() {
        let b = basis(2, 14);
        let phi = CVector::from_vec(vec![C64::new(0.3, 0.2), C64::new(-0.25, 0.1)]);
        let st = prepare_state(
            &b,
            &StateSpec::Coherent(phi.clone()),
            &PrepConfig::default(),
        )
        .unwrap();
        let e0 = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let a = annihilation(&b, &e0).unwrap();
        let av = a.apply(&st.vector).unwrap().amplitudes;
        let diff = av - &st.vector.amplitudes * phi[0];
        // The top sector has nothing above it to lower from.
        let below_top = b.sector(13).end;
        assert!(diff.rows(0, below_top).norm() < 1e-12);
    }

    #[test]
    fn coherent_number_expectation() {
        let b = basis(2, 14);
        let phi = CVector::from_vec(vec![C64::new(0.5, 0.0), C64::new(0.0, 0.4)]);
        let st = prepare_state(
            &b,
            &StateSpec::Coherent(phi.clone()),
            &PrepConfig::default(),
        )
        .unwrap();
        let n = expectation(&number_operator(&b).unwrap(), &st.vector).unwrap();
        assert!((n.re - phi.norm_squared()).abs() < 1e-10);
    }

    #[test]
    fn squeezed_single_mode_amplitudes() {
        // <2n|S> = (1-λ²)^{1/4} (-λ/2)^n √((2n)!) / n!
        let b = basis(1, 20);
        let lambda = 0.15;
        let psi = CVector::from_vec(vec![C64::new(1.0, 0.0)]);
        let st = prepare_state(
            &b,
            &StateSpec::Squeezed {
                lambda: C64::new(lambda, 0.0),
                psi,
            },
            &PrepConfig::default(),
        )
        .unwrap();
        let mut fact = [1.0f64; 41];
        for k in 1..41 {
            fact[k] = fact[k - 1] * k as f64;
        }
        for n in 0..=10usize {
            let expected = (1.0 - lambda * lambda).powf(0.25)
                * (-lambda / 2.0).powi(n as i32)
                * fact[2 * n].sqrt()
                / fact[n];
            assert!((st.vector.amplitudes[2 * n].re - expected).abs() < 1e-13);
            if 2 * n < 20 {
                assert!(st.vector.amplitudes[2 * n + 1].norm() < 1e-15);
            }
        }
    }

    #[test]
    fn truncation_error_reports_required_cutoff() {
        let b = basis(1, 4);
        let phi = CVector::from_vec(vec![C64::new(1.5, 0.0)]);
        match prepare_state(&b, &StateSpec::Coherent(phi), &PrepConfig::default()) {
            Err(Error::Truncation { required_n_max, .. }) => assert!(required_n_max > 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn squeezed_rejects_unnormalized() {
        let b = basis(1, 4);
        let psi = CVector::from_vec(vec![C64::new(2.0, 0.0)]);
        assert!(matches!(
            prepare_state(
                &b,
                &StateSpec::Squeezed {
                    lambda: C64::new(0.1, 0.0),
                    psi
                },
                &PrepConfig::default()
            ),
            Err(Error::Domain(_))
        ));
    }
}
