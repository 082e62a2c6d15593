//! Triples `(f, g, h)` with `|f+c| = |g+c| = |fh+c| = |gh+c| = 1`, which make
//! `|0><0|⊗diag(f,g)⊗diag(1,h) + diag(c,1)⊗I⊗I` unitary.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{circular_distance, EXCLUSION_TOL};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K1Case {
    /// `g = f*`, one free angle.
    Conjugate,
    /// Two free angles `α, γ`.
    TwoAngle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct K1Triple {
    pub f: Complex64,
    pub g: Complex64,
    pub h: Complex64,
}

impl K1Triple {
    /// Largest deviation of the four moduli from one.
    pub fn modulus_error(&self, c: f64) -> f64 {
        let c = Complex64::from(c);
        [
            self.f + c,
            self.g + c,
            self.f * self.h + c,
            self.g * self.h + c,
        ]
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(0.0, f64::max)
    }
}

/// The auxiliary angle of the two-angle case, in `(−π, π)`.
pub fn two_angle_theta(c: f64, alpha: f64, gamma: f64) -> Result<f64> {
    let (s, d) = ((alpha + gamma) / 2.0, (alpha - gamma) / 2.0);
    let num = c * s.sin() - d.sin();
    let den = c * s.cos() - d.cos();
    if den.abs() <= EXCLUSION_TOL {
        return Err(Error::ParamDomain(format!(
            "c·cos((α+γ)/2) = cos((α−γ)/2) at c={c}, α={alpha}, γ={gamma}"
        )));
    }
    Ok(2.0 * (num / den).atan())
}

fn check_c(c: f64) -> Result<()> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::ParamDomain(format!("c = {c} must be positive")));
    }
    if (c - 1.0).abs() <= EXCLUSION_TOL {
        return Err(Error::ParamDomain(
            "c = 1 admits no unitary completion".into(),
        ));
    }
    Ok(())
}

fn check_turn(name: &str, x: f64) -> Result<()> {
    if !(0.0..2.0 * PI).contains(&x) {
        return Err(Error::ParamDomain(format!("{name} = {x} outside [0, 2π)")));
    }
    Ok(())
}

/// Checks the parameter domain of either case without building the triple.
pub fn validate(c: f64, case: K1Case, alpha: f64, gamma: Option<f64>) -> Result<()> {
    check_c(c)?;
    check_turn("alpha", alpha)?;
    match case {
        K1Case::Conjugate => {
            if circular_distance(alpha, 0.0, PI) <= EXCLUSION_TOL {
                return Err(Error::ParamDomain(format!(
                    "alpha = {alpha} must avoid 0 and π"
                )));
            }
            if (c * alpha.cos() - 1.0).abs() <= EXCLUSION_TOL {
                return Err(Error::ParamDomain("c·cos(α) = 1".into()));
            }
        }
        K1Case::TwoAngle => {
            let gamma =
                gamma.ok_or_else(|| Error::ParamDomain("the two-angle case needs gamma".into()))?;
            check_turn("gamma", gamma)?;
            let theta = two_angle_theta(c, alpha, gamma)?;
            if circular_distance(alpha, gamma, 2.0 * PI) <= EXCLUSION_TOL {
                return Err(Error::ParamDomain("alpha = gamma".into()));
            }
            // (π+θ)/2 and (3π+θ)/2 differ by π
            if circular_distance(alpha, (PI + theta) / 2.0, PI) <= EXCLUSION_TOL {
                return Err(Error::ParamDomain(format!(
                    "alpha = {alpha} hits (π+θ)/2 or (3π+θ)/2 with θ = {theta}"
                )));
            }
        }
    }
    Ok(())
}

/// Closed-form triple without domain checks.
pub fn k1_triple_unchecked(c: f64, case: K1Case, alpha: f64, gamma: f64) -> K1Triple {
    let cc = Complex64::from(c);
    let ea = Complex64::from_polar(1.0, alpha);
    let f = ea - cc;
    match case {
        K1Case::Conjugate => K1Triple {
            f,
            g: f.conj(),
            h: Complex64::from((c * c - 1.0) / (1.0 + c * c - 2.0 * c * alpha.cos())),
        },
        K1Case::TwoAngle => {
            let (s, d) = ((alpha + gamma) / 2.0, (alpha - gamma) / 2.0);
            let theta = 2.0 * ((c * s.sin() - d.sin()) / (c * s.cos() - d.cos())).atan();
            K1Triple {
                f,
                g: -Complex64::from_polar(1.0, theta - alpha) - cc,
                h: (Complex64::from_polar(1.0, gamma) - cc) / f,
            }
        }
    }
}

/// Parametric solutions `(f, g, h)` with `f ≠ g`, `h ≠ 1`, all nonzero.
pub fn k1_parametric_solution(
    c: f64,
    case: K1Case,
    alpha: f64,
    gamma: Option<f64>,
) -> Result<K1Triple> {
    validate(c, case, alpha, gamma)?;
    let t = k1_triple_unchecked(c, case, alpha, gamma.unwrap_or(0.0));
    let err = t.modulus_error(c);
    if err > 1e-10 {
        return Err(Error::InternalInvariantViolation(format!(
            "k1 triple misses the unit circle by {err:.3e}"
        )));
    }
    Ok(t)
}

/// `(e^{iα}−1)(e^{iδ}−1) = (e^{iβ}−1)(e^{iγ}−1)` to `1e−10`.
pub fn phase_product_equation_holds(alpha: f64, beta: f64, gamma: f64, delta: f64) -> bool {
    let e = |x: f64| Complex64::from_polar(1.0, x) - 1.0;
    (e(alpha) * e(delta) - e(beta) * e(gamma)).norm() <= 1e-10
}
