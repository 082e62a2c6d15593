//! Three-qubit gates with no singular local factor:
//! `diag(a,b)⊗diag(1,c)⊗diag(1,d) + diag(1−a,1−b)⊗diag(1,(1−bc)/(1−b))⊗diag(1,(1−bd)/(1−b))`,
//! unitary exactly when `(a, b, c, d)` solves a system of four modulus equations.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::EXCLUSION_TOL;
use crate::diag3::canonicalize;
use crate::error::{Error, Result};
use crate::schmidt::schmidt_decomposition_sr2;
use crate::tensor::{CMatrix, CVector, Operator};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct K0SystemPoint {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

fn away(name: &str, z: Complex64, from: Complex64, tol: f64) -> Result<()> {
    if (z - from).norm() <= tol {
        return Err(Error::ParamDomain(format!(
            "{name} = {z} is too close to {from}"
        )));
    }
    Ok(())
}

impl K0SystemPoint {
    /// Requires `a, b, c, d ∉ {0, 1}` and `a ≠ b`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let p = Self { a, b, c, d };
        p.check(EXCLUSION_TOL)?;
        Ok(p)
    }

    fn check(&self, tol: f64) -> Result<()> {
        let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        for (name, z) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::ParamDomain(format!("{name} is not finite")));
            }
            away(name, z, zero, tol)?;
            away(name, z, one, tol)?;
        }
        away("a", self.a, self.b, tol)
    }

    /// Additionally requires `bc ≠ 1` and `bd ≠ 1` so the second term's factors are invertible.
    pub fn check_gate_domain(&self) -> Result<()> {
        self.check(EXCLUSION_TOL)?;
        let one = Complex64::new(1.0, 0.0);
        away("bc", self.b * self.c, one, EXCLUSION_TOL)?;
        away("bd", self.b * self.d, one, EXCLUSION_TOL)
    }

    fn to_reals(self) -> [f64; 8] {
        [
            self.a.re, self.a.im, self.b.re, self.b.im, self.c.re, self.c.im, self.d.re, self.d.im,
        ]
    }

    fn from_reals(x: &[f64]) -> Self {
        Self {
            a: Complex64::new(x[0], x[1]),
            b: Complex64::new(x[2], x[3]),
            c: Complex64::new(x[4], x[5]),
            d: Complex64::new(x[6], x[7]),
        }
    }

    /// The two product terms, first factor first.
    pub fn terms(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let Self { a, b, c, d } = *self;
        let one = Complex64::new(1.0, 0.0);
        let diag =
            |x: Complex64, y: Complex64| CMatrix::from_diagonal(&CVector::from_vec(vec![x, y]));
        (
            vec![diag(a, b), diag(one, c), diag(one, d)],
            vec![
                diag(one - a, one - b),
                diag(one, (one - b * c) / (one - b)),
                diag(one, (one - b * d) / (one - b)),
            ],
        )
    }
}

/// `(|LHS|, |RHS|)` for the four equations.
fn sides(p: &K0SystemPoint) -> [(f64, f64); 4] {
    let K0SystemPoint { a, b, c, d } = *p;
    let one = Complex64::new(1.0, 0.0);
    let nb = (one - b).norm();
    [
        (((one - a) * (one - d) + d * (one - b)).norm(), nb),
        (((one - a) * (one - c) + c * (one - b)).norm(), nb),
        (
            ((one - a) * (one - b * c) * (one - b * d) + a * c * d * (one - b) * (one - b)).norm(),
            nb * nb,
        ),
        (
            ((one - b * c) * (one - b * d) + b * c * d * (one - b)).norm(),
            nb,
        ),
    ]
}

/// Largest `| |LHS| − |RHS| |` over the four modulus equations.
pub fn k0_residual(p: &K0SystemPoint) -> f64 {
    sides(p)
        .iter()
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max)
}

/// Smooth form `|LHS|² − |RHS|²` used by the solver.
fn smooth_residual(x: &[f64]) -> DVector<f64> {
    let p = K0SystemPoint::from_reals(x);
    DVector::from_iterator(4, sides(&p).iter().map(|(l, r)| l * l - r * r))
}

fn jacobian(x: &[f64]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(4, 8);
    let mut xp = x.to_vec();
    for k in 0..8 {
        let h = 1e-7 * x[k].abs().max(1.0);
        xp[k] = x[k] + h;
        let up = smooth_residual(&xp);
        xp[k] = x[k] - h;
        let down = smooth_residual(&xp);
        xp[k] = x[k];
        j.set_column(k, &((up - down) / (2.0 * h)));
    }
    j
}

/// Damped least-squares (minimum-norm Levenberg–Marquardt) descent from `seed`
/// onto the solution set of the modulus system.
///
/// The system has four real equations in eight real unknowns, so the returned
/// point is one of a continuum of solutions near the seed. Converged points
/// are checked against the point invariants and by building the gate.
pub fn k0_solve(seed: &K0SystemPoint, max_iter: usize) -> Result<K0SystemPoint> {
    seed.check(EXCLUSION_TOL)?;
    let mut x = DVector::from_row_slice(&seed.to_reals());
    let mut r = smooth_residual(x.as_slice());
    let mut lambda = 1e-6;
    let mut iterations = 0;
    while iterations < max_iter && r.amax() > 1e-15 {
        iterations += 1;
        let j = jacobian(x.as_slice());
        let jjt = &j * j.transpose();
        let mut stepped = false;
        for _ in 0..30 {
            let damped = &jjt + DMatrix::identity(4, 4) * lambda;
            let Some(inv) = damped.try_inverse() else {
                lambda *= 10.0;
                continue;
            };
            let step = -(j.transpose() * (inv * &r));
            let trial = &x + &step;
            let rt = smooth_residual(trial.as_slice());
            if rt.norm() < r.norm() {
                x = trial;
                r = rt;
                lambda = (lambda * 0.3).max(1e-15);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            break;
        }
    }
    let p = K0SystemPoint::from_reals(x.as_slice());
    let residual = k0_residual(&p);
    let diverged = || Error::SolverDiverged {
        residual,
        iterations,
    };
    if residual > 1e-8 || p.check_gate_domain().is_err() {
        return Err(diverged());
    }
    let (ta, tb) = p.terms();
    let u = crate::tensor::kron_matrices(&ta) + crate::tensor::kron_matrices(&tb);
    let u = Operator::new(vec![2, 2, 2], u)?;
    if u.unitarity_residual() > 1e-10 * 8f64.sqrt() {
        return Err(diverged());
    }
    Ok(p)
}

/// Reads `(a, b, c, d)` off a diagonal three-qubit gate with no singular factor.
///
/// The gate is brought to the canonical phase form, whose entries at
/// `000, 100, 101, 110` equal one; its two-term decomposition then has exactly
/// the shape above after fixing each factor's first entry to one.
pub fn k0_point_from_diagonal(u: &Operator) -> Result<K0SystemPoint> {
    let canon = canonicalize(u)?.to_operator();
    let dec = schmidt_decomposition_sr2(&canon)?;
    if dec.singular_number() != 0 {
        return Err(Error::ParamDomain(format!(
            "gate has {} singular local factors",
            dec.singular_number()
        )));
    }
    let x: Vec<Complex64> = dec.term_a.iter().map(|f| f.matrix[(0, 0)]).collect();
    let y: Vec<Complex64> = dec.term_a.iter().map(|f| f.matrix[(1, 1)]).collect();
    let s = dec.scale_a;
    let p = K0SystemPoint::new(
        s * x[0] * x[1] * x[2],
        s * y[0] * x[1] * x[2],
        y[1] / x[1],
        y[2] / x[2],
    )?;
    let residual = k0_residual(&p);
    if residual > 1e-8 {
        return Err(Error::NotOnVariety(residual));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn known() -> K0SystemPoint {
        K0SystemPoint::new(c(0.5, -0.5), c(0.5, 0.5), c(0.0, -1.0), c(0.0, -1.0)).unwrap()
    }

    fn gate(p: &K0SystemPoint) -> CMatrix {
        let (ta, tb) = p.terms();
        crate::tensor::kron_matrices(&ta) + crate::tensor::kron_matrices(&tb)
    }

    #[test]
    fn known_point_solves_the_system() {
        assert!(k0_residual(&known()) < 1e-15);
        let u = gate(&known());
        let expect = [1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!((u[(k, k)] - c(*e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn invariant_violations_and_off_variety_points() {
        assert!(K0SystemPoint::new(c(0.5, 0.0), c(0.5, 0.0), c(0.0, -1.0), c(0.0, -1.0)).is_err());
        assert!(K0SystemPoint::new(c(0.0, 0.0), c(0.5, 0.0), c(0.0, -1.0), c(0.0, -1.0)).is_err());
        assert!(K0SystemPoint::new(c(0.3, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(0.0, -1.0)).is_err());
        let p = K0SystemPoint::new(c(0.3, 0.1), c(0.7, -0.2), c(0.0, 2.0), c(-1.0, 0.0)).unwrap();
        assert!(k0_residual(&p) > 1e-3);
    }

    #[test]
    fn residual_zero_iff_gate_unitary_on_samples() {
        // unitarity of the diagonal gate is the moduli of its entries
        let p = K0SystemPoint::new(c(0.3, 0.1), c(0.7, -0.2), c(0.0, 2.0), c(-1.0, 0.0)).unwrap();
        let u = gate(&p);
        let worst = (0..8)
            .map(|k| (u[(k, k)].norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
        let u = gate(&known());
        let worst = (0..8)
            .map(|k| (u[(k, k)].norm() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-15);
    }

    #[test]
    fn solver_returns_to_the_variety() {
        let k = known();
        let seed = K0SystemPoint::new(
            k.a + c(0.01, -0.02),
            k.b + c(-0.015, 0.01),
            k.c + c(0.02, 0.0),
            k.d + c(0.0, 0.01),
        )
        .unwrap();
        assert!(k0_residual(&seed) > 1e-4);
        let p = k0_solve(&seed, 200).unwrap();
        assert!(k0_residual(&p) < 1e-12);
    }

    #[test]
    fn solver_rejects_seed_at_the_pole() {
        let seed = K0SystemPoint {
            b: c(1.0, 0.0),
            ..known()
        };
        assert!(k0_solve(&seed, 50).is_err());
    }

    #[test]
    fn extracts_the_known_point_family() {
        let u = Operator::new(vec![2, 2, 2], gate(&known())).unwrap();
        let p = k0_point_from_diagonal(&u).unwrap();
        assert!(k0_residual(&p) < 1e-10);
        let back = Operator::new(vec![2, 2, 2], gate(&p)).unwrap();
        let (x, y) = (
            crate::diag3::canonicalize(&u).unwrap(),
            crate::diag3::canonicalize(&back).unwrap(),
        );
        for (s, t) in [
            (x.alpha, y.alpha),
            (x.beta, y.beta),
            (x.gamma, y.gamma),
            (x.delta, y.delta),
        ] {
            assert!((Complex64::from_polar(1.0, s) - Complex64::from_polar(1.0, t)).norm() < 1e-9);
        }
    }
}
