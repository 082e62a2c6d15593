//! Haar-random unitaries for conjugation tests and sweeps.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::tensor::{kron_matrices, CMatrix, Operator};

/// Haar-distributed `d × d` unitary (QR of a complex Ginibre matrix with the
/// phases of `R`'s diagonal folded back into `Q`).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 {
            rkk / rkk.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// A random product unitary `⊗_j V_j` on `dims`, with its factors.
pub fn random_product_unitary<R: Rng + ?Sized>(
    dims: &[usize],
    rng: &mut R,
) -> (Operator, Vec<CMatrix>) {
    let factors: Vec<CMatrix> = dims.iter().map(|&d| random_unitary(d, rng)).collect();
    let op = Operator::new(dims.to_vec(), kron_matrices(&factors))
        .expect("product of local unitaries has consistent dims");
    (op, factors)
}

/// Random diagonal phase gate `diag(e^{iθ_0}, ..., e^{iθ_{d-1}})`.
pub fn random_phase_gate<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let phases: Vec<Complex64> = (0..d)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases))
}
