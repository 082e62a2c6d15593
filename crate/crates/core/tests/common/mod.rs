#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sr2gates::families::{generate, k0_point_from_diagonal, FamilyId, FamilySpec, GeneratedGate};
use sr2gates::random::random_product_unitary;
use sr2gates::{CMatrix, Operator};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Open interval each real parameter is drawn from.
pub fn param_range(family: FamilyId, name: &str) -> (f64, f64) {
    match (family, name) {
        (FamilyId::T3_K1_A | FamilyId::T3_K1_B, "c") => (0.2, 3.2),
        (FamilyId::N_K1, _) => (0.0, PI),
        _ => (0.0, TAU),
    }
}

/// A `k = 0` three-qubit point read off a generic member of the diagonal
/// two-angle family.
pub fn k0_spec_from_angles(alpha: f64, beta: f64) -> Option<FamilySpec> {
    let slice = FamilySpec::new(FamilyId::L5_EQ9)
        .with("alpha", alpha)
        .with("beta", beta);
    let g = generate(&slice).ok()?;
    if g.declared_k != 0 {
        return None;
    }
    let p = k0_point_from_diagonal(&g.operator).ok()?;
    let spec = FamilySpec::new(FamilyId::T3_K0)
        .with_complex("a", p.a)
        .with_complex("b", p.b)
        .with_complex("c", p.c)
        .with_complex("d", p.d);
    spec.validate().ok().map(|_| spec)
}

/// Random in-domain member of `family` on `n` qubits.
pub fn sample_gate<R: Rng>(family: FamilyId, n: usize, rng: &mut R) -> GeneratedGate {
    loop {
        let spec = if family == FamilyId::T3_K0 {
            match k0_spec_from_angles(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)) {
                Some(s) => s,
                None => continue,
            }
        } else {
            let mut spec = FamilySpec::new(family).with_n(n);
            for name in family.param_names(n) {
                let (lo, hi) = param_range(family, &name);
                spec = spec.with(&name, rng.random_range(lo..hi));
            }
            spec
        };
        if let Ok(g) = generate(&spec) {
            return g;
        }
    }
}

/// Party counts exercised per family.
pub fn party_counts(family: FamilyId) -> Vec<usize> {
    if family.is_multiqubit() {
        vec![4, 5]
    } else {
        vec![3]
    }
}

/// `V·U·W` for random product unitaries, with the factors of `V` and `W`.
pub fn conjugate<R: Rng>(u: &Operator, rng: &mut R) -> (Operator, Vec<CMatrix>, Vec<CMatrix>) {
    let (v, vf) = random_product_unitary(u.dims(), rng);
    let (w, wf) = random_product_unitary(u.dims(), rng);
    let out = v.compose(u).unwrap().compose(&w).unwrap();
    (out, vf, wf)
}

pub fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// A generic in-domain member of each family.
pub fn base_point(family: FamilyId, n: usize) -> FamilySpec {
    let s = FamilySpec::new(family).with_n(n);
    match family {
        FamilyId::T3_K3 => s.with("phi", 1.3),
        FamilyId::N_KN => s.with("theta", 1.3),
        FamilyId::T3_K2_A | FamilyId::N_KNM1 => s.with("theta", 1.1).with("phi", 2.3),
        FamilyId::T3_K2_B => s.with("gamma", 1.1).with("delta", 2.3),
        FamilyId::T3_K1_A => s.with("c", 2.0).with("alpha", 1.1),
        FamilyId::T3_K1_B => s.with("c", 0.5).with("alpha", 1.0).with("gamma", 2.0),
        FamilyId::T3_K0 => s
            .with_complex("a", Complex64::new(0.5, -0.5))
            .with_complex("b", Complex64::new(0.5, 0.5))
            .with_complex("c", Complex64::new(0.0, -1.0))
            .with_complex("d", Complex64::new(0.0, -1.0)),
        FamilyId::N_K2 => (2..=n).fold(s, |s, j| s.with(&format!("beta{j}"), 0.1 + 0.6 * j as f64)),
        FamilyId::N_K1 => s.with("alpha", 0.5),
        FamilyId::N_K0 => s.with("alpha", 1.0).with("beta", 0.4),
        FamilyId::L5_EQ8 | FamilyId::L5_EQ9 => s.with("alpha", 1.0).with("beta", 2.0),
    }
}

/// In-domain points along one parameter axis through the base point,
/// `steps` midpoints of the parameter's range. For the complex `k = 0`
/// family the axes are the two angles of the diagonal family it is read off.
pub fn axis_line(family: FamilyId, n: usize, axis: usize, steps: usize) -> Vec<FamilySpec> {
    let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / steps as f64;
    if family == FamilyId::T3_K0 {
        return (0..steps)
            .filter_map(|i| {
                let t = at(0.0, TAU, i);
                if axis == 0 {
                    k0_spec_from_angles(t, 2.0)
                } else {
                    k0_spec_from_angles(1.0, t)
                }
            })
            .collect();
    }
    let name = &family.param_names(n)[axis];
    let (lo, hi) = param_range(family, name);
    (0..steps)
        .map(|i| base_point(family, n).with(name, at(lo, hi, i)))
        .filter(|s| s.validate().is_ok())
        .collect()
}

/// Number of axes `axis_line` accepts.
pub fn axis_count(family: FamilyId, n: usize) -> usize {
    if family == FamilyId::T3_K0 {
        2
    } else {
        family.param_names(n).len()
    }
}
