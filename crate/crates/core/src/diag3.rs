//! Three-qubit diagonal gates: canonical phase form, genuineness, Schmidt
//! rank two versus three, and the GHZ/W class of the associated state.
//!
//! Every diagonal three-qubit unitary is locally equivalent to
//! `diag(1, e^{iα}, e^{iβ}, e^{iγ}, 1, 1, 1, e^{iδ})`. Its Schmidt rank is three
//! exactly when its diagonal, read as a state, lies in the W class.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{
    diag3_isomorphic_state, operator_schmidt_rank, Bipartition, CVector, Operator,
};

/// Tolerance for equalities between unit-modulus phases.
const PHASE_TOL: f64 = 1e-10;
/// `|Det(ψ)| ≤ HYPERDET_TOL · ||ψ||⁴` counts as vanishing.
pub const HYPERDET_TOL: f64 = 1e-8;

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU - 1e-15 {
        0.0
    } else {
        r
    }
}

/// Canonical angles plus the local phases that produce them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diag3Canonical {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    /// `[θ11, θ21, θ22, θ31, θ32, global]`: the gate
    /// `e^{i·global} diag(e^{iθ11},1) ⊗ diag(e^{iθ21},e^{iθ22}) ⊗ diag(e^{iθ31},e^{iθ32})`
    /// multiplied onto the input yields the canonical diagonal.
    pub local_phases: [f64; 6],
}

impl Diag3Canonical {
    /// From angles alone, with trivial recorded phases.
    pub fn from_angles(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Self {
        Self {
            alpha: wrap(alpha),
            beta: wrap(beta),
            gamma: wrap(gamma),
            delta: wrap(delta),
            local_phases: [0.0; 6],
        }
    }

    /// `(1, e^{iα}, e^{iβ}, e^{iγ}, 1, 1, 1, e^{iδ})`.
    pub fn diagonal(&self) -> [Complex64; 8] {
        let one = Complex64::new(1.0, 0.0);
        [
            one,
            cis(self.alpha),
            cis(self.beta),
            cis(self.gamma),
            one,
            one,
            one,
            cis(self.delta),
        ]
    }

    pub fn to_operator(&self) -> Operator {
        Operator::from_diagonal(vec![2, 2, 2], &self.diagonal()).expect("8 entries")
    }

    /// Diagonal of the recorded local phase gate, in row-major order.
    pub fn phase_gate_diagonal(&self) -> [Complex64; 8] {
        let [t11, t21, t22, t31, t32, global] = self.local_phases;
        let first = [t11, 0.0];
        let second = [t21, t22];
        let third = [t31, t32];
        std::array::from_fn(|idx| {
            let (j, k, l) = (idx >> 2, (idx >> 1) & 1, idx & 1);
            cis(global + first[j] + second[k] + third[l])
        })
    }
}

fn diagonal_of(u: &Operator) -> Result<Vec<Complex64>> {
    u.ensure_unitary()?;
    Ok(diag3_isomorphic_state(u)?.iter().copied().collect())
}

/// Brings a diagonal three-qubit unitary to canonical form with local phase gates.
pub fn canonicalize(u: &Operator) -> Result<Diag3Canonical> {
    let d = diagonal_of(u)?;
    let phi: Vec<f64> = d.iter().map(|z| z.arg()).collect();
    // entries 000, 100, 101 and 110 become one
    let t21 = 0.0;
    let t31 = -phi[0b100];
    let t32 = -phi[0b101];
    let t22 = phi[0b100] - phi[0b110];
    let t11 = phi[0b100] - phi[0b000];
    let canon = Diag3Canonical {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
        delta: 0.0,
        local_phases: [t11, t21, t22, t31, t32, 0.0],
    };
    let p = canon.phase_gate_diagonal();
    let angle = |idx: usize| wrap((d[idx] * p[idx]).arg());
    Ok(Diag3Canonical {
        alpha: angle(0b001),
        beta: angle(0b010),
        gamma: angle(0b011),
        delta: angle(0b111),
        ..canon
    })
}

fn same(x: Complex64, y: Complex64) -> bool {
    (x - y).norm() <= PHASE_TOL
}

/// Genuineness of the canonical gate: none of the three single-party cuts factorizes.
pub fn genuineness_precondition(c: &Diag3Canonical) -> bool {
    let one = Complex64::new(1.0, 0.0);
    let (a, b, g, d) = (cis(c.alpha), cis(c.beta), cis(c.gamma), cis(c.delta));
    let first = same(a, one) && same(b, one) && same(g, d);
    let second = same(b, one) && same(g, a) && same(d, one);
    let third = same(a, one) && same(g, b) && same(d, one);
    !(first || second || third)
}

/// Whether the genuine canonical gate has Schmidt rank three (its state is in the W class).
pub fn w_condition(c: &Diag3Canonical) -> Result<bool> {
    if !genuineness_precondition(c) {
        return Err(Error::NotGenuine(
            "canonical angles describe a gate that factorizes across a cut".into(),
        ));
    }
    let (a, b, g, d) = (cis(c.alpha), cis(c.beta), cis(c.gamma), cis(c.delta));
    let one = Complex64::new(1.0, 0.0);
    if (d - one).norm() > PHASE_TOL {
        let s = g + d - a - b;
        let lhs = s * s;
        let rhs = (d - one) * (g - a * b) * 4.0;
        let scale = 1f64.max(lhs.norm()).max(rhs.norm());
        Ok((lhs - rhs).norm() <= PHASE_TOL * scale)
    } else {
        Ok(same(g, -one) && (a + b).norm() <= PHASE_TOL && c.alpha.sin().abs() > PHASE_TOL)
    }
}

/// Cayley's hyperdeterminant of a 2×2×2 tensor (amplitudes indexed `jkl`),
/// normalized so that `|000> + |111>` has `Det = 1`.
pub fn hyperdeterminant(psi: &[Complex64]) -> Complex64 {
    assert_eq!(psi.len(), 8, "three-qubit amplitudes expected");
    let a = |i: usize| psi[i];
    let (a000, a001, a010, a011) = (a(0), a(1), a(2), a(3));
    let (a100, a101, a110, a111) = (a(4), a(5), a(6), a(7));
    let sq = a000 * a000 * a111 * a111
        + a001 * a001 * a110 * a110
        + a010 * a010 * a101 * a101
        + a100 * a100 * a011 * a011;
    let cross = a000 * a001 * a110 * a111
        + a000 * a010 * a101 * a111
        + a000 * a100 * a011 * a111
        + a001 * a010 * a101 * a110
        + a001 * a100 * a011 * a110
        + a010 * a100 * a011 * a101;
    let quad = a000 * a011 * a101 * a110 + a001 * a010 * a100 * a111;
    sq - cross * 2.0 + quad * 4.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SloccClass {
    Product,
    Biseparable,
    Ghz,
    W,
}

impl fmt::Display for SloccClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SloccClass::Product => "product",
            SloccClass::Biseparable => "biseparable",
            SloccClass::Ghz => "ghz",
            SloccClass::W => "w",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Diag3Verdict {
    pub canonical: Diag3Canonical,
    pub precondition: bool,
    pub genuine: bool,
    pub schmidt_rank: usize,
    pub slocca_class: SloccClass,
    pub hyperdet: Complex64,
}

impl fmt::Display for Diag3Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.canonical;
        writeln!(
            f,
            "canonical: a={:.12} b={:.12} g={:.12} d={:.12}",
            c.alpha, c.beta, c.gamma, c.delta
        )?;
        writeln!(f, "precondition: {}", self.precondition)?;
        writeln!(f, "class: {}", self.slocca_class)?;
        writeln!(f, "schmidt_rank: {}", self.schmidt_rank)?;
        writeln!(f, "hyperdet: {:e},{:e}", self.hyperdet.re, self.hyperdet.im)
    }
}

/// Full verdict for a diagonal three-qubit unitary, cross-checked against the
/// hyperdeterminant of its diagonal.
pub fn classify_diag3(u: &Operator) -> Result<Diag3Verdict> {
    let canonical = canonicalize(u)?;
    let psi: CVector = diag3_isomorphic_state(u)?;
    let amps: Vec<Complex64> = psi.iter().copied().collect();
    let hyperdet = hyperdeterminant(&amps);
    let det_vanishes = hyperdet.norm() <= HYPERDET_TOL * psi.norm_squared().powi(2);
    let precondition = genuineness_precondition(&canonical);

    let (genuine, schmidt_rank, slocca_class) = if !precondition {
        let mut rank_one_cuts = 0;
        let mut max_rank = 1;
        for p in 0..3 {
            let r = operator_schmidt_rank(u, &Bipartition::single(3, p)?)?;
            if r == 1 {
                rank_one_cuts += 1;
            }
            max_rank = max_rank.max(r);
        }
        let class = if rank_one_cuts == 3 {
            SloccClass::Product
        } else {
            SloccClass::Biseparable
        };
        (false, max_rank, class)
    } else if w_condition(&canonical)? {
        (true, 3, SloccClass::W)
    } else {
        (true, 2, SloccClass::Ghz)
    };

    let oracle_ok = match slocca_class {
        SloccClass::Ghz => !det_vanishes,
        SloccClass::W | SloccClass::Product => det_vanishes,
        SloccClass::Biseparable => true,
    };
    if !oracle_ok {
        return Err(Error::InternalInvariantViolation(format!(
            "class {slocca_class} disagrees with |Det| = {:.3e}",
            hyperdet.norm()
        )));
    }
    Ok(Diag3Verdict {
        canonical,
        precondition,
        genuine,
        schmidt_rank,
        slocca_class,
        hyperdet,
    })
}

/// The three-qubit gate `|0><0|⊗(cosθ I⊗I + i sinθ Z⊗Z) + |1><1|⊗I⊗Z`.
pub fn w_example_gate(theta: f64) -> Operator {
    let (c, s) = (theta.cos(), theta.sin());
    let plus = Complex64::new(c, s);
    let minus = Complex64::new(c, -s);
    let one = Complex64::new(1.0, 0.0);
    let d = [plus, minus, minus, plus, one, -one, one, -one];
    Operator::from_diagonal(vec![2, 2, 2], &d).expect("8 entries")
}

/// W-class gates with `δ = 0`: `γ = π`, `β = α + π`.
pub fn w_branch_canonical(alpha: f64) -> Diag3Canonical {
    Diag3Canonical::from_angles(alpha, alpha + PI, PI, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_phase_gate;
    use crate::tensor::CMatrix;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ccz() -> Operator {
        Diag3Canonical::from_angles(0.0, 0.0, 0.0, PI).to_operator()
    }

    fn angle_close(x: f64, y: f64) -> bool {
        (cis(x) - cis(y)).norm() < 1e-10
    }

    #[test]
    fn ccz_is_already_canonical() {
        let k = canonicalize(&ccz()).unwrap();
        assert!(angle_close(k.alpha, 0.0) && angle_close(k.beta, 0.0));
        assert!(angle_close(k.gamma, 0.0) && angle_close(k.delta, PI));
        let id = Operator::identity(vec![2, 2, 2]).unwrap();
        let k = canonicalize(&id).unwrap();
        assert_eq!([k.alpha, k.beta, k.gamma, k.delta], [0.0; 4]);
    }

    #[test]
    fn w_example_canonical_angles() {
        let theta = 0.37;
        let k = canonicalize(&w_example_gate(theta)).unwrap();
        let e2 = cis(-2.0 * theta);
        assert!((cis(k.alpha) + e2).norm() < 1e-12);
        assert!((cis(k.beta) - e2).norm() < 1e-12);
        assert!(angle_close(k.gamma, PI));
        assert!(angle_close(k.delta, 0.0));
    }

    #[test]
    fn recorded_phases_reproduce_canonical_form() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..50 {
            let d = random_phase_gate(8, &mut rng);
            let u = Operator::new(vec![2, 2, 2], d).unwrap();
            let k = canonicalize(&u).unwrap();
            let p = k.phase_gate_diagonal();
            let target = k.diagonal();
            for (idx, z) in u.diagonal().iter().enumerate() {
                assert!((z * p[idx] - target[idx]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_angles_ignore_local_phases() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let u = Operator::new(vec![2, 2, 2], random_phase_gate(8, &mut rng)).unwrap();
            let locals: Vec<CMatrix> = (0..3).map(|_| random_phase_gate(2, &mut rng)).collect();
            let p = crate::tensor::kron_matrices(&locals);
            let v = Operator::new(vec![2, 2, 2], p * u.matrix()).unwrap();
            let (a, b) = (canonicalize(&u).unwrap(), canonicalize(&v).unwrap());
            for (x, y) in [
                (a.alpha, b.alpha),
                (a.beta, b.beta),
                (a.gamma, b.gamma),
                (a.delta, b.delta),
            ] {
                assert!(angle_close(x, y));
            }
        }
    }

    #[test]
    fn rejects_dense_and_non_unitary() {
        let dense = Operator::new(
            vec![2, 2, 2],
            CMatrix::from_element(8, 8, c(1.0 / 8f64.sqrt(), 0.0)),
        );
        assert!(matches!(
            canonicalize(&dense.unwrap()),
            Err(Error::NotUnitary(_))
        ));
        let mut m = CMatrix::identity(8, 8);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        m[(0, 0)] = c(0.0, 0.0);
        m[(1, 1)] = c(0.0, 0.0);
        assert!(matches!(
            canonicalize(&Operator::new(vec![2, 2, 2], m).unwrap()),
            Err(Error::NotDiagonal(_))
        ));
        let scaled = Operator::from_diagonal(vec![2, 2, 2], &[c(2.0, 0.0); 8]).unwrap();
        assert!(matches!(canonicalize(&scaled), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn precondition_examples() {
        assert!(genuineness_precondition(&Diag3Canonical::from_angles(
            0.0, 0.0, 0.0, PI
        )));
        assert!(!genuineness_precondition(&Diag3Canonical::from_angles(
            0.0, 0.0, 0.0, 0.0
        )));
        // (α, α, 0, 0): rank of each realigned cut decides
        for alpha in [0.3, 1.0, 2.5] {
            let k = Diag3Canonical::from_angles(alpha, alpha, 0.0, 0.0);
            let u = k.to_operator();
            let brute = (0..3).all(|p| {
                operator_schmidt_rank(&u, &Bipartition::single(3, p).unwrap()).unwrap() == 2
            });
            assert_eq!(genuineness_precondition(&k), brute);
        }
    }

    #[test]
    fn precondition_matches_cut_ranks_on_random_and_special_angles() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let specials = [0.0, PI / 2.0, PI, 1.0];
        for _ in 0..400 {
            let mut pick = || {
                if rng.random_bool(0.6) {
                    specials[rng.random_range(0..specials.len())]
                } else {
                    rng.random_range(0.0..TAU)
                }
            };
            let k = Diag3Canonical::from_angles(pick(), pick(), pick(), pick());
            let u = k.to_operator();
            let brute = (0..3).all(|p| {
                operator_schmidt_rank(&u, &Bipartition::single(3, p).unwrap()).unwrap() >= 2
            });
            assert_eq!(genuineness_precondition(&k), brute, "{k:?}");
        }
    }

    #[test]
    fn w_condition_examples() {
        let ccz = Diag3Canonical::from_angles(0.0, 0.0, 0.0, PI);
        assert!(!w_condition(&ccz).unwrap());
        let k = canonicalize(&w_example_gate(PI / 4.0)).unwrap();
        assert!(w_condition(&k).unwrap());
        for delta in [0.1, 1.0, 3.0, 5.5] {
            let k = Diag3Canonical::from_angles(0.0, 0.0, 0.0, delta);
            assert!(!w_condition(&k).unwrap());
        }
        assert!(w_condition(&Diag3Canonical::from_angles(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn w_branch_closure() {
        for alpha in [0.2, 1.0, 2.0, 3.5, 6.0] {
            assert!(
                w_condition(&w_branch_canonical(alpha)).unwrap(),
                "α = {alpha}"
            );
        }
        for alpha in [0.0, PI] {
            let k = w_branch_canonical(alpha);
            assert!(!genuineness_precondition(&k) || !w_condition(&k).unwrap());
        }
    }

    #[test]
    fn hyperdeterminant_examples() {
        let mut ghz = [c(0.0, 0.0); 8];
        ghz[0] = c(1.0, 0.0);
        ghz[7] = c(1.0, 0.0);
        assert!((hyperdeterminant(&ghz) - c(1.0, 0.0)).norm() < 1e-15);
        let mut w = [c(0.0, 0.0); 8];
        w[1] = c(1.0, 0.0);
        w[2] = c(1.0, 0.0);
        w[4] = c(1.0, 0.0);
        assert_eq!(hyperdeterminant(&w), c(0.0, 0.0));
        let mut prod = [c(0.0, 0.0); 8];
        prod[0] = c(1.0, 0.0);
        assert_eq!(hyperdeterminant(&prod), c(0.0, 0.0));
    }

    #[test]
    fn hyperdeterminant_scales_under_local_maps() {
        // Det(A⊗B⊗C ψ) = det(A)² det(B)² det(C)² Det(ψ)
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        let mut rand_c = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let psi: Vec<Complex64> = (0..8).map(|_| rand_c()).collect();
        let mats: Vec<CMatrix> = (0..3)
            .map(|_| CMatrix::from_fn(2, 2, |_, _| rand_c()))
            .collect();
        let k = crate::tensor::kron_matrices(&mats);
        let moved = k * CVector::from_vec(psi.clone());
        let moved: Vec<Complex64> = moved.iter().copied().collect();
        let factor: Complex64 = mats
            .iter()
            .map(|m| {
                let d = m.determinant();
                d * d
            })
            .product();
        let lhs = hyperdeterminant(&moved);
        let rhs = factor * hyperdeterminant(&psi);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn verdicts() {
        let v = classify_diag3(&ccz()).unwrap();
        assert_eq!(
            (v.genuine, v.schmidt_rank, v.slocca_class),
            (true, 2, SloccClass::Ghz)
        );
        let v = classify_diag3(&w_example_gate(PI / 4.0)).unwrap();
        assert_eq!(
            (v.genuine, v.schmidt_rank, v.slocca_class),
            (true, 3, SloccClass::W)
        );
        let cz = [1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, -1.0].map(|x| c(x, 0.0));
        let v = classify_diag3(&Operator::from_diagonal(vec![2, 2, 2], &cz).unwrap()).unwrap();
        assert_eq!(v.slocca_class, SloccClass::Biseparable);
        assert!(!v.genuine && v.schmidt_rank <= 2);
        let v = classify_diag3(&Operator::identity(vec![2, 2, 2]).unwrap()).unwrap();
        assert_eq!((v.slocca_class, v.schmidt_rank), (SloccClass::Product, 1));
        let text = v.to_string();
        assert!(text.contains("class: product") && text.contains("precondition: false"));
    }
}
