//! Canonical parametric families of genuine qubit gates of Schmidt rank two,
//! one or two per singular number.
//!
//! Three-qubit families (`T3_*`) cover singular numbers 3, 2, 1 and 0; the
//! `N_*` families cover `n ≥ 4` qubits with singular numbers `n`, `n−1`, 2, 1
//! and 0. `L5_*` are the two forms whose last two parties are spanned by a
//! pair of product unitaries.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::schmidt::SchmidtDecompositionSR2;
use crate::tensor::{kron_matrices, CMatrix, CVector, Operator, DEFAULT_TOL};

pub mod k0;
pub mod k1;

pub use k0::{k0_point_from_diagonal, k0_residual, k0_solve, K0SystemPoint};
pub use k1::{k1_parametric_solution, phase_product_equation_holds, K1Case, K1Triple};

/// Excluded parameter values are rejected within this distance.
pub const EXCLUSION_TOL: f64 = 1e-9;

/// Distance between `x` and `y` on a circle of the given period.
pub fn circular_distance(x: f64, y: f64, period: f64) -> f64 {
    let r = (x - y).rem_euclid(period);
    r.min(period - r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum FamilyId {
    T3_K3,
    T3_K2_A,
    T3_K2_B,
    T3_K1_A,
    T3_K1_B,
    T3_K0,
    N_KN,
    N_KNM1,
    N_K2,
    N_K1,
    N_K0,
    L5_EQ8,
    L5_EQ9,
}

impl FamilyId {
    pub const ALL: [FamilyId; 13] = [
        FamilyId::T3_K3,
        FamilyId::T3_K2_A,
        FamilyId::T3_K2_B,
        FamilyId::T3_K1_A,
        FamilyId::T3_K1_B,
        FamilyId::T3_K0,
        FamilyId::N_KN,
        FamilyId::N_KNM1,
        FamilyId::N_K2,
        FamilyId::N_K1,
        FamilyId::N_K0,
        FamilyId::L5_EQ8,
        FamilyId::L5_EQ9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::T3_K3 => "t3-k3",
            FamilyId::T3_K2_A => "t3-k2a",
            FamilyId::T3_K2_B => "t3-k2b",
            FamilyId::T3_K1_A => "t3-k1a",
            FamilyId::T3_K1_B => "t3-k1b",
            FamilyId::T3_K0 => "t3-k0",
            FamilyId::N_KN => "n-kn",
            FamilyId::N_KNM1 => "n-kn1",
            FamilyId::N_K2 => "n-k2",
            FamilyId::N_K1 => "n-k1",
            FamilyId::N_K0 => "n-k0",
            FamilyId::L5_EQ8 => "l5-eq8",
            FamilyId::L5_EQ9 => "l5-eq9",
        }
    }

    /// Families defined for `n ≥ 4` qubits; all others are three-qubit only.
    pub fn is_multiqubit(self) -> bool {
        matches!(
            self,
            FamilyId::N_KN | FamilyId::N_KNM1 | FamilyId::N_K2 | FamilyId::N_K1 | FamilyId::N_K0
        )
    }

    pub fn default_n(self) -> usize {
        if self.is_multiqubit() {
            4
        } else {
            3
        }
    }

    /// Parameter names in canonical order.
    pub fn param_names(self, n: usize) -> Vec<String> {
        let fixed: &[&str] = match self {
            FamilyId::T3_K3 => &["phi"],
            FamilyId::T3_K2_A => &["theta", "phi"],
            FamilyId::T3_K2_B => &["gamma", "delta"],
            FamilyId::T3_K1_A => &["c", "alpha"],
            FamilyId::T3_K1_B => &["c", "alpha", "gamma"],
            FamilyId::T3_K0 => &["a", "b", "c", "d"],
            FamilyId::N_KN => &["theta"],
            FamilyId::N_KNM1 => &["theta", "phi"],
            FamilyId::N_K2 => return (2..=n).map(|j| format!("beta{j}")).collect(),
            FamilyId::N_K1 => &["alpha"],
            FamilyId::N_K0 | FamilyId::L5_EQ8 | FamilyId::L5_EQ9 => &["alpha", "beta"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    /// Only the `k = 0` three-qubit family takes complex parameters.
    pub fn has_complex_params(self) -> bool {
        self == FamilyId::T3_K0
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::ParamDomain(format!("unknown family '{s}'")))
    }
}

/// A family member: family, party count, named parameters and an optional
/// party permutation applied after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub n: usize,
    pub params: BTreeMap<String, Complex64>,
    /// Party `k` of the generated gate is party `permutation[k]` of the table form.
    pub permutation: Option<Vec<usize>>,
}

impl FamilySpec {
    pub fn new(family: FamilyId) -> Self {
        Self {
            family,
            n: family.default_n(),
            params: BTreeMap::new(),
            permutation: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), Complex64::from(value));
        self
    }

    pub fn with_complex(mut self, name: &str, value: Complex64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn with_permutation(mut self, perm: Vec<usize>) -> Self {
        self.permutation = Some(perm);
        self
    }

    fn complex(&self, name: &str) -> Result<Complex64> {
        self.params
            .get(name)
            .copied()
            .ok_or_else(|| Error::ParamDomain(format!("{} needs parameter '{name}'", self.family)))
    }

    fn real(&self, name: &str) -> Result<f64> {
        let z = self.complex(name)?;
        if z.im != 0.0 || !z.re.is_finite() {
            return Err(Error::ParamDomain(format!(
                "'{name}' must be a finite real, got {z}"
            )));
        }
        Ok(z.re)
    }

    fn check_shape(&self) -> Result<()> {
        let f = self.family;
        if f.is_multiqubit() && self.n < 4 {
            return Err(Error::ParamDomain(format!(
                "{f} needs n ≥ 4, got {}",
                self.n
            )));
        }
        if !f.is_multiqubit() && self.n != 3 {
            return Err(Error::ParamDomain(format!(
                "{f} is a three-qubit family, got n = {}",
                self.n
            )));
        }
        if self.n > 10 {
            return Err(Error::ParamDomain(format!(
                "n = {} exceeds 10 qubits",
                self.n
            )));
        }
        let names = f.param_names(self.n);
        if let Some(extra) = self.params.keys().find(|k| !names.contains(k)) {
            return Err(Error::ParamDomain(format!(
                "{f} has no parameter '{extra}' (expected {})",
                names.join(", ")
            )));
        }
        for name in &names {
            if f.has_complex_params() {
                self.complex(name)?;
            } else {
                self.real(name)?;
            }
        }
        if let Some(perm) = &self.permutation {
            let mut seen = vec![false; self.n];
            if perm.len() != self.n
                || perm
                    .iter()
                    .any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true))
            {
                return Err(Error::ParamDomain(format!(
                    "{perm:?} is not a permutation of {} parties",
                    self.n
                )));
            }
        }
        Ok(())
    }

    /// Parameter domain of the family.
    pub fn validate(&self) -> Result<()> {
        self.check_shape()?;
        let open_turn = |name: &str| -> Result<f64> {
            let x = self.real(name)?;
            if !(x > EXCLUSION_TOL && x < TAU - EXCLUSION_TOL) {
                return Err(Error::ParamDomain(format!("{name} = {x} outside (0, 2π)")));
            }
            Ok(x)
        };
        let turn = |name: &str| -> Result<f64> {
            let x = self.real(name)?;
            if !(0.0..TAU).contains(&x) {
                return Err(Error::ParamDomain(format!("{name} = {x} outside [0, 2π)")));
            }
            Ok(x)
        };
        let avoid = |name: &str, x: f64, at: f64, period: f64, why: &str| -> Result<()> {
            if circular_distance(x, at, period) <= EXCLUSION_TOL {
                return Err(Error::ParamDomain(format!("{name} = {x}: {why}")));
            }
            Ok(())
        };
        match self.family {
            FamilyId::T3_K3 | FamilyId::N_KN => {
                open_turn(if self.family == FamilyId::T3_K3 {
                    "phi"
                } else {
                    "theta"
                })?;
            }
            FamilyId::T3_K2_A | FamilyId::N_KNM1 => {
                let (t, p) = (open_turn("theta")?, open_turn("phi")?);
                avoid("theta", t, p, TAU, "theta = phi factorizes the last party")?;
            }
            FamilyId::T3_K2_B => {
                open_turn("gamma")?;
                open_turn("delta")?;
            }
            FamilyId::T3_K1_A => {
                k1::validate(
                    self.real("c")?,
                    K1Case::Conjugate,
                    self.real("alpha")?,
                    None,
                )?;
            }
            FamilyId::T3_K1_B => {
                k1::validate(
                    self.real("c")?,
                    K1Case::TwoAngle,
                    self.real("alpha")?,
                    Some(self.real("gamma")?),
                )?;
            }
            FamilyId::T3_K0 => {
                let p = self.k0_point_unchecked()?;
                p.check_gate_domain()?;
                let residual = k0_residual(&p);
                if residual > 1e-8 {
                    return Err(Error::NotOnVariety(residual));
                }
            }
            FamilyId::N_K2 => {
                for name in self.family.param_names(self.n) {
                    open_turn(&name)?;
                }
            }
            FamilyId::N_K1 => {
                let a = self.real("alpha")?;
                if !(a > EXCLUSION_TOL && a < PI - EXCLUSION_TOL) {
                    return Err(Error::ParamDomain(format!("alpha = {a} outside (0, π)")));
                }
                avoid(
                    "alpha",
                    a,
                    FRAC_PI_2,
                    TAU,
                    "alpha = π/2 gives a product gate",
                )?;
            }
            FamilyId::N_K0 => {
                let (a, b) = (turn("alpha")?, turn("beta")?);
                avoid("alpha", a, 0.0, FRAC_PI_2, "multiples of π/2 are excluded")?;
                avoid("beta", b, 0.0, FRAC_PI_2, "multiples of π/2 are excluded")?;
                avoid(
                    "alpha",
                    a,
                    b,
                    PI,
                    "alpha ≡ beta (mod π) factorizes the first party",
                )?;
            }
            FamilyId::L5_EQ8 => {
                let (a, b) = (turn("alpha")?, turn("beta")?);
                avoid("alpha", a, 0.0, PI, "0 and π make the second party trivial")?;
                avoid("beta", b, 0.0, PI, "0 and π make the third party trivial")?;
            }
            FamilyId::L5_EQ9 => {
                let (a, b) = (turn("alpha")?, turn("beta")?);
                avoid(
                    "alpha",
                    a,
                    b,
                    PI,
                    "alpha ≡ beta (mod π) factorizes the first party",
                )?;
            }
        }
        Ok(())
    }

    fn k0_point_unchecked(&self) -> Result<K0SystemPoint> {
        Ok(K0SystemPoint {
            a: self.complex("a")?,
            b: self.complex("b")?,
            c: self.complex("c")?,
            d: self.complex("d")?,
        })
    }

    /// Singular number the family is built to have.
    pub fn declared_k(&self) -> Result<usize> {
        let n = self.n;
        Ok(match self.family {
            FamilyId::T3_K3 => 3,
            FamilyId::T3_K2_A | FamilyId::T3_K2_B | FamilyId::N_K2 | FamilyId::L5_EQ8 => 2,
            FamilyId::T3_K1_A | FamilyId::T3_K1_B | FamilyId::N_K1 => 1,
            FamilyId::T3_K0 | FamilyId::N_K0 => 0,
            FamilyId::N_KN => n,
            FamilyId::N_KNM1 => n - 1,
            FamilyId::L5_EQ9 => {
                let (a, b) = (self.real("alpha")?, self.real("beta")?);
                let singular =
                    |x: f64, y: f64| x.abs().min(y.abs()) <= DEFAULT_TOL * x.abs().max(y.abs());
                usize::from(singular(a.cos(), b.cos())) + usize::from(singular(a.sin(), b.sin()))
            }
        })
    }
}

/// A generated gate with the decomposition it was built from.
#[derive(Clone, Debug)]
pub struct GeneratedGate {
    pub spec: FamilySpec,
    pub operator: Operator,
    pub declared: SchmidtDecompositionSR2,
    pub declared_k: usize,
}

fn diag(x: Complex64, y: Complex64) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![x, y]))
}

fn re(x: f64) -> Complex64 {
    Complex64::from(x)
}

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

fn one() -> Complex64 {
    re(1.0)
}

fn zero() -> Complex64 {
    re(0.0)
}

fn id2() -> CMatrix {
    CMatrix::identity(2, 2)
}

fn proj(k: usize) -> CMatrix {
    if k == 0 {
        diag(one(), zero())
    } else {
        diag(zero(), one())
    }
}

fn pauli_z() -> CMatrix {
    diag(one(), -one())
}

/// The two product terms of the family member, in table party order.
fn terms(spec: &FamilySpec) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let n = spec.n;
    let i = Complex64::i();
    Ok(match spec.family {
        FamilyId::T3_K3 | FamilyId::N_KN => {
            let angle = spec.real(if spec.family == FamilyId::T3_K3 {
                "phi"
            } else {
                "theta"
            })?;
            let mut b = vec![proj(0); n];
            b[0] *= cis(angle) - one();
            (vec![id2(); n], b)
        }
        FamilyId::T3_K2_A => {
            let (t, p) = (spec.real("theta")?, spec.real("phi")?);
            (
                vec![id2(); 3],
                vec![proj(1), proj(1), diag(cis(t) - one(), cis(p) - one())],
            )
        }
        FamilyId::N_KNM1 => {
            let (t, p) = (spec.real("theta")?, spec.real("phi")?);
            let mut b = vec![proj(0); n - 1];
            b.push(diag(cis(t) - one(), cis(p) - one()));
            (vec![id2(); n], b)
        }
        FamilyId::T3_K2_B => {
            let (g, d) = (spec.real("gamma")?, spec.real("delta")?);
            (
                vec![proj(0), id2(), id2()],
                vec![proj(1), diag(one(), cis(g)), diag(one(), cis(d))],
            )
        }
        FamilyId::N_K2 => {
            let mut b = vec![proj(1)];
            for name in spec.family.param_names(n) {
                b.push(diag(one(), cis(spec.real(&name)?)));
            }
            let mut a = vec![proj(0)];
            a.extend(std::iter::repeat_n(id2(), n - 1));
            (a, b)
        }
        FamilyId::T3_K1_A | FamilyId::T3_K1_B => {
            let c = spec.real("c")?;
            let alpha = spec.real("alpha")?;
            let (case, gamma) = if spec.family == FamilyId::T3_K1_A {
                (K1Case::Conjugate, 0.0)
            } else {
                (K1Case::TwoAngle, spec.real("gamma")?)
            };
            let t = k1::k1_triple_unchecked(c, case, alpha, gamma);
            (
                vec![proj(0), diag(t.f, t.g), diag(one(), t.h)],
                vec![diag(re(c), one()), id2(), id2()],
            )
        }
        FamilyId::T3_K0 => spec.k0_point_unchecked()?.terms(),
        FamilyId::N_K1 => {
            let alpha = spec.real("alpha")?;
            let mut a = vec![proj(0) * (i * alpha.cos())];
            a.extend(std::iter::repeat_n(pauli_z(), n - 1));
            let mut b = vec![diag(re(alpha.sin()), one())];
            b.extend(std::iter::repeat_n(id2(), n - 1));
            (a, b)
        }
        FamilyId::N_K0 | FamilyId::L5_EQ9 => {
            let (a, b) = (spec.real("alpha")?, spec.real("beta")?);
            let mut ta = vec![diag(re(a.cos()), re(b.cos()))];
            ta.extend(std::iter::repeat_n(id2(), n - 1));
            let mut tb = vec![diag(re(a.sin()), re(b.sin())) * i];
            tb.extend(std::iter::repeat_n(pauli_z(), n - 1));
            (ta, tb)
        }
        FamilyId::L5_EQ8 => {
            let (a, b) = (spec.real("alpha")?, spec.real("beta")?);
            (
                vec![proj(0), id2(), id2()],
                vec![proj(1), diag(cis(a), cis(-a)), diag(cis(b), cis(-b))],
            )
        }
    })
}

/// Builds the gate without checking the parameter domain (for boundary
/// studies); the parameters must still be present and of the right type.
pub fn build_unvalidated(spec: &FamilySpec) -> Result<GeneratedGate> {
    spec.check_shape()?;
    let (a, b) = terms(spec)?;
    let matrix = kron_matrices(&a) + kron_matrices(&b);
    let mut operator = Operator::new(vec![2; spec.n], matrix)?;
    let mut declared = SchmidtDecompositionSR2::from_terms(a, b, DEFAULT_TOL)?;
    if let Some(perm) = &spec.permutation {
        operator = operator.permute_parties(perm)?;
        declared = declared.permuted(perm)?;
    }
    Ok(GeneratedGate {
        spec: spec.clone(),
        operator,
        declared,
        declared_k: spec.declared_k()?,
    })
}

/// Validates the parameters and builds the family member.
pub fn generate(spec: &FamilySpec) -> Result<GeneratedGate> {
    spec.validate()?;
    build_unvalidated(spec)
}
