//! Unique two-term Schmidt decompositions of genuine multipartite gates and
//! the singular-number invariant built on them.
//!
//! For `n ≥ 3` parties a genuine gate of operator Schmidt rank two has
//! exactly one expansion `U = ⊗A_j + ⊗B_j` up to scalars and swapping the
//! two terms. [`schmidt_decomposition_sr2`] recovers it in the gate's given
//! basis; [`singular_number`] counts the non-invertible local factors, a
//! local-equivalence invariant taking values in `{0, 1, 2, n−1, n}`.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::{
    devectorize, kron_matrices, matricize, numeric_rank, operator_schmidt_rank, singular_values,
    svd, vectorize, Bipartition, CMatrix, CVector, LocalOperator, Operator, Svd, ONE, ZERO,
};

/// Candidate ratios from different minors must agree to this relative level.
const ROOT_MATCH_TOL: f64 = 1e-6;
/// Relative factorization residual below which a span member counts as a product.
const PRODUCT_RESIDUAL_TOL: f64 = 1e-8;
/// Minor polynomials with coefficient norm below this vanish identically.
const VANISHING_MINOR_TOL: f64 = 1e-10;

/// Realignment of a raw matrix across `{party 1} | rest`.
fn realign_first(m: &CMatrix, dims: &[usize]) -> CMatrix {
    let op = Operator::new(dims.to_vec(), m.clone()).expect("dims validated by caller");
    matricize(&op, &Bipartition::single(dims.len(), 0).expect("n ≥ 2")).expect("valid cut")
}

/// Best product approximation of `m` by successive rank-one truncation.
/// Returns the per-party factors and the relative Frobenius residual.
pub fn factor_product(m: &CMatrix, dims: &[usize]) -> (Vec<CMatrix>, f64) {
    let norm = m.norm();
    let mut factors = Vec::with_capacity(dims.len());
    let mut rest = m.clone();
    for k in 0..dims.len() - 1 {
        let r = realign_first(&rest, &dims[k..]);
        let Some(d) = svd(&r) else {
            return (factors, f64::NAN);
        };
        let first = devectorize(&(d.u.column(0) * Complex64::from(d.s[0])), &dims[k..=k]);
        let tail: CVector = d.v.column(0).conjugate();
        factors.push(first);
        rest = devectorize(&tail, &dims[k + 1..]);
    }
    factors.push(rest);
    let residual = if norm == 0.0 {
        0.0
    } else {
        (kron_matrices(&factors) - m).norm() / norm
    };
    (factors, residual)
}

/// A product operator found in a two-dimensional span.
#[derive(Clone, Debug)]
pub struct ProductLine {
    /// `(α, β)` with `αX + βY` a product; normalized to `(1, t)` or `(0, 1)`.
    pub coeffs: (Complex64, Complex64),
    /// Per-party factors whose Kronecker product equals `αX + βY`.
    pub factors: Vec<CMatrix>,
    /// Relative factorization residual.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub enum SpanProducts {
    /// Finitely many product lines (at most two for spans of genuinely distinct products).
    Lines(Vec<ProductLine>),
    /// Every member of the span is a product operator.
    Continuum,
}

/// Homogeneous quadratic `a α² + b αβ + c β²`.
#[derive(Clone, Copy, Debug)]
struct Quadratic {
    a: Complex64,
    b: Complex64,
    c: Complex64,
}

impl Quadratic {
    fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr()).sqrt()
    }

    fn eval(&self, (al, be): (Complex64, Complex64)) -> Complex64 {
        self.a * al * al + self.b * al * be + self.c * be * be
    }

    /// Projective roots `(α : β)`, unit normalized.
    fn roots(&self) -> Vec<(Complex64, Complex64)> {
        let Quadratic { a, b, c } = *self;
        // β/α = t solves c t² + b t + a = 0
        let disc = (b * b - a * c * 4.0).sqrt();
        let s = if (b.conj() * disc).re >= 0.0 {
            disc
        } else {
            -disc
        };
        let q = -(b + s) * 0.5;
        let scale = self.norm();
        [(c, q), (q, a)]
            .into_iter()
            .filter_map(|(al, be)| {
                let n = (al.norm_sqr() + be.norm_sqr()).sqrt();
                (n > 1e-14 * scale).then(|| (al / n, be / n))
            })
            .collect()
    }
}

fn projective_distance(x: (Complex64, Complex64), y: (Complex64, Complex64)) -> f64 {
    (x.0 * y.1 - x.1 * y.0).norm()
}

/// Orthonormal basis (as columns) of the column space of `m`.
fn range_basis(m: &CMatrix, tol: f64) -> CMatrix {
    let Some(Svd { u, s, .. }) = svd(m) else {
        return CMatrix::zeros(m.nrows(), 0);
    };
    let max = s.first().copied().unwrap_or(0.0);
    let keep: Vec<usize> = s
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol * max)
        .map(|(i, _)| i)
        .collect();
    CMatrix::from_fn(m.nrows(), keep.len(), |r, k| u[(r, keep[k])])
}

/// Quadratics whose common zeros are the ratios making `αX + βY` rank ≤ 1
/// across the realignment pair `(rx, ry)`: one per 2×2 minor of the pencil
/// compressed onto its joint row and column spaces.
fn minor_quadratics(rx: &CMatrix, ry: &CMatrix, tol: f64) -> Vec<Quadratic> {
    let cols = range_basis(
        &CMatrix::from_fn(rx.nrows(), 2 * rx.ncols(), |r, c| {
            if c < rx.ncols() {
                rx[(r, c)]
            } else {
                ry[(r, c - rx.ncols())]
            }
        }),
        tol,
    );
    let rows = range_basis(
        &CMatrix::from_fn(rx.ncols(), 2 * rx.nrows(), |r, c| {
            if c < rx.nrows() {
                rx[(c, r)].conj()
            } else {
                ry[(c - rx.nrows(), r)].conj()
            }
        }),
        tol,
    );
    let (rc, rr) = (cols.ncols(), rows.ncols());
    if rc < 2 || rr < 2 {
        return Vec::new();
    }
    let x = cols.adjoint() * rx * &rows;
    let y = cols.adjoint() * ry * &rows;
    let mut out = Vec::new();
    for i in 0..rc {
        for k in i + 1..rc {
            for l in 0..rr {
                for m in l + 1..rr {
                    out.push(Quadratic {
                        a: x[(i, l)] * x[(k, m)] - x[(i, m)] * x[(k, l)],
                        b: x[(i, l)] * y[(k, m)] + y[(i, l)] * x[(k, m)]
                            - x[(i, m)] * y[(k, l)]
                            - y[(i, m)] * x[(k, l)],
                        c: y[(i, l)] * y[(k, m)] - y[(i, m)] * y[(k, l)],
                    });
                }
            }
        }
    }
    out
}

/// All ratios `(α : β)` for which `αX + βY` is a product operator across all parties.
///
/// Each single-party cut contributes the 2×2 minors of the realigned pencil,
/// quadratics in `β/α`. Roots of the dominant minor are intersected with the
/// remaining minors and then confirmed by an explicit per-party factorization.
pub fn product_operators_in_span(x: &Operator, y: &Operator) -> Result<SpanProducts> {
    if x.dims() != y.dims() {
        return Err(Error::Dimension(format!(
            "span members act on {:?} and {:?}",
            x.dims(),
            y.dims()
        )));
    }
    let tol = x.tol();
    let (nx, ny) = (x.frobenius_norm(), y.frobenius_norm());
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::DegenerateSpan);
    }
    let xh = x.matrix() / Complex64::from(nx);
    let yh = y.matrix() / Complex64::from(ny);
    let pair = CMatrix::from_columns(&[vectorize(&xh, x.dims()), vectorize(&yh, x.dims())]);
    if numeric_rank(&pair, tol) != Some(2) {
        return Err(Error::DegenerateSpan);
    }
    let dims = x.dims();
    let n = dims.len();
    if n == 1 {
        return Ok(SpanProducts::Continuum);
    }

    let xo = Operator::new(dims.to_vec(), xh.clone())?;
    let yo = Operator::new(dims.to_vec(), yh.clone())?;
    let mut quads = Vec::new();
    for party in 0..n {
        let cut = Bipartition::single(n, party)?;
        quads.extend(minor_quadratics(
            &matricize(&xo, &cut)?,
            &matricize(&yo, &cut)?,
            tol,
        ));
    }
    let Some(dominant) = quads
        .iter()
        .copied()
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))
        .filter(|q| q.norm() > VANISHING_MINOR_TOL)
    else {
        return Ok(SpanProducts::Continuum);
    };

    let mut lines: Vec<ProductLine> = Vec::new();
    let mut accepted: Vec<(Complex64, Complex64)> = Vec::new();
    for root in dominant.roots() {
        if accepted
            .iter()
            .any(|&r| projective_distance(r, root) <= ROOT_MATCH_TOL)
        {
            continue;
        }
        let consistent = quads
            .iter()
            .all(|q| q.eval(root).norm() <= ROOT_MATCH_TOL * q.norm().max(dominant.norm()));
        if !consistent {
            continue;
        }
        let member = &xh * root.0 + &yh * root.1;
        let (factors, residual) = factor_product(&member, dims);
        if residual.is_nan() || residual > PRODUCT_RESIDUAL_TOL {
            continue;
        }
        accepted.push(root);
        // back to the caller's (unnormalized) X and Y
        let (al, be) = (root.0 / nx, root.1 / ny);
        let (coeffs, rescale) = if al.norm() > ROOT_MATCH_TOL * be.norm() {
            ((ONE, be / al), al)
        } else {
            ((ZERO, ONE), be)
        };
        let mut factors = factors;
        factors[0] /= rescale;
        lines.push(ProductLine {
            coeffs,
            factors,
            residual,
        });
    }
    Ok(SpanProducts::Lines(lines))
}

/// Smallest over largest singular value is at most `tol`.
pub fn is_singular(m: &CMatrix, tol: f64) -> bool {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) => max == 0.0 || min <= tol * max,
        _ => true,
    }
}

/// Distance between the lines spanned by two operators:
/// `min_φ ||x̂ − e^{iφ} ŷ||_F` for unit-normalized `x̂, ŷ`.
pub fn line_distance(x: &CMatrix, y: &CMatrix) -> f64 {
    let (nx, ny) = (x.norm(), y.norm());
    if nx == 0.0 || ny == 0.0 {
        return if nx == ny { 0.0 } else { 1.0 };
    }
    let xh = x / Complex64::from(nx);
    let yh = y / Complex64::from(ny);
    let overlap: Complex64 = yh.iter().zip(xh.iter()).map(|(b, a)| b.conj() * a).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    (xh - yh * phase).norm()
}

/// Unit Frobenius norm with the first clearly nonzero entry (row-major) real positive.
/// Returns the normalized matrix and the scalar that was divided out.
fn gauge_fix(m: &CMatrix) -> (CMatrix, Complex64) {
    let norm = m.norm();
    if norm == 0.0 {
        return (m.clone(), ZERO);
    }
    let max = m.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let lead = (0..m.nrows())
        .flat_map(|r| (0..m.ncols()).map(move |c| (r, c)))
        .map(|rc| m[rc])
        .find(|z| z.norm() > 1e-8 * max)
        .unwrap_or(ONE);
    let scalar = lead / lead.norm() * norm;
    (m / scalar, scalar)
}

/// `scale_a · ⊗A_j + scale_b · ⊗B_j` with every factor gauge-fixed.
#[derive(Clone, Debug)]
pub struct SchmidtDecompositionSR2 {
    pub dims: Vec<usize>,
    pub term_a: Vec<LocalOperator>,
    pub term_b: Vec<LocalOperator>,
    pub scale_a: Complex64,
    pub scale_b: Complex64,
    pub tol: f64,
}

impl SchmidtDecompositionSR2 {
    /// Builds a decomposition from two product terms, fixing the scalar gauge
    /// and the term order.
    pub fn from_terms(term_a: Vec<CMatrix>, term_b: Vec<CMatrix>, tol: f64) -> Result<Self> {
        if term_a.len() != term_b.len() || term_a.is_empty() {
            return Err(Error::Dimension(format!(
                "terms have {} and {} factors",
                term_a.len(),
                term_b.len()
            )));
        }
        let dims: Vec<usize> = term_a.iter().map(|m| m.nrows()).collect();
        for (j, (a, b)) in term_a.iter().zip(&term_b).enumerate() {
            if a.shape() != (dims[j], dims[j]) || b.shape() != (dims[j], dims[j]) {
                return Err(Error::Dimension(format!(
                    "factors on party {} have shapes {:?} and {:?}",
                    j + 1,
                    a.shape(),
                    b.shape()
                )));
            }
        }
        let fix = |term: Vec<CMatrix>| -> Result<(Vec<LocalOperator>, Complex64)> {
            let mut scale = ONE;
            let mut ops = Vec::with_capacity(term.len());
            for (party, m) in term.into_iter().enumerate() {
                let (g, s) = gauge_fix(&m);
                scale *= s;
                ops.push(LocalOperator::new(party, g)?);
            }
            Ok((ops, scale))
        };
        let (mut term_a, mut scale_a) = fix(term_a)?;
        let (mut term_b, mut scale_b) = fix(term_b)?;
        if term_order(&term_a[0].matrix, scale_a, &term_b[0].matrix, scale_b) == Ordering::Greater {
            std::mem::swap(&mut term_a, &mut term_b);
            std::mem::swap(&mut scale_a, &mut scale_b);
        }
        Ok(Self {
            dims,
            term_a,
            term_b,
            scale_a,
            scale_b,
            tol,
        })
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn term_a_matrix(&self) -> CMatrix {
        kron_matrices(self.term_a.iter().map(|o| &o.matrix)) * self.scale_a
    }

    pub fn term_b_matrix(&self) -> CMatrix {
        kron_matrices(self.term_b.iter().map(|o| &o.matrix)) * self.scale_b
    }

    pub fn reconstruct(&self) -> Operator {
        Operator::new(
            self.dims.clone(),
            self.term_a_matrix() + self.term_b_matrix(),
        )
        .expect("factor dims are consistent")
    }

    pub fn singular_number(&self) -> usize {
        self.term_a
            .iter()
            .chain(&self.term_b)
            .filter(|op| is_singular(&op.matrix, self.tol))
            .count()
    }

    /// Largest per-party line distance to `other`, minimized over the term swap.
    pub fn factor_line_distance(&self, other: &Self) -> f64 {
        let dist = |xs: &[LocalOperator], ys: &[LocalOperator]| {
            xs.iter()
                .zip(ys)
                .map(|(x, y)| line_distance(&x.matrix, &y.matrix))
                .fold(0.0f64, f64::max)
        };
        if self.dims != other.dims {
            return f64::INFINITY;
        }
        let straight = dist(&self.term_a, &other.term_a).max(dist(&self.term_b, &other.term_b));
        let swapped = dist(&self.term_a, &other.term_b).max(dist(&self.term_b, &other.term_a));
        straight.min(swapped)
    }

    /// Conjugates every factor: `A_j ↦ V_j A_j W_j`.
    pub fn conjugated(&self, left: &[CMatrix], right: &[CMatrix]) -> Result<Self> {
        let map = |term: &[LocalOperator]| -> Vec<CMatrix> {
            term.iter()
                .zip(left.iter().zip(right))
                .map(|(op, (v, w))| v * &op.matrix * w)
                .collect()
        };
        let mut a = map(&self.term_a);
        let mut b = map(&self.term_b);
        a[0] *= self.scale_a;
        b[0] *= self.scale_b;
        Self::from_terms(a, b, self.tol)
    }

    /// Applies a party permutation: party `k` of the result is party `perm[k]` here.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let pick = |term: &[LocalOperator]| -> Vec<CMatrix> {
            perm.iter().map(|&p| term[p].matrix.clone()).collect()
        };
        if perm.len() != self.n_parties() || perm.iter().any(|&p| p >= self.n_parties()) {
            return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
        }
        let mut a = pick(&self.term_a);
        let mut b = pick(&self.term_b);
        a[0] *= self.scale_a;
        b[0] *= self.scale_b;
        Self::from_terms(a, b, self.tol)
    }
}

/// Ordering of the two terms: the term whose first factor is better
/// conditioned comes first, then the larger scale, then entries.
fn term_order(a: &CMatrix, sa: Complex64, b: &CMatrix, sb: Complex64) -> Ordering {
    let conditioning = |m: &CMatrix| {
        let sv = singular_values(m);
        sv.last().copied().unwrap_or(0.0)
            / sv.first().copied().unwrap_or(1.0).max(f64::MIN_POSITIVE)
    };
    let (ca, cb) = (conditioning(a), conditioning(b));
    if (ca - cb).abs() > 1e-9 {
        return cb.total_cmp(&ca);
    }
    if (sa.norm() - sb.norm()).abs() > 1e-9 * sa.norm().max(sb.norm()) {
        return sb.norm().total_cmp(&sa.norm());
    }
    for (x, y) in a.iter().zip(b.iter()) {
        let ord = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if (x - y).norm() > 1e-12 && ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Not a product across any bipartition.
pub fn is_genuine(u: &Operator) -> Result<bool> {
    u.ensure_unitary()?;
    genuine_unchecked(u)
}

fn genuine_unchecked(u: &Operator) -> Result<bool> {
    if u.n_parties() < 2 {
        return Ok(false);
    }
    for cut in Bipartition::all(u.n_parties()) {
        if operator_schmidt_rank(u, &cut)? < 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unique two-term Schmidt decomposition of a genuine gate with `n ≥ 3` parties.
pub fn schmidt_decomposition_sr2(u: &Operator) -> Result<SchmidtDecompositionSR2> {
    let n = u.n_parties();
    match n {
        1 => {
            return Err(Error::NotSchmidtRankTwo(
                "single-party operators have Schmidt rank one".into(),
            ))
        }
        2 => return Err(Error::BipartiteNotUnique),
        _ => {}
    }
    let first = Bipartition::single(n, 0)?;
    let r = matricize(u, &first)?;
    let first_rank =
        numeric_rank(&r, u.tol()).ok_or_else(|| Error::DegenerateInput("zero operator".into()))?;
    if first_rank != 2 {
        return Err(Error::NotSchmidtRankTwo(format!(
            "rank {first_rank} across {first}"
        )));
    }
    for cut in Bipartition::all(n) {
        match operator_schmidt_rank(u, &cut)? {
            1 => return Err(Error::NotGenuine(cut.to_string())),
            2 => {}
            k => {
                return Err(Error::NotSchmidtRankTwo(format!("rank {k} across {cut}")));
            }
        }
    }

    let rest_dims = &u.dims()[1..];
    let dec = svd(&r).ok_or_else(|| Error::DegenerateInput("SVD did not converge".into()))?;
    let span_member = |k: usize| -> Result<Operator> {
        let v: CVector = dec.v.column(k).conjugate();
        Operator::new(rest_dims.to_vec(), devectorize(&v, rest_dims))?.with_tol(u.tol())
    };
    let lines = match product_operators_in_span(&span_member(0)?, &span_member(1)?)? {
        SpanProducts::Continuum => {
            return Err(Error::NotGenuine(
                "every operator in the span of the remaining parties is a product".into(),
            ))
        }
        SpanProducts::Lines(lines) => lines,
    };
    if lines.len() < 2 {
        return Err(Error::NotSchmidtRankTwo(format!(
            "the span of the remaining parties holds {} product direction(s); \
             two product terms cannot reproduce the gate",
            lines.len()
        )));
    }
    if lines.len() > 2 {
        return Err(Error::NotGenuine(
            "more than two product directions in the span".into(),
        ));
    }

    // Fit R ≈ m_a vec(A_rest)^T + m_b vec(B_rest)^T.
    let a_rest = vectorize(&kron_matrices(&lines[0].factors), rest_dims);
    let b_rest = vectorize(&kron_matrices(&lines[1].factors), rest_dims);
    let g = CMatrix::from_columns(&[a_rest.clone(), b_rest.clone()]);
    let gram = g.transpose() * g.conjugate();
    let inv = gram.try_inverse().ok_or_else(|| {
        Error::InternalInvariantViolation("product directions are dependent".into())
    })?;
    let firsts = &r * g.conjugate() * inv;
    let fitted = firsts.column(0) * a_rest.transpose() + firsts.column(1) * b_rest.transpose();
    let misfit = (fitted - &r).norm() / r.norm();
    if misfit > PRODUCT_RESIDUAL_TOL {
        return Err(Error::NotSchmidtRankTwo(format!(
            "two-term product fit leaves relative residual {misfit:.3e}"
        )));
    }
    let first_dims = &u.dims()[..1];
    let mut term_a = vec![devectorize(&firsts.column(0).into_owned(), first_dims)];
    term_a.extend(lines[0].factors.iter().cloned());
    let mut term_b = vec![devectorize(&firsts.column(1).into_owned(), first_dims)];
    term_b.extend(lines[1].factors.iter().cloned());
    let dec = SchmidtDecompositionSR2::from_terms(term_a, term_b, u.tol())?;

    let err = (dec.reconstruct().matrix() - u.matrix()).norm();
    if err > PRODUCT_RESIDUAL_TOL * u.frobenius_norm() {
        return Err(Error::InternalInvariantViolation(format!(
            "decomposition reconstructs the gate only to {err:.3e}"
        )));
    }
    Ok(dec)
}

/// Number of singular local operators among the `2n` factors.
pub fn singular_number(dec: &SchmidtDecompositionSR2) -> usize {
    dec.singular_number()
}

/// Values the singular number can take for `n ≥ 3` parties: `{0, 1, 2, n−1, n}`.
pub fn admissible_singular_numbers(n: usize) -> Vec<usize> {
    let mut ks = vec![0, 1, 2, n - 1, n];
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Classification of a gate: genuineness, per-cut ranks and singular number.
#[derive(Clone, Debug)]
pub struct ClassLabel {
    pub n: usize,
    pub dims: Vec<usize>,
    pub genuine: bool,
    pub cut_ranks: Vec<(Bipartition, usize)>,
    /// Operator Schmidt rank over all parties; a lower bound when `schmidt_rank_exact` is false.
    pub schmidt_rank_overall: usize,
    pub schmidt_rank_exact: bool,
    /// Present iff the gate is genuine, has Schmidt rank two and `n ≥ 3`.
    pub singular_number: Option<usize>,
    pub decomposition: Option<SchmidtDecompositionSR2>,
}

impl ClassLabel {
    pub fn max_cut_rank(&self) -> usize {
        self.cut_ranks.iter().map(|(_, r)| *r).max().unwrap_or(1)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dims: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        writeln!(f, "parties: {}", self.n)?;
        writeln!(f, "dims: {}", dims.join(" "))?;
        writeln!(f, "genuine: {}", self.genuine)?;
        let mut cuts = String::new();
        for (i, (cut, r)) in self.cut_ranks.iter().enumerate() {
            if i > 0 {
                cuts.push(' ');
            }
            let _ = write!(cuts, "{cut}={r}");
        }
        writeln!(f, "sr_per_cut: {cuts}")?;
        let bound = if self.schmidt_rank_exact { "" } else { ">=" };
        writeln!(f, "sr_overall: {bound}{}", self.schmidt_rank_overall)?;
        match self.singular_number {
            Some(k) => writeln!(f, "singular_number: {k}"),
            None => writeln!(f, "singular_number: n/a"),
        }
    }
}

/// Classifies a unitary gate by genuineness, Schmidt rank and singular number.
pub fn classify(u: &Operator) -> Result<ClassLabel> {
    u.ensure_unitary()?;
    let n = u.n_parties();
    let cut_ranks = Bipartition::all(n)
        .into_iter()
        .map(|cut| operator_schmidt_rank(u, &cut).map(|r| (cut, r)))
        .collect::<Result<Vec<_>>>()?;
    let max_rank = cut_ranks.iter().map(|(_, r)| *r).max().unwrap_or(1);
    let genuine = n >= 2 && cut_ranks.iter().all(|(_, r)| *r >= 2);

    let mut label = ClassLabel {
        n,
        dims: u.dims().to_vec(),
        genuine,
        cut_ranks,
        schmidt_rank_overall: max_rank,
        schmidt_rank_exact: max_rank == 1 || n == 2,
        singular_number: None,
        decomposition: None,
    };
    if genuine && n >= 3 && max_rank == 2 {
        match schmidt_decomposition_sr2(u) {
            Ok(dec) => {
                let k = dec.singular_number();
                if !admissible_singular_numbers(n).contains(&k) {
                    return Err(Error::InternalInvariantViolation(format!(
                        "singular number {k} is impossible for {n} parties"
                    )));
                }
                label.schmidt_rank_exact = true;
                label.singular_number = Some(k);
                label.decomposition = Some(dec);
            }
            Err(Error::NotSchmidtRankTwo(_)) => {
                label.schmidt_rank_overall = 3;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(label)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanDichotomy {
    /// Every diagonal unitary in `span{U, I}` is proportional to `U` or `I`.
    OnlyTrivial,
    /// The span holds further diagonal unitaries.
    Richer,
}

/// For `U = diag(1, d_1, ..., d_{N−1})`, decides whether `span{U, I}` contains
/// diagonal unitaries other than multiples of `U` and `I`: it does not exactly
/// when two different entries `d_i ≠ d_j` both differ from 1.
pub fn span_unitary_dichotomy(d: &[Complex64]) -> Result<SpanDichotomy> {
    const EQ: f64 = 1e-9;
    if let Some(z) = d.iter().find(|z| (z.norm() - 1.0).abs() > EQ) {
        return Err(Error::DegenerateInput(format!(
            "entry {z} does not have unit modulus"
        )));
    }
    let non_one: Vec<Complex64> = d
        .iter()
        .copied()
        .filter(|z| (z - ONE).norm() > EQ)
        .collect();
    let Some(&first) = non_one.first() else {
        return Err(Error::DegenerateInput(
            "diag(1, d_1, ...) is proportional to the identity".into(),
        ));
    };
    if non_one.iter().any(|z| (z - first).norm() > EQ) {
        Ok(SpanDichotomy::OnlyTrivial)
    } else {
        Ok(SpanDichotomy::Richer)
    }
}

/// Diagonal blocks `<i|U|i>` of the first party, as operators on the rest.
pub fn control_slices(u: &Operator) -> Result<Vec<Operator>> {
    if u.n_parties() < 2 {
        return Err(Error::Dimension(
            "slicing needs at least two parties".into(),
        ));
    }
    let d = u.dims()[0];
    let rest: Vec<usize> = u.dims()[1..].to_vec();
    let block: usize = rest.iter().product();
    (0..d)
        .map(|i| {
            let m = u
                .matrix()
                .view((i * block, i * block), (block, block))
                .into_owned();
            Operator::new(rest.clone(), m)?.with_tol(u.tol())
        })
        .collect()
}

/// Relative least-squares residual of `target` against `span(basis)`.
pub fn span_residual(target: &CMatrix, basis: &[CMatrix]) -> f64 {
    let cols: Vec<CVector> = basis
        .iter()
        .map(|m| CVector::from_column_slice(m.as_slice()))
        .collect();
    let b = CMatrix::from_columns(&cols);
    let t = CVector::from_column_slice(target.as_slice());
    let q = range_basis(&b, 1e-12);
    let proj = &q * (q.adjoint() * &t);
    (t.clone() - proj).norm() / t.norm().max(f64::MIN_POSITIVE)
}
