//! Dense complex linear algebra over multipartite index structures.
//!
//! Composite indices are row-major with party 1 varying slowest, so the
//! basis state `|i_1 i_2 ... i_n>` sits at `((i_1 d_2 + i_2) d_3 + ...) + i_n`.
//! Every reshape in this crate is defined against that layout.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default relative tolerance for numeric rank and structural tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest total dimension accepted for a gate.
pub const MAX_TOTAL_DIM: usize = 1 << 10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A dense operator acting on `C^{d_1} ⊗ ... ⊗ C^{d_n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    matrix: CMatrix,
    tol: f64,
}

impl Operator {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        validate_dims(&dims)?;
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::Dimension(format!(
                "matrix is {}x{} but local dimensions {:?} require {total}x{total}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::DegenerateInput(
                "matrix has non-finite entries".into(),
            ));
        }
        Ok(Self {
            dims,
            matrix,
            tol: DEFAULT_TOL,
        })
    }

    pub fn from_diagonal(dims: Vec<usize>, diagonal: &[Complex64]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if diagonal.len() != total {
            return Err(Error::Dimension(format!(
                "{} diagonal entries given for total dimension {total}",
                diagonal.len()
            )));
        }
        Self::new(
            dims,
            CMatrix::from_diagonal(&CVector::from_column_slice(diagonal)),
        )
    }

    pub fn identity(dims: Vec<usize>) -> Result<Self> {
        let total = dims.iter().product();
        Self::new(dims, CMatrix::identity(total, total))
    }

    /// Replaces the numeric tolerance; it must lie in `(0, 1)`.
    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::DegenerateInput(format!(
                "tolerance {tol} outside (0, 1)"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn n_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.adjoint(),
            tol: self.tol,
        }
    }

    /// Matrix product `self · other`; both must act on the same local dimensions.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "cannot compose operators on {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
            tol: self.tol,
        })
    }

    /// `||U^† U − I||_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.total_dim();
        (self.matrix.adjoint() * &self.matrix - CMatrix::identity(n, n)).norm()
    }

    /// Unitary to within `tol · sqrt(dim)` in Frobenius norm.
    pub fn is_unitary(&self) -> bool {
        self.unitarity_residual() <= self.tol * (self.total_dim() as f64).sqrt()
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let residual = self.unitarity_residual();
        if residual <= self.tol * (self.total_dim() as f64).sqrt() {
            Ok(())
        } else {
            Err(Error::NotUnitary(residual))
        }
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut max = 0.0f64;
        for (r, row) in self.matrix.row_iter().enumerate() {
            for (c, z) in row.iter().enumerate() {
                if r != c {
                    max = max.max(z.norm());
                }
            }
        }
        max
    }

    /// Off-diagonal moduli at most `tol` times the largest diagonal modulus.
    pub fn is_diagonal(&self) -> bool {
        let diag_max = self
            .matrix
            .diagonal()
            .iter()
            .fold(0.0f64, |m, z| m.max(z.norm()));
        self.off_diagonal_max() <= self.tol * diag_max
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    /// Reorders the tensor factors: party `k` of the result is party `perm[k]` of `self`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_parties();
        check_permutation(perm, n)?;
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let total = self.total_dim();
        let map: Vec<usize> = (0..total)
            .map(|new_idx| {
                let new_digits = split_index(new_idx, &new_dims);
                let mut old_digits = vec![0; n];
                for (k, &p) in perm.iter().enumerate() {
                    old_digits[p] = new_digits[k];
                }
                join_index(&old_digits, &self.dims)
            })
            .collect();
        let matrix = CMatrix::from_fn(total, total, |r, c| self.matrix[(map[r], map[c])]);
        Ok(Self {
            dims: new_dims,
            matrix,
            tol: self.tol,
        })
    }
}

fn validate_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::Dimension("no parties".into()));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::Dimension(format!("local dimension {d} is below 2")));
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&t| t <= MAX_TOTAL_DIM);
    if total.is_none() {
        return Err(Error::Dimension(format!(
            "total dimension of {dims:?} exceeds {MAX_TOTAL_DIM}"
        )));
    }
    Ok(())
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::Dimension(format!(
            "permutation of length {} for {n} parties",
            perm.len()
        )));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::Dimension(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Digits of a composite index, party 1 first.
pub(crate) fn split_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, &d) in digits.iter_mut().zip(dims).rev() {
        *slot = idx % d;
        idx /= d;
    }
    digits
}

pub(crate) fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

/// A split of the parties into two nonempty complementary sets (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(n_parties: usize, left: &[usize]) -> Result<Self> {
        let mut in_left = vec![false; n_parties];
        for &p in left {
            if p >= n_parties {
                return Err(Error::Bipartition(format!(
                    "party {} out of range for {n_parties} parties",
                    p + 1
                )));
            }
            if in_left[p] {
                return Err(Error::Bipartition(format!("party {} repeated", p + 1)));
            }
            in_left[p] = true;
        }
        let left: Vec<usize> = (0..n_parties).filter(|&p| in_left[p]).collect();
        let right: Vec<usize> = (0..n_parties).filter(|&p| !in_left[p]).collect();
        if left.is_empty() || right.is_empty() {
            return Err(Error::Bipartition(
                "both sides of a cut must be nonempty".into(),
            ));
        }
        Ok(Self { left, right })
    }

    /// `{party} | rest`.
    pub fn single(n_parties: usize, party: usize) -> Result<Self> {
        Self::new(n_parties, &[party])
    }

    /// All `2^{n-1} − 1` cuts, each listed once with party 1 on the left.
    pub fn all(n_parties: usize) -> Vec<Self> {
        if n_parties < 2 {
            return Vec::new();
        }
        (0..(1usize << (n_parties - 1)) - 1)
            .map(|mask| {
                // bit k of mask puts party k+2 on the left
                let mut left = vec![0];
                left.extend((1..n_parties).filter(|&p| mask >> (p - 1) & 1 == 1));
                Self::new(n_parties, &left).expect("enumerated cut is valid")
            })
            .collect()
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_parties(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[usize]| {
            s.iter()
                .map(|p| (p + 1).to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}|{{{}}}", side(&self.left), side(&self.right))
    }
}

/// A square operator acting on a single party.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalOperator {
    pub party: usize,
    pub matrix: CMatrix,
}

impl LocalOperator {
    pub fn new(party: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "local operator on party {} is {}x{}, not square",
                party + 1,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { party, matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Kronecker product of plain matrices, first factor slowest.
pub fn kron_matrices<'a, I>(factors: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

/// Entry-wise Kronecker product of one local operator per party, in party order.
pub fn kron(ops: &[LocalOperator]) -> Result<Operator> {
    if ops.is_empty() {
        return Err(Error::Dimension("empty operator list".into()));
    }
    for (k, op) in ops.iter().enumerate() {
        if op.party != k {
            return Err(Error::Dimension(format!(
                "operator for party {} found in slot {}",
                op.party + 1,
                k + 1
            )));
        }
    }
    let dims = ops.iter().map(LocalOperator::dim).collect();
    Operator::new(dims, kron_matrices(ops.iter().map(|o| &o.matrix)))
}

/// Realignment of `u` across `cut`.
///
/// Row index enumerates the `(row, col)` index pairs of the left parties,
/// column index those of the right parties, each in ascending party order
/// with the row digit of a party slower than its column digit. Product
/// operators `X_S ⊗ Y_{S̄}` map to `vec(X) vec(Y)^T`.
pub fn matricize(u: &Operator, cut: &Bipartition) -> Result<CMatrix> {
    let dims = u.dims();
    if cut.n_parties() != dims.len() {
        return Err(Error::Bipartition(format!(
            "cut {cut} is for {} parties, operator has {}",
            cut.n_parties(),
            dims.len()
        )));
    }
    let pair_dim = |side: &[usize]| side.iter().map(|&p| dims[p] * dims[p]).product::<usize>();
    let (rows, cols) = (pair_dim(cut.left()), pair_dim(cut.right()));
    let total = u.total_dim();
    let digits: Vec<Vec<usize>> = (0..total).map(|i| split_index(i, dims)).collect();
    let side_index = |side: &[usize], r: &[usize], c: &[usize]| {
        side.iter()
            .fold(0, |acc, &p| (acc * dims[p] + r[p]) * dims[p] + c[p])
    };
    let mut out = CMatrix::zeros(rows, cols);
    for r in 0..total {
        for c in 0..total {
            let (rd, cd) = (&digits[r], &digits[c]);
            out[(
                side_index(cut.left(), rd, cd),
                side_index(cut.right(), rd, cd),
            )] = u.matrix()[(r, c)];
        }
    }
    Ok(out)
}

/// Row-major vectorization of an operator matrix over `dims`, pairing the row
/// and column digit of each party. Inverse of [`devectorize`].
pub fn vectorize(matrix: &CMatrix, dims: &[usize]) -> CVector {
    let total: usize = dims.iter().product();
    let digits: Vec<Vec<usize>> = (0..total).map(|i| split_index(i, dims)).collect();
    let mut out = CVector::zeros(total * total);
    for r in 0..total {
        for c in 0..total {
            let idx = dims.iter().enumerate().fold(0, |acc, (p, &d)| {
                (acc * d + digits[r][p]) * d + digits[c][p]
            });
            out[idx] = matrix[(r, c)];
        }
    }
    out
}

pub fn devectorize(v: &CVector, dims: &[usize]) -> CMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(v.len(), total * total, "vector length does not match dims");
    let digits: Vec<Vec<usize>> = (0..total).map(|i| split_index(i, dims)).collect();
    CMatrix::from_fn(total, total, |r, c| {
        let idx = dims.iter().enumerate().fold(0, |acc, (p, &d)| {
            (acc * d + digits[r][p]) * d + digits[c][p]
        });
        v[idx]
    })
}

/// Thin SVD `m = U · diag(s) · V^†` with `s` in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

/// Thin SVD computed with faer; nalgebra's complex SVD loses accuracy on
/// rank-deficient wide matrices, which is exactly the realignment case.
/// `None` if the iteration fails to converge.
pub fn svd(m: &CMatrix) -> Option<Svd> {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Some(Svd {
            u: CMatrix::zeros(r, 0),
            s: Vec::new(),
            v: CMatrix::zeros(c, 0),
        });
    }
    let f = faer::Mat::<faer::c64>::from_fn(r, c, |i, j| m[(i, j)]);
    let dec = f.thin_svd().ok()?;
    let (u, s, v) = (dec.U(), dec.S().column_vector(), dec.V());
    Some(Svd {
        u: CMatrix::from_fn(r, k, |i, j| u[(i, j)]),
        s: (0..k).map(|j| s[j].re).collect(),
        v: CMatrix::from_fn(c, k, |i, j| v[(i, j)]),
    })
}

/// Singular values in descending order (NaN if the SVD does not converge).
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let f = faer::Mat::<faer::c64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    match f.singular_values() {
        Ok(sv) => sv,
        Err(_) => vec![f64::NAN; m.nrows().min(m.ncols())],
    }
}

/// Number of singular values above `tol · σ_max`; `None` for a zero matrix
/// or a failed SVD.
pub fn numeric_rank(m: &CMatrix, tol: f64) -> Option<usize> {
    let sv = singular_values(m);
    let max = *sv.first()?;
    if max == 0.0 || !max.is_finite() {
        return None;
    }
    Some(sv.iter().filter(|&&s| s > tol * max).count())
}

/// Operator Schmidt rank of `u` across `cut`.
pub fn operator_schmidt_rank(u: &Operator, cut: &Bipartition) -> Result<usize> {
    numeric_rank(&matricize(u, cut)?, u.tol())
        .ok_or_else(|| Error::DegenerateInput("zero operator has no Schmidt rank".into()))
}

/// A pure state vector over explicit local dimensions (unnormalized).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub dims: Vec<usize>,
    pub amplitudes: CVector,
}

impl PureState {
    /// Rank of the coefficient matrix with subsystems `left` as rows.
    pub fn schmidt_rank(&self, left: &[usize], tol: f64) -> Result<usize> {
        let n = self.dims.len();
        let in_left: Vec<bool> = (0..n).map(|p| left.contains(&p)).collect();
        if in_left.iter().all(|&b| b) || in_left.iter().all(|&b| !b) {
            return Err(Error::Bipartition("both sides must be nonempty".into()));
        }
        let lefts: Vec<usize> = (0..n).filter(|&p| in_left[p]).collect();
        let rights: Vec<usize> = (0..n).filter(|&p| !in_left[p]).collect();
        let ldims: Vec<usize> = lefts.iter().map(|&p| self.dims[p]).collect();
        let rdims: Vec<usize> = rights.iter().map(|&p| self.dims[p]).collect();
        let mut m = CMatrix::zeros(ldims.iter().product(), rdims.iter().product());
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let digits = split_index(idx, &self.dims);
            let l: Vec<usize> = lefts.iter().map(|&p| digits[p]).collect();
            let r: Vec<usize> = rights.iter().map(|&p| digits[p]).collect();
            m[(join_index(&l, &ldims), join_index(&r, &rdims))] = *amp;
        }
        numeric_rank(&m, tol).ok_or_else(|| Error::DegenerateInput("zero state".into()))
    }
}

/// The unnormalized state `(U ⊗ I) Σ_j |j>|j>` with each ancilla placed
/// directly after its party: subsystem order `1, anc_1, 2, anc_2, ...`.
pub fn corresponding_state(u: &Operator) -> PureState {
    let dims = u.dims();
    let total = u.total_dim();
    let grouped: Vec<usize> = dims.iter().flat_map(|&d| [d, d]).collect();
    let mut amplitudes = CVector::zeros(total * total);
    for r in 0..total {
        let rd = split_index(r, dims);
        for c in 0..total {
            let cd = split_index(c, dims);
            let digits: Vec<usize> = rd.iter().zip(&cd).flat_map(|(&a, &b)| [a, b]).collect();
            amplitudes[join_index(&digits, &grouped)] = u.matrix()[(r, c)];
        }
    }
    PureState {
        dims: grouped,
        amplitudes,
    }
}

/// Diagonal of a three-qubit diagonal gate read as a state, `|jkl><jkl| ↦ |jkl>`.
pub fn diag3_isomorphic_state(u: &Operator) -> Result<CVector> {
    if u.dims() != [2, 2, 2] {
        return Err(Error::Dimension(format!(
            "expected three qubits, got local dimensions {:?}",
            u.dims()
        )));
    }
    if !u.is_diagonal() {
        return Err(Error::NotDiagonal(u.off_diagonal_max()));
    }
    Ok(CVector::from_vec(u.diagonal()))
}
