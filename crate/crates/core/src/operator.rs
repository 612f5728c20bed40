//! Dense complex operators and the commutator algebra built on them.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::HERMITIAN_GATE;

pub type C64 = Complex64;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// A square complex matrix with a label and a cached hermiticity test.
///
/// Operators are immutable once built. Arithmetic through the `std::ops`
/// impls panics on dimension mismatch, like the underlying `nalgebra` types;
/// the named operations ([`commutator`], [`frobenius_inner`], ...) validate
/// and return errors instead.
#[derive(Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    label: String,
    hermitian_hint: bool,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("hermitian_hint", &self.hermitian_hint)
            .finish()
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

impl Operator {
    /// Validating constructor: square, non-empty, finite.
    pub fn new(matrix: DMatrix<C64>, label: impl Into<String>) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::Validation("operator dimension must be at least 1".into()));
        }
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Validation(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if let Some(pos) = matrix.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            let n = matrix.nrows();
            // column-major storage
            return Err(Error::Validation(format!(
                "non-finite entry at ({}, {})",
                pos % n,
                pos / n
            )));
        }
        Ok(Self::from_matrix(matrix, label))
    }

    /// Builds without the finiteness scan. Shape is still asserted.
    pub(crate) fn from_matrix(matrix: DMatrix<C64>, label: impl Into<String>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        let norm = matrix.norm();
        let hermitian_hint = hermiticity_defect(&matrix) <= HERMITIAN_GATE * norm.max(1.0);
        Self {
            matrix,
            label: label.into(),
            hermitian_hint,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix(DMatrix::identity(dim, dim), "I")
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix(DMatrix::zeros(dim, dim), "0")
    }

    /// Real diagonal operator.
    pub fn diagonal(values: &[f64], label: impl Into<String>) -> Self {
        let d = DVector::from_iterator(values.len(), values.iter().map(|&v| c(v)));
        Self::from_matrix(DMatrix::from_diagonal(&d), label)
    }

    /// Row-major real entries; panics on ragged input (test and fixture helper).
    pub fn from_real_rows(rows: &[&[f64]], label: impl Into<String>) -> Self {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| c(rows[i][j]));
        Self::from_matrix(m, label)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Whether `‖A − A†‖_F ≤ 1e−12·max(1, ‖A‖_F)`.
    pub fn hermitian_hint(&self) -> bool {
        self.hermitian_hint
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.matrix[(row, col)]
    }

    /// Conjugate transpose. Involutive bit-for-bit.
    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: self.matrix.adjoint(),
            label: format!("{}†", self.label),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Self::from_matrix(&self.matrix * factor, self.label.clone())
    }

    pub fn apply(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.matrix * v
    }

    pub(crate) fn check_same_dim(&self, other: &Operator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `‖self − other‖_F`
    pub fn distance(&self, other: &Operator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// `[A, B] = AB − BA`
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.check_same_dim(b)?;
    Ok(commutator_unchecked(a, b))
}

pub(crate) fn commutator_unchecked(a: &Operator, b: &Operator) -> Operator {
    let m = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
    Operator::from_matrix(m, format!("[{},{}]", a.label, b.label))
}

/// `{A, B} = AB + BA`
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    a.check_same_dim(b)?;
    let m = &a.matrix * &b.matrix + &b.matrix * &a.matrix;
    Ok(Operator::from_matrix(m, format!("{{{},{}}}", a.label, b.label)))
}

/// `[H, M]_n = [⋯[[H, M], M]⋯, M]` with `n` nested brackets.
pub fn iterated_commutator(h: &Operator, m: &Operator, n: usize) -> Result<Operator> {
    if n < 1 {
        return Err(Error::Validation("commutator order must be at least 1".into()));
    }
    h.check_same_dim(m)?;
    let mut acc = commutator_unchecked(h, m);
    for _ in 1..n {
        acc = commutator_unchecked(&acc, m);
    }
    Ok(acc.with_label(format!("[{},{}]_{n}", h.label, m.label)))
}

/// The first `n` iterated commutators `[H,M]_1 … [H,M]_n`.
pub fn commutator_ladder(h: &Operator, m: &Operator, n: usize) -> Result<Vec<Operator>> {
    h.check_same_dim(m)?;
    let mut out: Vec<Operator> = Vec::with_capacity(n);
    for k in 0..n {
        let next = match out.last() {
            None => commutator_unchecked(h, m),
            Some(prev) => commutator_unchecked(prev, m),
        };
        out.push(next.with_label(format!("[{},{}]_{}", h.label, m.label, k + 1)));
    }
    Ok(out)
}

/// `tr(A†B)`
pub fn frobenius_inner(a: &Operator, b: &Operator) -> Result<C64> {
    a.check_same_dim(b)?;
    Ok(frobenius_inner_unchecked(a, b))
}

pub(crate) fn frobenius_inner_unchecked(a: &Operator, b: &Operator) -> C64 {
    a.matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Best complex `c` with `A ≈ c·B` and the relative residual
/// `‖A − cB‖_F / max(‖A‖_F, ‖B‖_F)`. Used to read off ladder constants
/// from `[Q, M] = γQ`.
pub fn proportionality(a: &Operator, b: &Operator) -> Result<(C64, f64)> {
    a.check_same_dim(b)?;
    let bb = frobenius_inner_unchecked(b, b).re;
    if bb == 0.0 {
        return Err(Error::Precondition("reference operator is zero".into()));
    }
    let coef = frobenius_inner_unchecked(b, a) / bb;
    let resid = (&a.matrix - &b.matrix * coef).norm();
    let denom = a.frobenius_norm().max(b.frobenius_norm());
    Ok((coef, resid / denom))
}

/// Builds an operator from row-major nested entries, as read from files.
pub fn make_operator(dim: usize, entries: &[Vec<C64>], label: &str) -> Result<Operator> {
    if dim == 0 {
        return Err(Error::Validation("dim must be at least 1".into()));
    }
    if entries.len() != dim {
        return Err(Error::Validation(format!(
            "dim is {dim} but {} rows were given",
            entries.len()
        )));
    }
    if let Some((i, row)) = entries.iter().enumerate().find(|(_, r)| r.len() != dim) {
        return Err(Error::Validation(format!(
            "row {i} has {} entries, expected {dim}",
            row.len()
        )));
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| entries[i][j]);
    Operator::new(m, label)
}

impl<'a> Add<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn add(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.matrix + &rhs.matrix, format!("{}+{}", self.label, rhs.label))
    }
}

impl<'a> Sub<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn sub(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.matrix - &rhs.matrix, format!("{}-{}", self.label, rhs.label))
    }
}

impl<'a> Mul<&'a Operator> for &'a Operator {
    type Output = Operator;
    fn mul(self, rhs: &'a Operator) -> Operator {
        Operator::from_matrix(&self.matrix * &rhs.matrix, format!("{}{}", self.label, rhs.label))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        self.scale(c(rhs))
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        self.scale(c(-1.0))
    }
}

/// Serializes a complex number as `[re, im]`.
pub(crate) fn serialize_c64<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// Pauli matrices and 2×2 ladder helpers, ordered (up, down).
pub mod pauli {
    use super::*;

    pub fn sigma_x() -> Operator {
        Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]], "σx")
    }

    pub fn sigma_y() -> Operator {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)]);
        Operator::from_matrix(m, "σy")
    }

    pub fn sigma_z() -> Operator {
        Operator::diagonal(&[1.0, -1.0], "σz")
    }

    /// `σ₊ = |↑⟩⟨↓|`
    pub fn sigma_plus() -> Operator {
        Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]], "σ+")
    }

    /// `σ₋ = |↓⟩⟨↑|`, lowers σz = +1 to −1.
    pub fn sigma_minus() -> Operator {
        Operator::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]], "σ-")
    }
}

/// Kronecker product `A ⊗ B`; `A` indexes the slow (outer) factor.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator::from_matrix(a.matrix.kronecker(&b.matrix), format!("{}⊗{}", a.label, b.label))
}
