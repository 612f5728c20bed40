//! Hermitian eigendecomposition, degenerate-cluster bookkeeping and
//! spectral matrix functions.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{c, Operator, C64};
use crate::tolerance::Tolerance;

/// Post-condition bound on `‖Av − λv‖₂ / ‖A‖_F` and on orthonormality.
pub const EIGEN_RESIDUAL_BOUND: f64 = 1e-10;

/// Entries within this relative margin of the largest magnitude count as tied
/// when picking the phase reference of an eigenvector.
const PHASE_TIE: f64 = 1e-8;

/// Eigenvalues in ascending order with orthonormal eigenvectors (columns) and
/// the clusters of numerically degenerate eigenvalues.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<C64>,
    clusters: Vec<Range<usize>>,
    scale: f64,
}

impl SpectralDecomposition {
    pub(crate) fn from_parts(
        eigenvalues: Vec<f64>,
        eigenvectors: DMatrix<C64>,
        scale: f64,
        tol: Tolerance,
    ) -> Self {
        let clusters = cluster_eigenvalues(&eigenvalues, scale, tol);
        Self {
            eigenvalues,
            eigenvectors,
            clusters,
            scale,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<C64> {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> DVector<C64> {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn clusters(&self) -> &[Range<usize>] {
        &self.clusters
    }

    /// Frobenius norm of the decomposed operator.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Mean eigenvalue of cluster `k`.
    pub fn cluster_value(&self, k: usize) -> f64 {
        let r = &self.clusters[k];
        self.eigenvalues[r.clone()].iter().sum::<f64>() / r.len() as f64
    }

    pub fn cluster_values(&self) -> Vec<f64> {
        (0..self.clusters.len()).map(|k| self.cluster_value(k)).collect()
    }

    /// Index of the cluster containing eigenvalue index `i`.
    pub fn cluster_of(&self, i: usize) -> usize {
        self.clusters
            .iter()
            .position(|r| r.contains(&i))
            .expect("index within spectrum")
    }

    /// `P_k ψ` for the spectral projector of cluster `k`.
    pub fn project(&self, k: usize, psi: &DVector<C64>) -> DVector<C64> {
        let cols = self.eigenvectors.columns_range(self.clusters[k].clone());
        &cols * (cols.adjoint() * psi)
    }

    /// Largest `‖Av_k − λ_k v_k‖₂` and largest `|⟨v_i, v_j⟩ − δ_ij|`.
    pub fn residuals(&self, a: &Operator) -> (f64, f64) {
        let av = a.matrix() * &self.eigenvectors;
        let mut res: f64 = 0.0;
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let r = av.column(k) - self.eigenvectors.column(k) * c(lam);
            res = res.max(r.norm());
        }
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let mut orth: f64 = 0.0;
        for i in 0..gram.nrows() {
            for j in 0..gram.ncols() {
                let target = if i == j { c(1.0) } else { c(0.0) };
                orth = orth.max((gram[(i, j)] - target).norm());
            }
        }
        (res, orth)
    }

    /// Replaces the basis of one cluster (used to resolve degeneracies).
    pub(crate) fn set_cluster_basis(&mut self, k: usize, basis: &DMatrix<C64>) {
        let r = self.clusters[k].clone();
        self.eigenvectors.columns_range_mut(r).copy_from(basis);
    }
}

/// Maximal runs of an ascending sequence whose consecutive gaps are at most
/// `max(atol, rtol·scale)`.
pub fn cluster_eigenvalues(values: &[f64], scale: f64, tol: Tolerance) -> Vec<Range<usize>> {
    let bound = tol.bound(scale);
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > bound {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Rotates `v` so its largest-magnitude entry (lowest index among ties) is
/// real and positive.
pub fn canonicalize_phase(v: &mut DVector<C64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - PHASE_TIE))
        .expect("non-empty vector");
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = c(v[pivot].re);
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Eigenvalues ascend, eigenvectors are phase-canonical, and the residual and
/// orthonormality post-conditions are checked before returning.
pub fn hermitian_eigh(a: &Operator, tol: Tolerance) -> Result<SpectralDecomposition> {
    if !a.hermitian_hint() {
        return Err(Error::Validation(format!(
            "operator '{}' is not Hermitian (defect {:.3e})",
            a.label(),
            a.hermiticity_defect()
        )));
    }
    let n = a.dim();
    let m = a.matrix();
    let sym = (m + m.adjoint()) * c(0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        canonicalize_phase(&mut v);
        vectors.set_column(dst, &v);
    }

    let scale = a.frobenius_norm();
    let out = SpectralDecomposition::from_parts(eigenvalues, vectors, scale, tol);
    let (res, orth) = out.residuals(a);
    if res > EIGEN_RESIDUAL_BOUND * scale.max(f64::MIN_POSITIVE) || orth > EIGEN_RESIDUAL_BOUND {
        return Err(Error::Numerical(format!(
            "eigensolver post-condition violated on '{}': residual {res:.3e}, orthonormality {orth:.3e}",
            a.label()
        )));
    }
    Ok(out)
}

/// `U·diag(f)·U†` with one value per eigenvalue cluster.
pub fn matrix_function_values(spec: &SpectralDecomposition, values: &[C64]) -> Result<Operator> {
    if values.len() != spec.clusters.len() {
        return Err(Error::Validation(format!(
            "matrix function needs {} cluster values, got {}",
            spec.clusters.len(),
            values.len()
        )));
    }
    let n = spec.dim();
    let mut scaled = spec.eigenvectors.clone();
    for (k, r) in spec.clusters.iter().enumerate() {
        for j in r.clone() {
            let mut col = scaled.column_mut(j);
            col *= values[k];
        }
    }
    let m = scaled * spec.eigenvectors.adjoint();
    debug_assert_eq!(m.nrows(), n);
    Ok(Operator::from_matrix(m, "f(M)"))
}

/// `f(M)` with `f` evaluated once per cluster, at the cluster mean.
pub fn matrix_function(spec: &SpectralDecomposition, f: impl Fn(f64) -> C64) -> Operator {
    let values: Vec<C64> = spec.cluster_values().into_iter().map(f).collect();
    matrix_function_values(spec, &values).expect("one value per cluster")
}

/// `e^{−zM}` from the spectral data of `M`.
pub fn exp_neg(spec: &SpectralDecomposition, z: C64) -> Operator {
    matrix_function(spec, |lam| (-z * lam).exp()).with_label("exp(-zM)")
}

/// Eigenvalues of an arbitrary (possibly non-normal) operator via a complex
/// Schur form, sorted by real then imaginary part.
pub fn general_eigenvalues(a: &Operator) -> Result<Vec<C64>> {
    let vals = a
        .matrix()
        .clone()
        .eigenvalues()
        .ok_or_else(|| Error::Numerical(format!("Schur iteration failed on '{}'", a.label())))?;
    let mut out: Vec<C64> = vals.iter().copied().collect();
    out.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(out)
}

/// Max distance between two spectra after pairing them in sorted order.
/// For a real reference spectrum this is the multiset distance.
pub fn spectrum_distance(a: &[C64], reference: &[f64]) -> f64 {
    if a.len() != reference.len() {
        return f64::INFINITY;
    }
    let mut sorted = reference.to_vec();
    sorted.sort_by(f64::total_cmp);
    a.iter()
        .zip(sorted)
        .map(|(x, y)| (x - c(y)).norm())
        .fold(0.0, f64::max)
}
