//! Partition of the eigenvectors of `H` into `M`-multiplets.
//!
//! Two eigenvectors share a multiplet when `φ = f(M)ψ` for some `f` that is
//! nonzero on the spectrum of `M`. In the `M`-eigenbasis this means both
//! vectors have support on the same `M`-eigenspaces, and on each of them
//! their components are parallel.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::{c, Operator, C64};
use crate::spectral::{canonicalize_phase, hermitian_eigh, matrix_function_values, SpectralDecomposition};
use crate::tolerance::Tolerance;

/// Relative weight below which an `M`-eigenspace counts as absent.
pub const DEFAULT_SUPPORT_EPS: f64 = 1e-8;

const UNIT_NORM_TOL: f64 = 1e-10;

/// Eigendecomposition of `H` whose basis inside each degenerate eigenspace
/// also diagonalises the compression of `M` onto that eigenspace.
pub fn canonical_eigenbasis(h: &Operator, m: &Operator, tol: Tolerance) -> Result<SpectralDecomposition> {
    h.check_same_dim(m)?;
    if !m.hermitian_hint() {
        return Err(Error::Validation(format!("operator '{}' is not Hermitian", m.label())));
    }
    let mut spec = hermitian_eigh(h, tol)?;
    for k in 0..spec.clusters().len() {
        let range = spec.clusters()[k].clone();
        if range.len() < 2 {
            continue;
        }
        let v = spec.eigenvectors().columns_range(range.clone()).into_owned();
        let compressed = v.adjoint() * m.matrix() * &v;
        let compressed = (&compressed + compressed.adjoint()) * c(0.5);
        let inner = hermitian_eigh(&Operator::from_matrix(compressed, "PMP"), tol)?;
        let mut basis: DMatrix<C64> = &v * inner.eigenvectors();
        for mut col in basis.column_iter_mut() {
            let mut owned = col.clone_owned();
            canonicalize_phase(&mut owned);
            col.copy_from(&owned);
        }
        spec.set_cluster_basis(k, &basis);
    }
    Ok(spec)
}

/// Which `M`-eigenspaces an eigenvector reaches, with the normalised
/// components it has there.
#[derive(Debug, Clone)]
pub struct SupportSignature {
    /// Indices of `M`-clusters with `‖P_k ψ‖ > ε·‖ψ‖`, ascending.
    pub present: Vec<usize>,
    /// `‖P_k ψ‖` for every cluster.
    pub weights: Vec<f64>,
    /// `P_k ψ / ‖P_k ψ‖` for each present cluster, in `present` order.
    pub components: Vec<DVector<C64>>,
}

pub fn support_signature(psi: &DVector<C64>, m_spec: &SpectralDecomposition, eps_supp: f64) -> Result<SupportSignature> {
    if psi.len() != m_spec.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: m_spec.dim(),
        });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::Precondition(format!("vector must be normalised, got norm {norm}")));
    }
    let mut present = Vec::new();
    let mut weights = Vec::with_capacity(m_spec.clusters().len());
    let mut components = Vec::new();
    for k in 0..m_spec.clusters().len() {
        let p = m_spec.project(k, psi);
        let w = p.norm();
        weights.push(w);
        if w > eps_supp * norm {
            present.push(k);
            components.push(p.unscale(w));
        }
    }
    Ok(SupportSignature {
        present,
        weights,
        components,
    })
}

fn signatures_match(a: &SupportSignature, b: &SupportSignature, parallel_tol: f64) -> bool {
    a.present == b.present
        && a
            .components
            .iter()
            .zip(&b.components)
            .all(|(u, v)| u.dotc(v).norm() >= 1.0 - parallel_tol)
}

/// Whether `φ = f(M)ψ` for an `f` nonzero on the spectrum of `M`.
pub fn same_multiplet(
    psi: &DVector<C64>,
    phi: &DVector<C64>,
    m_spec: &SpectralDecomposition,
    eps_supp: f64,
    tol: Tolerance,
) -> Result<bool> {
    let a = support_signature(psi, m_spec, eps_supp)?;
    let b = support_signature(phi, m_spec, eps_supp)?;
    Ok(signatures_match(&a, &b, tol.rtol))
}

/// Values of `f` on each `M`-cluster such that `φ = f(M)ψ` (1 off the
/// support), checked by reconstruction.
pub fn recover_f(
    psi: &DVector<C64>,
    phi: &DVector<C64>,
    m_spec: &SpectralDecomposition,
    eps_supp: f64,
    tol: Tolerance,
) -> Result<Vec<C64>> {
    let a = support_signature(psi, m_spec, eps_supp)?;
    let b = support_signature(phi, m_spec, eps_supp)?;
    if !signatures_match(&a, &b, tol.rtol) {
        return Err(Error::Precondition("vectors are not in the same M-multiplet".into()));
    }
    let mut f = vec![c(1.0); m_spec.clusters().len()];
    for &k in &a.present {
        let p = m_spec.project(k, psi);
        let q = m_spec.project(k, phi);
        f[k] = p.dotc(&q) / p.norm_squared();
    }
    let fm = matrix_function_values(m_spec, &f)?;
    let err = (phi - fm.apply(psi)).norm();
    if err > tol.bound(1.0) {
        return Err(Error::Numerical(format!("f(M)ψ misses φ by {err:.3e}")));
    }
    Ok(f)
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipletClass {
    /// Eigenvector indices, ascending.
    pub members: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// `M`-cluster indices carrying the support.
    pub support: Vec<usize>,
    /// `M`-eigenvalues of those clusters.
    pub support_values: Vec<f64>,
    pub label: String,
}

impl MultipletClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MultipletPartition {
    pub classes: Vec<MultipletClass>,
}

impl MultipletPartition {
    /// Class index of every eigenvector.
    pub fn class_of(&self) -> Vec<usize> {
        let n = self.classes.iter().map(|c| c.size()).sum();
        let mut out = vec![0; n];
        for (ci, class) in self.classes.iter().enumerate() {
            for &i in &class.members {
                out[i] = ci;
            }
        }
        out
    }

    /// Class sizes, ascending.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.classes.iter().map(|c| c.size()).collect();
        s.sort_unstable();
        s
    }

    pub fn count_of_size(&self, size: usize) -> usize {
        self.classes.iter().filter(|c| c.size() == size).count()
    }
}

pub fn size_label(size: usize) -> String {
    match size {
        1 => "singlet".into(),
        2 => "doublet".into(),
        3 => "triplet".into(),
        4 => "quartet".into(),
        5 => "quintet".into(),
        6 => "sextet".into(),
        n => format!("{n}-plet"),
    }
}

/// Groups eigenvectors by comparing each with the first member of every
/// class seen so far.
pub fn partition(h_spec: &SpectralDecomposition, m_spec: &SpectralDecomposition, tol: Tolerance) -> Result<MultipletPartition> {
    partition_with(h_spec, m_spec, DEFAULT_SUPPORT_EPS, tol)
}

pub fn partition_with(
    h_spec: &SpectralDecomposition,
    m_spec: &SpectralDecomposition,
    eps_supp: f64,
    tol: Tolerance,
) -> Result<MultipletPartition> {
    if h_spec.dim() != m_spec.dim() {
        return Err(Error::DimensionMismatch {
            left: h_spec.dim(),
            right: m_spec.dim(),
        });
    }
    let mut reps: Vec<SupportSignature> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..h_spec.dim() {
        let sig = support_signature(&h_spec.eigenvector(i), m_spec, eps_supp)?;
        match reps.iter().position(|r| signatures_match(r, &sig, tol.rtol)) {
            Some(ci) => members[ci].push(i),
            None => {
                reps.push(sig);
                members.push(vec![i]);
            }
        }
    }
    let cluster_values = m_spec.cluster_values();
    let classes = reps
        .into_iter()
        .zip(members)
        .map(|(sig, members)| MultipletClass {
            eigenvalues: members.iter().map(|&i| h_spec.eigenvalues()[i]).collect(),
            support_values: sig.present.iter().map(|&k| cluster_values[k]).collect(),
            support: sig.present,
            label: size_label(members.len()),
            members,
        })
        .collect();
    Ok(MultipletPartition { classes })
}
