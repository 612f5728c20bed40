//! Spinless fermions on an open chain, in the occupation basis with site 1
//! as the least significant bit.

use nalgebra::DMatrix;

use super::ModelBundle;
use crate::error::{Error, Result};
use crate::operator::{c, commutator_unchecked, proportionality, Operator, C64};

/// `B_j` on occupation state `n`: `(sign, n')`, with the Jordan–Wigner sign
/// `(−1)^{#occupied sites below j}`.
fn annihilate(n: usize, j: usize) -> Option<(f64, usize)> {
    if n & (1 << j) == 0 {
        return None;
    }
    let below = (n & ((1 << j) - 1)).count_ones();
    Some((if below % 2 == 0 { 1.0 } else { -1.0 }, n ^ (1 << j)))
}

fn create(n: usize, j: usize) -> Option<(f64, usize)> {
    if n & (1 << j) != 0 {
        return None;
    }
    let below = (n & ((1 << j) - 1)).count_ones();
    Some((if below % 2 == 0 { 1.0 } else { -1.0 }, n | (1 << j)))
}

fn check_sites(sites: usize, lo: usize, hi: usize) -> Result<()> {
    if !(lo..=hi).contains(&sites) {
        return Err(Error::Validation(format!("number of sites must be in {lo}..={hi}, got {sites}")));
    }
    Ok(())
}

fn basis_doc(sites: usize) -> String {
    format!("occupation bit strings on {sites} sites, site 1 = least significant bit; open chain")
}

/// Annihilator `B_j` (0-based site) on `sites` sites.
pub fn annihilator(sites: usize, j: usize) -> Operator {
    let dim = 1 << sites;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        if let Some((s, n2)) = annihilate(n, j) {
            m[(n2, n)] = c(s);
        }
    }
    Operator::from_matrix(m, format!("B{}", j + 1))
}

/// `N = Σ B_j†B_j`.
pub fn number_operator(sites: usize) -> Operator {
    let diag: Vec<f64> = (0..1usize << sites).map(|n| n.count_ones() as f64).collect();
    Operator::diagonal(&diag, "N")
}

/// `H = −ε Σ_{|i−j|=1} B_i†B_j + Σ (z̄_j B_j + z_j B_j†)`, `M = N`,
/// `R = Σ z̄_j B_j`, `γ = 1`.
pub fn fermion_chain(sites: usize, eps: f64, sources: &[C64]) -> Result<ModelBundle> {
    check_sites(sites, 1, 10)?;
    if sources.len() != sites {
        return Err(Error::Validation(format!(
            "expected {sites} sources, got {}",
            sources.len()
        )));
    }
    let dim = 1 << sites;
    let mut h0 = DMatrix::<C64>::zeros(dim, dim);
    let mut r = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        for j in 0..sites {
            if let Some((s, n2)) = annihilate(n, j) {
                r[(n2, n)] += sources[j].conj() * s;
                for i in [j.wrapping_sub(1), j + 1] {
                    if i >= sites {
                        continue;
                    }
                    if let Some((s2, n3)) = create(n2, i) {
                        h0[(n3, n)] += c(-eps * s * s2);
                    }
                }
            }
        }
    }
    let h0 = Operator::from_matrix(h0, "H0");
    let r = Operator::from_matrix(r, "R");
    let h = &(&h0 + &r) + &r.adjoint();
    let mut bundle = ModelBundle::new("fermion", h, number_operator(sites), basis_doc(sites))
        .with_known(r, c(1.0), h0)
        .param("sites", sites as f64)
        .param("eps", eps);
    for (j, z) in sources.iter().enumerate() {
        bundle = bundle.param(&format!("source{}_re", j + 1), z.re).param(&format!("source{}_im", j + 1), z.im);
    }
    Ok(bundle)
}

/// Building blocks of the hard-core chain.
#[derive(Debug, Clone)]
pub struct HardcoreParts {
    /// `P_i = Π_{|i−j|=1} B_jB_j†`, diagonal.
    pub projectors: Vec<Operator>,
    /// `Q = Σ P_i B_i†`
    pub q: Operator,
}

pub fn hardcore_parts(sites: usize) -> Result<HardcoreParts> {
    check_sites(sites, 2, 8)?;
    let dim = 1 << sites;
    let neighbours = |i: usize| [i.wrapping_sub(1), i + 1].into_iter().filter(move |&j| j < sites);
    let projectors = (0..sites)
        .map(|i| {
            let diag: Vec<f64> = (0..dim)
                .map(|n| if neighbours(i).all(|j| n & (1 << j) == 0) { 1.0 } else { 0.0 })
                .collect();
            Operator::diagonal(&diag, format!("P{}", i + 1))
        })
        .collect::<Vec<_>>();
    let mut q = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..dim {
        for i in 0..sites {
            if let Some((s, n2)) = create(n, i) {
                if neighbours(i).all(|j| n2 & (1 << j) == 0) {
                    q[(n2, n)] += c(s);
                }
            }
        }
    }
    Ok(HardcoreParts {
        projectors,
        q: Operator::from_matrix(q, "Q"),
    })
}

/// `H₀ = {Q, Q†}`, `H = H₀ + z̄Q + zQ†`, `M = N`, `R = z̄Q`, with `γ`
/// read off from `[Q, M] = γQ`.
pub fn hardcore_chain(sites: usize, z: C64) -> Result<ModelBundle> {
    let parts = hardcore_parts(sites)?;
    let q = &parts.q;
    let qd = q.adjoint();
    let h0 = &(q * &qd) + &(&qd * q);
    let r = q * z.conj();
    let h = &(&h0 + &r) + &r.adjoint();
    let m = number_operator(sites);
    let (gamma, _) = proportionality(&commutator_unchecked(q, &m), q)?;
    Ok(ModelBundle::new("hardcore", h, m, basis_doc(sites))
        .with_known(r, gamma, h0)
        .param("sites", sites as f64)
        .param("z_re", z.re)
        .param("z_im", z.im))
}
