//! Seeded random instances: projections, involutions and exact triples.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::ModelBundle;
use crate::error::{Error, Result};
use crate::operator::{c, Operator, C64};

fn gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `(G + G†)/2` with i.i.d. complex Gaussian `G`.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let g = gaussian(rng, dim, dim);
    (&g + g.adjoint()) * c(0.5)
}

fn random_projector(dim: usize, rank: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    if rank == 0 {
        return DMatrix::zeros(dim, dim);
    }
    let q = gaussian(rng, dim, rank).qr().q();
    let p = &q * q.adjoint();
    (&p + p.adjoint()) * c(0.5)
}

fn check_dim(dim: usize, rank: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Validation(format!("dim must be at least 2, got {dim}")));
    }
    if rank > dim {
        return Err(Error::Validation(format!("rank {rank} exceeds dim {dim}")));
    }
    Ok(())
}

fn default_rank(dim: usize) -> usize {
    (dim as f64 / 2.0).round() as usize
}

/// `R = (𝕀−P)HP`, `H₀ = PHP + (𝕀−P)H(𝕀−P)`.
fn projection_split(h: &DMatrix<C64>, p: &DMatrix<C64>) -> (Operator, Operator) {
    let q = DMatrix::<C64>::identity(h.nrows(), h.ncols()) - p;
    let r = &q * h * p;
    let h0 = p * h * p + &q * h * &q;
    (Operator::from_matrix(r, "R"), Operator::from_matrix(h0, "H0"))
}

/// Random Hermitian `H` with a random orthogonal projection `M` of the
/// given rank; `γ = 1`.
pub fn projection_with_rank(dim: usize, rank: usize, seed: u64) -> Result<ModelBundle> {
    check_dim(dim, rank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian(dim, &mut rng);
    let p = random_projector(dim, rank, &mut rng);
    let (r, h0) = projection_split(&h, &p);
    Ok(ModelBundle::new(
        "projection",
        Operator::from_matrix(h, "H"),
        Operator::from_matrix(p, "P"),
        format!("dense random basis, dim {dim}"),
    )
    .with_known(r, c(1.0), h0)
    .param("dim", dim as f64)
    .param("rank", rank as f64)
    .param("seed", seed as f64))
}

pub fn projection_example(dim: usize, seed: u64) -> Result<ModelBundle> {
    projection_with_rank(dim, default_rank(dim), seed)
}

/// Random Hermitian `H` with `M = 2P − 𝕀`, `P` of rank `rank`; `γ = 2`.
pub fn involution_with_rank(dim: usize, rank: usize, seed: u64) -> Result<ModelBundle> {
    check_dim(dim, rank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian(dim, &mut rng);
    let p = random_projector(dim, rank, &mut rng);
    let (r, h0) = projection_split(&h, &p);
    let m = &p * c(2.0) - DMatrix::<C64>::identity(dim, dim);
    Ok(ModelBundle::new(
        "involution",
        Operator::from_matrix(h, "H"),
        Operator::from_matrix(m, "M"),
        format!("dense random basis, dim {dim}"),
    )
    .with_known(r, c(2.0), h0)
    .param("dim", dim as f64)
    .param("rank", rank as f64)
    .param("seed", seed as f64))
}

pub fn involution_example(dim: usize, seed: u64) -> Result<ModelBundle> {
    involution_with_rank(dim, default_rank(dim), seed)
}

/// Exact triple with `M = ⊕_k μ_k𝕀`, `μ_k = −kγ`, `R` mapping level `k`
/// into level `k+1` and block-diagonal `H₀`. For complex `γ`, `M` is not
/// Hermitian and the closed-form commutators `γR − γ̄R†`, `γ²R + γ̄²R†`,
/// `γ³R − γ̄³R†` are exported as well.
pub fn random_triple(level_dims: &[usize], gamma: C64, seed: u64) -> Result<ModelBundle> {
    if level_dims.len() < 2 {
        return Err(Error::Validation("random_triple needs at least two levels".into()));
    }
    if level_dims.contains(&0) {
        return Err(Error::Validation("level dimensions must be positive".into()));
    }
    if gamma.norm() == 0.0 || !gamma.re.is_finite() || !gamma.im.is_finite() {
        return Err(Error::Validation("γ must be finite and nonzero".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = level_dims.iter().sum();
    let offsets: Vec<usize> = level_dims
        .iter()
        .scan(0, |acc, &d| {
            let o = *acc;
            *acc += d;
            Some(o)
        })
        .collect();
    let mut m = DMatrix::<C64>::zeros(n, n);
    let mut h0 = DMatrix::<C64>::zeros(n, n);
    let mut r = DMatrix::<C64>::zeros(n, n);
    for (k, (&o, &d)) in offsets.iter().zip(level_dims).enumerate() {
        let mu = -gamma * k as f64;
        for i in o..o + d {
            m[(i, i)] = mu;
        }
        h0.view_mut((o, o), (d, d)).copy_from(&random_hermitian(d, &mut rng));
        if k + 1 < level_dims.len() {
            let (o2, d2) = (offsets[k + 1], level_dims[k + 1]);
            r.view_mut((o2, o), (d2, d)).copy_from(&(gaussian(&mut rng, d2, d) * c(0.5)));
        }
    }
    let rd = r.adjoint();
    let h = &h0 + &r + &rd;
    let commutators = (gamma.im != 0.0).then(|| {
        let gb = gamma.conj();
        [
            Operator::from_matrix(&r * gamma - &rd * gb, "C1"),
            Operator::from_matrix(&r * gamma.powi(2) + &rd * gb.powi(2), "C2"),
            Operator::from_matrix(&r * gamma.powi(3) - &rd * gb.powi(3), "C3"),
        ]
    });
    let dims = level_dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    let mut bundle = ModelBundle::new(
        "random-triple",
        Operator::from_matrix(h, "H"),
        Operator::from_matrix(m, "M"),
        format!("levels ({dims}) stacked in order; level k has M = -k*gamma"),
    )
    .with_known(Operator::from_matrix(r, "R"), gamma, Operator::from_matrix(h0, "H0"))
    .param("gamma_re", gamma.re)
    .param("gamma_im", gamma.im)
    .param("seed", seed as f64);
    bundle.commutators = commutators;
    Ok(bundle)
}
