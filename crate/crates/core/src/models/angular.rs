//! One angular-momentum block of a hydrogen-like atom in a transverse field:
//! `H = E_n − 2g·L_x`, `M = L_z`, `R = −g·L₋`.

use nalgebra::{DMatrix, DVector};

use super::ModelBundle;
use crate::error::{Error, Result};
use crate::operator::{c, Operator, C64};
use crate::spectral::{canonicalize_phase, hermitian_eigh};
use crate::tolerance::Tolerance;

/// Entrywise bound on the three-term recursion residual.
const RECURSION_BOUND: f64 = 1e-10;

/// `ℏ√((l−m)(l+m+1))`, the element `⟨m|L₋|m+1⟩ = ⟨m+1|L₊|m⟩`.
fn ladder_amplitude(l: i64, m: i64, hbar: f64) -> f64 {
    hbar * (((l - m) * (l + m + 1)) as f64).max(0.0).sqrt()
}

/// `⟨m|R|m+1⟩ = −gℏ√((l−m)(l+m+1))` for `R = −g·L₋`.
pub fn ladder_matrix_element(l: i64, m: i64, g: f64, hbar: f64) -> f64 {
    -g * ladder_amplitude(l, m, hbar)
}

/// The same element written with an extra `1/√2`, as it appears in the
/// usual statement of the model; it equals [`ladder_matrix_element`]`/√2`.
pub fn reduced_ladder_element(l: i64, m: i64, g: f64, hbar: f64) -> f64 {
    -g * (hbar / 2f64.sqrt()) * (((l - m) * (l + m + 1)) as f64).max(0.0).sqrt()
}

fn check_l(l: i64) -> Result<usize> {
    usize::try_from(l).map_err(|_| Error::Validation(format!("l must be non-negative, got {l}")))
}

/// Basis `m = l, l−1, …, −l` (index `i` holds `m = l − i`).
pub fn angular_block(l: i64, e_n: f64, g: f64, hbar: f64) -> Result<ModelBundle> {
    let lu = check_l(l)?;
    let n = 2 * lu + 1;
    let m_of = |i: usize| l - i as i64;
    // L₋ maps index i (m) to index i+1 (m−1)
    let lminus = DMatrix::from_fn(n, n, |row, col| {
        if row == col + 1 {
            c(ladder_amplitude(l, m_of(row), hbar))
        } else {
            c(0.0)
        }
    });
    let lplus = lminus.adjoint();
    let id = DMatrix::<C64>::identity(n, n);
    let h = &id * c(e_n) - (&lplus + &lminus) * c(g);
    let m_diag: Vec<f64> = (0..n).map(|i| hbar * m_of(i) as f64).collect();
    let bundle = ModelBundle::new(
        "angular",
        Operator::from_matrix(h, "H"),
        Operator::diagonal(&m_diag, "Lz"),
        format!("angular block l={l}: index i holds m = l - i (m descending from {l} to {})", -l),
    )
    .with_known(
        Operator::from_matrix(lminus * c(-g), "R"),
        c(hbar),
        Operator::from_matrix(id * c(e_n), "H0"),
    )
    .param("l", l as f64)
    .param("en", e_n)
    .param("g", g)
    .param("hbar", hbar);
    Ok(bundle)
}

/// One eigenpair of the block in the sector `c_{−m} = −c_m`, `c₀ = 0`.
#[derive(Debug, Clone)]
pub struct RecursionSolution {
    pub energy: f64,
    /// Full-length, unit, phase-canonical coefficient vector in the
    /// descending-`m` basis.
    pub coefficients: DVector<C64>,
    /// Largest entrywise residual of the three-term relation.
    pub recursion_residual: f64,
}

/// Solves `E·c_m = E_n·c_m − g(a_{m−1}c_{m−1} + a_m c_{m+1})`,
/// `a_m = ℏ√((l−m)(l+m+1))`, on the antisymmetric sector, which reduces to
/// a tridiagonal problem on `c₁ … c_l`.
pub fn recursion_block_solver(l: i64, e_n: f64, g: f64, hbar: f64) -> Result<Vec<RecursionSolution>> {
    let lu = check_l(l)?;
    if lu == 0 {
        return Err(Error::Validation("the antisymmetric sector needs l ≥ 1".into()));
    }
    // reduced index k holds m = k + 1
    let t = DMatrix::from_fn(lu, lu, |i, j| {
        if i == j {
            c(e_n)
        } else if j == i + 1 {
            c(-g * ladder_amplitude(l, i as i64 + 1, hbar))
        } else if i == j + 1 {
            c(-g * ladder_amplitude(l, j as i64 + 1, hbar))
        } else {
            c(0.0)
        }
    });
    let spec = hermitian_eigh(&Operator::from_matrix(t, "T"), Tolerance::default())?;
    let n = 2 * lu + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(lu);
    for k in 0..lu {
        let red = spec.eigenvector(k);
        let mut full = DVector::<C64>::zeros(n);
        for mi in 1..=lu {
            // m = mi sits at index l − m, −m at l + m
            full[lu - mi] = red[mi - 1] * s;
            full[lu + mi] = -red[mi - 1] * s;
        }
        canonicalize_phase(&mut full);
        let energy = spec.eigenvalues()[k];
        let coeff = |m: i64| -> C64 {
            if m.abs() > l {
                c(0.0)
            } else {
                full[(l - m) as usize]
            }
        };
        let mut worst: f64 = 0.0;
        for m in -l..=l {
            let lhs = coeff(m) * energy;
            let rhs = coeff(m) * e_n
                - (coeff(m - 1) * ladder_amplitude(l, m - 1, hbar) + coeff(m + 1) * ladder_amplitude(l, m, hbar)) * g;
            worst = worst.max((lhs - rhs).norm());
        }
        if worst > RECURSION_BOUND * e_n.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "recursion residual {worst:.3e} at E = {energy}"
            )));
        }
        out.push(RecursionSolution {
            energy,
            coefficients: full,
            recursion_residual: worst,
        });
    }
    Ok(out)
}
