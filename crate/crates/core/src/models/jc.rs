//! Jaynes–Cummings model on spin ⊗ truncated Fock space.

use nalgebra::DMatrix;

use super::ModelBundle;
use crate::error::{Error, Result};
use crate::operator::{c, kron, pauli, Operator, C64};

fn check_cutoff(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Validation("Fock cutoff must be at least 1".into()));
    }
    Ok(())
}

/// Truncated annihilation operator on `0 … N` quanta, `⟨n−1|c|n⟩ = √n`.
fn annihilation(n: usize) -> Operator {
    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) });
    Operator::from_matrix(m, "c")
}

fn basis_doc(n: usize) -> String {
    format!(
        "spin (up, down) ⊗ Fock (0..{n}): index = s*({}) + n with s = 0 for up",
        n + 1
    )
}

/// `H = ½ℏω₀σz⊗𝕀 + ½ℏω𝕀⊗(c†c + cc†) + ℏκ(σ₋⊗c† + σ₊⊗c)` with
/// `M = σz⊗𝕀` and `R = ℏκ·σ₋⊗c†`. The truncated `cc†` misses its top
/// entry; this leaves every relation with `M` exact.
pub fn jaynes_cummings(omega0: f64, omega: f64, kappa: f64, cutoff: usize, hbar: f64) -> Result<ModelBundle> {
    check_cutoff(cutoff)?;
    let a = annihilation(cutoff);
    let ad = a.adjoint();
    let id_f = Operator::identity(cutoff + 1);
    let id_s = Operator::identity(2);
    let sz = pauli::sigma_z();
    let field = &(&ad * &a) + &(&a * &ad);
    let h0 = &(&kron(&sz, &id_f) * C64::from(0.5 * hbar * omega0)) + &(&kron(&id_s, &field) * C64::from(0.5 * hbar * omega));
    let r = &kron(&pauli::sigma_minus(), &ad) * C64::from(hbar * kappa);
    let h = &(&h0 + &r) + &r.adjoint();
    let m = kron(&sz, &id_f);
    let gamma = crate::operator::proportionality(&crate::operator::commutator_unchecked(&pauli::sigma_minus(), &sz), &pauli::sigma_minus())?.0;
    let m_exc = &kron(&(&pauli::sigma_plus() * &pauli::sigma_minus()), &id_f) + &kron(&id_s, &(&ad * &a));
    let mut bundle = ModelBundle::new("jc", h, m, basis_doc(cutoff))
        .with_known(r, gamma, h0)
        .param("omega0", omega0)
        .param("omega", omega)
        .param("kappa", kappa)
        .param("cutoff", cutoff as f64)
        .param("hbar", hbar);
    bundle.extra.insert("M_exc".into(), m_exc.with_label("M_exc"));
    Ok(bundle)
}

/// Resonant, uncoupled form with the constant dropped:
/// `H★ = ℏω(σ₊σ₋⊗𝕀 + 𝕀⊗c†c)`, spectrum `ℏω·k`.
pub fn jaynes_cummings_star(omega: f64, cutoff: usize, hbar: f64) -> Result<ModelBundle> {
    check_cutoff(cutoff)?;
    let a = annihilation(cutoff);
    let id_f = Operator::identity(cutoff + 1);
    let m_exc = &kron(&(&pauli::sigma_plus() * &pauli::sigma_minus()), &id_f) + &kron(&Operator::identity(2), &(&a.adjoint() * &a));
    let h = &m_exc * (hbar * omega);
    let m = kron(&pauli::sigma_z(), &id_f);
    Ok(ModelBundle::new("jc-star", h, m, basis_doc(cutoff))
        .param("omega", omega)
        .param("cutoff", cutoff as f64)
        .param("hbar", hbar))
}
