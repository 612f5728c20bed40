//! Explicit finite matrices for the standard examples, plus synthetic
//! triples with a known decomposition.

mod angular;
mod jc;
mod lattice;
mod random;

use std::collections::BTreeMap;

pub use angular::{angular_block, ladder_matrix_element, reduced_ladder_element, recursion_block_solver, RecursionSolution};
pub use jc::{jaynes_cummings, jaynes_cummings_star};
pub use lattice::{annihilator, fermion_chain, hardcore_chain, hardcore_parts, number_operator, HardcoreParts};
pub use random::{
    involution_example, involution_with_rank, projection_example, projection_with_rank, random_hermitian,
    random_triple,
};

use crate::error::{Error, Result};
use crate::gensym::GenSymTriple;
use crate::operator::{Operator, C64};

/// A decomposition known by construction.
#[derive(Debug, Clone)]
pub struct KnownTriple {
    pub r: Operator,
    pub gamma: C64,
    pub h0: Operator,
}

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub name: String,
    pub h: Operator,
    pub m: Operator,
    pub known: Option<KnownTriple>,
    pub params: BTreeMap<String, f64>,
    pub basis_doc: String,
    /// Further symmetry candidates, e.g. the excitation number of the
    /// Jaynes–Cummings model.
    pub extra: BTreeMap<String, Operator>,
    /// `[H,M]`, `[H,M]₂`, `[H,M]₃` in closed form, exported for complex `γ`
    /// where `M` is not Hermitian.
    pub commutators: Option<[Operator; 3]>,
}

impl ModelBundle {
    fn new(name: &str, h: Operator, m: Operator, basis_doc: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            h: h.with_label("H"),
            m: m.with_label("M"),
            known: None,
            params: BTreeMap::new(),
            basis_doc: basis_doc.into(),
            extra: BTreeMap::new(),
            commutators: None,
        }
    }

    fn with_known(mut self, r: Operator, gamma: C64, h0: Operator) -> Self {
        self.known = Some(KnownTriple {
            r: r.with_label("R"),
            gamma,
            h0: h0.with_label("H0"),
        });
        self
    }

    fn param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// The known decomposition as a triple with residuals against `(H, M)`.
    pub fn known_triple(&self) -> Option<Result<GenSymTriple>> {
        self.known
            .as_ref()
            .map(|k| GenSymTriple::from_parts(&self.h, &self.m, k.h0.clone(), k.r.clone(), k.gamma))
    }
}

/// Model names accepted by [`build_model`].
pub const MODEL_NAMES: &[&str] = &["angular", "jc", "jc-star", "fermion", "hardcore", "projection", "involution", "random-triple"];

fn get<'a>(params: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
    params.get(key).map(String::as_str)
}

fn num(params: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match get(params, key) {
        Some(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::Validation(format!("--{key}: expected a finite number, got '{s}'"))),
        None => default.ok_or_else(|| Error::Validation(format!("missing --{key}"))),
    }
}

fn int(params: &BTreeMap<String, String>, key: &str, default: Option<i64>) -> Result<i64> {
    match get(params, key) {
        Some(s) => s
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::Validation(format!("--{key}: expected an integer, got '{s}'"))),
        None => default.ok_or_else(|| Error::Validation(format!("missing --{key}"))),
    }
}

fn uint(params: &BTreeMap<String, String>, key: &str, default: Option<i64>) -> Result<usize> {
    let v = int(params, key, default)?;
    usize::try_from(v).map_err(|_| Error::Validation(format!("--{key} must be non-negative, got {v}")))
}

fn complex(params: &BTreeMap<String, String>, key: &str, default: Option<C64>) -> Result<C64> {
    match get(params, key) {
        Some(s) => crate::io::parse_complex(s),
        None => default.ok_or_else(|| Error::Validation(format!("missing --{key}"))),
    }
}

fn list<T>(s: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    s.split(',').map(|p| parse(p.trim())).collect()
}

/// Builds a model from string-valued flags, as given on the command line.
///
/// | name | flags |
/// |---|---|
/// | `angular` | `l`, `en`, `g`, `hbar` (1) |
/// | `jc` | `omega0`, `omega`, `kappa`, `cutoff`, `hbar` (1) |
/// | `jc-star` | `omega`, `cutoff`, `hbar` (1) |
/// | `fermion` | `sites`, `eps`, `sources` (comma list, default all 0) |
/// | `hardcore` | `sites`, `z` |
/// | `projection`, `involution` | `dim`, `seed` (0) |
/// | `random-triple` | `levels` (comma list), `gamma`, `seed` (0) |
pub fn build_model(name: &str, params: &BTreeMap<String, String>) -> Result<ModelBundle> {
    let allowed: &[&str] = match name {
        "angular" => &["l", "en", "g", "hbar"],
        "jc" => &["omega0", "omega", "kappa", "cutoff", "hbar"],
        "jc-star" => &["omega", "cutoff", "hbar"],
        "fermion" => &["sites", "eps", "sources"],
        "hardcore" => &["sites", "z"],
        "projection" | "involution" => &["dim", "seed"],
        "random-triple" => &["levels", "gamma", "seed"],
        _ => {
            return Err(Error::Validation(format!(
                "unknown model '{name}', expected one of {}",
                MODEL_NAMES.join(", ")
            )))
        }
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Validation(format!("model '{name}' takes no --{k}")));
    }
    match name {
        "angular" => angular_block(
            int(params, "l", None)?,
            num(params, "en", None)?,
            num(params, "g", None)?,
            num(params, "hbar", Some(1.0))?,
        ),
        "jc" => jaynes_cummings(
            num(params, "omega0", None)?,
            num(params, "omega", None)?,
            num(params, "kappa", None)?,
            uint(params, "cutoff", None)?,
            num(params, "hbar", Some(1.0))?,
        ),
        "jc-star" => jaynes_cummings_star(
            num(params, "omega", None)?,
            uint(params, "cutoff", None)?,
            num(params, "hbar", Some(1.0))?,
        ),
        "fermion" => {
            let sites = uint(params, "sites", None)?;
            let sources = match get(params, "sources") {
                Some(s) => list(s, crate::io::parse_complex)?,
                None => vec![C64::new(0.0, 0.0); sites],
            };
            fermion_chain(sites, num(params, "eps", None)?, &sources)
        }
        "hardcore" => hardcore_chain(uint(params, "sites", None)?, complex(params, "z", None)?),
        "projection" => projection_example(uint(params, "dim", None)?, uint(params, "seed", Some(0))? as u64),
        "involution" => involution_example(uint(params, "dim", None)?, uint(params, "seed", Some(0))? as u64),
        "random-triple" => {
            let levels = list(get(params, "levels").ok_or_else(|| Error::Validation("missing --levels".into()))?, |p| {
                p.parse::<usize>()
                    .map_err(|_| Error::Validation(format!("--levels: expected integers, got '{p}'")))
            })?;
            random_triple(&levels, complex(params, "gamma", None)?, uint(params, "seed", Some(0))? as u64)
        }
        _ => unreachable!("name checked above"),
    }
}
