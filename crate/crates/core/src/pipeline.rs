//! End-to-end drivers behind the command line: analysis of an operator
//! pair, model export and parameter sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gensym::{detect_and_reconstruct, verify_triple, DetectionResult, SymmetryKind, VerificationReport};
use crate::io::{operator_to_json, parse_operator_at, to_json, write_text};
use crate::models::{build_model, ModelBundle};
use crate::multiplets::{canonical_eigenbasis, partition, MultipletPartition, DEFAULT_SUPPORT_EPS};
use crate::operator::{serialize_c64, Operator, C64};
use crate::spectral::{hermitian_eigh, SpectralDecomposition};
use crate::stability::{scan_spectrum_stability, StabilityScan};
use crate::tolerance::Tolerance;

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bound on the spread of `γ` across the points of a sweep.
pub const SWEEP_GAMMA_BOUND: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub hamiltonian_sha256: String,
    pub symmetry_sha256: String,
    pub atol: f64,
    pub rtol: f64,
    pub support_eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TripleSummary {
    #[serde(serialize_with = "serialize_c64")]
    pub gamma: C64,
    pub r_norm: f64,
    pub h0_norm: f64,
    pub verification: VerificationReport,
    pub quadratic: crate::gensym::QuadraticCommutators,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub dim: usize,
    pub detection: DetectionResult,
    pub triple: Option<TripleSummary>,
    pub spectrum: Vec<f64>,
    pub multiplets: Option<MultipletPartition>,
    pub stability: Option<StabilityScan>,
    /// Why the multiplet or stability stage did not run.
    pub skipped: Option<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Analyzes operator files; the report records their digests.
pub fn analyze_files(h_path: &Path, m_path: &Path, tol: Tolerance) -> Result<AnalysisReport> {
    let read = |p: &Path| std::fs::read(p).map_err(|e| Error::io(p, e));
    let (hb, mb) = (read(h_path)?, read(m_path)?);
    let h = parse_operator_at(&hb, h_path)?;
    let m = parse_operator_at(&mb, m_path)?;
    analyze(&h, &m, tol, sha256_hex(&hb), sha256_hex(&mb))
}

fn require_hermitian(op: &Operator, role: &str) -> Result<()> {
    if !op.hermitian_hint() {
        return Err(Error::Validation(format!(
            "{role} must be Hermitian (defect {:.3e})",
            op.hermiticity_defect()
        )));
    }
    Ok(())
}

/// Detection, reconstruction and verification; for real `γ` also the
/// multiplet partition and the stability scan.
pub fn analyze(h: &Operator, m: &Operator, tol: Tolerance, h_digest: String, m_digest: String) -> Result<AnalysisReport> {
    require_hermitian(h, "the Hamiltonian")?;
    require_hermitian(m, "the symmetry candidate")?;
    h.check_same_dim(m)?;
    let (detection, triple) = detect_and_reconstruct(h, m, tol)?;
    let spectrum = hermitian_eigh(h, tol)?.eigenvalues().to_vec();
    let mut report = AnalysisReport {
        provenance: Provenance {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            hamiltonian_sha256: h_digest,
            symmetry_sha256: m_digest,
            atol: tol.atol,
            rtol: tol.rtol,
            support_eps: DEFAULT_SUPPORT_EPS,
        },
        dim: h.dim(),
        detection,
        triple: None,
        spectrum,
        multiplets: None,
        stability: None,
        skipped: None,
    };
    let Some(t) = triple else {
        report.skipped = Some(format!("no ladder decomposition ({})", detection.kind.name()));
        return Ok(report);
    };
    let verification = verify_triple(h, m, &t, tol)?;
    report.triple = Some(TripleSummary {
        gamma: t.gamma,
        r_norm: t.r.frobenius_norm(),
        h0_norm: t.h0.frobenius_norm(),
        verification,
        quadratic: t.quadratic,
    });
    if !matches!(detection.kind, SymmetryKind::Case2 { .. }) || t.real_gamma(tol).is_none() {
        report.skipped = Some("stability requires a case-2 detection with real γ".into());
        return Ok(report);
    }
    let h_spec = canonical_eigenbasis(h, m, tol)?;
    let m_spec = hermitian_eigh(m, tol)?;
    report.multiplets = Some(partition(&h_spec, &m_spec, tol)?);
    if !verification.passed() {
        report.skipped = Some("reconstructed triple failed verification".into());
        return Ok(report);
    }
    report.stability = Some(scan_spectrum_stability(&h_spec, &t, &m_spec, tol)?);
    Ok(report)
}

#[derive(Debug, Serialize)]
struct ModelMeta<'a> {
    name: &'a str,
    dim: usize,
    params: &'a BTreeMap<String, f64>,
    basis_doc: &'a str,
    #[serde(serialize_with = "serialize_opt_c64")]
    known_gamma: Option<C64>,
    m_hermitian: bool,
    files: Vec<String>,
}

fn serialize_opt_c64<S: serde::Serializer>(z: &Option<C64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match z {
        Some(z) => serialize_c64(z, s),
        None => s.serialize_none(),
    }
}

/// `<prefix>H.json` when the prefix is a plain string, `<dir>/H.json` when
/// it names a directory or ends in a separator.
pub fn prefixed(prefix: &Path, name: &str) -> PathBuf {
    let s = prefix.as_os_str().to_string_lossy();
    if prefix.is_dir() || s.ends_with(std::path::MAIN_SEPARATOR) || s.ends_with('/') {
        prefix.join(name)
    } else {
        PathBuf::from(format!("{s}{name}"))
    }
}

/// Writes `H`, `M`, the known `R` and any extra operators as operator files
/// plus `meta.json`. Returns the paths written.
pub fn write_model(bundle: &ModelBundle, prefix: &Path) -> Result<Vec<PathBuf>> {
    let mut ops: Vec<(String, &Operator)> = vec![("H".into(), &bundle.h), ("M".into(), &bundle.m)];
    if let Some(k) = &bundle.known {
        ops.push(("R".into(), &k.r));
    }
    for (name, op) in &bundle.extra {
        ops.push((name.clone(), op));
    }
    if let Some(cs) = &bundle.commutators {
        for (k, op) in cs.iter().enumerate() {
            ops.push((format!("C{}", k + 1), op));
        }
    }
    let mut written = Vec::new();
    let mut files = Vec::new();
    for (name, op) in ops {
        let file = format!("{name}.json");
        let path = prefixed(prefix, &file);
        write_text(&path, &operator_to_json(op))?;
        files.push(file);
        written.push(path);
    }
    let meta = ModelMeta {
        name: &bundle.name,
        dim: bundle.dim(),
        params: &bundle.params,
        basis_doc: &bundle.basis_doc,
        known_gamma: bundle.known.as_ref().map(|k| k.gamma),
        m_hermitian: bundle.m.hermitian_hint(),
        files,
    };
    let path = prefixed(prefix, "meta.json");
    write_text(&path, &to_json(&meta)?)?;
    written.push(path);
    Ok(written)
}

/// Parameter sweep of a model.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub model: String,
    pub params: BTreeMap<String, String>,
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: f64,
    pub eigenvalues: Vec<f64>,
    pub classes: Vec<usize>,
    pub detection: DetectionResult,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// The common `γ` of all points with a case-2 detection.
    pub gamma: Option<C64>,
}

impl SweepResult {
    /// `param,index,eigenvalue,multiplet_class`, sorted by parameter then index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,index,eigenvalue,multiplet_class\n");
        for p in &self.points {
            for (i, (e, k)) in p.eigenvalues.iter().zip(&p.classes).enumerate() {
                writeln!(out, "{},{},{},{}", p.value, i, e, k).expect("writing to a String");
            }
        }
        out
    }
}

fn sweep_values(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                to
            } else {
                from + (to - from) * i as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn sweep_point(req: &SweepRequest, value: f64, tol: Tolerance) -> Result<SweepPoint> {
    let mut params = req.params.clone();
    params.insert(req.param.clone(), format!("{value}"));
    let bundle = build_model(&req.model, &params)?;
    require_hermitian(&bundle.m, "the symmetry candidate")?;
    let detection = crate::gensym::detect(&bundle.h, &bundle.m, tol)?;
    let h_spec: SpectralDecomposition = canonical_eigenbasis(&bundle.h, &bundle.m, tol)?;
    let m_spec = hermitian_eigh(&bundle.m, tol)?;
    let classes = partition(&h_spec, &m_spec, tol)?.class_of();
    Ok(SweepPoint {
        value,
        eigenvalues: h_spec.eigenvalues().to_vec(),
        classes,
        detection,
    })
}

/// Runs every point (in parallel), then checks that `γ` stays fixed.
pub fn sweep(req: &SweepRequest, tol: Tolerance) -> Result<SweepResult> {
    if req.steps < 2 {
        return Err(Error::Validation(format!("steps must be at least 2, got {}", req.steps)));
    }
    if !req.from.is_finite() || !req.to.is_finite() {
        return Err(Error::Validation("sweep range must be finite".into()));
    }
    let points = sweep_values(req.from, req.to, req.steps)
        .into_par_iter()
        .map(|v| sweep_point(req, v, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut gamma: Option<C64> = None;
    for p in &points {
        if let SymmetryKind::Case2 { .. } = p.detection.kind {
            let g = p.detection.gamma().expect("case 2 carries γ");
            match gamma {
                None => gamma = Some(g),
                Some(g0) if (g - g0).norm() > SWEEP_GAMMA_BOUND => {
                    return Err(Error::Numerical(format!(
                        "γ changed along the sweep: {g0} at the first point, {g} at {} = {}",
                        req.param, p.value
                    )));
                }
                _ => {}
            }
        }
    }
    Ok(SweepResult { points, gamma })
}
