//! Operator files and complex literals.
//!
//! An operator file is a JSON object
//! `{"dim": n, "label": "H", "entries": [[[re, im], …], …]}` with `n` rows
//! of `n` complex entries. `label` is optional. Numbers are written in the
//! shortest form that parses back to the same `f64`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{make_operator, Operator, C64};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorDoc {
    dim: usize,
    #[serde(default)]
    label: Option<String>,
    entries: Vec<Vec<[f64; 2]>>,
}

/// Parses an operator document. Rejects non-square, empty and non-finite
/// input.
pub fn parse_operator(bytes: &[u8]) -> Result<Operator> {
    let doc: OperatorDoc = serde_json::from_slice(bytes)?;
    let rows: Vec<Vec<C64>> = doc
        .entries
        .iter()
        .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    make_operator(doc.dim, &rows, doc.label.as_deref().unwrap_or(""))
}

pub fn operator_to_json(op: &Operator) -> String {
    let n = op.dim();
    let doc = OperatorDoc {
        dim: n,
        label: Some(op.label().to_string()),
        entries: (0..n)
            .map(|i| (0..n).map(|j| op.entry(i, j)).map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    let mut s = serde_json::to_string(&doc).expect("operator documents serialize");
    s.push('\n');
    s
}

pub fn load_operator(path: impl AsRef<Path>) -> Result<Operator> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_operator_at(&bytes, path)
}

/// [`parse_operator`] with the source path in error messages.
pub(crate) fn parse_operator_at(bytes: &[u8], path: &Path) -> Result<Operator> {
    parse_operator(bytes).map_err(|e| match e {
        Error::Json(j) => Error::Validation(format!("{}: {j}", path.display())),
        Error::Validation(msg) => Error::Validation(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn save_operator(op: &Operator, path: impl AsRef<Path>) -> Result<()> {
    write_text(path, &operator_to_json(op))
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline; field order follows the types.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_real(s: &str, whole: &str) -> Result<f64> {
    let v = match s {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Validation(format!("malformed complex number '{whole}'")))?,
    };
    if !v.is_finite() {
        return Err(Error::Validation(format!("non-finite complex number '{whole}'")));
    }
    Ok(v)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also with `j`), e.g. `0.1+0.05i`,
/// `-2e-3i`, `i`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Validation("empty complex number".into()));
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return Ok(C64::new(parse_real_strict(&s, text)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(C64::new(parse_real_strict(&body[..k], text)?, parse_real(&body[k..], text)?)),
        None => Ok(C64::new(0.0, parse_real(body, text)?)),
    }
}

fn parse_real_strict(s: &str, whole: &str) -> Result<f64> {
    if matches!(s, "" | "+" | "-") {
        return Err(Error::Validation(format!("malformed complex number '{whole}'")));
    }
    parse_real(s, whole)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::pauli::*;

    #[test]
    fn sigma_x_round_trip() {
        let sx = sigma_x();
        let back = parse_operator(operator_to_json(&sx).as_bytes()).unwrap();
        assert_eq!(back.matrix(), sx.matrix());
    }

    #[test]
    fn awkward_decimals_round_trip_bit_exactly() {
        let op = Operator::new(
            nalgebra::DMatrix::from_row_slice(
                2,
                2,
                &[C64::new(0.1, 1e-300), C64::new(1.0 / 3.0, -2.5e17), C64::new(5e-324, 0.0), C64::new(-0.0, 0.7)],
            ),
            "x",
        )
        .unwrap();
        let back = parse_operator(operator_to_json(&op).as_bytes()).unwrap();
        for (a, b) in op.matrix().iter().zip(back.matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let bad_dim = br#"{"dim":2,"entries":[[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]}"#;
        assert!(matches!(parse_operator(bad_dim), Err(Error::Validation(_))));
        assert!(parse_operator(br#"{"dim":1,"entries":[[[1e400,0]]]}"#).is_err());
        assert!(parse_operator(br#"{"dim":1,"entries":[[[1,0]]],"extra":1}"#).is_err());
        assert!(parse_operator(b"not json").is_err());
        let big = br#"{"dim":1,"entries":[[[1e308,1e308]]]}"#;
        assert!(parse_operator(big).is_ok());
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("0.1+0.05i", C64::new(0.1, 0.05)),
            ("1", C64::new(1.0, 0.0)),
            ("-2.5", C64::new(-2.5, 0.0)),
            ("i", C64::new(0.0, 1.0)),
            ("-i", C64::new(0.0, -1.0)),
            ("3-i", C64::new(3.0, -1.0)),
            ("1e-3+2E+2j", C64::new(1e-3, 200.0)),
            ("-1e-3-2e-2i", C64::new(-1e-3, -2e-2)),
            (" 0.5 i ", C64::new(0.0, 0.5)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
        for s in ["", "abc", "1+", "inf", "nan", "1+infi", "+", "--1i", "1e400"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }
}
