//! Instance files: UTF-8 JSON with fields `n`, `m`, `K`, `F`, optional `G`
//! and optional `metadata`. Matrices are row-major nested arrays whose
//! scalars are 4-arrays `[w, x, y, z]`; the columns of `F` and `G` are the
//! family vectors.
//!
//! Parsing goes through an untyped JSON tree so that every failure can name
//! the offending field (`F[2][1]`) and carry a stable diagnostic code.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dual::approx_deficit;
use crate::frame::FrameSystem;
use crate::linalg::{svd, QMatrix};
use crate::quaternion::Quaternion;
use crate::random::PRNG_NAME;
use crate::tol::VERIFY_TOL;
use crate::verify::{Instance, InstanceKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorCode {
    Io,
    Syntax,
    MissingField,
    RaggedRows,
    NonFinite,
    ShapeMismatch,
    BadScalar,
    InvalidValue,
}

impl ParseErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseErrorCode::Io => "E001-io",
            ParseErrorCode::Syntax => "E002-syntax",
            ParseErrorCode::MissingField => "E003-missing-field",
            ParseErrorCode::RaggedRows => "E004-ragged-rows",
            ParseErrorCode::NonFinite => "E005-non-finite",
            ParseErrorCode::ShapeMismatch => "E006-shape-mismatch",
            ParseErrorCode::BadScalar => "E007-bad-scalar",
            ParseErrorCode::InvalidValue => "E008-invalid-value",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub code: ParseErrorCode,
    /// Field path such as `F[2][1]`; empty for whole-document errors.
    pub field: String,
    /// 1-based position, for errors detected by the JSON reader.
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.code.as_str())?;
        if let (Some(l), Some(c)) = (self.line, self.column) {
            write!(f, " line {l}, column {c}:")?;
        }
        if !self.field.is_empty() {
            write!(f, " {}:", self.field)?;
        }
        write!(f, " {}", self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(code: ParseErrorCode, field: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError {
        code,
        field: field.into(),
        line: None,
        column: None,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    #[serde(rename = "rankK")]
    pub rank_k: usize,
    pub kind: InstanceKind,
    pub prng: String,
}

/// On-disk layout.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "K")]
    pub k: QMatrix,
    #[serde(rename = "F")]
    pub f: QMatrix,
    #[serde(rename = "G", skip_serializing_if = "Option::is_none")]
    pub g: Option<QMatrix>,
    pub metadata: Metadata,
}

impl From<&Instance> for InstanceFile {
    fn from(inst: &Instance) -> Self {
        InstanceFile {
            n: inst.n,
            m: inst.m,
            k: inst.k.clone(),
            f: inst.f.matrix().clone(),
            g: inst.g.as_ref().map(|g| g.matrix().clone()),
            metadata: Metadata {
                seed: inst.seed,
                rank_k: inst.rank_k,
                kind: inst.kind,
                prng: PRNG_NAME.to_string(),
            },
        }
    }
}

pub fn to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from(inst)).expect("finite instance serializes")
}

pub fn write_instance_file(path: &Path, inst: &Instance) -> std::io::Result<()> {
    let mut text = to_json(inst);
    text.push('\n');
    std::fs::write(path, text)
}

pub fn parse_instance_file(path: &Path) -> Result<Instance, ParseError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| err(ParseErrorCode::Io, "", format!("{}: {e}", path.display())))?;
    parse_instance_str(&text)
}

/// Converts a reader error into a positioned diagnostic; literals such as
/// `NaN`, `Infinity` or out-of-range exponents are reported as non-finite.
fn syntax_error(text: &str, e: &serde_json::Error) -> ParseError {
    let (line, column) = (e.line(), e.column());
    let msg = e.to_string();
    let at = text
        .lines()
        .nth(line.saturating_sub(1))
        .map(|l| l.chars().skip(column.saturating_sub(1)).collect::<String>())
        .unwrap_or_default();
    let token = at.trim_start_matches(['-', '+']);
    let non_finite =
        msg.contains("number out of range") || ["NaN", "nan", "Infinity", "inf"].iter().any(|t| token.starts_with(t));
    let (code, message) = if non_finite {
        (ParseErrorCode::NonFinite, "non-finite number".to_string())
    } else if e.is_eof() {
        (
            ParseErrorCode::Syntax,
            "unexpected end of input (truncated file?)".to_string(),
        )
    } else {
        (ParseErrorCode::Syntax, msg)
    };
    ParseError {
        code,
        field: String::new(),
        line: Some(line),
        column: Some(column),
        message,
    }
}

pub fn parse_instance_str(text: &str) -> Result<Instance, ParseError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| syntax_error(text, &e))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| err(ParseErrorCode::InvalidValue, "", "top level must be an object"))?;

    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| err(ParseErrorCode::MissingField, name, "required field is missing"))
    };
    let n = dimension(field("n")?, "n")?;
    let m = dimension(field("m")?, "m")?;
    let k = matrix(field("K")?, "K", n, n)?;
    let f = matrix(field("F")?, "F", n, m)?;
    let g = obj.get("G").map(|v| matrix(v, "G", n, m)).transpose()?;
    let meta = obj.get("metadata").map(metadata).transpose()?;

    let f = FrameSystem::new(f).map_err(|e| err(ParseErrorCode::InvalidValue, "F", e.to_string()))?;
    let g = g
        .map(FrameSystem::new)
        .transpose()
        .map_err(|e| err(ParseErrorCode::InvalidValue, "G", e.to_string()))?;

    let seed = meta.as_ref().and_then(|m| m.seed).unwrap_or(0);
    let rank_k = match meta.as_ref().and_then(|m| m.rank_k) {
        Some(r) => r,
        None => {
            svd(&k)
                .map_err(|e| err(ParseErrorCode::InvalidValue, "K", e.to_string()))?
                .rank
        }
    };
    let kind = match meta.as_ref().and_then(|m| m.kind) {
        Some(kind) => kind,
        None => infer_kind(&f, g.as_ref(), &k),
    };

    Ok(Instance {
        seed,
        n,
        m,
        rank_k,
        k,
        f,
        g,
        kind,
    })
}

/// Kind from the data itself when the file does not declare one.
fn infer_kind(f: &FrameSystem, g: Option<&FrameSystem>, k: &QMatrix) -> InstanceKind {
    match g.and_then(|g| approx_deficit(f, g, k).ok()) {
        Some(d) if d.deficit <= VERIFY_TOL => InstanceKind::ExactDual,
        Some(d) if d.is_approximate => InstanceKind::ApproxDual,
        _ => InstanceKind::NonDual,
    }
}

fn dimension(v: &Value, name: &str) -> Result<usize, ParseError> {
    match v.as_u64() {
        Some(d) if d >= 1 => Ok(d as usize),
        _ => Err(err(
            ParseErrorCode::InvalidValue,
            name,
            format!("expected a positive integer, found {v}"),
        )),
    }
}

fn matrix(v: &Value, name: &str, rows: usize, cols: usize) -> Result<QMatrix, ParseError> {
    let outer = v
        .as_array()
        .ok_or_else(|| err(ParseErrorCode::InvalidValue, name, "expected an array of rows"))?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut width = None;
    for (i, row) in outer.iter().enumerate() {
        let path = format!("{name}[{i}]");
        let row = row
            .as_array()
            .ok_or_else(|| err(ParseErrorCode::InvalidValue, &path, "expected an array of scalars"))?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(err(
                    ParseErrorCode::RaggedRows,
                    &path,
                    format!("row has {} entries, row 0 has {w}", row.len()),
                ))
            }
            _ => {}
        }
        for (j, s) in row.iter().enumerate() {
            data.push(scalar(s, &format!("{name}[{i}][{j}]"))?);
        }
    }
    let found = (outer.len(), width.unwrap_or(0));
    if found != (rows, cols) {
        return Err(err(
            ParseErrorCode::ShapeMismatch,
            name,
            format!("expected {rows}x{cols}, found {}x{}", found.0, found.1),
        ));
    }
    Ok(QMatrix::from_row_major(rows, cols, data).expect("shape checked"))
}

fn scalar(v: &Value, path: &str) -> Result<Quaternion, ParseError> {
    let parts = v.as_array().filter(|a| a.len() == 4).ok_or_else(|| {
        err(
            ParseErrorCode::BadScalar,
            path,
            format!("expected [w, x, y, z], found {v}"),
        )
    })?;
    let mut c = [0.0; 4];
    for (slot, p) in c.iter_mut().zip(parts) {
        *slot = match p {
            Value::Number(x) => x.as_f64().filter(|x| x.is_finite()),
            Value::String(s) if is_non_finite_word(s) => {
                return Err(err(
                    ParseErrorCode::NonFinite,
                    path,
                    format!("non-finite component \"{s}\""),
                ))
            }
            _ => None,
        }
        .ok_or_else(|| {
            err(
                ParseErrorCode::BadScalar,
                path,
                format!("component {p} is not a number"),
            )
        })?;
    }
    Ok(Quaternion::new(c[0], c[1], c[2], c[3]))
}

fn is_non_finite_word(s: &str) -> bool {
    let t = s.trim().trim_start_matches(['-', '+']).to_ascii_lowercase();
    t == "nan" || t == "inf" || t == "infinity"
}

struct PartialMetadata {
    seed: Option<u64>,
    rank_k: Option<usize>,
    kind: Option<InstanceKind>,
}

fn metadata(v: &Value) -> Result<PartialMetadata, ParseError> {
    let obj = v
        .as_object()
        .ok_or_else(|| err(ParseErrorCode::InvalidValue, "metadata", "expected an object"))?;
    let seed = obj
        .get("seed")
        .map(|s| {
            s.as_u64().ok_or_else(|| {
                err(
                    ParseErrorCode::InvalidValue,
                    "metadata.seed",
                    "expected an unsigned integer",
                )
            })
        })
        .transpose()?;
    let rank_k = obj
        .get("rankK")
        .map(|s| {
            s.as_u64().map(|r| r as usize).ok_or_else(|| {
                err(
                    ParseErrorCode::InvalidValue,
                    "metadata.rankK",
                    "expected an unsigned integer",
                )
            })
        })
        .transpose()?;
    let kind = obj
        .get("kind")
        .map(|s| {
            s.as_str().and_then(|s| s.parse().ok()).ok_or_else(|| {
                err(
                    ParseErrorCode::InvalidValue,
                    "metadata.kind",
                    format!("unknown kind {s}"),
                )
            })
        })
        .transpose()?;
    Ok(PartialMetadata { seed, rank_k, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::gen_instance;

    const H4: &str = r#"{
        "n": 2, "m": 2,
        "K": [[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[0,0,0,0]]],
        "F": [[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[0,0,0,0]]],
        "G": [[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0,0]]]
    }"#;

    #[test]
    fn round_trip_is_exact() {
        for kind in [InstanceKind::ExactDual, InstanceKind::ApproxDual, InstanceKind::NonDual] {
            let inst = gen_instance(9, 3, 5, 2, kind).unwrap();
            let back = parse_instance_str(&to_json(&inst)).unwrap();
            assert_eq!(back, inst);
        }
    }

    #[test]
    fn kind_is_inferred_without_metadata() {
        let inst = parse_instance_str(H4).unwrap();
        assert_eq!(inst.kind, InstanceKind::ExactDual);
        assert_eq!(inst.rank_k, 1);
        assert_eq!(inst.seed, 0);
    }

    fn code(text: &str) -> (ParseErrorCode, String) {
        let e = parse_instance_str(text).unwrap_err();
        (e.code, e.field)
    }

    #[test]
    fn diagnostics() {
        assert_eq!(
            code(&H4.replace("\"m\": 2,", "")),
            (ParseErrorCode::MissingField, "m".into())
        );
        let ragged = H4.replace(
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0,0]]]",
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0]]]",
        );
        assert_eq!(code(&ragged), (ParseErrorCode::RaggedRows, "G[1]".into()));
        let bad = H4.replace(
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0,0]]]",
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0]]]",
        );
        assert_eq!(code(&bad), (ParseErrorCode::BadScalar, "G[1][1]".into()));
        let nan = H4.replace(
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0,0]]]",
            "[[[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,\"NaN\",0]]]",
        );
        assert_eq!(code(&nan), (ParseErrorCode::NonFinite, "G[1][1]".into()));
        let shape = H4.replace("\"n\": 2", "\"n\": 3");
        assert_eq!(code(&shape), (ParseErrorCode::ShapeMismatch, "K".into()));
    }

    #[test]
    fn reader_errors_carry_positions() {
        let e = parse_instance_str(&H4[..60]).unwrap_err();
        assert_eq!(e.code, ParseErrorCode::Syntax);
        assert!(e.line.is_some() && e.column.is_some());

        let e = parse_instance_str(&H4.replace(
            "[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1",
            "[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[1e999",
        ))
        .unwrap_err();
        assert_eq!(e.code, ParseErrorCode::NonFinite);
        assert_eq!(e.line, Some(5));

        let e = parse_instance_str(&H4.replace("[[0,0,0,0],[1,0,0,0]]]", "[[0,0,0,0],[NaN,0,0,0]]]")).unwrap_err();
        assert_eq!(e.code, ParseErrorCode::NonFinite);
        assert!(e.to_string().contains("line 5"));
    }
}
