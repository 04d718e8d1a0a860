//! TOML algebra and brace files, run reports and census output.
//!
//! Algebra files list only nonzero products; omitted pairs multiply to zero.
//! Indices are 0-based.
//!
//! ```toml
//! p = 11
//! dim = 2
//! basis_names = ["x", "y"]
//!
//! [[products]]
//! i = 0
//! j = 0
//! result = [0, 1]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::Spanned;

use crate::brace::{Brace, Circle};
use crate::classify::sweep::Census;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::flows::FlowsContext;
use crate::linalg::{FpVector, MAX_DIM};
use crate::prelie::PreLieAlgebra;

/// 1-based line and column in a loaded document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    fn of(text: &str, offset: usize) -> Position {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Position { line, column }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LoadError {
    #[error("{at}: {message}")]
    Parse { at: Position, message: String },

    #[error("{at}: {value} is not an odd prime below 2^31")]
    BadPrime { at: Position, value: i64 },

    #[error("{at}: dimension {value} outside 1..={MAX_DIM}")]
    BadDimension { at: Position, value: i64 },

    #[error("{at}: index {index} out of range for dimension {dim}")]
    IndexOutOfRange { at: Position, index: i64, dim: usize },

    #[error("{at}: duplicate product ({i}, {j}), first given at {first}")]
    DuplicateProduct {
        at: Position,
        first: Position,
        i: usize,
        j: usize,
    },

    #[error("{at}: {message}")]
    BadEntry { at: Position, message: String },
}

impl LoadError {
    /// Stable identifier of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Parse { .. } => "parse",
            LoadError::BadPrime { .. } => "bad-prime",
            LoadError::BadDimension { .. } => "bad-dimension",
            LoadError::IndexOutOfRange { .. } => "index-out-of-range",
            LoadError::DuplicateProduct { .. } => "duplicate-product",
            LoadError::BadEntry { .. } => "bad-entry",
        }
    }

    pub fn position(&self) -> Position {
        match self {
            LoadError::Parse { at, .. }
            | LoadError::BadPrime { at, .. }
            | LoadError::BadDimension { at, .. }
            | LoadError::IndexOutOfRange { at, .. }
            | LoadError::DuplicateProduct { at, .. }
            | LoadError::BadEntry { at, .. } => *at,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProduct {
    i: Spanned<i64>,
    j: Spanned<i64>,
    result: Spanned<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgebra {
    format: Option<Spanned<String>>,
    p: Spanned<i64>,
    dim: Spanned<i64>,
    basis_names: Option<Spanned<Vec<String>>>,
    #[serde(default)]
    products: Vec<RawProduct>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBrace {
    format: Spanned<String>,
    p: Spanned<i64>,
    dim: Spanned<i64>,
    construction: Spanned<String>,
    algebra: Option<Spanned<RawAlgebra>>,
    table: Option<Spanned<Vec<i64>>>,
}

struct Doc<'a> {
    text: &'a str,
}

impl Doc<'_> {
    fn at(&self, span: Range<usize>) -> Position {
        Position::of(self.text, span.start)
    }

    fn parse<T: for<'de> Deserialize<'de>>(&self) -> std::result::Result<T, LoadError> {
        toml::from_str(self.text).map_err(|e| LoadError::Parse {
            at: Position::of(self.text, e.span().map_or(0, |s| s.start)),
            message: e.message().trim().to_string(),
        })
    }

    fn field(&self, p: &Spanned<i64>) -> std::result::Result<PrimeField, LoadError> {
        let bad = || LoadError::BadPrime {
            at: self.at(p.span()),
            value: *p.get_ref(),
        };
        let v = u64::try_from(*p.get_ref()).map_err(|_| bad())?;
        PrimeField::new(v).map_err(|_| bad())
    }

    fn dim(&self, d: &Spanned<i64>) -> std::result::Result<usize, LoadError> {
        match usize::try_from(*d.get_ref()) {
            Ok(n) if (1..=MAX_DIM).contains(&n) => Ok(n),
            _ => Err(LoadError::BadDimension {
                at: self.at(d.span()),
                value: *d.get_ref(),
            }),
        }
    }

    fn algebra(&self, raw: &RawAlgebra) -> std::result::Result<PreLieAlgebra, LoadError> {
        if let Some(fmt) = &raw.format {
            if fmt.get_ref() != "algebra" {
                return Err(LoadError::BadEntry {
                    at: self.at(fmt.span()),
                    message: format!("expected format \"algebra\", found \"{}\"", fmt.get_ref()),
                });
            }
        }
        let field = self.field(&raw.p)?;
        let dim = self.dim(&raw.dim)?;
        let mut table = vec![FpVector::zero(field, dim); dim * dim];
        let mut seen: BTreeMap<(usize, usize), Position> = BTreeMap::new();
        for prod in &raw.products {
            let idx = |s: &Spanned<i64>| match usize::try_from(*s.get_ref()) {
                Ok(v) if v < dim => Ok(v),
                _ => Err(LoadError::IndexOutOfRange {
                    at: self.at(s.span()),
                    index: *s.get_ref(),
                    dim,
                }),
            };
            let (i, j) = (idx(&prod.i)?, idx(&prod.j)?);
            let at = self.at(prod.i.span());
            if let Some(&first) = seen.get(&(i, j)) {
                return Err(LoadError::DuplicateProduct { at, first, i, j });
            }
            seen.insert((i, j), at);
            let r = prod.result.get_ref();
            if r.len() != dim {
                return Err(LoadError::BadEntry {
                    at: self.at(prod.result.span()),
                    message: format!("result has {} entries, expected {dim}", r.len()),
                });
            }
            let mut v = FpVector::zero(field, dim);
            for (k, &c) in r.iter().enumerate() {
                if c < 0 || c >= field.p() as i64 {
                    return Err(LoadError::BadEntry {
                        at: self.at(prod.result.span()),
                        message: format!("result entry {c} outside 0..{}", field.p()),
                    });
                }
                v.set(k, c as u32);
            }
            table[i * dim + j] = v;
        }
        let a = PreLieAlgebra::from_table(field, dim, table).expect("table checked above");
        match &raw.basis_names {
            None => Ok(a),
            Some(names) => a.with_names(names.get_ref().clone()).map_err(|e| LoadError::BadEntry {
                at: self.at(names.span()),
                message: e.to_string(),
            }),
        }
    }
}

pub fn parse_algebra(text: &str) -> std::result::Result<PreLieAlgebra, LoadError> {
    let doc = Doc { text };
    doc.algebra(&doc.parse::<RawAlgebra>()?)
}

pub fn load_algebra(path: &Path) -> Result<PreLieAlgebra> {
    Ok(parse_algebra(&std::fs::read_to_string(path)?)?)
}

#[derive(Serialize)]
struct OutProduct {
    i: usize,
    j: usize,
    result: Vec<u32>,
}

#[derive(Serialize)]
struct OutAlgebra {
    p: u32,
    dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis_names: Option<Vec<String>>,
    products: Vec<OutProduct>,
}

impl OutAlgebra {
    fn of(a: &PreLieAlgebra) -> OutAlgebra {
        let n = a.dim();
        let mut products = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let e = a.entry(i, j);
                if !e.is_zero() {
                    products.push(OutProduct {
                        i,
                        j,
                        result: e.coords().to_vec(),
                    });
                }
            }
        }
        OutAlgebra {
            p: a.p(),
            dim: n,
            basis_names: a.basis_names().map(<[String]>::to_vec),
            products,
        }
    }
}

pub fn algebra_to_toml(a: &PreLieAlgebra) -> String {
    toml::to_string(&OutAlgebra::of(a)).expect("algebra documents serialize")
}

pub fn save_algebra(a: &PreLieAlgebra, path: &Path) -> Result<()> {
    write_atomic(path, algebra_to_toml(a).as_bytes())
}

pub fn parse_brace(text: &str) -> std::result::Result<Brace, LoadError> {
    let doc = Doc { text };
    let raw: RawBrace = doc.parse()?;
    if raw.format.get_ref() != "brace" {
        return Err(LoadError::BadEntry {
            at: doc.at(raw.format.span()),
            message: format!("expected format \"brace\", found \"{}\"", raw.format.get_ref()),
        });
    }
    let field = doc.field(&raw.p)?;
    let dim = doc.dim(&raw.dim)?;
    let bad = |span: Range<usize>, message: String| LoadError::BadEntry {
        at: doc.at(span),
        message,
    };
    match raw.construction.get_ref().as_str() {
        "flows" => {
            let alg = raw.algebra.as_ref().ok_or_else(|| {
                bad(
                    raw.construction.span(),
                    "flows construction needs an [algebra] table".into(),
                )
            })?;
            let a = doc.algebra(alg.get_ref())?;
            if a.p() != field.p() || a.dim() != dim {
                return Err(bad(
                    alg.span(),
                    "embedded algebra differs from the brace in p or dim".into(),
                ));
            }
            FlowsContext::new(a)
                .map(Brace::from_flows)
                .map_err(|e| bad(alg.span(), e.to_string()))
        }
        "table" => {
            let t = raw
                .table
                .as_ref()
                .ok_or_else(|| bad(raw.construction.span(), "table construction needs a table".into()))?;
            let entries: std::result::Result<Vec<u32>, _> = t.get_ref().iter().map(|&x| u32::try_from(x)).collect();
            let entries = entries.map_err(|_| bad(t.span(), "table entries must be element indices".into()))?;
            Brace::from_table(field, dim, entries).map_err(|e| bad(t.span(), e.to_string()))
        }
        "trivial" => Brace::trivial(field, dim).map_err(|e| bad(raw.construction.span(), e.to_string())),
        other => Err(bad(
            raw.construction.span(),
            format!("unknown construction \"{other}\"; expected flows, table or trivial"),
        )),
    }
}

pub fn load_brace(path: &Path) -> Result<Brace> {
    Ok(parse_brace(&std::fs::read_to_string(path)?)?)
}

#[derive(Serialize)]
struct OutBrace {
    format: &'static str,
    p: u32,
    dim: usize,
    construction: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    algebra: Option<OutAlgebra>,
}

pub fn brace_to_toml(b: &Brace) -> String {
    let (construction, table, algebra) = match b.construction() {
        Circle::Flows(ctx) => ("flows", None, Some(OutAlgebra::of(ctx.algebra()))),
        Circle::Table(t) => ("table", Some(t.clone()), None),
        Circle::Trivial => ("trivial", None, None),
    };
    let out = OutBrace {
        format: "brace",
        p: b.field().p(),
        dim: b.dim(),
        construction,
        table,
        algebra,
    };
    toml::to_string(&out).expect("brace documents serialize")
}

pub fn save_brace(b: &Brace, path: &Path) -> Result<()> {
    write_atomic(path, brace_to_toml(b).as_bytes())
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so an interrupted run leaves no partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Violations kept verbatim in a report; `counts["violations"]` has the total.
pub const REPORT_VIOLATION_CAP: usize = 100;

/// Machine-readable summary of one command. Contains no timing, so identical
/// inputs and seeds give byte-identical reports.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub input_digest: Option<String>,
    pub seed: Option<u64>,
    pub counts: BTreeMap<String, u64>,
    pub violations: Vec<String>,
    pub chain_dims: BTreeMap<String, Vec<usize>>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            command: command.to_string(),
            ..RunReport::default()
        }
    }

    pub fn input(&mut self, bytes: &[u8]) {
        self.input_digest = Some(sha256_hex(bytes));
    }

    pub fn count(&mut self, key: &str, n: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += n;
    }

    pub fn violation(&mut self, line: String) {
        self.count("violations", 1);
        if self.violations.len() < REPORT_VIOLATION_CAP {
            self.violations.push(line);
        }
    }

    pub fn chain(&mut self, kind: &str, dims: Vec<usize>) {
        self.chain_dims.insert(kind.to_string(), dims);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// One `case, p, params…, fingerprint, accepted` line per record, after a
/// `#` header carrying the census totals.
pub fn census_lines(c: &Census) -> String {
    let mut out = String::new();
    let summary = serde_json::json!({
        "case": c.case,
        "p": c.p,
        "seed": c.seed,
        "parameter_space": c.parameter_space.to_string(),
        "visited": c.visited,
        "accepted": c.accepted,
        "rejected": c.rejected,
        "printed_failures": c.printed_failures,
        "variants": c.variants,
        "records_truncated": c.records_truncated,
    });
    out.push_str(&format!("# census {summary}\n"));
    for (fp, stat) in &c.fingerprints {
        out.push_str(&format!("# fingerprint {fp} count {}\n", stat.count));
    }
    out.push_str("# case, p, params..., fingerprint, accepted\n");
    for r in &c.records {
        let mut fields = vec![r.case.clone(), c.p.to_string()];
        fields.extend(r.params.iter().map(u32::to_string));
        fields.push(r.fingerprint.clone());
        fields.push(r.accepted.to_string());
        out.push_str(&fields.join(", "));
        out.push('\n');
    }
    out
}

pub fn write_census(c: &Census, path: &Path) -> Result<()> {
    write_atomic(path, census_lines(c).as_bytes())
}
