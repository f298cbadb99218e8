//! Structure files and form files.
//!
//! A structure file is JSON: `{"m": 2, "n": 2, "A": [["1/2", "0"], ["0", "1/3"]]}`.
//! Rows may also be given flat (`"A": ["1/2", "0", "0", "1/3"]`, row-major,
//! `m` and `n` required), and an entry may be `{"re": "...", "im": "..."}`.
//!
//! A form file is JSON with one coefficient per line:
//!
//! ```text
//! {"m": 1, "n": 2, "q": 1, "two_pi_exp": 0, "entries": [
//!   {"xi": ["1"], "kappa": ["-1", "0"], "J": [2], "re": "1", "im": "0"}
//! ]}
//! ```
//!
//! `J` is 1-based; integers may be JSON numbers or decimal strings.

use num_bigint::BigInt;
use serde_json::Value;
use thiserror::Error;

use crate::fourier::TubeForm;
use crate::koszul::{ModeForm, MultiIndex};
use crate::lattice::PeriodMatrix;
use crate::scalar::{parse_scalar, ComplexExact, ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: field {field}{}: {message}", location(*line, *column))]
    Field { path: String, field: String, line: Option<usize>, column: Option<usize>, message: String },
    #[error("{path}: {message}")]
    Read { path: String, message: String },
}

fn location(line: Option<usize>, column: Option<usize>) -> String {
    match (line, column) {
        (Some(l), Some(c)) => format!(" (line {l}, column {c})"),
        _ => String::new(),
    }
}

/// Parsing context: file name and source text, for locating bad fields.
struct Source<'a> {
    path: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn parse_json(&self) -> Result<Value, IoError> {
        serde_json::from_str(self.text).map_err(|e| IoError::Syntax {
            path: self.path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Line and column of the first occurrence of `needle`, if any.
    fn locate(&self, needle: &str) -> (Option<usize>, Option<usize>) {
        let Some(pos) = self.text.find(needle) else { return (None, None) };
        let before = &self.text[..pos];
        let line = before.matches('\n').count() + 1;
        let column = pos - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (Some(line), Some(column))
    }

    fn field(&self, field: impl Into<String>, message: impl Into<String>) -> IoError {
        IoError::Field { path: self.path.to_string(), field: field.into(), line: None, column: None, message: message.into() }
    }

    fn scalar(&self, field: &str, v: &Value) -> Result<ExactScalar, IoError> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(self.field(field, "expected an exact scalar string")),
        };
        parse_scalar(&text).map_err(|e| {
            let (line, column) = self.locate(&format!("\"{text}\""));
            let message = match e {
                ScalarError::Parse { column: c, message } => format!("{message} at character {c} of \"{text}\""),
                other => other.to_string(),
            };
            IoError::Field {
                path: self.path.to_string(),
                field: field.to_string(),
                line,
                column: column.map(|c| c + 1),
                message,
            }
        })
    }

    fn complex(&self, field: &str, v: &Value) -> Result<ComplexExact, IoError> {
        match v {
            Value::Object(obj) => {
                let part = |key: &str| match obj.get(key) {
                    Some(x) => self.scalar(&format!("{field}.{key}"), x),
                    None => Ok(ExactScalar::zero()),
                };
                Ok(ComplexExact::new(part("re")?, part("im")?))
            }
            other => Ok(ComplexExact::real(self.scalar(field, other)?)),
        }
    }

    fn integer(&self, field: &str, v: &Value) -> Result<BigInt, IoError> {
        let text = match v {
            Value::String(s) => s.trim().to_string(),
            Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(self.field(field, "expected an integer")),
        };
        text.parse().map_err(|_| self.field(field, format!("\"{text}\" is not an integer")))
    }

    fn count(&self, obj: &serde_json::Map<String, Value>, key: &str) -> Result<Option<usize>, IoError> {
        match obj.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| self.field(key, "expected a non-negative integer")),
        }
    }
}

pub fn parse_structure(path: &str, text: &str) -> Result<PeriodMatrix, IoError> {
    let src = Source { path, text };
    let json = src.parse_json()?;
    let obj = json.as_object().ok_or_else(|| src.field("<root>", "expected a JSON object"))?;
    let m = src.count(obj, "m")?;
    let n = src.count(obj, "n")?;
    let a = obj.get("A").ok_or_else(|| src.field("A", "missing"))?;
    let items = a.as_array().ok_or_else(|| src.field("A", "expected an array"))?;
    let nested = items.iter().any(|v| v.is_array());
    let rows: Vec<Vec<ComplexExact>> = if nested {
        items
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let row = row.as_array().ok_or_else(|| src.field(format!("A[{k}]"), "expected an array"))?;
                row.iter().enumerate().map(|(j, v)| src.complex(&format!("A[{k}][{j}]"), v)).collect()
            })
            .collect::<Result<_, _>>()?
    } else {
        let (Some(m), Some(n)) = (m, n) else {
            return Err(src.field("A", "a flat matrix needs both m and n"));
        };
        if items.len() != m * n {
            return Err(src.field("A", format!("has {} entries, expected m*n = {}", items.len(), m * n)));
        }
        let flat: Vec<ComplexExact> =
            items.iter().enumerate().map(|(i, v)| src.complex(&format!("A[{i}]"), v)).collect::<Result<_, _>>()?;
        flat.chunks(n.max(1)).map(|c| c.to_vec()).collect()
    };
    if let Some(m) = m {
        if rows.len() != m {
            return Err(src.field("m", format!("declares {m} rows, A has {}", rows.len())));
        }
    }
    if let (Some(n), Some(first)) = (n, rows.first()) {
        if first.len() != n {
            return Err(src.field("n", format!("declares {n} columns, A has {}", first.len())));
        }
    }
    PeriodMatrix::new(rows).map_err(|e| src.field("A", e.to_string()))
}

fn complex_json(c: &ComplexExact) -> Value {
    if c.im.is_zero() {
        Value::String(c.re.to_string())
    } else {
        serde_json::json!({"re": c.re.to_string(), "im": c.im.to_string()})
    }
}

pub fn write_structure(a: &PeriodMatrix) -> String {
    let rows: Vec<Value> = a.rows().iter().map(|r| Value::Array(r.iter().map(complex_json).collect())).collect();
    let mut out = format!("{{\"m\": {}, \"n\": {}, \"A\": [\n", a.m(), a.n());
    let lines: Vec<String> = rows.iter().map(|r| format!("  {r}")).collect();
    out.push_str(&lines.join(",\n"));
    out.push_str("\n]}\n");
    out
}

pub fn parse_form(path: &str, text: &str) -> Result<TubeForm, IoError> {
    let src = Source { path, text };
    let json = src.parse_json()?;
    let obj = json.as_object().ok_or_else(|| src.field("<root>", "expected a JSON object"))?;
    let m = src.count(obj, "m")?.ok_or_else(|| src.field("m", "missing"))?;
    let n = src.count(obj, "n")?.ok_or_else(|| src.field("n", "missing"))?;
    let q = src.count(obj, "q")?.ok_or_else(|| src.field("q", "missing"))?;
    if m == 0 || n == 0 {
        return Err(src.field("m", "m and n must be positive"));
    }
    if q > n {
        return Err(src.field("q", format!("degree {q} exceeds n = {n}")));
    }
    let two_pi_exp = match obj.get("two_pi_exp") {
        None => 0,
        Some(v) => v.as_i64().ok_or_else(|| src.field("two_pi_exp", "expected an integer"))? as i32,
    };
    let entries = obj
        .get("entries")
        .and_then(|e| e.as_array())
        .ok_or_else(|| src.field("entries", "expected an array"))?;
    let mut f = TubeForm::unbounded(m, n, q).with_two_pi_exp(two_pi_exp);
    for (i, e) in entries.iter().enumerate() {
        let field = |k: &str| format!("entries[{i}].{k}");
        let e = e.as_object().ok_or_else(|| src.field(format!("entries[{i}]"), "expected an object"))?;
        let ints = |key: &str, len: usize| -> Result<Vec<BigInt>, IoError> {
            let arr = e.get(key).and_then(|v| v.as_array()).ok_or_else(|| src.field(field(key), "expected an array"))?;
            if arr.len() != len {
                return Err(src.field(field(key), format!("has length {}, expected {len}", arr.len())));
            }
            arr.iter().enumerate().map(|(j, v)| src.integer(&format!("{}[{j}]", field(key)), v)).collect()
        };
        let xi = ints("xi", m)?;
        let kappa = ints("kappa", n)?;
        let j = ints("J", q)?;
        let mut idx = Vec::with_capacity(q);
        for x in &j {
            match usize::try_from(x) {
                Ok(v) if (1..=n).contains(&v) => idx.push(v - 1),
                _ => return Err(src.field(field("J"), format!("index {x} outside 1..={n}"))),
            }
        }
        if idx.windows(2).any(|w| w[0] >= w[1]) {
            return Err(src.field(field("J"), "indices must be strictly increasing"));
        }
        let part = |key: &str| match e.get(key) {
            Some(v) => src.scalar(&field(key), v),
            None => Ok(ExactScalar::zero()),
        };
        let value = ComplexExact::new(part("re")?, part("im")?);
        let coeff = ModeForm::single(n, MultiIndex::new(idx).expect("checked increasing"), value);
        f.accumulate(xi, kappa, coeff).map_err(|err| src.field(format!("entries[{i}]"), err.to_string()))?;
    }
    Ok(f)
}

fn int_list(v: &[BigInt]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("\"{x}\"")).collect();
    format!("[{}]", items.join(", "))
}

/// Canonical text: entries in `(ξ, κ, J)` order, one per line.
pub fn write_form(f: &TubeForm) -> String {
    let mut lines = Vec::new();
    for ((xi, kappa), c) in f.iter() {
        for (j, value) in c.iter() {
            let jj: Vec<String> = j.indices().iter().map(|x| (x + 1).to_string()).collect();
            lines.push(format!(
                "  {{\"xi\": {}, \"kappa\": {}, \"J\": [{}], \"re\": {}, \"im\": {}}}",
                int_list(xi),
                int_list(kappa),
                jj.join(", "),
                Value::String(value.re.to_string()),
                Value::String(value.im.to_string()),
            ));
        }
    }
    let mut out = format!(
        "{{\"m\": {}, \"n\": {}, \"q\": {}, \"two_pi_exp\": {}, \"entries\": [\n",
        f.m(),
        f.n(),
        f.degree(),
        f.two_pi_exp()
    );
    out.push_str(&lines.join(",\n"));
    if !lines.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

pub fn read_file(path: &str) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read { path: path.to_string(), message: e.to_string() })
}

pub fn read_structure(path: &str) -> Result<PeriodMatrix, IoError> {
    parse_structure(path, &read_file(path)?)
}

pub fn read_form(path: &str) -> Result<TubeForm, IoError> {
    parse_form(path, &read_file(path)?)
}
