//! JSON and CSV document formats.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sympwig::gauss::GaussianState;
use sympwig::matcore::{self, DenseMatrix};
use sympwig::polygauss::{gaussian_pg, GridSamples};
use sympwig::sympl::{make_form, CovMatrix, Form, NormalizedForm};
use sympwig::PolyGauss;

use crate::error::CliError;

/// The only coordinate ordering accepted or produced.
pub const ORDERING: &str = "x1..xn,p1..pn";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Covariance,
    Form,
    Map,
}

/// `{n, ordering, matrix, kind}` with a row-major `2n × 2n` matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub n: usize,
    pub ordering: String,
    pub matrix: Vec<Vec<f64>>,
    pub kind: MatrixKind,
}

impl MatrixDocument {
    pub fn from_matrix(m: &DenseMatrix, kind: MatrixKind) -> Self {
        Self { n: m.nrows() / 2, ordering: ORDERING.into(), matrix: rows(m), kind }
    }

    pub fn to_value(m: &DenseMatrix, kind: MatrixKind) -> Value {
        serde_json::to_value(Self::from_matrix(m, kind)).expect("matrix documents serialize")
    }

    /// Checks shape, ordering and kind; returns the dense matrix.
    fn dense(&self, expected: MatrixKind) -> Result<DenseMatrix, CliError> {
        if self.kind != expected {
            return Err(CliError::validation(
                "WrongKind",
                format!("expected a {expected:?} document, got {:?}", self.kind).to_lowercase(),
            ));
        }
        if self.ordering != ORDERING {
            return Err(CliError::validation(
                "BadOrdering",
                format!("ordering must be {ORDERING:?}, got {:?}", self.ordering),
            ));
        }
        let dim = 2 * self.n;
        if self.n == 0 || self.matrix.len() != dim || self.matrix.iter().any(|r| r.len() != dim) {
            return Err(CliError::validation(
                "DimensionMismatch",
                format!("matrix must be {dim}x{dim} for n = {}", self.n),
            ));
        }
        Ok(DMatrix::from_fn(dim, dim, |i, j| self.matrix[i][j]))
    }
}

pub fn rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    v.iter().copied().collect()
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("Io", format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::validation("MalformedJson", format!("{}: {e}", path.display())))
}

fn matrix_document(v: Value, path: &Path) -> Result<MatrixDocument, CliError> {
    serde_json::from_value(v)
        .map_err(|e| CliError::validation("MalformedDocument", format!("{}: {e}", path.display())))
}

/// Either a matrix document or a state document carrying one under `key`.
fn matrix_field(path: &Path, key: &str) -> Result<MatrixDocument, CliError> {
    let mut v = read_json(path)?;
    if v.get("ordering").is_none() {
        if let Some(inner) = v.get_mut(key) {
            v = inner.take();
        }
    }
    matrix_document(v, path)
}

pub fn load_cov(path: &Path) -> Result<CovMatrix, CliError> {
    let m = matrix_field(path, "covariance")?.dense(MatrixKind::Covariance)?;
    Ok(CovMatrix::new(m)?)
}

pub fn load_map(path: &Path) -> Result<DenseMatrix, CliError> {
    let m = matrix_document(read_json(path)?, path)?.dense(MatrixKind::Map)?;
    matcore::check_finite(&m)?;
    let d = matcore::det(&m);
    if d.abs() <= 1e-12 {
        return Err(sympwig::Error::Singular(d.abs()).into());
    }
    Ok(m)
}

/// Optional mean vector stored next to a covariance in a state document.
pub fn load_mean(path: &Path, dim: usize) -> Result<DVector<f64>, CliError> {
    let v = read_json(path)?;
    match v.get("mean") {
        None => Ok(DVector::zeros(dim)),
        Some(m) => {
            let m: Vec<f64> = serde_json::from_value(m.clone())
                .map_err(|e| CliError::validation("MalformedDocument", format!("mean: {e}")))?;
            if m.len() != dim {
                return Err(sympwig::Error::DimensionMismatch { expected: dim, got: m.len() }.into());
            }
            Ok(DVector::from_vec(m))
        }
    }
}

/// A form argument: a file, or the literal `J` for the standard form.
#[derive(Debug, Clone)]
pub enum FormArg {
    Standard,
    File(std::path::PathBuf),
}

impl std::str::FromStr for FormArg {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s == "J" { FormArg::Standard } else { FormArg::File(s.into()) })
    }
}

impl FormArg {
    pub fn mode_count(&self) -> Result<Option<usize>, CliError> {
        match self {
            FormArg::Standard => Ok(None),
            FormArg::File(p) => Ok(Some(matrix_field(p, "form")?.n)),
        }
    }

    /// Normalized form; `n` resolves the standard form's size.
    pub fn load(&self, n: Option<usize>) -> Result<NormalizedForm, CliError> {
        match self {
            FormArg::Standard => {
                let n = n.ok_or_else(|| {
                    CliError::validation("InvalidArgument", "cannot infer the mode count for the standard form J")
                })?;
                Ok(make_form(&matcore::standard_j(n))?)
            }
            FormArg::File(p) => {
                let doc = matrix_field(p, "form")?;
                let m = doc.dense(MatrixKind::Form)?;
                if let Some(n) = n {
                    if doc.n != n {
                        return Err(sympwig::Error::DimensionMismatch { expected: 2 * n, got: 2 * doc.n }.into());
                    }
                }
                let nf = make_form(&m)?;
                if nf.scale != 1.0 {
                    eprintln!("note: {} rescaled by {:.17e} to unit determinant", p.display(), nf.scale);
                }
                Ok(nf)
            }
        }
    }

    pub fn form(&self, n: Option<usize>) -> Result<Form, CliError> {
        Ok(self.load(n)?.form)
    }
}

/// A phase-space function: a PolyGauss, a state document or a covariance.
pub fn load_function(path: &Path) -> Result<PolyGauss, CliError> {
    let v = read_json(path)?;
    let bad = |e: serde_json::Error| CliError::validation("MalformedDocument", format!("{}: {e}", path.display()));
    if v.get("terms").is_some() {
        return serde_json::from_value(v).map_err(bad);
    }
    match v.get("kind").and_then(Value::as_str) {
        Some("polygauss") => {
            let f = v.get("function").cloned().unwrap_or(Value::Null);
            serde_json::from_value(f).map_err(bad)
        }
        Some("gaussian") | Some("covariance") => {
            let cov = load_cov(path)?;
            let mean = load_mean(path, cov.dim())?;
            let form = Form::standard(cov.n());
            Ok(gaussian_pg(&GaussianState::new(mean, cov, form)?))
        }
        _ => Err(CliError::validation(
            "MalformedDocument",
            format!("{}: not a PolyGauss, state or covariance document", path.display()),
        )),
    }
}

pub fn polygauss_document(f: &PolyGauss) -> Value {
    json!({ "kind": "polygauss", "function": f })
}

/// Renders JSON with sorted keys and every float at 17 significant digits.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    render_into(v, 0, &mut out);
    out.push('\n');
    out
}

fn render_number(x: f64, out: &mut String) {
    if x.is_finite() {
        // no negative zero in output
        let x = if x == 0.0 { 0.0 } else { x };
        write!(out, "{x:.16e}").unwrap();
    } else {
        out.push_str("null");
    }
}

fn render_into(v: &Value, indent: usize, out: &mut String) {
    let pad = |k: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', 2 * k));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(num) => {
            if num.is_f64() {
                render_number(num.as_f64().unwrap(), out);
            } else {
                out.push_str(&num.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // rows of plain numbers stay on one line
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    render_into(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(indent + 1, out);
                render_into(x, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(indent + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                render_into(&map[k.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| CliError::validation("Io", "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let io = |e: std::io::Error| CliError::Internal(format!("writing {}: {e}", path.display()));
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

/// CSV with header `axis1,…,value`, one sample per line.
pub fn grid_csv(grid: &GridSamples) -> String {
    let dim = grid.axes.len();
    let mut out = String::with_capacity(grid.values.len() * 24 * (dim + 1));
    for i in 0..dim {
        write!(out, "axis{},", i + 1).unwrap();
    }
    out.push_str("value\n");
    for (idx, v) in grid.values.iter().enumerate() {
        for c in grid.coords(idx) {
            write!(out, "{c:.16e},").unwrap();
        }
        writeln!(out, "{v:.16e}").unwrap();
    }
    out
}
