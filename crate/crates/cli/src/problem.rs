//! Problem files: JSON realizations and subspaces.
//!
//! Complex scalars are `[re, im]` (a bare number is read as real),
//! matrices are row-major nested arrays, relations are `{"M": .., "N": ..}`.

use std::fmt::Write as _;
use std::path::Path;

use pkit_core::linalg::{spectral_norm, zeros};
use pkit_core::nevanlinna::{Form, Realization};
use pkit_core::pontryagin::{PontryaginSpace, Subspace};
use pkit_core::relations::LinearRelation;
use pkit_core::{c64, CMatrix, Error, C64};
use serde::Deserialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    Matrix(CMatrix),
    Relation { m: CMatrix, n: CMatrix },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormTag {
    Bounded,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub name: Option<String>,
    pub description: Option<String>,
    pub form: Option<FormTag>,
    pub z0: Option<C64>,
    /// `Q(z₀)*` for the general form; zero when absent.
    pub ref_value_adj: Option<CMatrix>,
    pub gram: CMatrix,
    pub a: Operator,
    pub gamma0: CMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    name: Option<String>,
    description: Option<String>,
    form: Option<String>,
    z0: Option<Value>,
    ref_value_adj: Option<Value>,
    gram: Value,
    #[serde(rename = "A")]
    a: Value,
    gamma0: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubspace {
    #[allow(dead_code)]
    name: Option<String>,
    basis: Value,
}

fn scalar(v: &Value) -> Option<C64> {
    match v {
        Value::Number(x) => Some(c64(x.as_f64()?, 0.0)),
        Value::Array(p) if p.len() == 2 => Some(c64(p[0].as_f64()?, p[1].as_f64()?)),
        _ => None,
    }
}

/// Nested row arrays; `[]` is a matrix with no rows.
fn matrix(field: &str, v: &Value) -> CliResult<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::parse(format!("{field}: expected an array of rows")))?;
    let mut cols = None;
    let mut data = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| CliError::parse(format!("{field}: row {}: expected an array", i + 1)))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(CliError::parse(format!(
                    "{field}: row {} has {} entries, expected {c}",
                    i + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        for (j, e) in row.iter().enumerate() {
            data.push(scalar(e).ok_or_else(|| {
                CliError::parse(format!(
                    "{field}: row {}, column {}: expected a number or [re, im]",
                    i + 1,
                    j + 1
                ))
            })?);
        }
    }
    Ok(CMatrix::from_row_slice(
        rows.len(),
        cols.unwrap_or(0),
        &data,
    ))
}

fn expect_rows(field: &str, m: &CMatrix, n: usize) -> CliResult<()> {
    if m.nrows() != n {
        return Err(CliError::parse(format!(
            "{field}: expected {n} rows, found {}",
            m.nrows()
        )));
    }
    Ok(())
}

fn expect_square(field: &str, m: &CMatrix, n: usize) -> CliResult<()> {
    expect_rows(field, m, n)?;
    if m.ncols() != n {
        return Err(CliError::parse(format!(
            "{field}: expected {n} columns, found {}",
            m.ncols()
        )));
    }
    Ok(())
}

/// First entry pair breaking Hermitian symmetry beyond `tol·max(1, ‖g‖)`.
fn hermitian_violation(g: &CMatrix, tol: f64) -> Option<(usize, usize)> {
    let scale = tol * spectral_norm(g).max(1.0);
    let n = g.nrows();
    (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .find(|&(i, j)| (g[(i, j)] - g[(j, i)].conj()).norm() > scale)
}

impl ProblemFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        let raw: RawProblem = serde_json::from_str(text)
            .map_err(|e| CliError::parse(format!("invalid problem file: {e}")))?;
        let gram = matrix("gram", &raw.gram)?;
        let n = gram.nrows();
        expect_square("gram", &gram, n)?;
        let a = match &raw.a {
            Value::Object(obj) => {
                for key in obj.keys() {
                    if key != "M" && key != "N" {
                        return Err(CliError::parse(format!(
                            "A: unknown key \"{key}\", expected M and N"
                        )));
                    }
                }
                let get = |k: &str| {
                    obj.get(k)
                        .ok_or_else(|| CliError::parse(format!("A: relation is missing \"{k}\"")))
                };
                let m = matrix("A.M", get("M")?)?;
                let nn = matrix("A.N", get("N")?)?;
                expect_rows("A.M", &m, n)?;
                expect_rows("A.N", &nn, n)?;
                if m.ncols() != nn.ncols() {
                    return Err(CliError::parse(format!(
                        "A: M has {} columns but N has {}",
                        m.ncols(),
                        nn.ncols()
                    )));
                }
                Operator::Relation { m, n: nn }
            }
            v => {
                let m = matrix("A", v)?;
                expect_square("A", &m, n)?;
                Operator::Matrix(m)
            }
        };
        let mut gamma0 = matrix("gamma0", &raw.gamma0)?;
        if gamma0.nrows() == 0 {
            gamma0 = zeros(n, 0);
        }
        expect_rows("gamma0", &gamma0, n)?;
        let form = match raw.form.as_deref() {
            None => None,
            Some("bounded") => Some(FormTag::Bounded),
            Some("general") => Some(FormTag::General),
            Some(other) => {
                return Err(CliError::parse(format!(
                    "form: expected \"bounded\" or \"general\", found \"{other}\""
                )))
            }
        };
        let z0 = raw
            .z0
            .as_ref()
            .map(|v| scalar(v).ok_or_else(|| CliError::parse("z0: expected [re, im]")))
            .transpose()?;
        let ref_value_adj = raw
            .ref_value_adj
            .as_ref()
            .map(|v| matrix("ref_value_adj", v))
            .transpose()?;
        if let Some(q) = &ref_value_adj {
            expect_square("ref_value_adj", q, gamma0.ncols())?;
        }
        Ok(ProblemFile {
            name: raw.name,
            description: raw.description,
            form,
            z0,
            ref_value_adj,
            gram,
            a,
            gamma0,
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// The form actually used: explicit tag, else general when `A` is a
    /// relation or `z0` is given.
    pub fn effective_form(&self) -> FormTag {
        self.form.unwrap_or(match (&self.a, self.z0) {
            (Operator::Matrix(_), None) => FormTag::Bounded,
            _ => FormTag::General,
        })
    }

    pub fn space(&self, tol: f64) -> CliResult<PontryaginSpace> {
        if let Some((i, j)) = hermitian_violation(&self.gram, tol) {
            return Err(CliError::parse(format!(
                "gram: not Hermitian at row {}, column {} (entry {} vs conjugate of {})",
                i + 1,
                j + 1,
                crate::format::complex(self.gram[(i, j)]),
                crate::format::complex(self.gram[(j, i)]),
            )));
        }
        PontryaginSpace::with_tol(self.gram.clone(), tol)
            .map_err(|e| CliError::parse(format!("gram: {e}")))
    }

    pub fn realization(&self, tol: f64) -> CliResult<Realization> {
        let sp = self.space(tol)?;
        let m = self.gamma0.ncols();
        let labelled = |field: &str, e: Error| match CliError::from(e) {
            CliError::Parse(msg) => CliError::Parse(format!("{field}: {msg}")),
            other => other,
        };
        match self.effective_form() {
            FormTag::Bounded => {
                let Operator::Matrix(a) = &self.a else {
                    return Err(CliError::parse("A: the bounded form needs A as a matrix"));
                };
                if self.z0.is_some() || self.ref_value_adj.is_some() {
                    return Err(CliError::parse("z0: not used by the bounded form"));
                }
                Realization::bounded(&sp, a.clone(), self.gamma0.clone())
                    .map_err(|e| labelled("A", e))
            }
            FormTag::General => {
                let z0 = self.z0.ok_or_else(|| {
                    CliError::parse("z0: the general form needs a reference point")
                })?;
                let rel = match &self.a {
                    Operator::Matrix(a) => LinearRelation::from_operator(a, &sp),
                    Operator::Relation { m, n } => LinearRelation::new(&sp, m.clone(), n.clone()),
                }
                .map_err(|e| labelled("A", e))?;
                let q = self.ref_value_adj.clone().unwrap_or_else(|| zeros(m, m));
                Realization::general(&sp, rel, self.gamma0.clone(), z0, q)
                    .map_err(|e| labelled("A", e))
            }
        }
    }

    pub fn from_realization(r: &Realization, name: Option<&str>) -> Self {
        let (form, z0, ref_value_adj, a) = match r.form() {
            Form::Bounded => (
                FormTag::Bounded,
                None,
                None,
                Operator::Matrix(r.operator().expect("bounded form").clone()),
            ),
            Form::General {
                ref_point,
                ref_value_adj,
            } => (
                FormTag::General,
                Some(*ref_point),
                Some(ref_value_adj.clone()),
                Operator::Relation {
                    m: r.op().dom_generators().clone(),
                    n: r.op().ran_generators().clone(),
                },
            ),
        };
        ProblemFile {
            name: name.map(str::to_string),
            description: None,
            form: Some(form),
            z0,
            ref_value_adj,
            gram: r.space().gram().clone(),
            a,
            gamma0: r.gamma().clone(),
        }
    }

    /// Canonical JSON: fixed key order, form always present, every scalar as
    /// `[re, im]`, one matrix row per line.
    pub fn to_canonical_json(&self) -> String {
        let mut fields: Vec<(String, String)> = Vec::new();
        let quote = |s: &str| serde_json::to_string(s).expect("string serializes");
        if let Some(name) = &self.name {
            fields.push(("name".into(), quote(name)));
        }
        if let Some(d) = &self.description {
            fields.push(("description".into(), quote(d)));
        }
        let form = match self.effective_form() {
            FormTag::Bounded => "bounded",
            FormTag::General => "general",
        };
        fields.push(("form".into(), quote(form)));
        if let Some(z0) = self.z0 {
            fields.push(("z0".into(), json_scalar(z0)));
        }
        if let Some(q) = &self.ref_value_adj {
            fields.push(("ref_value_adj".into(), json_matrix(q, "  ")));
        }
        fields.push(("gram".into(), json_matrix(&self.gram, "  ")));
        let a = match &self.a {
            Operator::Matrix(a) => json_matrix(a, "  "),
            Operator::Relation { m, n } => format!(
                "{{\n    \"M\": {},\n    \"N\": {}\n  }}",
                json_matrix(m, "    "),
                json_matrix(n, "    ")
            ),
        };
        fields.push(("A".into(), a));
        fields.push(("gamma0".into(), json_matrix(&self.gamma0, "  ")));
        let mut out = String::from("{\n");
        for (k, (key, val)) in fields.iter().enumerate() {
            let comma = if k + 1 < fields.len() { "," } else { "" };
            let _ = writeln!(out, "  \"{key}\": {val}{comma}");
        }
        out.push_str("}\n");
        out
    }
}

fn json_number(x: f64) -> String {
    serde_json::to_string(&x).expect("finite number")
}

fn json_scalar(z: C64) -> String {
    format!("[{}, {}]", json_number(z.re), json_number(z.im))
}

fn json_matrix(m: &CMatrix, indent: &str) -> String {
    if m.nrows() == 0 {
        return "[]".into();
    }
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let row: Vec<String> = (0..m.ncols()).map(|j| json_scalar(m[(i, j)])).collect();
            format!("{indent}  [{}]", row.join(", "))
        })
        .collect();
    format!("[\n{}\n{indent}]", rows.join(",\n"))
}

/// Subspace file `{"basis": [[..], ..]}` with basis vectors as columns.
pub fn load_subspace(path: &Path, space: &PontryaginSpace) -> CliResult<Subspace> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    parse_subspace(&text, space).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_subspace(text: &str, space: &PontryaginSpace) -> CliResult<Subspace> {
    let raw: RawSubspace = serde_json::from_str(text)
        .map_err(|e| CliError::parse(format!("invalid subspace file: {e}")))?;
    let basis = matrix("basis", &raw.basis)?;
    expect_rows("basis", &basis, space.dim())?;
    Subspace::new(space, basis).map_err(|e| CliError::parse(format!("basis: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use pkit_core::models::{diag_model, example1};
    use pkit_core::pontryagin::DEFAULT_TOL;

    const DIAG: &str = r#"{
        "gram": [[1, 0], [0, -1]],
        "A": [[1, 0], [0, -1]],
        "gamma0": [[1, 0], [0, 1]]
    }"#;

    #[test]
    fn plain_numbers_are_real() {
        let p = ProblemFile::parse(DIAG).unwrap();
        assert_eq!(p.effective_form(), FormTag::Bounded);
        let r = p.realization(DEFAULT_TOL).unwrap();
        let z = c64(0.0, 1.0);
        assert!((r.evaluate(z).unwrap() - diag_model().evaluate(z).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn errors_carry_row_and_column() {
        let bad = DIAG.replace("[[1, 0], [0, 1]]", "[[1, 0], [0, \"x\"]]");
        let e = ProblemFile::parse(&bad).unwrap_err().to_string();
        assert!(e.contains("gamma0: row 2, column 2"), "{e}");
        let ragged = DIAG.replace(
            "[[1, 0], [0, -1]],\n        \"A\"",
            "[[1, 0], [0]],\n        \"A\"",
        );
        let e = ProblemFile::parse(&ragged).unwrap_err().to_string();
        assert!(e.contains("gram: row 2 has 1 entries, expected 2"), "{e}");
        let short = DIAG.replace("[[1, 0], [0, 1]]", "[[1, 0]]");
        let e = ProblemFile::parse(&short).unwrap_err().to_string();
        assert!(e.contains("gamma0: expected 2 rows, found 1"), "{e}");
    }

    #[test]
    fn non_hermitian_gram_is_located() {
        let bad = DIAG.replace("\"gram\": [[1, 0], [0, -1]]", "\"gram\": [[1, 2], [0, -1]]");
        let p = ProblemFile::parse(&bad).unwrap();
        let e = p.realization(DEFAULT_TOL).unwrap_err().to_string();
        assert!(e.contains("row 1, column 2"), "{e}");
    }

    #[test]
    fn canonical_round_trip() {
        for r in [
            example1(),
            diag_model(),
            diag_model().to_general(c64(0.3, 1.2)).unwrap(),
        ] {
            let p = ProblemFile::from_realization(&r, Some("x"));
            let text = p.to_canonical_json();
            let back = ProblemFile::parse(&text).unwrap();
            assert_eq!(back, p);
            assert_eq!(back.to_canonical_json(), text);
            let r2 = back.realization(DEFAULT_TOL).unwrap();
            let z = c64(0.7, 0.4);
            // relation generators are re-orthonormalized on load
            assert!((r2.evaluate(z).unwrap() - r.evaluate(z).unwrap()).norm() <= 1e-12);
        }
    }

    #[test]
    fn empty_gamma_is_accepted() {
        let p = ProblemFile::parse(&DIAG.replace("[[1, 0], [0, 1]]", "[]")).unwrap();
        assert_eq!(p.gamma0.shape(), (2, 0));
        assert!(p.realization(DEFAULT_TOL).is_ok());
    }
}
