//! Problem files: JSON documents holding a wavefunction, optional operators
//! and eigenvalues as grids of expression strings, and solver bounds.
//!
//! ```json
//! {
//!   "n": 2,
//!   "factors": ["x", "z"],
//!   "convention": "1",
//!   "psi": [["(x*z-1)/x", "0"], ["0", "1"]],
//!   "left_op": {"2": [["1", "0"], ["0", "1"]]},
//!   "bounds": {"degree": 2, "op_order": 2}
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parser::{parse_expr, ParseError};
use crate::exact::{Factor, FactorBasis, MatRF, RatFun, UniPoly, Var};
use crate::matpoly::MatPoly;
use crate::operators::{Convention, LeftOperator, RightOperator, WaveFunction};
use crate::solver::{AnsatzBounds, Side, SliceMode};

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read `{path}`: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("{field}[{row}][{col}]: {source}")]
    Entry { field: String, row: usize, col: usize, source: ParseError },
    #[error("{field}: {msg}")]
    Invalid { field: String, msg: String },
}

pub type Grid = Vec<Vec<String>>;

/// Serialized bounds block. Missing fields are filled by the default schedule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub op_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub num_deg: Option<usize>,
    /// Factor expression → maximal pole order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pole_orders: Option<BTreeMap<String, u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SliceMode>,
}

/// The raw document, before any expression is parsed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub factors: Vec<String>,
    #[serde(default)]
    pub convention: Convention,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub left_op: Option<BTreeMap<String, Grid>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub right_op: Option<BTreeMap<String, Grid>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Grid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsDoc>,
}

/// A parsed problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub description: Option<String>,
    pub n: usize,
    pub basis: FactorBasis,
    pub psi: WaveFunction,
    pub left_op: Option<LeftOperator>,
    pub right_op: Option<RightOperator>,
    pub theta: Option<MatPoly>,
    pub f: Option<MatPoly>,
    pub bounds: BoundsDoc,
}

impl Problem {
    pub fn convention(&self) -> Convention {
        self.psi.convention()
    }

    /// Resolves the bounds block for one side; `None` fields take the given
    /// defaults.
    pub fn ansatz_bounds(&self, side: Side, default_degree: usize) -> Result<(AnsatzBounds, SliceMode), ProblemError> {
        let d = self.bounds.degree.unwrap_or(default_degree);
        let m = self.bounds.op_order.unwrap_or(d);
        let mode = self.bounds.mode.unwrap_or(SliceMode::Truncations);
        let pole_orders = match &self.bounds.pole_orders {
            Some(map) => {
                let mut out = BTreeMap::new();
                for (text, &k) in map {
                    let f = parse_factor(text).map_err(|msg| ProblemError::Invalid { field: "bounds.pole_orders".into(), msg })?;
                    if f.var() == side.op_var() {
                        out.insert(f, k);
                    }
                }
                out
            }
            None => self.basis.of_var(side.op_var()).map(|f| (f.clone(), m as u32)).collect(),
        };
        let lookahead = match mode {
            SliceMode::Members => 0,
            SliceMode::Truncations => m.saturating_sub(d),
        };
        let bounds = AnsatzBounds {
            eigen_deg: d,
            lookahead,
            op_order: m,
            pole_orders,
            num_deg: self.bounds.num_deg.unwrap_or(m + d),
        };
        Ok((bounds, mode))
    }
}

/// Parses a factor string such as `x`, `z+1` or `x^2+1` into a monic factor.
pub fn parse_factor(text: &str) -> Result<Factor, String> {
    let r = parse_expr(text, &FactorBasis::default()).map_err(|e| e.to_string())?;
    let p = r.num();
    let var = if p.is_free_of(Var::Z) {
        Var::X
    } else if p.is_free_of(Var::X) {
        Var::Z
    } else {
        return Err(format!("factor `{text}` must involve a single variable"));
    };
    let uni: UniPoly = p.to_unipoly(var).ok_or_else(|| format!("factor `{text}` is not univariate"))?;
    if uni.degree().unwrap_or(0) == 0 {
        return Err(format!("factor `{text}` is constant"));
    }
    Factor::new(var, uni.monic()).map_err(|e| e.to_string())
}

fn parse_grid(field: &str, grid: &Grid, n: usize, basis: &FactorBasis) -> Result<MatRF, ProblemError> {
    if grid.len() != n || grid.iter().any(|r| r.len() != n) {
        return Err(ProblemError::Invalid { field: field.into(), msg: format!("expected a {n}x{n} grid") });
    }
    let mut rows = Vec::with_capacity(n);
    for (i, row) in grid.iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (j, text) in row.iter().enumerate() {
            let v: RatFun = parse_expr(text, basis).map_err(|source| ProblemError::Entry {
                field: field.into(),
                row: i + 1,
                col: j + 1,
                source,
            })?;
            out.push(v);
        }
        rows.push(out);
    }
    Ok(MatRF::from_rows(rows).expect("square grid"))
}

fn parse_poly_grid(field: &str, grid: &Grid, n: usize, basis: &FactorBasis, var: Var) -> Result<MatPoly, ProblemError> {
    let m = parse_grid(field, grid, n, basis)?;
    MatPoly::from_matrf(var, &m).map_err(|e| ProblemError::Invalid { field: field.into(), msg: e.to_string() })
}

fn parse_op(field: &str, map: &BTreeMap<String, Grid>, n: usize, basis: &FactorBasis) -> Result<BTreeMap<usize, MatRF>, ProblemError> {
    let mut out = BTreeMap::new();
    for (key, grid) in map {
        let order: usize = key
            .parse()
            .map_err(|_| ProblemError::Invalid { field: field.into(), msg: format!("order key `{key}` is not an integer") })?;
        out.insert(order, parse_grid(&format!("{field}.{key}"), grid, n, basis)?);
    }
    Ok(out)
}

impl ProblemDoc {
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Parses every expression of the document.
    pub fn resolve(&self) -> Result<Problem, ProblemError> {
        let n = self.n;
        if n == 0 {
            return Err(ProblemError::Invalid { field: "n".into(), msg: "size must be positive".into() });
        }
        let mut basis = FactorBasis::default();
        for text in &self.factors {
            let f = parse_factor(text).map_err(|msg| ProblemError::Invalid { field: "factors".into(), msg })?;
            basis.push(f).map_err(|e| ProblemError::Invalid { field: "factors".into(), msg: e.to_string() })?;
        }
        let psi_grid = self.psi.as_ref().ok_or(ProblemError::Missing("psi"))?;
        let psi = WaveFunction::new(parse_grid("psi", psi_grid, n, &basis)?, self.convention)
            .map_err(|e| ProblemError::Invalid { field: "psi".into(), msg: e.to_string() })?;
        let left_op = match &self.left_op {
            Some(map) => Some(
                LeftOperator::new(n, parse_op("left_op", map, n, &basis)?)
                    .map_err(|e| ProblemError::Invalid { field: "left_op".into(), msg: e.to_string() })?,
            ),
            None => None,
        };
        let right_op = match &self.right_op {
            Some(map) => Some(
                RightOperator::new(n, parse_op("right_op", map, n, &basis)?)
                    .map_err(|e| ProblemError::Invalid { field: "right_op".into(), msg: e.to_string() })?,
            ),
            None => None,
        };
        let theta = self.theta.as_ref().map(|g| parse_poly_grid("theta", g, n, &basis, Var::X)).transpose()?;
        let f = self.f.as_ref().map(|g| parse_poly_grid("f", g, n, &basis, Var::Z)).transpose()?;
        Ok(Problem {
            description: self.description.clone(),
            n,
            basis,
            psi,
            left_op,
            right_op,
            theta,
            f,
            bounds: self.bounds.clone().unwrap_or_default(),
        })
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    ProblemDoc::from_json(text)?.resolve()
}

pub fn load_problem(path: impl AsRef<Path>) -> Result<Problem, ProblemError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
    parse_problem(&text)
}

/// Operator coefficients as grids keyed by order.
pub fn operator_grids(coeffs: &BTreeMap<usize, MatRF>) -> BTreeMap<String, Grid> {
    coeffs
        .iter()
        .map(|(k, m)| {
            let grid = (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect();
            (k.to_string(), grid)
        })
        .collect()
}

pub fn matrf_grid(m: &MatRF) -> Grid {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}
