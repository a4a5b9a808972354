//! Catalog of the three worked examples and the affine-constraint
//! descriptions of their eigenvalue algebras.
//!
//! A description lists, per coefficient degree, the matrix entries that are
//! determined by lower-degree entries. In the constraint text `rK_IJ` is the
//! entry in row `I`, column `J` of the coefficient of degree `K`; every entry
//! not on a left-hand side is a free parameter, and every entry of degree at
//! least the threshold is free.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::exact::linalg::{nullspace_sparse, SparseVec};
use crate::exact::{Gq, Var};
use crate::expr::{parse_problem, Problem, ProblemDoc};
use crate::matpoly::{ConstMat, MatPoly};
use crate::solver::{stabilize_default, AlgebraSlice, ConvergenceReport, Side, SliceMode, SolverError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoremError {
    #[error("unknown example `{0}` (expected ex1, ex2 or ex3)")]
    UnknownExample(String),
    #[error("size mismatch: expected {expected}x{expected}, got {got}x{got}")]
    Size { expected: usize, got: usize },
    #[error("matrix polynomial must be in {0}")]
    Variable(Var),
    #[error("solver did not stabilize: {0}")]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ExampleId {
    #[serde(rename = "ex1")]
    Ex1,
    #[serde(rename = "ex2")]
    Ex2,
    #[serde(rename = "ex3")]
    Ex3,
}

impl ExampleId {
    pub const ALL: [ExampleId; 3] = [ExampleId::Ex1, ExampleId::Ex2, ExampleId::Ex3];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex3 => "ex3",
        }
    }

    /// Bundled problem document.
    pub fn problem_json(self) -> &'static str {
        match self {
            ExampleId::Ex1 => include_str!("../examples/example1.json"),
            ExampleId::Ex2 => include_str!("../examples/example2.json"),
            ExampleId::Ex3 => include_str!("../examples/example3.json"),
        }
    }

    pub fn problem_doc(self) -> ProblemDoc {
        ProblemDoc::from_json(self.problem_json()).expect("bundled problem is well formed")
    }

    pub fn problem(self) -> Problem {
        parse_problem(self.problem_json()).expect("bundled problem is well formed")
    }

    /// Which eigenvalue algebra the description characterizes.
    pub fn side(self) -> Side {
        match self {
            ExampleId::Ex1 | ExampleId::Ex2 => Side::Theta,
            ExampleId::Ex3 => Side::F,
        }
    }

    pub fn n(self) -> usize {
        match self {
            ExampleId::Ex2 => 3,
            _ => 2,
        }
    }

    /// Degree used by the headline validation run.
    pub fn default_degree(self) -> usize {
        match self {
            ExampleId::Ex1 => 4,
            ExampleId::Ex2 => 5,
            ExampleId::Ex3 => 3,
        }
    }

    pub fn gamma(self) -> Gamma {
        match self {
            ExampleId::Ex1 => Gamma::parse(self, 4, GAMMA_EX1),
            ExampleId::Ex2 => Gamma::parse(self, 6, GAMMA_EX2),
            ExampleId::Ex3 => Gamma::parse(self, 3, GAMMA_EX3),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = TheoremError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ex1" => Ok(ExampleId::Ex1),
            "ex2" => Ok(ExampleId::Ex2),
            "ex3" => Ok(ExampleId::Ex3),
            other => Err(TheoremError::UnknownExample(other.to_string())),
        }
    }
}

const GAMMA_EX1: &[&str] = &[
    "r0_21 = 0",
    "r0_22 = r0_11",
    "r1_21 = 0",
    "r1_22 = r1_11",
    "r2_21 = r1_11",
    "r3_21 = r2_22 + r2_11 - r1_12",
];

const GAMMA_EX2: &[&str] = &[
    "r0_21 = 0",
    "r0_31 = 0",
    "r0_32 = 0",
    "r0_33 = r0_11",
    "r1_21 = r0_22 - r0_11",
    "r1_31 = 0",
    "r1_32 = r0_22 - r0_11",
    "r1_33 = r1_11 + r0_23 - r0_12",
    "r2_21 = r1_22 - r1_11 - r0_23 + r0_12",
    "r2_31 = r0_22 - r0_11",
    "r2_32 = r1_22 - r1_11",
    "r2_33 = r2_11 + r1_23 - r1_12",
    "r3_31 = r1_22 - 2 r1_11 - r0_23 + r0_12",
    "r4_31 = r3_32 + r3_21 - r2_22 - r2_11 + r1_12",
    "r4_32 = r4_22",
    "r5_31 = r4_32 + r4_21 - r3_33 - r3_22 - r3_11 + r2_23 + r2_12 - r1_13",
];

/// The degree-2 coefficient carries an overall factor 1/2.
const GAMMA_EX3: &[&str] = &[
    "r0_12 = 0",
    "r0_21 = r0_22 - r0_11",
    "r1_12 = r1_11",
    "r1_21 = r0_11 - r0_22 - r1_11",
    "r1_22 = -r1_11",
    "r2_11 = 1/2 r0_11 - 1/2 r0_22 - 1/2 r1_11",
    "r2_12 = 1/2 r1_11 + 1/2 r0_11 - 1/2 r0_22",
];

/// Matrix-coefficient position `(degree, row, col)`, 0-based.
pub type Coord = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub target: Coord,
    pub terms: Vec<(Gq, Coord)>,
    pub text: String,
}

fn parse_coord(tok: &str) -> Option<Coord> {
    let (k, ij) = tok.strip_prefix('r')?.split_once('_')?;
    let k = k.parse().ok()?;
    let digits: Vec<usize> = ij.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?;
    match digits[..] {
        [i, j] if i >= 1 && j >= 1 => Some((k, i - 1, j - 1)),
        _ => None,
    }
}

impl Constraint {
    /// Parses `rK_IJ = [c] rK_IJ {± [c] rK_IJ}` or `rK_IJ = 0`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let (lhs, rhs) = text.split_once('=').ok_or_else(|| format!("no `=` in `{text}`"))?;
        let target = parse_coord(lhs.trim()).ok_or_else(|| format!("bad target in `{text}`"))?;
        let mut terms = Vec::new();
        let spaced = rhs.replace('-', " - ").replace('+', " + ");
        let mut sign = Gq::one();
        let mut coeff: Option<Gq> = None;
        for tok in spaced.split_whitespace() {
            match tok {
                "+" => sign = Gq::one(),
                "-" => sign = -Gq::one(),
                "0" if coeff.is_none() && terms.is_empty() => {}
                t if t.starts_with('r') => {
                    let c = parse_coord(t).ok_or_else(|| format!("bad term `{t}` in `{text}`"))?;
                    if c.0 > target.0 {
                        return Err(format!("forward reference in `{text}`"));
                    }
                    let v = &sign * &coeff.take().unwrap_or_else(Gq::one);
                    terms.push((v, c));
                    sign = Gq::one();
                }
                t => {
                    let (p, q) = t.split_once('/').unwrap_or((t, "1"));
                    let num: BigInt = p.parse().map_err(|_| format!("bad coefficient `{t}`"))?;
                    let den: BigInt = q.parse().map_err(|_| format!("bad coefficient `{t}`"))?;
                    coeff = Some(Gq::from_real(BigRational::new(num, den)));
                }
            }
        }
        Ok(Self { target, terms, text: text.to_string() })
    }

    /// `(Σ c·entry(ref), entry(target))` at `p`.
    pub fn defect(&self, p: &MatPoly) -> (Gq, Gq) {
        let get = |(k, i, j): Coord| p.coeff(k).get(i, j).clone();
        let mut expected = Gq::zero();
        for (c, r) in &self.terms {
            expected += &(c * &get(*r));
        }
        (expected, get(self.target))
    }
}

/// An affine-constraint description of an algebra of matrix polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gamma {
    pub id: ExampleId,
    pub n: usize,
    pub var: Var,
    /// All entries of degree ≥ threshold are free.
    pub threshold: usize,
    pub constraints: Vec<Constraint>,
}

impl Gamma {
    fn parse(id: ExampleId, threshold: usize, lines: &[&str]) -> Self {
        Self {
            id,
            n: id.n(),
            var: id.side().eigen_var(),
            threshold,
            constraints: lines.iter().map(|l| Constraint::parse(l).expect("catalog constraint")).collect(),
        }
    }

    /// The same description with the constraint on `target` dropped.
    pub fn relaxed(&self, target: Coord) -> Self {
        let mut g = self.clone();
        g.constraints.retain(|c| c.target != target);
        g
    }

    fn coord_index(&self, (k, i, j): Coord) -> usize {
        k * self.n * self.n + i * self.n + j
    }

    /// Parameters introduced at each degree `0..=d`.
    pub fn free_counts(&self, d: usize) -> Vec<usize> {
        (0..=d)
            .map(|k| self.n * self.n - self.constraints.iter().filter(|c| c.target.0 == k).count())
            .collect()
    }

    /// Echelon basis of all members truncated at degree `d`.
    pub fn slice(&self, d: usize) -> AlgebraSlice {
        let ncols = (d + 1) * self.n * self.n;
        let rows = self.constraints.iter().filter(|c| c.target.0 <= d).map(|c| {
            let mut pairs = vec![(self.coord_index(c.target), Gq::one())];
            for (v, r) in &c.terms {
                pairs.push((self.coord_index(*r), -v));
            }
            SparseVec::from_pairs(pairs)
        });
        let ns = nullspace_sparse(rows, ncols);
        AlgebraSlice::from_spanning(self.var, self.n, d, ns)
    }

    /// Free parameters (entries not determined by a constraint) of degree
    /// ≤ `d`, in coordinate order.
    pub fn parameters(&self, d: usize) -> Vec<Coord> {
        let mut out = Vec::new();
        for k in 0..=d {
            for i in 0..self.n {
                for j in 0..self.n {
                    if !self.constraints.iter().any(|c| c.target == (k, i, j)) {
                        out.push((k, i, j));
                    }
                }
            }
        }
        out
    }

    /// The member with the given parameter values, all other parameters
    /// zero; determined entries are filled in constraint order.
    pub fn member(&self, params: &[(Coord, Gq)]) -> MatPoly {
        let top = params.iter().map(|(c, _)| c.0).max().unwrap_or(0).max(self.threshold.saturating_sub(1));
        let mut coeffs = vec![ConstMat::zeros(self.n); top + 1];
        for ((k, i, j), v) in params {
            coeffs[*k].set(*i, *j, v.clone());
        }
        for c in &self.constraints {
            let mut v = Gq::zero();
            for (w, (k, i, j)) in &c.terms {
                v += &(w * coeffs[*k].get(*i, *j));
            }
            let (k, i, j) = c.target;
            coeffs[k].set(i, j, v);
        }
        MatPoly::new(self.var, self.n, coeffs)
    }

    pub fn membership(&self, p: &MatPoly) -> Result<Membership, TheoremError> {
        if p.n() != self.n {
            return Err(TheoremError::Size { expected: self.n, got: p.n() });
        }
        if p.var() != self.var && !p.is_zero() {
            return Err(TheoremError::Variable(self.var));
        }
        let mut violations = Vec::new();
        for c in &self.constraints {
            let (expected, actual) = c.defect(p);
            if expected != actual {
                violations.push(Violation {
                    degree: c.target.0,
                    row: c.target.1 + 1,
                    col: c.target.2 + 1,
                    constraint: c.text.clone(),
                    expected: expected.to_string(),
                    actual: actual.to_string(),
                });
            }
        }
        Ok(Membership { holds: violations.is_empty(), violations })
    }
}

/// A violated constraint; row and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub degree: usize,
    pub row: usize,
    pub col: usize,
    pub constraint: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub holds: bool,
    pub violations: Vec<Violation>,
}

pub fn gamma_membership(id: ExampleId, p: &MatPoly) -> Result<Membership, TheoremError> {
    id.gamma().membership(p)
}

pub fn gamma_slice(id: ExampleId, d: usize) -> AlgebraSlice {
    id.gamma().slice(d)
}

/// Outcome of comparing the solver slice with a description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub variant: String,
    pub equal: bool,
    /// Dimension of the description's slice at degrees `0..=d`.
    pub gamma_dims: Vec<usize>,
    /// First degree whose truncations differ.
    pub first_mismatch: Option<usize>,
    /// An element in exactly one of the two slices, as an expression grid.
    pub witness: Option<(String, Vec<Vec<String>>)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub id: ExampleId,
    pub degree: usize,
    pub side: Side,
    pub solver_dims: Vec<usize>,
    pub literal: Comparison,
    /// Present when the literal description differs from the solver slice
    /// and a relaxed reading exists.
    pub relaxed: Option<Comparison>,
    pub convergence: ConvergenceReport,
    pub seconds: f64,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.literal.equal || self.relaxed.as_ref().is_some_and(|c| c.equal)
    }
}

fn compare(variant: &str, solver: &AlgebraSlice, gamma: &Gamma) -> Comparison {
    let d = solver.degree;
    let g = gamma.slice(d);
    let gamma_dims = g.dimension_profile();
    let first_mismatch = (0..=d).find(|&k| solver.truncate(k) != g.truncate(k));
    let witness = if first_mismatch.is_none() {
        None
    } else if let Some(w) = solver.basis().into_iter().find(|p| !g.contains(p)) {
        Some(("in solver slice only".to_string(), w.to_grid()))
    } else {
        g.basis().into_iter().find(|p| !solver.contains(p)).map(|w| ("in description only".to_string(), w.to_grid()))
    };
    Comparison { variant: variant.into(), equal: first_mismatch.is_none(), gamma_dims, first_mismatch, witness }
}

/// Degree-4 entry (3,2) of the second description: the relaxed reading
/// treats it as a free parameter.
pub const EX2_RELAXED_ENTRY: Coord = (4, 2, 1);

/// Stabilizes the solver slice at degree `d` and compares every truncation
/// `0..=d` with the description.
pub fn validate_theorem(id: ExampleId, d: usize) -> Result<TheoremReport, TheoremError> {
    let start = Instant::now();
    let problem = id.problem();
    let (slice, convergence) = stabilize_default(&problem.psi, id.side(), d, SliceMode::Truncations, &problem.basis)?;
    let gamma = id.gamma();
    let literal = compare("literal", &slice, &gamma);
    let relaxed = (!literal.equal && id == ExampleId::Ex2)
        .then(|| compare("entry r4_32 free", &slice, &gamma.relaxed(EX2_RELAXED_ENTRY)));
    Ok(TheoremReport {
        id,
        degree: d,
        side: id.side(),
        solver_dims: slice.dimension_profile(),
        literal,
        relaxed,
        convergence,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(var: Var, n: usize, k: usize) -> MatPoly {
        MatPoly::scalar_monomial(var, n, Gq::one(), k)
    }

    #[test]
    fn constraint_parsing() {
        let c = Constraint::parse("r3_31 = r1_22 - 2 r1_11 - r0_23 + r0_12").unwrap();
        assert_eq!(c.target, (3, 2, 0));
        assert_eq!(c.terms.len(), 4);
        assert_eq!(c.terms[1], (Gq::from_int(-2), (1, 0, 0)));
        let c = Constraint::parse("r2_11 = 1/2 r0_11 - 1/2 r0_22").unwrap();
        assert_eq!(c.terms[1].0, "-1/2".parse().unwrap());
        assert!(Constraint::parse("r0_21 = 0").unwrap().terms.is_empty());
    }

    #[test]
    fn parameter_counts() {
        assert_eq!(ExampleId::Ex1.gamma().free_counts(5), vec![2, 2, 3, 3, 4, 4]);
        assert_eq!(ExampleId::Ex2.gamma().free_counts(5), vec![5, 5, 5, 8, 7, 8]);
        assert_eq!(ExampleId::Ex3.gamma().free_counts(3), vec![2, 1, 2, 4]);
    }

    #[test]
    fn slice_dimensions() {
        assert_eq!(gamma_slice(ExampleId::Ex1, 4).dim(), 14);
        assert_eq!(gamma_slice(ExampleId::Ex2, 1).dim(), 10);
        assert_eq!(gamma_slice(ExampleId::Ex3, 0).dim(), 2);
        assert_eq!(gamma_slice(ExampleId::Ex1, 5).dimension_profile(), vec![2, 4, 7, 10, 14, 18]);
    }

    #[test]
    fn membership_examples() {
        assert!(gamma_membership(ExampleId::Ex1, &scalar(Var::X, 2, 3)).unwrap().holds);
        let m = gamma_membership(ExampleId::Ex1, &scalar(Var::X, 2, 1)).unwrap();
        assert!(!m.holds);
        let v = &m.violations[0];
        assert_eq!((v.degree, v.row, v.col), (2, 2, 1));
        assert_eq!((v.expected.as_str(), v.actual.as_str()), ("1", "0"));
        let f = MatPoly::new(Var::Z, 2, vec![ConstMat::zeros(2), ConstMat::zeros(2), ConstMat::unit(2, 1, 1)]);
        assert!(gamma_membership(ExampleId::Ex3, &f).unwrap().holds);
        for id in ExampleId::ALL {
            let one = MatPoly::identity(id.side().eigen_var(), id.n());
            assert!(gamma_membership(id, &one).unwrap().holds);
            assert!(gamma_slice(id, 0).contains(&one));
        }
        assert!(matches!(
            gamma_membership(ExampleId::Ex2, &scalar(Var::X, 2, 0)),
            Err(TheoremError::Size { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn members_from_parameters() {
        let g = ExampleId::Ex1.gamma();
        assert_eq!(g.parameters(1), vec![(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1)]);
        // r1_11 = 1 forces the degree-1 diagonal and the degree-2 (2,1) entry
        let p = g.member(&[((1, 0, 0), Gq::one())]);
        let expected = MatPoly::new(
            Var::X,
            2,
            vec![ConstMat::zeros(2), ConstMat::identity(2), ConstMat::unit(2, 1, 0)],
        );
        assert_eq!(p, expected);
        for id in ExampleId::ALL {
            let g = id.gamma();
            for c in g.parameters(g.threshold) {
                let m = g.member(&[(c, Gq::one())]);
                assert!(g.membership(&m).unwrap().holds, "{id} {c:?}");
                assert!(g.slice(g.threshold).contains(&m));
            }
        }
    }

    #[test]
    fn slice_agrees_with_membership() {
        for id in ExampleId::ALL {
            let g = id.gamma();
            for p in g.slice(id.default_degree()).basis() {
                assert!(g.membership(&p).unwrap().holds, "{id}: {p}");
            }
        }
    }
}
