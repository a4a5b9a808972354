//! Degree-bounded computation of eigenvalue algebras.
//!
//! For a fixed wavefunction the unknowns are the coefficients of the
//! eigenvalue polynomial and the numerator coefficients of an operator
//! ansatz with poles only at declared factors. Clearing denominators in
//! `ψB − θψ` (or `Lψ − ψF`) and equating every monomial coefficient to zero
//! gives a sparse linear system over ℚ(i). Eliminating the operator unknowns
//! first leaves the constraints on the eigenvalue coordinates alone, whose
//! nullspace is the slice.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::linalg::{nullspace_of, solve_affine, span_rref, Echelon, SparseVec};
use crate::exact::{BiPoly, Den, ExactError, Factor, FactorBasis, Gq, MatRF, Mono, RatFun, Var};
use crate::matpoly::MatPoly;
use crate::operators::{LeftOperator, RightOperator, WaveFunction};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("no stabilization within schedule ({0} steps); bounds too small")]
    NoStabilization(usize),
    #[error("not in algebra within bounds")]
    NotInAlgebra,
    #[error("degree must be nonnegative")]
    NegativeDegree,
    #[error("pole factor `{0}` is not in the operator variable")]
    PoleVariable(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Which equation of the triple is being solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// `ψB = θ(x)ψ`: eigenvalues in `x`, operator in `z`.
    #[serde(rename = "theta")]
    Theta,
    /// `Lψ = ψF(z)`: eigenvalues in `z`, operator in `x`.
    #[serde(rename = "f")]
    F,
}

impl Side {
    pub fn eigen_var(self) -> Var {
        match self {
            Side::Theta => Var::X,
            Side::F => Var::Z,
        }
    }

    pub fn op_var(self) -> Var {
        self.eigen_var().other()
    }
}

/// Size limits of the ansatz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnsatzBounds {
    /// Slice degree `d`: eigenvalue coordinates kept.
    pub eigen_deg: usize,
    /// Extra eigenvalue degrees solved for and projected away. With `0` the
    /// slice holds the algebra members of degree ≤ d; with enough lookahead
    /// it holds the truncations mod `v^(d+1)` of all members.
    pub lookahead: usize,
    pub op_order: usize,
    /// Maximal pole order per factor of the operator variable.
    pub pole_orders: BTreeMap<Factor, u32>,
    /// Degree of the polynomial part of each operator coefficient: numerators
    /// have degree ≤ `num_deg + deg(denominator)`, so every bound only ever
    /// enlarges the ansatz.
    pub num_deg: usize,
}

impl AnsatzBounds {
    pub fn solved_degree(&self) -> usize {
        self.eigen_deg + self.lookahead
    }

    /// Degree of the common operator denominator.
    pub fn pole_degree(&self) -> usize {
        self.pole_orders.iter().map(|(f, &k)| f.poly().degree().unwrap_or(0) * k as usize).sum()
    }

    pub fn numerator_degree(&self) -> usize {
        self.num_deg + self.pole_degree()
    }
}

impl fmt::Display for AnsatzBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poles: Vec<String> = self.pole_orders.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        write!(
            f,
            "d={} lookahead={} m={} q={} poles={{{}}}",
            self.eigen_deg,
            self.lookahead,
            self.op_order,
            self.num_deg,
            poles.join(",")
        )
    }
}

/// The sparse system plus its column layout:
/// `[operator unknowns | eigen degrees d+1..=D | eigen degrees 0..=d]`.
#[derive(Debug, Clone)]
pub struct AnsatzSystem {
    pub side: Side,
    pub n: usize,
    pub bounds: AnsatzBounds,
    pub rows: Vec<SparseVec>,
    pub n_op: usize,
    pub n_tail: usize,
    pub n_keep: usize,
    /// Common denominator of the operator coefficients.
    pub op_den: Den,
}

impl AnsatzSystem {
    pub fn ncols(&self) -> usize {
        self.n_op + self.n_tail + self.n_keep
    }

    fn keep_offset(&self) -> usize {
        self.n_op + self.n_tail
    }

    /// Column of eigen coefficient `(degree, row, col)`.
    pub fn eigen_col(&self, k: usize, a: usize, b: usize) -> usize {
        let nn = self.n * self.n;
        let d = self.bounds.eigen_deg;
        if k <= d {
            self.keep_offset() + k * nn + a * self.n + b
        } else {
            self.n_op + (k - d - 1) * nn + a * self.n + b
        }
    }

    /// Column of operator numerator coefficient `(order, power, row, col)`.
    pub fn op_col(&self, j: usize, k: usize, a: usize, b: usize) -> usize {
        let nn = self.n * self.n;
        ((j * (self.bounds.numerator_degree() + 1) + k) * nn) + a * self.n + b
    }
}

/// Builds the linear system whose solutions are the pairs
/// (eigenvalue, operator) within `bounds`.
pub fn build_system(psi: &WaveFunction, side: Side, bounds: &AnsatzBounds) -> Result<AnsatzSystem, SolverError> {
    let n = psi.n();
    let nn = n * n;
    let op_var = side.op_var();
    for f in bounds.pole_orders.keys() {
        if f.var() != op_var {
            return Err(SolverError::PoleVariable(f.to_string()));
        }
    }
    let m = bounds.op_order;
    let q = bounds.numerator_degree();
    let big_d = bounds.solved_degree();
    let shifted = match side {
        Side::Theta => psi.shifted_z_derivatives(m),
        Side::F => psi.shifted_x_derivatives(m),
    };
    let den = RatFun::lcm_den(shifted.iter().flat_map(|mat| mat.entries().iter()));
    let clear = |mat: &MatRF| -> Vec<BiPoly> {
        mat.entries().iter().map(|e| e.clear_into(&den).expect("lcm denominator")).collect()
    };
    let cleared: Vec<Vec<BiPoly>> = shifted.iter().map(clear).collect();
    let op_den: Den = bounds.pole_orders.iter().filter(|(_, &k)| k > 0).map(|(f, &k)| (f.clone(), k)).collect();
    let p = RatFun::new(BiPoly::one(), op_den.clone()).den_expanded();

    let n_op = (m + 1) * (q + 1) * nn;
    let n_tail = big_d.saturating_sub(bounds.eigen_deg) * nn;
    let n_keep = (bounds.eigen_deg + 1) * nn;
    let mut sys = AnsatzSystem {
        side,
        n,
        bounds: bounds.clone(),
        rows: Vec::new(),
        n_op,
        n_tail,
        n_keep,
        op_den,
    };

    // equation key (entry row, entry col, monomial) -> row index
    let mut index: HashMap<(usize, usize, Mono), usize> = HashMap::new();
    let mut rows: Vec<Vec<(usize, Gq)>> = Vec::new();
    let mut push = |r: usize, c: usize, poly: &BiPoly, shift: Mono, col: usize, sign: bool| {
        for (mono, coeff) in poly.terms() {
            let key = (r, c, (mono.0 + shift.0, mono.1 + shift.1));
            let row = *index.entry(key).or_insert_with(|| {
                rows.push(Vec::new());
                rows.len() - 1
            });
            rows[row].push((col, if sign { -coeff } else { coeff.clone() }));
        }
    };
    let op_shift = |k: usize| -> Mono {
        match op_var {
            Var::X => (k as u32, 0),
            Var::Z => (0, k as u32),
        }
    };
    let eig_shift = |k: usize| -> Mono {
        match side.eigen_var() {
            Var::X => (k as u32, 0),
            Var::Z => (0, k as u32),
        }
    };
    let q0p: Vec<BiPoly> = cleared[0].iter().map(|e| e.mul(&p)).collect();

    for a in 0..n {
        for b in 0..n {
            for (j, qj) in cleared.iter().enumerate() {
                for k in 0..=q {
                    let col = sys.op_col(j, k, a, b);
                    for r in 0..n {
                        match side {
                            // M_j · E_ab: column a of M_j lands in column b
                            Side::Theta => push(r, b, &qj[r * n + a], op_shift(k), col, false),
                            // E_ab · N_i: row b of N_i lands in row a
                            Side::F => push(a, r, &qj[b * n + r], op_shift(k), col, false),
                        }
                    }
                }
            }
            for k in 0..=big_d {
                let col = sys.eigen_col(k, a, b);
                for r in 0..n {
                    match side {
                        // −E_ab · M · P
                        Side::Theta => push(a, r, &q0p[b * n + r], eig_shift(k), col, true),
                        // −M · E_ab · P
                        Side::F => push(r, b, &q0p[r * n + a], eig_shift(k), col, true),
                    }
                }
            }
        }
    }
    sys.rows = rows.into_iter().map(SparseVec::from_pairs).filter(|r| !r.is_zero()).collect();
    Ok(sys)
}

/// Canonical echelon basis of a degree-bounded slice of an eigenvalue
/// algebra. Coordinates are ordered by (degree, row, column).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraSlice {
    pub var: Var,
    pub n: usize,
    pub degree: usize,
    basis: Vec<SparseVec>,
}

impl AlgebraSlice {
    /// Echelonizes an arbitrary spanning set.
    pub fn from_spanning(var: Var, n: usize, degree: usize, span: impl IntoIterator<Item = SparseVec>) -> Self {
        let ncols = (degree + 1) * n * n;
        Self { var, n, degree, basis: span_rref(span, ncols) }
    }

    pub fn from_polys<'a>(var: Var, n: usize, degree: usize, polys: impl IntoIterator<Item = &'a MatPoly>) -> Self {
        Self::from_spanning(var, n, degree, polys.into_iter().map(|p| p.coords(degree)))
    }

    pub fn ncols(&self) -> usize {
        (self.degree + 1) * self.n * self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_coords(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn basis(&self) -> Vec<MatPoly> {
        self.basis.iter().map(|v| MatPoly::from_coords(self.var, self.n, v)).collect()
    }

    fn echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.ncols());
        for v in &self.basis {
            e.insert(v.clone());
        }
        e
    }

    /// Membership of `p` truncated at the slice degree.
    pub fn contains(&self, p: &MatPoly) -> bool {
        p.n() == self.n && (p.var() == self.var || p.is_zero()) && self.echelon().contains(&p.coords(self.degree))
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        let e = other.echelon();
        self.degree == other.degree && self.basis.iter().all(|v| e.contains(v))
    }

    /// Slice of the same space truncated at a lower degree.
    pub fn truncate(&self, degree: usize) -> Self {
        let hi = (degree + 1) * self.n * self.n;
        Self::from_spanning(self.var, self.n, degree, self.basis.iter().map(|v| v.window(0, hi)))
    }

    /// Dimensions of the truncations at degrees `0..=degree`.
    pub fn dimension_profile(&self) -> Vec<usize> {
        (0..=self.degree).map(|k| self.truncate(k).dim()).collect()
    }

    /// Canonical textual form: one expression grid per basis element.
    pub fn serialize(&self) -> SliceDoc {
        SliceDoc {
            variable: self.var,
            n: self.n,
            degree: self.degree,
            dimension: self.dim(),
            basis: self.basis().iter().map(MatPoly::to_grid).collect(),
        }
    }

    /// Inverse of [`AlgebraSlice::serialize`]; the basis is re-echelonized and
    /// must have the recorded dimension.
    pub fn from_doc(doc: &SliceDoc) -> Result<Self, String> {
        let polys = doc.basis.iter().map(|g| MatPoly::from_grid(doc.variable, g)).collect::<Result<Vec<_>, _>>()?;
        if let Some(p) = polys.iter().find(|p| p.n() != doc.n || p.degree().unwrap_or(0) > doc.degree) {
            return Err(format!("basis element outside M_{}[{}] of degree ≤ {}: {p}", doc.n, doc.variable, doc.degree));
        }
        let slice = Self::from_polys(doc.variable, doc.n, doc.degree, &polys);
        if slice.dim() != doc.dimension {
            return Err(format!("dimension {} recorded, {} found", doc.dimension, slice.dim()));
        }
        Ok(slice)
    }

    pub fn identity_member(&self) -> bool {
        self.contains(&MatPoly::identity(self.var, self.n))
    }
}

/// Serialized slice, as embedded in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDoc {
    pub variable: Var,
    pub n: usize,
    pub degree: usize,
    pub dimension: usize,
    pub basis: Vec<Vec<Vec<String>>>,
}

/// Bookkeeping of one solve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub bounds: String,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Dimension of all (eigenvalue, operator) pairs.
    pub joint_dim: usize,
    /// Dimension of the projected eigenvalue slice.
    pub projected_dim: usize,
}

fn solve_projection(sys: &AnsatzSystem) -> (Echelon, Vec<SparseVec>) {
    let mut e = Echelon::new(sys.ncols());
    for r in &sys.rows {
        e.insert(r.clone());
    }
    let off = sys.keep_offset();
    let mut constraints = Echelon::new(sys.n_keep);
    for c in e.pivot_cols().filter(|&c| c >= off).collect::<Vec<_>>() {
        constraints.insert(e.pivot_row(c).unwrap().window(off, sys.ncols()));
    }
    let ns = nullspace_of(&constraints);
    (e, ns)
}

/// Slice of the eigenvalue algebra within `bounds`, with solve statistics.
pub fn eigen_slice(psi: &WaveFunction, side: Side, bounds: &AnsatzBounds) -> Result<(AlgebraSlice, SolveStats), SolverError> {
    let sys = build_system(psi, side, bounds)?;
    let (e, ns) = solve_projection(&sys);
    let slice = AlgebraSlice { var: side.eigen_var(), n: sys.n, degree: bounds.eigen_deg, basis: ns };
    let stats = SolveStats {
        bounds: bounds.to_string(),
        unknowns: sys.ncols(),
        equations: sys.rows.len(),
        rank: e.rank(),
        joint_dim: sys.ncols() - e.rank(),
        projected_dim: slice.dim(),
    };
    Ok((slice, stats))
}

pub fn theta_slice(psi: &WaveFunction, bounds: &AnsatzBounds) -> Result<AlgebraSlice, SolverError> {
    Ok(eigen_slice(psi, Side::Theta, bounds)?.0)
}

pub fn f_slice(psi: &WaveFunction, bounds: &AnsatzBounds) -> Result<AlgebraSlice, SolverError> {
    Ok(eigen_slice(psi, Side::F, bounds)?.0)
}

/// One rung of a stabilization schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleStep {
    pub op_order: usize,
    pub pole_orders: BTreeMap<Factor, u32>,
    pub num_deg: usize,
}

/// How far past the slice degree eigenvalues are solved for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceMode {
    /// Members of degree ≤ d (no lookahead).
    #[serde(rename = "members")]
    Members,
    /// Truncations mod `v^(d+1)`: eigenvalues are solved up to degree
    /// `max(d, m)` for operator order `m`, the largest degree such an
    /// operator can produce.
    #[serde(rename = "truncations")]
    Truncations,
}

impl SliceMode {
    fn lookahead(self, d: usize, m: usize) -> usize {
        match self {
            SliceMode::Members => 0,
            SliceMode::Truncations => m.saturating_sub(d),
        }
    }
}

/// `m ∈ {d+shift, …, d+shift+3}`, pole order `m` at every factor, `q = m + d`.
pub fn default_schedule(d: usize, factors: &[Factor], shift: usize) -> Vec<ScheduleStep> {
    (d + shift..=d + shift + 3)
        .map(|m| ScheduleStep {
            op_order: m,
            pole_orders: factors.iter().map(|f| (f.clone(), m as u32)).collect(),
            num_deg: m + d,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub steps: Vec<SolveStats>,
    /// Index of the schedule step whose slice repeated the previous one.
    pub stabilized_at: usize,
}

/// Runs the solver along `schedule` and returns the first slice that is
/// identical for two consecutive steps.
pub fn stabilize(
    psi: &WaveFunction,
    side: Side,
    d: usize,
    mode: SliceMode,
    schedule: &[ScheduleStep],
) -> Result<(AlgebraSlice, ConvergenceReport), SolverError> {
    let mut steps = Vec::new();
    let mut prev: Option<AlgebraSlice> = None;
    for (idx, step) in schedule.iter().enumerate() {
        let bounds = AnsatzBounds {
            eigen_deg: d,
            lookahead: mode.lookahead(d, step.op_order),
            op_order: step.op_order,
            pole_orders: step.pole_orders.clone(),
            num_deg: step.num_deg,
        };
        let (slice, stats) = eigen_slice(psi, side, &bounds)?;
        steps.push(stats);
        if prev.as_ref() == Some(&slice) {
            return Ok((slice, ConvergenceReport { steps, stabilized_at: idx }));
        }
        prev = Some(slice);
    }
    Err(SolverError::NoStabilization(schedule.len()))
}

/// [`stabilize`] with the default schedule, poles allowed at every declared
/// factor of the operator variable.
pub fn stabilize_default(
    psi: &WaveFunction,
    side: Side,
    d: usize,
    mode: SliceMode,
    basis: &FactorBasis,
) -> Result<(AlgebraSlice, ConvergenceReport), SolverError> {
    let factors: Vec<Factor> = basis.of_var(side.op_var()).cloned().collect();
    stabilize(psi, side, d, mode, &default_schedule(d, &factors, 0))
}

/// Products of slice members stay in the algebra: the products of the
/// degree-≤d members must lie in the degree-2d slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureVerdict {
    pub holds: bool,
    pub checked_products: usize,
    pub violators: Vec<(usize, usize)>,
}

pub fn closure_check(members: &AlgebraSlice, double: &AlgebraSlice) -> Result<ClosureVerdict, SolverError> {
    let basis = members.basis();
    let mut violators = Vec::new();
    let mut count = 0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            count += 1;
            if !double.contains(&a.mul(b)?) {
                violators.push((i, j));
            }
        }
    }
    Ok(ClosureVerdict { holds: violators.is_empty(), checked_products: count, violators })
}

/// Pipeline form of [`closure_check`]: stabilized member slice at `d` and
/// truncation slice at `2d`.
pub fn closure_check_default(psi: &WaveFunction, side: Side, d: usize, basis: &FactorBasis) -> Result<ClosureVerdict, SolverError> {
    let (members, _) = stabilize_default(psi, side, d, SliceMode::Members, basis)?;
    let (double, _) = stabilize_default(psi, side, 2 * d, SliceMode::Truncations, basis)?;
    closure_check(&members, &double)
}

/// Operator numerators from a solution vector.
fn op_from_solution(sys: &AnsatzSystem, sol: &[Gq]) -> BTreeMap<usize, MatRF> {
    let n = sys.n;
    let var = sys.side.op_var();
    let mut map = BTreeMap::new();
    for j in 0..=sys.bounds.op_order {
        let mut mat = MatRF::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut num = BiPoly::zero();
                for k in 0..=sys.bounds.numerator_degree() {
                    let c = &sol[sys.op_col(j, k, a, b)];
                    let mono = if var == Var::X { (k as u32, 0) } else { (0, k as u32) };
                    num.add_term(mono, c.clone());
                }
                mat.set(a, b, RatFun::new(num, sys.op_den.clone()));
            }
        }
        if !mat.is_zero() {
            map.insert(j, mat);
        }
    }
    map
}

fn solve_for_operator(psi: &WaveFunction, side: Side, eigen: &MatPoly, bounds: &AnsatzBounds) -> Result<BTreeMap<usize, MatRF>, SolverError> {
    if eigen.var() != side.eigen_var() && !eigen.is_zero() {
        return Err(SolverError::Exact(ExactError::Shape(format!("eigenvalue must be a polynomial in {}", side.eigen_var()))));
    }
    let deg = eigen.degree().unwrap_or(0);
    let b = AnsatzBounds { eigen_deg: deg, lookahead: 0, ..bounds.clone() };
    let sys = build_system(psi, side, &b)?;
    // move the fixed eigenvalue columns to the right-hand side
    let fixed: HashMap<usize, Gq> = (0..=deg)
        .flat_map(|k| {
            let c = eigen.coeff(k);
            (0..sys.n).flat_map(move |a| (0..sys.n).map(move |bb| (k, a, bb))).map(move |(k, a, bb)| (k, a, bb, c.get(a, bb).clone()))
        })
        .filter(|(_, _, _, v)| !v.is_zero())
        .map(|(k, a, bb, v)| (sys.eigen_col(k, a, bb), v))
        .collect();
    let mut rows = Vec::with_capacity(sys.rows.len());
    let mut rhs = Vec::with_capacity(sys.rows.len());
    for r in &sys.rows {
        let mut b = Gq::zero();
        let mut kept = Vec::new();
        for (c, v) in &r.0 {
            if *c < sys.n_op {
                kept.push((*c, v.clone()));
            } else if let Some(t) = fixed.get(c) {
                b -= &(v * t);
            }
        }
        rows.push(SparseVec(kept));
        rhs.push(b);
    }
    let sol = solve_affine(&rows, &rhs, sys.n_op).ok_or(SolverError::NotInAlgebra)?;
    let mut full = sol;
    full.resize(sys.ncols(), Gq::zero());
    Ok(op_from_solution(&sys, &full))
}

/// A right operator `B` with `ψB = θψ`: the echelon-canonical solution of
/// the affine system (free unknowns zero).
pub fn witness_operator(psi: &WaveFunction, theta: &MatPoly, bounds: &AnsatzBounds) -> Result<RightOperator, SolverError> {
    let map = solve_for_operator(psi, Side::Theta, theta, bounds)?;
    Ok(RightOperator::new(psi.n(), map).expect("z-only coefficients"))
}

/// A left operator `L` with `Lψ = ψF`.
pub fn witness_left_operator(psi: &WaveFunction, f: &MatPoly, bounds: &AnsatzBounds) -> Result<LeftOperator, SolverError> {
    let map = solve_for_operator(psi, Side::F, f, bounds)?;
    Ok(LeftOperator::new(psi.n(), map).expect("x-only coefficients"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{check_right_eigen, Convention};

    fn bounds(d: usize, m: usize) -> AnsatzBounds {
        AnsatzBounds { eigen_deg: d, lookahead: 0, op_order: m, pole_orders: BTreeMap::new(), num_deg: 0 }
    }

    #[test]
    fn exponential_self_duality() {
        let psi = WaveFunction::exponential(1, Convention::One);
        let slice = theta_slice(&psi, &bounds(1, 1)).unwrap();
        assert_eq!(slice.dim(), 2);
        assert!(slice.contains(&MatPoly::identity(Var::X, 1)));
        assert!(slice.contains(&MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 1)));
        let b = witness_operator(&psi, &MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 1), &bounds(1, 1)).unwrap();
        assert_eq!(b, RightOperator::derivative(1, 1));
    }

    #[test]
    fn identity_has_identity_witness() {
        let psi = WaveFunction::exponential(2, Convention::One);
        let b = witness_operator(&psi, &MatPoly::identity(Var::X, 2), &bounds(0, 2)).unwrap();
        assert_eq!(b, RightOperator::identity(2));
    }

    #[test]
    fn full_matrix_ring_for_trivial_wavefunction() {
        let psi = WaveFunction::exponential(2, Convention::One);
        let slice = theta_slice(&psi, &bounds(2, 2)).unwrap();
        assert_eq!(slice.dim(), 12);
        let theta = MatPoly::monomial(Var::X, crate::matpoly::ConstMat::unit(2, 0, 1), 2);
        let b = witness_operator(&psi, &theta, &bounds(2, 2)).unwrap();
        assert!(check_right_eigen(&psi, &b, &theta).unwrap().holds);
    }

    #[test]
    fn inconsistent_witness() {
        let psi = WaveFunction::exponential(1, Convention::One);
        let theta = MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 2);
        assert_eq!(witness_operator(&psi, &theta, &bounds(2, 1)), Err(SolverError::NotInAlgebra));
    }
}
