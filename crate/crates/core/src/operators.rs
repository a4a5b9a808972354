//! Matrix differential operators acting on quasi-exponential wavefunctions
//! `ψ = e^{s·xz} M(x, z)`, and exact checks of the bispectral equations
//!
//! ```text
//! L ψ = ψ F(z),        ψ B = θ(x) ψ.
//! ```
//!
//! `L = Σ a_i(x) ∂_x^i` acts from the left, `ψB = Σ ∂_z^j ψ · b_j(z)` from the
//! right. The exponential is never materialized: `∂_x` acts on `M` as
//! `s·z + ∂_x` and `∂_z` as `s·x + ∂_z`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exact::{ExactError, Gq, MatRF, RatFun, Var};
use crate::matpoly::MatPoly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OperatorError {
    #[error("size mismatch: {0}")]
    Size(String),
    #[error("coefficient of order {order} depends on {var}")]
    WrongVariable { order: usize, var: Var },
    #[error("wavefunction matrix must be nonzero and square")]
    BadWaveFunction,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// The `s` in `e^{s·xz}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Convention {
    #[default]
    #[serde(rename = "1")]
    One,
    #[serde(rename = "i")]
    I,
}

impl Convention {
    pub fn s(self) -> Gq {
        match self {
            Convention::One => Gq::one(),
            Convention::I => Gq::i(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Convention::One => "1",
            Convention::I => "i",
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e^({}xz)", if *self == Convention::One { "" } else { "i" })
    }
}

/// `ψ = e^{s·xz} · M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveFunction {
    mat: MatRF,
    convention: Convention,
}

impl WaveFunction {
    pub fn new(mat: MatRF, convention: Convention) -> Result<Self, OperatorError> {
        if !mat.is_square() || mat.is_zero() {
            return Err(OperatorError::BadWaveFunction);
        }
        Ok(Self { mat, convention })
    }

    /// The bare exponential `e^{s·xz} I`.
    pub fn exponential(n: usize, convention: Convention) -> Self {
        Self { mat: MatRF::identity(n), convention }
    }

    /// Result of an operator action; may be zero.
    fn raw(mat: MatRF, convention: Convention) -> Self {
        Self { mat, convention }
    }

    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &MatRF {
        &self.mat
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// `(s·z + ∂_x)^k M` for `k = 0..=order`.
    pub fn shifted_x_derivatives(&self, order: usize) -> Vec<MatRF> {
        shifted_powers(&self.mat, Var::X, self.convention.s(), order)
    }

    /// `(s·x + ∂_z)^k M` for `k = 0..=order`.
    pub fn shifted_z_derivatives(&self, order: usize) -> Vec<MatRF> {
        shifted_powers(&self.mat, Var::Z, self.convention.s(), order)
    }
}

/// Repeated application of `∂_v + s·(other variable)`.
pub(crate) fn shifted_powers(m: &MatRF, v: Var, s: Gq, order: usize) -> Vec<MatRF> {
    let mult = RatFun::var(v.other()).scale(&s);
    let mut out = Vec::with_capacity(order + 1);
    out.push(m.clone());
    for k in 1..=order {
        let prev = &out[k - 1];
        let next = prev.scale_rf(&mult).add(&prev.diff(v)).expect("same shape");
        out.push(next);
    }
    out
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

/// Shared storage: order → coefficient matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Coeffs {
    n: usize,
    map: BTreeMap<usize, MatRF>,
}

impl Coeffs {
    fn new(n: usize, map: BTreeMap<usize, MatRF>, forbidden: Var) -> Result<Self, OperatorError> {
        let mut clean = BTreeMap::new();
        for (order, c) in map {
            if c.rows() != n || c.cols() != n {
                return Err(OperatorError::Size(format!("order {order} coefficient is not {n}x{n}")));
            }
            if !c.is_free_of(forbidden) {
                return Err(OperatorError::WrongVariable { order, var: forbidden });
            }
            if !c.is_zero() {
                clean.insert(order, c);
            }
        }
        Ok(Self { n, map: clean })
    }

    fn order(&self) -> usize {
        self.map.keys().next_back().copied().unwrap_or(0)
    }

    fn add_into(map: &mut BTreeMap<usize, MatRF>, order: usize, c: MatRF) {
        let n = c.rows();
        let e = map.entry(order).or_insert_with(|| MatRF::zeros(n, n));
        *e = e.add(&c).expect("same shape");
    }
}

/// `L = Σ a_i(x) ∂_x^i`, coefficients independent of `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeftOperator(Coeffs);

impl LeftOperator {
    pub fn new(n: usize, coeffs: BTreeMap<usize, MatRF>) -> Result<Self, OperatorError> {
        Ok(Self(Coeffs::new(n, coeffs, Var::Z)?))
    }

    pub fn identity(n: usize) -> Self {
        Self(Coeffs { n, map: BTreeMap::from([(0, MatRF::identity(n))]) })
    }

    /// `∂_x^k`.
    pub fn derivative(n: usize, k: usize) -> Self {
        Self(Coeffs { n, map: BTreeMap::from([(k, MatRF::identity(n))]) })
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, MatRF> {
        &self.0.map
    }

    pub fn coeff(&self, order: usize) -> MatRF {
        self.0.map.get(&order).cloned().unwrap_or_else(|| MatRF::zeros(self.n(), self.n()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut map = self.0.map.clone();
        for (k, c) in &rhs.0.map {
            Coeffs::add_into(&mut map, *k, c.clone());
        }
        map.retain(|_, c| !c.is_zero());
        Self(Coeffs { n: self.n(), map })
    }

    /// `L1 ∘ L2` via `∂^i c = Σ_r C(i,r) (∂^r c) ∂^{i-r}`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut map = BTreeMap::new();
        for (&i, a) in &self.0.map {
            for (&k, c) in &rhs.0.map {
                let mut dc = c.clone();
                for r in 0..=i {
                    if r > 0 {
                        dc = dc.diff(Var::X);
                    }
                    if dc.is_zero() {
                        break;
                    }
                    let term = a.mul(&dc).expect("square").scale(&Gq::from_int(binomial(i, r)));
                    Coeffs::add_into(&mut map, i - r + k, term);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Self(Coeffs { n: self.n(), map })
    }
}

/// `ψB = Σ ∂_z^j ψ · b_j(z)`, coefficients independent of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightOperator(Coeffs);

impl RightOperator {
    pub fn new(n: usize, coeffs: BTreeMap<usize, MatRF>) -> Result<Self, OperatorError> {
        Ok(Self(Coeffs::new(n, coeffs, Var::X)?))
    }

    pub fn identity(n: usize) -> Self {
        Self(Coeffs { n, map: BTreeMap::from([(0, MatRF::identity(n))]) })
    }

    pub fn zero(n: usize) -> Self {
        Self(Coeffs { n, map: BTreeMap::new() })
    }

    /// `∂_z^k`.
    pub fn derivative(n: usize, k: usize) -> Self {
        Self(Coeffs { n, map: BTreeMap::from([(k, MatRF::identity(n))]) })
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn order(&self) -> usize {
        self.0.order()
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, MatRF> {
        &self.0.map
    }

    pub fn coeff(&self, order: usize) -> MatRF {
        self.0.map.get(&order).cloned().unwrap_or_else(|| MatRF::zeros(self.n(), self.n()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut map = self.0.map.clone();
        for (k, c) in &rhs.0.map {
            Coeffs::add_into(&mut map, *k, c.clone());
        }
        map.retain(|_, c| !c.is_zero());
        Self(Coeffs { n: self.n(), map })
    }

    pub fn scale(&self, c: &Gq) -> Self {
        let map = self.0.map.iter().map(|(k, m)| (*k, m.scale(c))).filter(|(_, m)| !m.is_zero()).collect();
        Self(Coeffs { n: self.n(), map })
    }

    /// The operator `B1 B2` with `ψ(B1 B2) = (ψ B1) B2`:
    /// `∂^k(∂^j ψ · b) c = Σ_r C(k,r) ∂^{j+k-r} ψ · (∂^r b) c`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut map = BTreeMap::new();
        for (&j, b) in &self.0.map {
            for (&k, c) in &rhs.0.map {
                let mut db = b.clone();
                for r in 0..=k {
                    if r > 0 {
                        db = db.diff(Var::Z);
                    }
                    if db.is_zero() {
                        break;
                    }
                    let term = db.mul(c).expect("square").scale(&Gq::from_int(binomial(k, r)));
                    Coeffs::add_into(&mut map, j + k - r, term);
                }
            }
        }
        map.retain(|_, c| !c.is_zero());
        Self(Coeffs { n: self.n(), map })
    }
}

fn check_size(what: &str, a: usize, b: usize) -> Result<(), OperatorError> {
    if a != b {
        return Err(OperatorError::Size(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

/// `e^{-sxz} L ψ = Σ a_i (s·z + ∂_x)^i M`.
pub fn apply_left(l: &LeftOperator, psi: &WaveFunction) -> Result<WaveFunction, OperatorError> {
    check_size("operator vs wavefunction", l.n(), psi.n())?;
    let shifted = psi.shifted_x_derivatives(l.order());
    let n = psi.n();
    let mut acc = MatRF::zeros(n, n);
    for (&i, a) in l.coeffs() {
        acc = acc.add(&a.mul(&shifted[i])?)?;
    }
    Ok(WaveFunction::raw(acc, psi.convention()))
}

/// `e^{-sxz} ψ B = Σ (s·x + ∂_z)^j M · b_j`.
pub fn apply_right(psi: &WaveFunction, b: &RightOperator) -> Result<WaveFunction, OperatorError> {
    check_size("operator vs wavefunction", b.n(), psi.n())?;
    let shifted = psi.shifted_z_derivatives(b.order());
    let n = psi.n();
    let mut acc = MatRF::zeros(n, n);
    for (&j, c) in b.coeffs() {
        acc = acc.add(&shifted[j].mul(c)?)?;
    }
    Ok(WaveFunction::raw(acc, psi.convention()))
}

/// Outcome of an eigen-equation check. On failure the witness is the first
/// nonzero residual entry, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<(usize, usize, RatFun)>,
    pub residual: MatRF,
}

impl Verdict {
    fn from_residual(residual: MatRF) -> Self {
        let witness = residual.first_nonzero().map(|(i, j, e)| (i + 1, j + 1, e.clone()));
        Self { holds: witness.is_none(), witness, residual }
    }
}

/// `Lψ − ψF(z)`.
pub fn check_left_eigen(l: &LeftOperator, psi: &WaveFunction, f: &MatPoly) -> Result<Verdict, OperatorError> {
    check_size("eigenvalue vs wavefunction", f.n(), psi.n())?;
    if f.var() != Var::Z && !f.is_zero() {
        return Err(OperatorError::WrongVariable { order: 0, var: f.var() });
    }
    let lhs = apply_left(l, psi)?;
    let rhs = psi.mat().mul(&f.to_matrf())?;
    Ok(Verdict::from_residual(lhs.mat().sub(&rhs)?))
}

/// `ψB − θ(x)ψ`.
pub fn check_right_eigen(psi: &WaveFunction, b: &RightOperator, theta: &MatPoly) -> Result<Verdict, OperatorError> {
    check_size("eigenvalue vs wavefunction", theta.n(), psi.n())?;
    if theta.var() != Var::X && !theta.is_zero() {
        return Err(OperatorError::WrongVariable { order: 0, var: theta.var() });
    }
    let lhs = apply_right(psi, b)?;
    let rhs = theta.to_matrf().mul(psi.mat())?;
    Ok(Verdict::from_residual(lhs.mat().sub(&rhs)?))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleVerdict {
    pub left: Verdict,
    pub right: Verdict,
}

impl TripleVerdict {
    pub fn holds(&self) -> bool {
        self.left.holds && self.right.holds
    }
}

/// Both equations of a bispectral triple.
pub fn check_triple(
    l: &LeftOperator,
    psi: &WaveFunction,
    b: &RightOperator,
    f: &MatPoly,
    theta: &MatPoly,
) -> Result<TripleVerdict, OperatorError> {
    Ok(TripleVerdict { left: check_left_eigen(l, psi, f)?, right: check_right_eigen(psi, b, theta)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Factor;

    fn inv(v: Var, k: u32) -> RatFun {
        RatFun::inv_factor(&Factor::linear(v, Gq::zero()), k)
    }

    #[test]
    fn derivative_of_exponential() {
        let psi = WaveFunction::exponential(2, Convention::One);
        let out = apply_left(&LeftOperator::derivative(2, 1), &psi).unwrap();
        assert_eq!(out.mat(), &MatRF::scalar(2, RatFun::var(Var::Z)));
        let out = apply_right(&psi, &RightOperator::derivative(2, 1)).unwrap();
        assert_eq!(out.mat(), &MatRF::scalar(2, RatFun::var(Var::X)));
    }

    #[test]
    fn identity_operators() {
        let psi = WaveFunction::exponential(1, Convention::I);
        assert_eq!(apply_left(&LeftOperator::identity(1), &psi).unwrap(), psi);
        assert_eq!(apply_right(&psi, &RightOperator::identity(1)).unwrap(), psi);
    }

    #[test]
    fn compose_left_derivatives() {
        let d = LeftOperator::derivative(1, 1);
        assert_eq!(d.compose(&d), LeftOperator::derivative(1, 2));
    }

    #[test]
    fn compose_right_with_pole() {
        // B = ∂·(1/z):  (ψB)B = ∂²ψ/z² − ∂ψ/z³
        let b = RightOperator::new(1, BTreeMap::from([(1, MatRF::scalar(1, inv(Var::Z, 1)))])).unwrap();
        let bb = b.compose(&b);
        assert_eq!(bb.coeff(2), MatRF::scalar(1, inv(Var::Z, 2)));
        assert_eq!(bb.coeff(1), MatRF::scalar(1, inv(Var::Z, 3).neg()));
        assert_eq!(bb.order(), 2);
    }

    #[test]
    fn compose_square_of_bessel_type_operator() {
        // by hand: (−∂² + 6/z²)² = ∂⁴ − 12/z²·∂² + 24/z³·∂, using
        // ∂²(ψ·6/z²) = ∂²ψ·6/z² − 24·∂ψ/z³ + 36·ψ/z⁴
        let six = MatRF::scalar(1, inv(Var::Z, 2).scale(&Gq::from_int(6)));
        let b = RightOperator::new(1, BTreeMap::from([(2, MatRF::scalar(1, RatFun::constant(Gq::from_int(-1)))), (0, six)]))
            .unwrap();
        let sq = b.compose(&b);
        let c = |k: usize| sq.coeff(k).get(0, 0).clone();
        assert_eq!(c(4), RatFun::one());
        assert!(c(3).is_zero());
        assert_eq!(c(2), inv(Var::Z, 2).scale(&Gq::from_int(-12)));
        assert_eq!(c(1), inv(Var::Z, 3).scale(&Gq::from_int(24)));
        // −36/z⁴ from the cross term, +36/z⁴ from the square of 6/z²
        assert!(c(0).is_zero());
    }

    #[test]
    fn coefficient_variable_checks() {
        let bad = BTreeMap::from([(0, MatRF::scalar(1, RatFun::var(Var::Z)))]);
        assert!(LeftOperator::new(1, bad.clone()).is_err());
        assert!(RightOperator::new(1, bad).is_ok());
    }
}
