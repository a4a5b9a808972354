//! Matrix polynomials in one variable with constant ℚ(i) coefficients.

use std::fmt;

use crate::exact::linalg::SparseVec;
use crate::exact::{BiPoly, ExactError, Gq, MatRF, RatFun, Var};

/// Dense constant `n × n` matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstMat {
    n: usize,
    entries: Vec<Gq>,
}

impl ConstMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Gq::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Gq::one();
        }
        m
    }

    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m.entries[i * n + j] = Gq::one();
        m
    }

    pub fn from_rows(rows: Vec<Vec<Gq>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square rows expected");
        Self { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Gq {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Gq) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Gq] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Gq::is_zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { n: self.n, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { n: self.n, entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self { n: self.n, entries: self.entries.iter().map(|a| a * c).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn to_matrf(&self) -> MatRF {
        let mut m = MatRF::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, RatFun::constant(self.get(i, j).clone()));
            }
        }
        m
    }
}

impl fmt::Debug for ConstMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> =
            (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect()).collect();
        write!(f, "{rows:?}")
    }
}

/// `Σ_k C_k v^k`. No trailing zero coefficient is stored, so the zero
/// polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatPoly {
    var: Var,
    n: usize,
    coeffs: Vec<ConstMat>,
}

impl MatPoly {
    pub fn new(var: Var, n: usize, mut coeffs: Vec<ConstMat>) -> Self {
        assert!(coeffs.iter().all(|c| c.n() == n), "coefficient size mismatch");
        while coeffs.last().is_some_and(ConstMat::is_zero) {
            coeffs.pop();
        }
        Self { var, n, coeffs }
    }

    pub fn zero(var: Var, n: usize) -> Self {
        Self { var, n, coeffs: Vec::new() }
    }

    pub fn identity(var: Var, n: usize) -> Self {
        Self::new(var, n, vec![ConstMat::identity(n)])
    }

    /// `c · v^k · I`.
    pub fn scalar_monomial(var: Var, n: usize, c: Gq, k: usize) -> Self {
        Self::monomial(var, ConstMat::identity(n).scale(&c), k)
    }

    /// `C · v^k`.
    pub fn monomial(var: Var, c: ConstMat, k: usize) -> Self {
        let n = c.n();
        let mut coeffs = vec![ConstMat::zeros(n); k];
        coeffs.push(c);
        Self::new(var, n, coeffs)
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[ConstMat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ConstMat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| ConstMat::zeros(self.n))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, rhs: &Self) -> Result<(), ExactError> {
        if self.var != rhs.var || self.n != rhs.n {
            return Err(ExactError::Shape(format!(
                "{}x{} polynomial in {} vs {}x{} in {}",
                self.n, self.n, self.var, rhs.n, rhs.n, rhs.var
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.check(rhs)?;
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Ok(Self::new(self.var, self.n, (0..len).map(|k| self.coeff(k).add(&rhs.coeff(k))).collect()))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.check(rhs)?;
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Ok(Self::new(self.var, self.n, (0..len).map(|k| self.coeff(k).sub(&rhs.coeff(k))).collect()))
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self::new(self.var, self.n, self.coeffs.iter().map(|m| m.scale(c)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.check(rhs)?;
        if self.is_zero() || rhs.is_zero() {
            return Ok(Self::zero(self.var, self.n));
        }
        let mut out = vec![ConstMat::zeros(self.n); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Ok(Self::new(self.var, self.n, out))
    }

    /// Product reduced modulo `v^(d+1)`.
    pub fn mul_trunc(&self, rhs: &Self, d: usize) -> Result<Self, ExactError> {
        Ok(self.mul(rhs)?.truncate(d))
    }

    /// Drops every coefficient of degree above `d`.
    pub fn truncate(&self, d: usize) -> Self {
        Self::new(self.var, self.n, self.coeffs.iter().take(d + 1).cloned().collect())
    }

    /// Converts to a rational-function matrix in `var`.
    pub fn to_matrf(&self) -> MatRF {
        let mut m = MatRF::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut p = BiPoly::zero();
                for (k, c) in self.coeffs.iter().enumerate() {
                    let mono = if self.var == Var::X { (k as u32, 0) } else { (0, k as u32) };
                    p.add_term(mono, c.get(i, j).clone());
                }
                m.set(i, j, RatFun::from_poly(p));
            }
        }
        m
    }

    /// Inverse of [`to_matrf`](Self::to_matrf); fails when an entry is not a
    /// polynomial in `var` alone.
    pub fn from_matrf(var: Var, m: &MatRF) -> Result<Self, ExactError> {
        if !m.is_square() {
            return Err(ExactError::Shape("matrix polynomial must be square".into()));
        }
        let n = m.rows();
        let mut coeffs: Vec<ConstMat> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let e = m.get(i, j);
                let uni = if e.is_polynomial() { e.num().to_unipoly(var) } else { None };
                let uni = uni.ok_or_else(|| {
                    ExactError::Shape(format!("entry ({},{}) `{e}` is not a polynomial in {var}", i + 1, j + 1))
                })?;
                for (k, c) in uni.coeffs().iter().enumerate() {
                    while coeffs.len() <= k {
                        coeffs.push(ConstMat::zeros(n));
                    }
                    coeffs[k].set(i, j, c.clone());
                }
            }
        }
        Ok(Self::new(var, n, coeffs))
    }

    /// Coordinates in the order (degree, row, column), up to degree `d`.
    pub fn coords(&self, d: usize) -> SparseVec {
        let nn = self.n * self.n;
        let mut pairs = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().take(d + 1) {
            for (idx, v) in c.entries().iter().enumerate() {
                if !v.is_zero() {
                    pairs.push((k * nn + idx, v.clone()));
                }
            }
        }
        SparseVec(pairs)
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(var: Var, n: usize, v: &SparseVec) -> Self {
        let nn = n * n;
        let len = v.0.last().map_or(0, |(i, _)| i / nn + 1);
        let mut coeffs = vec![ConstMat::zeros(n); len];
        for (i, c) in &v.0 {
            coeffs[i / nn].entries[i % nn] = c.clone();
        }
        Self::new(var, n, coeffs)
    }

    /// Entry `(i, j)` as an expression string in `var`.
    pub fn entry_expr(&self, i: usize, j: usize) -> String {
        let mut p = BiPoly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let mono = if self.var == Var::X { (k as u32, 0) } else { (0, k as u32) };
            p.add_term(mono, c.get(i, j).clone());
        }
        p.to_string()
    }

    /// Grid of expression strings, the problem-file representation.
    pub fn to_grid(&self) -> Vec<Vec<String>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.entry_expr(i, j)).collect()).collect()
    }

    /// Inverse of [`MatPoly::to_grid`]: a square grid of polynomial
    /// expressions in `var`.
    pub fn from_grid(var: Var, grid: &[Vec<String>]) -> Result<Self, String> {
        let n = grid.len();
        if n == 0 || grid.iter().any(|r| r.len() != n) {
            return Err("expected a nonempty square grid".into());
        }
        let basis = crate::exact::FactorBasis::default();
        let rows = grid
            .iter()
            .map(|row| row.iter().map(|t| crate::expr::parse_expr(t, &basis).map_err(|e| e.to_string())).collect())
            .collect::<Result<Vec<Vec<RatFun>>, String>>()?;
        let m = MatRF::from_rows(rows).map_err(|e| e.to_string())?;
        Self::from_matrf(var, &m).map_err(|e| e.to_string())
    }
}

impl fmt::Display for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_grid())
    }
}

impl fmt::Debug for MatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_truncation() {
        let n = MatPoly::monomial(Var::X, ConstMat::unit(2, 1, 0), 2);
        let p = MatPoly::scalar_monomial(Var::X, 2, Gq::one(), 1).add(&n).unwrap();
        let sq = p.mul(&p).unwrap();
        // (xI + x^2 N)^2 = x^2 I + 2 x^3 N
        assert_eq!(sq.degree(), Some(3));
        assert_eq!(sq.coeff(3), ConstMat::unit(2, 1, 0).scale(&Gq::from_int(2)));
        assert_eq!(p.mul_trunc(&p, 2).unwrap().degree(), Some(2));
    }

    #[test]
    fn coords_round_trip() {
        let p = MatPoly::monomial(Var::Z, ConstMat::unit(3, 2, 1), 4)
            .add(&MatPoly::identity(Var::Z, 3))
            .unwrap();
        assert_eq!(MatPoly::from_coords(Var::Z, 3, &p.coords(10)), p);
        assert_eq!(MatPoly::from_matrf(Var::Z, &p.to_matrf()).unwrap(), p);
    }

    #[test]
    fn mismatched_variables() {
        let a = MatPoly::identity(Var::X, 2);
        let b = MatPoly::identity(Var::Z, 2);
        assert!(a.mul(&b).is_err());
    }
}
