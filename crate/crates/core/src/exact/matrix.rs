//! Dense matrices of rational functions.

use std::fmt;

use super::gaussian::Gq;
use super::poly::Var;
use super::ratfun::RatFun;
use super::ExactError;

#[derive(Clone, PartialEq, Eq)]
pub struct MatRF {
    rows: usize,
    cols: usize,
    entries: Vec<RatFun>,
}

impl MatRF {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![RatFun::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, RatFun::one())
    }

    /// `r · I`.
    pub fn scalar(n: usize, r: RatFun) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, r.clone());
        }
        m
    }

    /// The matrix unit `E_ij` (zero-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, RatFun::one());
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFun>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Shape(format!("ragged or empty {r}-row grid")));
        }
        Ok(Self { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFun {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFun) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[RatFun] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RatFun::is_zero)
    }

    pub fn is_free_of(&self, v: Var) -> bool {
        self.entries.iter().all(|e| e.is_free_of(v))
    }

    /// First nonzero entry in row-major order.
    pub fn first_nonzero(&self) -> Option<(usize, usize, &RatFun)> {
        self.entries
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_zero())
            .map(|(k, e)| (k / self.cols, k % self.cols, e))
    }

    fn check_same(&self, rhs: &Self) -> Result<(), ExactError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(ExactError::Shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.check_same(rhs)?;
        Ok(self.zip(rhs, RatFun::add))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.check_same(rhs)?;
        Ok(self.zip(rhs, RatFun::sub))
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&RatFun, &RatFun) -> RatFun) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&RatFun) -> RatFun) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(RatFun::neg)
    }

    pub fn scale(&self, c: &Gq) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn scale_rf(&self, r: &RatFun) -> Self {
        self.map(|e| e.mul(r))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = RatFun::zero();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), rhs.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Entrywise partial derivative.
    pub fn diff(&self, v: Var) -> Self {
        self.map(|e| e.diff(v))
    }
}

impl fmt::Display for MatRF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for MatRF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
