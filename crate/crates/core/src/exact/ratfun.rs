//! Rational functions in `x, z` whose denominators are products of powers
//! of registered univariate factors.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::gaussian::Gq;
use super::poly::{BiPoly, UniPoly, Var};
use super::ExactError;

#[derive(PartialEq, Eq, PartialOrd, Ord, Hash)]
struct FactorInner {
    var: Var,
    poly: UniPoly,
}

/// A monic univariate polynomial in one variable, used as a denominator
/// building block. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor(Arc<FactorInner>);

impl Factor {
    /// `poly` must be monic of positive degree.
    pub fn new(var: Var, poly: UniPoly) -> Result<Self, ExactError> {
        if poly.degree().unwrap_or(0) == 0 || !poly.is_monic() {
            return Err(ExactError::BadFactor(poly.render(var)));
        }
        Ok(Self(Arc::new(FactorInner { var, poly })))
    }

    /// The factor `v - a`.
    pub fn linear(var: Var, root: Gq) -> Self {
        Self::new(var, UniPoly::new(vec![-root, Gq::one()])).expect("monic linear")
    }

    pub fn var(&self) -> Var {
        self.0.var
    }

    pub fn poly(&self) -> &UniPoly {
        &self.0.poly
    }

    pub fn to_bipoly(&self) -> BiPoly {
        self.0.poly.to_bipoly(self.0.var)
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.poly.render(self.0.var))
    }
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Factor({self})")
    }
}

/// Registry of pairwise coprime denominator factors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactorBasis {
    factors: Vec<Factor>,
}

impl FactorBasis {
    pub fn new(factors: Vec<Factor>) -> Result<Self, ExactError> {
        let mut basis = Self::default();
        for f in factors {
            basis.push(f)?;
        }
        Ok(basis)
    }

    /// Registers a factor, rejecting duplicates and non-coprime pairs.
    pub fn push(&mut self, f: Factor) -> Result<(), ExactError> {
        for g in &self.factors {
            if g.var() == f.var() {
                let gcd = UniPoly::gcd(g.poly(), f.poly())?;
                if gcd.degree() != Some(0) {
                    return Err(ExactError::NotCoprime(g.to_string(), f.to_string()));
                }
            }
        }
        self.factors.push(f);
        Ok(())
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn of_var(&self, v: Var) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(move |f| f.var() == v)
    }

    pub fn contains(&self, f: &Factor) -> bool {
        self.factors.contains(f)
    }

    /// Writes `p = c · Π f^k` over the registered factors of `v`, or `None`
    /// when `p` has a divisor outside the basis.
    pub fn factorize(&self, p: &UniPoly, v: Var) -> Option<(Gq, BTreeMap<Factor, u32>)> {
        let mut rest = p.clone();
        let mut exps = BTreeMap::new();
        if rest.is_zero() {
            return None;
        }
        for f in self.of_var(v) {
            loop {
                let (q, r) = rest.div_rem(f.poly()).ok()?;
                if !r.is_zero() {
                    break;
                }
                *exps.entry(f.clone()).or_insert(0) += 1;
                rest = q;
            }
        }
        match rest.degree() {
            Some(0) => Some((rest.coeff(0), exps)),
            _ => None,
        }
    }
}

/// Denominator exponent vector, keyed by factor. Only positive exponents are stored.
pub type Den = BTreeMap<Factor, u32>;

fn den_poly(den: &Den) -> BiPoly {
    let mut p = BiPoly::one();
    for (f, &k) in den {
        p = p.mul(&f.to_bipoly().pow(k));
    }
    p
}

/// `num / Π f^k`. Kept normalized: no factor with positive exponent
/// divides the numerator.
#[derive(Clone, Default)]
pub struct RatFun {
    num: BiPoly,
    den: Den,
}

impl RatFun {
    pub fn new(num: BiPoly, den: Den) -> Self {
        let mut r = Self { num, den };
        r.normalize();
        r
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_poly(BiPoly::one())
    }

    pub fn constant(c: Gq) -> Self {
        Self::from_poly(BiPoly::constant(c))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(BiPoly::var(v))
    }

    pub fn from_poly(num: BiPoly) -> Self {
        Self { num, den: Den::new() }
    }

    /// `1 / f^k`.
    pub fn inv_factor(f: &Factor, k: u32) -> Self {
        let mut den = Den::new();
        if k > 0 {
            den.insert(f.clone(), k);
        }
        Self { num: BiPoly::one(), den }
    }

    pub fn num(&self) -> &BiPoly {
        &self.num
    }

    pub fn den(&self) -> &Den {
        &self.den
    }

    pub fn den_expanded(&self) -> BiPoly {
        den_poly(&self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    /// True when the function does not depend on `v`.
    pub fn is_free_of(&self, v: Var) -> bool {
        self.num.is_free_of(v) && self.den.keys().all(|f| f.var() != v)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let factors: Vec<Factor> = self.den.keys().cloned().collect();
        for f in factors {
            loop {
                let k = self.den[&f];
                if k == 0 {
                    self.den.remove(&f);
                    break;
                }
                match self.num.div_exact_uni(f.poly(), f.var()) {
                    Some(q) => {
                        self.num = q;
                        *self.den.get_mut(&f).unwrap() -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|_, k| *k > 0);
    }

    /// Numerator after bringing `self` over the (larger) denominator `to`.
    fn num_over(&self, to: &Den) -> BiPoly {
        let mut p = self.num.clone();
        for (f, &k) in to {
            let have = self.den.get(f).copied().unwrap_or(0);
            debug_assert!(k >= have);
            if k > have {
                p = p.mul(&f.to_bipoly().pow(k - have));
            }
        }
        p
    }

    fn join_den(a: &Den, b: &Den) -> Den {
        let mut d = a.clone();
        for (f, &k) in b {
            let e = d.entry(f.clone()).or_insert(0);
            *e = (*e).max(k);
        }
        d
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            return Self::new(self.num.add(&rhs.num), self.den.clone());
        }
        let d = Self::join_den(&self.den, &rhs.den);
        Self::new(self.num_over(&d).add(&rhs.num_over(&d)), d)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Self { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut d = self.den.clone();
        for (f, &k) in &rhs.den {
            *d.entry(f.clone()).or_insert(0) += k;
        }
        Self::new(self.num.mul(&rhs.num), d)
    }

    pub fn mul_poly(&self, p: &BiPoly) -> Self {
        Self::new(self.num.mul(p), self.den.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial derivative by the quotient rule over the factored denominator:
    /// each `f^k` contributes `-k·f'·num / f^(k+1)`.
    pub fn diff(&self, v: Var) -> Self {
        let active: Vec<(&Factor, u32)> =
            self.den.iter().filter(|(f, _)| f.var() == v).map(|(f, &k)| (f, k)).collect();
        if active.is_empty() {
            return Self::new(self.num.diff(v), self.den.clone());
        }
        // Over den · Π_active f:
        // num' · Π f  -  Σ_i k_i f_i' · num · Π_{j≠i} f_j
        let polys: Vec<BiPoly> = active.iter().map(|(f, _)| f.to_bipoly()).collect();
        let prod_except = |skip: Option<usize>| {
            polys
                .iter()
                .enumerate()
                .filter(|(j, _)| Some(*j) != skip)
                .fold(BiPoly::one(), |acc, (_, p)| acc.mul(p))
        };
        let mut num = self.num.diff(v).mul(&prod_except(None));
        for (i, (f, k)) in active.iter().enumerate() {
            let fprime = f.poly().derivative().to_bipoly(v);
            let term = fprime.mul(&self.num).mul(&prod_except(Some(i))).scale(&Gq::from_int(*k as i64));
            num = num.sub(&term);
        }
        let mut den = self.den.clone();
        for (f, _) in &active {
            *den.get_mut(*f).unwrap() += 1;
        }
        Self::new(num, den)
    }

    pub fn diff_n(&self, v: Var, n: usize) -> Self {
        let mut r = self.clone();
        for _ in 0..n {
            r = r.diff(v);
        }
        r
    }

    /// Value at a point; errors when a denominator vanishes there.
    pub fn eval(&self, x: &Gq, z: &Gq) -> Result<Gq, ExactError> {
        let d = self.den_expanded().eval(x, z);
        self.num.eval(x, z).checked_div(&d)
    }

    /// Multiplies through by `den`, which must be a multiple of `self.den`.
    /// Returns `None` when it is not.
    pub fn clear_into(&self, den: &Den) -> Option<BiPoly> {
        for (f, &k) in &self.den {
            if den.get(f).copied().unwrap_or(0) < k {
                return None;
            }
        }
        Some(self.num_over(den))
    }

    /// Least common multiple of a collection of denominators.
    pub fn lcm_den<'a>(items: impl IntoIterator<Item = &'a RatFun>) -> Den {
        items.into_iter().fold(Den::new(), |acc, r| Self::join_den(&acc, &r.den))
    }
}

impl PartialEq for RatFun {
    /// Cross-multiplication: `a.num · b.den = b.num · a.den`.
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den_expanded()) == other.num.mul(&self.den_expanded())
    }
}

impl Eq for RatFun {}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.num.to_string();
        if self.den.is_empty() {
            return f.write_str(&num);
        }
        let single_term = self.num.len() == 1 && !num.contains(['+', '-']);
        if single_term || num == "1" {
            f.write_str(&num)?;
        } else {
            write!(f, "({num})")?;
        }
        f.write_str("/")?;
        let parts: Vec<String> = self
            .den
            .iter()
            .map(|(fac, &k)| {
                let s = fac.to_string();
                let base = if s.len() == 1 { s } else { format!("({s})") };
                if k == 1 {
                    base
                } else {
                    format!("{base}^{k}")
                }
            })
            .collect();
        if parts.len() == 1 {
            f.write_str(&parts[0])
        } else {
            write!(f, "({})", parts.join("*"))
        }
    }
}

impl fmt::Debug for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fx() -> Factor {
        Factor::linear(Var::X, Gq::zero())
    }

    fn x() -> RatFun {
        RatFun::var(Var::X)
    }

    fn z() -> RatFun {
        RatFun::var(Var::Z)
    }

    #[test]
    fn derivative_of_reciprocal() {
        let inv_x = RatFun::inv_factor(&fx(), 1);
        let expected = RatFun::inv_factor(&fx(), 2).neg();
        assert_eq!(inv_x.diff(Var::X), expected);
    }

    #[test]
    fn quotient_rule_example() {
        // d/dx((x z - 1)/x) = 1/x^2
        let r = x().mul(&z()).sub(&RatFun::one()).mul(&RatFun::inv_factor(&fx(), 1));
        assert_eq!(r.diff(Var::X), RatFun::inv_factor(&fx(), 2));
        assert_eq!(r.to_string(), "(x*z-1)/x");
    }

    #[test]
    fn normalization_cancels() {
        let r = RatFun::inv_factor(&fx(), 1).mul(&x());
        assert_eq!(r.den().len(), 0);
        assert_eq!(r, RatFun::one());
        assert_eq!(r.to_string(), "1");
    }

    #[test]
    fn basis_rejects_common_roots() {
        let f = Factor::new(Var::X, UniPoly::new(vec![Gq::from_int(-1), Gq::zero(), Gq::zero(), Gq::one()])).unwrap();
        let g = Factor::linear(Var::X, Gq::one());
        assert!(FactorBasis::new(vec![f.clone(), g]).is_err());
        assert!(FactorBasis::new(vec![f, fx(), Factor::linear(Var::X, Gq::from_int(2))]).is_ok());
        assert!(Factor::new(Var::X, UniPoly::new(vec![Gq::one(), Gq::from_int(2)])).is_err());
    }

    #[test]
    fn factorize_over_basis() {
        let f2 = Factor::linear(Var::X, Gq::from_int(2));
        let basis = FactorBasis::new(vec![fx(), f2.clone()]).unwrap();
        // 3 x^2 (x - 2)
        let p = UniPoly::new(vec![Gq::zero(), Gq::zero(), Gq::from_int(-6), Gq::from_int(3)]);
        let (c, e) = basis.factorize(&p, Var::X).unwrap();
        assert_eq!(c, Gq::from_int(3));
        assert_eq!(e[&fx()], 2);
        assert_eq!(e[&f2], 1);
        let bad = UniPoly::new(vec![Gq::from_int(1), Gq::zero(), Gq::one()]);
        assert!(basis.factorize(&bad, Var::X).is_none());
    }
}
