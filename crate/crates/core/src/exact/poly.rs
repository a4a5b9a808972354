//! Sparse bivariate polynomials in `x, z` and dense univariate polynomials.

use std::collections::BTreeMap;
use std::fmt;

use super::gaussian::Gq;
use super::ExactError;

/// One of the two independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Var {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "z")]
    Z,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::X => Var::Z,
            Var::Z => Var::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Z => "z",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense univariate polynomial, `coeffs[k]` multiplies `t^k`.
/// Trailing zeros are always trimmed, so the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct UniPoly {
    coeffs: Vec<Gq>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Gq>) -> Self {
        while coeffs.last().is_some_and(Gq::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Gq) -> Self {
        Self::new(vec![c])
    }

    /// `t^k`.
    pub fn monomial(c: Gq, k: usize) -> Self {
        let mut coeffs = vec![Gq::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Gq] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Gq {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Gq> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(Gq::is_one)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }

    pub fn scale(&self, c: &Gq) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Gq::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Gq::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &Gq::from_int(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> Self {
        let mut out = vec![Gq::zero()];
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push(c * &Gq::from_ratio(1, k as i64 + 1));
        }
        Self::new(out)
    }

    /// Euclidean division `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), ExactError> {
        let dl = d.leading().ok_or(ExactError::DivisionByZero)?.inv()?;
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Gq::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &dl;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &(&c * dc);
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self, ExactError> {
        Ok(self.div_rem(d)?.1)
    }

    /// Monic associate; the zero polynomial stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
            None => Self::zero(),
        }
    }

    /// Extended Euclid: returns `(g, s, t)` with `s·a + t·b = g`, `g` monic.
    pub fn ext_gcd(a: &Self, b: &Self) -> Result<(Self, Self, Self), ExactError> {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::constant(Gq::one()), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::constant(Gq::one()));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let li = l.inv()?;
                Ok((r0.scale(&li), s0.scale(&li), t0.scale(&li)))
            }
            None => Ok((r0, s0, t0)),
        }
    }

    pub fn gcd(a: &Self, b: &Self) -> Result<Self, ExactError> {
        Ok(Self::ext_gcd(a, b)?.0)
    }

    pub fn eval(&self, t: &Gq) -> Gq {
        let mut acc = Gq::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    /// Embed as a bivariate polynomial in `var`.
    pub fn to_bipoly(&self, var: Var) -> BiPoly {
        let mut p = BiPoly::zero();
        for (k, c) in self.coeffs.iter().enumerate() {
            let key = match var {
                Var::X => (k as u32, 0),
                Var::Z => (0, k as u32),
            };
            p.add_term(key, c.clone());
        }
        p
    }

    /// Render as an expression in `var`, e.g. `x^3-1`.
    pub fn render(&self, var: Var) -> String {
        self.to_bipoly(var).to_string()
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(Var::X))
    }
}

/// Monomial exponents `(deg_x, deg_z)`.
pub type Mono = (u32, u32);

/// Sparse polynomial in `x` and `z`; no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    terms: BTreeMap<Mono, Gq>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Gq) -> Self {
        let mut p = Self::zero();
        p.add_term((0, 0), c);
        p
    }

    pub fn one() -> Self {
        Self::constant(Gq::one())
    }

    pub fn monomial(c: Gq, m: Mono) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::X => Self::monomial(Gq::one(), (1, 0)),
            Var::Z => Self::monomial(Gq::one(), (0, 1)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Gq)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Mono) -> Gq {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    /// Adds `c·m`, dropping the entry when it cancels.
    pub fn add_term(&mut self, m: Mono, c: Gq) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(a, b)| if v == Var::X { a } else { b })
            .max()
    }

    /// True when the polynomial does not involve `v`.
    pub fn is_free_of(&self, v: Var) -> bool {
        self.degree_in(v).unwrap_or(0) == 0
    }

    pub fn constant_term(&self) -> Option<Gq> {
        if self.terms.keys().all(|&m| m == (0, 0)) {
            Some(self.coeff((0, 0)))
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect() }
    }

    /// Multiply by `x^a z^b`.
    pub fn shift(&self, by: Mono) -> Self {
        Self { terms: self.terms.iter().map(|(m, a)| ((m.0 + by.0, m.1 + by.1), a.clone())).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, a) in &self.terms {
            for (mb, b) in &rhs.terms {
                out.add_term((ma.0 + mb.0, ma.1 + mb.1), a * b);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn diff(&self, v: Var) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            match v {
                Var::X if a > 0 => out.add_term((a - 1, b), c * &Gq::from_int(a as i64)),
                Var::Z if b > 0 => out.add_term((a, b - 1), c * &Gq::from_int(b as i64)),
                _ => {}
            }
        }
        out
    }

    /// Split along `v`: for each power of the other variable, the univariate
    /// polynomial in `v` multiplying it.
    pub fn slices(&self, v: Var) -> BTreeMap<u32, UniPoly> {
        let mut raw: BTreeMap<u32, Vec<Gq>> = BTreeMap::new();
        for (&(a, b), c) in &self.terms {
            let (k, other) = if v == Var::X { (a, b) } else { (b, a) };
            let row = raw.entry(other).or_default();
            if row.len() <= k as usize {
                row.resize(k as usize + 1, Gq::zero());
            }
            row[k as usize] = c.clone();
        }
        raw.into_iter().map(|(o, cs)| (o, UniPoly::new(cs))).collect()
    }

    fn from_slices(v: Var, slices: &BTreeMap<u32, UniPoly>) -> Self {
        let mut out = Self::zero();
        for (&o, p) in slices {
            for (k, c) in p.coeffs().iter().enumerate() {
                let m = if v == Var::X { (k as u32, o) } else { (o, k as u32) };
                out.add_term(m, c.clone());
            }
        }
        out
    }

    /// Exact division by a univariate polynomial in `v`; `None` if the
    /// division leaves a remainder.
    pub fn div_exact_uni(&self, f: &UniPoly, v: Var) -> Option<Self> {
        let mut quot = BTreeMap::new();
        for (o, p) in self.slices(v) {
            let (q, r) = p.div_rem(f).ok()?;
            if !r.is_zero() {
                return None;
            }
            quot.insert(o, q);
        }
        Some(Self::from_slices(v, &quot))
    }

    /// Univariate view; `None` when the polynomial involves the other variable.
    pub fn to_unipoly(&self, v: Var) -> Option<UniPoly> {
        if !self.is_free_of(v.other()) {
            return None;
        }
        Some(self.slices(v).remove(&0).unwrap_or_default())
    }

    pub fn eval(&self, x: &Gq, z: &Gq) -> Gq {
        let mut acc = Gq::zero();
        for (&(a, b), c) in &self.terms {
            acc += &(&(c * &x.pow(a)) * &z.pow(b));
        }
        acc
    }

    /// Substitute a value for one variable.
    pub fn eval_var(&self, v: Var, t: &Gq) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            match v {
                Var::X => out.add_term((0, b), c * &t.pow(a)),
                Var::Z => out.add_term((a, 0), c * &t.pow(b)),
            }
        }
        out
    }
}

impl fmt::Display for BiPoly {
    /// Expression-grammar rendering, highest total degree first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&Mono> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.0 + k.1, k.0)));
        for (idx, m) in keys.into_iter().enumerate() {
            let c = &self.terms[m];
            let mono = render_mono(*m);
            let (neg, mag) = if c.is_real() && c.re < num_rational::BigRational::default() {
                (true, -c)
            } else {
                (false, c.clone())
            };
            if idx == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { "-" } else { "+" })?;
            }
            let coeff = render_coeff(&mag);
            match (coeff.as_str(), mono.is_empty()) {
                ("1", true) => f.write_str("1")?,
                ("1", false) => f.write_str(&mono)?,
                (c, true) => f.write_str(c)?,
                (c, false) => write!(f, "{c}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn render_mono((a, b): Mono) -> String {
    let part = |name: &str, k: u32| match k {
        0 => String::new(),
        1 => name.to_string(),
        k => format!("{name}^{k}"),
    };
    match (part("x", a), part("z", b)) {
        (x, z) if x.is_empty() => z,
        (x, z) if z.is_empty() => x,
        (x, z) => format!("{x}*{z}"),
    }
}

/// Coefficient text accepted by the expression parser: `3`, `3/4`,
/// `i`, `(1/2+3*i)`.
pub(crate) fn render_coeff(c: &Gq) -> String {
    use num_traits::{One, Zero};
    if c.is_real() {
        return c.re.to_string();
    }
    let im = if c.im.is_one() {
        "i".to_string()
    } else if (-c.im.clone()).is_one() {
        "-i".to_string()
    } else {
        format!("{}*i", c.im)
    };
    if c.re.is_zero() {
        if c.im.is_one() {
            "i".to_string()
        } else {
            format!("({im})")
        }
    } else if c.im > num_rational::BigRational::zero() {
        format!("({}+{im})", c.re)
    } else {
        format!("({}{im})", c.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(cs: &[i64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| Gq::from_int(c)).collect())
    }

    #[test]
    fn unipoly_division() {
        // x^3 - 1 = (x - 1)(x^2 + x + 1)
        let (q, r) = up(&[-1, 0, 0, 1]).div_rem(&up(&[-1, 1])).unwrap();
        assert_eq!(q, up(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn ext_gcd_bezout() {
        let a = up(&[-1, 0, 0, 1]);
        let b = a.derivative();
        let (g, s, t) = UniPoly::ext_gcd(&a, &b).unwrap();
        assert_eq!(g, up(&[1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn bipoly_exact_division() {
        // (x*z - 1) * (x - 2)
        let p = BiPoly::monomial(Gq::one(), (1, 1)).sub(&BiPoly::one());
        let f = up(&[-2, 1]);
        let prod = p.mul(&f.to_bipoly(Var::X));
        assert_eq!(prod.div_exact_uni(&f, Var::X), Some(p.clone()));
        assert_eq!(p.div_exact_uni(&f, Var::X), None);
    }

    #[test]
    fn display() {
        let p = BiPoly::monomial(Gq::one(), (1, 1)).sub(&BiPoly::one());
        assert_eq!(p.to_string(), "x*z-1");
        let q = BiPoly::monomial(Gq::from_ratio(-3, 2), (2, 0)).add(&BiPoly::monomial(Gq::i(), (0, 1)));
        assert_eq!(q.to_string(), "-3/2*x^2+i*z");
    }
}
