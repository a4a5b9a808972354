//! Fast screening of relations: matrix polynomials are evaluated at enough
//! points modulo a prime to decide vanishing of every residual modulo that
//! prime. A residual that vanishes over ℚ(i) always vanishes here, so a
//! nonzero verdict is final; zero verdicts are confirmed exactly by callers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::FreeElement;
use crate::exact::Gq;
use crate::matpoly::MatPoly;

/// Prime with `p ≡ 1 (mod 4)`, so that `i` has an image.
const P: u64 = 1_000_000_009;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

fn sqrt_minus_one() -> u64 {
    (2..)
        .map(|g| pow(g, (P - 1) / 4))
        .find(|&r| mul(r, r) == P - 1)
        .expect("p ≡ 1 mod 4")
}

fn reduce_int(n: &BigInt) -> u64 {
    let r = (n % BigInt::from(P)).to_i64().expect("reduced below p");
    r.rem_euclid(P as i64) as u64
}

fn reduce_rational(q: &num_rational::BigRational) -> Option<u64> {
    let den = reduce_int(q.denom());
    if den == 0 {
        return None;
    }
    Some(mul(reduce_int(q.numer()), pow(den, P - 2)))
}

/// Evaluation context: points `1..=count` and the image of `i`.
pub(crate) struct Screen {
    i: u64,
    points: usize,
    n: usize,
}

/// A matrix polynomial as `points` evaluated `n×n` matrices.
#[derive(Clone)]
pub(crate) struct Evaluated(Vec<Vec<u64>>);

impl Screen {
    /// `max_degree` bounds the degree of every residual that will be tested.
    pub(crate) fn new(n: usize, max_degree: usize) -> Self {
        Self { i: sqrt_minus_one(), points: max_degree + 1, n }
    }

    fn scalar(&self, c: &Gq) -> Option<u64> {
        let re = reduce_rational(&c.re)?;
        let im = reduce_rational(&c.im)?;
        Some((re + mul(im, self.i)) % P)
    }

    /// `None` when a denominator vanishes modulo the prime.
    pub(crate) fn evaluate(&self, m: &MatPoly) -> Option<Evaluated> {
        let n = self.n;
        let mut out = vec![vec![0u64; n * n]; self.points];
        for (k, c) in m.coeffs().iter().enumerate() {
            for (idx, e) in c.entries().iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let v = self.scalar(e)?;
                for (t, slot) in out.iter_mut().enumerate() {
                    let x = pow(t as u64 + 1, k as u64);
                    slot[idx] = (slot[idx] + mul(v, x)) % P;
                }
            }
        }
        Some(Evaluated(out))
    }

    fn matmul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = (out[i * n + j] + mul(x, b[k * n + j])) % P;
                }
            }
        }
        out
    }

    /// Whether `e` vanishes modulo the prime at the assigned generators;
    /// `None` when a coefficient of `e` has no image.
    pub(crate) fn vanishes(&self, e: &FreeElement, gens: &[&Evaluated]) -> Option<bool> {
        let n = self.n;
        let coeffs: Vec<(&Vec<usize>, u64)> =
            e.terms().iter().map(|(w, c)| self.scalar(c).map(|v| (w, v))).collect::<Option<_>>()?;
        for t in 0..self.points {
            let mut acc = vec![0u64; n * n];
            for (w, c) in &coeffs {
                let mut prod: Vec<u64> = (0..n * n).map(|idx| u64::from(idx % (n + 1) == 0)).collect();
                for &g in *w {
                    prod = self.matmul(&prod, &gens[g].0[t]);
                }
                for (a, p) in acc.iter_mut().zip(&prod) {
                    *a = (*a + mul(*c, *p)) % P;
                }
            }
            if acc.iter().any(|&x| x != 0) {
                return Some(false);
            }
        }
        Some(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Var;
    use crate::matpoly::ConstMat;
    use crate::presentations::parse_free;

    #[test]
    fn image_of_i_squares_to_minus_one() {
        let i = sqrt_minus_one();
        assert_eq!(mul(i, i), P - 1);
    }

    #[test]
    fn screening_agrees_with_exact_evaluation() {
        let names = vec!["a".to_string(), "b".to_string()];
        let nil = MatPoly::monomial(Var::X, ConstMat::unit(2, 1, 0), 1);
        let id = MatPoly::identity(Var::X, 2);
        let s = Screen::new(2, 4);
        let (en, ei) = (s.evaluate(&nil).unwrap(), s.evaluate(&id).unwrap());
        let sq = parse_free("a^2", &names).unwrap();
        let mixed = parse_free("a b - b a + a", &names).unwrap();
        assert_eq!(s.vanishes(&sq, &[&en, &ei]), Some(true));
        assert_eq!(s.vanishes(&mixed, &[&en, &ei]), Some(false));
    }
}
