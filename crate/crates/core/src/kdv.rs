//! Scalar Schrödinger operators with rational potentials: the
//! quasi-exponential eigenfunction `ψ = e^{s·xz} Σ c_k(x) z^{-k}` is built by
//! rational recursion, and the fourth-order partner operator in `z` is checked
//! against the eigenvalue algebra.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::linalg::{solve_affine, SparseVec};
use crate::exact::{Den, ExactError, Factor, FactorBasis, Gq, MatRF, RatFun, UniPoly, Var};
use crate::matpoly::MatPoly;
use crate::operators::{
    check_left_eigen, check_right_eigen, Convention, LeftOperator, OperatorError, RightOperator, WaveFunction,
};
use crate::solver::{stabilize_default, AlgebraSlice, ConvergenceReport, Side, SliceDoc, SliceMode, SolverError};

#[derive(Debug, Error)]
pub enum KdvError {
    #[error("potential depends on z")]
    PotentialDependsOnZ,
    #[error("non-rational antiderivative: nonzero residue at {0}")]
    NonRational(String),
    #[error("no termination by K_max = {0}")]
    NoTermination(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// `−(d/dx)² + V(x)`.
pub fn schrodinger(v: &RatFun) -> Result<LeftOperator, KdvError> {
    if !v.is_free_of(Var::Z) {
        return Err(KdvError::PotentialDependsOnZ);
    }
    let mut coeffs = BTreeMap::new();
    coeffs.insert(2, MatRF::scalar(1, RatFun::constant(Gq::from_int(-1))));
    if !v.is_zero() {
        coeffs.insert(0, MatRF::scalar(1, v.clone()));
    }
    Ok(LeftOperator::new(1, coeffs)?)
}

/// `6(x⁴ + 12t₃x)/(x³ − t₃)²` with the factor basis of its denominator.
pub fn l2_potential(t3: &Gq) -> (RatFun, FactorBasis) {
    let x = UniPoly::monomial(Gq::one(), 1);
    let num = UniPoly::monomial(Gq::from_int(6), 4).add(&x.scale(&(Gq::from_int(72) * t3)));
    let (factor, k) = if t3.is_zero() {
        (Factor::linear(Var::X, Gq::zero()), 6)
    } else {
        let cubic = UniPoly::monomial(Gq::one(), 3).sub(&UniPoly::constant(t3.clone()));
        (Factor::new(Var::X, cubic).expect("monic cubic"), 2)
    };
    let v = RatFun::new(num.to_bipoly(Var::X), Den::from([(factor.clone(), k)]));
    (v, FactorBasis::new(vec![factor]).expect("single factor"))
}

/// `−2 (log τ)''` for a monic squarefree `τ`, with its factor basis.
pub fn potential_from_tau(tau: &UniPoly) -> Result<(RatFun, FactorBasis), KdvError> {
    let f = Factor::new(Var::X, tau.clone())?;
    let (d1, d2) = (tau.derivative(), tau.derivative().derivative());
    let num = d1.mul(&d1).sub(&tau.mul(&d2)).scale(&Gq::from_int(2));
    let v = RatFun::new(num.to_bipoly(Var::X), Den::from([(f.clone(), 2)]));
    Ok((v, FactorBasis::new(vec![f])?))
}

/// `(−(d/dz)² + 6/z²)² + 4i·t₃·(d/dz)`, composed as right operators.
pub fn b2_operator(t3: &Gq) -> RightOperator {
    let z = Factor::linear(Var::Z, Gq::zero());
    let inner = RightOperator::derivative(1, 2)
        .scale(&Gq::from_int(-1))
        .add(&RightOperator::new(1, BTreeMap::from([(0, MatRF::scalar(1, RatFun::inv_factor(&z, 2).scale(&Gq::from_int(6))))])).expect("z-only"));
    inner.compose(&inner).add(&RightOperator::derivative(1, 1).scale(&(Gq::from_int(4) * &Gq::i() * t3)))
}

/// Rational antiderivative in `x` with zero integration constant, by
/// Hermite reduction over the factors of the denominator.
pub fn antiderivative(f: &RatFun) -> Result<RatFun, KdvError> {
    if !f.is_free_of(Var::Z) {
        return Err(KdvError::PotentialDependsOnZ);
    }
    let num = f.num().to_unipoly(Var::X).expect("z-free numerator");
    let mut full = UniPoly::constant(Gq::one());
    for (g, &k) in f.den() {
        full = full.mul(&g.poly().pow(k));
    }
    let (poly, rem) = num.div_rem(&full)?;
    let mut out = RatFun::from_poly(poly.integral().to_bipoly(Var::X));
    for (g, &k) in f.den() {
        let gk = g.poly().pow(k);
        let (cof, _) = full.div_rem(&gk)?;
        let (_, s, _) = UniPoly::ext_gcd(&cof, &gk)?;
        let mut part = rem.mul(&s).rem(&gk)?;
        // levels[m]: numerator over g^m, each of degree < deg g
        let mut levels = vec![UniPoly::zero(); k as usize + 1];
        for j in 0..k as usize {
            let (q, r) = part.div_rem(g.poly())?;
            levels[k as usize - j] = r;
            part = q;
        }
        let dg = g.poly().derivative();
        let (_, dinv, _) = UniPoly::ext_gcd(&dg, g.poly())?;
        for m in (2..=k as usize).rev() {
            let a = std::mem::replace(&mut levels[m], UniPoly::zero());
            if a.is_zero() {
                continue;
            }
            // a = b·g' + c·g, ∫a/g^m = −b/((m−1)g^{m−1}) + ∫(c + b'/(m−1))/g^{m−1}
            let b = a.mul(&dinv).rem(g.poly())?;
            let (c, r) = a.sub(&b.mul(&dg)).div_rem(g.poly())?;
            debug_assert!(r.is_zero());
            let inv = Gq::from_int(m as i64 - 1).inv()?;
            out = out.add(&RatFun::new(b.to_bipoly(Var::X), Den::from([(g.clone(), m as u32 - 1)])).scale(&-inv.clone()));
            levels[m - 1] = levels[m - 1].add(&c).add(&b.derivative().scale(&inv));
        }
        if !levels[1].is_zero() {
            return Err(KdvError::NonRational(g.to_string()));
        }
    }
    Ok(out)
}

/// `ψ = e^{s·xz} Σ_{k=0}^{K} c_k(x) z^{-k}` with `c₀ = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailWaveFunction {
    pub convention: Convention,
    pub coeffs: Vec<RatFun>,
}

impl TailWaveFunction {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_wave(&self) -> WaveFunction {
        let z = Factor::linear(Var::Z, Gq::zero());
        let m = self
            .coeffs
            .iter()
            .enumerate()
            .fold(RatFun::zero(), |acc, (k, c)| acc.add(&c.mul(&RatFun::inv_factor(&z, k as u32))));
        WaveFunction::new(MatRF::scalar(1, m), self.convention).expect("square")
    }
}

/// Solves `Lψ = −s²z²ψ` for a Schrödinger operator: `c_k' = (V c_{k−1} −
/// c_{k−1}'')/(2s)`, stopping once `V c_K − c_K'' = 0`.
pub fn synth_wavefunction(l: &LeftOperator, convention: Convention, k_max: usize) -> Result<TailWaveFunction, KdvError> {
    let v = l.coeff(0).get(0, 0).clone();
    let half_inv = (Gq::from_int(2) * &convention.s()).inv()?;
    let mut coeffs = vec![RatFun::one()];
    loop {
        let c = coeffs.last().expect("c0");
        let rhs = v.mul(c).sub(&c.diff_n(Var::X, 2));
        if rhs.is_zero() {
            return Ok(TailWaveFunction { convention, coeffs });
        }
        if coeffs.len() > k_max {
            return Err(KdvError::NoTermination(k_max));
        }
        coeffs.push(antiderivative(&rhs.scale(&half_inv))?);
    }
}

/// `−s²z²`, the eigenvalue of `−(d/dx)²` on `e^{s·xz}`.
pub fn schrodinger_eigenvalue(convention: Convention) -> MatPoly {
    let s = convention.s();
    MatPoly::scalar_monomial(Var::Z, 1, -(s.clone() * &s), 2)
}

/// Which closed form of the `L₂` potential to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialForm {
    /// `6(x⁴ + 12t₃x)/(x³ − t₃)²`, as commonly displayed.
    #[serde(rename = "displayed")]
    Displayed,
    /// `−2 (log(x³ − t₃))'' = (6x⁴ + 12t₃x)/(x³ − t₃)²`.
    #[serde(rename = "tau")]
    Tau,
}

impl PotentialForm {
    pub fn potential(self, t3: &Gq) -> (RatFun, FactorBasis) {
        if t3.is_zero() {
            return l2_potential(t3);
        }
        match self {
            PotentialForm::Displayed => l2_potential(t3),
            PotentialForm::Tau => {
                let tau = UniPoly::monomial(Gq::one(), 3).sub(&UniPoly::constant(t3.clone()));
                potential_from_tau(&tau).expect("x³ − t₃ is squarefree for t₃ ≠ 0")
            }
        }
    }
}

/// Outcome under one convention `s`.
#[derive(Debug, Clone, Serialize)]
pub struct ConventionReport {
    pub convention: Convention,
    /// Set when synthesis fails; the remaining fields are then empty.
    pub synthesis_error: Option<String>,
    pub tail_order: Option<usize>,
    pub tail: Vec<String>,
    pub eigen_holds: Option<bool>,
    pub slice: Option<SliceDoc>,
    pub convergence: Option<ConvergenceReport>,
    /// `γ` with `x⁴ + γx` in the degree-4 slice.
    pub gamma: Option<String>,
    /// Whether `x` lies outside the slice, so that `γ` is unique.
    pub gamma_unique: Option<bool>,
    /// Whether `ψB₂ = (x⁴ − 4t₃x)ψ`.
    pub pair_holds: Option<bool>,
    pub pair_residual: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KdvReport {
    pub t3: String,
    pub form: PotentialForm,
    pub potential: String,
    pub theta_tested: String,
    pub operator_tested: String,
    pub conventions: Vec<ConventionReport>,
}

impl KdvReport {
    /// Conventions under which the tested pair verifies.
    pub fn verifying_conventions(&self) -> Vec<Convention> {
        self.conventions.iter().filter(|c| c.pair_holds == Some(true)).map(|c| c.convention).collect()
    }
}

/// `x⁴ − 4t₃x`.
pub fn l2_theta(t3: &Gq) -> MatPoly {
    MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 4)
        .add(&MatPoly::scalar_monomial(Var::X, 1, -(Gq::from_int(4) * t3), 1))
        .expect("same ring")
}

/// `γ` such that `x⁴ + γx` lies in a scalar slice of degree ≥ 4, if any.
pub fn quartic_gamma(slice: &AlgebraSlice) -> Option<Gq> {
    let basis = slice.basis();
    let coord = |p: &MatPoly, k: usize| p.coeff(k).get(0, 0).clone();
    let rows: Vec<SparseVec> = [0, 2, 3, 4]
        .iter()
        .map(|&k| SparseVec::from_dense(&basis.iter().map(|p| coord(p, k)).collect::<Vec<_>>()))
        .collect();
    let rhs = [Gq::zero(), Gq::zero(), Gq::zero(), Gq::one()];
    let lam = solve_affine(&rows, &rhs, basis.len())?;
    Some(lam.iter().zip(&basis).fold(Gq::zero(), |acc, (l, p)| acc + &(l.clone() * &coord(p, 1))))
}

fn convention_report(l: &LeftOperator, basis: &FactorBasis, t3: &Gq, c: Convention) -> Result<ConventionReport, KdvError> {
    let mut rep = ConventionReport {
        convention: c,
        synthesis_error: None,
        tail_order: None,
        tail: Vec::new(),
        eigen_holds: None,
        slice: None,
        convergence: None,
        gamma: None,
        gamma_unique: None,
        pair_holds: None,
        pair_residual: None,
    };
    let tail = match synth_wavefunction(l, c, 4) {
        Ok(t) => t,
        Err(e @ (KdvError::NonRational(_) | KdvError::NoTermination(_))) => {
            rep.synthesis_error = Some(e.to_string());
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let psi = tail.to_wave();
    rep.tail_order = Some(tail.order());
    rep.tail = tail.coeffs.iter().map(|c| c.to_string()).collect();
    rep.eigen_holds = Some(check_left_eigen(l, &psi, &schrodinger_eigenvalue(c))?.holds);
    let (slice, convergence) = stabilize_default(&psi, Side::Theta, 4, SliceMode::Members, basis)?;
    rep.gamma = quartic_gamma(&slice).map(|g| g.to_string());
    rep.gamma_unique = Some(!slice.contains(&MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 1)));
    rep.slice = Some(slice.serialize());
    rep.convergence = Some(convergence);
    let pair = check_right_eigen(&psi, &b2_operator(t3), &l2_theta(t3))?;
    rep.pair_holds = Some(pair.holds);
    rep.pair_residual = Some(pair.residual.get(0, 0).to_string());
    Ok(rep)
}

/// For each convention: synthesizes ψ for `L₂`, computes its degree-4
/// θ-slice, extracts `γ` and tests `(B₂, x⁴ − 4t₃x)`.
pub fn verify_kdv_example(t3: &Gq, form: PotentialForm) -> Result<KdvReport, KdvError> {
    let (v, mut basis) = form.potential(t3);
    basis.push(Factor::linear(Var::Z, Gq::zero()))?;
    let l = schrodinger(&v)?;
    let conventions = [Convention::One, Convention::I]
        .into_iter()
        .map(|c| convention_report(&l, &basis, t3, c))
        .collect::<Result<_, _>>()?;
    Ok(KdvReport {
        t3: t3.to_string(),
        form,
        potential: v.to_string(),
        theta_tested: l2_theta(t3).entry_expr(0, 0),
        operator_tested: format!("(-(d/dz)^2 + 6/z^2)^2 + 4*i*({t3})*(d/dz)"),
        conventions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn rf(s: &str, basis: &FactorBasis) -> RatFun {
        parse_expr(s, basis).unwrap()
    }

    fn x_basis() -> FactorBasis {
        FactorBasis::new(vec![Factor::linear(Var::X, Gq::zero())]).unwrap()
    }

    #[test]
    fn antiderivative_of_double_pole() {
        let b = x_basis();
        let f = rf("1/x^2", &b);
        assert_eq!(antiderivative(&f).unwrap(), rf("-1/x", &b));
    }

    #[test]
    fn simple_pole_is_rejected() {
        let b = x_basis();
        assert!(matches!(antiderivative(&rf("1/x", &b)), Err(KdvError::NonRational(_))));
    }

    #[test]
    fn antiderivative_over_cubic_factor() {
        let (v, _) = l2_potential(&Gq::one());
        let big = antiderivative(&v.diff(Var::X)).unwrap();
        assert_eq!(big, v);
    }

    #[test]
    fn free_and_one_step_potentials() {
        let b = x_basis();
        for c in [Convention::One, Convention::I] {
            let t0 = synth_wavefunction(&schrodinger(&RatFun::zero()).unwrap(), c, 0).unwrap();
            assert_eq!(t0.order(), 0);
            let l = schrodinger(&rf("2/x^2", &b)).unwrap();
            let t1 = synth_wavefunction(&l, c, 3).unwrap();
            assert_eq!(t1.order(), 1);
            let expected = rf("-1/x", &b).scale(&c.s().inv().unwrap());
            assert_eq!(t1.coeffs[1], expected);
            assert!(check_left_eigen(&l, &t1.to_wave(), &schrodinger_eigenvalue(c)).unwrap().holds);
        }
    }

    #[test]
    fn potential_at_zero_time_degenerates() {
        let (v, b) = l2_potential(&Gq::zero());
        assert_eq!(v, rf("6/x^2", &b));
    }

    #[test]
    fn tau_potential_tail_terminates_within_bound() {
        let (v, _) = PotentialForm::Tau.potential(&Gq::one());
        let l = schrodinger(&v).unwrap();
        for c in [Convention::One, Convention::I] {
            let t = synth_wavefunction(&l, c, 4).unwrap();
            assert_eq!(t.order(), 2);
            assert!(check_left_eigen(&l, &t.to_wave(), &schrodinger_eigenvalue(c)).unwrap().holds);
        }
    }

    #[test]
    fn displayed_potential_has_a_residue() {
        let (v, _) = PotentialForm::Displayed.potential(&Gq::one());
        let l = schrodinger(&v).unwrap();
        assert!(matches!(synth_wavefunction(&l, Convention::One, 4), Err(KdvError::NonRational(_))));
    }

    #[test]
    fn forms_differ_by_the_linear_numerator_term() {
        let (a, b) = (PotentialForm::Displayed.potential(&Gq::one()).0, PotentialForm::Tau.potential(&Gq::one()).0);
        let (_, basis) = PotentialForm::Tau.potential(&Gq::one());
        assert_eq!(a.sub(&b), rf("60*x/(x^3-1)^2", &basis));
    }

    #[test]
    fn exponential_has_x_in_its_algebra() {
        let psi = WaveFunction::exponential(1, Convention::I);
        let b = RightOperator::derivative(1, 1).scale(&Convention::I.s().inv().unwrap());
        let x = MatPoly::scalar_monomial(Var::X, 1, Gq::one(), 1);
        assert!(check_right_eigen(&psi, &b, &x).unwrap().holds);
    }
}
