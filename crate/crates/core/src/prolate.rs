//! Time-and-band limiting on `[−T, T]`: the sinc-kernel integral operator and
//! the prolate differential operator `−d/dx (T² − x²) d/dx + W²x²`, both in
//! the orthonormal Legendre basis. Binary64 throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProlateError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("csv: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProlateConfig {
    /// Time half-width.
    pub t: f64,
    /// Bandwidth.
    pub w: f64,
    pub n_modes: usize,
    pub n_quad: usize,
}

impl ProlateConfig {
    pub fn new(t: f64, w: f64, n_modes: usize, n_quad: usize) -> Result<Self, ProlateError> {
        let cfg = Self { t, w, n_modes, n_quad };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `T = 1`, `W = 5π/2`, 40 modes, 200 nodes.
    pub fn reference() -> Self {
        Self { t: 1.0, w: 2.5 * std::f64::consts::PI, n_modes: 40, n_quad: 200 }
    }

    pub fn validate(&self) -> Result<(), ProlateError> {
        if !(self.t > 0.0 && self.t.is_finite()) {
            return Err(ProlateError::Config("T must be positive".into()));
        }
        if !(self.w >= 0.0 && self.w.is_finite()) {
            return Err(ProlateError::Config("W must be nonnegative".into()));
        }
        if self.n_modes == 0 {
            return Err(ProlateError::Config("at least one mode required".into()));
        }
        if self.n_quad < 2 * self.n_modes {
            return Err(ProlateError::Config(format!("n_quad = {} must be at least 2·n_modes = {}", self.n_quad, 2 * self.n_modes)));
        }
        Ok(())
    }

    /// `c = W·T`.
    pub fn c(&self) -> f64 {
        self.w * self.t
    }

    /// Shannon number `2WT/π`.
    pub fn shannon(&self) -> f64 {
        2.0 * self.w * self.t / std::f64::consts::PI
    }
}

/// Off-diagonal of the Jacobi matrix of `u` in the orthonormal Legendre
/// basis: `u·P̃_n = a_{n−1} P̃_{n−1} + a_n P̃_{n+1}`.
fn jacobi(n: usize) -> f64 {
    let n = n as f64;
    (n + 1.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)).sqrt()
}

/// Orthonormal Legendre values `P̃_0(u) … P̃_{k−1}(u)` on `[−1, 1]`.
pub fn legendre_orthonormal(u: f64, k: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(k);
    if k == 0 {
        return p;
    }
    p.push(std::f64::consts::FRAC_1_SQRT_2);
    if k > 1 {
        p.push(u * p[0] / jacobi(0));
    }
    for n in 1..k.saturating_sub(1) {
        let next = (u * p[n] - jacobi(n - 1) * p[n - 1]) / jacobi(n);
        p.push(next);
    }
    p
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// `P_n` from Chebyshev-like initial guesses. Nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `D + c²A²` with `D = diag(n(n+1))`; `A²` is taken from the untruncated
/// Jacobi matrix, so every entry is exact up to rounding.
pub fn build_l(cfg: &ProlateConfig) -> DMatrix<f64> {
    let n = cfg.n_modes;
    let c2 = cfg.c() * cfg.c();
    let mut l = DMatrix::zeros(n, n);
    for k in 0..n {
        let below = if k > 0 { jacobi(k - 1).powi(2) } else { 0.0 };
        l[(k, k)] = (k * (k + 1)) as f64 + c2 * (below + jacobi(k).powi(2));
        if k + 2 < n {
            let off = c2 * jacobi(k) * jacobi(k + 1);
            l[(k, k + 2)] = off;
            l[(k + 2, k)] = off;
        }
    }
    l
}

/// `sin(W·d)/d` with the limit `W` at `d = 0`.
fn sinc_kernel(w: f64, d: f64) -> f64 {
    if d.abs() < 1e-14 {
        w
    } else {
        (w * d).sin() / d
    }
}

/// `K[m][n] = ∬ φ_m(s) sin W(t−s)/(t−s) φ_n(t) ds dt` over `[−T, T]²` with
/// `φ_n(x) = P̃_n(x/T)/√T`, by tensor Gauss–Legendre quadrature. Rows are
/// assembled in parallel, each with a fixed summation order.
pub fn build_k(cfg: &ProlateConfig) -> DMatrix<f64> {
    let (u, wu) = gauss_legendre(cfg.n_quad);
    let x: Vec<f64> = u.iter().map(|v| v * cfg.t).collect();
    let wx: Vec<f64> = wu.iter().map(|v| v * cfg.t).collect();
    let scale = cfg.t.sqrt().recip();
    // phi[i][n] weighted by the quadrature weight
    let phi_w: Vec<Vec<f64>> = u
        .iter()
        .zip(&wx)
        .map(|(&ui, &wi)| legendre_orthonormal(ui, cfg.n_modes).into_iter().map(|p| p * scale * wi).collect())
        .collect();
    // g[i][n] = Σ_j k(x_i − x_j) w_j φ_n(x_j)
    let g: Vec<Vec<f64>> = (0..cfg.n_quad)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; cfg.n_modes];
            for (j, pj) in phi_w.iter().enumerate() {
                let k = sinc_kernel(cfg.w, x[i] - x[j]);
                for (r, p) in row.iter_mut().zip(pj) {
                    *r += k * p;
                }
            }
            row
        })
        .collect();
    let mut kmat = DMatrix::zeros(cfg.n_modes, cfg.n_modes);
    for m in 0..cfg.n_modes {
        for n in m..cfg.n_modes {
            let v: f64 = (0..cfg.n_quad).map(|i| phi_w[i][m] * g[i][n]).sum();
            kmat[(m, n)] = v;
            kmat[(n, m)] = v;
        }
    }
    kmat
}

/// `‖KL − LK‖_F / (‖K‖_F ‖L‖_F)` on the leading `(N − 4) × (N − 4)` block;
/// zero when `K` vanishes.
pub fn commutator_residual(k: &DMatrix<f64>, l: &DMatrix<f64>) -> f64 {
    const MARGIN: usize = 4;
    let n = k.nrows().saturating_sub(MARGIN);
    let (kn, ln) = (k.norm(), l.norm());
    if n == 0 || kn == 0.0 || ln == 0.0 {
        return 0.0;
    }
    let comm = k * l - l * k;
    comm.view((0, 0), (n, n)).norm() / (kn * ln)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProlateMode {
    pub index: usize,
    /// Eigenvalue of the differential operator.
    pub chi: f64,
    /// Rayleigh quotient of the kernel operator.
    pub mu: f64,
    /// `‖Kv − μv‖₂ / ‖K‖₂`.
    pub cross_residual: f64,
    /// `0` for even, `1` for odd Legendre support.
    pub parity: usize,
    #[serde(skip)]
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProlateReport {
    pub config: ProlateConfig,
    pub c: f64,
    pub shannon: f64,
    pub commutator_residual: f64,
    /// Largest relative change of `K` entries when `n_quad` is doubled.
    pub quadrature_change: f64,
    pub k_norm2: f64,
    pub k_eigen_range: (f64, f64),
    pub l_min_eigen: f64,
    /// `#{n : μ_n > max μ / 2}`.
    pub shannon_count: usize,
    /// Largest cross residual over the leading half of the modes.
    pub max_cross_residual_leading: f64,
    /// Modes ordered by descending `μ`.
    pub modes: Vec<ProlateMode>,
}

/// Eigenvectors of `L` (ascending χ), with `μ` from the kernel matrix.
pub fn prolate_eigs(k: &DMatrix<f64>, l: &DMatrix<f64>) -> Result<Vec<ProlateMode>, ProlateError> {
    let eig = SymmetricEigen::try_new(l.clone(), 1e-15, 10_000).ok_or(ProlateError::NoConvergence)?;
    let knorm = k.clone().symmetric_eigenvalues().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut order: Vec<usize> = (0..l.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut modes: Vec<ProlateMode> = order
        .iter()
        .enumerate()
        .map(|(index, &col)| {
            let mut v: DVector<f64> = eig.eigenvectors.column(col).into_owned();
            // sign: largest coefficient positive
            let imax = v.iamax();
            if v[imax] < 0.0 {
                v = -v;
            }
            let kv = k * &v;
            let mu = v.dot(&kv);
            let cross = (kv - &v * mu).norm() / if knorm > 0.0 { knorm } else { 1.0 };
            let even: f64 = v.iter().step_by(2).map(|c| c * c).sum();
            ProlateMode {
                index,
                chi: eig.eigenvalues[col],
                mu,
                cross_residual: cross,
                parity: usize::from(even < 0.5),
                coefficients: v.iter().copied().collect(),
            }
        })
        .collect();
    modes.sort_by(|a, b| b.mu.total_cmp(&a.mu));
    Ok(modes)
}

/// Builds both matrices, checks commutation, quadrature resolution and the
/// eigenvector cross residuals.
pub fn run_prolate(cfg: &ProlateConfig) -> Result<ProlateReport, ProlateError> {
    cfg.validate()?;
    let l = build_l(cfg);
    let k = build_k(cfg);
    let k2 = build_k(&ProlateConfig { n_quad: 2 * cfg.n_quad, ..*cfg });
    let kmax = k.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let quadrature_change = if kmax > 0.0 { (&k - &k2).iter().fold(0.0f64, |a, v| a.max(v.abs())) / kmax } else { 0.0 };
    let kev = k.clone().symmetric_eigenvalues();
    let k_eigen_range = kev.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let l_min_eigen = l.clone().symmetric_eigenvalues().min();
    let modes = prolate_eigs(&k, &l)?;
    let mu_max = modes.first().map_or(0.0, |m| m.mu);
    let shannon_count = modes.iter().filter(|m| m.mu > mu_max / 2.0).count();
    let max_cross_residual_leading =
        modes.iter().filter(|m| m.index < cfg.n_modes / 2).map(|m| m.cross_residual).fold(0.0, f64::max);
    Ok(ProlateReport {
        config: *cfg,
        c: cfg.c(),
        shannon: cfg.shannon(),
        commutator_residual: commutator_residual(&k, &l),
        quadrature_change,
        k_norm2: k_eigen_range.1.abs().max(k_eigen_range.0.abs()),
        k_eigen_range,
        l_min_eigen,
        shannon_count,
        max_cross_residual_leading,
        modes,
    })
}

/// One row per mode: index, χ, μ, then the Legendre coefficients.
pub fn write_modes_csv<W: std::io::Write>(modes: &[ProlateMode], out: W) -> Result<(), ProlateError> {
    let err = |e: csv::Error| ProlateError::Csv(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let width = modes.first().map_or(0, |m| m.coefficients.len());
    let mut header = vec!["n".to_string(), "chi".to_string(), "mu".to_string()];
    header.extend((0..width).map(|k| format!("c{k}")));
    w.write_record(&header).map_err(err)?;
    for m in modes {
        let mut rec = vec![m.index.to_string(), format!("{:e}", m.chi), format!("{:e}", m.mu)];
        rec.extend(m.coefficients.iter().map(|c| format!("{c:e}")));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| ProlateError::Csv(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m18: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((m18 - 2.0 / 19.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn legendre_is_orthonormal() {
        let (x, w) = gauss_legendre(30);
        let vals: Vec<Vec<f64>> = x.iter().map(|&u| legendre_orthonormal(u, 12)).collect();
        for m in 0..12 {
            for n in 0..12 {
                let g: f64 = vals.iter().zip(&w).map(|(v, w)| w * v[m] * v[n]).sum();
                assert!((g - f64::from(u8::from(m == n))).abs() < 1e-13, "{m} {n} {g}");
            }
        }
    }

    #[test]
    fn free_operator_is_diagonal() {
        let l = build_l(&ProlateConfig::new(1.0, 0.0, 6, 12).unwrap());
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { (i * (i + 1)) as f64 } else { 0.0 };
                assert_eq!(l[(i, j)], want);
            }
        }
    }

    #[test]
    fn operator_is_pentadiagonal_with_parity() {
        let l = build_l(&ProlateConfig::reference());
        for i in 0..40 {
            for j in 0..40 {
                let d = usize::abs_diff(i, j);
                if d == 1 || d > 2 {
                    assert_eq!(l[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn small_bandwidth_kernel() {
        let w = 1e-3;
        let k = build_k(&ProlateConfig::new(1.0, w, 4, 16).unwrap());
        assert!((k[(0, 0)] - 2.0 * w).abs() < 1e-5 * 2.0 * w);
    }

    #[test]
    fn config_validation() {
        assert!(ProlateConfig::new(1.0, 1.0, 10, 19).is_err());
        assert!(ProlateConfig::new(0.0, 1.0, 10, 20).is_err());
    }
}
