//! Degeneracy of the radial solution and the nonradial branches that
//! bifurcate from it.
//!
//! The radial solution `u_{λ,α}` is degenerate in angular mode `k` exactly
//! when `F_k(λ, α) = ν₁(λ) + 4k²/(2+α)² = 0`.

pub mod continuation;
pub mod disk;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::model::Nonlinearity;
use crate::spectral::{nu1, nu1_closed_form_exp, Nu1};

pub use continuation::{continue_branch, BifurcationPoint, BranchRun, BranchState, Controls, Termination};
pub use disk::{Diagnostics, DiskGrid};

/// Source of `ν₁(λ)`.
pub trait Nu1Provider: Sync {
    fn nu1(&self, lambda: f64) -> Result<f64>;

    /// Open interval of admissible loads.
    fn lambda_range(&self) -> (f64, f64);
}

/// `ν₁(λ) = (λ-2)/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedFormNu1;

impl Nu1Provider for ClosedFormNu1 {
    fn nu1(&self, lambda: f64) -> Result<f64> {
        nu1_closed_form_exp(lambda)
    }

    fn lambda_range(&self) -> (f64, f64) {
        (0.0, 2.0)
    }
}

/// `ν₁(λ)` from the discrete Rayleigh quotient. Loads without a negative
/// eigenvalue report the infimum `0`.
#[derive(Debug, Clone)]
pub struct NumericNu1 {
    pub nonlinearity: Nonlinearity,
    pub mesh: RadialMesh,
}

impl NumericNu1 {
    pub fn new(nonlinearity: Nonlinearity, mesh: RadialMesh) -> Self {
        Self { nonlinearity, mesh }
    }
}

impl Nu1Provider for NumericNu1 {
    fn nu1(&self, lambda: f64) -> Result<f64> {
        Ok(match nu1(lambda, &self.nonlinearity, &self.mesh)? {
            Nu1::Negative(v) => v,
            Nu1::NoNegativeEigenvalue => 0.0,
        })
    }

    fn lambda_range(&self) -> (f64, f64) {
        self.nonlinearity.lambda_range()
    }
}

/// `F_k(λ, α) = ν₁(λ) + 4k²/(2+α)²`.
pub fn f_k(lambda: f64, alpha: f64, k: usize, provider: &dyn Nu1Provider) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("F_k needs k >= 1".into()));
    }
    Ok(provider.nu1(lambda)? + 4.0 * (k * k) as f64 / (2.0 + alpha).powi(2))
}

/// `λ_k = 2 - 8k²/(α+2)²`; values `≤ 0` mean mode `k` never degenerates.
pub fn lambda_k_exp(alpha: f64, k: usize) -> f64 {
    2.0 - 8.0 * (k * k) as f64 / (alpha + 2.0).powi(2)
}

/// `μ_k = (2+α)²/2 - 2k²`.
pub fn mu_k_exp(alpha: f64, k: usize) -> f64 {
    0.5 * (2.0 + alpha).powi(2) - 2.0 * (k * k) as f64
}

/// Number of bifurcation values: `1 + ⌊α/2⌋` if `α/2 ∉ ℕ`, else `α/2`.
pub fn count_j(alpha: f64) -> usize {
    let h = 0.5 * alpha;
    let n = h.round();
    if (h - n).abs() <= 1e-9 {
        n as usize
    } else {
        1 + h.floor() as usize
    }
}

/// `α` on `γ_k` for the exponential problem: `2k√(2/(2-λ)) - 2`.
pub fn gamma_k_alpha_exp(lambda: f64, k: usize) -> f64 {
    2.0 * k as f64 * (2.0 / (2.0 - lambda)).sqrt() - 2.0
}

/// `α_k(λ) = 2k/√(-ν₁(λ)) - 2`, the point of `γ_k` above `λ`.
pub fn alpha_k(lambda: f64, k: usize, provider: &dyn Nu1Provider) -> Result<Option<f64>> {
    let nu = provider.nu1(lambda)?;
    Ok((nu < 0.0).then(|| 2.0 * k as f64 / (-nu).sqrt() - 2.0))
}

/// Roots of `F_k(·, α)` in `range`, from sign changes on a uniform grid
/// refined by safeguarded regula falsi.
pub fn detect_degeneracy(range: (f64, f64), alpha: f64, k: usize, provider: &dyn Nu1Provider) -> Result<Vec<f64>> {
    let (a, b) = range;
    if !(a < b) {
        return Err(Error::Domain(format!("empty load range ({a}, {b})")));
    }
    const GRID: usize = 24;
    let f = |l: f64| f_k(l, alpha, k, provider);
    let xs: Vec<f64> = (0..=GRID).map(|i| a + (b - a) * i as f64 / GRID as f64).collect();
    let fs = xs.iter().map(|&x| f(x)).collect::<Result<Vec<f64>>>()?;
    let mut roots = Vec::new();
    for w in 0..GRID {
        let (x0, x1, f0, f1) = (xs[w], xs[w + 1], fs[w], fs[w + 1]);
        if f0 == 0.0 {
            roots.push(x0);
            continue;
        }
        if f0 * f1 < 0.0 {
            roots.push(refine_root(&f, x0, x1, f0, f1)?);
        }
    }
    if fs[GRID] == 0.0 {
        roots.push(xs[GRID]);
    }
    Ok(roots)
}

/// Illinois regula falsi with periodic bisection steps.
fn refine_root(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    for it in 0..200 {
        let (lo, hi) = (a.min(b), a.max(b));
        let mut x = b - fb * (b - a) / (fb - fa);
        if !(x > lo && x < hi) || it % 8 == 7 {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 || (hi - lo) <= 1e-15 * (1.0 + x.abs()) || fx.abs() <= 1e-14 {
            return Ok(x);
        }
        if fx * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = x;
        fb = fx;
    }
    Err(Error::NoConvergence { solver: "degeneracy root", iterations: 200, residual: fa.abs().min(fb.abs()) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyCurve {
    pub k: usize,
    /// `(λ, α)` pairs with `F_k(λ, α) = 0`.
    pub samples: Vec<(f64, f64)>,
}

/// Samples `γ_k` by solving `F_k = 0` in `λ` for each `α` of `alphas`.
/// Values of `α` without a root are skipped.
pub fn trace_gamma_k(k: usize, alphas: &[f64], provider: &dyn Nu1Provider) -> Result<DegeneracyCurve> {
    if k == 0 {
        return Err(Error::Domain("gamma_k needs k >= 1".into()));
    }
    let (lo, hi) = provider.lambda_range();
    let range = (lo + 1e-6 * (hi - lo), hi - 1e-9 * (hi - lo));
    let mut samples = Vec::new();
    for &alpha in alphas {
        if let Some(&l) = detect_degeneracy(range, alpha, k, provider)?.first() {
            samples.push((l, alpha));
        }
    }
    if samples.is_empty() {
        return Err(Error::Domain(format!("gamma_{k} has no point for the given alpha values")));
    }
    Ok(DegeneracyCurve { k, samples })
}

/// Samples `γ_k` through `α_k(λ)` for each load of `lambdas`.
pub fn trace_gamma_k_by_lambda(k: usize, lambdas: &[f64], provider: &dyn Nu1Provider) -> Result<DegeneracyCurve> {
    if k == 0 {
        return Err(Error::Domain("gamma_k needs k >= 1".into()));
    }
    let mut samples = Vec::new();
    for &l in lambdas {
        if let Some(a) = alpha_k(l, k, provider)? {
            if a > 0.0 {
                samples.push((l, a));
            }
        }
    }
    Ok(DegeneracyCurve { k, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(lambda_k_exp(2.0, 1), 1.5);
        assert!((lambda_k_exp(4.0, 2) - 10.0 / 9.0).abs() < 1e-15);
        assert_eq!(lambda_k_exp(2.0, 2), 0.0);
        assert_eq!(mu_k_exp(2.0, 1), 6.0);
        assert_eq!(mu_k_exp(5.0, 3), 6.5);
        assert_eq!(count_j(2.0), 1);
        assert_eq!(count_j(5.0), 3);
        assert_eq!(count_j(1.0), 1);
        assert_eq!(count_j(4.0), 2);
    }

    #[test]
    fn f_k_vanishes_at_lambda_k() {
        assert!(f_k(1.5, 2.0, 1, &ClosedFormNu1).unwrap().abs() < 1e-15);
        assert!(f_k(1.0, 2.0, 0, &ClosedFormNu1).is_err());
    }

    #[test]
    fn detects_single_root() {
        let roots = detect_degeneracy((0.1, 1.9), 2.0, 1, &ClosedFormNu1).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.5).abs() < 1e-12);
        assert!(detect_degeneracy((0.1, 1.9), 2.0, 3, &ClosedFormNu1).unwrap().is_empty());
    }

    #[test]
    fn gamma_k_matches_closed_form() {
        let c = trace_gamma_k(1, &[0.5, 2.0, 6.0], &ClosedFormNu1).unwrap();
        for (l, a) in c.samples {
            assert!((gamma_k_alpha_exp(l, 1) - a).abs() < 1e-8);
        }
        let c = trace_gamma_k_by_lambda(2, &[0.5, 1.0, 1.5], &ClosedFormNu1).unwrap();
        for (l, a) in c.samples {
            assert!((gamma_k_alpha_exp(l, 2) - a).abs() < 1e-12);
        }
    }
}
