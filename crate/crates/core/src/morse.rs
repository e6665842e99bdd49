//! Morse index of the weighted radial solution, by closed formula and by
//! counting negative eigenvalues mode by mode.
//!
//! With `x = (α+2)/2 · √(-ν₁)` the index is `1 + 2⌊x⌋` for `x ∉ ℕ` and
//! `2x - 1` for `x ∈ ℕ`. Angular mode `k` contributes (twice for `k ≥ 1`)
//! exactly when `4k²/(2+α)² + ν₁ < 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::RadialMesh;
use crate::model::Nonlinearity;
use crate::spectral::{check_morse_index_one, index_one_solution, nu1_closed_form_exp, WeightedSpectralProblem};

/// Distance to an integer below which `x` is treated as an integer.
pub const INTEGER_TOL: f64 = 1e-9;
/// Distance to an integer inside which results are flagged as ambiguous.
pub const QUARANTINE: f64 = 1e-6;

/// `(α+2)/2 · √(-ν₁)`.
pub fn morse_argument(alpha: f64, nu1: f64) -> f64 {
    0.5 * (alpha + 2.0) * (-nu1).sqrt()
}

/// Morse index from `ν₁ < 0`.
pub fn morse_index_formula(alpha: f64, nu1: f64) -> Result<usize> {
    if !(nu1 < 0.0) {
        return Err(Error::Domain(format!("the index formula needs nu1 < 0, got {nu1}")));
    }
    if alpha < 0.0 {
        return Err(Error::Domain(format!("alpha must be nonnegative, got {alpha}")));
    }
    let x = morse_argument(alpha, nu1);
    let n = x.round();
    Ok(if (x - n).abs() <= INTEGER_TOL { 2 * n as usize - 1 } else { 1 + 2 * x.floor() as usize })
}

/// Morse index for the exponential nonlinearity, `ν₁ = (λ-2)/2`.
pub fn morse_index_exp(lambda: f64, alpha: f64) -> Result<usize> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::Domain(format!("lambda must lie in (0, 2), got {lambda}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    morse_index_formula(alpha, nu1_closed_form_exp(lambda)?)
}

/// Whether `x` lies in the quarantine band around an integer, and the two
/// index values on either side if so.
pub fn boundary_candidates(x: f64) -> Option<(usize, usize)> {
    let n = x.round();
    ((x - n).abs() < QUARANTINE && n >= 1.0).then(|| (2 * n as usize - 1, 2 * n as usize + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeCount {
    pub k: usize,
    /// Least weighted eigenvalue `Λ(k)` of mode `k` from the discrete solve.
    pub least: f64,
    /// `k² + (2+α)²ν₁/4` with the computed `ν₁`.
    pub identity: f64,
    /// Negative eigenvalues of the mode problem.
    pub negatives: usize,
    /// Angular multiplicity (1 for `k = 0`, 2 otherwise).
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorseReport {
    pub lambda: f64,
    pub alpha: f64,
    pub nu1: f64,
    pub argument: f64,
    pub m_formula: usize,
    pub m_direct: usize,
    pub per_mode: Vec<ModeCount>,
    pub boundary_flag: bool,
    /// Index values on either side of the discontinuity when flagged.
    pub candidates: Option<(usize, usize)>,
}

impl MorseReport {
    /// Smallest mode whose least eigenvalue is nonnegative.
    pub fn first_nonnegative_mode(&self) -> Option<usize> {
        self.per_mode.iter().find(|m| m.least >= 0.0).map(|m| m.k)
    }
}

/// Morse index by counting, for each angular mode `k ≤ k_max`, the negative
/// eigenvalues of the autonomous mode problem
/// `-η'' - η'/r - f'(λ,v)η + 4k²/(2+α)² η/r² = ν η/r²`.
/// Each mode's least eigenvalue is mapped back to `Λ(k) = (2+α)²ν/4`.
pub fn morse_index_direct(lambda: f64, alpha: f64, nl: &Nonlinearity, mesh: &RadialMesh, k_max: usize) -> Result<MorseReport> {
    Ok(morse_index_direct_many(lambda, &[alpha], nl, mesh, k_max)?.remove(0))
}

/// [`morse_index_direct`] for several `α` at one `λ`, reusing the assembled forms.
pub fn morse_index_direct_many(
    lambda: f64,
    alphas: &[f64],
    nl: &Nonlinearity,
    mesh: &RadialMesh,
    k_max: usize,
) -> Result<Vec<MorseReport>> {
    let sol = index_one_solution(lambda, nl)?;
    check_morse_index_one(&sol, mesh)?;
    let problem = WeightedSpectralProblem::new(move |r| sol.autonomous_potential(r), 0.0)?.assemble(mesh)?;
    let nu1 = problem.solve(0.0, 1)?.eigenvalues[0];
    if !(nu1 < 0.0) {
        return Err(Error::Domain(format!("no negative weighted eigenvalue at lambda = {lambda}")));
    }
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0) {
                return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
            }
            let x = morse_argument(alpha, nu1);
            let required = x.ceil() as usize + 2;
            if k_max < required {
                return Err(Error::ModeCutoff { k_max, required });
            }
            let scale = 0.25 * (2.0 + alpha).powi(2);
            let mut per_mode = Vec::with_capacity(k_max + 1);
            for k in 0..=k_max {
                let shift = (k * k) as f64 / scale;
                let res = problem.solve(shift, 1)?;
                per_mode.push(ModeCount {
                    k,
                    least: scale * res.eigenvalues[0],
                    identity: (k * k) as f64 + scale * nu1,
                    negatives: res.negative_count,
                    multiplicity: if k == 0 { 1 } else { 2 },
                });
            }
            let m_direct = per_mode.iter().map(|m| m.negatives * m.multiplicity).sum();
            let candidates = boundary_candidates(x);
            Ok(MorseReport {
                lambda,
                alpha,
                nu1,
                argument: x,
                m_formula: morse_index_formula(alpha, nu1)?,
                m_direct,
                per_mode,
                boundary_flag: candidates.is_some(),
                candidates,
            })
        })
        .collect()
}

/// Morse index of the entire-plane solution `U_α`:
/// `1 + 2⌊(α+2)/2⌋` if `(α+2)/2 ∉ ℕ`, else `1 + α`.
pub fn plane_morse(alpha: f64) -> Result<usize> {
    if !(alpha >= 0.0) {
        return Err(Error::Domain(format!("alpha must be nonnegative, got {alpha}")));
    }
    let h = 0.5 * (alpha + 2.0);
    let n = h.round();
    Ok(if (h - n).abs() <= INTEGER_TOL { 2 * n as usize - 1 } else { 1 + 2 * h.floor() as usize })
}
