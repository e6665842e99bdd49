//! Pseudo-arclength continuation of the nonradial branch that leaves the
//! radial curve at `μ_k`.
//!
//! The branch is entered by a Newton solve with the mode-`k` amplitude
//! pinned to `a₀` along the degenerate eigenfunction. From there a
//! tangent predictor and a Newton corrector on the system
//! `(residual, arclength constraint)` follow the curve through folds.

use serde::{Deserialize, Serialize};

use super::disk::{Diagnostics, DiskGrid};
use super::{count_j, lambda_k_exp, mu_k_exp};
use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix};
use crate::model::{Branch, ProblemParams, RadialSolution};
use crate::spectral::eigenfunction_exp;

/// Step and stopping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    /// Radial cells.
    pub n: usize,
    /// Nonradial harmonics `M`.
    pub modes: usize,
    /// Initial amplitude along the degenerate eigenfunction.
    pub amplitude: f64,
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub mu_stop: f64,
    pub u_cap: f64,
    /// Upper face of the parameter box.
    pub mu_max: f64,
    pub max_steps: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            n: 256,
            modes: 8,
            amplitude: 1e-3,
            step: 0.05,
            min_step: 1e-4,
            max_step: 0.2,
            mu_stop: 1e-3,
            u_cap: 30.0,
            mu_max: f64::INFINITY,
            max_steps: 5000,
            newton_tol: 1e-10,
            max_newton: 10,
        }
    }
}

/// Where a nonradial branch leaves the radial curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BifurcationPoint {
    pub mu: f64,
    pub alpha: f64,
    pub k: usize,
}

impl BifurcationPoint {
    /// `μ_k` of the exponential problem; requires `1 ≤ k ≤ j(α)`.
    pub fn exponential(alpha: f64, k: usize) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        if k == 0 || k > count_j(alpha) || lambda_k_exp(alpha, k) <= 0.0 {
            return Err(Error::Domain(format!("mode {k} has no bifurcation value at alpha = {alpha}")));
        }
        Ok(Self { mu: mu_k_exp(alpha, k), alpha, k })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchState {
    pub mu: f64,
    pub coeffs: Vec<f64>,
    pub arclength: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    /// `μ` fell to the stopping value.
    MuStop,
    /// `max u` reached the cap.
    UCap,
    /// Left the parameter box through the named face.
    ParameterBox(String),
    MaxSteps,
    /// Step control could not make progress.
    StepTooSmall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRun {
    pub grid: DiskGrid,
    pub start: BifurcationPoint,
    pub states: Vec<BranchState>,
    /// Indices of states after which `μ` reverses direction.
    pub folds: Vec<usize>,
    pub termination: Termination,
}

/// Solve `[J b; dᵀ e] (x, y) = (f, g)` by block elimination with two rounds
/// of iterative refinement.
fn bordered_solve(
    jac: &BandMatrix,
    lu: &BandLu,
    b: &[f64],
    d: &[f64],
    e: f64,
    f: &[f64],
    g: f64,
) -> (Vec<f64>, f64) {
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(a, c)| a * c).sum() };
    let yb = lu.solve(b);
    let denom = e - dot(d, &yb);
    let once = |f: &[f64], g: f64| -> (Vec<f64>, f64) {
        let z = lu.solve(f);
        let t = (g - dot(d, &z)) / denom;
        (z.iter().zip(&yb).map(|(zi, yi)| zi - t * yi).collect(), t)
    };
    let (mut x, mut y) = once(f, g);
    for _ in 0..2 {
        let jx = jac.matvec(&x);
        let rf: Vec<f64> = (0..f.len()).map(|i| f[i] - jx[i] - b[i] * y).collect();
        let rg = g - dot(d, &x) - e * y;
        let (dx, dy) = once(&rf, rg);
        x.iter_mut().zip(&dx).for_each(|(a, c)| *a += c);
        y += dy;
    }
    (x, y)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Corrected {
    c: Vec<f64>,
    mu: f64,
    residual: f64,
    iterations: usize,
}

/// Newton on `R(c, μ) = 0` plus one linear constraint `dᵀc + e μ = g`.
fn newton(grid: &DiskGrid, mut c: Vec<f64>, mut mu: f64, d: &[f64], e: f64, g: f64, ctl: &Controls) -> Result<Corrected> {
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    let mut res = grid.residual(&c, mu)?;
    for it in 0..ctl.max_newton {
        let (jac, d_mu) = grid.jacobian(&c, mu)?;
        let lu = jac.clone().factorize()?;
        let neg: Vec<f64> = res.iter().map(|v| -v).collect();
        let gap = g - dot(d, &c) - e * mu;
        let (dc, dmu) = bordered_solve(&jac, &lu, &d_mu, d, e, &neg, gap);
        c.iter_mut().zip(&dc).for_each(|(a, b)| *a += b);
        mu += dmu;
        if !mu.is_finite() || c.iter().any(|v| !v.is_finite()) {
            break;
        }
        let prev = max_abs(&res);
        res = grid.residual(&c, mu)?;
        let now = max_abs(&res);
        if now <= ctl.newton_tol && max_abs(&dc) <= 1e-8 * (1.0 + max_abs(&c)) {
            return Ok(Corrected { c, mu, residual: now, iterations: it + 1 });
        }
        if it >= 2 && now > prev {
            break;
        }
    }
    Err(Error::NoConvergence { solver: "branch Newton", iterations: ctl.max_newton, residual: max_abs(&res) })
}

/// Coefficient-space vector of `field_dot(v, ·)`.
fn dual(grid: &DiskGrid, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for i in 0..grid.n {
        let vol = grid.radius(i) * grid.h();
        for j in 0..=grid.modes {
            let w = if j == 0 { 2.0 * std::f64::consts::PI } else { std::f64::consts::PI };
            out[grid.idx(i, j)] = vol * w * v[grid.idx(i, j)];
        }
    }
    out
}

/// Unit tangent `(t_c, t_μ)` with `dᵀt_c + e t_μ = 1` for the previous
/// direction `(d, e)`.
fn tangent(grid: &DiskGrid, c: &[f64], mu: f64, d: &[f64], e: f64) -> Result<(Vec<f64>, f64)> {
    let (jac, d_mu) = grid.jacobian(c, mu)?;
    let lu = jac.clone().factorize()?;
    let zeros = vec![0.0; c.len()];
    let (tc, tm) = bordered_solve(&jac, &lu, &d_mu, d, e, &zeros, 1.0);
    let norm = (grid.field_dot(&tc, &tc) + tm * tm).sqrt();
    Ok((tc.iter().map(|v| v / norm).collect(), tm / norm))
}

fn make_state(grid: &DiskGrid, c: Vec<f64>, mu: f64, arclength: f64, residual: f64) -> BranchState {
    let mut diagnostics = grid.diagnostics(&c, mu);
    diagnostics.residual = residual;
    BranchState { mu, coeffs: c, arclength, diagnostics }
}

/// Follow the nonradial branch from `start`. `direction` (±1) selects the
/// sign of the initial amplitude.
pub fn continue_branch(start: &BifurcationPoint, direction: f64, ctl: &Controls) -> Result<BranchRun> {
    let grid = DiskGrid::new(ctl.n, ctl.modes, start.k, start.alpha)?;
    let params = ProblemParams::exponential_mu(start.mu, start.alpha)?;
    let radial = RadialSolution::exponential(&params, Branch::Blowup)?;
    let lambda = params.lambda;
    let p = 0.5 * (2.0 + start.alpha);

    let mut psi = vec![0.0; grid.dim()];
    for i in 0..grid.n {
        psi[grid.idx(i, 1)] = eigenfunction_exp(lambda, grid.radius(i).powf(p));
    }
    let norm = grid.field_dot(&psi, &psi).sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);

    let amp = ctl.amplitude * direction.signum();
    let mut c0 = grid.embed_radial(&radial);
    c0.iter_mut().zip(&psi).for_each(|(a, b)| *a += amp * b);
    let pin = dual(&grid, &psi);
    let first = newton(&grid, c0, start.mu, &pin, 0.0, amp, ctl)?;

    let mut states = vec![make_state(&grid, first.c, first.mu, 0.0, first.residual)];
    let (mut tc, mut tm) = tangent(&grid, &states[0].coeffs, states[0].mu, &pin, 0.0)?;
    let mut step = ctl.step;
    let mut folds = Vec::new();
    let termination;
    loop {
        let cur = states.last().expect("at least one state");
        if states.len() > ctl.max_steps {
            termination = Termination::MaxSteps;
            break;
        }
        let d = dual(&grid, &tc);
        let base = grid.field_dot(&tc, &cur.coeffs) + tm * cur.mu;
        let mut accepted = None;
        while step >= ctl.min_step {
            let guess: Vec<f64> = cur.coeffs.iter().zip(&tc).map(|(a, b)| a + step * b).collect();
            match newton(&grid, guess, cur.mu + step * tm, &d, tm, base + step, ctl) {
                Ok(sol) => {
                    accepted = Some(sol);
                    break;
                }
                Err(_) => step *= 0.5,
            }
        }
        let Some(sol) = accepted else {
            termination = Termination::StepTooSmall;
            break;
        };
        let state = make_state(&grid, sol.c, sol.mu, cur.arclength + step, sol.residual);
        let (nc, nm) = tangent(&grid, &state.coeffs, state.mu, &d, tm)?;
        if nm * tm < 0.0 {
            folds.push(states.len());
        }
        tc = nc;
        tm = nm;
        if sol.iterations <= 3 {
            step = (2.0 * step).min(ctl.max_step);
        }
        let (mu, max_u) = (state.mu, state.diagnostics.max_u);
        states.push(state);
        if mu <= ctl.mu_stop {
            termination = if mu > 0.0 { Termination::MuStop } else { Termination::ParameterBox("mu = 0".into()) };
            break;
        }
        if max_u >= ctl.u_cap {
            termination = Termination::UCap;
            break;
        }
        if mu >= ctl.mu_max {
            termination = Termination::ParameterBox("mu upper bound".into());
            break;
        }
    }
    Ok(BranchRun { grid, start: *start, states, folds, termination })
}

impl BranchRun {
    /// `u` at every collocation point of a state is invariant under
    /// `θ ↦ θ + 2π/k`; largest deviation over the grid.
    pub fn rotation_defect(&self, state: &BranchState) -> f64 {
        let g = &self.grid;
        let shift = 2.0 * std::f64::consts::PI / g.k as f64;
        let mut worst: f64 = 0.0;
        for i in 0..g.n {
            for p in 0..g.angular {
                let th = g.phi(p) / g.k as f64;
                let a = g.value_at_angle(&state.coeffs, i, th);
                let b = g.value_at_angle(&state.coeffs, i, th + shift);
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }

    /// Largest `|u(r, θ + π) - u(r, θ)|` over the collocation grid.
    pub fn half_turn_defect(&self, state: &BranchState) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for i in 0..g.n {
            for p in 0..g.angular {
                let th = g.phi(p) / g.k as f64;
                let a = g.value_at_angle(&state.coeffs, i, th);
                let b = g.value_at_angle(&state.coeffs, i, th + std::f64::consts::PI);
                worst = worst.max((a - b).abs());
            }
        }
        worst
    }
}
