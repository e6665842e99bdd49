//! Radial solutions of the weighted problem
//! `-Δu = ((2+α)/2)^2 |x|^α f(λ, u)` on the unit disk, the radial change of
//! variables `u(r) = v(r^((2+α)/2))` linking it to the autonomous problem
//! `-Δv = f(λ, v)`, and the load conversion `μ = λ((2+α)/2)^2`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A user-supplied nonlinearity `f(λ, s)` together with `∂f/∂s`.
#[derive(Clone)]
pub struct CustomNonlinearity {
    pub name: String,
    pub f: ScalarFn,
    pub fprime: ScalarFn,
    /// Open interval `(a, b)` of admissible loads.
    pub lambda_range: (f64, f64),
}

impl fmt::Debug for CustomNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomNonlinearity")
            .field("name", &self.name)
            .field("lambda_range", &self.lambda_range)
            .finish_non_exhaustive()
    }
}

/// The nonlinearity `f(λ, s)` of the problem.
#[derive(Debug, Clone)]
pub enum Nonlinearity {
    /// `f(λ, s) = λ e^s`, loads `λ ∈ (0, 2]`.
    Exponential,
    Custom(CustomNonlinearity),
}

impl Nonlinearity {
    pub fn custom<F, G>(name: &str, lambda_range: (f64, f64), f: F, fprime: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Nonlinearity::Custom(CustomNonlinearity {
            name: name.to_string(),
            f: Arc::new(f),
            fprime: Arc::new(fprime),
            lambda_range,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Nonlinearity::Exponential => "exponential",
            Nonlinearity::Custom(c) => &c.name,
        }
    }

    pub fn f(&self, lambda: f64, s: f64) -> f64 {
        match self {
            Nonlinearity::Exponential => lambda * s.exp(),
            Nonlinearity::Custom(c) => (c.f)(lambda, s),
        }
    }

    pub fn fprime(&self, lambda: f64, s: f64) -> f64 {
        match self {
            Nonlinearity::Exponential => lambda * s.exp(),
            Nonlinearity::Custom(c) => (c.fprime)(lambda, s),
        }
    }

    /// Load interval; the exponential upper end `2` is itself admissible.
    pub fn lambda_range(&self) -> (f64, f64) {
        match self {
            Nonlinearity::Exponential => (0.0, 2.0),
            Nonlinearity::Custom(c) => c.lambda_range,
        }
    }

    /// Largest mismatch `|(f(s+h) - f(s))/h - f'(s)|` over the sample points.
    pub fn derivative_mismatch(&self, lambda: f64, samples: &[f64], h: f64) -> f64 {
        samples
            .iter()
            .map(|&s| ((self.f(lambda, s + h) - self.f(lambda, s)) / h - self.fprime(lambda, s)).abs())
            .fold(0.0, f64::max)
    }
}

/// `μ = λ ((2+α)/2)^2`.
pub fn mu_of_lambda(lambda: f64, alpha: f64) -> f64 {
    let c = 0.5 * (2.0 + alpha);
    lambda * c * c
}

/// Inverse of [`mu_of_lambda`].
pub fn lambda_of_mu(mu: f64, alpha: f64) -> f64 {
    let c = 0.5 * (2.0 + alpha);
    mu / (c * c)
}

/// Full parameter point `(λ, α, μ, f)`.
#[derive(Debug, Clone)]
pub struct ProblemParams {
    pub lambda: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nonlinearity: Nonlinearity,
}

impl ProblemParams {
    pub fn new(lambda: f64, alpha: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
        }
        let (a, b) = nonlinearity.lambda_range();
        let upper_ok = match nonlinearity {
            Nonlinearity::Exponential => lambda <= b,
            Nonlinearity::Custom(_) => lambda < b,
        };
        if !(lambda > a && upper_ok) {
            return Err(Error::Domain(format!(
                "lambda = {lambda} outside the admissible range ({a}, {b}) for {}",
                nonlinearity.name()
            )));
        }
        Ok(Self { lambda, alpha, mu: mu_of_lambda(lambda, alpha), nonlinearity })
    }

    pub fn exponential(lambda: f64, alpha: f64) -> Result<Self> {
        Self::new(lambda, alpha, Nonlinearity::Exponential)
    }

    /// Exponential problem in the merged form `-Δu = μ|x|^α e^u`.
    pub fn exponential_mu(mu: f64, alpha: f64) -> Result<Self> {
        let mut p = Self::new(lambda_of_mu(mu, alpha), alpha, Nonlinearity::Exponential)?;
        p.mu = mu;
        Ok(p)
    }
}

/// Which radial solution of the exponential problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Minimal solution, scale `δ⁺`.
    Minimal,
    /// Morse-index-one solution, scale `δ⁻`, blowing up at the origin as `λ → 0`.
    Blowup,
    /// The unique solution at `λ = 2`, `δ = 1`.
    Critical,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Branch::Minimal => "minimal",
            Branch::Blowup => "blowup",
            Branch::Critical => "critical",
        };
        f.write_str(s)
    }
}

/// Scales `(δ⁺, δ⁻)` of the two radial solutions for `0 < λ < 2`.
///
/// `δ⁻ = 1/δ⁺` is evaluated without cancellation.
pub fn delta_pm(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0 && lambda < 2.0) {
        return Err(Error::Domain(format!(
            "delta_pm needs 0 < lambda < 2 (got {lambda}); use the critical branch at lambda = 2"
        )));
    }
    let big = 4.0 - lambda + 2.0 * (4.0 - 2.0 * lambda).sqrt();
    Ok((big / lambda, lambda / big))
}

/// Radial profile of the autonomous problem on `[0, 1]`, sampled on a fine
/// grid and evaluated by cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct SampledProfile {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// Value at the origin (the shooting parameter).
    pub center: f64,
    /// Curvature coefficients of the series `v ≈ center + c2 r² + c4 r⁴` near 0.
    c2: f64,
    c4: f64,
}

impl SampledProfile {
    pub fn eval(&self, s: f64) -> f64 {
        let r0 = self.r[0];
        if s <= r0 {
            return self.center + self.c2 * s * s + self.c4 * s.powi(4);
        }
        let n = self.r.len();
        if s >= self.r[n - 1] {
            return self.v[n - 1];
        }
        let i = match self.r.binary_search_by(|x| x.partial_cmp(&s).unwrap()) {
            Ok(i) => return self.v[i],
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.r[i], self.r[i + 1]);
        let h = x1 - x0;
        let t = (s - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.v[i] + h10 * h * self.dv[i] + h01 * self.v[i + 1] + h11 * h * self.dv[i + 1]
    }

    /// Smallest sampled value on `[0, 1)`; negative values flag a profile
    /// outside the positive solution class.
    pub fn min_interior(&self) -> f64 {
        let n = self.v.len();
        self.v[..n - 1].iter().copied().fold(self.center, f64::min)
    }
}

/// Integrate `-v'' - v'/r = f(λ, v)`, `v(0) = center`, `v'(0) = 0` on `[0, 1]`
/// with classical RK4. Returns `None` if the solution overflows.
pub fn integrate_autonomous(nl: &Nonlinearity, lambda: f64, center: f64, steps: usize) -> Option<SampledProfile> {
    let r0 = 1e-4;
    let a = nl.f(lambda, center);
    let ap = nl.fprime(lambda, center);
    let c2 = -a / 4.0;
    let c4 = a * ap / 64.0;
    let mut v = center + c2 * r0 * r0 + c4 * r0.powi(4);
    let mut w = 2.0 * c2 * r0 + 4.0 * c4 * r0.powi(3);
    let h = (1.0 - r0) / steps as f64;
    let rhs = |r: f64, v: f64, w: f64| -> (f64, f64) { (w, -w / r - nl.f(lambda, v)) };
    let mut rs = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let mut ws = Vec::with_capacity(steps + 1);
    rs.push(r0);
    vs.push(v);
    ws.push(w);
    for i in 0..steps {
        let r = r0 + i as f64 * h;
        let (k1v, k1w) = rhs(r, v, w);
        let (k2v, k2w) = rhs(r + 0.5 * h, v + 0.5 * h * k1v, w + 0.5 * h * k1w);
        let (k3v, k3w) = rhs(r + 0.5 * h, v + 0.5 * h * k2v, w + 0.5 * h * k2w);
        let (k4v, k4w) = rhs(r + h, v + h * k3v, w + h * k3w);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        if !v.is_finite() || !w.is_finite() {
            return None;
        }
        rs.push(if i + 1 == steps { 1.0 } else { r + h });
        vs.push(v);
        ws.push(w);
    }
    Some(SampledProfile { r: rs, v: vs, dv: ws, center, c2, c4 })
}

/// Radial solution of the autonomous problem by shooting on `v(0)` with
/// bisection on `v(1) = 0`.
///
/// Scans `v(0) ∈ (0, center_max]` for sign changes of `v(1)`; the smallest
/// root is reported as [`Branch::Minimal`], the largest as [`Branch::Blowup`].
pub fn shoot_autonomous(nl: &Nonlinearity, lambda: f64, branch: Branch, center_max: f64) -> Result<SampledProfile> {
    let steps = 4000;
    let end = |c: f64| integrate_autonomous(nl, lambda, c, steps).map(|p| p.v[p.v.len() - 1]);
    let scan = 600;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..=scan {
        let c = center_max * i as f64 / scan as f64;
        let Some(g) = end(c) else {
            prev = None;
            continue;
        };
        if let Some((cp, gp)) = prev {
            if gp == 0.0 {
                roots.push((cp, cp));
            } else if gp * g < 0.0 {
                roots.push((cp, c));
            }
        }
        prev = Some((c, g));
    }
    if roots.is_empty() {
        return Err(Error::Shooting(format!("no sign change of v(1) for lambda = {lambda}")));
    }
    let (mut lo, mut hi) = match branch {
        Branch::Minimal => roots[0],
        Branch::Blowup | Branch::Critical => {
            if branch == Branch::Blowup && roots.len() < 2 {
                return Err(Error::Shooting(format!(
                    "only one radial solution found for lambda = {lambda}; no blow-up branch"
                )));
            }
            roots[roots.len() - 1]
        }
    };
    let mut glo = end(lo).ok_or_else(|| Error::Shooting("overflow while bisecting".into()))?;
    for _ in 0..200 {
        if hi - lo < 1e-14 * (1.0 + hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = end(mid).ok_or_else(|| Error::Shooting("overflow while bisecting".into()))?;
        if g == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if g * glo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            glo = g;
        }
    }
    integrate_autonomous(nl, lambda, 0.5 * (lo + hi), steps)
        .ok_or_else(|| Error::Shooting("overflow on final profile".into()))
}

/// How the autonomous profile `v` is represented.
#[derive(Debug, Clone)]
pub enum Profile {
    /// `v(s) = log(8δ / (λ (δ + s²)²))`.
    ClosedForm,
    Sampled(SampledProfile),
}

/// A branch-tagged radial solution `u(r) = v(r^((2+α)/2))`.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub branch: Branch,
    pub delta: f64,
    pub params: ProblemParams,
    pub profile: Profile,
}

impl RadialSolution {
    /// Closed-form radial solution of the exponential problem.
    pub fn exponential(params: &ProblemParams, branch: Branch) -> Result<Self> {
        if !matches!(params.nonlinearity, Nonlinearity::Exponential) {
            return Err(Error::Domain("closed forms exist only for the exponential nonlinearity".into()));
        }
        let lambda = params.lambda;
        let delta = match branch {
            Branch::Critical => {
                if (lambda - 2.0).abs() > 1e-14 {
                    return Err(Error::Domain(format!("critical branch requires lambda = 2, got {lambda}")));
                }
                1.0
            }
            Branch::Minimal => delta_pm(lambda)?.0,
            Branch::Blowup => delta_pm(lambda)?.1,
        };
        Ok(Self { branch, delta, params: params.clone(), profile: Profile::ClosedForm })
    }

    /// Radial solution for an arbitrary nonlinearity. Exponential problems use
    /// the closed form; others are shot numerically.
    pub fn solve(params: &ProblemParams, branch: Branch) -> Result<Self> {
        match params.nonlinearity {
            Nonlinearity::Exponential => Self::exponential(params, branch),
            Nonlinearity::Custom(_) => {
                let p = shoot_autonomous(&params.nonlinearity, params.lambda, branch, 30.0)?;
                Ok(Self { branch, delta: f64::NAN, params: params.clone(), profile: Profile::Sampled(p) })
            }
        }
    }

    /// Autonomous profile `v(s)`, `s ∈ [0, 1]`.
    pub fn eval_autonomous(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::ClosedForm => {
                let d = self.delta;
                (8.0 * d / (self.params.lambda * (d + s * s).powi(2))).ln()
            }
            Profile::Sampled(p) => p.eval(s),
        }
    }

    /// Potential `f'(λ, v(s))` of the autonomous linearization.
    pub fn autonomous_potential(&self, s: f64) -> f64 {
        match &self.profile {
            Profile::ClosedForm => {
                let d = self.delta;
                8.0 * d / (d + s * s).powi(2)
            }
            Profile::Sampled(_) => self.params.nonlinearity.fprime(self.params.lambda, self.eval_autonomous(s)),
        }
    }

    /// `u(r)` of the weighted problem.
    pub fn eval(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::ClosedForm => {
                // 8δ/λ written as 2δ(2+α)²/μ so the μ-parametrized form is reproduced exactly
                let a = self.params.alpha;
                let d = self.delta;
                let t = r.powf(2.0 + a);
                (2.0 * d * (2.0 + a).powi(2) / (self.params.mu * (d + t) * (d + t))).ln()
            }
            Profile::Sampled(p) => p.eval(r.powf(0.5 * (2.0 + self.params.alpha))),
        }
    }

    /// Smallest value on a sample grid of `[0, 1)`; positive for admissible solutions.
    pub fn min_interior(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.eval(i as f64 / samples as f64))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `u(r)` of `sol`; `r` must lie in `[0, 1]`.
pub fn eval_radial(sol: &RadialSolution, r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain(format!("radius {r} outside [0, 1]")));
    }
    Ok(sol.eval(r))
}

/// `u(r) = v(r^((2+α)/2))`: lift an autonomous profile to the weighted problem.
pub fn transform_to_weighted<V>(v: V, alpha: f64) -> impl Fn(f64) -> f64
where
    V: Fn(f64) -> f64,
{
    let p = 0.5 * (2.0 + alpha);
    move |r| v(r.powf(p))
}

/// Inverse of [`transform_to_weighted`]: `v(s) = u(s^(2/(2+α)))`.
pub fn transform_to_autonomous<U>(u: U, alpha: f64) -> impl Fn(f64) -> f64
where
    U: Fn(f64) -> f64,
{
    let p = 2.0 / (2.0 + alpha);
    move |s| u(s.powf(p))
}
