//! Mass, the Pohozaev identity and the two-sided mass bounds for
//! `-Δu = μ|x|^α e^u` on the unit disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bifurcation::{BranchState, DiskGrid};
use crate::error::{Error, Result};
use crate::model::{lambda_of_mu, Branch, RadialSolution};
use crate::quadrature::CompositeRule;

/// Radial spacing of the default one-sided boundary derivative.
pub const RIM_SPACING: f64 = 2e-4;

/// A field on the closed unit disk vanishing on the boundary.
pub trait DiskField {
    fn value(&self, r: f64, theta: f64) -> f64;

    /// Outward normal derivative at `(1, θ)`; by default a fourth-order
    /// one-sided difference over five points spaced [`RIM_SPACING`] apart.
    fn normal_derivative(&self, theta: f64) -> f64 {
        let h = RIM_SPACING;
        let f = |q: f64| self.value(1.0 - q * h, theta);
        (25.0 * f(0.0) - 48.0 * f(1.0) + 36.0 * f(2.0) - 16.0 * f(3.0) + 3.0 * f(4.0)) / (12.0 * h)
    }

    /// Equispaced angles used for angular integrals.
    fn angular_samples(&self) -> usize {
        64
    }
}

/// A radial field given by its profile.
pub struct Radial<F>(pub F);

impl<F: Fn(f64) -> f64> DiskField for Radial<F> {
    fn value(&self, r: f64, _theta: f64) -> f64 {
        (self.0)(r)
    }

    fn angular_samples(&self) -> usize {
        1
    }
}

impl DiskField for RadialSolution {
    fn value(&self, r: f64, _theta: f64) -> f64 {
        self.eval(r)
    }

    fn angular_samples(&self) -> usize {
        1
    }
}

/// A continuation state viewed as a field on the disk.
pub struct BranchField<'a> {
    pub grid: &'a DiskGrid,
    pub state: &'a BranchState,
}

impl DiskField for BranchField<'_> {
    fn value(&self, r: f64, theta: f64) -> f64 {
        (0..=self.grid.modes)
            .map(|j| {
                let m = self.grid.wavenumber(j) as f64;
                self.grid.coefficient_at(&self.state.coeffs, j, r) * (m * theta).cos()
            })
            .sum()
    }

    /// From the rim value and the last four radial cells.
    fn normal_derivative(&self, theta: f64) -> f64 {
        (0..=self.grid.modes)
            .map(|j| {
                let m = self.grid.wavenumber(j) as f64;
                self.grid.rim_derivative(&self.state.coeffs, j) * (m * theta).cos()
            })
            .sum()
    }

    fn angular_samples(&self) -> usize {
        4 * self.grid.k * (self.grid.modes + 1)
    }
}

/// `∫_{B₁} |x|^α e^u` with `t = r^(2+α)` and Gauss panels graded toward `t = 0`.
pub fn weighted_exp_integral(u: &dyn DiskField, alpha: f64) -> f64 {
    let rule = CompositeRule::graded_unit(1e-14, 64, 12);
    let nth = u.angular_samples();
    let p = 1.0 / (2.0 + alpha);
    let mut total = 0.0;
    for q in 0..nth {
        let th = 2.0 * PI * q as f64 / nth as f64;
        total += rule.integrate(|t| u.value(t.powf(p), th).exp());
    }
    2.0 * PI / nth as f64 * total * p
}

/// `μ ∫_{B₁} |x|^α e^u`.
pub fn mass(u: &dyn DiskField, alpha: f64, mu: f64) -> f64 {
    mu * weighted_exp_integral(u, alpha)
}

/// `(∮ (∂u/∂ν)², ∮ ∂u/∂ν)` over the unit circle.
pub fn boundary_flux(u: &dyn DiskField) -> (f64, f64) {
    let nth = u.angular_samples();
    let dth = 2.0 * PI / nth as f64;
    let (mut sq, mut lin) = (0.0, 0.0);
    for q in 0..nth {
        let d = u.normal_derivative(q as f64 * dth);
        sq += d * d * dth;
        lin += d * dth;
    }
    (sq, lin)
}

/// `2π ∮(∂u/∂ν)² - (∮ ∂u/∂ν)²`, nonnegative by the Schwarz inequality and
/// zero exactly when the normal derivative is constant.
pub fn schwarz_gap(u: &dyn DiskField) -> f64 {
    let (sq, lin) = boundary_flux(u);
    2.0 * PI * sq - lin * lin
}

/// `((2+α)³/4) λ ∫|x|^α e^u - ((2+α)²/2) π λ - ½ ∮ (∂u/∂ν)²`, zero for
/// solutions of `-Δu = ((2+α)/2)² λ |x|^α e^u`, `u = 0` on `∂B₁`.
pub fn pohozaev_residual(u: &dyn DiskField, alpha: f64, lambda: f64) -> f64 {
    let a = 2.0 + alpha;
    let (sq, _) = boundary_flux(u);
    0.25 * a.powi(3) * lambda * weighted_exp_integral(u, alpha) - 0.5 * a * a * PI * lambda - 0.5 * sq
}

/// Normal derivative of the closed-form radial solution, `-2(2+α)/(δ+1)`.
pub fn radial_normal_derivative_exp(delta: f64, alpha: f64) -> f64 {
    -2.0 * (2.0 + alpha) / (delta + 1.0)
}

/// `2π(2+α ∓ √((2+α)² - 2μ))`.
pub fn mass_bounds(alpha: f64, mu: f64) -> Result<(f64, f64)> {
    let a = 2.0 + alpha;
    let disc = a * a - 2.0 * mu;
    if !(mu > 0.0) || disc < -1e-12 * a * a {
        return Err(Error::Domain(format!("mu must lie in (0, (2+alpha)^2/2], got {mu}")));
    }
    let s = disc.max(0.0).sqrt();
    Ok((2.0 * PI * (a - s), 2.0 * PI * (a + s)))
}

/// Mass of the closed-form radial solution on `branch`.
pub fn radial_mass_exp(alpha: f64, mu: f64, branch: Branch) -> Result<f64> {
    let (lo, hi) = mass_bounds(alpha, mu)?;
    Ok(match branch {
        Branch::Minimal => lo,
        Branch::Blowup => hi,
        Branch::Critical => 0.5 * (lo + hi),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub mass: f64,
    pub lower: f64,
    pub upper: f64,
    pub pohozaev_residual: f64,
}

impl MassReport {
    /// Signed distance to the nearer bound, positive inside.
    pub fn margin(&self) -> f64 {
        (self.mass - self.lower).min(self.upper - self.mass)
    }

    /// Inside both bounds with tolerance `1e-6 · upper`.
    pub fn within_bounds(&self) -> bool {
        self.margin() >= -1e-6 * self.upper
    }
}

/// Mass, bounds and Pohozaev residual of `u`; violations of the bounds
/// beyond `1e-6 · upper` are errors.
pub fn bounds_check(u: &dyn DiskField, alpha: f64, mu: f64) -> Result<MassReport> {
    let (lower, upper) = mass_bounds(alpha, mu)?;
    let report = MassReport {
        mass: mass(u, alpha, mu),
        lower,
        upper,
        pohozaev_residual: pohozaev_residual(u, alpha, lambda_of_mu(mu, alpha)),
    };
    if !report.within_bounds() {
        return Err(Error::Bound(format!(
            "mass {} outside [{lower}, {upper}] by {}",
            report.mass,
            -report.margin()
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ProblemParams;

    #[test]
    fn critical_bounds_coincide() {
        let (lo, hi) = mass_bounds(2.0, 8.0).unwrap();
        assert!((lo - 8.0 * PI).abs() < 1e-12 && (hi - 8.0 * PI).abs() < 1e-12);
        let (lo, hi) = mass_bounds(2.0, 6.0).unwrap();
        assert!((lo - 4.0 * PI).abs() < 1e-12 && (hi - 12.0 * PI).abs() < 1e-12);
        assert!(mass_bounds(2.0, 9.0).is_err());
    }

    #[test]
    fn radial_masses_by_quadrature() {
        let p = ProblemParams::exponential_mu(6.0, 2.0).unwrap();
        for (b, exact) in [(Branch::Minimal, 4.0 * PI), (Branch::Blowup, 12.0 * PI)] {
            let sol = RadialSolution::exponential(&p, b).unwrap();
            assert!((mass(&sol, 2.0, 6.0) - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn pohozaev_negative_control() {
        let f = Radial(|r: f64| 1.0 - r * r);
        assert!(pohozaev_residual(&f, 2.0, 1.0).abs() > 1.0);
    }
}
