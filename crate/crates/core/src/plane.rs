//! The entire-plane problem `-ΔU = |x|^α e^U` with finite mass: radial
//! solutions, the kernel of the linearization at `U_α` and its negative
//! modes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::{polar_laplacian_residual, Jet};
use crate::quadrature::CompositeRule;

/// Tolerance for the algebraic admissibility test `4m²/(2+α)² ∈ {0, 1}`.
pub const ADMISSIBLE_TOL: f64 = 1e-9;
/// Tolerance on the normalized matching Wronskian of the shooting test.
pub const SHOOT_TOL: f64 = 1e-6;
/// Outer radius of the shooting interval.
pub const SHOOT_RADIUS: f64 = 1e3;

fn check_alpha(alpha: f64, lower: f64) -> Result<()> {
    if !(alpha >= lower) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha = {alpha} out of range")));
    }
    Ok(())
}

fn solution_jet(delta: f64, alpha: f64, r: Jet) -> Jet {
    let a = 2.0 + alpha;
    let d = r.powf(a) + delta;
    (2.0 * a * a * delta / (d * d)).ln()
}

/// `U(r) = log(2(2+α)²δ / (δ + r^(2+α))²)`.
pub fn plane_solution(delta: f64, alpha: f64, r: f64) -> Result<f64> {
    if !(delta > 0.0) || !(alpha > -2.0) || !(r >= 0.0) {
        return Err(Error::Domain(format!("plane solution needs delta > 0, alpha > -2, r >= 0 (got {delta}, {alpha}, {r})")));
    }
    let a = 2.0 + alpha;
    let d = delta + r.powf(a);
    Ok((2.0 * a * a * delta / (d * d)).ln())
}

/// `-U'' - U'/r - r^α e^U` with exact derivatives.
pub fn plane_residual(delta: f64, alpha: f64, r: f64) -> f64 {
    let u = solution_jet(delta, alpha, Jet::variable(r));
    polar_laplacian_residual(u, r, 0.0) - r.powf(alpha) * u.v.exp()
}

/// Total mass `∫_{ℝ²} |x|^α e^U = 4π(2+α)`, independent of `δ`.
pub fn plane_mass(alpha: f64) -> f64 {
    4.0 * PI * (2.0 + alpha)
}

/// `∫_{ℝ²} |x|^α e^U` by quadrature in `log r` over `[e^-60, e^60]`.
pub fn plane_mass_quadrature(delta: f64, alpha: f64) -> Result<f64> {
    plane_solution(delta, alpha, 1.0)?;
    let breaks: Vec<f64> = (0..=240).map(|i| -60.0 + i as f64 * 0.5).collect();
    let rule = CompositeRule::new(&breaks, 12);
    let a = 2.0 + alpha;
    Ok(rule.integrate(|s| {
        let r = s.exp();
        let t = r.powf(a);
        // r^α e^U · 2πr · dr/ds
        2.0 * PI * t * 2.0 * a * a * delta / ((delta + t) * (delta + t))
    }))
}

/// Angular dependence of a kernel element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Angular {
    Radial,
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelElement {
    pub mode: usize,
    pub angular: Angular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneKernel {
    pub alpha: f64,
    pub dimension: usize,
    pub basis: Vec<KernelElement>,
}

/// `k` with `α = 2(k - 1)`, if any.
pub fn resonant_mode(alpha: f64) -> Option<usize> {
    let k = 0.5 * alpha + 1.0;
    let n = k.round();
    ((k - n).abs() <= ADMISSIBLE_TOL && n >= 1.0).then_some(n as usize)
}

/// Kernel of `-Δv - 2(2+α)²|x|^α/(1+|x|^(2+α))² v` among finite-energy fields.
pub fn kernel_basis(alpha: f64) -> Result<PlaneKernel> {
    check_alpha(alpha, 0.0)?;
    let mut basis = vec![KernelElement { mode: 0, angular: Angular::Radial }];
    if let Some(k) = resonant_mode(alpha) {
        basis.push(KernelElement { mode: k, angular: Angular::Cos });
        basis.push(KernelElement { mode: k, angular: Angular::Sin });
    }
    Ok(PlaneKernel { alpha, dimension: basis.len(), basis })
}

impl PlaneKernel {
    fn profile_jet(&self, e: &KernelElement, r: Jet) -> Jet {
        let t = r.powf(2.0 + self.alpha);
        match e.angular {
            Angular::Radial => (1.0 - t) / (1.0 + t),
            _ => r.powi(e.mode as i32) / (1.0 + t),
        }
    }

    /// Radial profile of basis element `e` at `r`.
    pub fn profile(&self, e: &KernelElement, r: f64) -> f64 {
        self.profile_jet(e, Jet::constant(r)).v
    }

    /// Value of basis element `e` at `(r, θ)`.
    pub fn eval(&self, e: &KernelElement, r: f64, theta: f64) -> f64 {
        let ang = match e.angular {
            Angular::Radial => 1.0,
            Angular::Cos => (e.mode as f64 * theta).cos(),
            Angular::Sin => (e.mode as f64 * theta).sin(),
        };
        self.profile(e, r) * ang
    }

    /// Residual of the linearized equation for the radial profile of `e`.
    pub fn residual(&self, e: &KernelElement, r: f64) -> f64 {
        let a = 2.0 + self.alpha;
        let p = self.profile_jet(e, Jet::variable(r));
        let t = r.powf(a);
        let w = 2.0 * a * a * r.powf(self.alpha) / ((1.0 + t) * (1.0 + t));
        polar_laplacian_residual(p, r, (e.mode * e.mode) as f64) - w * p.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeShoot {
    pub alpha: f64,
    pub mode: usize,
    /// `4m²/(2+α)²`.
    pub c: f64,
    /// Whether `c ∈ {0, 1}`.
    pub algebraic: bool,
    /// Whether the shooting test finds a finite-energy solution.
    pub numeric: bool,
    /// Normalized Wronskian of the regular and the decaying solution.
    pub wronskian: f64,
}

impl ModeShoot {
    pub fn agrees(&self) -> bool {
        self.algebraic == self.numeric
    }
}

/// RK4 for `η_tt = (c - 8e^{2t}/(1+e^{2t})²) η` from `t0` to `t1`.
fn integrate_mode(c: f64, t0: f64, t1: f64, mut y: [f64; 2]) -> [f64; 2] {
    let rhs = |t: f64, y: [f64; 2]| -> [f64; 2] {
        let e = (2.0 * t).exp();
        let v = 8.0 * e / ((1.0 + e) * (1.0 + e));
        [y[1], (c - v) * y[0]]
    };
    let steps = ((t1 - t0).abs() / 2e-3).ceil() as usize;
    let h = (t1 - t0) / steps as f64;
    let mut t = t0;
    for _ in 0..steps {
        let k1 = rhs(t, y);
        let k2 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        t += h;
        if !y[0].is_finite() {
            break;
        }
    }
    y
}

/// Whether mode `m` of the linearization at `U_α` has a finite-energy
/// solution. In `s = r^((2+α)/2)`, `t = log s` the mode equation is
/// `η_tt = (c - 8e^{2t}/(1+e^{2t})²) η`, `c = 4m²/(2+α)²`. The solution
/// regular at the origin (shot from `s = 10⁻⁶`) and the one bounded at
/// infinity (shot back from `s = 10³`) are matched at `s = e^{-1/2}`.
pub fn mode_shoot(alpha: f64, m: usize) -> Result<ModeShoot> {
    check_alpha(alpha, 0.0)?;
    let c = 4.0 * (m * m) as f64 / (2.0 + alpha).powi(2);
    let algebraic = c.abs() <= ADMISSIBLE_TOL || (c - 1.0).abs() <= ADMISSIBLE_TOL;
    let k = c.sqrt();
    let t0 = (1e-6f64).ln();
    let t1 = SHOOT_RADIUS.ln();
    // η ~ s^k (1 - 2s²/(k+1)) near the origin
    let s0 = t0.exp();
    let corr = -2.0 / (k + 1.0);
    let inner = [1.0 + corr * s0 * s0, k * (1.0 + corr * s0 * s0) + 2.0 * corr * s0 * s0];
    let left = integrate_mode(c, t0, -0.5, inner);
    // bounded or decaying at infinity, with the first correction from the potential tail
    let s1 = t1.exp();
    let outer = if c == 0.0 { [1.0, 4.0 / (s1 * s1)] } else { [1.0, -k] };
    let right = integrate_mode(c, t1, -0.5, outer);
    if !left[0].is_finite() || !right[0].is_finite() {
        return Err(Error::Shooting(format!("mode {m} integration overflowed at alpha = {alpha}")));
    }
    // sine of the angle between the two phase vectors
    let w = left[0] * right[1] - left[1] * right[0];
    let wronskian = w / (left[0].hypot(left[1]) * right[0].hypot(right[1]));
    Ok(ModeShoot { alpha, mode: m, c, algebraic, numeric: wronskian.abs() < SHOOT_TOL, wronskian })
}

/// `(m, m² - ((2+α)/2)²)` for every mode `m < (2+α)/2`.
pub fn plane_negative_modes(alpha: f64) -> Result<Vec<(usize, f64)>> {
    check_alpha(alpha, 0.0)?;
    let h = 0.5 * (2.0 + alpha);
    Ok((0..)
        .take_while(|&m| (m as f64) < h - ADMISSIBLE_TOL)
        .map(|m| (m, (m * m) as f64 - h * h))
        .collect())
}

/// Negative eigenvalues counted with angular multiplicity.
pub fn plane_negative_count(alpha: f64) -> Result<usize> {
    Ok(plane_negative_modes(alpha)?.iter().map(|&(m, _)| if m == 0 { 1 } else { 2 }).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_value() {
        for a in [0.0, 1.0, 2.5] {
            let v = plane_solution(1.0, a, 0.0).unwrap();
            assert!((v - (2.0 * (2.0 + a) * (2.0 + a)).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_small_across_scales() {
        for delta in [0.1, 1.0, 10.0] {
            for &r in &[1e-3, 0.1, 1.0, 30.0, 1e3] {
                let res = plane_residual(delta, 1.5, r);
                let u = plane_solution(delta, 1.5, r).unwrap();
                let scale = 1.0 + r.powf(1.5) * u.exp();
                assert!(res.abs() / scale < 1e-8, "{delta} {r} {res}");
            }
        }
    }

    #[test]
    fn kernel_dimensions() {
        assert_eq!(kernel_basis(1.0).unwrap().dimension, 1);
        assert_eq!(kernel_basis(2.0).unwrap().dimension, 3);
        assert_eq!(kernel_basis(0.0).unwrap().dimension, 3);
        assert_eq!(kernel_basis(2.0).unwrap().basis[1].mode, 2);
    }

    #[test]
    fn shooting_examples() {
        assert!(mode_shoot(2.0, 2).unwrap().numeric);
        assert!(!mode_shoot(2.0, 1).unwrap().numeric);
        assert!(mode_shoot(3.0, 0).unwrap().numeric);
    }

    #[test]
    fn negative_modes() {
        assert_eq!(plane_negative_modes(2.0).unwrap(), vec![(0, -4.0), (1, -3.0)]);
        assert_eq!(plane_negative_modes(1.0).unwrap(), vec![(0, -2.25), (1, -1.25)]);
        assert_eq!(plane_negative_count(2.0).unwrap(), 3);
    }
}
