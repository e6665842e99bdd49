//! Discretization of `-Δu = μ|x|^α e^u` on the unit disk restricted to
//! fields `u(r, θ) = Σ_j c_j(r) cos(j k θ)`, `j = 0..=M`.
//!
//! Radially the coefficients live on cell centres `r_i = (i + 1/2)/N` and
//! the operators `-c'' - c'/r + m²c/r²` use fourth-order central
//! differences. Ghost values come from the parity `c(-r) = (-1)^m c(r)` at the
//! origin and from quartic extrapolation through `c(1) = 0` at the rim. The
//! nonlinearity is evaluated pseudospectrally on an equispaced grid in
//! `φ = kθ`. Residual rows are multiplied by the cell volume `r_i/N`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::model::RadialSolution;

/// Discrete layout and operators for one symmetry class `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskGrid {
    /// Radial cells.
    pub n: usize,
    /// Highest harmonic index `M`; modes are `0, k, …, Mk`.
    pub modes: usize,
    pub k: usize,
    pub alpha: f64,
    /// Angular collocation points in `φ = kθ ∈ [0, 2π)`.
    pub angular: usize,
    /// `c(1 + h/2)` and `c(1 + 3h/2)` as combinations of the last four cells.
    ghost: [[f64; 4]; 2],
    /// `c'(1)` as a combination of the last four cells.
    rim_slope: [f64; 4],
    cos_table: Vec<f64>,
}

fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|a| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .fold(1.0, |acc, (_, &xb)| acc * (x - xb) / (nodes[a] - xb))
        })
        .collect()
}

fn lagrange_slope(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|a| {
            let mut total = 0.0;
            for skip in 0..nodes.len() {
                if skip == a {
                    continue;
                }
                let mut term = 1.0 / (nodes[a] - nodes[skip]);
                for (b, &xb) in nodes.iter().enumerate() {
                    if b != a && b != skip {
                        term *= (x - xb) / (nodes[a] - xb);
                    }
                }
                total += term;
            }
            total
        })
        .collect()
}

const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];
const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];

impl DiskGrid {
    pub fn new(n: usize, modes: usize, k: usize, alpha: f64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrading(format!("need at least 8 radial cells, got {n}")));
        }
        if modes == 0 || k == 0 {
            return Err(Error::Domain("need k >= 1 and at least one nonradial harmonic".into()));
        }
        if !(alpha >= 0.0) {
            return Err(Error::Domain(format!("alpha must be nonnegative, got {alpha}")));
        }
        // positions in units of h relative to r = 1: rim, then the last four cell centres
        let nodes = [0.0, -0.5, -1.5, -2.5, -3.5];
        let g1 = lagrange_weights(&nodes, 0.5);
        let g2 = lagrange_weights(&nodes, 1.5);
        let s = lagrange_slope(&nodes, 0.0);
        let h = 1.0 / n as f64;
        let angular = (4 * (modes + 1)).max(16);
        let mut cos_table = vec![0.0; angular * (modes + 1)];
        for p in 0..angular {
            let phi = 2.0 * PI * p as f64 / angular as f64;
            for j in 0..=modes {
                cos_table[p * (modes + 1) + j] = (j as f64 * phi).cos();
            }
        }
        Ok(Self {
            n,
            modes,
            k,
            alpha,
            angular,
            ghost: [[g1[1], g1[2], g1[3], g1[4]], [g2[1], g2[2], g2[3], g2[4]]],
            rim_slope: [s[1] / h, s[2] / h, s[3] / h, s[4] / h],
            cos_table,
        })
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 + 0.5) / self.n as f64
    }

    pub fn dim(&self) -> usize {
        self.n * (self.modes + 1)
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.modes + 1) + j
    }

    /// Angular wavenumber of harmonic `j`.
    pub fn wavenumber(&self, j: usize) -> usize {
        j * self.k
    }

    /// `cos(j φ_p)`.
    #[inline]
    pub fn cos(&self, p: usize, j: usize) -> f64 {
        self.cos_table[p * (self.modes + 1) + j]
    }

    pub fn phi(&self, p: usize) -> f64 {
        2.0 * PI * p as f64 / self.angular as f64
    }

    /// Bandwidth of the Jacobian (both sides).
    pub fn bandwidth(&self) -> usize {
        4 * (self.modes + 1)
    }

    /// Linear stencil of row `(i, j)`: pairs of (cell, weight) for
    /// `-c'' - c'/r + m²c/r²` with ghosts eliminated.
    fn stencil(&self, i: usize, j: usize) -> Vec<(usize, f64)> {
        let h = self.h();
        let r = self.radius(i);
        let m = self.wavenumber(j) as f64;
        let parity = if self.wavenumber(j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(8);
        let mut push = |cell: usize, w: f64| {
            if let Some(e) = out.iter_mut().find(|e| e.0 == cell) {
                e.1 += w;
            } else {
                out.push((cell, w));
            }
        };
        for (o, (&d2, &d1)) in D2.iter().zip(&D1).enumerate() {
            let w = -d2 / (h * h) - d1 / (h * r);
            let target = i as isize + o as isize - 2;
            let n = self.n as isize;
            if target < 0 {
                // cell -1 mirrors cell 0, cell -2 mirrors cell 1
                push((-target - 1) as usize, parity * w);
            } else if target >= n {
                let g = &self.ghost[(target - n) as usize];
                for (q, &gw) in g.iter().enumerate() {
                    push(self.n - 1 - q, w * gw);
                }
            } else {
                push(target as usize, w);
            }
        }
        push(i, m * m / (r * r));
        out
    }

    /// The radial closed form embedded as a mode-0-only coefficient vector.
    pub fn embed_radial(&self, sol: &RadialSolution) -> Vec<f64> {
        let mut c = vec![0.0; self.dim()];
        for i in 0..self.n {
            c[self.idx(i, 0)] = sol.eval(self.radius(i));
        }
        c
    }

    /// `u` at cell `i` and angular point `p`.
    pub fn value_at(&self, c: &[f64], i: usize, p: usize) -> f64 {
        (0..=self.modes).map(|j| c[self.idx(i, j)] * self.cos(p, j)).sum()
    }

    /// `u(r_i, θ)` for arbitrary `θ`.
    pub fn value_at_angle(&self, c: &[f64], i: usize, theta: f64) -> f64 {
        (0..=self.modes).map(|j| c[self.idx(i, j)] * ((self.wavenumber(j) as f64) * theta).cos()).sum()
    }

    /// `c_j(r)` by local quartic interpolation of cell values, parity
    /// ghosts and the rim value.
    pub fn coefficient_at(&self, c: &[f64], j: usize, r: f64) -> f64 {
        let h = self.h();
        let parity = if self.wavenumber(j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let sample = |cell: isize| -> (f64, f64) {
            let n = self.n as isize;
            if cell < 0 {
                let mirror = (-cell - 1) as usize;
                (-self.radius(mirror), parity * c[self.idx(mirror, j)])
            } else if cell >= n {
                (1.0, 0.0)
            } else {
                (self.radius(cell as usize), c[self.idx(cell as usize, j)])
            }
        };
        let centre = ((r / h) - 0.5).round() as isize;
        let first = (centre - 2).min(self.n as isize - 4);
        let pts: Vec<(f64, f64)> = (first..first + 5).map(sample).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        lagrange_weights(&xs, r).iter().zip(&pts).map(|(w, p)| w * p.1).sum()
    }

    /// `c_j'(1)` from the rim value and the last four cells.
    pub fn rim_derivative(&self, c: &[f64], j: usize) -> f64 {
        (0..4).map(|q| self.rim_slope[q] * c[self.idx(self.n - 1 - q, j)]).sum()
    }

    /// `e^u` at every collocation point of cell `i`, and its projections
    /// `(2 - δ_j0)/P Σ_p e^u cos(jφ_p)`.
    fn exp_samples(&self, c: &[f64], i: usize) -> Vec<f64> {
        (0..self.angular).map(|p| self.value_at(c, i, p).exp()).collect()
    }

    /// Residual of `-Δu - μ|x|^α e^u`, row `(i, j)` scaled by `r_i h`.
    pub fn residual(&self, c: &[f64], mu: f64) -> Result<Vec<f64>> {
        if c.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: c.len() });
        }
        let h = self.h();
        let mut out = vec![0.0; self.dim()];
        let inv_p = 1.0 / self.angular as f64;
        for i in 0..self.n {
            let r = self.radius(i);
            let vol = r * h;
            let weight = mu * r.powf(self.alpha);
            let e = self.exp_samples(c, i);
            for j in 0..=self.modes {
                let lin: f64 = self.stencil(i, j).iter().map(|&(cell, w)| w * c[self.idx(cell, j)]).sum();
                let norm = if j == 0 { inv_p } else { 2.0 * inv_p };
                let proj: f64 = (0..self.angular).map(|p| e[p] * self.cos(p, j)).sum::<f64>() * norm;
                out[self.idx(i, j)] = vol * (lin - weight * proj);
            }
        }
        Ok(out)
    }

    /// Jacobian of [`Self::residual`] with respect to the coefficients, and
    /// the derivative with respect to `μ`.
    pub fn jacobian(&self, c: &[f64], mu: f64) -> Result<(BandMatrix, Vec<f64>)> {
        if c.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), got: c.len() });
        }
        let h = self.h();
        let bw = self.bandwidth();
        let mut jac = BandMatrix::zeros(self.dim(), bw, bw);
        let mut d_mu = vec![0.0; self.dim()];
        let inv_p = 1.0 / self.angular as f64;
        let m1 = self.modes + 1;
        let mut weighted = vec![0.0; self.angular * m1];
        for i in 0..self.n {
            let r = self.radius(i);
            let vol = r * h;
            let rw = r.powf(self.alpha);
            let e = self.exp_samples(c, i);
            for p in 0..self.angular {
                for l in 0..m1 {
                    weighted[p * m1 + l] = e[p] * self.cos(p, l);
                }
            }
            for j in 0..m1 {
                let row = self.idx(i, j);
                for (cell, w) in self.stencil(i, j) {
                    jac.add(row, self.idx(cell, j), vol * w);
                }
                let norm = if j == 0 { inv_p } else { 2.0 * inv_p };
                for l in 0..m1 {
                    let s: f64 = (0..self.angular).map(|p| weighted[p * m1 + l] * self.cos(p, j)).sum();
                    jac.add(row, self.idx(i, l), -vol * mu * rw * norm * s);
                }
                let proj: f64 = (0..self.angular).map(|p| e[p] * self.cos(p, j)).sum::<f64>() * norm;
                d_mu[row] = -vol * rw * proj;
            }
        }
        Ok((jac, d_mu))
    }

    /// Inner product matching the `L²(B₁)` norm of the field.
    pub fn field_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let h = self.h();
        let mut s = 0.0;
        for i in 0..self.n {
            let vol = self.radius(i) * h;
            for j in 0..=self.modes {
                let w = if j == 0 { 2.0 * PI } else { PI };
                s += vol * w * a[self.idx(i, j)] * b[self.idx(i, j)];
            }
        }
        s
    }

    pub fn diagnostics(&self, c: &[f64], mu: f64) -> Diagnostics {
        let h = self.h();
        let mut max_u = f64::NEG_INFINITY;
        let mut min_u = f64::INFINITY;
        let mut mass = 0.0;
        let mut energy = 0.0;
        for i in 0..self.n {
            let r = self.radius(i);
            let mut mean = 0.0;
            for p in 0..self.angular {
                let u = self.value_at(c, i, p);
                max_u = max_u.max(u);
                min_u = min_u.min(u);
                mean += u.exp();
            }
            mean /= self.angular as f64;
            mass += 2.0 * PI * h * mu * r.powf(1.0 + self.alpha) * mean;
            for j in 1..=self.modes {
                let m = self.wavenumber(j) as f64;
                let d = self.coefficient_slope(c, i, j);
                let v = c[self.idx(i, j)];
                energy += PI * h * r * (d * d + m * m * v * v / (r * r));
            }
        }
        // midpoint rule end correction; the integrand's slope vanishes at r = 0
        mass += 2.0 * PI * h * h / 24.0 * mu * (1.0 + self.alpha + self.rim_derivative(c, 0));
        Diagnostics { max_u, min_u, nonradial_amplitude: energy.sqrt(), mass, residual: 0.0 }
    }

    fn coefficient_slope(&self, c: &[f64], i: usize, j: usize) -> f64 {
        let h = self.h();
        let parity = if self.wavenumber(j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let n = self.n as isize;
        let val = |cell: isize| -> f64 {
            if cell < 0 {
                parity * c[self.idx((-cell - 1) as usize, j)]
            } else if cell >= n {
                let g = &self.ghost[(cell - n) as usize];
                (0..4).map(|q| g[q] * c[self.idx(self.n - 1 - q, j)]).sum()
            } else {
                c[self.idx(cell as usize, j)]
            }
        };
        let i = i as isize;
        D1.iter().enumerate().map(|(o, w)| w * val(i + o as isize - 2)).sum::<f64>() / h
    }
}

/// Summary of a disk field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_u: f64,
    pub min_u: f64,
    /// Square root of the Dirichlet energy of all nonradial harmonics.
    pub nonradial_amplitude: f64,
    /// `μ ∫ |x|^α e^u`.
    pub mass: f64,
    /// Max-norm of the scaled residual at acceptance.
    pub residual: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Branch, ProblemParams};

    fn max_abs(v: &[f64]) -> f64 {
        v.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    #[test]
    fn zero_state_zero_load() {
        let g = DiskGrid::new(64, 4, 1, 2.0).unwrap();
        let r = g.residual(&vec![0.0; g.dim()], 0.0).unwrap();
        assert_eq!(max_abs(&r), 0.0);
    }

    #[test]
    fn closed_form_radial_solution_is_nearly_exact() {
        let p = ProblemParams::exponential_mu(6.0, 2.0).unwrap();
        let sol = RadialSolution::exponential(&p, Branch::Blowup).unwrap();
        let g = DiskGrid::new(256, 8, 1, 2.0).unwrap();
        let c = g.embed_radial(&sol);
        let r = g.residual(&c, 6.0).unwrap();
        assert!(max_abs(&r) < 1e-8, "{}", max_abs(&r));
    }

    #[test]
    fn jacobian_matches_differences() {
        let g = DiskGrid::new(32, 3, 2, 1.5).unwrap();
        let c: Vec<f64> = (0..g.dim()).map(|i| 0.3 * ((i * 37 % 11) as f64 / 11.0 - 0.5)).collect();
        let d: Vec<f64> = (0..g.dim()).map(|i| (i * 53 % 7) as f64 / 7.0 - 0.5).collect();
        let (jac, dmu) = g.jacobian(&c, 2.5).unwrap();
        let jd = jac.matvec(&d);
        let eps = 1e-6;
        let plus: Vec<f64> = c.iter().zip(&d).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = c.iter().zip(&d).map(|(a, b)| a - eps * b).collect();
        let rp = g.residual(&plus, 2.5).unwrap();
        let rm = g.residual(&minus, 2.5).unwrap();
        let err: f64 = (0..g.dim()).map(|i| ((rp[i] - rm[i]) / (2.0 * eps) - jd[i]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
        let r1 = g.residual(&c, 2.5 + eps).unwrap();
        let r0 = g.residual(&c, 2.5 - eps).unwrap();
        let err: f64 = (0..g.dim()).map(|i| ((r1[i] - r0[i]) / (2.0 * eps) - dmu[i]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn interpolation_reproduces_smooth_profiles() {
        let g = DiskGrid::new(128, 2, 1, 2.0).unwrap();
        let mut c = vec![0.0; g.dim()];
        for i in 0..g.n {
            let r = g.radius(i);
            c[g.idx(i, 0)] = 1.0 - r * r;
            c[g.idx(i, 1)] = r * (1.0 - r * r);
        }
        for &r in &[0.001, 0.3, 0.77, 0.999] {
            assert!((g.coefficient_at(&c, 0, r) - (1.0 - r * r)).abs() < 1e-12);
            assert!((g.coefficient_at(&c, 1, r) - r * (1.0 - r * r)).abs() < 1e-12);
        }
        assert!((g.rim_derivative(&c, 0) + 2.0).abs() < 1e-10);
        assert!((g.rim_derivative(&c, 1) + 2.0).abs() < 1e-10);
    }
}
