//! Gauss–Legendre rules and composite integration on graded panels.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule over a list of panel breakpoints.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(breaks: &[f64], order: usize) -> Self {
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = Vec::with_capacity(order * breaks.len());
        let mut weights = Vec::with_capacity(order * breaks.len());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        Self { nodes, weights }
    }

    /// Panels on `[0, 1]` graded geometrically toward 0 down to `smallest`,
    /// followed by `uniform` equal panels.
    pub fn graded_unit(smallest: f64, uniform: usize, order: usize) -> Self {
        let mut breaks = vec![0.0];
        let mut b = smallest;
        let first_uniform = 1.0 / uniform as f64;
        while b < first_uniform {
            breaks.push(b);
            b *= 2.0;
        }
        for i in 1..=uniform {
            breaks.push(i as f64 / uniform as f64);
        }
        Self::new(&breaks, order)
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(p)).sum();
            let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
            assert!((q - exact).abs() < 1e-14, "p={p}");
        }
    }

    #[test]
    fn graded_rule_handles_endpoint_peak() {
        let rule = CompositeRule::graded_unit(1e-9, 16, 10);
        let delta = 1e-5;
        let q = rule.integrate(|t| 1.0 / ((delta + t) * (delta + t)));
        let exact = 1.0 / delta - 1.0 / (1.0 + delta);
        assert!((q / exact - 1.0).abs() < 1e-12);
    }
}
