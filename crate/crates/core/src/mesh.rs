//! Graded radial meshes on `(0, 1]`, quadrature for the measures `r dr` and
//! `r⁻¹ dr`, and piecewise-linear assembly of the bilinear forms of the
//! singular Rayleigh quotient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymTridiag;
use crate::quadrature::gauss_legendre;

/// Node distribution of a [`RadialMesh`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Grading {
    /// `r_i = (i + 1) / n`.
    Uniform,
    /// `r_i = ratio^(n - 1 - i)`, uniform in `log r`.
    Geometric { ratio: f64 },
    /// Geometric from `r_min` (three quarters of the nodes), then mildly
    /// clustered toward `r = 1`; the junction is placed where both spacings agree.
    Composite { r_min: f64 },
}

impl Grading {
    /// Geometric grading whose first node is `r_min`.
    pub fn geometric_from(r_min: f64, n: usize) -> Self {
        Grading::Geometric { ratio: r_min.powf(1.0 / (n as f64 - 1.0)) }
    }
}

/// Default number of nodes for eigenvalue work.
pub const DEFAULT_NODES: usize = 4096;
/// Default innermost node for eigenvalue work.
pub const DEFAULT_R_MIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh {
    pub nodes: Vec<f64>,
    pub grading: Grading,
    /// Weights for `∫ g(r) r dr` over `[nodes[0], 1]`.
    pub w_r: Vec<f64>,
    /// Weights for `∫ g(r) r⁻¹ dr` over `[nodes[0], 1]`.
    pub w_rinv: Vec<f64>,
}

/// Gauss points per element for all element integrals.
const ELEMENT_GAUSS: usize = 10;

impl RadialMesh {
    pub fn build(n: usize, grading: Grading) -> Result<Self> {
        if n < 16 {
            return Err(Error::InvalidGrading(format!("need at least 16 nodes, got {n}")));
        }
        let nodes = match grading {
            Grading::Uniform => (1..=n).map(|i| i as f64 / n as f64).collect::<Vec<_>>(),
            Grading::Geometric { ratio } => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::InvalidGrading(format!("geometric ratio must lie in (0,1), got {ratio}")));
                }
                let mut v: Vec<f64> = (0..n).map(|i| ratio.powi((n - 1 - i) as i32)).collect();
                v[n - 1] = 1.0;
                v
            }
            Grading::Composite { r_min } => {
                if !(r_min > 0.0 && r_min < 0.5) {
                    return Err(Error::InvalidGrading(format!("composite r_min must lie in (0, 0.5), got {r_min}")));
                }
                composite_nodes(n, r_min)
            }
        };
        if nodes[0] <= 0.0 || nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrading("nodes are not strictly increasing in (0, 1]".into()));
        }
        let (w_r, w_rinv) = quadrature_weights(&nodes);
        Ok(Self { nodes, grading, w_r, w_rinv })
    }

    /// Default eigenvalue mesh: geometric, `n` nodes, first node `1e-8`.
    pub fn eigen_default(n: usize) -> Result<Self> {
        Self::build(n, Grading::geometric_from(DEFAULT_R_MIN, n))
    }

    /// Geometric mesh from `epsilon` to 1 with `per_decade` nodes per factor
    /// of ten. Meshes built with the same `per_decade` are nested, and
    /// `epsilon` is itself a node when `per_decade * log10(1/epsilon)` is integral.
    pub fn per_decade(epsilon: f64, per_decade: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) || per_decade == 0 {
            return Err(Error::InvalidGrading(format!("bad per-decade mesh ({epsilon}, {per_decade})")));
        }
        let decades = -epsilon.log10();
        let intervals = (decades * per_decade as f64).round() as usize;
        let ratio = 10f64.powf(-1.0 / per_decade as f64);
        let n = intervals + 1;
        let mut nodes: Vec<f64> = (0..n).map(|i| 10f64.powf(-((n - 1 - i) as f64) / per_decade as f64)).collect();
        nodes[n - 1] = 1.0;
        if n < 16 {
            return Err(Error::InvalidGrading(format!("only {n} nodes")));
        }
        let (w_r, w_rinv) = quadrature_weights(&nodes);
        Ok(Self { nodes, grading: Grading::Geometric { ratio }, w_r, w_rinv })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    /// `∫_0^1 g(r) r dr` from nodal values, including the `[0, nodes[0]]`
    /// stub with `g` treated as constant there.
    pub fn integrate_r(&self, g: &[f64]) -> f64 {
        let r0 = self.nodes[0];
        let body: f64 = self.w_r.iter().zip(g).map(|(w, v)| w * v).sum();
        body + 0.5 * r0 * r0 * g[0]
    }

    /// `∫ g(r) r⁻¹ dr` over `[nodes[0], 1]`.
    pub fn integrate_rinv(&self, g: &[f64]) -> f64 {
        self.w_rinv.iter().zip(g).map(|(w, v)| w * v).sum()
    }
}

fn composite_nodes(n: usize, r_min: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let n_geo = 3 * n / 4;
    let n_out = n - n_geo;
    let kappa = 0.5;
    let ratio = |rc: f64| (rc / r_min).powf(1.0 / (n_geo as f64 - 1.0));
    let mismatch = |rc: f64| rc * (ratio(rc) - 1.0) - (1.0 - rc) * (1.0 + kappa) / n_out as f64;
    let (mut lo, mut hi) = (r_min * 10.0, 0.9);
    if mismatch(lo) > 0.0 {
        hi = lo;
    } else if mismatch(hi) < 0.0 {
        lo = hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mismatch(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let rc = 0.5 * (lo + hi);
    let q = ratio(rc);
    let mut v: Vec<f64> = (0..n_geo).map(|i| r_min * q.powi(i as i32)).collect();
    v[n_geo - 1] = rc;
    for j in 1..=n_out {
        let s = j as f64 / n_out as f64;
        let phi = s + kappa * (PI * s).sin() / PI;
        v.push(rc + (1.0 - rc) * phi);
    }
    v[n - 1] = 1.0;
    v
}

/// Weights integrating the piecewise-quadratic interpolant of `g` against
/// `r` and `1/r` (pairs of elements; a trailing odd element reuses the last
/// three nodes).
fn quadrature_weights(nodes: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let (gx, gw) = gauss_legendre(ELEMENT_GAUSS);
    let mut w_r = vec![0.0; n];
    let mut w_rinv = vec![0.0; n];
    let mut add_panel = |idx: [usize; 3], a: f64, b: f64| {
        let x = [nodes[idx[0]], nodes[idx[1]], nodes[idx[2]]];
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (t, w) in gx.iter().zip(&gw) {
            let r = mid + half * t;
            for k in 0..3 {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let l = (r - x[i]) * (r - x[j]) / ((x[k] - x[i]) * (x[k] - x[j]));
                w_r[idx[k]] += half * w * l * r;
                w_rinv[idx[k]] += half * w * l / r;
            }
        }
    };
    let mut j = 0;
    while j + 2 < n {
        add_panel([j, j + 1, j + 2], nodes[j], nodes[j + 2]);
        j += 2;
    }
    if j + 1 < n {
        add_panel([j - 1, j, j + 1], nodes[j], nodes[j + 1]);
    }
    (w_r, w_rinv)
}

/// Discrete bilinear forms on the piecewise-linear space over `mesh` (all
/// nodes, no boundary condition applied yet).
#[derive(Debug, Clone)]
pub struct Forms {
    /// `∫ r η'ξ' dr - ∫ r q η ξ dr`.
    pub a: SymTridiag,
    /// `∫ η ξ r⁻¹ dr`, built only when requested.
    pub b_rinv: Option<SymTridiag>,
    /// `∫ η ξ r dr`.
    pub b_r: SymTridiag,
    /// `∫ r η'ξ' dr` on its own.
    pub stiffness: SymTridiag,
}

impl Forms {
    /// Forms with the outer Dirichlet node (`r = 1`) removed and `lead`
    /// inner nodes removed (use `lead = 1` for a Dirichlet inner boundary).
    pub fn restrict(&self, lead: usize) -> Forms {
        Forms {
            a: self.a.restrict(lead, 1),
            b_rinv: self.b_rinv.as_ref().map(|b| b.restrict(lead, 1)),
            b_r: self.b_r.restrict(lead, 1),
            stiffness: self.stiffness.restrict(lead, 1),
        }
    }
}

/// Assemble `A`, `B_{1/r}` and `B_r` for the potential `q`.
pub fn assemble_forms<Q>(mesh: &RadialMesh, potential: Q, include_singular_weight: bool) -> Result<Forms>
where
    Q: Fn(f64) -> f64,
{
    let n = mesh.len();
    let (gx, gw) = gauss_legendre(ELEMENT_GAUSS);
    let mut stiff = SymTridiag::zeros(n);
    let mut a = SymTridiag::zeros(n);
    let mut b_r = SymTridiag::zeros(n);
    let mut b_rinv = SymTridiag::zeros(n);
    for e in 0..n - 1 {
        let (x0, x1) = (mesh.nodes[e], mesh.nodes[e + 1]);
        let h = x1 - x0;
        let k = (x1 * x1 - x0 * x0) / (2.0 * h * h);
        let (mut p00, mut p01, mut p11) = (0.0, 0.0, 0.0);
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        let (mut s00, mut s01, mut s11) = (0.0, 0.0, 0.0);
        for (t, w) in gx.iter().zip(&gw) {
            let r = x0 + 0.5 * h * (t + 1.0);
            let wt = 0.5 * h * w;
            let f0 = (x1 - r) / h;
            let f1 = (r - x0) / h;
            let q = potential(r);
            if !q.is_finite() {
                return Err(Error::Domain(format!("potential is not finite at r = {r}")));
            }
            p00 += wt * r * q * f0 * f0;
            p01 += wt * r * q * f0 * f1;
            p11 += wt * r * q * f1 * f1;
            m00 += wt * r * f0 * f0;
            m01 += wt * r * f0 * f1;
            m11 += wt * r * f1 * f1;
            if include_singular_weight {
                s00 += wt * f0 * f0 / r;
                s01 += wt * f0 * f1 / r;
                s11 += wt * f1 * f1 / r;
            }
        }
        stiff.diag[e] += k;
        stiff.diag[e + 1] += k;
        stiff.off[e] -= k;
        a.diag[e] += k - p00;
        a.diag[e + 1] += k - p11;
        a.off[e] += -k - p01;
        b_r.diag[e] += m00;
        b_r.diag[e + 1] += m11;
        b_r.off[e] += m01;
        b_rinv.diag[e] += s00;
        b_rinv.diag[e + 1] += s11;
        b_rinv.off[e] += s01;
    }
    Ok(Forms {
        a,
        b_rinv: include_singular_weight.then_some(b_rinv),
        b_r,
        stiffness: stiff,
    })
}
