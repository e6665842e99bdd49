//! The singular weighted eigenvalue problem
//!
//! ```text
//! -η'' - η'/r - q(r) η = ν η / r²   on (ε, 1),   η(1) = 0,
//! ```
//!
//! discretized with piecewise-linear elements on a graded mesh. The lowest
//! eigenvalue for `q = f'(λ, v_λ)` is `ν₁(λ)`.
//!
//! On the punctured disk (`ε = 0`) the mesh stops at `r₀ > 0`. Near the
//! origin eigenfunctions behave like `r^γ` with `γ = √(-ν)`, so the discrete
//! space is closed by extending each function as `η(r₀)(r/r₀)^γ` on
//! `(0, r₀)`. Its exact contribution to the forms is added to the first node
//! and `γ` is updated from the computed eigenvalue until it is consistent.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{SymTridiag, TridiagPencil};
use crate::mesh::{assemble_forms, RadialMesh};
use crate::model::{delta_pm, Branch, Nonlinearity, ProblemParams, RadialSolution};

/// Eigenvalues at or above this are reported as "no negative eigenvalue".
pub const NEGATIVE_THRESHOLD: f64 = -1e-8;

/// Nodes per decade of the annulus meshes.
pub const ANNULUS_PER_DECADE: usize = 400;

type Potential = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct WeightedSpectralProblem {
    pub potential: Potential,
    /// Inner radius; `0` means the punctured disk.
    pub epsilon: f64,
}

impl std::fmt::Debug for WeightedSpectralProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedSpectralProblem").field("epsilon", &self.epsilon).finish_non_exhaustive()
    }
}

/// Computed eigenpairs. Eigenfunctions are nodal values on `mesh` (zero at
/// Dirichlet nodes), scaled to sup-norm 1 and positive at the first free node.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    pub eigenfunctions: Vec<Vec<f64>>,
    pub mesh: RadialMesh,
    pub epsilon: f64,
    /// Exponent of the power-law extension below the first node (punctured disk only).
    pub tail_exponent: Option<f64>,
    /// Number of negative eigenvalues of the discrete problem.
    pub negative_count: usize,
    /// The `r⁻¹ dr` form on the free nodes, including the extension.
    weight: SymTridiag,
    first_free: usize,
}

impl SpectralResult {
    fn free<'a>(&self, f: &'a [f64]) -> &'a [f64] {
        &f[self.first_free..self.first_free + self.weight.len()]
    }

    /// `∫ ψ_i ψ_j r⁻¹ dr` for all computed pairs.
    pub fn weighted_gram(&self) -> Vec<Vec<f64>> {
        self.eigenfunctions
            .iter()
            .map(|a| self.eigenfunctions.iter().map(|b| self.weight.form(self.free(a), self.free(b))).collect())
            .collect()
    }

    /// Largest off-diagonal entry of the Gram matrix relative to the norms.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.weighted_gram();
        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            for j in 0..g.len() {
                if i != j {
                    worst = worst.max(g[i][j].abs() / (g[i][i] * g[j][j]).sqrt());
                }
            }
        }
        worst
    }

    /// Whether the first eigenfunction is strictly positive at every free node.
    pub fn first_is_positive(&self) -> bool {
        self.eigenfunctions.first().is_some_and(|f| self.free(f).iter().all(|&v| v > 0.0))
    }
}

/// Outcome of the `ν₁` computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Nu1 {
    Negative(f64),
    /// The quotient has no negative value; its infimum need not be attained.
    NoNegativeEigenvalue,
}

impl Nu1 {
    pub fn value(self) -> Option<f64> {
        match self {
            Nu1::Negative(v) => Some(v),
            Nu1::NoNegativeEigenvalue => None,
        }
    }
}

impl WeightedSpectralProblem {
    pub fn new<Q>(potential: Q, epsilon: f64) -> Result<Self>
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(0.0..=0.1).contains(&epsilon) {
            return Err(Error::Domain(format!("truncation radius must lie in [0, 0.1], got {epsilon}")));
        }
        let lo = epsilon.max(1e-12);
        for i in 0..=200 {
            let r = lo + (1.0 - lo) * (i as f64 / 200.0).powi(3);
            let q = potential(r);
            if !q.is_finite() {
                return Err(Error::Domain(format!("potential is unbounded near r = {r}")));
            }
        }
        Ok(Self { potential: Arc::new(potential), epsilon })
    }

    /// The problem for `q = f'(λ, v_λ)`, with `v_λ` the autonomous radial
    /// solution of Morse index one.
    pub fn autonomous(lambda: f64, nl: &Nonlinearity, epsilon: f64) -> Result<Self> {
        let sol = index_one_solution(lambda, nl)?;
        Self::new(move |r| sol.autonomous_potential(r), epsilon)
    }

    /// The lowest `count` eigenpairs on `mesh`. For `ε > 0` the mesh must
    /// start at `ε`.
    pub fn solve(&self, mesh: &RadialMesh, count: usize) -> Result<SpectralResult> {
        self.assemble(mesh)?.solve(0.0, count)
    }

    /// Assemble the forms once so several angular shifts can be solved.
    pub fn assemble(&self, mesh: &RadialMesh) -> Result<AssembledProblem> {
        let annulus = self.epsilon > 0.0;
        if annulus && (mesh.r_min() / self.epsilon - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "annulus mesh starts at {} but epsilon is {}",
                mesh.r_min(),
                self.epsilon
            )));
        }
        let q = self.potential.clone();
        let forms = assemble_forms(mesh, |r| q(r), true)?.restrict(usize::from(annulus));
        let r0 = mesh.r_min();
        Ok(AssembledProblem {
            a: forms.a,
            b: forms.b_rinv.expect("singular weight requested"),
            mesh: mesh.clone(),
            epsilon: self.epsilon,
            q0: (self.potential)(r0),
        })
    }
}

/// Discrete forms of a [`WeightedSpectralProblem`] on a fixed mesh.
#[derive(Debug, Clone)]
pub struct AssembledProblem {
    a: SymTridiag,
    b: SymTridiag,
    mesh: RadialMesh,
    epsilon: f64,
    q0: f64,
}

impl AssembledProblem {
    fn annulus(&self) -> bool {
        self.epsilon > 0.0
    }

    /// Pencil for `-η'' - η'/r + c η/r² - qη = ν η/r²`, closed below the first
    /// node by the extension with exponent `gamma` when given.
    fn pencil(&self, shift: f64, gamma: Option<f64>) -> TridiagPencil {
        let mut a = self.a.axpy(shift, &self.b);
        let mut b = self.b.clone();
        if let Some(g) = gamma {
            let r0 = self.mesh.r_min();
            a.diag[0] += 0.5 * g + 0.5 * shift / g - self.q0 * r0 * r0 / (2.0 * g + 2.0);
            b.diag[0] += 0.5 / g;
        }
        TridiagPencil::new(a, b)
    }

    /// Lowest `count` eigenpairs of the problem with an added `shift/r²` term.
    pub fn solve(&self, shift: f64, count: usize) -> Result<SpectralResult> {
        let dim = self.a.len();
        if count == 0 || count > dim {
            return Err(Error::Domain(format!("cannot compute {count} eigenpairs on {dim} unknowns")));
        }
        let mut gamma: Option<f64> = None;
        let mut pencil = self.pencil(shift, None);
        if !self.annulus() {
            // near the origin η ~ r^γ with γ² = shift - ν
            for _ in 0..20 {
                let nu = pencil.eigenvalue(0, 1e-15)?;
                let next = (shift - nu > 1e-12).then(|| (shift - nu).sqrt());
                let settled = match (gamma, next) {
                    (Some(g), Some(h)) => (g - h).abs() < 1e-13,
                    (None, None) => true,
                    _ => false,
                };
                gamma = next;
                pencil = self.pencil(shift, gamma);
                if settled {
                    break;
                }
            }
        }

        let mut eigenvalues = Vec::with_capacity(count);
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
        for i in 0..count {
            let ev = pencil.eigenvalue(i, 1e-15)?;
            let v = pencil.eigenvector(ev, &vectors)?;
            eigenvalues.push(ev);
            vectors.push(v);
        }
        let first_free = usize::from(self.annulus());
        let n = self.mesh.len();
        let eigenfunctions = vectors
            .iter()
            .map(|v| {
                let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let lead = v.iter().copied().find(|x| *x != 0.0).unwrap_or(1.0);
                let s = lead.signum() / sup;
                let mut full = vec![0.0; n];
                for (k, x) in v.iter().enumerate() {
                    full[first_free + k] = s * x;
                }
                full
            })
            .collect();
        Ok(SpectralResult {
            eigenvalues,
            eigenfunctions,
            mesh: self.mesh.clone(),
            epsilon: self.epsilon,
            tail_exponent: gamma,
            negative_count: pencil.count_below(0.0),
            weight: pencil.b,
            first_free,
        })
    }
}

/// Autonomous radial solution with Morse index one (the blow-up family, or
/// the critical solution at `λ = 2`).
pub fn index_one_solution(lambda: f64, nl: &Nonlinearity) -> Result<RadialSolution> {
    let params = ProblemParams::new(lambda, 1.0, nl.clone())?;
    let branch = if matches!(nl, Nonlinearity::Exponential) && lambda == 2.0 { Branch::Critical } else { Branch::Blowup };
    RadialSolution::solve(&params, branch)
}

/// Checks that the autonomous linearization at `sol` has exactly one
/// negative radial eigenvalue and none in the first angular mode.
pub fn check_morse_index_one(sol: &RadialSolution, mesh: &RadialMesh) -> Result<()> {
    let forms = assemble_forms(mesh, |r| sol.autonomous_potential(r), true)?.restrict(0);
    let radial = TridiagPencil::new(forms.a.clone(), forms.b_r.clone()).count_below(0.0);
    let b = forms.b_rinv.as_ref().expect("singular weight requested");
    let first_mode = TridiagPencil::new(forms.a.axpy(1.0, b), forms.b_r).count_below(0.0);
    if radial != 1 || first_mode != 0 {
        return Err(Error::MorsePrecondition(format!(
            "radial solution at lambda = {} has {radial} negative radial and {first_mode} negative first-mode eigenvalues",
            sol.params.lambda
        )));
    }
    Ok(())
}

/// `ν₁(λ)` from the discrete Rayleigh quotient on `mesh`.
pub fn nu1(lambda: f64, nl: &Nonlinearity, mesh: &RadialMesh) -> Result<Nu1> {
    let sol = index_one_solution(lambda, nl)?;
    let check = if sol.branch != Branch::Critical { check_morse_index_one(&sol, mesh) } else { Ok(()) };
    let potential = sol.clone();
    let problem = WeightedSpectralProblem::new(move |r| potential.autonomous_potential(r), 0.0)?;
    let nu = problem.solve(mesh, 1)?.eigenvalues[0];
    if nu >= NEGATIVE_THRESHOLD {
        // close to the critical load the radial instability is below mesh resolution;
        // the result is the same either way
        return Ok(Nu1::NoNegativeEigenvalue);
    }
    check?;
    Ok(Nu1::Negative(nu))
}

/// `ν₁(λ) = (λ - 2)/2` for the exponential nonlinearity.
pub fn nu1_closed_form_exp(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 2.0) {
        return Err(Error::Domain(format!("lambda must lie in (0, 2], got {lambda}")));
    }
    Ok(0.5 * (lambda - 2.0))
}

fn eigenfunction_jet(lambda: f64, r: Jet) -> Jet {
    let s = (4.0 - 2.0 * lambda).sqrt();
    let r2 = r * r;
    let one_m = 1.0 - r2;
    let num = 2.0 * (1.0 - r2 * r2) + one_m * one_m * s;
    let den = lambda * one_m * one_m + 8.0 * r2;
    r.powf(0.5 * s) * num / den
}

/// First weighted eigenfunction of the exponential problem,
/// `r^(√(4-2λ)/2) (2(1-r⁴) + (1-r²)²√(4-2λ)) / (λ(1-r²)² + 8r²)`.
pub fn eigenfunction_exp(lambda: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    eigenfunction_jet(lambda, Jet::constant(r)).v
}

/// Pointwise residual of `-ψ'' - ψ'/r - 8δ⁻/(δ⁻+r²)² ψ - ν₁ψ/r²` for the
/// closed-form eigenfunction, with exact derivatives.
pub fn eigenfunction_residual_exp(lambda: f64, r: f64) -> Result<f64> {
    let nu = nu1_closed_form_exp(lambda)?;
    let delta = delta_pm(lambda)?.1;
    let p = eigenfunction_jet(lambda, Jet::variable(r));
    let q = 8.0 * delta / (delta + r * r).powi(2);
    Ok(-p.d2 - p.d1 / r - q * p.v - nu * p.v / (r * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegendreCheck {
    /// `γ = (δ⁻ - 1)/(δ⁻ + 1)`.
    pub gamma: f64,
    /// `|γ² + ν₁(λ)|`.
    pub identity_error: f64,
    /// Largest residual of the Legendre equation on the sample grid.
    pub residual: f64,
    /// `R` at `ξ = γ` (the image of `r = 1`).
    pub boundary_value: f64,
}

fn legendre_r(xi: Jet, gamma: f64) -> Jet {
    ((1.0 + xi) / (1.0 - xi)).powf(0.5 * gamma) * (xi - gamma)
}

/// Verifies that `R(ξ) = ((1+ξ)/(1-ξ))^(γ/2) (ξ-γ)` solves
/// `(1-ξ²)R'' - 2ξR' + ν₁R/(1-ξ²) + 2R = 0` on the image of `r ∈ [10⁻², 1]`
/// under `ξ = (δ-r²)/(δ+r²)`.
pub fn legendre_check(lambda: f64) -> Result<LegendreCheck> {
    let nu = nu1_closed_form_exp(lambda)?;
    let delta = delta_pm(lambda)?.1;
    let gamma = (delta - 1.0) / (delta + 1.0);
    let mut residual: f64 = 0.0;
    for i in 0..=400 {
        let r = 10f64.powf(-2.0 * (1.0 - i as f64 / 400.0));
        let xi = (delta - r * r) / (delta + r * r);
        let rr = legendre_r(Jet::variable(xi), gamma);
        let w = 1.0 - xi * xi;
        let res = w * rr.d2 - 2.0 * xi * rr.d1 + nu * rr.v / w + 2.0 * rr.v;
        residual = residual.max(res.abs());
    }
    let boundary_value = legendre_r(Jet::constant(gamma), gamma).v;
    Ok(LegendreCheck { gamma, identity_error: (gamma * gamma + nu).abs(), residual, boundary_value })
}

/// Lowest `count` eigenpairs on the annulus `(ε, 1)` with Dirichlet ends.
/// Meshes for different `ε` are nested, so the results are exactly
/// monotone in `ε` on the discrete level.
pub fn annulus_eigs(lambda: f64, nl: &Nonlinearity, epsilon: f64, count: usize) -> Result<SpectralResult> {
    if !(epsilon > 0.0 && epsilon <= 0.1) {
        return Err(Error::Domain(format!("annulus inner radius must lie in (0, 0.1], got {epsilon}")));
    }
    let mesh = RadialMesh::per_decade(epsilon, ANNULUS_PER_DECADE)?;
    // snap to the node actually used so the problem and mesh agree
    let problem = WeightedSpectralProblem::autonomous(lambda, nl, mesh.r_min())?;
    problem.solve(&mesh, count)
}

/// Richardson extrapolation of annulus eigenvalues to `ε = 0`, linear in
/// `1/|log ε|` through the two smallest radii.
pub fn extrapolate_to_puncture(epsilons: &[f64], values: &[f64]) -> Result<f64> {
    if epsilons.len() != values.len() || epsilons.len() < 2 {
        return Err(Error::Shape { expected: 2, got: epsilons.len().min(values.len()) });
    }
    let mut idx: Vec<usize> = (0..epsilons.len()).collect();
    idx.sort_by(|&a, &b| epsilons[a].total_cmp(&epsilons[b]));
    let (i, j) = (idx[0], idx[1]);
    let x = |e: f64| 1.0 / e.ln().abs();
    let (xi, xj) = (x(epsilons[i]), x(epsilons[j]));
    Ok(values[i] - xi * (values[j] - values[i]) / (xj - xi))
}

/// Rayleigh quotient `∫|∇η_ε|² / ∫η_ε²/|x|²` of the piecewise test function
/// `η_ε = 1 - |x|` on `ε ≤ |x| ≤ 1`, linear from 0 at `ε/2` up to `1 - ε`
/// at `ε`, and `0` inside, by exact integration.
pub fn p1_quotient(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
    }
    let e = epsilon;
    let num = PI * ((1.0 - e * e) + 3.0 * (1.0 - e).powi(2));
    let outer = -e.ln() - 2.0 * (1.0 - e) + 0.5 * (1.0 - e * e);
    let inner = (1.0 - e).powi(2) * (2f64.ln() - 0.5);
    Ok(num / (2.0 * PI * (outer + inner)))
}

/// Limit of `p1_quotient(ε) log(1/ε)` as `ε → 0`: the numerator tends to
/// `4π` and the denominator behaves like `2π log(1/ε)`.
pub const P1_LOG_CONSTANT: f64 = 2.0;

/// Slope of a least-squares fit of `log ψ` against `log r` over samples with
/// `r ∈ [10⁻⁶, 10⁻²]`.
pub fn decay_exponent(r: &[f64], psi: &[f64]) -> Result<f64> {
    if r.len() != psi.len() {
        return Err(Error::Shape { expected: r.len(), got: psi.len() });
    }
    let pts: Vec<(f64, f64)> = r
        .iter()
        .zip(psi)
        .filter(|(x, _)| (1e-6 * (1.0 - 1e-12)..=1e-2 * (1.0 + 1e-12)).contains(*x))
        .map(|(&x, &y)| (x, y))
        .collect();
    if pts.len() < 3 {
        return Err(Error::DecayFit(format!("only {} samples in [1e-6, 1e-2]", pts.len())));
    }
    if pts.iter().any(|&(_, y)| !(y > 0.0)) {
        return Err(Error::DecayFit("samples must be positive".into()));
    }
    let (rmin, rmax) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &(x, _)| (a.min(x), b.max(x)));
    if rmax / rmin < 100.0 {
        return Err(Error::DecayFit("less than two decades of radii".into()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &pts {
        sxx += (x.ln() - mx).powi(2);
        sxy += (x.ln() - mx) * (y.ln() - my);
    }
    let slope = sxy / sxx;
    if slope.abs() < 1e-3 {
        return Err(Error::DecayFit(format!("no decay detected (slope {slope:.3e})")));
    }
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(nu1_closed_form_exp(2.0).unwrap(), 0.0);
        assert_eq!(nu1_closed_form_exp(1.0).unwrap(), -0.5);
        assert_eq!(nu1_closed_form_exp(0.5).unwrap(), -0.75);
        assert!(nu1_closed_form_exp(0.0).is_err());
    }

    #[test]
    fn eigenfunction_vanishes_at_ends() {
        for lam in [0.5, 1.0, 1.5] {
            assert_eq!(eigenfunction_exp(lam, 0.0), 0.0);
            assert!(eigenfunction_exp(lam, 1.0).abs() < 1e-15);
            assert!(eigenfunction_exp(lam, 0.5) > 0.0);
        }
    }

    #[test]
    fn legendre_identity_at_one() {
        let c = legendre_check(1.0).unwrap();
        assert!((c.gamma + 0.5f64.sqrt()).abs() < 1e-12);
        assert!(c.identity_error < 1e-12);
        assert!(c.residual < 1e-10);
        assert_eq!(c.boundary_value, 0.0);
    }

    #[test]
    fn nu1_at_one() {
        let mesh = RadialMesh::eigen_default(2048).unwrap();
        let nu = nu1(1.0, &Nonlinearity::Exponential, &mesh).unwrap().value().unwrap();
        assert!((nu + 0.5).abs() < 1e-4, "{nu}");
    }

    #[test]
    fn critical_load_has_no_negative_eigenvalue() {
        let mesh = RadialMesh::eigen_default(1024).unwrap();
        assert_eq!(nu1(2.0, &Nonlinearity::Exponential, &mesh).unwrap(), Nu1::NoNegativeEigenvalue);
    }

    #[test]
    fn zero_potential_has_no_negative_eigenvalue() {
        let mesh = RadialMesh::eigen_default(512).unwrap();
        let p = WeightedSpectralProblem::new(|_| 0.0, 0.0).unwrap();
        let res = p.solve(&mesh, 1).unwrap();
        assert!(res.eigenvalues[0] >= NEGATIVE_THRESHOLD);
    }

    #[test]
    fn p1_quotient_decays() {
        let q: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&e| p1_quotient(e).unwrap()).collect();
        assert!(q[0] > q[1] && q[1] > q[2] && q[2] > 0.0);
    }

    #[test]
    fn decay_fit_rejects_constants() {
        let r: Vec<f64> = (0..50).map(|i| 10f64.powf(-6.0 + 4.0 * i as f64 / 49.0)).collect();
        assert!(decay_exponent(&r, &vec![1.0; 50]).is_err());
        let y: Vec<f64> = r.iter().map(|x| x.powf(0.7)).collect();
        assert!((decay_exponent(&r, &y).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_recovers_linear_model() {
        let eps = [1e-2, 1e-4, 1e-6];
        let vals: Vec<f64> = eps.iter().map(|e: &f64| -0.5 + 0.3 / e.ln().abs()).collect();
        assert!((extrapolate_to_puncture(&eps, &vals).unwrap() + 0.5).abs() < 1e-12);
    }
}
