//! Acceptance suite: one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use liouville_core::bifurcation::{
    continue_branch, count_j, detect_degeneracy, lambda_k_exp, BifurcationPoint, ClosedFormNu1, Controls, NumericNu1,
};
use liouville_core::conservation::{mass, mass_bounds, pohozaev_residual, BranchField};
use liouville_core::mesh::{RadialMesh, DEFAULT_NODES};
use liouville_core::model::{Branch, Nonlinearity, ProblemParams, RadialSolution};
use liouville_core::morse::{morse_argument, morse_index_direct_many, plane_morse};
use liouville_core::plane::{kernel_basis, mode_shoot, plane_negative_count};
use liouville_core::spectral::{
    annulus_eigs, decay_exponent, eigenfunction_exp, eigenfunction_residual_exp, legendre_check, nu1,
    p1_quotient, WeightedSpectralProblem,
};

struct Outcome {
    pass: bool,
    detail: String,
}

// written to the real stdout so the lines survive libtest's capture
fn report(n: usize, title: &str, o: &Outcome) {
    let line = format!("criterion {n:>2} {} {title}: {}\n", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    let mut out = std::io::stdout().lock();
    out.write_all(line.as_bytes()).unwrap();
    out.flush().unwrap();
}

fn mesh() -> RadialMesh {
    RadialMesh::eigen_default(DEFAULT_NODES).unwrap()
}

fn closed_nu1(lambda: f64) -> f64 {
    0.5 * (lambda - 2.0)
}

fn nu1_oracle(mesh: &RadialMesh) -> Outcome {
    let t = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let l = 0.1 + 1.8 * i as f64 / 19.0;
        let v = nu1(l, &Nonlinearity::Exponential, mesh).unwrap().value().unwrap();
        worst = worst.max((v - closed_nu1(l)).abs());
    }
    let secs = t.elapsed().as_secs_f64();
    Outcome { pass: worst <= 1e-4 && secs <= 60.0, detail: format!("max |err| = {worst:.3e}, {secs:.2} s") }
}

/// Closed-form eigenfunction residual by central differences, independent of
/// the library's exact-derivative evaluation.
fn fd_residual(lambda: f64, r: f64) -> f64 {
    let nu = closed_nu1(lambda);
    let dm = (4.0 - lambda - 2.0 * (4.0 - 2.0 * lambda).sqrt()) / lambda;
    let h = 1e-4 * r;
    let (a, b, c) = (eigenfunction_exp(lambda, r - h), eigenfunction_exp(lambda, r), eigenfunction_exp(lambda, r + h));
    let d2 = (a - 2.0 * b + c) / (h * h);
    let d1 = (c - a) / (2.0 * h);
    -d2 - d1 / r - 8.0 * dm / (dm + r * r).powi(2) * b - nu * b / (r * r)
}

fn eigenfunction(mesh: &RadialMesh) -> Outcome {
    let mut worst_res: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let mut worst_slope: f64 = 0.0;
    for l in [0.5, 1.0, 1.5] {
        for i in 0..=1000 {
            let r = 1e-3 + (1.0 - 2e-3) * i as f64 / 1000.0;
            let res = eigenfunction_residual_exp(l, r).unwrap();
            worst_res = worst_res.max(res.abs());
            worst_fd = worst_fd.max((fd_residual(l, r) - res).abs() / (1.0 + 1.0 / (r * r)));
        }
        let sol = RadialSolution::exponential(&ProblemParams::exponential(l, 1.0).unwrap(), Branch::Blowup).unwrap();
        let problem = WeightedSpectralProblem::new(move |r| sol.autonomous_potential(r), 0.0).unwrap();
        let res = problem.solve(mesh, 1).unwrap();
        let slope = decay_exponent(&res.mesh.nodes, &res.eigenfunctions[0]).unwrap();
        let target = 0.5 * (4.0 - 2.0 * l).sqrt();
        worst_slope = worst_slope.max((slope - target).abs() / target);
    }
    Outcome {
        pass: worst_res <= 1e-6 && worst_fd <= 1e-5 && worst_slope <= 0.01,
        detail: format!(
            "max residual = {worst_res:.3e} (difference check {worst_fd:.1e}), max slope rel err = {worst_slope:.3e}"
        ),
    }
}

fn legendre() -> Outcome {
    let mut id: f64 = 0.0;
    let mut res: f64 = 0.0;
    for i in 0..20 {
        let l = 0.1 + 1.8 * i as f64 / 19.0;
        let c = legendre_check(l).unwrap();
        id = id.max(c.identity_error);
        res = res.max(c.residual);
    }
    Outcome { pass: id <= 1e-12 && res <= 1e-8, detail: format!("|γ²+ν₁| = {id:.1e}, residual = {res:.1e}") }
}

fn morse_grid(mesh: &RadialMesh) -> Outcome {
    let lambdas: Vec<f64> = (0..10).map(|i| 0.13 + 0.17 * i as f64).collect();
    let alphas: Vec<f64> = (0..10).map(|i| 0.37 + 1.13 * i as f64).collect();
    let mut mismatches = 0;
    let mut flagged = 0;
    let mut flip_off = 0;
    for &l in &lambdas {
        let k_max = morse_argument(alphas[9], closed_nu1(l)).ceil() as usize + 3;
        for rep in morse_index_direct_many(l, &alphas, &Nonlinearity::Exponential, mesh, k_max).unwrap() {
            flagged += rep.boundary_flag as usize;
            mismatches += (rep.m_formula != rep.m_direct) as usize;
            let flip = rep.first_nonnegative_mode().unwrap();
            if (flip as f64 - rep.argument.ceil()).abs() > 1.0 {
                flip_off += 1;
            }
        }
    }
    Outcome {
        pass: mismatches == 0 && flagged == 0 && flip_off == 0,
        detail: format!("100 points, {mismatches} mismatches, {flagged} flagged, {flip_off} sign flips off by > 1"),
    }
}

fn bifurcation_values() -> Outcome {
    let numeric = NumericNu1::new(Nonlinearity::Exponential, RadialMesh::eigen_default(DEFAULT_NODES).unwrap());
    let range = (0.05, 1.99);
    let mut closed_err: f64 = 0.0;
    let mut num_err: f64 = 0.0;
    let mut count_ok = true;
    for alpha in [2.0, 4.0, 5.0, 8.0] {
        for k in 1..=count_j(alpha) {
            let target = lambda_k_exp(alpha, k);
            let c = detect_degeneracy(range, alpha, k, &ClosedFormNu1).unwrap();
            let n = detect_degeneracy(range, alpha, k, &numeric).unwrap();
            if c.len() != 1 || n.len() != 1 {
                count_ok = false;
                continue;
            }
            closed_err = closed_err.max((c[0] - target).abs());
            num_err = num_err.max((n[0] - target).abs());
        }
    }
    // j(α) against the number of modes with a positive λ_k
    let mut j_ok = true;
    for a in 1..=10 {
        let alpha = a as f64;
        let positive = (1..50).filter(|&k| lambda_k_exp(alpha, k) > 1e-12).count();
        let expected = if a % 2 == 0 { a / 2 } else { 1 + a / 2 };
        j_ok &= count_j(alpha) == positive && positive == expected;
    }
    Outcome {
        pass: closed_err <= 1e-8 && num_err <= 1e-3 && count_ok && j_ok,
        detail: format!("closed-form err = {closed_err:.1e}, numeric err = {num_err:.1e}, j-count ok = {j_ok}"),
    }
}

fn branch() -> Outcome {
    let t = Instant::now();
    let start = BifurcationPoint::exponential(2.0, 1).unwrap();
    let ctl = Controls { mu_stop: 0.6, ..Controls::default() };
    let run = continue_branch(&start, -1.0, &ctl).unwrap();
    let s = &run.states;
    let departs = s[0].diagnostics.nonradial_amplitude > 0.0;
    let max_res = s.iter().map(|x| x.diagnostics.residual).fold(0.0, f64::max);
    let end_mu = s.last().unwrap().mu;
    let tail = &s[s.len().saturating_sub(11)..];
    let increasing = s.len() >= 11 && tail.windows(2).all(|w| w[1].diagnostics.max_u > w[0].diagnostics.max_u);
    let sym = s.iter().map(|x| run.rotation_defect(x)).fold(0.0, f64::max);
    let inside = s.iter().all(|x| {
        let m = mass(&BranchField { grid: &run.grid, state: x }, 2.0, x.mu);
        let (lo, hi) = mass_bounds(2.0, x.mu).unwrap();
        x.mu >= start.mu || (m > lo && m < hi)
    });
    let secs = t.elapsed().as_secs_f64();
    Outcome {
        pass: departs && max_res <= 1e-10 && end_mu <= 0.6 && increasing && sym <= 1e-12 && inside && secs <= 300.0,
        detail: format!(
            "{} states, amplitude₀ = {:.2e}, max residual = {max_res:.1e}, final μ = {end_mu:.4}, \
             max_u increasing = {increasing}, symmetry defect = {sym:.1e}, masses inside = {inside}, {secs:.1} s",
            s.len(),
            s[0].diagnostics.nonradial_amplitude
        ),
    }
}

fn pohozaev() -> Outcome {
    let mut res: f64 = 0.0;
    let mut mass_err: f64 = 0.0;
    for alpha in [1.0, 2.0, 4.0] {
        let p = ProblemParams::exponential(1.0, alpha).unwrap();
        let (lo, hi) = mass_bounds(alpha, p.mu).unwrap();
        for (b, exact) in [(Branch::Minimal, lo), (Branch::Blowup, hi)] {
            let sol = RadialSolution::exponential(&p, b).unwrap();
            res = res.max(pohozaev_residual(&sol, alpha, 1.0).abs());
            mass_err = mass_err.max((mass(&sol, alpha, p.mu) - exact).abs());
        }
    }
    let mut limit: f64 = 0.0;
    for alpha in [1.0, 2.0, 4.0] {
        let p = ProblemParams::exponential_mu(1e-3, alpha).unwrap();
        let sol = RadialSolution::exponential(&p, Branch::Blowup).unwrap();
        let target = 8.0 * PI * (1.0 + 0.5 * alpha);
        limit = limit.max((mass(&sol, alpha, 1e-3) - target).abs() / target);
    }
    Outcome {
        pass: res <= 1e-8 && mass_err <= 1e-6 && limit <= 0.01,
        detail: format!(
            "Pohozaev residual = {res:.1e}, radial mass err = {mass_err:.1e}, μ = 1e-3 limit rel err = {limit:.1e} \
             (branch strictness checked under criterion 6)"
        ),
    }
}

fn plane() -> Outcome {
    let mut dims = true;
    let mut kernel_res: f64 = 0.0;
    for a in 0..=6 {
        let alpha = a as f64;
        let k = kernel_basis(alpha).unwrap();
        dims &= k.dimension == if a % 2 == 0 { 3 } else { 1 };
        for e in &k.basis {
            for i in 0..=200 {
                let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 200.0);
                kernel_res = kernel_res.max(k.residual(e, r).abs());
            }
        }
    }
    let mut shoot = true;
    for alpha in [0.5, 1.0, 2.0, 3.0, 4.0] {
        for m in 0..=5 {
            shoot &= mode_shoot(alpha, m).unwrap().agrees();
        }
    }
    let morse = (0..=12).all(|i| {
        let a = 0.5 * i as f64;
        plane_morse(a).unwrap() == plane_negative_count(a).unwrap()
    });
    Outcome {
        pass: dims && shoot && morse && kernel_res <= 1e-8,
        detail: format!("dimensions = {dims}, shooting agrees = {shoot}, plane Morse = {morse}, kernel residual = {kernel_res:.1e}"),
    }
}

/// Numerator and denominator of the quotient by composite Simpson on a
/// logarithmic grid, independent of the closed-form integrals.
fn p1_by_quadrature(e: f64) -> f64 {
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    // inner ramp η = 2(1-ε)(r/ε - 1/2) on [ε/2, ε], outer η = 1 - r on [ε, 1]
    let slope = 2.0 * (1.0 - e) / e;
    let grad_inner = slope * slope * PI * (e * e - 0.25 * e * e);
    let grad_outer = PI * (1.0 - e * e);
    let eta_in = |r: f64| slope * (r - 0.5 * e);
    let den_inner = simpson(&|r| eta_in(r).powi(2) / r, 0.5 * e, e, 2000);
    let den_outer = simpson(&|s: f64| (1.0 - s.exp()).powi(2), e.ln(), 0.0, 20000);
    (grad_inner + grad_outer) / (2.0 * PI * (den_inner + den_outer))
}

fn attainment() -> Outcome {
    let mut oracle: f64 = 0.0;
    for e in [1e-2, 1e-4, 1e-6] {
        let q = p1_quotient(e).unwrap();
        oracle = oracle.max((q - p1_by_quadrature(e)).abs() / q);
    }
    let scaled = |e: f64| p1_quotient(e).unwrap() * (1.0 / e).ln();
    let tends_to_zero = p1_quotient(1e-12).unwrap() < p1_quotient(1e-6).unwrap() && p1_quotient(1e-12).unwrap() < 0.1;
    let drift = (scaled(1e-12) - scaled(1e-11)).abs() / scaled(1e-12);
    let far = scaled(1e-300);
    Outcome {
        pass: oracle <= 1e-6 && tends_to_zero && drift < 0.05 && far > 0.0 && (far - 2.0).abs() < 0.01,
        detail: format!(
            "oracle rel err = {oracle:.1e}, q·log(1/ε) = {:.4} at 1e-12, drift over last decade = {drift:.2e}, \
             {far:.4} at 1e-300",
            scaled(1e-12)
        ),
    }
}

fn annulus() -> Outcome {
    let eps = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let vals: Vec<f64> = eps
        .iter()
        .map(|&e| annulus_eigs(1.0, &Nonlinearity::Exponential, e, 1).unwrap().eigenvalues[0])
        .collect();
    let monotone = vals.windows(2).all(|w| w[1] <= w[0]);
    let err = (vals[5] - closed_nu1(1.0)).abs();
    Outcome {
        pass: monotone && err <= 1e-3,
        detail: format!("Λ₁ = {:?}, nonincreasing = {monotone}, |Λ₁(1e-6) - ν₁| = {err:.1e}", vals.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>()),
    }
}

#[test]
fn acceptance() {
    let m = mesh();
    let results = [
        (1, "nu1 oracle", nu1_oracle(&m)),
        (2, "eigenfunction", eigenfunction(&m)),
        (3, "Legendre identity", legendre()),
        (4, "Morse cross-validation", morse_grid(&m)),
        (5, "bifurcation values", bifurcation_values()),
        (6, "branch continuation", branch()),
        (7, "Pohozaev and mass bounds", pohozaev()),
        (8, "plane dichotomy", plane()),
        (9, "attainment counterexample", attainment()),
        (10, "annulus convergence", annulus()),
    ];
    std::io::stdout().lock().write_all(b"\n").unwrap();
    for (n, title, o) in &results {
        report(*n, title, o);
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
