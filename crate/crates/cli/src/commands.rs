//! One function per subcommand. Each returns a table with the full
//! parameter tuple on every row, diagnostics, and the panels to plot.

use std::fmt;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use liouville_core::bifurcation::{
    alpha_k, continue_branch, count_j, detect_degeneracy, gamma_k_alpha_exp, lambda_k_exp, mu_k_exp, BifurcationPoint,
    ClosedFormNu1, Controls, Nu1Provider, NumericNu1,
};
use liouville_core::conservation::{
    bounds_check, mass, radial_mass_exp, radial_normal_derivative_exp, schwarz_gap, BranchField,
};
use liouville_core::mesh::{RadialMesh, DEFAULT_NODES};
use liouville_core::model::{lambda_of_mu, mu_of_lambda};
use liouville_core::morse::{boundary_candidates, morse_argument, morse_index_direct_many, morse_index_formula, plane_morse};
use liouville_core::plane::{kernel_basis, mode_shoot, plane_mass, plane_negative_count, resonant_mode};
use liouville_core::spectral::{nu1, nu1_closed_form_exp, Nu1};
use liouville_core::{Branch, Nonlinearity, ProblemParams, RadialSolution};

use crate::config::{config_error, BranchChoice, Command, RunConfig};
use crate::plot::{Panel, Series};
use crate::table::{Cell, Report, Table};

/// `(x, y)` from two float columns of the rows selected by `keep`.
fn column_points(table: &Table, keep: impl Fn(&[Cell]) -> bool, x: usize, y: usize) -> Vec<(f64, f64)> {
    table
        .rows
        .iter()
        .filter(|r| keep(r))
        .filter_map(|r| match (&r[x], &r[y]) {
            (Cell::F(a), Cell::F(b)) => Some((*a, *b)),
            _ => None,
        })
        .collect()
}

/// A computed result broke a proven bound or invariant; exits with status 4.
#[derive(Debug)]
pub struct InvariantError(pub String);

impl fmt::Display for InvariantError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvariantError {}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> anyhow::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(InvariantError(msg()).into())
    }
}

pub struct Outcome {
    pub report: Report,
    pub panels: Vec<Panel>,
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    match cfg.command {
        Command::Radial => radial(cfg),
        Command::Nu1 => nu1_table(cfg),
        Command::Morse => morse(cfg),
        Command::Degeneracy => degeneracy(cfg),
        Command::Branch => branch(cfg),
        Command::Pohozaev => pohozaev(cfg),
        Command::Plane => plane(cfg),
        Command::Sweep => sweep(cfg),
    }
}

fn check_lambda(values: &[f64], upper_inclusive: bool) -> anyhow::Result<()> {
    for &l in values {
        let ok = l > 0.0 && if upper_inclusive { l <= 2.0 } else { l < 2.0 };
        if !ok {
            return Err(config_error(format!("lambda = {l} outside (0, 2{}", if upper_inclusive { "]" } else { ")" })));
        }
    }
    Ok(())
}

fn alphas(cfg: &RunConfig, default: &[f64], min: f64, strict: bool) -> anyhow::Result<Vec<f64>> {
    let v = cfg.alpha.clone().unwrap_or_else(|| default.to_vec());
    for &a in &v {
        if a < min || (strict && a == min) {
            return Err(config_error(format!("alpha = {a} must be {} {min}", if strict { ">" } else { ">=" })));
        }
    }
    Ok(v)
}

fn eigen_mesh(cfg: &RunConfig) -> anyhow::Result<RadialMesh> {
    let n = cfg.n.unwrap_or(DEFAULT_NODES);
    if !(16..=1 << 20).contains(&n) {
        return Err(config_error(format!("n = {n} outside [16, 2^20]")));
    }
    Ok(RadialMesh::eigen_default(n)?)
}

/// `(λ, μ)` pairs at each `α` from whichever of `--lambda` / `--mu` is given.
fn loads(cfg: &RunConfig, alpha: f64, default_lambda: &[f64]) -> anyhow::Result<Vec<(f64, f64)>> {
    match (&cfg.lambda, &cfg.mu) {
        (Some(_), Some(_)) => Err(config_error("give either --lambda or --mu, not both")),
        (None, Some(mus)) => {
            let cap = 0.5 * (2.0 + alpha).powi(2);
            mus.iter()
                .map(|&m| {
                    if m > 0.0 && m <= cap {
                        Ok((lambda_of_mu(m, alpha), m))
                    } else {
                        Err(config_error(format!("mu = {m} outside (0, {cap}] at alpha = {alpha}")))
                    }
                })
                .collect()
        }
        (l, None) => {
            let ls = l.clone().unwrap_or_else(|| default_lambda.to_vec());
            check_lambda(&ls, true)?;
            Ok(ls.iter().map(|&l| (l, mu_of_lambda(l, alpha))).collect())
        }
    }
}

fn branches(choice: BranchChoice, lambda: f64) -> Vec<Branch> {
    if lambda >= 2.0 - 1e-14 {
        return vec![Branch::Critical];
    }
    match choice {
        BranchChoice::Minimal => vec![Branch::Minimal],
        BranchChoice::Blowup => vec![Branch::Blowup],
        BranchChoice::Both => vec![Branch::Minimal, Branch::Blowup],
    }
}

fn params(lambda: f64, mu: f64, alpha: f64) -> anyhow::Result<ProblemParams> {
    let mut p = ProblemParams::exponential(lambda.min(2.0), alpha)?;
    p.mu = mu;
    Ok(p)
}

fn radial(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let alphas = alphas(cfg, &[2.0], 0.0, true)?;
    let mut points = Vec::new();
    for &a in &alphas {
        for (l, m) in loads(cfg, a, &[1.0])? {
            for b in branches(cfg.branch, l) {
                points.push((a, l, m, b));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(a, l, m, b)| -> anyhow::Result<_> {
            let sol = RadialSolution::exponential(&params(l, m, a)?, b)?;
            let closed = radial_mass_exp(a, m, b)?;
            Ok(vec![
                l.into(),
                m.into(),
                a.into(),
                b.to_string().into(),
                sol.delta.into(),
                sol.eval(0.0).into(),
                mass(&sol, a, m).into(),
                closed.into(),
                radial_normal_derivative_exp(sol.delta, a).into(),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table =
        Table::new(&["lambda", "mu", "alpha", "branch", "delta", "u_center", "mass", "mass_closed", "normal_derivative"]);
    rows.into_iter().for_each(|r| table.push(r));
    let mut series = Vec::new();
    for &a in &alphas {
        for b in [Branch::Minimal, Branch::Blowup, Branch::Critical] {
            let tag = Cell::S(b.to_string());
            let pts = column_points(&table, |r| r[2] == Cell::F(a) && r[3] == tag, 1, 5);
            if !pts.is_empty() {
                series.push(Series { label: format!("α = {a}, {b}"), points: pts });
            }
        }
    }
    let panels = vec![Panel { title: "radial solutions".into(), x_label: "μ".into(), y_label: "u(0)".into(), series }];
    Ok(Outcome { report: Report { table, diagnostics: Map::new() }, panels })
}

fn nu1_table(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let default: Vec<f64> = (0..20).map(|i| 0.1 + 1.8 * i as f64 / 19.0).collect();
    let lambdas = cfg.lambda.clone().unwrap_or(default);
    check_lambda(&lambdas, true)?;
    let mesh = eigen_mesh(cfg)?;
    let rows = lambdas
        .par_iter()
        .map(|&l| -> anyhow::Result<_> {
            let v = nu1(l, &Nonlinearity::Exponential, &mesh)?;
            let closed = nu1_closed_form_exp(l)?;
            Ok((l, v, closed))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table = Table::new(&["lambda", "nu1_numeric", "nu1_closed", "abs_err", "negative"]);
    let mut worst: f64 = 0.0;
    for &(l, v, c) in &rows {
        let (val, err) = match v {
            Nu1::Negative(x) => (Some(x), Some((x - c).abs())),
            Nu1::NoNegativeEigenvalue => (None, None),
        };
        worst = worst.max(err.unwrap_or(0.0));
        table.push(vec![l.into(), val.into(), c.into(), err.into(), matches!(v, Nu1::Negative(_)).into()]);
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("max_abs_err".into(), json!(worst));
    diagnostics.insert("nodes".into(), json!(mesh.len()));
    let panels = vec![Panel {
        title: "first weighted eigenvalue".into(),
        x_label: "λ".into(),
        y_label: "ν₁".into(),
        series: vec![
            Series { label: "numeric".into(), points: rows.iter().filter_map(|r| r.1.value().map(|v| (r.0, v))).collect() },
            Series { label: "(λ-2)/2".into(), points: rows.iter().map(|r| (r.0, r.2)).collect() },
        ],
    }];
    Ok(Outcome { report: Report { table, diagnostics }, panels })
}

fn morse(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let lambdas = cfg.lambda.clone().unwrap_or_else(|| vec![1.0]);
    check_lambda(&lambdas, false)?;
    let alphas = alphas(cfg, &[1.0, 2.5, 4.0], 0.0, true)?;
    let mesh = eigen_mesh(cfg)?;
    let amax = alphas.iter().copied().fold(0.0, f64::max);
    let reports = lambdas
        .par_iter()
        .map(|&l| -> anyhow::Result<_> {
            let k_max = cfg.k_max.unwrap_or_else(|| morse_argument(amax, 0.5 * (l - 2.0)).ceil() as usize + 3);
            Ok(morse_index_direct_many(l, &alphas, &Nonlinearity::Exponential, &mesh, k_max)?)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "lambda",
        "alpha",
        "nu1",
        "argument",
        "m_formula",
        "m_direct",
        "boundary_flag",
        "first_nonnegative_mode",
    ]);
    let mut flagged = 0;
    for rep in reports.iter().flatten() {
        if rep.boundary_flag {
            flagged += 1;
        } else {
            ensure(rep.m_formula == rep.m_direct, || {
                format!(
                    "formula index {} differs from direct count {} at lambda = {}, alpha = {}",
                    rep.m_formula, rep.m_direct, rep.lambda, rep.alpha
                )
            })?;
        }
        table.push(vec![
            rep.lambda.into(),
            rep.alpha.into(),
            rep.nu1.into(),
            rep.argument.into(),
            rep.m_formula.into(),
            rep.m_direct.into(),
            rep.boundary_flag.into(),
            rep.first_nonnegative_mode().into(),
        ]);
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("flagged".into(), json!(flagged));
    let per_mode: Vec<Value> = reports
        .iter()
        .flatten()
        .map(|r| json!({"lambda": r.lambda, "alpha": r.alpha, "modes": r.per_mode}))
        .collect();
    diagnostics.insert("per_mode".into(), Value::Array(per_mode));
    let panels = vec![Panel {
        title: "Morse index".into(),
        x_label: "α".into(),
        y_label: "m".into(),
        series: lambdas
            .iter()
            .zip(&reports)
            .map(|(l, reps)| Series {
                label: format!("λ = {l}"),
                points: reps.iter().map(|r| (r.alpha, r.m_direct as f64)).collect(),
            })
            .collect(),
    }];
    Ok(Outcome { report: Report { table, diagnostics }, panels })
}

fn provider(cfg: &RunConfig) -> anyhow::Result<Box<dyn Nu1Provider>> {
    Ok(if cfg.numeric {
        Box::new(NumericNu1::new(Nonlinearity::Exponential, eigen_mesh(cfg)?))
    } else {
        Box::new(ClosedFormNu1)
    })
}

fn degeneracy(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let ks = cfg.k.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
    if ks.contains(&0) {
        return Err(config_error("degeneracy needs k >= 1"));
    }
    let alphas = alphas(cfg, &(0..=48).map(|i| 0.25 * i as f64).collect::<Vec<_>>(), 0.0, false)?;
    let prov = provider(cfg)?;
    let tol = if cfg.numeric { 1e-3 } else { 1e-8 };
    let points: Vec<(usize, f64)> = ks.iter().flat_map(|&k| alphas.iter().map(move |&a| (k, a))).collect();
    let found = points
        .par_iter()
        .map(|&(k, a)| -> anyhow::Result<_> {
            let roots = detect_degeneracy((0.02, 2.0 - 1e-9), a, k, prov.as_ref())?;
            Ok(roots.first().map(|&l| (k, a, l)))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table = Table::new(&["k", "alpha", "lambda", "mu", "lambda_closed", "mu_closed", "identity_residual"]);
    let mut curves: Vec<Series> = Vec::new();
    for &(k, a, l) in found.iter().flatten() {
        let mu = mu_of_lambda(l, a);
        let lc = lambda_k_exp(a, k);
        let residual = 2.0 * mu - ((2.0 + a).powi(2) - 4.0 * (k * k) as f64);
        ensure((l - lc).abs() <= tol, || format!("root {l} differs from lambda_k = {lc} at k = {k}, alpha = {a}"))?;
        table.push(vec![k.into(), a.into(), l.into(), mu.into(), lc.into(), mu_k_exp(a, k).into(), residual.into()]);
        match curves.last_mut() {
            Some(s) if s.label == format!("k = {k}") => s.points.push((a, mu)),
            _ => curves.push(Series { label: format!("k = {k}"), points: vec![(a, mu)] }),
        }
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("nu1".into(), json!(if cfg.numeric { "numeric" } else { "closed_form" }));
    let counts: Map<String, Value> = alphas.iter().map(|a| (a.to_string(), json!(count_j(*a)))).collect();
    diagnostics.insert("j".into(), Value::Object(counts));
    let panels = vec![Panel {
        title: "degeneracy curves γ_k".into(),
        x_label: "α".into(),
        y_label: "μ".into(),
        series: curves,
    }];
    Ok(Outcome { report: Report { table, diagnostics }, panels })
}

fn branch(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let alphas = alphas(cfg, &[2.0], 0.0, true)?;
    let ks = cfg.k.clone().unwrap_or_else(|| vec![1]);
    let d = Controls::default();
    let ctl = Controls {
        n: cfg.n.unwrap_or(d.n),
        modes: cfg.modes.unwrap_or(d.modes),
        mu_stop: cfg.mu_stop.unwrap_or(d.mu_stop),
        max_steps: cfg.max_steps.unwrap_or(d.max_steps),
        step: cfg.step.unwrap_or(d.step),
        ..d
    };
    if !(8..=4096).contains(&ctl.n) || !(1..=64).contains(&ctl.modes) {
        return Err(config_error(format!("branch grid needs 8 <= n <= 4096 and 1 <= modes <= 64 (got {}, {})", ctl.n, ctl.modes)));
    }
    if !(ctl.step > 0.0 && ctl.mu_stop >= 0.0) {
        return Err(config_error("step must be positive and mu-stop nonnegative"));
    }
    let mut starts = Vec::new();
    for &a in &alphas {
        for &k in &ks {
            starts.push(BifurcationPoint::exponential(a, k).map_err(|e| config_error(e.to_string()))?);
        }
    }
    let runs = starts
        .par_iter()
        .map(|s| continue_branch(s, -1.0, &ctl))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&[
        "alpha",
        "k",
        "step",
        "mu",
        "max_u",
        "min_u",
        "nonradial_amplitude",
        "mass",
        "residual",
        "arclength",
    ]);
    let mut diag_runs = Vec::new();
    let mut max_u = Vec::new();
    let mut amp = Vec::new();
    for run in &runs {
        let (a, k) = (run.start.alpha, run.start.k);
        let mut worst_sym: f64 = 0.0;
        for (i, s) in run.states.iter().enumerate() {
            let dg = &s.diagnostics;
            worst_sym = worst_sym.max(run.rotation_defect(s));
            table.push(vec![
                a.into(),
                k.into(),
                i.into(),
                s.mu.into(),
                dg.max_u.into(),
                dg.min_u.into(),
                dg.nonradial_amplitude.into(),
                dg.mass.into(),
                dg.residual.into(),
                s.arclength.into(),
            ]);
            if s.mu < run.start.mu {
                let rep = bounds_check(&BranchField { grid: &run.grid, state: s }, a, s.mu)?;
                ensure(rep.margin() > 0.0, || format!("branch state at mu = {} touches the mass bounds", s.mu))?;
            }
        }
        ensure(worst_sym <= 1e-12, || format!("rotation symmetry defect {worst_sym:e} on the k = {k} branch"))?;
        diag_runs.push(json!({
            "alpha": a,
            "k": k,
            "mu_start": run.start.mu,
            "states": run.states.len(),
            "folds": run.folds,
            "termination": run.termination,
            "rotation_defect": worst_sym,
        }));
        let label = format!("α = {a}, k = {k}");
        max_u.push(Series { label: label.clone(), points: run.states.iter().map(|s| (s.mu, s.diagnostics.max_u)).collect() });
        amp.push(Series { label, points: run.states.iter().map(|s| (s.mu, s.diagnostics.nonradial_amplitude)).collect() });
    }
    let mut diagnostics = Map::new();
    diagnostics.insert("runs".into(), Value::Array(diag_runs));
    diagnostics.insert("controls".into(), serde_json::to_value(ctl)?);
    let panels = vec![
        Panel { title: "branch: maximum".into(), x_label: "μ".into(), y_label: "max u".into(), series: max_u },
        Panel { title: "branch: nonradial part".into(), x_label: "μ".into(), y_label: "nonradial amplitude".into(), series: amp },
    ];
    Ok(Outcome { report: Report { table, diagnostics }, panels })
}

fn pohozaev(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let alphas = alphas(cfg, &[1.0, 2.0, 4.0], 0.0, true)?;
    let mut points = Vec::new();
    for &a in &alphas {
        for (l, m) in loads(cfg, a, &[1.0])? {
            for b in branches(cfg.branch, l) {
                points.push((a, l, m, b));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(a, l, m, b)| -> anyhow::Result<_> {
            let sol = RadialSolution::exponential(&params(l, m, a)?, b)?;
            let rep = bounds_check(&sol, a, m)?;
            Ok(vec![
                l.into(),
                m.into(),
                a.into(),
                b.to_string().into(),
                rep.mass.into(),
                rep.lower.into(),
                rep.upper.into(),
                rep.pohozaev_residual.into(),
                schwarz_gap(&sol).into(),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table =
        Table::new(&["lambda", "mu", "alpha", "branch", "mass", "lower", "upper", "pohozaev_residual", "schwarz_gap"]);
    rows.into_iter().for_each(|r| table.push(r));
    let mut series = Vec::new();
    for &a in &alphas {
        for (name, col) in [("lower", 5), ("upper", 6), ("mass", 4)] {
            let pts = column_points(&table, |r| r[2] == Cell::F(a), 1, col);
            series.push(Series { label: format!("α = {a}, {name}"), points: pts });
        }
    }
    let panels = vec![Panel { title: "mass and bounds".into(), x_label: "μ".into(), y_label: "mass".into(), series }];
    Ok(Outcome { report: Report { table, diagnostics: Map::new() }, panels })
}

fn plane(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let alphas = alphas(cfg, &[2.0], 0.0, false)?;
    let rows = alphas
        .par_iter()
        .map(|&a| -> anyhow::Result<_> {
            let kernel = kernel_basis(a)?;
            let top = (1.0 + 0.5 * a).ceil() as usize + 2;
            let shots = (0..=top).map(|m| mode_shoot(a, m)).collect::<Result<Vec<_>, _>>()?;
            let agrees = shots.iter().all(|s| s.agrees());
            let pm = plane_morse(a)?;
            let count = plane_negative_count(a)?;
            ensure(pm == count, || format!("plane Morse index {pm} differs from negative-mode count {count} at alpha = {a}"))?;
            ensure(agrees, || format!("shooting disagrees with the algebraic criterion at alpha = {a}"))?;
            let modes: Vec<String> = kernel.basis.iter().map(|e| format!("{}:{:?}", e.mode, e.angular).to_lowercase()).collect();
            Ok(vec![
                a.into(),
                kernel.dimension.into(),
                resonant_mode(a).into(),
                modes.join(" ").into(),
                pm.into(),
                count.into(),
                agrees.into(),
                plane_mass(a).into(),
            ])
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "alpha",
        "kernel_dimension",
        "resonant_mode",
        "kernel_basis",
        "plane_morse",
        "negative_mode_count",
        "shooting_agrees",
        "mass",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    let panels = vec![Panel {
        title: "entire-plane linearization".into(),
        x_label: "α".into(),
        y_label: "count".into(),
        series: vec![
            Series {
                label: "kernel dimension".into(),
                points: alphas.iter().map(|&a| (a, kernel_basis(a).map_or(f64::NAN, |k| k.dimension as f64))).collect(),
            },
            Series {
                label: "Morse index".into(),
                points: alphas.iter().map(|&a| (a, plane_morse(a).map_or(f64::NAN, |m| m as f64))).collect(),
            },
        ],
    }];
    Ok(Outcome { report: Report { table, diagnostics: Map::new() }, panels })
}

fn sweep(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let lambdas = cfg.lambda.clone().unwrap_or_else(|| (1..=19).map(|i| 0.1 * i as f64).collect());
    check_lambda(&lambdas, false)?;
    let alphas = alphas(cfg, &(1..=20).map(|i| 0.5 * i as f64).collect::<Vec<_>>(), 0.0, true)?;
    let prov = provider(cfg)?;
    let nus = lambdas.par_iter().map(|&l| prov.nu1(l)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["lambda", "alpha", "nu1", "argument", "morse_index", "boundary_flag", "degenerate_modes"]);
    for (&l, &nu) in lambdas.iter().zip(&nus) {
        for &a in &alphas {
            let x = morse_argument(a, nu);
            let flag = boundary_candidates(x).is_some();
            let m = if nu < 0.0 && !flag { Some(morse_index_formula(a, nu)?) } else { None };
            // modes k ≥ 1 with F_k(λ, α) < 0, i.e. the γ_k lying to the right of (λ, α)
            let below = (1..).take_while(|&k| nu + 4.0 * (k * k) as f64 / (2.0 + a).powi(2) < 0.0).count();
            table.push(vec![l.into(), a.into(), nu.into(), x.into(), m.into(), flag.into(), below.into()]);
        }
    }
    let (amin, amax) = alphas.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    let kmax = (1..).take_while(|&k| lambda_k_exp(amax, k) > 0.0).count().max(1);
    let mut series = Vec::new();
    for k in 1..=kmax {
        let pts: Vec<(f64, f64)> = lambdas
            .iter()
            .filter_map(|&l| {
                let a = if cfg.numeric { alpha_k(l, k, prov.as_ref()).ok().flatten()? } else { gamma_k_alpha_exp(l, k) };
                (a >= amin && a <= amax).then_some((l, a))
            })
            .collect();
        if !pts.is_empty() {
            series.push(Series { label: format!("γ_{k}"), points: pts });
        }
    }
    let panels = vec![Panel { title: "degeneracy curves".into(), x_label: "λ".into(), y_label: "α".into(), series }];
    let mut diagnostics = Map::new();
    diagnostics.insert("nu1".into(), json!(if cfg.numeric { "numeric" } else { "closed_form" }));
    Ok(Outcome { report: Report { table, diagnostics }, panels })
}
