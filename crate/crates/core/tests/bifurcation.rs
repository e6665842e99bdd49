use liouville_core::bifurcation::{
    continue_branch, lambda_k_exp, mu_k_exp, trace_gamma_k, BifurcationPoint, ClosedFormNu1, Controls, DiskGrid,
};
use liouville_core::mesh::RadialMesh;
use liouville_core::model::{Branch, ProblemParams, RadialSolution};
use liouville_core::morse::{morse_index_direct, morse_index_exp};
use liouville_core::Nonlinearity;
use proptest::prelude::*;

fn mesh() -> RadialMesh {
    RadialMesh::eigen_default(2048).unwrap()
}

#[test]
fn mode_k_eigenvalue_changes_sign_across_lambda_k() {
    let mesh = mesh();
    for (alpha, k) in [(2.0, 1), (4.0, 1), (4.0, 2), (5.0, 3)] {
        let lk = lambda_k_exp(alpha, k);
        let below = morse_index_direct(lk - 0.05, alpha, &Nonlinearity::Exponential, &mesh, 12).unwrap();
        let above = morse_index_direct(lk + 0.05, alpha, &Nonlinearity::Exponential, &mesh, 12).unwrap();
        assert!(below.per_mode[k].least < 0.0, "alpha {alpha} k {k}");
        assert!(above.per_mode[k].least > 0.0, "alpha {alpha} k {k}");
        // crossing λ_k removes one mode of multiplicity two
        assert_eq!(below.m_direct, above.m_direct + 2);
        assert_eq!(below.m_formula, above.m_formula + 2);
    }
}

#[test]
fn gamma_curves_in_mu_plane() {
    let alphas: Vec<f64> = (1..=24).map(|i| 0.5 * i as f64).collect();
    for k in 1..=4 {
        let c = trace_gamma_k(k, &alphas, &ClosedFormNu1).unwrap();
        for (l, a) in c.samples {
            let mu = l * (2.0 + a).powi(2) / 4.0;
            assert!((2.0 * mu - ((2.0 + a).powi(2) - 4.0 * (k * k) as f64)).abs() < 1e-8 * (2.0 + a).powi(2));
            assert!((mu - mu_k_exp(a, k)).abs() < 1e-8 * (2.0 + a).powi(2));
        }
    }
}

fn jacobian_fd_errors(grid: &DiskGrid, c: &[f64], mu: f64) -> Vec<f64> {
    let (jac, d_mu) = grid.jacobian(c, mu).unwrap();
    let dir: Vec<f64> = (0..grid.dim()).map(|i| ((i * 37 % 11) as f64 / 11.0 - 0.5) * 0.1).collect();
    let base = grid.residual(c, mu).unwrap();
    let jd = jac.matvec(&dir);
    let mut out = Vec::new();
    for h in [1e-3, 1e-4, 1e-5] {
        let shifted: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a + h * b).collect();
        let f = grid.residual(&shifted, mu).unwrap();
        let err = f.iter().zip(&base).zip(&jd).map(|((a, b), j)| ((a - b) / h - j).abs()).fold(0.0, f64::max);
        out.push(err);
    }
    let f = grid.residual(c, mu + 1e-6).unwrap();
    let dm = f.iter().zip(&base).zip(&d_mu).map(|((a, b), j)| ((a - b) / 1e-6 - j).abs()).fold(0.0, f64::max);
    out.push(dm);
    out
}

#[test]
fn jacobian_first_order_slope() {
    let grid = DiskGrid::new(64, 4, 2, 5.0).unwrap();
    let p = ProblemParams::exponential(1.0, 5.0).unwrap();
    let sol = RadialSolution::exponential(&p, Branch::Blowup).unwrap();
    let c = grid.embed_radial(&sol);
    let errs = jacobian_fd_errors(&grid, &c, p.mu);
    // one-sided differences: error falls by about ten per decade of h
    for w in errs[..3].windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 7.0 && ratio < 13.0, "{errs:?}");
    }
    assert!(errs[3] < 1e-6, "{errs:?}");
}

#[test]
fn modes_one_and_two_give_distinct_branches_at_alpha_five() {
    let ctl = Controls { max_steps: 6, n: 96, modes: 6, ..Controls::default() };
    let one = continue_branch(&BifurcationPoint::exponential(5.0, 1).unwrap(), -1.0, &ctl).unwrap();
    let two = continue_branch(&BifurcationPoint::exponential(5.0, 2).unwrap(), -1.0, &ctl).unwrap();
    assert!((one.start.mu - two.start.mu).abs() > 1.0);
    let s1 = one.states.last().unwrap();
    let s2 = two.states.last().unwrap();
    // the k = 2 branch is π-periodic, the k = 1 branch is not
    assert!(two.half_turn_defect(s2) < 1e-12);
    assert!(one.half_turn_defect(s1) > 1e-6);
    for s in &two.states {
        assert!(two.rotation_defect(s) < 1e-12);
        assert!(s.diagnostics.residual <= 1e-10);
    }
}

#[test]
fn start_outside_bifurcation_set_is_rejected() {
    assert!(BifurcationPoint::exponential(2.0, 2).is_err());
    assert!(BifurcationPoint::exponential(5.0, 4).is_err());
    assert!(BifurcationPoint::exponential(0.0, 1).is_err());
}

proptest! {
    #[test]
    fn morse_index_monotone_and_odd(l in 0.05f64..1.95, a in 0.05f64..12.0, dl in 0.0f64..0.5, da in 0.0f64..3.0) {
        if let (Ok(m), Ok(ma), Ok(ml)) = (
            morse_index_exp(l, a),
            morse_index_exp(l, a + da),
            morse_index_exp((l + dl).min(1.99), a),
        ) {
            prop_assert!(ma >= m);
            prop_assert!(ml <= m);
            prop_assert_eq!(m % 2, 1);
        }
    }
}
