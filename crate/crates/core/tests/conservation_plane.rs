use std::f64::consts::PI;

use liouville_core::bifurcation::{continue_branch, BifurcationPoint, Controls};
use liouville_core::conservation::{
    bounds_check, boundary_flux, mass, mass_bounds, radial_mass_exp, radial_normal_derivative_exp, schwarz_gap,
    BranchField, DiskField,
};
use liouville_core::model::{Branch, ProblemParams, RadialSolution};
use liouville_core::morse::plane_morse;
use liouville_core::plane::{
    kernel_basis, mode_shoot, plane_mass, plane_mass_quadrature, plane_negative_count, plane_negative_modes,
    plane_residual, Angular,
};
use proptest::prelude::*;

#[test]
fn radial_fields_saturate_schwarz() {
    for alpha in [1.0, 2.0, 4.0] {
        let p = ProblemParams::exponential(1.0, alpha).unwrap();
        for b in [Branch::Minimal, Branch::Blowup] {
            let sol = RadialSolution::exponential(&p, b).unwrap();
            assert!(schwarz_gap(&sol).abs() <= 1e-10 * (1.0 + boundary_flux(&sol).0));
            let exact = radial_normal_derivative_exp(sol.delta, alpha);
            assert!((sol.normal_derivative(0.3) - exact).abs() < 1e-9);
        }
    }
}

#[test]
fn branch_states_are_strictly_inside() {
    let ctl = Controls { max_steps: 8, n: 128, modes: 6, ..Controls::default() };
    let run = continue_branch(&BifurcationPoint::exponential(2.0, 1).unwrap(), -1.0, &ctl).unwrap();
    for s in run.states.iter().skip(1) {
        let f = BranchField { grid: &run.grid, state: s };
        assert!(schwarz_gap(&f) > 0.0);
        let rep = bounds_check(&f, 2.0, s.mu).unwrap();
        assert!(rep.margin() > 0.0, "{rep:?}");
        // the in-grid mass agrees with the quadrature
        assert!((rep.mass - s.diagnostics.mass).abs() < 1e-3 * rep.mass);
    }
}

#[test]
fn bounds_violation_is_reported() {
    let p = ProblemParams::exponential_mu(6.0, 2.0).unwrap();
    let sol = RadialSolution::exponential(&p, Branch::Blowup).unwrap();
    // the μ = 6 blow-up solution has mass 12π, above the μ = 7 upper bound
    assert!(bounds_check(&sol, 2.0, 7.0).is_err());
    assert!(bounds_check(&sol, 2.0, 6.0).is_ok());
}

#[test]
fn plane_solution_and_mass() {
    for alpha in [0.0, 0.5, 2.0, 5.0] {
        for delta in [0.1, 1.0, 7.0] {
            let q = plane_mass_quadrature(delta, alpha).unwrap();
            assert!((q - plane_mass(alpha)).abs() < 1e-9 * q, "{alpha} {delta}");
            for r in [1e-3, 0.5, 2.0, 1e3] {
                assert!(plane_residual(delta, alpha, r).abs() < 1e-8 * (1.0 + (2.0 + alpha).powi(2) / delta));
            }
        }
    }
    assert!((plane_mass(2.0) - 16.0 * PI).abs() < 1e-12);
}

#[test]
fn kernel_profiles_at_alpha_two() {
    let k = kernel_basis(2.0).unwrap();
    assert_eq!(k.dimension, 3);
    let e = k.basis[1];
    assert_eq!((e.mode, e.angular), (2, Angular::Cos));
    let r: f64 = 0.7;
    assert!((k.eval(&e, r, 0.4) - r * r * (0.8f64).cos() / (1.0 + r.powi(4))).abs() < 1e-15);
}

#[test]
fn first_excluded_plane_mode_is_nonnegative() {
    for i in 0..=20 {
        let alpha = 0.37 * i as f64;
        let modes = plane_negative_modes(alpha).unwrap();
        let m = modes.len();
        assert!((m * m) as f64 - (1.0 + 0.5 * alpha).powi(2) >= -1e-9);
        assert_eq!(plane_morse(alpha).unwrap(), plane_negative_count(alpha).unwrap());
    }
}

proptest! {
    #[test]
    fn blowup_mass_decreases_in_mu(alpha in 0.1f64..8.0, s in 0.01f64..0.98, ds in 0.001f64..0.02) {
        let cap = 0.5 * (2.0 + alpha).powi(2);
        let (m0, m1) = (s * cap, ((s + ds).min(0.999)) * cap);
        prop_assume!(m1 > m0);
        let a = radial_mass_exp(alpha, m0, Branch::Blowup).unwrap();
        let b = radial_mass_exp(alpha, m1, Branch::Blowup).unwrap();
        prop_assert!(b < a);
        let (lo, hi) = mass_bounds(alpha, m0).unwrap();
        prop_assert!(lo < hi);
    }

    #[test]
    fn radial_mass_matches_closed_form(lambda in 0.05f64..1.95, alpha in 0.2f64..6.0) {
        let p = ProblemParams::exponential(lambda, alpha).unwrap();
        for b in [Branch::Minimal, Branch::Blowup] {
            let sol = RadialSolution::exponential(&p, b).unwrap();
            let exact = radial_mass_exp(alpha, p.mu, b).unwrap();
            prop_assert!((mass(&sol, alpha, p.mu) - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn shooting_agrees_with_algebra(quarter in 0u32..32, m in 0usize..8) {
        // quarter-integer α keeps non-admissible modes well away from c = 1
        prop_assert!(mode_shoot(0.25 * quarter as f64, m).unwrap().agrees());
    }
}
