//! The three equivalent state parameterizations: direct (x0, p0), coherent
//! parameters (alpha, z), and the squeeze-first ordering (z, alpha). All
//! three describe the same physical state and yield identical expectation
//! values.

use std::sync::Arc;

use squeezed_dynamics::phase_space::{
    expect_xp_alpha_z, expect_xp_from_initial, expect_xp_z_alpha, params_alpha_z,
    solve_alpha_given_z,
};
use squeezed_dynamics::{analytic_basis, driving_integrals, InitialPhasePoint, SystemSpec};

fn main() {
    let system = SystemSpec::driven(1.0, 2.0).unwrap();
    let basis = Arc::new(analytic_basis(&system).unwrap());
    let driving = driving_integrals(basis.clone(), system.g1(), &system, 1e-10).unwrap();

    let point = InitialPhasePoint::new(0.8, -0.5);
    let (r, theta) = (0.7, 1.2);

    let az = params_alpha_z(point, &basis, &driving, r, theta).unwrap();
    let za = solve_alpha_given_z(point, r, theta, &basis, &driving).unwrap();

    println!("driven oscillator, x0 = {}, p0 = {}, z = ({r}, {theta})", point.x0, point.p0);
    println!(
        "(alpha, z) parameters: |alpha| = {:.6}, delta = {:.6}",
        az.alpha_abs, az.delta
    );
    println!(
        "(z, alpha) parameters: |alpha| = {:.6}, delta = {:.6}",
        za.alpha_abs, za.delta
    );
    println!();
    println!(
        "{:>5}  {:>24}  {:>24}  {:>24}",
        "tau", "direct (x, p)", "alpha-z route", "z-alpha route"
    );
    for i in 0..=6 {
        let tau = 0.5 * i as f64;
        let a = expect_xp_from_initial(&basis, &driving, point, tau).unwrap();
        let b = expect_xp_alpha_z(&az, &basis, &driving, tau).unwrap();
        let c = expect_xp_z_alpha(&za, &basis, &driving, tau).unwrap();
        println!(
            "{tau:>5.2}  ({:>10.6}, {:>10.6})  ({:>10.6}, {:>10.6})  ({:>10.6}, {:>10.6})",
            a.0, a.1, b.0, b.1, c.0, c.1
        );
    }
}
