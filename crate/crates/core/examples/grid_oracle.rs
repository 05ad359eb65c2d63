//! Cross-check the closed-form engine against a split-step Fourier
//! propagator that knows nothing about auxiliary equations: it just
//! integrates the Schroedinger equation on a grid and measures moments.

use std::sync::Arc;

use squeezed_dynamics::oracle::{init_squeezed_wavefunction, SpatialGrid};
use squeezed_dynamics::phase_space::{covariance, expect_xp_from_initial};
use squeezed_dynamics::{analytic_basis, driving_integrals, InitialPhasePoint, SystemSpec};

fn main() {
    let system = SystemSpec::driven(1.0, 2.0).unwrap();
    let basis = Arc::new(analytic_basis(&system).unwrap());
    let driving = driving_integrals(basis.clone(), system.g1(), &system, 1e-10).unwrap();

    let point = InitialPhasePoint::new(0.5, -0.3);
    let (r, theta) = (0.8, 0.6);
    let cov0 = covariance(&basis, r, theta, 0.0).unwrap();

    let grid = SpatialGrid::new(2048, 25.0).unwrap();
    let mut wf = init_squeezed_wavefunction(grid, point, &cov0).unwrap();

    println!("driven oscillator, squeezed packet, grid n = 2048, domain [-25, 25]\n");
    println!(
        "{:>5}  {:>11} {:>11}  {:>11} {:>11}  {:>10}",
        "tau", "<x> engine", "<x> grid", "var_x eng", "var_x grid", "norm"
    );
    let mut tau = 0.0;
    for _ in 0..=8 {
        let (x, _) = expect_xp_from_initial(&basis, &driving, point, tau).unwrap();
        let cov = covariance(&basis, r, theta, tau).unwrap();
        let m = wf.moments();
        println!(
            "{tau:>5.2}  {x:>11.6} {:>11.6}  {:>11.6} {:>11.6}  {:>10.7}",
            m.mean_x, cov.var_x, m.var_x, m.norm
        );
        wf.propagate(&system, tau, tau + 0.5, 1e-3).unwrap();
        tau += 0.5;
    }
}
