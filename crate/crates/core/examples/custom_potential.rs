//! A system outside the catalog: coefficient functions given as parsed
//! expressions, solved with the adaptive integrator and quadrature instead
//! of closed forms. Here a harmonic trap with a slowly modulated frequency
//! and a sinusoidal drive.

use std::sync::Arc;

use squeezed_dynamics::aux_solutions::BasisInitialConditions;
use squeezed_dynamics::driving::DrivingIntegrals;
use squeezed_dynamics::phase_space::{covariance, expect_xp_from_initial, uncertainty_product};
use squeezed_dynamics::{numeric_basis, InitialPhasePoint, SystemSpec};

fn main() {
    let g2 = squeezed_dynamics::expr::parse("0.5*(1 + 0.2*sin(0.5*t))^2").unwrap();
    let g1 = squeezed_dynamics::expr::parse("0.3*cos(t)").unwrap();
    let g0 = squeezed_dynamics::expr::parse("0").unwrap();
    let system = SystemSpec::custom(g2, g1, g0);

    let tau_max = 10.0;
    let basis = Arc::new(
        numeric_basis(
            system.g2(),
            BasisInitialConditions::natural(),
            tau_max,
            1e-10,
        )
        .unwrap(),
    );
    // integration constants default to zero for a custom system
    let driving = DrivingIntegrals::with_constants(basis.clone(), system.g1(), 1e-9, 0.0, 0.0);

    let point = InitialPhasePoint::new(1.0, 0.0);
    let (r, theta) = (0.6, 0.0);

    println!("g2 = 0.5*(1 + 0.2*sin(0.5*t))^2, g1 = 0.3*cos(t)");
    println!("x0 = 1, p0 = 0, z = ({r}, {theta})\n");
    println!(
        "{:>5}  {:>12}  {:>12}  {:>12}",
        "tau", "<x>", "<p>", "product"
    );
    for i in 0..=20 {
        let tau = tau_max * i as f64 / 20.0;
        let (x, p) = expect_xp_from_initial(&basis, &driving, point, tau).unwrap();
        let cov = covariance(&basis, r, theta, tau).unwrap();
        println!(
            "{tau:>5.2}  {x:>12.6}  {p:>12.6}  {:>12.6}",
            uncertainty_product(&cov)
        );
    }
}
