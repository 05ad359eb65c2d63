//! Evolve the same initial phase point in each of the five catalog systems
//! and print the resulting trajectories side by side.

use std::sync::Arc;

use squeezed_dynamics::phase_space::expect_xp_from_initial;
use squeezed_dynamics::{analytic_basis, driving_integrals, InitialPhasePoint, SystemSpec};

fn main() {
    let systems = [
        ("harmonic  w=1", SystemSpec::harmonic(1.0).unwrap()),
        ("free", SystemSpec::free_particle()),
        ("linear    k=2", SystemSpec::linear(2.0)),
        ("driven    w=1 k=2", SystemSpec::driven(1.0, 2.0).unwrap()),
        ("repulsive W=1", SystemSpec::repulsive(1.0).unwrap()),
    ];
    let point = InitialPhasePoint::new(1.0, 0.0);

    println!("initial state: x0 = {}, p0 = {}\n", point.x0, point.p0);
    for (label, system) in systems {
        let basis = Arc::new(analytic_basis(&system).unwrap());
        let driving = driving_integrals(basis.clone(), system.g1(), &system, 1e-10).unwrap();
        println!("{label}");
        println!("  {:>5}  {:>12}  {:>12}", "tau", "<x>", "<p>");
        for i in 0..=8 {
            let tau = 0.5 * i as f64;
            let (x, p) = expect_xp_from_initial(&basis, &driving, point, tau).unwrap();
            println!("  {tau:>5.2}  {x:>12.6}  {p:>12.6}");
        }
        println!();
    }
}
