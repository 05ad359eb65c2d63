//! The time-dependent ladder operators on the grid: a coherent state stays
//! an eigenstate of the lowering operator at every time, and the pair
//! satisfies the canonical commutation relation.

use num_complex::Complex64;
use std::sync::Arc;

use squeezed_dynamics::oracle::{
    init_squeezed_wavefunction, inner_product, ladder_lower, ladder_raise, SpatialGrid,
};
use squeezed_dynamics::phase_space::covariance;
use squeezed_dynamics::{analytic_basis, driving_integrals, InitialPhasePoint, SystemSpec};

fn main() {
    let system = SystemSpec::driven(1.0, 2.0).unwrap();
    let basis = Arc::new(analytic_basis(&system).unwrap());
    let driving = driving_integrals(basis.clone(), system.g1(), &system, 1e-10).unwrap();

    let point = InitialPhasePoint::new(0.7, -0.4);
    let cov0 = covariance(&basis, 0.0, 0.0, 0.0).unwrap();
    let grid = SpatialGrid::new(2048, 20.0).unwrap();
    let mut wf = init_squeezed_wavefunction(grid, point, &cov0).unwrap();

    // eigenvalue from the initial data: alpha = i (p0 xi0 - x0 xidot0 + i C0)
    let s0 = basis.evaluate(0.0).unwrap();
    let (c1_0, c2_0) = driving.constants();
    let alpha = Complex64::new(0.0, 1.0)
        * (point.p0 * s0.xi - point.x0 * s0.xidot
            + Complex64::new(c1_0, c2_0) * std::f64::consts::FRAC_1_SQRT_2);
    println!("coherent eigenvalue alpha = {:.6} + {:.6}i\n", alpha.re, alpha.im);

    println!("{:>5}  {:>14}  {:>14}", "tau", "|J- psi - a psi|", "<[J-, J+]>");
    let mut tau = 0.0;
    for _ in 0..=4 {
        let lowered = ladder_lower(&basis, &driving, tau, &wf).unwrap();
        let raised = ladder_raise(&basis, &driving, tau, &wf).unwrap();
        let dx = wf.grid().dx();
        let residual: f64 = lowered
            .iter()
            .zip(wf.values())
            .map(|(l, p)| (l - alpha * p).norm_sqr() * dx)
            .sum::<f64>()
            .sqrt();
        let commutator = inner_product(&wf, &raised, &raised).re
            - inner_product(&wf, &lowered, &lowered).re;
        println!("{tau:>5.2}  {residual:>14.3e}  {commutator:>14.10}");
        wf.propagate(&system, tau, tau + 0.5, 5e-4).unwrap();
        tau += 0.5;
    }
}
