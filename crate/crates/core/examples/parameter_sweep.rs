//! Sweep the squeeze magnitude and tabulate the worst-case and final
//! uncertainty products over one oscillator period. The maximum follows
//! (1/4)(1 + sinh^2 2r).

use squeezed_dynamics::phase_space::{covariance, uncertainty_product};
use squeezed_dynamics::{analytic_basis, SystemSpec};

fn main() {
    let system = SystemSpec::harmonic(1.0).unwrap();
    let basis = analytic_basis(&system).unwrap();
    let tau_max = std::f64::consts::TAU;
    let steps = 400;

    println!(
        "{:>5}  {:>12}  {:>12}  {:>14}",
        "r", "product_max", "product_end", "(1+sinh^2 2r)/4"
    );
    for i in 0..=6 {
        let r = 0.25 * i as f64;
        let mut product_max = f64::NEG_INFINITY;
        let mut product_final = 0.0;
        for j in 0..=steps {
            let tau = tau_max * j as f64 / steps as f64;
            let cov = covariance(&basis, r, 0.0, tau).unwrap();
            product_final = uncertainty_product(&cov);
            product_max = product_max.max(product_final);
        }
        let closed = 0.25 * (1.0 + (2.0 * r).sinh().powi(2));
        println!("{r:>5.2}  {product_max:>12.6}  {product_final:>12.6}  {closed:>14.6}");
    }
}
