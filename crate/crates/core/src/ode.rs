//! Embedded Dormand-Prince 5(4) integrator for the auxiliary equation
//! `a'' + 2 g2(tau) a = 0`, advancing both basis members at once with
//! quintic-Hermite dense output.
//!
//! The state is `[chi1, chi1', chi2, chi2']`. Node accelerations come from
//! the equation itself, so the per-member interpolant uses exact values of
//! `(a, a', a'')` at both ends of every accepted step.

use thiserror::Error;

use crate::expr::CoefficientFn;

#[derive(Debug, Error, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at tau = {tau} (stiff or singular coefficient)")]
    StepSizeUnderflow { tau: f64 },
    #[error("coefficient evaluated to a non-finite value at tau = {tau}")]
    NonFiniteCoefficient { tau: f64 },
    #[error("tau = {tau} outside the integrated domain [0, {tau_max}]")]
    OutOfDomain { tau: f64, tau_max: f64 },
}

const STAGES: usize = 7;

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; STAGES] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; STAGES] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [f64; 4];

#[derive(Debug, Clone, Copy)]
struct Node {
    tau: f64,
    y: State,
    /// [chi1'', chi2''] = -2 g2 [chi1, chi2]
    acc: [f64; 2],
}

/// Dense solution of the auxiliary pair on `[0, tau_max]`.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    nodes: Vec<Node>,
    tau_max: f64,
}

/// One dense-output sample: both members and their derivatives.
#[derive(Debug, Clone, Copy)]
pub struct PairSample {
    pub chi1: f64,
    pub chi1dot: f64,
    pub chi2: f64,
    pub chi2dot: f64,
}

pub fn integrate_auxiliary_pair(
    g2: &CoefficientFn,
    y0: State,
    tau_max: f64,
    tol: f64,
) -> Result<DenseSolution, OdeError> {
    let rhs = |tau: f64, y: &State| -> Result<(State, f64), OdeError> {
        let g = g2.value(tau);
        if !g.is_finite() {
            return Err(OdeError::NonFiniteCoefficient { tau });
        }
        Ok(([y[1], -2.0 * g * y[0], y[3], -2.0 * g * y[2]], g))
    };

    let atol = tol;
    let rtol = tol;
    let h_max: f64 = 0.02;
    let h_min: f64 = 1e-13 * tau_max.max(1.0);

    let (f0, g0) = rhs(0.0, &y0)?;
    let mut nodes = Vec::with_capacity((tau_max / h_max) as usize + 2);
    nodes.push(Node {
        tau: 0.0,
        y: y0,
        acc: [-2.0 * g0 * y0[0], -2.0 * g0 * y0[2]],
    });

    let mut tau = 0.0;
    let mut y = y0;
    let mut f = f0;
    let mut h = h_max.min(tau_max);

    while tau < tau_max {
        if h < h_min {
            return Err(OdeError::StepSizeUnderflow { tau });
        }
        h = h.min(tau_max - tau).min(h_max);

        let mut k = [[0.0; 4]; STAGES];
        k[0] = f;
        let mut failed = false;
        for s in 1..STAGES {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..4 {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            match rhs(tau + C[s] * h, &ys) {
                Ok((ks, _)) => k[s] = ks,
                Err(OdeError::NonFiniteCoefficient { .. }) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }

        if !failed {
            let mut y5 = y;
            let mut y4 = y;
            for (s, ks) in k.iter().enumerate() {
                for i in 0..4 {
                    y5[i] += h * B5[s] * ks[i];
                    y4[i] += h * B4[s] * ks[i];
                }
            }
            let mut err_sq = 0.0;
            for i in 0..4 {
                let scale = atol + rtol * y[i].abs().max(y5[i].abs());
                let e = (y5[i] - y4[i]) / scale;
                err_sq += e * e;
            }
            let err = (err_sq / 4.0).sqrt();
            if !y5.iter().all(|v| v.is_finite()) {
                // fall through to the step-size retry below
            } else if err <= 1.0 {
                tau += h;
                y = y5;
                let (fnew, gnew) = rhs(tau, &y)?;
                f = fnew;
                nodes.push(Node {
                    tau,
                    y,
                    acc: [-2.0 * gnew * y[0], -2.0 * gnew * y[2]],
                });
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h *= factor;
                continue;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                continue;
            }
        }
        // non-finite stage: retry with a smaller step
        h *= 0.25;
    }

    Ok(DenseSolution { nodes, tau_max })
}

impl DenseSolution {
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn sample(&self, tau: f64) -> Result<PairSample, OdeError> {
        if !(0.0..=self.tau_max).contains(&tau) {
            return Err(OdeError::OutOfDomain {
                tau,
                tau_max: self.tau_max,
            });
        }
        let idx = match self
            .nodes
            .binary_search_by(|n| n.tau.partial_cmp(&tau).expect("finite node times"))
        {
            Ok(i) => {
                let n = &self.nodes[i];
                return Ok(PairSample {
                    chi1: n.y[0],
                    chi1dot: n.y[1],
                    chi2: n.y[2],
                    chi2dot: n.y[3],
                });
            }
            Err(i) => i,
        };
        let lo = &self.nodes[idx - 1];
        let hi = &self.nodes[idx];
        let h = hi.tau - lo.tau;
        let s = (tau - lo.tau) / h;

        let (chi1, chi1dot) = hermite_quintic(
            s,
            h,
            lo.y[0],
            lo.y[1],
            lo.acc[0],
            hi.y[0],
            hi.y[1],
            hi.acc[0],
        );
        let (chi2, chi2dot) = hermite_quintic(
            s,
            h,
            lo.y[2],
            lo.y[3],
            lo.acc[1],
            hi.y[2],
            hi.y[3],
            hi.acc[1],
        );
        Ok(PairSample {
            chi1,
            chi1dot,
            chi2,
            chi2dot,
        })
    }
}

/// Quintic Hermite interpolation on [0, 1] from endpoint values, first and
/// second derivatives (derivatives given per unit of the original variable,
/// step width `h`). Returns the value and first derivative at `s`.
#[allow(clippy::too_many_arguments)]
fn hermite_quintic(
    s: f64,
    h: f64,
    y0: f64,
    d0: f64,
    a0: f64,
    y1: f64,
    d1: f64,
    a1: f64,
) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;

    // basis functions for (value, slope, curvature) at each endpoint
    let h00 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h10 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h20 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h01 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h11 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h21 = 0.5 * s3 - s4 + 0.5 * s5;

    let value = y0 * h00
        + h * d0 * h10
        + h * h * a0 * h20
        + y1 * h01
        + h * d1 * h11
        + h * h * a1 * h21;

    let dh00 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
    let dh10 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
    let dh20 = s - 4.5 * s2 + 6.0 * s3 - 2.5 * s4;
    let dh01 = 30.0 * s2 - 60.0 * s3 + 30.0 * s4;
    let dh11 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
    let dh21 = 1.5 * s2 - 4.0 * s3 + 2.5 * s4;

    let deriv = (y0 * dh00
        + h * d0 * dh10
        + h * h * a0 * dh20
        + y1 * dh01
        + h * d1 * dh11
        + h * h * a1 * dh21)
        / h;

    (value, deriv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_quintic_exactly() {
        // y(x) = x^5 on [2, 2.5]
        let (x0, x1) = (2.0f64, 2.5f64);
        let h = x1 - x0;
        let f = |x: f64| x.powi(5);
        let d = |x: f64| 5.0 * x.powi(4);
        let a = |x: f64| 20.0 * x.powi(3);
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let x = x0 + s * h;
            let (v, dv) = hermite_quintic(s, h, f(x0), d(x0), a(x0), f(x1), d(x1), a(x1));
            assert!((v - f(x)).abs() < 1e-10, "value at {x}");
            assert!((dv - d(x)).abs() < 1e-9, "derivative at {x}");
        }
    }

    #[test]
    fn free_particle_is_exact() {
        let sol = integrate_auxiliary_pair(
            &CoefficientFn::zero(),
            [1.0, 0.0, 0.0, 1.0],
            10.0,
            1e-10,
        )
        .unwrap();
        for i in 0..=100 {
            let tau = i as f64 * 0.1;
            let s = sol.sample(tau).unwrap();
            assert!((s.chi1 - 1.0).abs() < 1e-12);
            assert!((s.chi2 - tau).abs() < 1e-10);
            assert!((s.chi2dot - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oscillator_dense_output_accuracy() {
        let w = 3.0f64;
        let sol = integrate_auxiliary_pair(
            &CoefficientFn::constant(0.5 * w * w),
            [1.0 / w.sqrt(), 0.0, 0.0, w.sqrt()],
            10.0,
            1e-10,
        )
        .unwrap();
        let mut max_err: f64 = 0.0;
        let mut max_derr: f64 = 0.0;
        for i in 0..=2000 {
            let tau = i as f64 * 0.005;
            let s = sol.sample(tau).unwrap();
            max_err = max_err.max((s.chi1 - (w * tau).cos() / w.sqrt()).abs());
            max_err = max_err.max((s.chi2 - (w * tau).sin() / w.sqrt()).abs());
            max_derr = max_derr.max((s.chi1dot + w.sqrt() * (w * tau).sin()).abs());
        }
        assert!(max_err < 1e-8, "value error {max_err}");
        assert!(max_derr < 1e-7, "derivative error {max_derr}");
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let sol =
            integrate_auxiliary_pair(&CoefficientFn::zero(), [1.0, 0.0, 0.0, 1.0], 1.0, 1e-10)
                .unwrap();
        assert!(matches!(sol.sample(1.5), Err(OdeError::OutOfDomain { .. })));
        assert!(matches!(sol.sample(-0.1), Err(OdeError::OutOfDomain { .. })));
    }

    #[test]
    fn singular_coefficient_fails_with_location() {
        // 1/(1-t) blows up at t = 1
        let g2 = crate::expr::parse("1/(1-t)").unwrap();
        let err = integrate_auxiliary_pair(&g2, [1.0, 0.0, 0.0, 1.0], 2.0, 1e-10).unwrap_err();
        match err {
            OdeError::StepSizeUnderflow { tau } | OdeError::NonFiniteCoefficient { tau } => {
                assert!((0.5..1.5).contains(&tau), "failure near the pole, got {tau}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
