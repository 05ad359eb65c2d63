//! Driving integrals c1, c2 (quadratures of g1 against the basis) and the
//! per-system integration constants C1_0, C2_0.
//!
//! The defining relation is `c_nu(tau) = integral_0^tau chi_nu(rho) g1(rho) d rho`;
//! with the full functions `C_nu(tau) = c_nu(tau) + C_nu_0`. Constant drives
//! over catalog bases use closed forms, everything else goes through
//! adaptive Simpson quadrature on the dense basis output.

use std::sync::Arc;

use thiserror::Error;

use crate::aux_solutions::{AuxError, AuxiliaryBasis, ClosedForm};
use crate::expr::CoefficientFn;
use crate::systems::{SystemKind, SystemSpec};

#[derive(Debug, Error)]
pub enum DrivingError {
    #[error("quadrature failed to converge on [{a}, {b}]")]
    QuadratureNonConvergence { a: f64, b: f64 },
    #[error(transparent)]
    Basis(#[from] AuxError),
    #[error("integration constants are not defined for custom systems; supply them explicitly")]
    ConstantsNotDefined,
}

#[derive(Clone)]
enum Kind {
    Zero,
    /// Constant drive g over a trig basis with frequency w:
    /// c1 = g sin(w tau)/w^(3/2), c2 = g (1 - cos(w tau))/w^(3/2)
    ConstTrig { g: f64, omega: f64 },
    /// Constant drive g over the linear basis: c1 = g tau, c2 = g tau^2 / 2
    ConstLinear { g: f64 },
    /// Constant drive g over a hyperbolic basis with rate W
    ConstHyperbolic { g: f64, big_omega: f64 },
    Quadrature {
        basis: Arc<AuxiliaryBasis>,
        g1: CoefficientFn,
        tol: f64,
    },
}

/// The pair (c1, c2) plus integration constants. Immutable; evaluation is
/// pure and safe for concurrent use.
#[derive(Clone)]
pub struct DrivingIntegrals {
    kind: Kind,
    c1_0: f64,
    c2_0: f64,
}

impl std::fmt::Debug for DrivingIntegrals {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DrivingIntegrals")
            .field("c1_0", &self.c1_0)
            .field("c2_0", &self.c2_0)
            .finish()
    }
}

/// The integration constants (C1_0, C2_0) fixed by the tau -> 0 operator
/// limit: (0, 0) for HO/FP/RO, (0, g0) for LP, (0, -g0/omega^(3/2)) for DHO.
/// Custom systems have no prescription and are refused.
pub fn integration_constants(system: &SystemSpec) -> Result<(f64, f64), DrivingError> {
    let g0 = system.drive_at_zero();
    match system.kind() {
        SystemKind::Harmonic | SystemKind::Free | SystemKind::Repulsive => Ok((0.0, 0.0)),
        SystemKind::Linear => Ok((0.0, g0)),
        SystemKind::Driven => {
            let w = system.omega().expect("catalog invariant");
            Ok((0.0, -g0 / w.powf(1.5)))
        }
        SystemKind::Custom => Err(DrivingError::ConstantsNotDefined),
    }
}

/// Build the driving integrals for a system over its basis. Constants come
/// from [`integration_constants`]; use [`DrivingIntegrals::with_constants`]
/// for custom systems.
pub fn driving_integrals(
    basis: Arc<AuxiliaryBasis>,
    g1: &CoefficientFn,
    system: &SystemSpec,
    tol: f64,
) -> Result<DrivingIntegrals, DrivingError> {
    let (c1_0, c2_0) = integration_constants(system)?;
    Ok(build(basis, g1, tol, c1_0, c2_0))
}

fn build(
    basis: Arc<AuxiliaryBasis>,
    g1: &CoefficientFn,
    tol: f64,
    c1_0: f64,
    c2_0: f64,
) -> DrivingIntegrals {
    let kind = match (g1.constant_value(), basis.closed_form()) {
        (Some(g), _) if g == 0.0 => Kind::Zero,
        (Some(g), Some(ClosedForm::Trig { omega })) => Kind::ConstTrig { g, omega },
        (Some(g), Some(ClosedForm::Linear)) => Kind::ConstLinear { g },
        (Some(g), Some(ClosedForm::Hyperbolic { big_omega })) => {
            Kind::ConstHyperbolic { g, big_omega }
        }
        _ => Kind::Quadrature {
            basis,
            g1: g1.clone(),
            tol,
        },
    };
    DrivingIntegrals { kind, c1_0, c2_0 }
}

impl DrivingIntegrals {
    /// Driving integrals with explicitly supplied integration constants
    /// (the configuration escape hatch for custom systems).
    pub fn with_constants(
        basis: Arc<AuxiliaryBasis>,
        g1: &CoefficientFn,
        tol: f64,
        c1_0: f64,
        c2_0: f64,
    ) -> Self {
        build(basis, g1, tol, c1_0, c2_0)
    }

    /// No drive at all: c1 = c2 = 0 with zero constants.
    pub fn none() -> Self {
        DrivingIntegrals {
            kind: Kind::Zero,
            c1_0: 0.0,
            c2_0: 0.0,
        }
    }

    pub fn constants(&self) -> (f64, f64) {
        (self.c1_0, self.c2_0)
    }

    pub fn c1(&self, tau: f64) -> Result<f64, DrivingError> {
        self.c_nu(tau, 1)
    }

    pub fn c2(&self, tau: f64) -> Result<f64, DrivingError> {
        self.c_nu(tau, 2)
    }

    /// C1(tau) = c1(tau) + C1_0
    pub fn big_c1(&self, tau: f64) -> Result<f64, DrivingError> {
        Ok(self.c1(tau)? + self.c1_0)
    }

    /// C2(tau) = c2(tau) + C2_0
    pub fn big_c2(&self, tau: f64) -> Result<f64, DrivingError> {
        Ok(self.c2(tau)? + self.c2_0)
    }

    fn c_nu(&self, tau: f64, nu: u8) -> Result<f64, DrivingError> {
        match &self.kind {
            Kind::Zero => Ok(0.0),
            Kind::ConstTrig { g, omega } => {
                let w = *omega;
                let scale = g / w.powf(1.5);
                Ok(match nu {
                    1 => scale * (w * tau).sin(),
                    _ => scale * (1.0 - (w * tau).cos()),
                })
            }
            Kind::ConstLinear { g } => Ok(match nu {
                1 => g * tau,
                _ => g * tau * tau / 2.0,
            }),
            Kind::ConstHyperbolic { g, big_omega } => {
                let w = *big_omega;
                let scale = g / w.powf(1.5);
                Ok(match nu {
                    1 => scale * (w * tau).sinh(),
                    _ => scale * ((w * tau).cosh() - 1.0),
                })
            }
            Kind::Quadrature { basis, g1, tol } => {
                let f = |rho: f64| -> Result<f64, DrivingError> {
                    let s = basis.evaluate(rho)?;
                    let chi = if nu == 1 { s.chi1 } else { s.chi2 };
                    Ok(chi * g1.value(rho))
                };
                adaptive_simpson(&f, 0.0, tau, *tol)
            }
        }
    }
}

/// Adaptive Simpson quadrature with absolute tolerance. Reports the failing
/// subinterval when the recursion depth is exhausted.
fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64, DrivingError>
where
    F: Fn(f64) -> Result<f64, DrivingError>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = simpson(a, b, fa, fm, fb);
    simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 50)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, DrivingError>
where
    F: Fn(f64) -> Result<f64, DrivingError>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(DrivingError::QuadratureNonConvergence { a, b });
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(DrivingError::QuadratureNonConvergence { a, b });
    }
    let half_tol = tol / 2.0;
    Ok(simpson_recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?
        + simpson_recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aux_solutions::analytic_basis;
    use crate::systems::SystemSpec;

    fn setup(system: &SystemSpec) -> (Arc<AuxiliaryBasis>, DrivingIntegrals) {
        let basis = Arc::new(analytic_basis(system).unwrap());
        let d = driving_integrals(basis.clone(), system.g1(), system, 1e-11).unwrap();
        (basis, d)
    }

    #[test]
    fn lp_constant_drive() {
        let system = SystemSpec::linear(2.0);
        let (_, d) = setup(&system);
        for tau in [0.5, 1.0, 3.0] {
            assert!((d.c1(tau).unwrap() - tau).abs() < 1e-12);
            assert!((d.c2(tau).unwrap() - tau * tau / 2.0).abs() < 1e-12);
        }
        assert_eq!(d.c1(0.0).unwrap(), 0.0);
        assert_eq!(d.c2(0.0).unwrap(), 0.0);
    }

    #[test]
    fn undriven_systems_are_zero() {
        for system in [
            SystemSpec::harmonic(1.3).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::repulsive(0.8).unwrap(),
        ] {
            let (_, d) = setup(&system);
            assert_eq!(d.c1(4.0).unwrap(), 0.0);
            assert_eq!(d.c2(4.0).unwrap(), 0.0);
            assert_eq!(d.constants(), (0.0, 0.0));
        }
    }

    #[test]
    fn dho_constant_drive() {
        // c1 = sin(tau), c2 = 1 - cos(tau) for omega = 1, kappa = 2; the
        // sign of c2 follows the defining integral of chi2 g1 (the printed
        // closed form carries a stray minus sign inconsistent with it).
        let system = SystemSpec::driven(1.0, 2.0).unwrap();
        let (_, d) = setup(&system);
        for tau in [0.3, 1.0, 2.5] {
            assert!((d.c1(tau).unwrap() - tau.sin()).abs() < 1e-12);
            assert!((d.c2(tau).unwrap() - (1.0 - tau.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn constants_lp() {
        let (c1, c2) = integration_constants(&SystemSpec::linear(3.0)).unwrap();
        assert_eq!((c1, c2), (0.0, 1.5));
    }

    #[test]
    fn constants_dho() {
        let (c1, c2) = integration_constants(&SystemSpec::driven(1.0, 2.0).unwrap()).unwrap();
        assert_eq!((c1, c2), (0.0, -1.0));
    }

    #[test]
    fn constants_ho_zero() {
        let (c1, c2) = integration_constants(&SystemSpec::harmonic(1.0).unwrap()).unwrap();
        assert_eq!((c1, c2), (0.0, 0.0));
    }

    #[test]
    fn constants_custom_refused() {
        let system = SystemSpec::custom(
            CoefficientFn::constant(0.5),
            CoefficientFn::constant(1.0),
            CoefficientFn::zero(),
        );
        assert!(matches!(
            integration_constants(&system),
            Err(DrivingError::ConstantsNotDefined)
        ));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        // Force the quadrature path with a closure coefficient.
        let system = SystemSpec::driven(1.4, 2.6).unwrap();
        let basis = Arc::new(analytic_basis(&system).unwrap());
        let g = system.g1().constant_value().unwrap();
        let g1 = CoefficientFn::from_fn(move |_| g);
        let quad = DrivingIntegrals::with_constants(basis.clone(), &g1, 1e-12, 0.0, 0.0);
        let closed = driving_integrals(basis, system.g1(), &system, 1e-12).unwrap();
        for i in 1..=20 {
            let tau = i as f64 * 0.5;
            assert!((quad.c1(tau).unwrap() - closed.c1(tau).unwrap()).abs() < 1e-9);
            assert!((quad.c2(tau).unwrap() - closed.c2(tau).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn linearity_in_the_drive() {
        let system = SystemSpec::free_particle();
        let basis = Arc::new(analytic_basis(&system).unwrap());
        let f1 = crate::expr::parse("cos(t)*exp(-t/4)").unwrap();
        let f2 = crate::expr::parse("2*cos(t)*exp(-t/4)").unwrap();
        let d1 = DrivingIntegrals::with_constants(basis.clone(), &f1, 1e-12, 0.0, 0.0);
        let d2 = DrivingIntegrals::with_constants(basis, &f2, 1e-12, 0.0, 0.0);
        for tau in [0.7, 2.2, 5.9] {
            assert!((2.0 * d1.c1(tau).unwrap() - d2.c1(tau).unwrap()).abs() < 1e-10);
            assert!((2.0 * d1.c2(tau).unwrap() - d2.c2(tau).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn quadrature_nonconvergence_reports_interval() {
        let system = SystemSpec::free_particle();
        let basis = Arc::new(analytic_basis(&system).unwrap());
        // 1/(t - 2) has a pole inside [0, 4]
        let g1 = crate::expr::parse("1/(t-2)").unwrap();
        let d = DrivingIntegrals::with_constants(basis, &g1, 1e-10, 0.0, 0.0);
        match d.c1(4.0) {
            Err(DrivingError::QuadratureNonConvergence { a, b }) => {
                assert!(a < 2.0 && b > 2.0 || (a - 2.0).abs() < 1.0 || (b - 2.0).abs() < 1.0);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
