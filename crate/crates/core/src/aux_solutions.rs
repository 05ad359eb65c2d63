//! The real solution pair (chi1, chi2) of the auxiliary equation
//! `a'' + 2 g2(tau) a = 0` and the derived complex functions xi and phi.
//!
//! Every basis carries a unit Wronskian, `chi1 chi2' - chi2 chi1' = 1`; the
//! catalog systems come with closed forms, anything else is integrated
//! numerically with dense output.

use num_complex::Complex64;
use thiserror::Error;

use crate::expr::CoefficientFn;
use crate::ode::{self, DenseSolution, OdeError};
use crate::systems::{SystemError, SystemKind, SystemSpec};

pub const WRONSKIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AuxError {
    #[error("initial conditions have Wronskian {wronskian}, expected 1 within {tol}")]
    BadWronskian { wronskian: f64, tol: f64 },
    #[error("tau = {tau} outside basis domain [0, {tau_max}]")]
    OutOfDomain { tau: f64, tau_max: f64 },
    #[error("no closed-form basis for {kind:?} systems")]
    NoClosedForm { kind: SystemKind },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
    #[error("Wronskian drifted to {drift} (limit {limit}) during integration")]
    WronskianDrift { drift: f64, limit: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

/// Initial values (chi1, chi1', chi2, chi2') at tau = 0.
/// Construction enforces a unit Wronskian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisInitialConditions {
    pub chi1_0: f64,
    pub chi1dot_0: f64,
    pub chi2_0: f64,
    pub chi2dot_0: f64,
}

impl BasisInitialConditions {
    pub fn new(
        chi1_0: f64,
        chi1dot_0: f64,
        chi2_0: f64,
        chi2dot_0: f64,
    ) -> Result<Self, AuxError> {
        let w = chi1_0 * chi2dot_0 - chi2_0 * chi1dot_0;
        if (w - 1.0).abs() > WRONSKIAN_TOL {
            return Err(AuxError::BadWronskian {
                wronskian: w,
                tol: WRONSKIAN_TOL,
            });
        }
        Ok(BasisInitialConditions {
            chi1_0,
            chi1dot_0,
            chi2_0,
            chi2dot_0,
        })
    }

    /// The natural normalization (1, 0, 0, 1).
    pub fn natural() -> Self {
        BasisInitialConditions {
            chi1_0: 1.0,
            chi1dot_0: 0.0,
            chi2_0: 0.0,
            chi2dot_0: 1.0,
        }
    }
}

/// The closed-form family of an analytic basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// chi1 = cos(w tau)/sqrt(w), chi2 = sin(w tau)/sqrt(w)
    Trig { omega: f64 },
    /// chi1 = 1, chi2 = tau
    Linear,
    /// chi1 = cosh(W tau)/sqrt(W), chi2 = sinh(W tau)/sqrt(W)
    Hyperbolic { big_omega: f64 },
}

#[derive(Debug, Clone)]
enum BasisSource {
    Closed(ClosedForm),
    Numeric(DenseSolution),
}

/// A solution basis of the auxiliary equation, immutable after construction.
#[derive(Debug, Clone)]
pub struct AuxiliaryBasis {
    source: BasisSource,
    ics: BasisInitialConditions,
    tau_max: f64,
}

/// All auxiliary functions at one instant.
#[derive(Debug, Clone, Copy)]
pub struct BasisSample {
    pub tau: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub chi1dot: f64,
    pub chi2dot: f64,
    pub xi: Complex64,
    pub xidot: Complex64,
    pub phi1: Complex64,
    pub phi2: Complex64,
    pub phi3: f64,
}

impl BasisSample {
    fn from_reals(tau: f64, chi1: f64, chi1dot: f64, chi2: f64, chi2dot: f64) -> Self {
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let xi = Complex64::new(chi1, chi2) * inv_sqrt2;
        let xidot = Complex64::new(chi1dot, chi2dot) * inv_sqrt2;
        BasisSample {
            tau,
            chi1,
            chi2,
            chi1dot,
            chi2dot,
            xi,
            xidot,
            phi1: xi * xi,
            phi2: xi.conj() * xi.conj(),
            phi3: chi1 * chi1 + chi2 * chi2,
        }
    }
}

/// chi1 chi2' - chi2 chi1'; identically 1 for a well-formed basis.
pub fn wronskian(sample: &BasisSample) -> f64 {
    sample.chi1 * sample.chi2dot - sample.chi2 * sample.chi1dot
}

/// Closed-form basis for a catalog system. LP shares the FP basis and DHO
/// the HO basis; the drive never enters the auxiliary equation.
pub fn analytic_basis(system: &SystemSpec) -> Result<AuxiliaryBasis, AuxError> {
    let (source, ics) = match system.kind() {
        SystemKind::Harmonic | SystemKind::Driven => {
            let w = system.omega().expect("catalog invariant");
            (
                BasisSource::Closed(ClosedForm::Trig { omega: w }),
                BasisInitialConditions {
                    chi1_0: 1.0 / w.sqrt(),
                    chi1dot_0: 0.0,
                    chi2_0: 0.0,
                    chi2dot_0: w.sqrt(),
                },
            )
        }
        SystemKind::Free | SystemKind::Linear => (
            BasisSource::Closed(ClosedForm::Linear),
            BasisInitialConditions::natural(),
        ),
        SystemKind::Repulsive => {
            let w = system.big_omega().expect("catalog invariant");
            (
                BasisSource::Closed(ClosedForm::Hyperbolic { big_omega: w }),
                BasisInitialConditions {
                    chi1_0: 1.0 / w.sqrt(),
                    chi1dot_0: 0.0,
                    chi2_0: 0.0,
                    chi2dot_0: w.sqrt(),
                },
            )
        }
        SystemKind::Custom => {
            return Err(AuxError::NoClosedForm {
                kind: SystemKind::Custom,
            })
        }
    };
    Ok(AuxiliaryBasis {
        source,
        ics,
        tau_max: f64::INFINITY,
    })
}

/// Numerical basis for an arbitrary coefficient g2, integrated on
/// `[0, tau_max]` at the given tolerance.
pub fn numeric_basis(
    g2: &CoefficientFn,
    ics: BasisInitialConditions,
    tau_max: f64,
    tol: f64,
) -> Result<AuxiliaryBasis, AuxError> {
    if tol <= 0.0 {
        return Err(AuxError::BadTolerance(tol));
    }
    let y0 = [ics.chi1_0, ics.chi1dot_0, ics.chi2_0, ics.chi2dot_0];
    let sol = ode::integrate_auxiliary_pair(g2, y0, tau_max, tol)?;

    // Wronskian drift monitor over the whole domain.
    let limit = 10.0 * tol;
    let mut drift: f64 = 0.0;
    let checks = 200;
    for i in 0..=checks {
        let tau = tau_max * i as f64 / checks as f64;
        let s = sol.sample(tau)?;
        drift = drift.max((s.chi1 * s.chi2dot - s.chi2 * s.chi1dot - 1.0).abs());
    }
    if drift > limit {
        return Err(AuxError::WronskianDrift { drift, limit });
    }

    Ok(AuxiliaryBasis {
        source: BasisSource::Numeric(sol),
        ics,
        tau_max,
    })
}

impl AuxiliaryBasis {
    pub fn ics(&self) -> BasisInitialConditions {
        self.ics
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.source, BasisSource::Numeric(_))
    }

    /// Some for analytic bases, None for numeric ones.
    pub fn closed_form(&self) -> Option<ClosedForm> {
        match &self.source {
            BasisSource::Closed(c) => Some(*c),
            BasisSource::Numeric(_) => None,
        }
    }

    pub fn evaluate(&self, tau: f64) -> Result<BasisSample, AuxError> {
        if !(tau >= 0.0 && tau <= self.tau_max) {
            return Err(AuxError::OutOfDomain {
                tau,
                tau_max: self.tau_max,
            });
        }
        let (chi1, chi1dot, chi2, chi2dot) = match &self.source {
            BasisSource::Closed(ClosedForm::Trig { omega }) => {
                let w = *omega;
                let (s, c) = (w * tau).sin_cos();
                (c / w.sqrt(), -w.sqrt() * s, s / w.sqrt(), w.sqrt() * c)
            }
            BasisSource::Closed(ClosedForm::Linear) => (1.0, 0.0, tau, 1.0),
            BasisSource::Closed(ClosedForm::Hyperbolic { big_omega }) => {
                let w = *big_omega;
                let (s, c) = ((w * tau).sinh(), (w * tau).cosh());
                (c / w.sqrt(), w.sqrt() * s, s / w.sqrt(), w.sqrt() * c)
            }
            BasisSource::Numeric(sol) => {
                let s = sol.sample(tau)?;
                (s.chi1, s.chi1dot, s.chi2, s.chi2dot)
            }
        };
        Ok(BasisSample::from_reals(tau, chi1, chi1dot, chi2, chi2dot))
    }
}
