//! Catalog of quadratic-potential systems and their published closed forms.
//!
//! A system is a coefficient triple `(g2, g1, g0)` for the potential
//! `V(x, tau) = g2(tau) x^2 + g1(tau) x + g0(tau)`. The catalog covers the
//! harmonic oscillator (HO), free particle (FP), linear potential (LP),
//! driven harmonic oscillator (DHO) and repulsive oscillator (RO); anything
//! else is a custom system built from arbitrary coefficient functions.

use thiserror::Error;

use crate::expr::CoefficientFn;
use crate::phase_space::InitialPhasePoint;

#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error("{kind:?} requires a positive frequency, got {value}")]
    NonPositiveFrequency { kind: SystemKind, value: f64 },
    #[error("{kind:?} is missing required parameter `{name}`")]
    MissingParameter { kind: SystemKind, name: &'static str },
    #[error("{kind:?} does not accept parameter `{name}`")]
    ExtraneousParameter { kind: SystemKind, name: &'static str },
    #[error("operation not supported for {kind:?} systems")]
    Unsupported { kind: SystemKind },
    #[error("reference formulas for {kind:?} require a constant drive")]
    NonConstantDrive { kind: SystemKind },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Harmonic,
    Free,
    Linear,
    Driven,
    Repulsive,
    Custom,
}

/// Parameter bag for [`make_system`]. Fields irrelevant to the chosen kind
/// must stay `None`; they are rejected rather than ignored.
#[derive(Default)]
pub struct SystemParams {
    pub omega: Option<f64>,
    pub big_omega: Option<f64>,
    pub kappa: Option<f64>,
    pub g2: Option<CoefficientFn>,
    pub g1: Option<CoefficientFn>,
    pub g0: Option<CoefficientFn>,
}

/// A fully specified system: kind, parameters and coefficient functions.
#[derive(Debug, Clone)]
pub struct SystemSpec {
    kind: SystemKind,
    omega: Option<f64>,
    big_omega: Option<f64>,
    kappa: Option<f64>,
    g2: CoefficientFn,
    g1: CoefficientFn,
    g0: CoefficientFn,
    g0_const: f64,
}

pub fn make_system(kind: SystemKind, params: SystemParams) -> Result<SystemSpec, SystemError> {
    let SystemParams {
        omega,
        big_omega,
        kappa,
        g2,
        g1,
        g0,
    } = params;

    let reject = |name: &'static str| SystemError::ExtraneousParameter { kind, name };
    let missing = |name: &'static str| SystemError::MissingParameter { kind, name };

    match kind {
        SystemKind::Harmonic | SystemKind::Driven => {
            if big_omega.is_some() {
                return Err(reject("Omega"));
            }
            if g2.is_some() || g1.is_some() || g0.is_some() {
                return Err(reject("g2/g1/g0"));
            }
            let w = omega.ok_or_else(|| missing("omega"))?;
            if w <= 0.0 {
                return Err(SystemError::NonPositiveFrequency { kind, value: w });
            }
            let k = match kind {
                SystemKind::Driven => Some(kappa.ok_or_else(|| missing("kappa"))?),
                _ => {
                    if kappa.is_some() {
                        return Err(reject("kappa"));
                    }
                    None
                }
            };
            let drive = k.map(|k| k / 2.0).unwrap_or(0.0);
            Ok(SystemSpec {
                kind,
                omega: Some(w),
                big_omega: None,
                kappa: k,
                g2: CoefficientFn::constant(0.5 * w * w),
                g1: CoefficientFn::constant(drive),
                g0: CoefficientFn::zero(),
                g0_const: drive,
            })
        }
        SystemKind::Free | SystemKind::Linear => {
            if omega.is_some() || big_omega.is_some() {
                return Err(reject("omega/Omega"));
            }
            if g2.is_some() || g1.is_some() || g0.is_some() {
                return Err(reject("g2/g1/g0"));
            }
            let k = match kind {
                SystemKind::Linear => Some(kappa.ok_or_else(|| missing("kappa"))?),
                _ => {
                    if kappa.is_some() {
                        return Err(reject("kappa"));
                    }
                    None
                }
            };
            let drive = k.map(|k| k / 2.0).unwrap_or(0.0);
            Ok(SystemSpec {
                kind,
                omega: None,
                big_omega: None,
                kappa: k,
                g2: CoefficientFn::zero(),
                g1: CoefficientFn::constant(drive),
                g0: CoefficientFn::zero(),
                g0_const: drive,
            })
        }
        SystemKind::Repulsive => {
            if omega.is_some() || kappa.is_some() {
                return Err(reject("omega/kappa"));
            }
            if g2.is_some() || g1.is_some() || g0.is_some() {
                return Err(reject("g2/g1/g0"));
            }
            let w = big_omega.ok_or_else(|| missing("Omega"))?;
            if w <= 0.0 {
                return Err(SystemError::NonPositiveFrequency { kind, value: w });
            }
            Ok(SystemSpec {
                kind,
                omega: None,
                big_omega: Some(w),
                kappa: None,
                g2: CoefficientFn::constant(-0.5 * w * w),
                g1: CoefficientFn::zero(),
                g0: CoefficientFn::zero(),
                g0_const: 0.0,
            })
        }
        SystemKind::Custom => {
            if omega.is_some() || big_omega.is_some() || kappa.is_some() {
                return Err(reject("omega/Omega/kappa"));
            }
            let g2 = g2.ok_or_else(|| missing("g2"))?;
            let g1 = g1.unwrap_or_else(CoefficientFn::zero);
            let g0 = g0.unwrap_or_else(CoefficientFn::zero);
            let g0_const = g1.value(0.0);
            Ok(SystemSpec {
                kind,
                omega: None,
                big_omega: None,
                kappa: None,
                g2,
                g1,
                g0,
                g0_const,
            })
        }
    }
}

impl SystemSpec {
    pub fn harmonic(omega: f64) -> Result<Self, SystemError> {
        make_system(
            SystemKind::Harmonic,
            SystemParams {
                omega: Some(omega),
                ..Default::default()
            },
        )
    }

    pub fn free_particle() -> Self {
        make_system(SystemKind::Free, SystemParams::default()).expect("no parameters")
    }

    pub fn linear(kappa: f64) -> Self {
        make_system(
            SystemKind::Linear,
            SystemParams {
                kappa: Some(kappa),
                ..Default::default()
            },
        )
        .expect("kappa provided")
    }

    pub fn driven(omega: f64, kappa: f64) -> Result<Self, SystemError> {
        make_system(
            SystemKind::Driven,
            SystemParams {
                omega: Some(omega),
                kappa: Some(kappa),
                ..Default::default()
            },
        )
    }

    pub fn repulsive(big_omega: f64) -> Result<Self, SystemError> {
        make_system(
            SystemKind::Repulsive,
            SystemParams {
                big_omega: Some(big_omega),
                ..Default::default()
            },
        )
    }

    pub fn custom(g2: CoefficientFn, g1: CoefficientFn, g0: CoefficientFn) -> Self {
        make_system(
            SystemKind::Custom,
            SystemParams {
                g2: Some(g2),
                g1: Some(g1),
                g0: Some(g0),
                ..Default::default()
            },
        )
        .expect("coefficients provided")
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    pub fn big_omega(&self) -> Option<f64> {
        self.big_omega
    }

    pub fn kappa(&self) -> Option<f64> {
        self.kappa
    }

    pub fn g2(&self) -> &CoefficientFn {
        &self.g2
    }

    pub fn g1(&self) -> &CoefficientFn {
        &self.g1
    }

    pub fn g0(&self) -> &CoefficientFn {
        &self.g0
    }

    /// g1(0), the drive strength at tau = 0.
    pub fn drive_at_zero(&self) -> f64 {
        self.g0_const
    }

    /// Direct evaluation of the published closed-form expectation values for
    /// position and momentum. Regression target for the generic machinery;
    /// LP and DHO are restricted to the constant drive `kappa/2`.
    pub fn reference_expectations(
        &self,
        point: InitialPhasePoint,
        tau: f64,
    ) -> Result<(f64, f64), SystemError> {
        let (x0, p0) = (point.x0, point.p0);
        match self.kind {
            SystemKind::Harmonic => {
                let w = self.omega.expect("catalog invariant");
                let (s, c) = (w * tau).sin_cos();
                Ok(((p0 * s + w * x0 * c) / w, p0 * c - w * x0 * s))
            }
            SystemKind::Free => Ok((x0 + p0 * tau, p0)),
            SystemKind::Linear => {
                let kappa = self.kappa.ok_or(SystemError::NonConstantDrive {
                    kind: self.kind,
                })?;
                Ok((
                    x0 + p0 * tau - 0.25 * kappa * tau * tau,
                    p0 - 0.5 * kappa * tau,
                ))
            }
            SystemKind::Driven => {
                let w = self.omega.expect("catalog invariant");
                let kappa = self.kappa.ok_or(SystemError::NonConstantDrive {
                    kind: self.kind,
                })?;
                let (s, c) = (w * tau).sin_cos();
                let x = (p0 * s + w * x0 * c) / w + kappa / (2.0 * w * w) * (c - 1.0);
                let p = p0 * c - w * x0 * s - kappa / (2.0 * w) * s;
                Ok((x, p))
            }
            SystemKind::Repulsive => {
                let w = self.big_omega.expect("catalog invariant");
                let (s, c) = ((w * tau).sinh(), (w * tau).cosh());
                Ok(((p0 * s + w * x0 * c) / w, p0 * c + w * x0 * s))
            }
            SystemKind::Custom => Err(SystemError::Unsupported { kind: self.kind }),
        }
    }
}
