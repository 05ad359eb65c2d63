//! Expectation values of position and momentum in the three representations,
//! parameter conversions, covariance propagation and uncertainty products.
//!
//! Conventions (natural units, hbar = m = 1):
//! * the squeezed complex width function is `xi_r = xi cosh r - conj(xi) e^{i theta} sinh r`;
//!   this reproduces the FP-section uncertainty formulas verbatim, and the
//!   HO-section ones under `theta -> theta + pi`.
//! * phases are extracted with the two-argument arctangent and reduced to
//!   (-pi, pi].
//! * the transfer matrix uses the classically derived signs (variation of
//!   parameters with unit Wronskian); the printed general expressions for
//!   `<x>`, `<p>` carry two sign typos that contradict every per-system
//!   closed form.

use num_complex::Complex64;
use thiserror::Error;

use crate::aux_solutions::{AuxError, AuxiliaryBasis, BasisSample};
use crate::driving::{DrivingError, DrivingIntegrals};
use crate::systems::{SystemError, SystemKind, SystemSpec};

#[derive(Debug, Error)]
pub enum PhaseSpaceError {
    #[error(transparent)]
    Basis(#[from] AuxError),
    #[error(transparent)]
    Driving(#[from] DrivingError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error("expected parameters in the {expected:?} representation, got {got:?}")]
    WrongRepresentation {
        expected: Representation,
        got: Representation,
    },
    #[error("squeeze magnitude must be non-negative, got {0}")]
    NegativeSqueeze(f64),
    #[error("non-finite phase-space value")]
    NonFinite,
}

/// Initial position and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialPhasePoint {
    pub x0: f64,
    pub p0: f64,
}

impl InitialPhasePoint {
    pub fn new(x0: f64, p0: f64) -> Self {
        InitialPhasePoint { x0, p0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// Displacement applied after squeeze; expectation values depend only on alpha.
    AlphaZ,
    /// Squeeze applied after displacement; expectation values mix alpha and z.
    ZAlpha,
}

/// Coherent and squeeze parameters: alpha = |alpha| e^{i delta}, z = r e^{i theta}.
#[derive(Debug, Clone, Copy)]
pub struct SqueezeParameters {
    pub alpha_abs: f64,
    pub delta: f64,
    pub r: f64,
    pub theta: f64,
    pub rep: Representation,
    /// Set when |alpha| = 0 and delta = 0 was chosen by convention.
    pub degenerate: bool,
}

impl SqueezeParameters {
    pub fn new(
        alpha_abs: f64,
        delta: f64,
        r: f64,
        theta: f64,
        rep: Representation,
    ) -> Result<Self, PhaseSpaceError> {
        if alpha_abs < 0.0 {
            return Err(PhaseSpaceError::NegativeSqueeze(alpha_abs));
        }
        if r < 0.0 {
            return Err(PhaseSpaceError::NegativeSqueeze(r));
        }
        Ok(SqueezeParameters {
            alpha_abs,
            delta: wrap_phase(delta),
            r,
            theta: wrap_phase(theta),
            rep,
            degenerate: alpha_abs == 0.0,
        })
    }

    /// The width scale factor s = e^r.
    pub fn s(&self) -> f64 {
        self.r.exp()
    }
}

/// Reduce a phase to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::PI;
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Unit-determinant linear map from (x0, p0) to (<x>, <p>).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symplectic2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

impl Symplectic2 {
    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn apply(&self, x: f64, p: f64) -> (f64, f64) {
        (self.m11 * x + self.m12 * p, self.m21 * x + self.m22 * p)
    }
}

/// Second moments of a Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance {
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

impl Covariance {
    /// var_x var_p - cov^2; exactly 1/4 for the pure Gaussian states here.
    pub fn purity_invariant(&self) -> f64 {
        self.var_x * self.var_p - self.cov_xp * self.cov_xp
    }
}

/// The classical transfer matrix assembled from basis values:
/// m11 = chi1 chi2dot0 - chi2 chi1dot0, etc.
pub fn transfer_matrix(basis: &AuxiliaryBasis, tau: f64) -> Result<Symplectic2, PhaseSpaceError> {
    let s = basis.evaluate(tau)?;
    let ics = basis.ics();
    Ok(Symplectic2 {
        m11: s.chi1 * ics.chi2dot_0 - s.chi2 * ics.chi1dot_0,
        m12: s.chi2 * ics.chi1_0 - s.chi1 * ics.chi2_0,
        m21: s.chi1dot * ics.chi2dot_0 - s.chi2dot * ics.chi1dot_0,
        m22: s.chi2dot * ics.chi1_0 - s.chi1dot * ics.chi2_0,
    })
}

fn drive_displacement(
    s: &BasisSample,
    driving: &DrivingIntegrals,
) -> Result<(f64, f64), PhaseSpaceError> {
    let c1 = driving.c1(s.tau)?;
    let c2 = driving.c2(s.tau)?;
    Ok((
        s.chi1 * c2 - s.chi2 * c1,
        s.chi1dot * c2 - s.chi2dot * c1,
    ))
}

/// `(<x>, <p>) = M(tau) (x0, p0) + (chi1 c2 - chi2 c1, chi1dot c2 - chi2dot c1)`.
pub fn expect_xp_from_initial(
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    point: InitialPhasePoint,
    tau: f64,
) -> Result<(f64, f64), PhaseSpaceError> {
    let s = basis.evaluate(tau)?;
    let m = transfer_matrix(basis, tau)?;
    let (dx, dp) = drive_displacement(&s, driving)?;
    let (x, p) = m.apply(point.x0, point.p0);
    Ok((x + dx, p + dp))
}

/// The right-hand sides of the parameter equations:
/// sqrt(2)|alpha| cos(delta) and sqrt(2)|alpha| sin(delta) in the
/// (alpha, z)-representation.
fn alpha_components(
    point: InitialPhasePoint,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
) -> (f64, f64) {
    let ics = basis.ics();
    let (c1_0, c2_0) = driving.constants();
    let u = ics.chi2dot_0 * point.x0 - ics.chi2_0 * point.p0 - c2_0;
    let v = ics.chi1_0 * point.p0 - ics.chi1dot_0 * point.x0 + c1_0;
    (u, v)
}

/// Convert an initial phase point to (alpha, z)-representation parameters.
/// r and theta are free inputs (the squeeze does not affect alpha here).
pub fn params_alpha_z(
    point: InitialPhasePoint,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    r: f64,
    theta: f64,
) -> Result<SqueezeParameters, PhaseSpaceError> {
    let (u, v) = alpha_components(point, basis, driving);
    let alpha_abs = (0.5 * (u * u + v * v)).sqrt();
    let delta = if alpha_abs == 0.0 {
        0.0
    } else {
        v.atan2(u)
    };
    SqueezeParameters::new(alpha_abs, delta, r, theta, Representation::AlphaZ)
}

/// Solve the (z, alpha)-representation equations for (|alpha|, delta) given
/// z = (r, theta). The 2x2 system is unimodular, so a solution always exists.
pub fn solve_alpha_given_z(
    point: InitialPhasePoint,
    r: f64,
    theta: f64,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
) -> Result<SqueezeParameters, PhaseSpaceError> {
    if r < 0.0 {
        return Err(PhaseSpaceError::NegativeSqueeze(r));
    }
    let (u, v) = alpha_components(point, basis, driving);
    let rhs1 = u * std::f64::consts::FRAC_1_SQRT_2;
    let rhs2 = v * std::f64::consts::FRAC_1_SQRT_2;
    let (ch, sh) = (r.cosh(), r.sinh());
    let (st, ct) = theta.sin_cos();
    // inverse of [[ch - ct sh, -st sh], [-st sh, ch + ct sh]] (det = 1)
    let a_cos = (ch + ct * sh) * rhs1 + st * sh * rhs2;
    let a_sin = st * sh * rhs1 + (ch - ct * sh) * rhs2;
    let alpha_abs = a_cos.hypot(a_sin);
    let delta = if alpha_abs == 0.0 {
        0.0
    } else {
        a_sin.atan2(a_cos)
    };
    SqueezeParameters::new(alpha_abs, delta, r, theta, Representation::ZAlpha)
}

/// `<x> = sqrt(2)|alpha| (chi1 cos d + chi2 sin d) + chi1 C2 - chi2 C1`, and
/// likewise for `<p>` with derivatives. Note the full C functions, constants
/// included.
pub fn expect_xp_alpha_z(
    params: &SqueezeParameters,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    tau: f64,
) -> Result<(f64, f64), PhaseSpaceError> {
    if params.rep != Representation::AlphaZ {
        return Err(PhaseSpaceError::WrongRepresentation {
            expected: Representation::AlphaZ,
            got: params.rep,
        });
    }
    let (cd, sd) = (params.delta.cos(), params.delta.sin());
    let amp = std::f64::consts::SQRT_2 * params.alpha_abs;
    expect_from_components(amp * cd, amp * sd, basis, driving, tau)
}

/// The (z, alpha)-representation expectation values; the hyperbolic mixing
/// of (|alpha|, delta, r, theta) collapses to the same classical trajectory.
pub fn expect_xp_z_alpha(
    params: &SqueezeParameters,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    tau: f64,
) -> Result<(f64, f64), PhaseSpaceError> {
    if params.rep != Representation::ZAlpha {
        return Err(PhaseSpaceError::WrongRepresentation {
            expected: Representation::ZAlpha,
            got: params.rep,
        });
    }
    let (ch, sh) = (params.r.cosh(), params.r.sinh());
    let (cd, sd) = (params.delta.cos(), params.delta.sin());
    let tmd = params.theta - params.delta;
    let amp = std::f64::consts::SQRT_2 * params.alpha_abs;
    let cx = amp * (cd * ch - tmd.cos() * sh);
    let cp = amp * (sd * ch - tmd.sin() * sh);
    expect_from_components(cx, cp, basis, driving, tau)
}

fn expect_from_components(
    u: f64,
    v: f64,
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    tau: f64,
) -> Result<(f64, f64), PhaseSpaceError> {
    let s = basis.evaluate(tau)?;
    let big_c1 = driving.big_c1(tau)?;
    let big_c2 = driving.big_c2(tau)?;
    Ok((
        s.chi1 * u + s.chi2 * v + s.chi1 * big_c2 - s.chi2 * big_c1,
        s.chi1dot * u + s.chi2dot * v + s.chi1dot * big_c2 - s.chi2dot * big_c1,
    ))
}

fn xi_squeezed(s: &BasisSample, r: f64, theta: f64) -> (Complex64, Complex64) {
    let phase = Complex64::from_polar(1.0, theta);
    let (ch, sh) = (r.cosh(), r.sinh());
    let xi_r = s.xi * ch - s.xi.conj() * phase * sh;
    let xidot_r = s.xidot * ch - s.xidot.conj() * phase * sh;
    (xi_r, xidot_r)
}

/// Second moments of the squeezed state with z = r e^{i theta}:
/// `var_x = |xi_r|^2`, `var_p = |xi_r'|^2`, `cov = Re(xi_r conj(xi_r'))`.
/// Independent of alpha by construction.
pub fn covariance(
    basis: &AuxiliaryBasis,
    r: f64,
    theta: f64,
    tau: f64,
) -> Result<Covariance, PhaseSpaceError> {
    if r < 0.0 {
        return Err(PhaseSpaceError::NegativeSqueeze(r));
    }
    let s = basis.evaluate(tau)?;
    let (xi_r, xidot_r) = xi_squeezed(&s, r, theta);
    Ok(Covariance {
        var_x: xi_r.norm_sqr(),
        var_p: xidot_r.norm_sqr(),
        cov_xp: (xi_r * xidot_r.conj()).re,
    })
}

/// The same second moments through the other algebraic route,
/// `Sigma(tau) = M Sigma(0) M^T`; must agree with [`covariance`].
pub fn covariance_via_transfer(
    basis: &AuxiliaryBasis,
    r: f64,
    theta: f64,
    tau: f64,
) -> Result<Covariance, PhaseSpaceError> {
    let sigma0 = covariance(basis, r, theta, 0.0)?;
    let m = transfer_matrix(basis, tau)?;
    let Symplectic2 { m11, m12, m21, m22 } = m;
    let Covariance {
        var_x: a,
        var_p: b,
        cov_xp: c,
    } = sigma0;
    Ok(Covariance {
        var_x: m11 * m11 * a + 2.0 * m11 * m12 * c + m12 * m12 * b,
        var_p: m21 * m21 * a + 2.0 * m21 * m22 * c + m22 * m22 * b,
        cov_xp: m11 * m21 * a + (m11 * m22 + m12 * m21) * c + m12 * m22 * b,
    })
}

/// (Delta x)^2 (Delta p)^2; bounded below by 1/4.
pub fn uncertainty_product(cov: &Covariance) -> f64 {
    cov.var_x * cov.var_p
}

/// The per-system published uncertainty-product formulas, with the
/// documented corrections applied (see the sibling `printed_*` functions for
/// the uncorrected forms):
/// * HO/DHO: `(1/4)[1 + sin^2(2 w tau - theta) sinh^2 2r]` (valid as printed);
/// * FP/LP: the product of the printed variances, which requires a 1/4
///   factor on the final bracket missing in print;
/// * RO: the printed product misstates the sinh 4r cross term and the sign
///   of the cos 2theta term; the corrected form below follows from the
///   covariance algebra and is confirmed by the grid propagator.
pub fn paper_reference_uncertainty(
    system: &SystemSpec,
    r: f64,
    theta: f64,
    tau: f64,
) -> Result<f64, PhaseSpaceError> {
    match system.kind() {
        SystemKind::Harmonic | SystemKind::Driven => {
            let w = system.omega().expect("catalog invariant");
            Ok(reference_product_trig(w, r, theta, tau))
        }
        SystemKind::Free | SystemKind::Linear => Ok(reference_product_linear(r, theta, tau)),
        SystemKind::Repulsive => {
            let w = system.big_omega().expect("catalog invariant");
            Ok(reference_product_hyperbolic(w, r, theta, tau))
        }
        SystemKind::Custom => Err(PhaseSpaceError::System(SystemError::Unsupported {
            kind: SystemKind::Custom,
        })),
    }
}

/// Magnitude of the largest additive term in the corresponding reference
/// formula. The FP/LP and RO products are differences of terms that dwarf
/// the result at large `r` and `tau`, so a fair floating-point comparison
/// must be scaled by this conditioning factor rather than by the result.
pub fn paper_reference_uncertainty_scale(
    system: &SystemSpec,
    r: f64,
    theta: f64,
    tau: f64,
) -> Result<f64, PhaseSpaceError> {
    let sh4 = (4.0 * r).sinh().abs();
    let sh2sq = (2.0 * r).sinh().powi(2);
    match system.kind() {
        SystemKind::Harmonic | SystemKind::Driven => Ok(0.25 * (1.0 + sh2sq)),
        SystemKind::Free | SystemKind::Linear => {
            let t2 = tau * tau;
            Ok(0.25 * (1.0 + t2 + (t2 + tau.abs()) * sh4)
                + 0.25 * (0.5 + 1.5 * t2 + 0.5 * (1.0 + t2) + tau.abs()) * sh2sq)
        }
        SystemKind::Repulsive => {
            let w = system.big_omega().expect("catalog invariant");
            let s2sq = (2.0 * w * tau).sinh().powi(2);
            let c2sq = (2.0 * w * tau).cosh().powi(2);
            Ok(0.25 * (1.0 + s2sq)
                + 0.125 * (4.0 * w * tau).sinh().abs() * theta.sin().abs() * sh4
                + 0.125 * (1.0 + 3.0 * s2sq + c2sq) * sh2sq)
        }
        SystemKind::Custom => Err(PhaseSpaceError::System(SystemError::Unsupported {
            kind: SystemKind::Custom,
        })),
    }
}

fn reference_product_trig(w: f64, r: f64, theta: f64, tau: f64) -> f64 {
    let s = (2.0 * w * tau - theta).sin();
    let sh = (2.0 * r).sinh();
    0.25 * (1.0 + s * s * sh * sh)
}

fn reference_product_linear(r: f64, theta: f64, tau: f64) -> f64 {
    let sh4 = (4.0 * r).sinh();
    let sh2 = (2.0 * r).sinh();
    let t2 = tau * tau;
    0.25 * (1.0 + t2 + (t2 * theta.cos() - tau * theta.sin()) * sh4)
        + 0.25
            * (0.5 + 1.5 * t2 - 0.5 * (1.0 - t2) * (2.0 * theta).cos()
                - tau * (2.0 * theta).sin())
            * sh2
            * sh2
}

fn reference_product_hyperbolic(w: f64, r: f64, theta: f64, tau: f64) -> f64 {
    let s2 = (2.0 * w * tau).sinh();
    let c2 = (2.0 * w * tau).cosh();
    let sh4 = (4.0 * r).sinh();
    let sh2 = (2.0 * r).sinh();
    0.25 * (1.0 + s2 * s2) - 0.125 * (4.0 * w * tau).sinh() * theta.sin() * sh4
        + 0.125 * (1.0 + 3.0 * s2 * s2 - c2 * c2 * (2.0 * theta).cos()) * sh2 * sh2
}

/// FP/LP uncertainty product exactly as printed (final bracket lacking its
/// 1/4 factor). Kept for the typo regression suite.
pub fn printed_uncertainty_linear(r: f64, theta: f64, tau: f64) -> f64 {
    let sh4 = (4.0 * r).sinh();
    let sh2 = (2.0 * r).sinh();
    let t2 = tau * tau;
    0.25 * (1.0 + t2 + (t2 * theta.cos() - tau * theta.sin()) * sh4)
        + (0.5 + 1.5 * t2 - 0.5 * (1.0 - t2) * (2.0 * theta).cos()
            - tau * (2.0 * theta).sin())
            * sh2
            * sh2
}

/// HO uncertainty product built from the printed variances, whose momentum
/// variance carries the same cosine sign as the position variance. Kept for
/// the typo regression suite.
pub fn printed_uncertainty_trig_same_sign(w: f64, r: f64, theta: f64, tau: f64) -> f64 {
    let c = (2.0 * w * tau - theta).cos();
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    0.25 * (ch + c * sh) * (ch + c * sh)
}

/// RO uncertainty product exactly as printed. Kept for the typo regression
/// suite.
pub fn printed_uncertainty_hyperbolic(w: f64, r: f64, theta: f64, tau: f64) -> f64 {
    let s2 = (2.0 * w * tau).sinh();
    let c2 = (2.0 * w * tau).cosh();
    let sh4 = (4.0 * r).sinh();
    let sh2 = (2.0 * r).sinh();
    0.25 * (1.0 + s2 * s2) - 0.25 * s2 * s2 * theta.sin() * sh4
        + 0.125 * (1.0 + 3.0 * s2 * s2 + c2 * c2 * (2.0 * theta).cos()) * sh2 * sh2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aux_solutions::analytic_basis;
    use crate::driving::driving_integrals;
    use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
    use std::sync::Arc;

    fn setup(system: &SystemSpec) -> (Arc<AuxiliaryBasis>, DrivingIntegrals) {
        let basis = Arc::new(analytic_basis(system).unwrap());
        let d = driving_integrals(basis.clone(), system.g1(), system, 1e-12).unwrap();
        (basis, d)
    }

    #[test]
    fn transfer_fp() {
        let (basis, _) = setup(&SystemSpec::free_particle());
        let m = transfer_matrix(&basis, 3.0).unwrap();
        assert_eq!((m.m11, m.m12, m.m21, m.m22), (1.0, 3.0, 0.0, 1.0));
        assert_eq!(m.det(), 1.0);
    }

    #[test]
    fn transfer_ho_quarter_period() {
        let (basis, _) = setup(&SystemSpec::harmonic(1.0).unwrap());
        let m = transfer_matrix(&basis, FRAC_PI_2).unwrap();
        assert!(m.m11.abs() < 1e-15);
        assert!((m.m12 - 1.0).abs() < 1e-15);
        assert!((m.m21 + 1.0).abs() < 1e-15);
        assert!(m.m22.abs() < 1e-15);
    }

    #[test]
    fn transfer_ro() {
        let (basis, _) = setup(&SystemSpec::repulsive(1.0).unwrap());
        let m = transfer_matrix(&basis, 1.0).unwrap();
        let (ch, sh) = (1.0f64.cosh(), 1.0f64.sinh());
        assert!((m.m11 - ch).abs() < 1e-14);
        assert!((m.m12 - sh).abs() < 1e-14);
        assert!((m.m21 - sh).abs() < 1e-14);
        assert!((m.m22 - ch).abs() < 1e-14);
    }

    #[test]
    fn expect_lp_driven_from_rest() {
        let system = SystemSpec::linear(2.0);
        let (basis, d) = setup(&system);
        let (x, p) =
            expect_xp_from_initial(&basis, &d, InitialPhasePoint::new(0.0, 0.0), 2.0).unwrap();
        assert!((x + 2.0).abs() < 1e-12);
        assert!((p + 2.0).abs() < 1e-12);
    }

    #[test]
    fn expect_dho_half_period() {
        let system = SystemSpec::driven(1.0, 2.0).unwrap();
        let (basis, d) = setup(&system);
        let (x, p) =
            expect_xp_from_initial(&basis, &d, InitialPhasePoint::new(0.0, 0.0), PI).unwrap();
        assert!((x + 2.0).abs() < 1e-12);
        assert!(p.abs() < 1e-12);
    }

    #[test]
    fn expect_ho_quarter_period() {
        let system = SystemSpec::harmonic(1.0).unwrap();
        let (basis, d) = setup(&system);
        let (x, p) =
            expect_xp_from_initial(&basis, &d, InitialPhasePoint::new(1.0, 0.0), FRAC_PI_2)
                .unwrap();
        assert!(x.abs() < 1e-15);
        assert!((p + 1.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_z_params_ho() {
        let system = SystemSpec::harmonic(1.0).unwrap();
        let (basis, d) = setup(&system);
        let params = params_alpha_z(InitialPhasePoint::new(1.0, 1.0), &basis, &d, 0.0, 0.0)
            .unwrap();
        assert!((params.alpha_abs * params.alpha_abs - 1.0).abs() < 1e-14);
        assert!((params.delta - FRAC_PI_4).abs() < 1e-14);
        assert!(!params.degenerate);
    }

    #[test]
    fn alpha_z_params_degenerate() {
        let system = SystemSpec::free_particle();
        let (basis, d) = setup(&system);
        let params =
            params_alpha_z(InitialPhasePoint::new(0.0, 0.0), &basis, &d, 0.0, 0.0).unwrap();
        assert_eq!(params.alpha_abs, 0.0);
        assert_eq!(params.delta, 0.0);
        assert!(params.degenerate);
    }

    #[test]
    fn alpha_z_params_lp_quadrant() {
        // kappa = 4 so g0 = 2; x0 - g0 < 0 and p0 = 0 puts delta at pi.
        let system = SystemSpec::linear(4.0);
        let (basis, d) = setup(&system);
        let params =
            params_alpha_z(InitialPhasePoint::new(1.0, 0.0), &basis, &d, 0.0, 0.0).unwrap();
        assert!((params.alpha_abs * params.alpha_abs - 0.5).abs() < 1e-14);
        assert!((params.delta - PI).abs() < 1e-14);
    }

    #[test]
    fn solve_alpha_given_z_reduces_at_r_zero() {
        let system = SystemSpec::harmonic(2.0).unwrap();
        let (basis, d) = setup(&system);
        let point = InitialPhasePoint::new(0.7, -1.2);
        let a = params_alpha_z(point, &basis, &d, 0.0, 1.0).unwrap();
        let b = solve_alpha_given_z(point, 0.0, 1.0, &basis, &d).unwrap();
        assert!((a.alpha_abs - b.alpha_abs).abs() < 1e-14);
        assert!((a.delta - b.delta).abs() < 1e-14);
    }

    #[test]
    fn solve_alpha_given_z_ho_example() {
        let system = SystemSpec::harmonic(1.0).unwrap();
        let (basis, d) = setup(&system);
        let params =
            solve_alpha_given_z(InitialPhasePoint::new(1.0, 0.0), 1.0, 0.0, &basis, &d).unwrap();
        let a_cos = params.alpha_abs * params.delta.cos();
        let a_sin = params.alpha_abs * params.delta.sin();
        assert!((a_cos - E / SQRT_2).abs() < 1e-12);
        assert!(a_sin.abs() < 1e-12);
    }

    #[test]
    fn z_alpha_identity_ho() {
        // |alpha|^2 [cosh 2r - cos(theta - 2 delta) sinh 2r] = (p0^2 + w^2 x0^2)/(2w)
        let w = 1.3;
        let system = SystemSpec::harmonic(w).unwrap();
        let (basis, d) = setup(&system);
        let point = InitialPhasePoint::new(0.9, -0.4);
        for (r, theta) in [(0.5, 0.3), (1.2, -2.0), (0.0, 1.0)] {
            let p = solve_alpha_given_z(point, r, theta, &basis, &d).unwrap();
            let lhs = p.alpha_abs
                * p.alpha_abs
                * ((2.0 * r).cosh() - (theta - 2.0 * p.delta).cos() * (2.0 * r).sinh());
            let rhs = (point.p0 * point.p0 + w * w * point.x0 * point.x0) / (2.0 * w);
            assert!((lhs - rhs).abs() < 1e-12, "r={r} theta={theta}");
        }
    }

    #[test]
    fn representation_round_trips() {
        for system in [
            SystemSpec::harmonic(1.7).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::linear(2.4),
            SystemSpec::driven(0.9, 1.6).unwrap(),
            SystemSpec::repulsive(0.8).unwrap(),
        ] {
            let (basis, d) = setup(&system);
            let point = InitialPhasePoint::new(0.35, -0.8);
            let az = params_alpha_z(point, &basis, &d, 0.6, 1.1).unwrap();
            let za = solve_alpha_given_z(point, 0.6, 1.1, &basis, &d).unwrap();
            for i in 0..10 {
                let tau = 0.5 * i as f64;
                let base = expect_xp_from_initial(&basis, &d, point, tau).unwrap();
                let a = expect_xp_alpha_z(&az, &basis, &d, tau).unwrap();
                let z = expect_xp_z_alpha(&za, &basis, &d, tau).unwrap();
                let scale = 1.0f64.max(base.0.abs()).max(base.1.abs());
                assert!((a.0 - base.0).abs() / scale < 1e-10, "{system:?} tau={tau}");
                assert!((a.1 - base.1).abs() / scale < 1e-10);
                assert!((z.0 - base.0).abs() / scale < 1e-10);
                assert!((z.1 - base.1).abs() / scale < 1e-10);
            }
        }
    }

    #[test]
    fn z_alpha_fp_at_rest() {
        // FP with x0 = 1, p0 = 0 via z = (1, pi/2): stays at x = 1.
        let system = SystemSpec::free_particle();
        let (basis, d) = setup(&system);
        let params =
            solve_alpha_given_z(InitialPhasePoint::new(1.0, 0.0), 1.0, FRAC_PI_2, &basis, &d)
                .unwrap();
        for tau in [0.0, 1.0, 4.0] {
            let (x, p) = expect_xp_z_alpha(&params, &basis, &d, tau).unwrap();
            assert!((x - 1.0).abs() < 1e-12);
            assert!(p.abs() < 1e-12);
        }
    }

    #[test]
    fn coherent_covariance_is_minimal() {
        for system in [
            SystemSpec::harmonic(1.4).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::repulsive(0.7).unwrap(),
        ] {
            let (basis, _) = setup(&system);
            for i in 0..10 {
                let tau = 0.4 * i as f64;
                let cov = covariance(&basis, 0.0, 0.0, tau).unwrap();
                let s = basis.evaluate(tau).unwrap();
                assert!((cov.var_x - 0.5 * s.phi3).abs() < 1e-12);
                assert!((cov.purity_invariant() - 0.25).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fp_squeezed_initial_variances() {
        let (basis, _) = setup(&SystemSpec::free_particle());
        let cov = covariance(&basis, 1.0, 0.0, 0.0).unwrap();
        assert!((cov.var_x - 0.5 * (-2.0f64).exp()).abs() < 1e-14);
        assert!((cov.var_p - 0.5 * 2.0f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn fp_cov_initial_slope() {
        // sigma_xp(0) = -(1/2) sin(theta) sinh(2r), the FP-section convention
        let (basis, _) = setup(&SystemSpec::free_particle());
        for (r, theta) in [(0.5, 0.7), (1.0, -1.3)] {
            let cov = covariance(&basis, r, theta, 0.0).unwrap();
            let expected = -0.5 * theta.sin() * (2.0 * r).sinh();
            assert!((cov.cov_xp - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ho_product_example() {
        let (basis, _) = setup(&SystemSpec::harmonic(1.0).unwrap());
        let cov = covariance(&basis, 1.0, 0.0, PI / 8.0).unwrap();
        let product = uncertainty_product(&cov);
        let expected = 0.25 * (1.0 + 0.5 * (2.0f64).sinh().powi(2));
        assert!((product - expected).abs() < 1e-12);
        assert!((product - 1.894).abs() < 1e-3);
    }

    #[test]
    fn product_floors() {
        let (basis, _) = setup(&SystemSpec::harmonic(1.0).unwrap());
        for i in 0..200 {
            let tau = 0.05 * i as f64;
            let cov = covariance(&basis, 0.0, 0.0, tau).unwrap();
            assert!((uncertainty_product(&cov) - 0.25).abs() < 1e-12);
        }
        let (basis, _) = setup(&SystemSpec::free_particle());
        let cov = covariance(&basis, 0.0, 0.0, 1.0).unwrap();
        assert!((uncertainty_product(&cov) - 0.5).abs() < 1e-12);
        let (basis, _) = setup(&SystemSpec::repulsive(1.0).unwrap());
        for i in 0..50 {
            let tau = 0.04 * i as f64;
            let cov = covariance(&basis, 0.0, 0.0, tau).unwrap();
            let expected = 0.25 * (1.0 + (2.0 * tau).sinh().powi(2));
            assert!((uncertainty_product(&cov) - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_products_match_covariance() {
        for system in [
            SystemSpec::harmonic(1.6).unwrap(),
            SystemSpec::driven(1.1, 0.8).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::linear(1.9),
            SystemSpec::repulsive(0.6).unwrap(),
        ] {
            let (basis, _) = setup(&system);
            for (r, theta) in [(0.0, 0.0), (0.7, 1.3), (1.5, -2.1), (2.0, 3.0)] {
                for i in 0..20 {
                    let tau = 0.25 * i as f64;
                    let cov = covariance(&basis, r, theta, tau).unwrap();
                    let reference =
                        paper_reference_uncertainty(&system, r, theta, tau).unwrap();
                    let product = uncertainty_product(&cov);
                    let scale = 1.0f64.max(reference.abs());
                    assert!(
                        ((product - reference) / scale).abs() < 1e-9,
                        "{system:?} r={r} theta={theta} tau={tau}: {product} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn printed_forms_disagree_where_documented() {
        // FP: the printed product lacks a 1/4 on the sinh^2 bracket.
        let (basis, _) = setup(&SystemSpec::free_particle());
        let (r, theta, tau) = (0.8, 0.9, 1.7);
        let product = uncertainty_product(&covariance(&basis, r, theta, tau).unwrap());
        let corrected = reference_product_linear(r, theta, tau);
        let printed = printed_uncertainty_linear(r, theta, tau);
        assert!((product - corrected).abs() < 1e-12);
        assert!((product - printed).abs() > 1e-3);

        // HO: momentum variance printed with the wrong cosine sign.
        let w = 1.0;
        let (basis, _) = setup(&SystemSpec::harmonic(w).unwrap());
        let (r, theta, tau) = (0.8, 0.4, 0.3);
        let product = uncertainty_product(&covariance(&basis, r, theta, tau).unwrap());
        let corrected = reference_product_trig(w, r, theta, tau);
        // the printed-variance product in the HO section's own phase
        // convention (theta shifted by pi relative to ours)
        let printed = printed_uncertainty_trig_same_sign(w, r, theta + PI, tau);
        assert!((product - corrected).abs() < 1e-12);
        assert!((product - printed).abs() > 1e-3);

        // RO: sinh 4r cross term and cos 2theta sign.
        let w = 0.9;
        let (basis, _) = setup(&SystemSpec::repulsive(w).unwrap());
        let (r, theta, tau) = (0.6, 1.1, 1.2);
        let product = uncertainty_product(&covariance(&basis, r, theta, tau).unwrap());
        let corrected = reference_product_hyperbolic(w, r, theta, tau);
        let printed = printed_uncertainty_hyperbolic(w, r, theta, tau);
        assert!((product - corrected).abs() < 1e-9 * product.max(1.0));
        assert!((product - printed).abs() > 1e-3);
    }

    #[test]
    fn covariance_routes_agree() {
        for system in [
            SystemSpec::harmonic(2.2).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::repulsive(0.5).unwrap(),
        ] {
            let (basis, _) = setup(&system);
            for (r, theta) in [(0.0, 0.0), (1.0, 2.0), (1.8, -0.7)] {
                for i in 0..15 {
                    let tau = 0.3 * i as f64;
                    let a = covariance(&basis, r, theta, tau).unwrap();
                    let b = covariance_via_transfer(&basis, r, theta, tau).unwrap();
                    let scale = 1.0f64.max(a.var_x.abs()).max(a.var_p.abs());
                    assert!((a.var_x - b.var_x).abs() / scale < 1e-9);
                    assert!((a.var_p - b.var_p).abs() / scale < 1e-9);
                    assert!((a.cov_xp - b.cov_xp).abs() / scale < 1e-9);
                }
            }
        }
    }

    #[test]
    fn ehrenfest_classical_motion() {
        let h = 1e-4;
        for system in [
            SystemSpec::harmonic(1.5).unwrap(),
            SystemSpec::free_particle(),
            SystemSpec::linear(2.0),
            SystemSpec::driven(1.2, 1.4).unwrap(),
            SystemSpec::repulsive(0.9).unwrap(),
        ] {
            let (basis, d) = setup(&system);
            let point = InitialPhasePoint::new(0.6, -0.3);
            for i in 1..=8 {
                let tau = 0.5 * i as f64;
                let (x, p) = expect_xp_from_initial(&basis, &d, point, tau).unwrap();
                let (x_hi, p_hi) = expect_xp_from_initial(&basis, &d, point, tau + h).unwrap();
                let (x_lo, p_lo) = expect_xp_from_initial(&basis, &d, point, tau - h).unwrap();
                let dx = (x_hi - x_lo) / (2.0 * h);
                let dp = (p_hi - p_lo) / (2.0 * h);
                let g2 = system.g2().value(tau);
                let g1 = system.g1().value(tau);
                assert!((dx - p).abs() < 1e-6, "{system:?} dx/dt at {tau}");
                assert!(
                    (dp + 2.0 * g2 * x + g1).abs() < 1e-6,
                    "{system:?} dp/dt at {tau}"
                );
            }
        }
    }

    #[test]
    fn trajectory_shapes() {
        // FP: straight line in phase space (constant p)
        let (basis, d) = setup(&SystemSpec::free_particle());
        let point = InitialPhasePoint::new(0.4, 0.9);
        for i in 0..20 {
            let (_, p) = expect_xp_from_initial(&basis, &d, point, 0.3 * i as f64).unwrap();
            assert!((p - 0.9).abs() < 1e-12);
        }
        // LP: <p> linear, <x> quadratic in tau
        let (basis, d) = setup(&SystemSpec::linear(2.0));
        let point = InitialPhasePoint::new(0.0, 0.0);
        for i in 0..20 {
            let tau = 0.3 * i as f64;
            let (x, p) = expect_xp_from_initial(&basis, &d, point, tau).unwrap();
            assert!((p + tau).abs() < 1e-12);
            assert!((x + 0.5 * tau * tau).abs() < 1e-12);
        }
        // RO: hyperbola W^2<x>^2 - <p>^2 = W^2 x0^2 for p0 = 0
        let w = 1.1;
        let (basis, d) = setup(&SystemSpec::repulsive(w).unwrap());
        let point = InitialPhasePoint::new(0.8, 0.0);
        for i in 0..15 {
            let tau = 0.2 * i as f64;
            let (x, p) = expect_xp_from_initial(&basis, &d, point, tau).unwrap();
            let invariant = w * w * x * x - p * p;
            let expected = w * w * point.x0 * point.x0;
            assert!(
                (invariant - expected).abs() < 1e-9 * expected.max(1.0),
                "tau={tau}"
            );
        }
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.1) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn wrong_representation_rejected() {
        let system = SystemSpec::free_particle();
        let (basis, d) = setup(&system);
        let az = params_alpha_z(InitialPhasePoint::new(1.0, 0.0), &basis, &d, 0.0, 0.0).unwrap();
        assert!(matches!(
            expect_xp_z_alpha(&az, &basis, &d, 1.0),
            Err(PhaseSpaceError::WrongRepresentation { .. })
        ));
    }
}
