//! Independent cross-check: a split-step Fourier propagator for the
//! Schroedinger equation `i dpsi/dtau = -1/2 psi'' + V(x, tau) psi` with
//! `V = g2 x^2 + g1 x + g0`. Nothing here reuses the auxiliary-equation
//! machinery beyond reading off initial second moments, so agreement with
//! the phase-space engine is a real test.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;
use thiserror::Error;

use crate::aux_solutions::{AuxError, AuxiliaryBasis};
use crate::driving::{DrivingError, DrivingIntegrals};
use crate::phase_space::{Covariance, InitialPhasePoint};
use crate::systems::SystemSpec;

/// Probability density allowed at the grid edges before a run is rejected.
pub const BOUNDARY_DENSITY_LIMIT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("grid size must be a power of two of at least 64, got {0}")]
    BadGridSize(usize),
    #[error("grid half-width must be positive and finite, got {0}")]
    BadDomain(f64),
    #[error("time step must be positive, got {0}")]
    BadTimeStep(f64),
    #[error(
        "wave packet reached the grid boundary at tau = {tau} \
         (edge density {density:.3e}); enlarge the domain"
    )]
    BoundaryLeak { tau: f64, density: f64 },
    #[error("wavefunction lost normalization at tau = {tau} (norm {norm})")]
    NormLoss { tau: f64, norm: f64 },
    #[error("initial covariance is not a valid Gaussian width: var_x = {var_x}")]
    BadInitialWidth { var_x: f64 },
    #[error(transparent)]
    Basis(#[from] AuxError),
    #[error(transparent)]
    Driving(#[from] DrivingError),
}

/// Uniform periodic grid on [-half_width, half_width).
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    n: usize,
    half_width: f64,
}

impl SpatialGrid {
    pub fn new(n: usize, half_width: f64) -> Result<Self, OracleError> {
        if n < 64 || !n.is_power_of_two() {
            return Err(OracleError::BadGridSize(n));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(OracleError::BadDomain(half_width));
        }
        Ok(SpatialGrid { n, half_width })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.dx()
    }

    /// FFT-ordered wavenumber for bin `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        let dk = std::f64::consts::PI / self.half_width;
        let i = i as isize;
        let n = self.n as isize;
        let m = if i < n / 2 { i } else { i - n };
        m as f64 * dk
    }
}

/// First and second moments measured directly on the grid.
#[derive(Debug, Clone, Copy)]
pub struct GridMoments {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cov_xp: f64,
}

pub struct GridWavefunction {
    grid: SpatialGrid,
    psi: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridWavefunction {
    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn norm(&self) -> f64 {
        let dx = self.grid.dx();
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx
    }

    /// A wavefunction on the same grid with different sample values;
    /// used to compose operator applications.
    pub fn with_values(&self, values: Vec<Complex64>) -> GridWavefunction {
        assert_eq!(values.len(), self.grid.len());
        GridWavefunction {
            grid: self.grid.clone(),
            psi: values,
            forward: self.forward.clone(),
            inverse: self.inverse.clone(),
        }
    }

    fn spectral_apply(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut hat = self.psi.clone();
        self.forward.process(&mut hat);
        for (i, v) in hat.iter_mut().enumerate() {
            *v *= f(self.grid.wavenumber(i));
        }
        self.inverse.process(&mut hat);
        let scale = 1.0 / self.grid.len() as f64;
        for v in hat.iter_mut() {
            *v *= scale;
        }
        hat
    }

    /// Spatial derivative via the Fourier multiplier `ik`.
    pub fn derivative(&self) -> Vec<Complex64> {
        self.spectral_apply(|k| Complex64::new(0.0, k))
    }

    pub fn moments(&self) -> GridMoments {
        let dx = self.grid.dx();
        let norm: f64 = self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
        let mut mean_x = 0.0;
        for (i, c) in self.psi.iter().enumerate() {
            mean_x += self.grid.point(i) * c.norm_sqr();
        }
        mean_x *= dx / norm;
        let mut var_x = 0.0;
        for (i, c) in self.psi.iter().enumerate() {
            let d = self.grid.point(i) - mean_x;
            var_x += d * d * c.norm_sqr();
        }
        var_x *= dx / norm;

        let dpsi = self.derivative();
        let ddpsi = self.spectral_apply(|k| Complex64::new(-k * k, 0.0));
        let mut mean_p = 0.0;
        let mut mean_p2 = 0.0;
        let mut mean_xp = 0.0;
        for i in 0..self.psi.len() {
            let c = self.psi[i].conj();
            // p psi = -i psi'
            let p_psi = Complex64::new(0.0, -1.0) * dpsi[i];
            mean_p += (c * p_psi).re;
            mean_p2 += (c * -ddpsi[i]).re;
            mean_xp += (c * p_psi).re * self.grid.point(i);
        }
        mean_p *= dx / norm;
        mean_p2 *= dx / norm;
        mean_xp *= dx / norm;

        GridMoments {
            norm,
            mean_x,
            mean_p,
            var_x: var_x.max(0.0),
            var_p: (mean_p2 - mean_p * mean_p).max(0.0),
            cov_xp: mean_xp - mean_x * mean_p,
        }
    }

    /// Strang split-step evolution from `tau0` to `tau1` with step `dt`
    /// (the last step is shortened to land on `tau1` exactly). Potential
    /// half-kicks use the midpoint time of each step; kinetic steps act in
    /// Fourier space. Second-order accurate in `dt`.
    pub fn propagate(
        &mut self,
        system: &SystemSpec,
        tau0: f64,
        tau1: f64,
        dt: f64,
    ) -> Result<(), OracleError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(OracleError::BadTimeStep(dt));
        }
        let n = self.grid.len();
        let mut tau = tau0;
        while tau < tau1 - 1e-15 {
            let h = dt.min(tau1 - tau);
            let tmid = tau + 0.5 * h;
            let g2 = system.g2().value(tmid);
            let g1 = system.g1().value(tmid);
            let g0 = system.g0().value(tmid);

            for (i, v) in self.psi.iter_mut().enumerate() {
                let x = self.grid.point(i);
                let pot = g2 * x * x + g1 * x + g0;
                *v *= Complex64::from_polar(1.0, -0.5 * h * pot);
            }
            self.forward.process(&mut self.psi);
            for (i, v) in self.psi.iter_mut().enumerate() {
                let k = self.grid.wavenumber(i);
                *v *= Complex64::from_polar(1.0, -0.5 * h * k * k);
            }
            self.inverse.process(&mut self.psi);
            let scale = 1.0 / n as f64;
            for v in self.psi.iter_mut() {
                *v *= scale;
            }
            for (i, v) in self.psi.iter_mut().enumerate() {
                let x = self.grid.point(i);
                let pot = g2 * x * x + g1 * x + g0;
                *v *= Complex64::from_polar(1.0, -0.5 * h * pot);
            }
            tau += h;

            let edge = self.psi[0].norm_sqr().max(self.psi[n - 1].norm_sqr());
            if edge > BOUNDARY_DENSITY_LIMIT {
                return Err(OracleError::BoundaryLeak { tau, density: edge });
            }
        }
        let norm = self.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-6 {
            return Err(OracleError::NormLoss { tau: tau1, norm });
        }
        Ok(())
    }
}

/// Build the normalized Gaussian with the given first moments and initial
/// covariance: `psi ~ exp[-A (x - x0)^2 / 2 + i p0 (x - x0)]` with
/// `A = 1/(2 var_x) - i cov/var_x`. The resulting state is pure, so `var_p`
/// is fixed by `var_x` and `cov`.
pub fn init_squeezed_wavefunction(
    grid: SpatialGrid,
    point: InitialPhasePoint,
    cov0: &Covariance,
) -> Result<GridWavefunction, OracleError> {
    if !(cov0.var_x.is_finite() && cov0.var_x > 0.0) {
        return Err(OracleError::BadInitialWidth { var_x: cov0.var_x });
    }
    let a = Complex64::new(1.0 / (2.0 * cov0.var_x), -cov0.cov_xp / cov0.var_x);
    let mut psi = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let d = grid.point(i) - point.x0;
        let exponent = -0.5 * a * d * d + Complex64::new(0.0, point.p0 * d);
        psi.push(exponent.exp());
    }
    let dx = grid.dx();
    let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx;
    let scale = 1.0 / norm.sqrt();
    for v in psi.iter_mut() {
        *v *= scale;
    }
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(grid.len());
    let inverse = planner.plan_fft_inverse(grid.len());
    Ok(GridWavefunction {
        grid,
        psi,
        forward,
        inverse,
    })
}

/// Apply the time-dependent lowering operator on the grid:
/// `J- psi = xi psi' - i xidot x psi + i C psi`, `C = (C1 + i C2)/sqrt(2)`
/// with the integration constants included. Coherent states are its
/// eigenstates at every time.
pub fn ladder_lower(
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    tau: f64,
    wf: &GridWavefunction,
) -> Result<Vec<Complex64>, OracleError> {
    let s = basis.evaluate(tau)?;
    let c = drive_term(driving, tau)?;
    let dpsi = wf.derivative();
    let mut out = Vec::with_capacity(wf.grid.len());
    for i in 0..wf.grid.len() {
        let x = wf.grid.point(i);
        out.push(
            s.xi * dpsi[i] - Complex64::new(0.0, 1.0) * s.xidot * x * wf.psi[i]
                + Complex64::new(0.0, 1.0) * c * wf.psi[i],
        );
    }
    Ok(out)
}

/// The adjoint partner: `J+ psi = -conj(xi) psi' + i conj(xidot) x psi - i conj(C) psi`.
pub fn ladder_raise(
    basis: &AuxiliaryBasis,
    driving: &DrivingIntegrals,
    tau: f64,
    wf: &GridWavefunction,
) -> Result<Vec<Complex64>, OracleError> {
    let s = basis.evaluate(tau)?;
    let c = drive_term(driving, tau)?;
    let dpsi = wf.derivative();
    let mut out = Vec::with_capacity(wf.grid.len());
    for i in 0..wf.grid.len() {
        let x = wf.grid.point(i);
        out.push(
            -s.xi.conj() * dpsi[i]
                + Complex64::new(0.0, 1.0) * s.xidot.conj() * x * wf.psi[i]
                - Complex64::new(0.0, 1.0) * c.conj() * wf.psi[i],
        );
    }
    Ok(out)
}

fn drive_term(driving: &DrivingIntegrals, tau: f64) -> Result<Complex64, OracleError> {
    let c1 = driving.big_c1(tau)?;
    let c2 = driving.big_c2(tau)?;
    Ok(Complex64::new(c1, c2) * std::f64::consts::FRAC_1_SQRT_2)
}

/// L2 inner product `<a|b>` on the grid of `wf`.
pub fn inner_product(wf: &GridWavefunction, a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let dx = wf.grid.dx();
    a.iter()
        .zip(b)
        .map(|(u, v)| u.conj() * v)
        .sum::<Complex64>()
        * dx
}
