//! Brute-force integration of the amplitude equations.
//!
//! In the one-excitation sector the atomic amplitude `b`, cavity amplitude
//! `c` and the memory integral `z = int_0^t alpha(t-s) c(s) ds` close into
//!
//! ```text
//! db/ds = -i c
//! dc/ds = -i b - z
//! dz/ds = -g z + (q g / 2) c        (s = omega t, q = theta/omega, g = gamma/omega)
//! ```
//!
//! because the exponential kernel `alpha(u) = (theta gamma / 2) e^{-gamma u}`
//! turns the integral into one extra linear mode. `Gamma(t) = b(t)` with
//! `b(0) = 1`, `c(0) = z(0) = 0`.
//!
//! The integrator is classic fixed-step RK4; the run is repeated at half the
//! step for a Richardson error estimate, and the half-step result is what is
//! returned. Fixed stepping keeps the oracle bit-reproducible.

use num_complex::Complex;

use super::{Method, PropagatorCurve, TimeGrid};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Reservoir};
use crate::scalar::Scalar;

/// Base dimensionless step `omega * h`.
const BASE_STEP: f64 = 1e-3;

/// Richardson error estimate must stay below this.
const ERROR_TOL: f64 = 1e-7;

/// Allowed excess of `|b|^2 + |c|^2` over 1.
const NORM_SLACK: f64 = 1e-6;

/// Amplitudes of the one-excitation wavefunction plus the memory auxiliary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleState<T> {
    /// Dimensionless time `omega * t`.
    pub t: T,
    /// Atomic excited amplitude; equals the decoherence function.
    pub b: Complex<T>,
    /// Cavity single-photon amplitude.
    pub c: Complex<T>,
    /// Memory integral of the cavity amplitude against the reservoir kernel.
    pub z: Complex<T>,
}

impl<T: Scalar> OracleState<T> {
    /// Probability kept by atom plus cavity; the remainder sits in the reservoir.
    pub fn excitation_norm_sqr(&self) -> T {
        self.b.norm_sqr() + self.c.norm_sqr()
    }
}

#[derive(Clone, Copy)]
struct Amps<T> {
    b: Complex<T>,
    c: Complex<T>,
    z: Complex<T>,
}

impl<T: Scalar> Amps<T> {
    fn axpy(self, other: Amps<T>, s: T) -> Amps<T> {
        Amps {
            b: self.b + other.b * s,
            c: self.c + other.c * s,
            z: self.z + other.z * s,
        }
    }
}

struct Integrator<T> {
    theta_ratio: T,
    gamma_ratio: T,
}

impl<T: Scalar> Integrator<T> {
    fn deriv(&self, y: Amps<T>) -> Amps<T> {
        let i = Complex::new(T::zero(), T::one());
        let half = T::from_f64(0.5);
        Amps {
            b: -i * y.c,
            c: -i * y.b - y.z,
            z: -y.z * self.gamma_ratio + y.c * (self.theta_ratio * self.gamma_ratio * half),
        }
    }

    fn rk4_step(&self, y: Amps<T>, h: T) -> Amps<T> {
        let half = T::from_f64(0.5);
        let sixth = T::from_f64(1.0 / 6.0);
        let k1 = self.deriv(y);
        let k2 = self.deriv(y.axpy(k1, h * half));
        let k3 = self.deriv(y.axpy(k2, h * half));
        let k4 = self.deriv(y.axpy(k3, h));
        let acc = Amps {
            b: k1.b + (k2.b + k3.b) * T::from_f64(2.0) + k4.b,
            c: k1.c + (k2.c + k3.c) * T::from_f64(2.0) + k4.c,
            z: k1.z + (k2.z + k3.z) * T::from_f64(2.0) + k4.z,
        };
        y.axpy(acc, h * sixth)
    }

    /// Integrate across the whole grid with `substeps` RK4 steps per interval,
    /// recording the state at each grid point.
    fn run(&self, grid: &TimeGrid<T>, substeps: usize) -> Vec<Amps<T>> {
        let h = grid.step() / T::from_f64(substeps as f64);
        let mut y = Amps {
            b: Complex::new(T::one(), T::zero()),
            c: Complex::new(T::zero(), T::zero()),
            z: Complex::new(T::zero(), T::zero()),
        };
        let mut out = Vec::with_capacity(grid.len());
        out.push(y);
        for _ in 1..grid.len() {
            for _ in 0..substeps {
                y = self.rk4_step(y, h);
            }
            out.push(y);
        }
        out
    }
}

/// Integrate the amplitude equations over `grid` and return the full states.
///
/// The step is `min(1e-3, 1/(1 + g + sqrt(1 + q g / 2)))` in units of
/// `1/omega`, which keeps RK4 inside its stability region when the reservoir
/// mode is fast (`gamma >> omega`), rounded so an integer number of substeps
/// tiles each grid interval.
pub fn oracle_trajectory<T: Scalar>(
    grid: &TimeGrid<T>,
    params: &ModelParams<T>,
) -> Result<Vec<OracleState<T>>> {
    let gamma_ratio = match params.reservoir() {
        Reservoir::Lorentzian { gamma } => gamma / params.omega(),
        Reservoir::Memoryless => {
            return Err(Error::RequiresLorentzian {
                operation: "the ODE oracle",
            })
        }
    };
    let integrator = Integrator {
        theta_ratio: params.theta_ratio(),
        gamma_ratio,
    };

    let g = gamma_ratio.to_f64_lossy();
    let q = integrator.theta_ratio.to_f64_lossy();
    let h_target = BASE_STEP.min(1.0 / (1.0 + g + (1.0 + q * g / 2.0).sqrt()));
    let substeps = (grid.step().to_f64_lossy() / h_target).ceil().max(1.0) as usize;

    let coarse = integrator.run(grid, substeps);
    let fine = integrator.run(grid, substeps * 2);

    let mut estimate = T::zero();
    for (yc, yf) in coarse.iter().zip(fine.iter()) {
        estimate = estimate.max((yc.b - yf.b).norm());
    }
    let estimate = estimate / T::from_f64(15.0);
    if estimate > T::from_f64(ERROR_TOL) {
        return Err(Error::OracleTolerance {
            estimate: estimate.to_f64_lossy(),
            tolerance: ERROR_TOL,
        });
    }

    let slack = T::from_f64(NORM_SLACK);
    let mut states = Vec::with_capacity(grid.len());
    for (y, t) in fine.iter().zip(grid.values()) {
        let norm_sqr = y.b.norm_sqr() + y.c.norm_sqr();
        if norm_sqr > T::one() + slack {
            return Err(Error::OracleNormGrowth {
                norm_sqr: norm_sqr.to_f64_lossy(),
            });
        }
        states.push(OracleState {
            t,
            b: y.b,
            c: y.c,
            z: y.z,
        });
    }
    Ok(states)
}

/// The decoherence function `Gamma(t) = b(t)` from direct integration.
pub fn gamma_ode_oracle<T: Scalar>(
    grid: &TimeGrid<T>,
    params: &ModelParams<T>,
) -> Result<PropagatorCurve<T>> {
    let states = oracle_trajectory(grid, params)?;
    let values = states
        .iter()
        .map(|s| {
            debug_assert!(
                s.b.im.abs() < T::from_f64(1e-9),
                "atomic amplitude grew an imaginary part: {:?}",
                s.b
            );
            s.b.re
        })
        .collect();
    PropagatorCurve::new(grid.clone(), values, Method::Oracle)
}
