//! Domain types: coupling parameters, qubit states, and the reservoir spectrum.
//!
//! The physical setup is a two-level atom coupled to a single cavity mode with
//! strength `omega`, the cavity in turn coupled to a bosonic reservoir with
//! strength `theta`. The reservoir is either Lorentzian with spectral width
//! `gamma` (correlation time `1/gamma`) or the `gamma -> infinity` memoryless
//! limit. All dynamics depend only on the ratios `theta/omega`, `gamma/omega`
//! and the dimensionless time `omega * t`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Absolute tolerance for the qubit positivity constraint `|eg|^2 <= ee(1-ee)`.
///
/// Residue sums and long evolutions accumulate float error at this scale.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// Cavity-reservoir coupling structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reservoir<T> {
    /// Lorentzian spectrum of width `gamma`; exponentially decaying
    /// correlation function with memory time `1/gamma`.
    Lorentzian { gamma: T },
    /// The `gamma -> infinity` limit: delta-correlated, no memory.
    Memoryless,
}

/// Coupling strengths of the atom-cavity-reservoir chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    omega: T,
    theta: T,
    reservoir: Reservoir<T>,
    center_frequency: T,
}

impl<T: Scalar> ModelParams<T> {
    /// Validate and build a parameter set.
    ///
    /// `omega` is the atom-cavity coupling (> 0), `theta` the cavity-reservoir
    /// coupling (>= 0). The resonance frequency defaults to zero; it only
    /// shifts the spectral density and cancels from all dynamics.
    pub fn new(omega: T, theta: T, reservoir: Reservoir<T>) -> Result<Self> {
        if !(omega.is_finite() && omega > T::zero()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                value: omega.to_f64_lossy(),
                constraint: "finite and > 0",
            });
        }
        if !(theta.is_finite() && theta >= T::zero()) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta.to_f64_lossy(),
                constraint: "finite and >= 0",
            });
        }
        if let Reservoir::Lorentzian { gamma } = reservoir {
            if !(gamma.is_finite() && gamma > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "reservoir.gamma",
                    value: gamma.to_f64_lossy(),
                    constraint: "finite and > 0",
                });
            }
        }
        Ok(Self {
            omega,
            theta,
            reservoir,
            center_frequency: T::zero(),
        })
    }

    /// Lorentzian reservoir of width `gamma`.
    pub fn lorentzian(omega: T, theta: T, gamma: T) -> Result<Self> {
        Self::new(omega, theta, Reservoir::Lorentzian { gamma })
    }

    /// Memoryless (flat-spectrum limit) reservoir.
    pub fn memoryless(omega: T, theta: T) -> Result<Self> {
        Self::new(omega, theta, Reservoir::Memoryless)
    }

    /// Set the nominal resonance frequency used by [`spectral_density`].
    pub fn with_center_frequency(mut self, center: T) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidParameter {
                name: "center_frequency",
                value: center.to_f64_lossy(),
                constraint: "finite",
            });
        }
        self.center_frequency = center;
        Ok(self)
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn reservoir(&self) -> Reservoir<T> {
        self.reservoir
    }

    pub fn center_frequency(&self) -> T {
        self.center_frequency
    }

    /// Dimensionless cavity-reservoir coupling `theta / omega`.
    pub fn theta_ratio(&self) -> T {
        self.theta / self.omega
    }

    /// Dimensionless spectral width `gamma / omega`, when Lorentzian.
    pub fn gamma_ratio(&self) -> Option<T> {
        match self.reservoir {
            Reservoir::Lorentzian { gamma } => Some(gamma / self.omega),
            Reservoir::Memoryless => None,
        }
    }

    /// Reservoir memory time `1/gamma` (zero in the memoryless limit).
    pub fn correlation_time(&self) -> T {
        match self.reservoir {
            Reservoir::Lorentzian { gamma } => gamma.recip(),
            Reservoir::Memoryless => T::zero(),
        }
    }

    pub fn is_memoryless(&self) -> bool {
        matches!(self.reservoir, Reservoir::Memoryless)
    }
}

/// Lorentzian spectral density `J(w) = (theta/2pi) gamma^2 / ((center - w)^2 + gamma^2)`.
///
/// Fails for a memoryless reservoir, which has no finite-width spectrum.
pub fn spectral_density<T: Scalar>(omega_arg: T, params: &ModelParams<T>) -> Result<T> {
    match params.reservoir {
        Reservoir::Memoryless => Err(Error::MemorylessSpectralDensity),
        Reservoir::Lorentzian { gamma } => {
            let detuning = params.center_frequency - omega_arg;
            let two_pi = T::from_f64(2.0) * T::PI();
            Ok(params.theta / two_pi * gamma * gamma / (detuning * detuning + gamma * gamma))
        }
    }
}

/// Qubit state as the pair `(ee, eg)` of a 2x2 density matrix.
///
/// Hermiticity and unit trace hold by construction: only the excited
/// population and the upper coherence are stored, `gg = 1 - ee` and
/// `ge = conj(eg)` are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2<T> {
    ee: T,
    eg: Complex<T>,
}

impl<T: Scalar> DensityMatrix2<T> {
    /// Validate and build a state. Rejects populations outside `[0, 1]` and
    /// coherences with `|eg|^2 > ee(1-ee) + 1e-12`; values within the
    /// tolerance band are clamped onto the physical set.
    pub fn new(ee: T, eg: Complex<T>) -> Result<Self> {
        let tol = T::from_f64(POSITIVITY_TOL);
        if !ee.is_finite() || ee < -tol || ee > T::one() + tol {
            return Err(Error::PopulationOutOfRange(ee.to_f64_lossy()));
        }
        if !eg.re.is_finite() || !eg.im.is_finite() {
            return Err(Error::PositivityViolated {
                coherence_sq: f64::NAN,
                limit: 0.0,
            });
        }
        let ee = ee.max(T::zero()).min(T::one());
        let limit = ee * (T::one() - ee);
        if eg.norm_sqr() > limit + tol {
            return Err(Error::PositivityViolated {
                coherence_sq: eg.norm_sqr().to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        Ok(Self { ee, eg })
    }

    /// Excited-state population `rho_ee`.
    pub fn ee(&self) -> T {
        self.ee
    }

    /// Upper coherence `rho_eg`.
    pub fn eg(&self) -> Complex<T> {
        self.eg
    }

    /// Ground-state population `rho_gg = 1 - rho_ee`.
    pub fn gg(&self) -> T {
        T::one() - self.ee
    }

    /// `|e><e|`
    pub fn excited() -> Self {
        Self {
            ee: T::one(),
            eg: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `|g><g|`
    pub fn ground() -> Self {
        Self {
            ee: T::zero(),
            eg: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `|+><+|` with `|+> = (|e> + |g>)/sqrt(2)`
    pub fn plus_x() -> Self {
        let half = T::from_f64(0.5);
        Self {
            ee: half,
            eg: Complex::new(half, T::zero()),
        }
    }

    /// `|-><-|` with `|-> = (|e> - |g>)/sqrt(2)`
    pub fn minus_x() -> Self {
        let half = T::from_f64(0.5);
        Self {
            ee: half,
            eg: Complex::new(-half, T::zero()),
        }
    }

    /// Maximally mixed state `I/2`.
    pub fn maximally_mixed() -> Self {
        Self {
            ee: T::from_f64(0.5),
            eg: Complex::new(T::zero(), T::zero()),
        }
    }

    /// Purity `Tr(rho^2) = ee^2 + (1-ee)^2 + 2 |eg|^2`, in `[1/2, 1]`.
    pub fn purity(&self) -> T {
        let gg = self.gg();
        self.ee * self.ee + gg * gg + T::from_f64(2.0) * self.eg.norm_sqr()
    }
}

/// Trace distance `D = (1/2) Tr |rho1 - rho2|` between two qubit states.
///
/// For the traceless Hermitian difference with diagonal `d` and off-diagonal
/// `o` the eigenvalues are `+-sqrt(d^2 + |o|^2)`, so `D = sqrt(d^2 + |o|^2)`.
pub fn trace_distance<T: Scalar>(rho1: &DensityMatrix2<T>, rho2: &DensityMatrix2<T>) -> T {
    let d = rho1.ee - rho2.ee;
    let o = rho1.eg - rho2.eg;
    (d * d + o.norm_sqr()).sqrt()
}

/// Bloch angles `(theta, phi)` of a pure qubit state
/// `cos(theta)|e> + sin(theta) e^{i phi}|g>`.
///
/// Canonical ranges are `theta in [0, pi/2]` and `phi in [0, 2pi)`; `phi` in
/// `[0, pi]` already covers every distinct trajectory of the observables
/// studied here. Out-of-range angles are accepted and folded back onto the
/// canonical ranges using the state's own periodicity (a warning-level detail
/// worth knowing: the fold changes the stored angles, not the state).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureStateAngles<T> {
    theta: T,
    phi: T,
}

impl<T: Scalar> PureStateAngles<T> {
    pub fn new(theta: T, phi: T) -> Self {
        let two_pi = T::from_f64(2.0) * T::PI();
        let half_pi = T::FRAC_PI_2();
        if theta >= T::zero() && theta <= half_pi && phi >= T::zero() && phi < two_pi {
            return Self { theta, phi };
        }
        // Fold: ee = cos^2(theta) fixes theta' = acos(|cos theta|); a sign
        // flip of cos*sin is absorbed into phi as a half-turn.
        let c = theta.cos();
        let s = theta.sin();
        let theta_canon = c.abs().min(T::one()).acos();
        let phi_shift = if c * s < T::zero() {
            T::PI()
        } else {
            T::zero()
        };
        let mut phi_canon = (phi + phi_shift) % two_pi;
        if phi_canon < T::zero() {
            phi_canon += two_pi;
        }
        Self {
            theta: theta_canon,
            phi: phi_canon,
        }
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn phi(&self) -> T {
        self.phi
    }
}

/// Pure state `cos(theta)|e> + sin(theta) e^{i phi}|g>` as a density matrix:
/// `ee = cos^2(theta)`, `eg = cos(theta) sin(theta) e^{-i phi}`.
pub fn pure_state_from_angles<T: Scalar>(angles: &PureStateAngles<T>) -> DensityMatrix2<T> {
    let c = angles.theta.cos();
    let s = angles.theta.sin();
    let ee = c * c;
    let eg = Complex::from_polar(c * s, -angles.phi);
    DensityMatrix2::new(ee, eg).expect("pure state construction is always valid")
}
