//! Error type shared by every module in the crate.
//!
//! Payloads are widened to `f64` so the error type stays non-generic.

use thiserror::Error;

/// Everything that can go wrong in the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates its constraint (e.g. `omega <= 0`).
    #[error("invalid parameter `{name}` = {value}: must satisfy {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// Excited-state population outside `[0, 1]`.
    #[error("excited population {0} lies outside [0, 1]")]
    PopulationOutOfRange(f64),

    /// Coherence too large for the populations: `|eg|^2 > ee (1 - ee)`.
    #[error("positivity violated: |eg|^2 = {coherence_sq} exceeds ee(1-ee) = {limit}")]
    PositivityViolated { coherence_sq: f64, limit: f64 },

    /// The memoryless reservoir has no finite-width spectrum to evaluate.
    #[error("spectral density is undefined for a memoryless reservoir")]
    MemorylessSpectralDensity,

    /// An operation needs the Lorentzian reservoir variant.
    #[error("{operation} requires a Lorentzian reservoir")]
    RequiresLorentzian { operation: &'static str },

    /// Laplace image evaluated on (or numerically at) a pole.
    #[error("Laplace image evaluated at a pole: |D(p)| = {denominator_magnitude:e}")]
    LaplacePole { denominator_magnitude: f64 },

    /// The residue sum failed to be real to tolerance.
    #[error("residue sum has imaginary part {max_imag:e} (tolerance {tolerance:e})")]
    ResidueImaginary { max_imag: f64, tolerance: f64 },

    /// A propagator sample breaks `|Gamma| <= 1` or `Gamma(0) = 1`.
    #[error("propagator violates {constraint}: offending value {value}")]
    UnphysicalPropagator {
        constraint: &'static str,
        value: f64,
    },

    /// Richardson error estimate of the ODE oracle exceeded tolerance.
    #[error("oracle error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    OracleTolerance { estimate: f64, tolerance: f64 },

    /// Amplitude norm grew during integration; the run is not trustworthy.
    #[error("oracle amplitude norm grew to {norm_sqr} (must stay <= 1)")]
    OracleNormGrowth { norm_sqr: f64 },

    /// `evolve` called with a propagator value of magnitude > 1.
    #[error("decoherence factor magnitude {0} exceeds 1")]
    NonContractive(f64),

    /// Null-result post-selection has probability ~0; the WMR branch never occurs.
    #[error("zero post-selection probability (C = {probability:e})")]
    ZeroPostSelection { probability: f64 },

    /// Weak-measurement strength outside `[0, 1]`.
    #[error("measurement strength {0} lies outside [0, 1]")]
    StrengthOutOfRange(f64),

    /// Measurement basis is not orthonormal to tolerance.
    #[error("basis not orthonormal: {detail} defect {defect:e}")]
    NotOrthonormal { detail: &'static str, defect: f64 },

    /// Overlap constants outside the admissible region.
    #[error("overlap constants out of domain: c = {c}, c_tilde = {c_tilde}")]
    OverlapDomain { c: f64, c_tilde: f64 },

    /// Malformed time grid (too few points, non-positive span or step, ...).
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
