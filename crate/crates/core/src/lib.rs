//! Exact reduced dynamics of a two-level atom coupled to a lossy cavity
//! inside a Lorentzian bosonic reservoir, and the observables built on it.
//!
//! The atomic state evolves through a single decoherence function `Gamma(t)`
//! obtained by inverse Laplace transform of a rational image. The crate
//! computes `Gamma` three independent ways (simple-pole residues, the
//! memoryless closed form, and a fixed-step RK4 integration of the amplitude
//! equations), then derives:
//!
//! * trace-distance non-Markovianity of the optimal state pair ([`nonmarkov`]),
//! * Shannon measurement entropies of `sigma_x` / `sigma_z` and the
//!   Deutsch / Maassen-Uffink / Coles-Piani bounds ([`uncertainty`]),
//! * state purity and joint time series ([`dynamics`]),
//! * the weak-measurement-reversal map ([`wmr`]).
//!
//! Everything is generic over the float type through [`Scalar`]; all times
//! are dimensionless (`omega * t`) and all rates enter as ratios to the
//! atom-cavity coupling `omega`.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod nonmarkov;
pub mod propagator;
pub mod scalar;
pub mod uncertainty;
pub mod wmr;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Re-exported so downstream crates use the same complex type.
pub use num_complex;

pub use dynamics::{evolve, optimal_pair_distance, time_series, Bounds, EvolutionRecord};
pub use model::{
    pure_state_from_angles, spectral_density, trace_distance, DensityMatrix2, ModelParams,
    PureStateAngles, Reservoir,
};
pub use nonmarkov::{
    classify, critical_coupling, non_markovianity, non_markovianity_from_curve, sigma_rate,
    Markovianity, NonMarkovResult,
};
pub use propagator::{
    denominator_roots, gamma_analytic, gamma_at, gamma_curve, gamma_memoryless,
    gamma_memoryless_curve, gamma_ode_oracle, laplace_image, oracle_trajectory, Method,
    OracleState, PropagatorCurve, RationalImage, RootSet, TimeGrid,
};
pub use uncertainty::{
    binary_entropy, bound_coles_piani, bound_deutsch, bound_maassen_uffink, entropic_sum_xz,
    measurement_entropy, overlap_constants, robertson_bound, ObservableBasis, ObservablePair,
};
pub use wmr::{apply_wmr, wmr_uncertainty_sweep, WmrStrength};

// Concrete aliases for the two supported precisions.

pub type ModelParams64 = ModelParams<f64>;
pub type DensityMatrix64 = DensityMatrix2<f64>;
pub type PureStateAngles64 = PureStateAngles<f64>;
pub type TimeGrid64 = TimeGrid<f64>;
pub type PropagatorCurve64 = PropagatorCurve<f64>;
pub type EvolutionRecord64 = EvolutionRecord<f64>;
pub type NonMarkovResult64 = NonMarkovResult<f64>;
pub type ObservablePair64 = ObservablePair<f64>;
pub type WmrStrength64 = WmrStrength<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type DensityMatrix32 = DensityMatrix2<f32>;
pub type PureStateAngles32 = PureStateAngles<f32>;
pub type TimeGrid32 = TimeGrid<f32>;
pub type PropagatorCurve32 = PropagatorCurve<f32>;
