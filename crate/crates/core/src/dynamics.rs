//! Map the decoherence function onto the atomic state and produce joint time
//! series of every observable of interest.
//!
//! The reduced dynamics is `ee(t) = ee(0) Gamma^2`, `eg(t) = eg(0) Gamma`,
//! so one propagator value per grid point feeds the state, the trace
//! distance of the optimal pair (`D = |Gamma|`), the purity, and the
//! entropic sum.

use crate::error::{Error, Result};
use crate::model::{pure_state_from_angles, DensityMatrix2, ModelParams, PureStateAngles};
use crate::propagator::{gamma_curve, TimeGrid};
use crate::scalar::Scalar;
use crate::uncertainty::{bound_coles_piani, bound_deutsch, bound_maassen_uffink, entropic_sum_xz};

/// Slack on `|Gamma| <= 1` accepted by [`evolve`].
pub const GAMMA_TOL: f64 = 1e-9;

/// The three state-independent lower bounds for a measurement pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    pub deutsch: T,
    pub maassen_uffink: T,
    pub coles_piani: T,
}

impl<T: Scalar> Bounds<T> {
    /// Bounds of the `sigma_x` / `sigma_z` pair (`c = c_tilde = 1/2`).
    pub fn pauli_xz() -> Self {
        let half = T::from_f64(0.5);
        Self {
            deutsch: bound_deutsch(half).expect("1/2 is in the domain"),
            maassen_uffink: bound_maassen_uffink(half).expect("1/2 is in the domain"),
            coles_piani: bound_coles_piani(half, half).expect("1/2 is in the domain"),
        }
    }
}

/// One row of a joint time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRecord<T> {
    /// Dimensionless time `omega * t`.
    pub t: T,
    /// Decoherence function at `t`.
    pub gamma: T,
    /// Evolved atomic state.
    pub rho: DensityMatrix2<T>,
    /// Trace distance of the evolved optimal pair, `|Gamma|`.
    pub trace_distance: T,
    /// Purity of `rho`.
    pub purity: T,
    /// Entropic sum `S(sigma_x) + S(sigma_z)` of `rho`.
    pub entropic_sum: T,
    /// State-independent lower bounds of the measurement pair.
    pub bounds: Bounds<T>,
}

/// Apply one decoherence factor: `ee -> ee Gamma^2`, `eg -> eg Gamma`.
///
/// Rejects `|Gamma| > 1 + 1e-9`; within the tolerance band the factor is
/// clamped onto `[-1, 1]`, which keeps positivity exact.
pub fn evolve<T: Scalar>(rho0: &DensityMatrix2<T>, gamma_value: T) -> Result<DensityMatrix2<T>> {
    if gamma_value.is_nan() || gamma_value.abs() > T::one() + T::from_f64(GAMMA_TOL) {
        return Err(Error::NonContractive(gamma_value.to_f64_lossy()));
    }
    let g = gamma_value.max(-T::one()).min(T::one());
    DensityMatrix2::new(rho0.ee() * g * g, rho0.eg() * g)
}

/// Trace distance between the evolved `|+>` / `|->` pair: `|Gamma|`.
pub fn optimal_pair_distance<T: Scalar>(gamma_value: T) -> T {
    debug_assert!(gamma_value.abs() <= T::one() + T::from_f64(GAMMA_TOL));
    gamma_value.abs()
}

/// Joint time series of `Gamma`, the optimal-pair trace distance, purity,
/// and the entropic sum, on a uniform grid of `n_points` up to `t_max`.
pub fn time_series<T: Scalar>(
    params: &ModelParams<T>,
    angles: &PureStateAngles<T>,
    t_max: T,
    n_points: usize,
) -> Result<Vec<EvolutionRecord<T>>> {
    let grid = TimeGrid::new(t_max, n_points)?;
    let curve = gamma_curve(&grid, params)?;
    let rho0 = pure_state_from_angles(angles);
    let bounds = Bounds::pauli_xz();
    curve
        .iter()
        .map(|(t, g)| {
            let rho = evolve(&rho0, g)?;
            Ok(EvolutionRecord {
                t,
                gamma: g,
                rho,
                trace_distance: optimal_pair_distance(g),
                purity: rho.purity(),
                entropic_sum: entropic_sum_xz(&rho),
                bounds,
            })
        })
        .collect()
}
