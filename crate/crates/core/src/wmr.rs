//! Weak-measurement reversal: the null-result, partially collapsing map.
//!
//! With strength `m` the map sends `ee -> (1-m) ee / C`,
//! `eg -> sqrt(1-m) eg / C`, `gg -> gg / C`, where `C = (1-m) ee + gg` is the
//! post-selection probability. The trace stays 1 by construction and
//! positivity is preserved exactly: `|eg'|^2 = ee' gg'` scales both sides of
//! the constraint alike. Strengths compose through survival probabilities,
//! `(1-m_1)(1-m_2) = 1 - m_12`.

use crate::error::{Error, Result};
use crate::model::{pure_state_from_angles, DensityMatrix2, ModelParams, PureStateAngles};
use crate::propagator::gamma_at;
use crate::scalar::Scalar;
use crate::uncertainty::entropic_sum_xz;

/// Post-selection probabilities at or below this are treated as zero.
pub const MIN_POST_SELECTION: f64 = 1e-15;

/// Measurement strength in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WmrStrength<T>(T);

impl<T: Scalar> WmrStrength<T> {
    pub fn new(m: T) -> Result<Self> {
        let tol = T::from_f64(1e-12);
        if !m.is_finite() || m < -tol || m > T::one() + tol {
            return Err(Error::StrengthOutOfRange(m.to_f64_lossy()));
        }
        Ok(Self(m.max(T::zero()).min(T::one())))
    }

    pub fn value(&self) -> T {
        self.0
    }
}

/// Apply the null-result reversal map.
///
/// Fails with [`Error::ZeroPostSelection`] when `C <= 1e-15`, which only
/// happens for the fully excited state at `m = 1`: there the null-result
/// branch never occurs.
pub fn apply_wmr<T: Scalar>(
    rho: &DensityMatrix2<T>,
    strength: WmrStrength<T>,
) -> Result<DensityMatrix2<T>> {
    let survival = T::one() - strength.value();
    let c = survival * rho.ee() + rho.gg();
    if c <= T::from_f64(MIN_POST_SELECTION) {
        return Err(Error::ZeroPostSelection {
            probability: c.to_f64_lossy(),
        });
    }
    DensityMatrix2::new(survival * rho.ee() / c, rho.eg() * (survival.sqrt() / c))
}

/// Entropic sum after evolving to dimensionless time `t` and reversing with
/// each strength of `m_grid`. Returns `(m, S_xz)` pairs in input order.
pub fn wmr_uncertainty_sweep<T: Scalar>(
    params: &ModelParams<T>,
    angles: &PureStateAngles<T>,
    t: T,
    m_grid: &[T],
) -> Result<Vec<(T, T)>> {
    let gamma = gamma_at(t, params)?;
    let evolved = crate::dynamics::evolve(&pure_state_from_angles(angles), gamma)?;
    m_grid
        .iter()
        .map(|&m| {
            let reversed = apply_wmr(&evolved, WmrStrength::new(m)?)?;
            Ok((m, entropic_sum_xz(&reversed)))
        })
        .collect()
}
