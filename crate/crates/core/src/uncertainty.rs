//! Shannon measurement entropies, overlap constants, and entropic
//! uncertainty bounds.
//!
//! For a measurement basis `{|psi_1>, |psi_2>}` the outcome distribution on a
//! state `rho` is `p_i = <psi_i|rho|psi_i>` and its Shannon entropy (base 2)
//! is the measurement entropy. The working observable pair is `sigma_x` /
//! `sigma_z`, whose entropic sum has lower bounds controlled by the largest
//! and second-largest squared overlap `(c, c_tilde)` between the eigenbases:
//!
//! * Deutsch:        `2 log2(2 / (1 + sqrt(c)))`
//! * Maassen-Uffink: `-log2 c`
//! * Coles-Piani:    `-log2 c + (1 - sqrt(c))/2 * log2(c / c_tilde)`
//!
//! `c_tilde` is the second-largest *distinct* overlap value; for qubit bases
//! that is `1 - c`, which coincides with `c` exactly in the mutually unbiased
//! case `c = 1/2` (the only case where the multiset reading would differ).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::DensityMatrix2;
use crate::scalar::Scalar;

/// Tolerance for orthonormality checks and overlap-domain comparisons.
const BASIS_TOL: f64 = 1e-12;

/// An orthonormal qubit measurement basis (two eigenstates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableBasis<T> {
    states: [[Complex<T>; 2]; 2],
}

impl<T: Scalar> ObservableBasis<T> {
    /// Build from two state vectors given as amplitudes on `|e>`, `|g>`.
    pub fn from_states(psi1: [Complex<T>; 2], psi2: [Complex<T>; 2]) -> Result<Self> {
        let tol = T::from_f64(BASIS_TOL);
        for psi in [&psi1, &psi2] {
            let norm = psi[0].norm_sqr() + psi[1].norm_sqr();
            if (norm - T::one()).abs() > tol {
                return Err(Error::NotOrthonormal {
                    detail: "state norm",
                    defect: (norm - T::one()).abs().to_f64_lossy(),
                });
            }
        }
        let overlap = psi1[0].conj() * psi2[0] + psi1[1].conj() * psi2[1];
        if overlap.norm() > tol {
            return Err(Error::NotOrthonormal {
                detail: "cross overlap",
                defect: overlap.norm().to_f64_lossy(),
            });
        }
        Ok(Self {
            states: [psi1, psi2],
        })
    }

    /// Eigenbasis of `sigma_z`: `{|e>, |g>}`.
    pub fn pauli_z() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        Self {
            states: [[one, zero], [zero, one]],
        }
    }

    /// Eigenbasis of `sigma_x`: `{|+>, |->}`.
    pub fn pauli_x() -> Self {
        let r = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
        Self {
            states: [[r, r], [r, -r]],
        }
    }

    /// Eigenbasis of `sigma_y`.
    pub fn pauli_y() -> Self {
        let r = T::FRAC_1_SQRT_2();
        let re = Complex::new(r, T::zero());
        let im = Complex::new(T::zero(), r);
        Self {
            states: [[re, im], [re, -im]],
        }
    }

    /// Eigenbasis of the spin component along the Bloch direction
    /// `(polar, azimuth)`.
    pub fn bloch(polar: T, azimuth: T) -> Self {
        let half = T::from_f64(0.5);
        let c = (polar * half).cos();
        let s = (polar * half).sin();
        let phase = Complex::from_polar(T::one(), azimuth);
        let psi1 = [Complex::new(c, T::zero()), phase * s];
        let psi2 = [Complex::new(-s, T::zero()), phase * c];
        Self {
            states: [psi1, psi2],
        }
    }

    pub fn state(&self, i: usize) -> [Complex<T>; 2] {
        self.states[i]
    }

    fn outcome_probability(&self, i: usize, rho: &DensityMatrix2<T>) -> T {
        let [a, b] = self.states[i];
        let cross = (a.conj() * rho.eg() * b).re;
        a.norm_sqr() * rho.ee() + b.norm_sqr() * rho.gg() + T::from_f64(2.0) * cross
    }
}

/// Two measurement bases with their derived overlap constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservablePair<T> {
    first: ObservableBasis<T>,
    second: ObservableBasis<T>,
    c: T,
    c_tilde: T,
}

impl<T: Scalar> ObservablePair<T> {
    pub fn new(first: ObservableBasis<T>, second: ObservableBasis<T>) -> Self {
        let (c, c_tilde) = overlap_constants(&first, &second);
        Self {
            first,
            second,
            c,
            c_tilde,
        }
    }

    /// The `sigma_x` / `sigma_z` pair with its exact overlap constants
    /// `c = c_tilde = 1/2` (mutually unbiased bases).
    pub fn pauli_xz() -> Self {
        let half = T::from_f64(0.5);
        Self {
            first: ObservableBasis::pauli_x(),
            second: ObservableBasis::pauli_z(),
            c: half,
            c_tilde: half,
        }
    }

    pub fn first(&self) -> &ObservableBasis<T> {
        &self.first
    }

    pub fn second(&self) -> &ObservableBasis<T> {
        &self.second
    }

    /// Largest squared overlap between the two eigenbases.
    pub fn c(&self) -> T {
        self.c
    }

    /// Second-largest distinct squared overlap.
    pub fn c_tilde(&self) -> T {
        self.c_tilde
    }
}

/// `(c, c_tilde)`: largest and second-largest distinct values of
/// `|<psi_i|phi_j>|^2`. When all four overlaps coincide (`c = 1/2`) there is
/// no second distinct value and `c_tilde = c`.
pub fn overlap_constants<T: Scalar>(
    first: &ObservableBasis<T>,
    second: &ObservableBasis<T>,
) -> (T, T) {
    let mut overlaps = [T::zero(); 4];
    let mut k = 0;
    for i in 0..2 {
        for j in 0..2 {
            let a = first.state(i);
            let b = second.state(j);
            overlaps[k] = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr();
            k += 1;
        }
    }
    let c = overlaps.iter().fold(T::zero(), |m, &v| m.max(v));
    let tol = T::from_f64(BASIS_TOL);
    let second_distinct = overlaps
        .iter()
        .filter(|&&v| v < c - tol)
        .fold(T::neg_infinity(), |m, &v| m.max(v));
    let c_tilde = if second_distinct.is_finite() {
        second_distinct
    } else {
        c
    };
    (c, c_tilde)
}

/// Binary Shannon entropy in bits, with `0 log 0 = 0` and the argument
/// clamped onto `[0, 1]` (float drift near deterministic outcomes).
pub fn binary_entropy<T: Scalar>(p: T) -> T {
    debug_assert!(
        p > -T::from_f64(1e-15) && p < T::one() + T::from_f64(1e-15),
        "probability {p} far outside [0, 1]"
    );
    let p = p.max(T::zero()).min(T::one());
    if p == T::zero() || p == T::one() {
        return T::zero();
    }
    let q = T::one() - p;
    -(p * p.log2() + q * q.log2())
}

/// Shannon entropy of the outcome distribution of `basis` on `rho`.
pub fn measurement_entropy<T: Scalar>(rho: &DensityMatrix2<T>, basis: &ObservableBasis<T>) -> T {
    binary_entropy(basis.outcome_probability(0, rho))
}

/// Entropic sum `S(sigma_x) + S(sigma_z)` with
/// `p(+z) = ee` and `p(+x) = 1/2 + Re(eg)`.
pub fn entropic_sum_xz<T: Scalar>(rho: &DensityMatrix2<T>) -> T {
    let half = T::from_f64(0.5);
    binary_entropy(rho.ee()) + binary_entropy(half + rho.eg().re)
}

fn check_c<T: Scalar>(c: T) -> Result<()> {
    let tol = T::from_f64(BASIS_TOL);
    if c < T::from_f64(0.5) - tol || c > T::one() + tol {
        return Err(Error::OverlapDomain {
            c: c.to_f64_lossy(),
            c_tilde: f64::NAN,
        });
    }
    Ok(())
}

/// Deutsch bound `2 log2(2 / (1 + sqrt(c)))`.
pub fn bound_deutsch<T: Scalar>(c: T) -> Result<T> {
    check_c(c)?;
    let two = T::from_f64(2.0);
    Ok(two * (two / (T::one() + c.sqrt())).log2())
}

/// Maassen-Uffink bound `-log2 c`.
pub fn bound_maassen_uffink<T: Scalar>(c: T) -> Result<T> {
    check_c(c)?;
    Ok(-c.log2())
}

/// Coles-Piani bound `-log2 c + (1 - sqrt(c))/2 * log2(c / c_tilde)`.
///
/// At `c_tilde = 0` the correction's prefactor vanishes only for `c = 1`,
/// where the bound degenerates to the Maassen-Uffink value 0; any other
/// `c_tilde = 0` is outside the domain.
pub fn bound_coles_piani<T: Scalar>(c: T, c_tilde: T) -> Result<T> {
    check_c(c)?;
    let tol = T::from_f64(BASIS_TOL);
    if c_tilde < -tol || c_tilde > c + tol {
        return Err(Error::OverlapDomain {
            c: c.to_f64_lossy(),
            c_tilde: c_tilde.to_f64_lossy(),
        });
    }
    if c_tilde <= T::zero() {
        if c >= T::one() - tol {
            return Ok(T::zero());
        }
        return Err(Error::OverlapDomain {
            c: c.to_f64_lossy(),
            c_tilde: c_tilde.to_f64_lossy(),
        });
    }
    let half = T::from_f64(0.5);
    Ok(-c.log2() + (T::one() - c.sqrt()) * half * (c / c_tilde).log2())
}

/// Robertson's state-dependent bound for the `sigma_x` / `sigma_z` pair:
/// `(1/2)|<[sigma_x, sigma_z]>| = |<sigma_y>| = |2 Im(eg)|`.
pub fn robertson_bound<T: Scalar>(rho: &DensityMatrix2<T>) -> T {
    (T::from_f64(2.0) * rho.eg().im).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{pure_state_from_angles, PureStateAngles};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn c64(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn measurement_entropy_examples() {
        let excited = DensityMatrix2::<f64>::excited();
        assert_eq!(
            measurement_entropy(&excited, &ObservableBasis::pauli_z()),
            0.0
        );
        assert_relative_eq!(
            measurement_entropy(&excited, &ObservableBasis::pauli_x()),
            1.0,
            max_relative = 1e-12
        );
        let mixed = DensityMatrix2::<f64>::maximally_mixed();
        for basis in [
            ObservableBasis::pauli_x(),
            ObservableBasis::pauli_y(),
            ObservableBasis::pauli_z(),
            ObservableBasis::bloch(1.1, 2.2),
        ] {
            assert_relative_eq!(
                measurement_entropy(&mixed, &basis),
                1.0,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn entropic_sum_examples() {
        assert_eq!(entropic_sum_xz(&DensityMatrix2::<f64>::ground()), 1.0);
        assert_eq!(
            entropic_sum_xz(&DensityMatrix2::<f64>::maximally_mixed()),
            2.0
        );
        assert_eq!(entropic_sum_xz(&DensityMatrix2::<f64>::plus_x()), 1.0);
    }

    #[test]
    fn entropic_sum_matches_basis_route() {
        let rho = pure_state_from_angles(&PureStateAngles::new(FRAC_PI_3, PI / 6.0));
        let via_bases = measurement_entropy(&rho, &ObservableBasis::pauli_x())
            + measurement_entropy(&rho, &ObservableBasis::pauli_z());
        assert_abs_diff_eq!(entropic_sum_xz(&rho), via_bases, epsilon = 1e-12);
    }

    #[test]
    fn overlap_constant_examples() {
        let (c, ct) = overlap_constants(
            &ObservableBasis::<f64>::pauli_x(),
            &ObservableBasis::pauli_z(),
        );
        assert_abs_diff_eq!(c, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ct, 0.5, epsilon = 1e-15);

        let z = ObservableBasis::<f64>::pauli_z();
        let (c, ct) = overlap_constants(&z, &z);
        assert_eq!((c, ct), (1.0, 0.0));

        // bases at Bloch angle 60 degrees: c = cos^2(30 deg) = 3/4
        let rotated = ObservableBasis::bloch(PI / 3.0, 0.0);
        let (c, ct) = overlap_constants(&z, &rotated);
        assert_relative_eq!(c, 0.75, max_relative = 1e-12);
        assert_relative_eq!(ct, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn pair_invariants() {
        let pair = ObservablePair::<f64>::pauli_xz();
        assert_eq!(pair.c(), 0.5);
        assert_eq!(pair.c_tilde(), 0.5);
        for k in 0..20 {
            let angle = FRAC_PI_2 * k as f64 / 19.0;
            let pair = ObservablePair::new(
                ObservableBasis::pauli_z(),
                ObservableBasis::bloch(angle, 0.4),
            );
            assert!(pair.c() >= 0.5 - 1e-12 && pair.c() <= 1.0 + 1e-12);
            assert!(pair.c() >= pair.c_tilde());
            // for qubit bases c_tilde = 1 - c (coincides with c at 1/2)
            assert_abs_diff_eq!(pair.c_tilde(), 1.0 - pair.c(), epsilon = 1e-9);
        }
    }

    #[test]
    fn basis_validation() {
        let bad = ObservableBasis::from_states(
            [c64(1.0, 0.0), c64(0.1, 0.0)],
            [c64(0.0, 0.0), c64(1.0, 0.0)],
        );
        assert!(matches!(bad, Err(Error::NotOrthonormal { .. })));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let ok =
            ObservableBasis::from_states([c64(r, 0.0), c64(0.0, r)], [c64(r, 0.0), c64(0.0, -r)]);
        assert!(ok.is_ok());
    }

    #[test]
    fn bound_values_at_half() {
        assert_eq!(bound_maassen_uffink(0.5f64).unwrap(), 1.0);
        assert_eq!(bound_coles_piani(0.5f64, 0.5).unwrap(), 1.0);
        // independently computed high-precision value of 2 log2(2/(1+sqrt(1/2)))
        assert_abs_diff_eq!(
            bound_deutsch(0.5f64).unwrap(),
            0.456_893_393_672_776_05,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bound_values_at_one() {
        assert_eq!(bound_deutsch(1.0f64).unwrap(), 0.0);
        assert_eq!(bound_maassen_uffink(1.0f64).unwrap(), 0.0);
        assert_eq!(bound_coles_piani(1.0f64, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bound_domain_errors() {
        assert!(bound_deutsch(0.3f64).is_err());
        assert!(bound_maassen_uffink(1.2f64).is_err());
        assert!(bound_coles_piani(0.7f64, 0.0).is_err());
        assert!(bound_coles_piani(0.7f64, 0.8).is_err());
    }

    #[test]
    fn bound_ordering() {
        for k in 0..=100 {
            let c = 0.5 + 0.5 * k as f64 / 100.0;
            let ct = 1.0 - c;
            let d = bound_deutsch(c).unwrap();
            let mu = bound_maassen_uffink(c).unwrap();
            let cp = if ct > 0.0 {
                bound_coles_piani(c, ct).unwrap()
            } else {
                bound_coles_piani(c, 0.0).unwrap()
            };
            assert!(cp >= mu - 1e-12, "CP {cp} < MU {mu} at c = {c}");
            assert!(mu >= d - 1e-12, "MU {mu} < Deutsch {d} at c = {c}");
        }
    }

    #[test]
    fn robertson_examples() {
        assert_eq!(
            robertson_bound(&DensityMatrix2::<f64>::maximally_mixed()),
            0.0
        );
        assert_eq!(robertson_bound(&DensityMatrix2::<f64>::excited()), 0.0);
        let y_up = DensityMatrix2::new(0.5, c64(0.0, -0.5)).unwrap();
        assert_eq!(robertson_bound(&y_up), 1.0);
        let y_down = DensityMatrix2::new(0.5, c64(0.0, 0.5)).unwrap();
        assert_eq!(robertson_bound(&y_down), 1.0);
    }

    #[test]
    fn phi_symmetry_about_half_pi() {
        // Re(eg) flips sign under phi -> pi - phi about pi/2; entropies agree
        for i in 0..20 {
            let th = FRAC_PI_2 * i as f64 / 19.0;
            for j in 0..20 {
                let delta = FRAC_PI_2 * j as f64 / 19.0;
                let hi = pure_state_from_angles(&PureStateAngles::new(th, FRAC_PI_2 + delta));
                let lo = pure_state_from_angles(&PureStateAngles::new(th, FRAC_PI_2 - delta));
                assert_abs_diff_eq!(entropic_sum_xz(&hi), entropic_sum_xz(&lo), epsilon = 1e-12);
            }
        }
    }

    fn arb_state() -> impl Strategy<Value = DensityMatrix2<f64>> {
        (0.0..=1.0f64, 0.0..=1.0f64, 0.0..(2.0 * PI)).prop_map(|(ee, r, ph)| {
            let eg = Complex::from_polar(r * (ee * (1.0 - ee)).sqrt(), ph);
            DensityMatrix2::new(ee, eg).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eur_never_violated(rho in arb_state()) {
            // mutually unbiased pair: the entropic sum sits above 1
            prop_assert!(entropic_sum_xz(&rho) >= 1.0 - 1e-9);
        }

        #[test]
        fn entropies_in_range(rho in arb_state()) {
            let s = measurement_entropy(&rho, &ObservableBasis::bloch(1.0, 0.5));
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }
}
