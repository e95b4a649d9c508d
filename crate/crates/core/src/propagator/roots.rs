//! Roots of the cubic denominator of the Laplace image.
//!
//! Seeds come from the eigenvalues of the 3x3 companion matrix (robust where
//! Cardano-style formulas cancel, e.g. `theta * gamma >> omega^2`), computed
//! in double precision, then each root gets one Newton step in the working
//! precision. Conjugate symmetry is enforced afterwards so residue sums come
//! out real.

use nalgebra::Matrix3;
use num_complex::Complex;

use super::RationalImage;
use crate::error::Result;
use crate::model::ModelParams;
use crate::scalar::Scalar;

/// Pairwise relative separation below which roots count as degenerate and
/// simple-pole residues are not trusted.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Relative imaginary part below which a root is snapped onto the real axis.
const REAL_AXIS_TOL: f64 = 1e-9;

/// The three roots of `D(p) = 2p^3 + 2 gamma p^2 + (2 omega^2 + theta gamma) p
/// + 2 omega^2 gamma`, in the raw units of the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSet<T> {
    roots: [Complex<T>; 3],
    near_degenerate: bool,
}

impl<T: Scalar> RootSet<T> {
    pub fn roots(&self) -> [Complex<T>; 3] {
        self.roots
    }

    /// True when some pair of roots is closer than [`DEGENERACY_TOL`]
    /// relative to the root magnitudes.
    pub fn near_degenerate(&self) -> bool {
        self.near_degenerate
    }
}

/// Factor the denominator of the Laplace image for a Lorentzian reservoir.
pub fn denominator_roots<T: Scalar>(params: &ModelParams<T>) -> Result<RootSet<T>> {
    let image = RationalImage::from_params(params)?;
    let den = image.denominator();

    // Monic coefficients in f64 for the companion-matrix seed.
    let lead = den[3].to_f64_lossy();
    let a0 = den[0].to_f64_lossy() / lead;
    let a1 = den[1].to_f64_lossy() / lead;
    let a2 = den[2].to_f64_lossy() / lead;
    let companion = Matrix3::new(
        0.0, 0.0, -a0, //
        1.0, 0.0, -a1, //
        0.0, 1.0, -a2,
    );
    let eigen = companion.complex_eigenvalues();

    let mut roots: [Complex<T>; 3] = [Complex::new(T::zero(), T::zero()); 3];
    for (slot, ev) in roots.iter_mut().zip(eigen.iter()) {
        let mut p = Complex::new(T::from_f64(ev.re), T::from_f64(ev.im));
        // Newton-polish in the working precision. Stiff coefficient spreads
        // (theta*gamma >> omega^2) leave the eigenvalue seeds several digits
        // short, so iterate until the residual stops improving.
        let mut residual = image.denominator_at(p).norm();
        for _ in 0..4 {
            let dp = image.denominator_derivative_at(p);
            let slope = dp.norm();
            if slope.is_nan() || slope == T::zero() {
                break;
            }
            let candidate = p - image.denominator_at(p) / dp;
            let candidate_residual = image.denominator_at(candidate).norm();
            if candidate_residual >= residual {
                break;
            }
            p = candidate;
            residual = candidate_residual;
        }
        *slot = p;
    }

    let scale = roots
        .iter()
        .map(|p| p.norm())
        .fold(T::zero(), |a, b| a.max(b));

    symmetrize(&mut roots, scale);
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("roots are finite")
    });

    let mut min_sep = T::infinity();
    for i in 0..3 {
        for j in (i + 1)..3 {
            min_sep = min_sep.min((roots[i] - roots[j]).norm());
        }
    }
    let near_degenerate = min_sep < T::from_f64(DEGENERACY_TOL) * scale;

    #[cfg(debug_assertions)]
    for p in &roots {
        let residual = image.denominator_at(*p).norm();
        let term_scale = den[3].abs() * p.norm().powi(3)
            + den[2].abs() * p.norm().powi(2)
            + den[1].abs() * p.norm()
            + den[0].abs();
        debug_assert!(
            residual <= T::from_f64(1e-8) * term_scale.max(T::min_positive_value()),
            "root residual {residual:?} too large vs scale {term_scale:?}"
        );
    }

    Ok(RootSet {
        roots,
        near_degenerate,
    })
}

/// Snap roots onto the structure a real cubic must have: either three real
/// roots or one real root plus a conjugate pair.
fn symmetrize<T: Scalar>(roots: &mut [Complex<T>; 3], scale: T) {
    let real_tol = T::from_f64(REAL_AXIS_TOL) * scale;

    // The root with the smallest imaginary part is the guaranteed real one.
    let mut real_idx = 0;
    for i in 1..3 {
        if roots[i].im.abs() < roots[real_idx].im.abs() {
            real_idx = i;
        }
    }
    roots[real_idx].im = T::zero();

    let others: [usize; 2] = match real_idx {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    };
    let (i, j) = (others[0], others[1]);
    if roots[i].im.abs() <= real_tol && roots[j].im.abs() <= real_tol {
        roots[i].im = T::zero();
        roots[j].im = T::zero();
    } else {
        let half = T::from_f64(0.5);
        let mean = (roots[i] + roots[j].conj()) * half;
        roots[i] = mean;
        roots[j] = mean.conj();
    }
}
