//! Gaussian states at the level of first and second moments, and their
//! von Neumann entropies (in nats, with ħ = 1 and vacuum covariance I/2).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::symplectic::{
    self, hermitian_min_eigenvalue, max_abs, symplectic_eigenvalues, SymplecticSpace,
};
use crate::{DEFAULT_TOL, PURITY_TOL};

#[derive(Debug, Error)]
pub enum StateError {
    #[error(
        "covariance violates the uncertainty relation: \
         min eigenvalue of α + iΔ/2 is {0:.3e}"
    )]
    UncertaintyViolation(f64),
    #[error("covariance is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("g(x) needs x ≥ 0, got {0}")]
    NegativeArgument(f64),
    #[error(transparent)]
    Symplectic(#[from] symplectic::SymplecticError),
}

pub type Result<T> = std::result::Result<T, StateError>;

/// Mean-excitation entropy g(x) = (x + 1)·ln(x + 1) − x·ln(x), with g(0) = 0.
///
/// Evaluated as ln_1p(x) + x·ln_1p(1/x), which is the same function but does
/// not cancel catastrophically for large x (the textbook difference loses all
/// precision once x ≳ 1e15). Slightly negative inputs within the default
/// tolerance are treated as 0; anything lower is a domain error.
pub fn g(x: f64) -> Result<f64> {
    if x < -DEFAULT_TOL {
        return Err(StateError::NegativeArgument(x));
    }
    Ok(g_nonneg(x))
}

/// `g` for arguments already known to be ≥ 0 up to roundoff.
pub(crate) fn g_nonneg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.ln_1p() + x * (1.0 / x).ln_1p()
    }
}

fn entropy_from_nus(nus: &[f64]) -> f64 {
    nus.iter().map(|&nu| g_nonneg(nu - 0.5)).sum()
}

/// Entropy of the Gaussian state with covariance `cov`:
/// S = Σⱼ g(νⱼ − 1/2) over the symplectic eigenvalues νⱼ.
///
/// Only the eigenvalue pairing is validated here; use [`GaussianState`] when
/// the full uncertainty relation should be enforced.
pub fn entropy_of_covariance(cov: &DMatrix<f64>, space: &SymplecticSpace) -> Result<f64> {
    let nus = symplectic_eigenvalues(cov, space)?;
    Ok(entropy_from_nus(&nus))
}

/// A Gaussian state: mean vector, covariance matrix, and the phase space they
/// live on. Construction validates symmetry and the uncertainty relation
/// α + iΔ/2 ⪰ 0; the symplectic eigenvalues are computed once and cached.
#[derive(Debug, Clone)]
pub struct GaussianState {
    space: SymplecticSpace,
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    nus: Vec<f64>,
}

impl GaussianState {
    pub fn new(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        space: SymplecticSpace,
    ) -> Result<Self> {
        Self::with_tol(mean, covariance, space, DEFAULT_TOL)
    }

    /// As [`GaussianState::new`] with an explicit tolerance on the minimum
    /// eigenvalue of α + iΔ/2.
    pub fn with_tol(
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        space: SymplecticSpace,
        tol: f64,
    ) -> Result<Self> {
        let dim = space.dim();
        if mean.len() != dim {
            return Err(StateError::DimensionMismatch {
                expected: dim,
                got: mean.len(),
            });
        }
        if covariance.nrows() != dim || covariance.ncols() != dim {
            return Err(StateError::DimensionMismatch {
                expected: dim,
                got: covariance.nrows().max(covariance.ncols()),
            });
        }
        let asym = max_abs(&(&covariance - covariance.transpose()));
        if asym > DEFAULT_TOL * max_abs(&covariance).max(1.0) {
            return Err(StateError::NotSymmetric(asym));
        }
        let min_eig = hermitian_min_eigenvalue(&covariance, &(space.form() * 0.5));
        if min_eig < -tol {
            return Err(StateError::UncertaintyViolation(min_eig));
        }
        let nus = symplectic_eigenvalues(&covariance, &space)?;
        Ok(Self {
            space,
            mean,
            covariance,
            nus,
        })
    }

    /// Vacuum: zero mean, covariance I/2.
    pub fn vacuum(space: SymplecticSpace) -> Self {
        let dim = space.dim();
        Self {
            mean: DVector::zeros(dim),
            covariance: DMatrix::identity(dim, dim) * 0.5,
            nus: vec![0.5; space.modes()],
            space,
        }
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// Cached symplectic eigenvalues, sorted descending.
    pub fn symplectic_eigenvalues(&self) -> &[f64] {
        &self.nus
    }

    /// Von Neumann entropy S = Σⱼ g(νⱼ − 1/2), in nats.
    pub fn entropy(&self) -> f64 {
        entropy_from_nus(&self.nus)
    }

    /// Whether every symplectic eigenvalue sits at the vacuum value 1/2.
    pub fn is_pure(&self) -> bool {
        self.nus.iter().all(|&nu| (nu - 0.5).abs() <= PURITY_TOL)
    }

    /// Same state shifted in phase space: only the mean changes, so the
    /// spectrum, entropy, and purity are untouched.
    pub fn displace(&self, shift: &DVector<f64>) -> Result<Self> {
        if shift.len() != self.space.dim() {
            return Err(StateError::DimensionMismatch {
                expected: self.space.dim(),
                got: shift.len(),
            });
        }
        Ok(Self {
            space: self.space.clone(),
            mean: &self.mean + shift,
            covariance: self.covariance.clone(),
            nus: self.nus.clone(),
        })
    }
}

#[cfg(test)]
// Reference values are written with every digit of the computation that
// produced them; the compiler rounds to the nearest f64.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn g_at_zero_and_negative_clamp() {
        assert_eq!(g(0.0).unwrap(), 0.0);
        assert_eq!(g(-1e-12).unwrap(), 0.0);
        assert!(matches!(g(-1.0), Err(StateError::NegativeArgument(_))));
    }

    #[test]
    fn g_matches_closed_values() {
        assert_relative_eq!(g(1.0).unwrap(), 2.0 * LN2, max_relative = 1e-15);
        assert_relative_eq!(
            g(2.0).unwrap(),
            1.90954250488443845535,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            g(1000.0).unwrap(),
            7.90825511239875375203,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            g(0.5).unwrap(),
            0.954771252442219227676,
            max_relative = 1e-14
        );
    }

    #[test]
    fn g_approaches_log_plus_one() {
        let x = 1000.0;
        assert!((g(x).unwrap() - (x.ln() + 1.0)).abs() <= 1e-3);
        // The stable form keeps full precision far beyond the naive range.
        let huge = 1e200;
        assert_relative_eq!(g(huge).unwrap(), huge.ln() + 1.0, max_relative = 1e-15);
    }

    #[test]
    fn g_is_increasing_and_concave() {
        let xs: Vec<f64> = (0..200).map(|i| 1e-3 * 1.1_f64.powi(i)).collect();
        for w in xs.windows(3) {
            let (a, b, c) = (g(w[0]).unwrap(), g(w[1]).unwrap(), g(w[2]).unwrap());
            assert!(b > a);
            // Concavity on a geometric grid: midpoint value beats the chord.
            let chord = a + (c - a) * (w[1] - w[0]) / (w[2] - w[0]);
            assert!(b >= chord);
        }
    }

    #[test]
    fn vacuum_is_pure_with_zero_entropy() {
        let state = GaussianState::vacuum(SymplecticSpace::new(3));
        assert!(state.is_pure());
        assert_eq!(state.entropy(), 0.0);
        assert_eq!(state.symplectic_eigenvalues(), &[0.5, 0.5, 0.5]);
    }

    #[test]
    fn thermal_state_entropy_is_g_of_occupation() {
        let space = SymplecticSpace::new(1);
        for n in [0.5, 1.0, 4.0] {
            let cov = DMatrix::identity(2, 2) * (n + 0.5);
            let state = GaussianState::new(DVector::zeros(2), cov, space.clone()).unwrap();
            assert_relative_eq!(state.entropy(), g(n).unwrap(), max_relative = 1e-12);
            assert!(!state.is_pure());
        }
    }

    #[test]
    fn squeezed_state_is_pure() {
        let space = SymplecticSpace::new(1);
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0 / 16.0]));
        let state = GaussianState::new(DVector::zeros(2), cov, space).unwrap();
        assert!(state.is_pure());
        assert!(state.entropy().abs() <= 1e-12);
    }

    #[test]
    fn correlated_two_mode_entropy_matches_closed_form() {
        // Covariance with symplectic spectrum {√(E·Ẽ₁) ± E/2} at E = E₁ = 1.
        let (e, e1) = (1.0, 1.0);
        let et = e1 + 0.5 + e / 4.0;
        let cov = DMatrix::from_row_slice(
            4,
            4,
            &[
                e,
                0.0,
                0.0,
                e / 2.0,
                0.0,
                et,
                -e / 2.0,
                0.0,
                0.0,
                -e / 2.0,
                e,
                0.0,
                e / 2.0,
                0.0,
                0.0,
                et,
            ],
        );
        let space = SymplecticSpace::new(2);
        let s = entropy_of_covariance(&cov, &space).unwrap();
        assert_relative_eq!(s, 2.32274041829048293516, max_relative = 1e-10);
    }

    #[test]
    fn below_vacuum_covariance_is_rejected() {
        let space = SymplecticSpace::new(1);
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.1]));
        let err = GaussianState::new(DVector::zeros(2), cov, space).unwrap_err();
        assert!(matches!(err, StateError::UncertaintyViolation(_)));
    }

    #[test]
    fn asymmetric_covariance_is_rejected() {
        let space = SymplecticSpace::new(1);
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.3, 1.0]);
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), cov, space),
            Err(StateError::NotSymmetric(_))
        ));
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let space = SymplecticSpace::new(2);
        let cov = DMatrix::identity(2, 2);
        assert!(matches!(
            GaussianState::new(DVector::zeros(4), cov, space.clone()),
            Err(StateError::DimensionMismatch {
                expected: 4,
                got: 2
            })
        ));
        let cov4 = DMatrix::identity(4, 4);
        assert!(matches!(
            GaussianState::new(DVector::zeros(2), cov4, space),
            Err(StateError::DimensionMismatch {
                expected: 4,
                got: 2
            })
        ));
    }

    #[test]
    fn displacement_preserves_spectrum() {
        let space = SymplecticSpace::new(1);
        let cov = DMatrix::identity(2, 2) * 1.5;
        let state = GaussianState::new(DVector::zeros(2), cov, space).unwrap();
        let shifted = state.displace(&DVector::from_vec(vec![3.0, -2.0])).unwrap();
        assert_eq!(shifted.mean(), &DVector::from_vec(vec![3.0, -2.0]));
        assert_eq!(shifted.entropy(), state.entropy());
        assert_eq!(
            shifted.symplectic_eigenvalues(),
            state.symplectic_eigenvalues()
        );
        assert!(matches!(
            state.displace(&DVector::zeros(4)),
            Err(StateError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn validity_boundary_matches_symplectic_spectrum() {
        // ν ≥ 1/2 for every mode iff α + iΔ/2 ⪰ 0: cross-check the Hermitian
        // test against explicitly constructed spectra.
        let mut sampler = crate::sample::Sampler::new(0xd1ce);
        let space = SymplecticSpace::new(2);
        for _ in 0..20 {
            let good = sampler.covariance(&space, 2.5);
            assert!(GaussianState::new(DVector::zeros(4), good, space.clone()).is_ok());
        }
        for _ in 0..20 {
            let s = sampler.symplectic(&space);
            let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.45, 0.45, 0.8, 0.8]));
            let bad = s.transpose() * d * &s;
            let sym = (&bad + bad.transpose()) * 0.5;
            assert!(matches!(
                GaussianState::new(DVector::zeros(4), sym, space.clone()),
                Err(StateError::UncertaintyViolation(_))
            ));
        }
    }

    proptest::proptest! {
        #[test]
        fn g_stays_finite_and_monotone(x in 0.0_f64..1e6, dx in 1e-6_f64..10.0) {
            let a = g(x).unwrap();
            let b = g(x + dx).unwrap();
            proptest::prop_assert!(a.is_finite() && b.is_finite());
            proptest::prop_assert!(b > a);
        }
    }
}
