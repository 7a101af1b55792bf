//! Seeded random generators for verification ensembles: symplectic matrices,
//! valid covariances, Gaussian states, and classical-quantum channels.
//!
//! Everything is driven by a counter-based RNG so a seed fully determines an
//! ensemble — failures in property suites reproduce exactly.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::GaussianChannel;
use crate::gaussian::GaussianState;
use crate::symplectic::{canonicalize_skew, SymplecticSpace};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Matrix with independent standard-normal entries.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| self.rng.sample(StandardNormal))
    }

    /// Haar-ish random symplectic matrix: a Gaussian matrix G is almost surely
    /// invertible, so Gᵗ·Δ·G is a nondegenerate skew form and canonicalizing
    /// it yields S with (G·S)ᵗ·Δ·(G·S) = Δ.
    pub fn symplectic(&mut self, space: &SymplecticSpace) -> DMatrix<f64> {
        let dim = space.dim();
        loop {
            let gauss = self.matrix(dim, dim);
            let form = gauss.transpose() * space.form() * &gauss;
            let skew = (&form - form.transpose()) * 0.5;
            if let Ok(s) = canonicalize_skew(&skew) {
                return gauss * s;
            }
            // Degenerate draw (measure zero): sample again.
        }
    }

    /// Valid covariance built from a random symplectic congruence of a
    /// diagonal of symplectic eigenvalues drawn from [1/2, nu_max].
    pub fn covariance(&mut self, space: &SymplecticSpace, nu_max: f64) -> DMatrix<f64> {
        assert!(nu_max >= 0.5, "symplectic eigenvalues live in [1/2, ∞)");
        let s = self.symplectic(space);
        let mut diag = DVector::zeros(space.dim());
        for mode in 0..space.modes() {
            let nu = self.rng.random_range(0.5..=nu_max);
            diag[2 * mode] = nu;
            diag[2 * mode + 1] = nu;
        }
        let cov = s.transpose() * DMatrix::from_diagonal(&diag) * &s;
        let t = cov.transpose();
        (cov + t) * 0.5
    }

    /// Pure covariance: all symplectic eigenvalues exactly 1/2.
    pub fn pure_covariance(&mut self, space: &SymplecticSpace) -> DMatrix<f64> {
        let s = self.symplectic(space);
        let cov = s.transpose() * &s * 0.5;
        let t = cov.transpose();
        (cov + t) * 0.5
    }

    /// Random Gaussian state with standard-normal mean displacements.
    pub fn state(&mut self, space: &SymplecticSpace, nu_max: f64) -> GaussianState {
        let mean = DVector::from_fn(space.dim(), |_, _| self.rng.sample(StandardNormal));
        let cov = self.covariance(space, nu_max);
        GaussianState::new(mean, cov, space.clone())
            .expect("sampled covariances satisfy the uncertainty relation")
    }

    /// Random classical-quantum channel from `s_a` to `s_b` modes: K = B·C
    /// with B a random isotropic frame (position-like columns of a random
    /// symplectic matrix) and C a random coefficient matrix, so KᵗΔK = 0 by
    /// construction. The noise is a random state covariance, pure when
    /// `pure_noise` is set (the minimal-noise case).
    pub fn cq_channel(&mut self, s_a: usize, s_b: usize, pure_noise: bool) -> GaussianChannel {
        assert!(s_a >= 1 && s_b >= 1);
        let input = SymplecticSpace::new(s_a);
        let output = SymplecticSpace::new(s_b);
        let max_rank = s_a.min(2 * s_b);
        let rank = self.rng.random_range(1..=max_rank);

        loop {
            let s = self.symplectic(&input);
            let frame_cols: Vec<DVector<f64>> =
                (0..rank).map(|i| s.column(2 * i).into_owned()).collect();
            let frame = DMatrix::from_columns(&frame_cols);
            let coeff = self.matrix(rank, output.dim());
            let k = &frame * coeff;
            let noise = if pure_noise {
                self.pure_covariance(&output)
            } else {
                self.covariance(&output, 3.0)
            };
            match GaussianChannel::new(k, noise, input.clone(), output.clone()) {
                Ok(channel) => return channel,
                // A wildly ill-conditioned draw can trip the validity check
                // at tolerance; resample rather than loosen the check.
                Err(_) => continue,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{is_symplectic, symplectic_eigenvalues};

    #[test]
    fn same_seed_reproduces_the_stream() {
        let mut a = Sampler::new(42);
        let mut b = Sampler::new(42);
        let space = SymplecticSpace::new(2);
        assert_eq!(a.matrix(3, 3), b.matrix(3, 3));
        assert_eq!(a.symplectic(&space), b.symplectic(&space));
        assert_eq!(a.covariance(&space, 2.0), b.covariance(&space, 2.0));
    }

    #[test]
    fn different_seeds_differ() {
        let mut a = Sampler::new(1);
        let mut b = Sampler::new(2);
        assert_ne!(a.matrix(2, 2), b.matrix(2, 2));
    }

    #[test]
    fn sampled_symplectics_satisfy_the_form() {
        let mut sampler = Sampler::new(7);
        for modes in 1..=4 {
            let space = SymplecticSpace::new(modes);
            for _ in 0..10 {
                let s = sampler.symplectic(&space);
                assert!(is_symplectic(&s, &space, &space, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn sampled_covariances_are_valid_states() {
        let mut sampler = Sampler::new(11);
        let space = SymplecticSpace::new(3);
        for _ in 0..10 {
            let state = sampler.state(&space, 4.0);
            for &nu in state.symplectic_eigenvalues() {
                assert!(nu >= 0.5 - 1e-9);
                assert!(nu <= 4.0 + 1e-6);
            }
        }
    }

    #[test]
    fn pure_covariances_sit_on_the_boundary() {
        let mut sampler = Sampler::new(13);
        let space = SymplecticSpace::new(2);
        for _ in 0..10 {
            let cov = sampler.pure_covariance(&space);
            let nus = symplectic_eigenvalues(&cov, &space).unwrap();
            for nu in nus {
                assert!((nu - 0.5).abs() <= 1e-9, "ν = {nu}");
            }
        }
    }

    #[test]
    fn sampled_channels_are_classical_quantum() {
        let mut sampler = Sampler::new(17);
        for trial in 0..20usize {
            let (s_a, s_b) = (1 + trial % 3, 1 + trial % 2);
            let ch = sampler.cq_channel(s_a, s_b, trial % 2 == 0);
            assert!(
                ch.is_cq(1e-9),
                "trial {trial}: residual {}",
                ch.cq_residual()
            );
            assert_eq!(ch.input().modes(), s_a);
            assert_eq!(ch.output().modes(), s_b);
            if trial % 2 == 0 {
                assert!(ch.minimal_dilation().unwrap().env_state().is_pure());
            }
        }
    }
}
