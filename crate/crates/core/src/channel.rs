//! Gaussian channels at covariance level: validity, the classical-quantum
//! criterion, minimal unitary dilations, and weak complementary channels.
//!
//! A channel from space A to space B is the pair (K, α): covariances map as
//! β ↦ KᵗβK + α and means as m ↦ Kᵗm (row convention, K is 2s_A × 2s_B).
//! Validity requires α + (i/2)·Δ_K ⪰ 0 with Δ_K = Δ_B − KᵗΔ_A K; the channel
//! is classical-quantum (c-q) exactly when KᵗΔ_A K = 0, i.e. the input enters
//! only through commuting combinations of canonical observables.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::gaussian::{GaussianState, StateError};
use crate::symplectic::{self, hermitian_min_eigenvalue, max_abs, SymplecticSpace};
use crate::DEFAULT_TOL;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("noise matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("noise fails α + (i/2)(Δ_out − KᵗΔ_in K) ⪰ 0: min eigenvalue {0:.3e}")]
    NoiseViolation(f64),
    #[error("channel is not classical-quantum: ‖KᵗΔ_in K‖ = {0:.3e}")]
    NotClassicalQuantum(f64),
    #[error("noise covariance is not a valid state covariance (min eigenvalue {0:.3e})")]
    NoiseNotState(f64),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Symplectic(#[from] symplectic::SymplecticError),
}

pub type Result<T> = std::result::Result<T, ChannelError>;

/// A Gaussian channel (K, α) between two phase spaces.
#[derive(Debug, Clone)]
pub struct GaussianChannel {
    input: SymplecticSpace,
    output: SymplecticSpace,
    k: DMatrix<f64>,
    noise: DMatrix<f64>,
}

impl GaussianChannel {
    /// Validates shapes, noise symmetry, and the channel condition
    /// α + (i/2)·(Δ_out − KᵗΔ_in K) ⪰ 0.
    pub fn new(
        k: DMatrix<f64>,
        noise: DMatrix<f64>,
        input: SymplecticSpace,
        output: SymplecticSpace,
    ) -> Result<Self> {
        if k.nrows() != input.dim() {
            return Err(ChannelError::DimensionMismatch {
                expected: input.dim(),
                got: k.nrows(),
            });
        }
        if k.ncols() != output.dim() {
            return Err(ChannelError::DimensionMismatch {
                expected: output.dim(),
                got: k.ncols(),
            });
        }
        if noise.nrows() != output.dim() || noise.ncols() != output.dim() {
            return Err(ChannelError::DimensionMismatch {
                expected: output.dim(),
                got: noise.nrows().max(noise.ncols()),
            });
        }
        let asym = max_abs(&(&noise - noise.transpose()));
        if asym > DEFAULT_TOL * max_abs(&noise).max(1.0) {
            return Err(ChannelError::NotSymmetric(asym));
        }
        let channel = Self {
            input,
            output,
            k,
            noise,
        };
        let min_eig = hermitian_min_eigenvalue(&channel.noise, &(channel.delta_k() * 0.5));
        if min_eig < -DEFAULT_TOL {
            return Err(ChannelError::NoiseViolation(min_eig));
        }
        Ok(channel)
    }

    /// C-q channel writing a two-component classical signal onto both
    /// quadratures of one output mode, with isotropic thermal noise
    /// (n̄ + 1/2)·I. The two signal components ride the position quadratures
    /// of a two-mode input space.
    pub fn two_quadrature_cq(n_thermal: f64) -> Result<Self> {
        if !n_thermal.is_finite() || n_thermal < 0.0 {
            return Err(ChannelError::InvalidParameter {
                name: "n_thermal",
                value: n_thermal,
            });
        }
        let k = DMatrix::from_row_slice(
            4,
            2,
            &[
                1.0, 0.0, //
                0.0, 0.0, //
                0.0, 1.0, //
                0.0, 0.0,
            ],
        );
        let noise = DMatrix::identity(2, 2) * (n_thermal + 0.5);
        Self::new(k, noise, SymplecticSpace::new(2), SymplecticSpace::new(1))
    }

    /// C-q channel writing a one-component classical signal onto the position
    /// quadrature of the output mode, with minimal squeezed noise
    /// diag(σ², 1/(4σ²)).
    pub fn one_quadrature_cq(sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 <= 0.0 {
            return Err(ChannelError::InvalidParameter {
                name: "sigma2",
                value: sigma2,
            });
        }
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let noise =
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![sigma2, 0.25 / sigma2]));
        Self::new(k, noise, SymplecticSpace::new(1), SymplecticSpace::new(1))
    }

    pub fn input(&self) -> &SymplecticSpace {
        &self.input
    }

    pub fn output(&self) -> &SymplecticSpace {
        &self.output
    }

    pub fn k(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn noise(&self) -> &DMatrix<f64> {
        &self.noise
    }

    /// Δ_B − KᵗΔ_A K, the commutation defect the noise must dominate.
    pub fn delta_k(&self) -> DMatrix<f64> {
        self.output.form() - self.k.transpose() * self.input.form() * &self.k
    }

    /// ‖KᵗΔ_A K‖_max: zero exactly for classical-quantum channels.
    pub fn cq_residual(&self) -> f64 {
        max_abs(&(self.k.transpose() * self.input.form() * &self.k))
    }

    /// Whether the channel is classical-quantum within `tol`.
    pub fn is_cq(&self, tol: f64) -> bool {
        self.cq_residual() <= tol
    }

    /// Pushes a Gaussian state through: β ↦ KᵗβK + α, m ↦ Kᵗm.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.space() != &self.input {
            return Err(ChannelError::DimensionMismatch {
                expected: self.input.dim(),
                got: state.space().dim(),
            });
        }
        let mean = self.k.transpose() * state.mean();
        let cov = self.k.transpose() * state.covariance() * &self.k + &self.noise;
        Ok(GaussianState::new(mean, cov, self.output.clone())?)
    }

    /// S(Φ[ρ]) − S(ρ).
    pub fn entropy_gain(&self, state: &GaussianState) -> Result<f64> {
        Ok(self.apply(state)?.entropy() - state.entropy())
    }

    /// Minimal unitary dilation of a classical-quantum channel.
    ///
    /// The environment input D is a copy of the output space B carrying the
    /// noise as a Gaussian state; the environment output E is a copy of the
    /// input space A. The block transfer matrix
    ///
    ///   T = [[K, L], [K_D, L_D]],  K_D = I,
    ///
    /// is symplectic from A ⊕ D to B ⊕ E, with L built by canonicalizing the
    /// skew form M = Δ_A + Δ_A·K·Δ_B⁻¹·Kᵗ·Δ_A (so LᵗML = Δ_A, |det L| = 1)
    /// and L_D = −Δ_B⁻¹·Kᵗ·Δ_A·L.
    pub fn minimal_dilation(&self) -> Result<Dilation> {
        let residual = self.cq_residual();
        if residual > DEFAULT_TOL {
            return Err(ChannelError::NotClassicalQuantum(residual));
        }
        // For a c-q channel the defect equals Δ_B, so the noise must be a
        // bona fide state covariance on B.
        let min_eig = hermitian_min_eigenvalue(&self.noise, &(self.output.form() * 0.5));
        if min_eig < -DEFAULT_TOL {
            return Err(ChannelError::NoiseNotState(min_eig));
        }

        let d_a = self.input.form();
        let d_b_inv = self.output.form_inverse();
        let m = d_a + d_a * &self.k * &d_b_inv * self.k.transpose() * d_a;
        let l = symplectic::canonicalize_skew(&m)?;
        let l_d = -(&d_b_inv * self.k.transpose() * d_a * &l);
        let k_d = DMatrix::identity(self.output.dim(), self.output.dim());
        Ok(Dilation {
            channel: self.clone(),
            k_d,
            l,
            l_d,
        })
    }
}

/// Minimal dilation of a c-q channel: the data of a symplectic transfer
/// matrix on system ⊕ environment that reproduces the channel on the system
/// block when the environment starts in the noise state.
#[derive(Debug, Clone)]
pub struct Dilation {
    channel: GaussianChannel,
    k_d: DMatrix<f64>,
    l: DMatrix<f64>,
    l_d: DMatrix<f64>,
}

impl Dilation {
    pub fn channel(&self) -> &GaussianChannel {
        &self.channel
    }

    /// Coupling of the environment input into the system output (identity
    /// for minimal dilations, kept explicit for the transfer matrix).
    pub fn k_d(&self) -> &DMatrix<f64> {
        &self.k_d
    }

    /// System-input → environment-output block; satisfies LᵗML = Δ_A.
    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Environment-input → environment-output block.
    pub fn l_d(&self) -> &DMatrix<f64> {
        &self.l_d
    }

    /// Environment input space D (a copy of the output space B).
    pub fn env_input_space(&self) -> SymplecticSpace {
        self.channel.output.clone()
    }

    /// Environment output space E (a copy of the input space A).
    pub fn env_output_space(&self) -> SymplecticSpace {
        self.channel.input.clone()
    }

    /// The noise, promoted to the Gaussian state the environment starts in.
    pub fn env_state(&self) -> GaussianState {
        GaussianState::new(
            nalgebra::DVector::zeros(self.channel.output.dim()),
            self.channel.noise.clone(),
            self.env_input_space(),
        )
        .expect("dilation noise was validated as a state covariance")
    }

    /// Full block transfer matrix [[K, L], [K_D, L_D]] from A ⊕ D to B ⊕ E.
    pub fn transfer_matrix(&self) -> DMatrix<f64> {
        let (a, d) = (self.channel.input.dim(), self.channel.output.dim());
        let (b, e) = (self.channel.output.dim(), self.channel.input.dim());
        let mut t = DMatrix::zeros(a + d, b + e);
        t.view_mut((0, 0), (a, b)).copy_from(&self.channel.k);
        t.view_mut((0, b), (a, e)).copy_from(&self.l);
        t.view_mut((a, 0), (d, b)).copy_from(&self.k_d);
        t.view_mut((a, b), (d, e)).copy_from(&self.l_d);
        t
    }

    /// The channel A → E obtained by tracing out the system output: transfer
    /// block L with noise L_Dᵗ·α·L_D. Its entropies are well defined for the
    /// channel (completion freedom only moves them by a symplectic
    /// congruence on E, which entropies ignore).
    pub fn weak_complementary(&self) -> GaussianChannel {
        let noise = self.l_d.transpose() * &self.channel.noise * &self.l_d;
        let sym = (&noise + noise.transpose()) * 0.5;
        GaussianChannel::new(
            self.l.clone(),
            sym,
            self.channel.input.clone(),
            self.env_output_space(),
        )
        .expect("weak complementary of a minimal dilation is a valid channel")
    }
}
