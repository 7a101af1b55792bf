//! Covariance-level toolkit for bosonic Gaussian classical-quantum (c-q)
//! channels.
//!
//! A Gaussian channel is the pair (K, α) acting on covariance matrices as
//! β ↦ KᵗβK + α; the classical-quantum ones (KᵗΔK = 0) carry a classical
//! signal into a quantum output. This crate provides:
//!
//! - [`symplectic`]: canonical forms, symplectic eigenvalues, skew-form
//!   canonicalization, and adapted bases for isotropic subspaces;
//! - [`gaussian`]: Gaussian states, validity checks, and entropies;
//! - [`channel`]: channel validity, the c-q criterion, minimal unitary
//!   dilations, and weak complementary channels;
//! - [`capacity`]: quantum mutual information, constrained maximum output
//!   entropy, the squeezed-ensemble rate ladder, and closed-form capacity
//!   curves for the one- and two-quadrature signal families;
//! - [`sample`]: seeded generators for verification ensembles.
//!
//! Conventions throughout: ħ = 1, vacuum covariance I/2, entropies in nats,
//! phase-space coordinates interleaved per mode (q₁, p₁, …, q_s, p_s), and
//! transfer matrices acting on row vectors (R′ = R·T).

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channel;
pub mod gaussian;
pub mod sample;
mod simplex;
pub mod symplectic;

pub use capacity::{
    capacity_branches, ensemble_rate, gain_ratio, max_output_entropy, mutual_information,
    mutual_information_sweep, one_quadrature_capacities, one_quadrature_gap,
    recover_input_covariance, squeezed_covariance, two_quadrature_capacity, two_quadrature_gap,
    CapacityError, CapacityResult, EnergyConstraint, EnsembleStep,
};
pub use channel::{ChannelError, Dilation, GaussianChannel};
pub use gaussian::{entropy_of_covariance, g, GaussianState, StateError};
pub use sample::Sampler;
pub use symplectic::{
    canonical_form, canonicalize_skew, complete_isotropic_basis, hermitian_min_eigenvalue,
    is_symplectic, symplectic_eigenvalues, symplectic_residual, SymplecticBasisSplit,
    SymplecticError, SymplecticSpace,
};

/// Default tolerance for structural residuals (symmetry, symplecticity,
/// positivity slack).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative tolerance for accepting the ±iν eigenvalue pairing.
pub const PAIRING_TOL: f64 = 1e-8;

/// Absolute slack on |ν − 1/2| when classifying a state as pure.
pub const PURITY_TOL: f64 = 1e-8;
