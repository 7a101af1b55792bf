//! Information quantities for classical-quantum Gaussian channels: quantum
//! mutual information through a minimal dilation, constrained maximum output
//! entropy, the squeezed-ensemble rate sequence that approaches it, and
//! closed-form capacity curves for the one- and two-quadrature signal
//! families.
//!
//! Conventions: entropies and rates are in nats; energies are traces against
//! a positive weight matrix, Sp(ε·μ).

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

use crate::channel::{ChannelError, Dilation, GaussianChannel};
use crate::gaussian::{entropy_of_covariance, g_nonneg, GaussianState, StateError};
use crate::simplex;
use crate::symplectic::{
    self, complete_isotropic_basis, max_abs, symplectic_eigenvalues, SymplecticSpace,
};
use crate::DEFAULT_TOL;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("dilation does not match this channel (max deviation {0:.3e})")]
    DilationMismatch(f64),
    #[error("channel is not classical-quantum (‖KᵗΔK‖ = {0:.3e})")]
    NotClassicalQuantum(f64),
    #[error("K has column rank {rank}, need {expected} so every output covariance is reachable")]
    RankDeficient { rank: usize, expected: usize },
    #[error(
        "optimizer stalled: {iterations} iterations, {evaluations} evaluations, \
         simplex spread {residual:.3e}, best value {best:.12}"
    )]
    NonConvergence {
        iterations: usize,
        evaluations: usize,
        residual: f64,
        best: f64,
    },
    #[error("ensemble weight k_n = {0:.6} is not positive; increase n or the energy bound")]
    NonPositiveWeight(f64),
    #[error("weight matrix is not symmetric (max asymmetry {0:.3e})")]
    WeightNotSymmetric(f64),
    #[error("weight matrix must be positive definite (min eigenvalue {0:.3e})")]
    WeightNotPositive(f64),
    #[error("energy bound must be positive and finite, got {0}")]
    InvalidBound(f64),
    #[error("diag(E, E₁) with E·E₁ = {0:.6e} < 1/4 is not a valid covariance")]
    InvalidSignalPair(f64),
    #[error("signal-to-noise ratio must be positive and finite, got {0}")]
    InvalidRatio(f64),
    #[error("capacity branches need finite x ≥ 1, got {0}")]
    BranchDomain(f64),
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("sweep needs a single-mode channel (input has {0} modes)")]
    NotSingleMode(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Symplectic(#[from] symplectic::SymplecticError),
}

pub type Result<T> = std::result::Result<T, CapacityError>;

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

fn check_finite_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(CapacityError::InvalidParameter { name, value });
    }
    Ok(())
}

/// Linear energy functional Sp(ε·μ) ≤ bound with a symmetric positive-definite
/// weight ε.
#[derive(Debug, Clone)]
pub struct EnergyConstraint {
    weight: DMatrix<f64>,
    bound: f64,
}

impl EnergyConstraint {
    pub fn new(weight: DMatrix<f64>, bound: f64) -> Result<Self> {
        let asym = max_abs(&(&weight - weight.transpose()));
        if asym > DEFAULT_TOL * max_abs(&weight).max(1.0) {
            return Err(CapacityError::WeightNotSymmetric(asym));
        }
        let min_eig = weight.symmetric_eigenvalues().min();
        if min_eig.is_nan() || min_eig <= 0.0 {
            return Err(CapacityError::WeightNotPositive(min_eig));
        }
        if !bound.is_finite() || bound <= 0.0 {
            return Err(CapacityError::InvalidBound(bound));
        }
        Ok(Self {
            weight: symmetrize(weight),
            bound,
        })
    }

    /// Oscillator-energy weight ε = I/2, so Sp(ε·μ) counts mean quadrature
    /// energy Σ(q² + p²)/2.
    pub fn harmonic(space: &SymplecticSpace, bound: f64) -> Result<Self> {
        Self::new(DMatrix::identity(space.dim(), space.dim()) * 0.5, bound)
    }

    pub fn weight(&self) -> &DMatrix<f64> {
        &self.weight
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Sp(ε·cov).
    pub fn energy(&self, cov: &DMatrix<f64>) -> f64 {
        (&self.weight * cov).trace()
    }
}

/// Outcome of the constrained output-entropy search.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Maximum of S(Kᵗ·μ·K-free output) … the achieved entropy, in nats.
    pub value: f64,
    /// Signal covariance (on the output space) attaining it, with the energy
    /// constraint active.
    pub optimal_mu: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final simplex spread of the best run (objective units).
    pub residual: f64,
}

/// One rung of the squeezed-ensemble ladder.
#[derive(Debug, Clone)]
pub struct EnsembleStep {
    pub n: u32,
    pub eps_n: f64,
    /// Pure squeezed covariance of the per-letter states (input space).
    pub gamma_n: DMatrix<f64>,
    /// Fraction of the energy budget left for the signal distribution.
    pub k_n: f64,
    /// Accessible-information rate of the rung, in nats.
    pub chi_n: f64,
}

/// I(ρ, Φ) = S(ρ) + S(Φ[ρ]) − S(Φ̃[ρ]) with Φ̃ the weak complementary drawn
/// from `dilation`, which must belong to `channel`.
pub fn mutual_information(
    channel: &GaussianChannel,
    dilation: &Dilation,
    state: &GaussianState,
) -> Result<f64> {
    let dc = dilation.channel();
    if dc.input() != channel.input() || dc.output() != channel.output() {
        return Err(CapacityError::DilationMismatch(f64::INFINITY));
    }
    let scale = max_abs(channel.k()).max(max_abs(channel.noise())).max(1.0);
    let dev = max_abs(&(dc.k() - channel.k())).max(max_abs(&(dc.noise() - channel.noise())));
    if dev > 1e-12 * scale {
        return Err(CapacityError::DilationMismatch(dev));
    }
    let output = channel.apply(state)?;
    let env = dilation.weak_complementary().apply(state)?;
    Ok(state.entropy() + output.entropy() - env.entropy())
}

fn column_rank(k: &DMatrix<f64>) -> usize {
    let svd = k.clone().svd(false, false);
    let sv_max = svd.singular_values.max();
    svd.singular_values
        .iter()
        .filter(|&&s| s > 1e-9 * sv_max.max(1.0))
        .count()
}

/// Selects a maximal linearly independent subset of the columns of `m` by
/// greedy projection and returns those columns unchanged. Unlike an SVD or QR
/// range basis this keeps exactly-unit columns exact, which matters because
/// downstream squeezing amplifies any orthonormalization roundoff.
fn spanning_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let scale = max_abs(m).max(1.0);
    let mut residual: Vec<DVector<f64>> = m.column_iter().map(|c| c.into_owned()).collect();
    let mut selected: Vec<usize> = Vec::new();
    loop {
        let mut best = (0usize, 0.0_f64);
        for (i, r) in residual.iter().enumerate() {
            let n = r.norm();
            if n > best.1 {
                best = (i, n);
            }
        }
        let (pick, norm) = best;
        if norm <= 1e-9 * scale {
            break;
        }
        let q = &residual[pick] / norm;
        for r in residual.iter_mut() {
            let overlap = q.dot(r);
            *r -= &q * overlap;
        }
        selected.push(pick);
    }
    selected.sort_unstable();
    if selected.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let cols: Vec<DVector<f64>> = selected.iter().map(|&i| m.column(i).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

fn require_cq(channel: &GaussianChannel) -> Result<()> {
    let residual = channel.cq_residual();
    if residual > DEFAULT_TOL {
        return Err(CapacityError::NotClassicalQuantum(residual));
    }
    Ok(())
}

fn require_full_output_rank(channel: &GaussianChannel) -> Result<()> {
    let expected = channel.output().dim();
    let rank = column_rank(channel.k());
    if rank < expected {
        return Err(CapacityError::RankDeficient { rank, expected });
    }
    Ok(())
}

/// Maximizes the output entropy S(μ + α) over signal covariances μ ⪰ 0 with
/// Sp(ε·μ) ≤ E, for a classical-quantum channel whose K reaches every output
/// covariance (full column rank).
///
/// μ is parameterized through a Cholesky factor and rescaled onto the energy
/// shell (entropy is monotone in μ, so the constraint binds at the optimum);
/// the search runs a restarted Nelder–Mead from three deterministic starts.
pub fn max_output_entropy(
    channel: &GaussianChannel,
    constraint: &EnergyConstraint,
) -> Result<CapacityResult> {
    require_cq(channel)?;
    require_full_output_rank(channel)?;
    let dim = channel.output().dim();
    if constraint.weight().nrows() != dim {
        return Err(CapacityError::DimensionMismatch {
            expected: dim,
            got: constraint.weight().nrows(),
        });
    }

    let n_params = dim * (dim + 1) / 2;
    let weight = constraint.weight().clone();
    let bound = constraint.bound();
    let noise = channel.noise().clone();
    let out_space = channel.output().clone();

    let unpack = |x: &[f64]| -> DMatrix<f64> {
        let mut c = DMatrix::zeros(dim, dim);
        let mut idx = 0;
        for i in 0..dim {
            for j in 0..=i {
                c[(i, j)] = x[idx];
                idx += 1;
            }
        }
        c
    };
    let mu_of = |x: &[f64]| -> Option<DMatrix<f64>> {
        let c = unpack(x);
        let cct = &c * c.transpose();
        let energy = (&weight * &cct).trace();
        if !energy.is_finite() || energy <= 1e-300 {
            return None;
        }
        Some(cct * (bound / energy))
    };
    let objective = |x: &[f64]| -> f64 {
        let Some(mu) = mu_of(x) else {
            return f64::INFINITY;
        };
        let total = &mu + &noise;
        match symplectic_eigenvalues(&total, &out_space) {
            Ok(nus) => -nus
                .iter()
                .map(|&nu| g_nonneg((nu - 0.5).max(0.0)))
                .sum::<f64>(),
            Err(_) => f64::INFINITY,
        }
    };

    let pack = |c: &DMatrix<f64>| -> Vec<f64> {
        let mut x = Vec::with_capacity(n_params);
        for i in 0..dim {
            for j in 0..=i {
                x.push(c[(i, j)]);
            }
        }
        x
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(pack(&DMatrix::identity(dim, dim)));
    if let Some(chol) = weight
        .clone()
        .try_inverse()
        .and_then(|inv| Cholesky::new(symmetrize(inv)))
    {
        starts.push(pack(&chol.l()));
    }
    starts.push(pack(&DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            ((i + 1) as f64).sqrt()
        } else {
            0.0
        }
    })));

    const TOTAL_BUDGET: usize = 100_000;
    let mut used = 0usize;
    let mut best: Option<simplex::Outcome> = None;
    for start in &starts {
        let mut x0 = start.clone();
        // Restart each start from its own optimum until it stops improving.
        for _ in 0..3 {
            if used >= TOTAL_BUDGET {
                break;
            }
            let opts = simplex::Options {
                max_evaluations: (TOTAL_BUDGET - used).min(20_000),
                ..simplex::Options::default()
            };
            let outcome = simplex::minimize(&mut |x: &[f64]| objective(x), &x0, &opts);
            used += outcome.evaluations;
            let improved = best
                .as_ref()
                .map(|b| outcome.f < b.f - 1e-12 * b.f.abs().max(1.0))
                .unwrap_or(true);
            let keep_going = improved && !outcome.converged;
            x0 = outcome.x.clone();
            if improved {
                best = Some(outcome);
            }
            if !keep_going {
                break;
            }
        }
    }

    let best = best.expect("at least one start always runs");
    let value = -best.f;
    if !best.converged || !value.is_finite() {
        return Err(CapacityError::NonConvergence {
            iterations: best.iterations,
            evaluations: used,
            residual: best.residual,
            best: value,
        });
    }
    let optimal_mu = symmetrize(mu_of(&best.x).expect("optimum has positive energy"));
    Ok(CapacityResult {
        value,
        optimal_mu,
        iterations: best.iterations,
        converged: true,
        residual: best.residual,
    })
}

/// Covariance of the n-th pure squeezed state adapted to the signal range of
/// a classical-quantum channel: ε_n = 2⁻ⁿ along the range directions,
/// 1/(4ε_n) along their duals, vacuum elsewhere. All symplectic eigenvalues
/// equal 1/2, and Kᵗ·γ_n·K = ε_n·KᵗK shrinks to zero with n.
pub fn squeezed_covariance(channel: &GaussianChannel, n: u32) -> Result<DMatrix<f64>> {
    require_cq(channel)?;
    let eps = 0.5_f64.powi(n as i32);
    let input = channel.input();

    let range = spanning_columns(channel.k());
    let split = complete_isotropic_basis(&range, input)?;
    let k_iso = split.isotropic_rank();
    let dim = input.dim();
    let mut gamma_adapted = DVector::zeros(dim);
    for i in 0..k_iso {
        gamma_adapted[i] = eps;
        gamma_adapted[k_iso + i] = 0.25 / eps;
    }
    for i in 2 * k_iso..dim {
        gamma_adapted[i] = 0.5;
    }
    let p = split.adapted_matrix();
    let p_inv = p
        .try_inverse()
        .expect("adapted symplectic basis is invertible");
    Ok(symmetrize(
        p_inv.transpose() * DMatrix::from_diagonal(&gamma_adapted) * &p_inv,
    ))
}

/// Rate of the n-th squeezed-ensemble rung: per-letter states with covariance
/// γ_n, signal distribution scaled by the remaining energy fraction
/// k_n = 1 − Sp(ε·Kᵗγ_nK)/E, and
/// χ_n = S(Kᵗγ_nK + k_n·Kᵗβ₀K + α) − S(Kᵗγ_nK + α).
pub fn ensemble_rate(
    channel: &GaussianChannel,
    constraint: &EnergyConstraint,
    beta0: &DMatrix<f64>,
    n: u32,
) -> Result<EnsembleStep> {
    let in_dim = channel.input().dim();
    if beta0.nrows() != in_dim || beta0.ncols() != in_dim {
        return Err(CapacityError::DimensionMismatch {
            expected: in_dim,
            got: beta0.nrows().max(beta0.ncols()),
        });
    }
    let out_dim = channel.output().dim();
    if constraint.weight().nrows() != out_dim {
        return Err(CapacityError::DimensionMismatch {
            expected: out_dim,
            got: constraint.weight().nrows(),
        });
    }

    let gamma = squeezed_covariance(channel, n)?;
    let k = channel.k();
    let out_gamma = symmetrize(k.transpose() * &gamma * k);
    let mu0 = symmetrize(k.transpose() * beta0 * k);
    let k_n = 1.0 - constraint.energy(&out_gamma) / constraint.bound();
    // A budget consumed exactly (k_n = 0) often computes to ±1 ulp; treat
    // anything at roundoff scale as exhausted rather than dividing the signal
    // by a vanishing weight.
    if k_n <= 1e-12 {
        return Err(CapacityError::NonPositiveWeight(k_n));
    }

    let per_letter = &out_gamma + channel.noise();
    let average = &out_gamma + mu0 * k_n + channel.noise();
    let chi = entropy_of_covariance(&average, channel.output())?
        - entropy_of_covariance(&per_letter, channel.output())?;
    Ok(EnsembleStep {
        n,
        eps_n: 0.5_f64.powi(n as i32),
        gamma_n: gamma,
        k_n,
        chi_n: chi,
    })
}

/// Pulls an optimal output signal covariance μ₀ back to an input covariance
/// β₀ with Kᵗβ₀K = μ₀ (exact when K has full column rank): β₀ = K⁺ᵗ·μ₀·K⁺.
pub fn recover_input_covariance(
    channel: &GaussianChannel,
    mu0: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let out_dim = channel.output().dim();
    if mu0.nrows() != out_dim || mu0.ncols() != out_dim {
        return Err(CapacityError::DimensionMismatch {
            expected: out_dim,
            got: mu0.nrows().max(mu0.ncols()),
        });
    }
    require_full_output_rank(channel)?;
    let pinv = channel
        .k()
        .clone()
        .pseudo_inverse(1e-12)
        .expect("pseudo-inverse with positive cutoff");
    Ok(symmetrize(pinv.transpose() * mu0 * &pinv))
}

/// Capacity of the two-quadrature family with thermal noise (n̄ + 1/2)·I and
/// oscillator energy bound E: C = g(n̄ + E) − g(n̄). Entanglement assistance
/// does not change it.
pub fn two_quadrature_capacity(n_thermal: f64, e: f64) -> Result<f64> {
    if !n_thermal.is_finite() || n_thermal < 0.0 {
        return Err(CapacityError::InvalidParameter {
            name: "n_thermal",
            value: n_thermal,
        });
    }
    check_finite_positive("e", e)?;
    Ok(g_nonneg(n_thermal + e) - g_nonneg(n_thermal))
}

/// Unassisted and assisted capacities of the one-quadrature family with
/// squeezed noise diag(σ², 1/(4σ²)) and energy bound E, as a function of the
/// signal-to-noise ratio r = E/σ²:
///
///   C     = ln(1 + r)/2,
///   C_ea  = g((√(1 + r) − 1)/2).
pub fn one_quadrature_capacities(sigma2: f64, e: f64) -> Result<(f64, f64)> {
    check_finite_positive("sigma2", sigma2)?;
    check_finite_positive("e", e)?;
    let r = e / sigma2;
    let c = 0.5 * r.ln_1p();
    // (√(1+r) − 1)/2 without cancellation for small r.
    let x = r / (2.0 * ((1.0 + r).sqrt() + 1.0));
    Ok((c, g_nonneg(x)))
}

/// C_ea/C for the one-quadrature family at signal-to-noise ratio r: the
/// entanglement-assistance gain. Diverges like |ln r|/ln 4 as r → 0 and
/// decays to 1 as r → ∞.
pub fn gain_ratio(r: f64) -> Result<f64> {
    if !r.is_finite() || r <= 0.0 {
        return Err(CapacityError::InvalidRatio(r));
    }
    let (c, cea) = one_quadrature_capacities(1.0, r)?;
    Ok(cea / c)
}

/// The two capacity branches of the one-quadrature family as explicit
/// functions of x = √(1 + r) ≥ 1:
///
///   f₁(x) = ln x,
///   f₂(x) = ((x+1)/2)·ln((x+1)/2) − ((x−1)/2)·ln((x−1)/2).
///
/// Both vanish at x = 1 and f₂ > f₁ for x > 1. Coded directly from these
/// expressions (not through `g`), so it doubles as an independent oracle for
/// [`one_quadrature_capacities`].
pub fn capacity_branches(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() || x < 1.0 {
        return Err(CapacityError::BranchDomain(x));
    }
    if x == 1.0 {
        return Ok((0.0, 0.0));
    }
    let a = (x + 1.0) / 2.0;
    let b = (x - 1.0) / 2.0;
    Ok((x.ln(), a * a.ln() - b * b.ln()))
}

/// Assistance shortfall of the one-quadrature family at finite squeezing:
/// δ₁ = g(√(E·E₁ + E/(4σ²)) − 1/2) − g(√(E·E₁) − 1/2), the gap between C_ea
/// and the mutual information of the input diag(E, E₁). Decays like 1/(8E₁σ²)
/// for large E₁.
pub fn one_quadrature_gap(e: f64, sigma2: f64, e1: f64) -> Result<f64> {
    check_finite_positive("e", e)?;
    check_finite_positive("sigma2", sigma2)?;
    check_finite_positive("e1", e1)?;
    let prod = e * e1;
    // The boundary E·E₁ = 1/4 (pure input) is in the domain; computing
    // E₁ = 1/(4E) for non-dyadic E can land a ulp below it.
    if prod < 0.25 * (1.0 - 1e-12) {
        return Err(CapacityError::InvalidSignalPair(prod));
    }
    let outer = (prod + e / (4.0 * sigma2)).sqrt() - 0.5;
    let inner = (prod.sqrt() - 0.5).max(0.0);
    Ok(g_nonneg(outer) - g_nonneg(inner))
}

/// Assistance shortfall of the two-quadrature family (vacuum noise):
/// δ = g(ν₊ − 1/2) + g(ν₋ − 1/2) − 2·g(√(E·E₁) − 1/2) with
/// ν± = √(E·Ẽ₁) ± E/2 and Ẽ₁ = E₁ + 1/2 + E/4. Vanishing squeezing
/// E₁ = 1/(4E) gives δ = g(E) exactly; δ → 0 as E₁ → ∞.
pub fn two_quadrature_gap(e: f64, e1: f64) -> Result<f64> {
    check_finite_positive("e", e)?;
    check_finite_positive("e1", e1)?;
    let prod = e * e1;
    if prod < 0.25 * (1.0 - 1e-12) {
        return Err(CapacityError::InvalidSignalPair(prod));
    }
    let et = e1 + 0.5 + e / 4.0;
    let s = (e * et).sqrt();
    let nu_plus = s + e / 2.0;
    let nu_minus = s - e / 2.0;
    Ok(
        g_nonneg(nu_plus - 0.5) + g_nonneg((nu_minus - 0.5).max(0.0))
            - 2.0 * g_nonneg((prod.sqrt() - 0.5).max(0.0)),
    )
}

/// Mutual information of a single-mode c-q channel on the squeezed inputs
/// diag(E, E₁), one row (E₁, I) per grid point. The dilation is built once;
/// E₁ values below 1/(4E) surface as uncertainty violations.
pub fn mutual_information_sweep(
    channel: &GaussianChannel,
    e: f64,
    e1_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if channel.input().modes() != 1 || channel.output().modes() != 1 {
        return Err(CapacityError::NotSingleMode(channel.input().modes()));
    }
    check_finite_positive("e", e)?;
    let dilation = channel.minimal_dilation()?;
    let mut rows = Vec::with_capacity(e1_grid.len());
    for &e1 in e1_grid {
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![e, e1]));
        let state = GaussianState::new(DVector::zeros(2), cov, channel.input().clone())?;
        let info = mutual_information(channel, &dilation, &state)?;
        rows.push((e1, info));
    }
    Ok(rows)
}

#[cfg(test)]
// Reference values are written with every digit of the computation that
// produced them; the compiler rounds to the nearest f64.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::gaussian::g;
    use approx::assert_relative_eq;

    fn diag(entries: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(entries.to_vec()))
    }

    fn one_quadrature(sigma2: f64) -> GaussianChannel {
        GaussianChannel::one_quadrature_cq(sigma2).unwrap()
    }

    fn two_quadrature(n: f64) -> GaussianChannel {
        GaussianChannel::two_quadrature_cq(n).unwrap()
    }

    fn state(cov: DMatrix<f64>, modes: usize) -> GaussianState {
        GaussianState::new(DVector::zeros(2 * modes), cov, SymplecticSpace::new(modes)).unwrap()
    }

    #[test]
    fn mutual_information_vanishes_on_pure_inputs() {
        let ch = one_quadrature(1.0);
        let dil = ch.minimal_dilation().unwrap();
        for cov in [diag(&[0.5, 0.5]), diag(&[2.0, 0.125]), diag(&[0.25, 1.0])] {
            let rho = state(cov, 1);
            assert!(rho.is_pure());
            let info = mutual_information(&ch, &dil, &rho).unwrap();
            assert!(info.abs() <= 1e-9, "I = {info}");
        }
    }

    #[test]
    fn mutual_information_matches_gap_identity_one_quadrature() {
        let ch = one_quadrature(1.0);
        let dil = ch.minimal_dilation().unwrap();
        let rho = state(diag(&[1.0, 1.0]), 1);
        let info = mutual_information(&ch, &dil, &rho).unwrap();
        assert_relative_eq!(info, 0.432052199752724847, max_relative = 1e-9);
        let (_, cea) = one_quadrature_capacities(1.0, 1.0).unwrap();
        let gap = one_quadrature_gap(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(info, cea - gap, max_relative = 1e-9);
    }

    #[test]
    fn mutual_information_matches_gap_identity_two_quadrature() {
        let ch = two_quadrature(0.0);
        let dil = ch.minimal_dilation().unwrap();
        let rho = state(diag(&[1.0, 1.0, 1.0, 1.0]), 2);
        let info = mutual_information(&ch, &dil, &rho).unwrap();
        let expected = g(1.0).unwrap() - two_quadrature_gap(1.0, 1.0).unwrap();
        assert_relative_eq!(info, expected, max_relative = 1e-9);
        assert_relative_eq!(info, 0.973096447713846, max_relative = 1e-9);
    }

    #[test]
    fn mutual_information_rejects_foreign_dilation() {
        let ch = one_quadrature(1.0);
        let other = one_quadrature(2.0);
        let dil = other.minimal_dilation().unwrap();
        let rho = state(diag(&[1.0, 1.0]), 1);
        assert!(matches!(
            mutual_information(&ch, &dil, &rho),
            Err(CapacityError::DilationMismatch(_))
        ));
    }

    #[test]
    fn max_output_entropy_reaches_isotropic_optimum() {
        let ch = two_quadrature(0.0);
        for e in [0.1, 1.0, 10.0] {
            let constraint = EnergyConstraint::harmonic(ch.output(), e).unwrap();
            let res = max_output_entropy(&ch, &constraint).unwrap();
            assert!(res.converged);
            let target = g(e).unwrap();
            assert!(
                (res.value - target).abs() <= 1e-4,
                "E = {e}: value {} vs g(E) {target}",
                res.value
            );
            // The energy constraint is active at the optimum by construction.
            assert_relative_eq!(constraint.energy(&res.optimal_mu), e, max_relative = 1e-9);
        }
    }

    #[test]
    fn max_output_entropy_rejects_rank_deficient_signal() {
        let ch = one_quadrature(1.0);
        let constraint = EnergyConstraint::harmonic(ch.output(), 1.0).unwrap();
        assert!(matches!(
            max_output_entropy(&ch, &constraint),
            Err(CapacityError::RankDeficient {
                rank: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn max_output_entropy_rejects_non_cq() {
        let space = SymplecticSpace::new(1);
        let ch = GaussianChannel::new(
            DMatrix::identity(2, 2),
            DMatrix::identity(2, 2),
            space.clone(),
            space,
        )
        .unwrap();
        let constraint = EnergyConstraint::harmonic(ch.output(), 1.0).unwrap();
        assert!(matches!(
            max_output_entropy(&ch, &constraint),
            Err(CapacityError::NotClassicalQuantum(_))
        ));
    }

    #[test]
    fn energy_constraint_rejects_bad_weights() {
        let skewed = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(matches!(
            EnergyConstraint::new(skewed, 1.0),
            Err(CapacityError::WeightNotSymmetric(_))
        ));
        let indefinite = diag(&[1.0, -0.1]);
        assert!(matches!(
            EnergyConstraint::new(indefinite, 1.0),
            Err(CapacityError::WeightNotPositive(_))
        ));
        for bad in [0.0, -2.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                EnergyConstraint::new(DMatrix::identity(2, 2), bad),
                Err(CapacityError::InvalidBound(_))
            ));
        }
    }

    #[test]
    fn squeezed_covariance_is_exactly_diagonal_for_the_families() {
        let ch2 = two_quadrature(0.0);
        for n in [0u32, 3, 10] {
            let eps = 0.5_f64.powi(n as i32);
            let gamma = squeezed_covariance(&ch2, n).unwrap();
            let expected = diag(&[eps, 0.25 / eps, eps, 0.25 / eps]);
            assert!((gamma - expected).amax() <= 1e-12 / eps.min(1.0));
        }
        let ch1 = one_quadrature(1.0);
        let gamma = squeezed_covariance(&ch1, 4).unwrap();
        let eps = 0.5_f64.powi(4);
        assert!((gamma - diag(&[eps, 0.25 / eps])).amax() <= 1e-12);
    }

    #[test]
    fn squeezed_covariance_is_pure_with_shrinking_output() {
        let ch = two_quadrature(0.0);
        let space = ch.input();
        let mut last_norm = f64::INFINITY;
        for n in 0..=17 {
            let gamma = squeezed_covariance(&ch, n).unwrap();
            let nus = symplectic_eigenvalues(&gamma, space).unwrap();
            for nu in nus {
                assert!((nu - 0.5).abs() <= 1e-12, "n = {n}: ν = {nu}");
            }
            let eps = 0.5_f64.powi(n as i32);
            let pushed = ch.k().transpose() * &gamma * ch.k();
            let ktk = ch.k().transpose() * ch.k();
            assert!((&pushed - &ktk * eps).amax() <= 1e-12);
            let norm = pushed.amax();
            assert!(norm < last_norm, "‖KᵗγK‖ must shrink with n");
            last_norm = norm;
        }
    }

    #[test]
    fn ensemble_rate_matches_closed_form_two_quadrature() {
        let ch = two_quadrature(0.0);
        let e = 1.0;
        let constraint = EnergyConstraint::harmonic(ch.output(), e).unwrap();
        let beta0 = diag(&[e, 0.0, e, 0.0]);
        for n in [1u32, 5, 12, 17] {
            let step = ensemble_rate(&ch, &constraint, &beta0, n).unwrap();
            let eps = 0.5_f64.powi(n as i32);
            // ε_n + k_n·E = E identically for this family, so
            // χ_n = g(E) − g(ε_n) exactly.
            assert_relative_eq!(step.k_n, 1.0 - eps / e, max_relative = 1e-12);
            let expected = g(e).unwrap() - g(eps).unwrap();
            assert_relative_eq!(step.chi_n, expected, max_relative = 1e-10);
        }
        let step17 = ensemble_rate(&ch, &constraint, &beta0, 17).unwrap();
        assert!((step17.chi_n - g(e).unwrap()).abs() <= 1e-3);
        assert!(step17.eps_n <= 1e-5);
    }

    #[test]
    fn ensemble_rate_rejects_exhausted_budget() {
        let ch = two_quadrature(0.0);
        let constraint = EnergyConstraint::harmonic(ch.output(), 1.0).unwrap();
        let beta0 = diag(&[1.0, 0.0, 1.0, 0.0]);
        // ε_0 = 1 eats the whole budget: k_0 = 0.
        assert!(matches!(
            ensemble_rate(&ch, &constraint, &beta0, 0),
            Err(CapacityError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn recovered_input_covariance_round_trips() {
        let ch = two_quadrature(0.0);
        let mu0 = DMatrix::from_row_slice(2, 2, &[1.5, 0.25, 0.25, 0.75]);
        let beta0 = recover_input_covariance(&ch, &mu0).unwrap();
        let back = ch.k().transpose() * &beta0 * ch.k();
        assert!((back - &mu0).amax() <= 1e-12);
        assert!(matches!(
            recover_input_covariance(&one_quadrature(1.0), &mu0),
            Err(CapacityError::RankDeficient { .. })
        ));
    }

    #[test]
    fn closed_form_capacities_hit_frozen_values() {
        assert_relative_eq!(
            two_quadrature_capacity(0.0, 1.0).unwrap(),
            g(1.0).unwrap(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            two_quadrature_capacity(1.0, 1.0).unwrap(),
            0.523248143764547836517,
            max_relative = 1e-12
        );
        let (c, cea) = one_quadrature_capacities(1.0, 1.0).unwrap();
        assert_relative_eq!(c, 0.346573590279972654709, max_relative = 1e-12);
        assert_relative_eq!(cea, 0.553303299720515717371, max_relative = 1e-12);
        assert!(two_quadrature_capacity(-0.1, 1.0).is_err());
        assert!(one_quadrature_capacities(0.0, 1.0).is_err());
    }

    #[test]
    fn gain_ratio_hits_frozen_values() {
        assert_relative_eq!(
            gain_ratio(1.0).unwrap(),
            1.59649585322857560,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            gain_ratio(1e-4).unwrap(),
            5.79848106944221224,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            gain_ratio(1e4).unwrap(),
            1.06662790088519696,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            gain_ratio(1e-8).unwrap(),
            10.4034875804198468,
            max_relative = 1e-10
        );
        // Far tail: the gain still exceeds 1 but only barely.
        let far = gain_ratio(1e300).unwrap();
        assert!(far > 1.0 && far - 1.0 <= 1e-3, "ratio(1e300) = {far}");
        assert!(gain_ratio(0.0).is_err());
        assert!(gain_ratio(f64::INFINITY).is_err());
    }

    #[test]
    fn capacity_branches_match_the_capacity_pair() {
        assert_eq!(capacity_branches(1.0).unwrap(), (0.0, 0.0));
        let (f1, f2) = capacity_branches(2.0_f64.sqrt()).unwrap();
        assert_relative_eq!(f1, 0.346573590279972654709, max_relative = 1e-12);
        assert_relative_eq!(f2, 0.553303299720515717371, max_relative = 1e-12);
        for x in [1.1_f64, 2.0, 10.0, 1000.0] {
            let (f1, f2) = capacity_branches(x).unwrap();
            assert!(f2 > f1, "x = {x}");
            let r = x * x - 1.0;
            let (c, cea) = one_quadrature_capacities(1.0, r).unwrap();
            assert_relative_eq!(f1, c, max_relative = 1e-12);
            assert_relative_eq!(f2, cea, max_relative = 1e-12);
        }
        assert!(capacity_branches(0.5).is_err());
    }

    #[test]
    fn one_quadrature_gap_frozen_values() {
        assert_relative_eq!(
            one_quadrature_gap(1.0, 1.0, 1.0).unwrap(),
            0.121251099967790869548,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            one_quadrature_gap(1.0, 1.0, 2.0).unwrap(),
            0.0613855523912195161268,
            max_relative = 1e-12
        );
        let tail = one_quadrature_gap(1.0, 1.0, 1e6).unwrap();
        assert_relative_eq!(tail, 1.24999994791668229e-7, max_relative = 1e-6);
        // At the purity boundary E₁ = 1/(4E) the gap equals C_ea itself.
        let boundary = one_quadrature_gap(1.0, 1.0, 0.25).unwrap();
        assert_relative_eq!(boundary, 0.553303299720515717371, max_relative = 1e-12);
        assert!(matches!(
            one_quadrature_gap(1.0, 1.0, 0.1),
            Err(CapacityError::InvalidSignalPair(_))
        ));
    }

    #[test]
    fn one_quadrature_gap_decreases_with_squeezing() {
        let mut last = f64::INFINITY;
        for e1 in [0.25, 0.5, 1.0, 2.0, 8.0, 64.0, 1e4] {
            let gap = one_quadrature_gap(1.0, 1.0, e1).unwrap();
            assert!(gap < last);
            assert!(gap >= 0.0);
            last = gap;
        }
    }

    #[test]
    fn two_quadrature_gap_frozen_values() {
        assert_relative_eq!(
            two_quadrature_gap(1.0, 0.25).unwrap(),
            g(1.0).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            two_quadrature_gap(1.0, 1.0).unwrap(),
            0.413197913406044479808,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            two_quadrature_gap(2.5, 0.1).unwrap(),
            2.09394356004840032195,
            max_relative = 1e-12
        );
        let tail = two_quadrature_gap(1.0, 1e8).unwrap();
        assert_relative_eq!(tail, 4.99999998750000002308e-9, max_relative = 1e-6);
    }

    #[test]
    fn sweep_climbs_to_the_assisted_capacity() {
        let ch = one_quadrature(1.0);
        let grid = [0.25, 0.5, 1.0, 10.0, 1e6];
        let rows = mutual_information_sweep(&ch, 1.0, &grid).unwrap();
        assert_eq!(rows.len(), grid.len());
        assert!(rows[0].1.abs() <= 1e-9, "boundary I = {}", rows[0].1);
        for pair in rows.windows(2) {
            assert!(pair[1].1 > pair[0].1, "sweep must increase");
        }
        let (_, cea) = one_quadrature_capacities(1.0, 1.0).unwrap();
        let last = rows.last().unwrap().1;
        assert!((cea - last).abs() <= 1e-3);
        for &(e1, info) in &rows {
            let expected = cea - one_quadrature_gap(1.0, 1.0, e1).unwrap();
            assert_relative_eq!(info, expected, max_relative = 1e-8, epsilon = 1e-9);
        }
    }

    #[test]
    fn sweep_surfaces_uncertainty_violations() {
        let ch = one_quadrature(1.0);
        let err = mutual_information_sweep(&ch, 1.0, &[0.1]).unwrap_err();
        assert!(matches!(
            err,
            CapacityError::State(StateError::UncertaintyViolation(_))
        ));
    }

    #[test]
    fn sweep_rejects_multimode_channels() {
        let ch = two_quadrature(0.0);
        assert!(matches!(
            mutual_information_sweep(&ch, 1.0, &[1.0]),
            Err(CapacityError::NotSingleMode(2))
        ));
    }
}
