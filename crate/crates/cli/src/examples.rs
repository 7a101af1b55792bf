//! The two worked channel families as runnable reports: the two-quadrature
//! family, where entanglement assistance buys nothing, and the
//! one-quadrature family, where it strictly helps.

use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use gausscq::{
    ensemble_rate, g, max_output_entropy, mutual_information_sweep, one_quadrature_capacities,
    one_quadrature_gap, recover_input_covariance, two_quadrature_capacity, two_quadrature_gap,
    EnergyConstraint, GaussianChannel,
};

use crate::config::{usage, OutputFormat, RunConfig};

/// Rungs shown in the squeezed-ensemble ladder (ε_n = 2⁻ⁿ; n = 17 is the
/// first rung with ε_n ≤ 1e-5).
const LADDER: [u32; 8] = [2, 4, 6, 8, 12, 16, 17, 20];

const SWEEP_POINTS: usize = 25;

#[derive(Debug, Serialize)]
struct LadderRung {
    n: u32,
    eps_n: f64,
    k_n: f64,
    chi_n: f64,
    capacity_deficit: f64,
}

#[derive(Debug, Serialize)]
struct TwoQuadratureReport {
    thermal_occupation: f64,
    energy_bound: f64,
    /// g(N+E) − g(N); assistance does not move it.
    closed_form_capacity: f64,
    /// g(N+E), the constrained output-entropy maximum.
    reference_output_entropy: f64,
    optimizer_entropy: f64,
    optimizer_delta: f64,
    optimizer_iterations: usize,
    optimizer_converged: bool,
    ladder: Vec<LadderRung>,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    e1: f64,
    mutual_information: f64,
    assisted_deficit: f64,
    /// Gap of the squeezed-noise family at this squeezing level.
    squeezed_noise_gap: f64,
    /// Gap of the vacuum-noise family at the same (E, E₁).
    vacuum_noise_gap: f64,
}

#[derive(Debug, Serialize)]
struct OneQuadratureReport {
    energy_bound: f64,
    noise_variance: f64,
    snr: f64,
    unassisted_capacity: f64,
    assisted_capacity: f64,
    gain: f64,
    sweep: Vec<SweepRow>,
    sweep_monotone: bool,
    /// max |(C_ea − I) − δ₁| over the sweep: the closed-form identity the
    /// sweep is expected to track.
    max_identity_residual: f64,
    final_deficit: f64,
}

fn emit<T: Serialize>(cfg: &RunConfig, report: &T, text: String) -> Result<()> {
    let payload = match cfg.format.unwrap_or(OutputFormat::Text) {
        OutputFormat::Text => text,
        OutputFormat::Json => {
            serde_json::to_string_pretty(report).context("serializing report")? + "\n"
        }
        OutputFormat::Csv => return Err(usage("example reports are text or json, not csv")),
    };
    match &cfg.out {
        Some(path) => {
            fs::write(path, payload).with_context(|| format!("writing {}", path.display()))?;
            println!("wrote report to {}", path.display());
            Ok(())
        }
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// Two-quadrature family: closed-form capacity against the optimizer and
/// the squeezed-ensemble ladder closing on it from below.
pub fn example1(cfg: &RunConfig) -> Result<()> {
    let (e, n_thermal) = (cfg.energy, cfg.thermal);
    let channel = GaussianChannel::two_quadrature_cq(n_thermal)?;
    let constraint = EnergyConstraint::harmonic(channel.output(), e)?;
    let closed = two_quadrature_capacity(n_thermal, e)?;
    let reference = g(n_thermal + e)?;
    let optimum = max_output_entropy(&channel, &constraint)?;
    let beta0 = recover_input_covariance(&channel, &optimum.optimal_mu)?;
    let mut ladder = Vec::with_capacity(LADDER.len());
    for n in LADDER {
        let step = match ensemble_rate(&channel, &constraint, &beta0, n) {
            Ok(step) => step,
            // Rungs whose letter states alone exceed the budget have no
            // signal left to carry; they only exist for larger E.
            Err(gausscq::CapacityError::NonPositiveWeight(_)) => continue,
            Err(err) => return Err(err.into()),
        };
        ladder.push(LadderRung {
            n: step.n,
            eps_n: step.eps_n,
            k_n: step.k_n,
            chi_n: step.chi_n,
            capacity_deficit: closed - step.chi_n,
        });
    }
    let report = TwoQuadratureReport {
        thermal_occupation: n_thermal,
        energy_bound: e,
        closed_form_capacity: closed,
        reference_output_entropy: reference,
        optimizer_entropy: optimum.value,
        optimizer_delta: (optimum.value - reference).abs(),
        optimizer_iterations: optimum.iterations,
        optimizer_converged: optimum.converged,
        ladder,
    };
    let text = render_two_quadrature(&report);
    emit(cfg, &report, text)
}

fn render_two_quadrature(r: &TwoQuadratureReport) -> String {
    let mut s = String::new();
    s.push_str("two-quadrature classical signal with isotropic thermal noise\n");
    s.push_str(&format!(
        "  N = {}, E = {}\n",
        r.thermal_occupation, r.energy_bound
    ));
    s.push_str(&format!(
        "  capacity (closed form, assisted = unassisted)   {:.11e} nats\n",
        r.closed_form_capacity
    ));
    s.push_str(&format!(
        "  reference max output entropy                    {:.11e} nats\n",
        r.reference_output_entropy
    ));
    s.push_str(&format!(
        "  optimizer entropy  {:.11e}   |delta| {:.2e}   ({} iterations, converged: {})\n",
        r.optimizer_entropy, r.optimizer_delta, r.optimizer_iterations, r.optimizer_converged
    ));
    s.push_str("  squeezed-ensemble ladder:\n");
    s.push_str("      n      eps_n         k_n              chi_n             deficit\n");
    for rung in &r.ladder {
        s.push_str(&format!(
            "    {:>3}   {:.5e}   {:.8e}   {:.11e}   {:.2e}\n",
            rung.n, rung.eps_n, rung.k_n, rung.chi_n, rung.capacity_deficit
        ));
    }
    s
}

/// One-quadrature family: C < C_ea, with the squeezed-input sweep climbing
/// to the assisted capacity as the conjugate-quadrature variance grows.
pub fn example2(cfg: &RunConfig) -> Result<()> {
    let (e, sigma2) = (cfg.energy, cfg.sigma2);
    let channel = GaussianChannel::one_quadrature_cq(sigma2)?;
    let (c, cea) = one_quadrature_capacities(sigma2, e)?;
    let gain = cea / c;

    // Geometric sweep from the minimal-squeezing point E₁ = 1/(4E) (where
    // the input is pure and I = 0) out to essentially unbounded squeezing.
    let e1_min = 0.25 / e;
    let e1_max = 1e8_f64;
    let mut grid: Vec<f64> = (0..SWEEP_POINTS)
        .map(|i| {
            let t = i as f64 / (SWEEP_POINTS - 1) as f64;
            (e1_min.ln() + t * (e1_max.ln() - e1_min.ln())).exp()
        })
        .collect();
    grid[0] = e1_min;

    let mut sweep = Vec::with_capacity(SWEEP_POINTS);
    let mut monotone = true;
    let mut last_info = f64::NEG_INFINITY;
    let mut identity_residual = 0.0_f64;
    for (e1, info) in mutual_information_sweep(&channel, e, &grid)? {
        if info < last_info {
            monotone = false;
        }
        last_info = info;
        let delta1 = one_quadrature_gap(e, sigma2, e1)?;
        identity_residual = identity_residual.max((cea - info - delta1).abs());
        sweep.push(SweepRow {
            e1,
            mutual_information: info,
            assisted_deficit: cea - info,
            squeezed_noise_gap: delta1,
            vacuum_noise_gap: two_quadrature_gap(e, e1)?,
        });
    }
    let final_deficit = sweep.last().map(|row| row.assisted_deficit).unwrap_or(cea);
    let report = OneQuadratureReport {
        energy_bound: e,
        noise_variance: sigma2,
        snr: e / sigma2,
        unassisted_capacity: c,
        assisted_capacity: cea,
        gain,
        sweep,
        sweep_monotone: monotone,
        max_identity_residual: identity_residual,
        final_deficit,
    };
    let text = render_one_quadrature(&report);
    emit(cfg, &report, text)?;
    if !report.sweep_monotone {
        bail!("mutual information failed to increase along the squeezing sweep");
    }
    Ok(())
}

fn render_one_quadrature(r: &OneQuadratureReport) -> String {
    let mut s = String::new();
    s.push_str("one-quadrature classical signal with squeezed noise\n");
    s.push_str(&format!(
        "  E = {}, sigma2 = {}, r = E/sigma2 = {:.6e}\n",
        r.energy_bound, r.noise_variance, r.snr
    ));
    s.push_str(&format!(
        "  unassisted capacity   C    = {:.11e} nats\n",
        r.unassisted_capacity
    ));
    s.push_str(&format!(
        "  assisted capacity     C_ea = {:.11e} nats\n",
        r.assisted_capacity
    ));
    s.push_str(&format!(
        "  assistance gain       C_ea/C = {:.11e}\n",
        r.gain
    ));
    s.push_str("  squeezed-input sweep (E1 from the pure point 1/(4E)):\n");
    s.push_str("      E1            I(E1)         C_ea - I      delta1        delta_vac\n");
    for row in &r.sweep {
        s.push_str(&format!(
            "    {:.5e}   {:.5e}   {:.5e}   {:.5e}   {:.5e}\n",
            row.e1,
            row.mutual_information,
            row.assisted_deficit,
            row.squeezed_noise_gap,
            row.vacuum_noise_gap
        ));
    }
    s.push_str(&format!(
        "  monotone increasing: {}   max |(C_ea - I) - delta1| = {:.2e}   final deficit {:.2e}\n",
        r.sweep_monotone, r.max_identity_residual, r.final_deficit
    ));
    s
}
