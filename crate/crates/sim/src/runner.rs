//! Seeded Monte Carlo execution over channel realizations.
//!
//! Every run owns a child seed derived from `(master_seed, run_index)`;
//! all schemes evaluated for a run see the identical channel realization
//! (paired comparison), and the result fold is ordered by task index, so
//! output is invariant to the degree of parallelism.

use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ris_eq_core::baselines::{
    non_ris_isi, quantize_phases, random_phases, remark1_phases, QuantizerSpec,
};
use ris_eq_core::channel::{assemble_channels, build_geometry, ChannelSet};
use ris_eq_core::isi::{decomposition, max_isi_power, normalize_received_peak, IsiWindow};
use ris_eq_core::pso::optimize;
use ris_eq_core::rng::{child_seed, stream};

use crate::config::{ExperimentConfig, Scheme, SweepAxis};

/// Sub-stream indices under a run's child seed.
mod streams {
    pub const GEOMETRY: u64 = 0;
    pub const FADING: u64 = 1;
    pub const REFLECTION: u64 = 2;
    pub const SCHEME: u64 = 3;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Child seed of the run (shared by all schemes of the run).
    pub seed: u64,
    pub scheme: Scheme,
    pub axis: String,
    pub axis_value: f64,
    /// Maximum normalized ISI power across users.
    pub eta_linear: f64,
    /// `10·log10(eta)`; absent when eta is exactly zero.
    pub eta_db: Option<f64>,
    pub per_user: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: String,
    pub axis_value: f64,
    pub scheme: Scheme,
    pub runs: usize,
    /// Mean over linear η.
    pub mean_eta_linear: f64,
    /// `10·log10` of the linear mean.
    pub mean_eta_db: Option<f64>,
    /// Mean of the per-run dB values (runs with η = 0 excluded); emitted
    /// alongside the linear-mean aggregation to sidestep the averaging
    /// ambiguity.
    pub mean_db_of_runs: Option<f64>,
    /// Sample standard deviation of linear η.
    pub std_eta_linear: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloOutput {
    pub results: Vec<RunResult>,
    pub summaries: Vec<SweepSummary>,
}

fn to_db(eta: f64) -> Option<f64> {
    (eta > 0.0).then(|| 10.0 * eta.log10())
}

/// Draw the (peak-normalized) channel realization for one run.
fn draw_channels(cfg: &ExperimentConfig, run_index: u64) -> Result<(ChannelSet, u64)> {
    let child = child_seed(cfg.master_seed, run_index);
    let geometry_child = if cfg.redraw_users {
        child
    } else {
        child_seed(cfg.master_seed, 0)
    };
    let mut geometry_rng = stream(child_seed(geometry_child, streams::GEOMETRY));
    let geom = build_geometry(&cfg.geometry(), &mut geometry_rng)
        .map_err(|e| anyhow!("geometry: {e}"))?;
    let mut fading_rng = stream(child_seed(child, streams::FADING));
    let mut reflection_rng = stream(child_seed(child, streams::REFLECTION));
    let ch = assemble_channels(&geom, &cfg.channel_model(), &mut fading_rng, &mut reflection_rng)
        .map_err(|e| anyhow!("channel assembly: {e}"))?;
    Ok((normalize_received_peak(&ch), child))
}

/// Execute one (run, scheme) cell. The channel realization depends only
/// on the run index, never on the scheme.
pub fn run_single(
    cfg: &ExperimentConfig,
    run_index: u64,
    scheme: Scheme,
    axis: SweepAxis,
    axis_value: f64,
) -> Result<RunResult> {
    let (ch, child) = draw_channels(cfg, run_index)?;
    let w = IsiWindow(cfg.window);
    let dec = decomposition(&ch, w);
    let started = Instant::now();

    let (eta, per_user, iterations, converged) = match scheme {
        Scheme::NonRis => {
            let dec_free = decomposition(&ch.without_ris(), w);
            let eta = non_ris_isi(&ch, w);
            let (_, per_user) = max_isi_power(&dec_free, &[]);
            (eta, per_user, 0, true)
        }
        Scheme::Rps => {
            let mut rng = stream(child_seed(child, streams::SCHEME));
            let theta = random_phases(ch.num_elements(), &mut rng);
            let (eta, per_user) = max_isi_power(&dec, &theta);
            (eta, per_user, 0, true)
        }
        Scheme::Remark1 => {
            let theta = remark1_phases(ch.num_elements()).map_err(|e| anyhow!("{e}"))?;
            let (eta, per_user) = max_isi_power(&dec, &theta);
            (eta, per_user, 0, true)
        }
        Scheme::Pso => {
            let mut rng = stream(child_seed(child, streams::SCHEME));
            let sol = optimize(&ch, w, &cfg.pso(), &mut rng).map_err(|e| anyhow!("pso: {e}"))?;
            (sol.eta, sol.per_user, sol.iterations, sol.converged)
        }
        Scheme::Dps => {
            // Quantize the optimized phases of the same realization: the
            // scheme stream matches the PSO scheme's, so the continuous
            // solution is identical.
            let mut rng = stream(child_seed(child, streams::SCHEME));
            let sol = optimize(&ch, w, &cfg.pso(), &mut rng).map_err(|e| anyhow!("pso: {e}"))?;
            let q = QuantizerSpec::new(cfg.quantizer_bits).map_err(|e| anyhow!("{e}"))?;
            let theta = quantize_phases(&sol.theta, &q);
            let (eta, per_user) = max_isi_power(&dec, &theta);
            (eta, per_user, sol.iterations, sol.converged)
        }
    };

    let wall_time_s = if cfg.record_timing {
        started.elapsed().as_secs_f64()
    } else {
        0.0
    };

    Ok(RunResult {
        seed: child,
        scheme,
        axis: axis.name().to_string(),
        axis_value,
        eta_linear: eta,
        eta_db: to_db(eta),
        per_user,
        iterations,
        converged,
        wall_time_s,
    })
}

fn summarize(axis: SweepAxis, axis_value: f64, scheme: Scheme, rows: &[&RunResult]) -> SweepSummary {
    let n = rows.len();
    let mean: f64 = rows.iter().map(|r| r.eta_linear).sum::<f64>() / n as f64;
    let var = if n > 1 {
        rows.iter()
            .map(|r| (r.eta_linear - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    } else {
        0.0
    };
    let db_values: Vec<f64> = rows.iter().filter_map(|r| r.eta_db).collect();
    let mean_db_of_runs = if db_values.is_empty() {
        None
    } else {
        Some(db_values.iter().sum::<f64>() / db_values.len() as f64)
    };
    SweepSummary {
        axis: axis.name().to_string(),
        axis_value,
        scheme,
        runs: n,
        mean_eta_linear: mean,
        mean_eta_db: to_db(mean),
        mean_db_of_runs,
        std_eta_linear: var.sqrt(),
    }
}

/// Run all configured (axis value, run, scheme) cells.
///
/// A config without a sweep is treated as a single-point sweep over `L`.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<MonteCarloOutput> {
    let (axis, values) = match &cfg.sweep {
        Some(s) => (s.axis, s.values.clone()),
        None => (SweepAxis::L, vec![cfg.num_paths as f64]),
    };

    // Resolve the effective config per axis value up front so validation
    // errors surface before any work is spent.
    let mut points = Vec::with_capacity(values.len());
    for &v in &values {
        let effective = cfg
            .clone()
            .with_axis_value(axis, v)
            .with_context(|| format!("sweep value {v}"))?;
        points.push((v, effective));
    }

    let mut tasks = Vec::new();
    for (point_idx, (value, _)) in points.iter().enumerate() {
        for run_index in 0..cfg.runs as u64 {
            for &scheme in &cfg.schemes {
                tasks.push((point_idx, *value, run_index, scheme));
            }
        }
    }

    let results: Vec<RunResult> = tasks
        .par_iter()
        .map(|&(point_idx, value, run_index, scheme)| {
            run_single(&points[point_idx].1, run_index, scheme, axis, value)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::new();
    for (value, _) in points.iter() {
        for &scheme in &cfg.schemes {
            let rows: Vec<&RunResult> = results
                .iter()
                .filter(|r| r.scheme == scheme && r.axis_value == *value)
                .collect();
            summaries.push(summarize(axis, *value, scheme, &rows));
        }
    }

    Ok(MonteCarloOutput { results, summaries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            runs: 3,
            num_paths: 10,
            num_elements: 16,
            max_iters: 50,
            record_timing: false,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn schemes_share_the_channel_realization() {
        let cfg = small_cfg();
        let a = run_single(&cfg, 1, Scheme::Rps, SweepAxis::L, 10.0).unwrap();
        let b = run_single(&cfg, 1, Scheme::NonRis, SweepAxis::L, 10.0).unwrap();
        assert_eq!(a.seed, b.seed);
        // With reflection disabled RPS collapses onto the non-RIS result.
        let zero_gamma = ExperimentConfig {
            reflection: 0.0,
            ..cfg
        };
        let a = run_single(&zero_gamma, 1, Scheme::Rps, SweepAxis::L, 10.0).unwrap();
        let b = run_single(&zero_gamma, 1, Scheme::NonRis, SweepAxis::L, 10.0).unwrap();
        assert!((a.eta_linear - b.eta_linear).abs() < 1e-15 * a.eta_linear.max(1.0));
    }

    #[test]
    fn single_path_non_ris_has_no_isi() {
        let cfg = ExperimentConfig {
            num_paths: 1,
            ..small_cfg()
        };
        let r = run_single(&cfg, 0, Scheme::NonRis, SweepAxis::L, 1.0).unwrap();
        assert_eq!(r.eta_linear, 0.0);
        assert_eq!(r.eta_db, None);
    }

    #[test]
    fn dps_quantizes_the_pso_solution() {
        let cfg = small_cfg();
        let pso = run_single(&cfg, 2, Scheme::Pso, SweepAxis::L, 10.0).unwrap();
        let dps = run_single(&cfg, 2, Scheme::Dps, SweepAxis::L, 10.0).unwrap();
        // Same inner optimization: identical iteration counts.
        assert_eq!(pso.iterations, dps.iterations);
        assert_eq!(pso.converged, dps.converged);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let cfg = ExperimentConfig {
            runs: 2,
            ..small_cfg()
        };
        let a = run_monte_carlo(&cfg).unwrap();
        let b = run_monte_carlo(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_produces_one_summary_per_scheme_and_value() {
        let cfg = ExperimentConfig {
            runs: 2,
            schemes: vec![Scheme::NonRis, Scheme::Rps],
            sweep: Some(crate::config::SweepSpec {
                axis: SweepAxis::L,
                values: vec![5.0, 10.0, 20.0],
            }),
            ..small_cfg()
        };
        let out = run_monte_carlo(&cfg).unwrap();
        assert_eq!(out.summaries.len(), 6);
        assert_eq!(out.results.len(), 2 * 2 * 3);
        for s in &out.summaries {
            assert_eq!(s.runs, 2);
        }
    }

    #[test]
    fn fixed_user_mode_reuses_positions() {
        let cfg = ExperimentConfig {
            redraw_users: false,
            schemes: vec![Scheme::NonRis],
            num_paths: 1,
            ..small_cfg()
        };
        // L=1, no fading variation in position: with fixed users the
        // direct distances agree across runs, so the peak-normalized
        // direct gain is identical. Compare via a reflected-tap scale
        // proxy: draw two runs and check the geometry-dependent part.
        let a = draw_channels(&cfg, 0).unwrap().0;
        let b = draw_channels(&cfg, 5).unwrap().0;
        for k in 0..a.num_users() {
            // The random fading phase perturbs the norm by rounding only.
            let (x, y) = (a.reflected[k][0].gain.norm(), b.reflected[k][0].gain.norm());
            assert!((x - y).abs() < 1e-14 * x, "{x} vs {y}");
        }
    }
}
