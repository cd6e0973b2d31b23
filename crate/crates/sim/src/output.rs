//! Result emission: CSV rows, JSON mirror with the effective config, and
//! a small console summary table.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::runner::{MonteCarloOutput, RunResult, SweepSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

pub const CSV_HEADER: &str =
    "seed,scheme,axis,axis_value,eta_linear,eta_db,iterations,converged,wall_time_s";

/// Render the run results as CSV. η = 0 leaves the dB field empty.
pub fn to_csv(results: &[RunResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        let eta_db = r.eta_db.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            r.scheme.name(),
            r.axis,
            r.axis_value,
            r.eta_linear,
            eta_db,
            r.iterations,
            r.converged,
            r.wall_time_s
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Everything a JSON consumer needs to reproduce the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub config: ExperimentConfig,
    pub results: Vec<RunResult>,
    pub summaries: Vec<SweepSummary>,
}

pub fn to_json(cfg: &ExperimentConfig, output: &MonteCarloOutput) -> Result<String> {
    let report = JsonReport {
        config: cfg.clone(),
        results: output.results.clone(),
        summaries: output.summaries.clone(),
    };
    let mut text = serde_json::to_string_pretty(&report).context("serializing results")?;
    text.push('\n');
    Ok(text)
}

/// Write results plus the effective-config echo into `out_dir`.
/// Returns the path of the results file.
pub fn emit(
    cfg: &ExperimentConfig,
    output: &MonteCarloOutput,
    format: OutputFormat,
    out_dir: &Path,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;

    let mut config_echo =
        serde_json::to_string_pretty(cfg).context("serializing effective config")?;
    config_echo.push('\n');
    let config_path = out_dir.join("config.json");
    std::fs::write(&config_path, config_echo)
        .with_context(|| format!("writing {}", config_path.display()))?;

    let path = match format {
        OutputFormat::Csv => {
            let path = out_dir.join("results.csv");
            std::fs::write(&path, to_csv(&output.results))
                .with_context(|| format!("writing {}", path.display()))?;
            path
        }
        OutputFormat::Json => {
            let path = out_dir.join("results.json");
            std::fs::write(&path, to_json(cfg, output)?)
                .with_context(|| format!("writing {}", path.display()))?;
            path
        }
    };
    Ok(path)
}

/// Console summary: one line per (axis value, scheme).
pub fn summary_table(summaries: &[SweepSummary]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:<6} {:>10} {:<8} {:>6} {:>14} {:>12}",
        "axis", "value", "scheme", "runs", "mean_eta", "mean_eta_db"
    )
    .unwrap();
    for s in summaries {
        let db = s
            .mean_eta_db
            .map(|v| format!("{v:.3}"))
            .unwrap_or_else(|| "-inf".to_string());
        writeln!(
            out,
            "{:<6} {:>10} {:<8} {:>6} {:>14.6e} {:>12}",
            s.axis,
            s.axis_value,
            s.scheme.name(),
            s.runs,
            s.mean_eta_linear,
            db
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scheme;

    fn row(eta: f64) -> RunResult {
        RunResult {
            seed: 42,
            scheme: Scheme::NonRis,
            axis: "L".to_string(),
            axis_value: 10.0,
            eta_linear: eta,
            eta_db: (eta > 0.0).then(|| 10.0 * eta.log10()),
            per_user: vec![eta],
            iterations: 0,
            converged: true,
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn empty_results_yield_header_only() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn zero_eta_leaves_db_field_empty() {
        let csv = to_csv(&[row(0.0)]);
        let line = csv.lines().nth(1).unwrap();
        assert_eq!(line, "42,non_ris,L,10,0,,0,true,0");
    }

    #[test]
    fn csv_ends_with_newline() {
        assert!(to_csv(&[row(0.5)]).ends_with('\n'));
    }

    #[test]
    fn json_round_trips_eta_exactly() {
        let cfg = ExperimentConfig::default();
        let out = MonteCarloOutput {
            results: vec![row(0.1234567890123456), row(0.0)],
            summaries: vec![],
        };
        let text = to_json(&cfg, &out).unwrap();
        assert!(text.ends_with('\n'));
        let back: JsonReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.results, out.results);
        assert_eq!(back.results[1].eta_db, None);
        assert!(text.contains("\"eta_db\": null"));
    }
}
