//! Experiment configuration: JSON schema, defaults, validation.
//!
//! Unknown keys are rejected outright so a typo cannot silently fall back
//! to a default. An empty config file means "all defaults".

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use ris_eq_core::channel::{
    ChannelModelConfig, GeometryConfig, PathLossParams, SvFadingParams,
};
use ris_eq_core::pso::{InitMode, PsoConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.to_string(),
    }
}

/// Benchmark schemes selectable per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Primal-dual phase shift optimization.
    Pso,
    /// Uniformly random phase shifts.
    Rps,
    /// Nearest-codebook quantization of the optimized phases.
    Dps,
    /// Spatial equalizer removed.
    NonRis,
    /// Alternating 0/π pairing.
    Remark1,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Pso => "pso",
            Scheme::Rps => "rps",
            Scheme::Dps => "dps",
            Scheme::NonRis => "non_ris",
            Scheme::Remark1 => "remark1",
        }
    }
}

/// Sweep axis for the benchmark experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    L,
    #[serde(rename = "sqrtN")]
    SqrtN,
    Gamma,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::L => "L",
            SweepAxis::SqrtN => "sqrtN",
            SweepAxis::Gamma => "Gamma",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "L" => Ok(SweepAxis::L),
            "sqrtN" => Ok(SweepAxis::SqrtN),
            "Gamma" => Ok(SweepAxis::Gamma),
            other => Err(format!("unknown sweep axis `{other}` (expected L, sqrtN or Gamma)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SvConfig {
    /// Cluster arrival rate, 1/symbol.
    pub cluster_rate: f64,
    /// Ray arrival rate, 1/symbol.
    pub ray_rate: f64,
    /// Cluster power decay, symbols.
    pub cluster_decay: f64,
    /// Ray power decay, symbols.
    pub ray_decay: f64,
}

impl Default for SvConfig {
    fn default() -> Self {
        Self {
            cluster_rate: 0.5,
            ray_rate: 2.0,
            cluster_decay: 50.0,
            ray_decay: 50.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitModeConfig {
    Zeros,
    UniformRandom,
    Remark1Pairs,
}

impl From<InitModeConfig> for InitMode {
    fn from(m: InitModeConfig) -> Self {
        match m {
            InitModeConfig::Zeros => InitMode::Zeros,
            InitModeConfig::UniformRandom => InitMode::UniformRandom,
            InitModeConfig::Remark1Pairs => InitMode::Remark1Pairs,
        }
    }
}

/// Full experiment description. Field names follow the usual symbols:
/// `K` users, `M` BS antennas, `N` RIS elements of side `a`, reflection
/// amplitude `Gamma`, path-loss exponent `alpha` with normalization
/// `G_dB`/`G_prime_dB`, symbol interval `T`, RIS offset `D`, `L` direct
/// paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(rename = "K")]
    pub num_users: usize,
    #[serde(rename = "M")]
    pub num_bs_antennas: usize,
    #[serde(rename = "N")]
    pub num_elements: usize,
    /// Require N to form a square element grid.
    pub grid: bool,
    #[serde(rename = "a")]
    pub element_size: f64,
    /// Carrier frequency, recorded for provenance only.
    pub carrier_hz: f64,
    #[serde(rename = "Gamma")]
    pub reflection: f64,
    pub alpha: f64,
    #[serde(rename = "G_dB")]
    pub g_db: f64,
    #[serde(rename = "G_prime_dB")]
    pub g_prime_db: f64,
    #[serde(rename = "T")]
    pub symbol_interval: f64,
    #[serde(rename = "D")]
    pub ris_offset: f64,
    pub bs_height: f64,
    pub ris_height: f64,
    pub bs_ris_horizontal: f64,
    pub square_side: f64,
    pub bs_to_square_center: f64,
    #[serde(rename = "L")]
    pub num_paths: usize,
    pub sv: SvConfig,
    /// ISI window: symbols after the peak included in the ISI sum.
    pub window: usize,
    pub runs: usize,
    pub master_seed: u64,
    /// Convergence threshold on the successive objective difference.
    pub sigma: f64,
    pub max_iters: usize,
    /// Extra random restarts of the optimizer per run.
    pub restarts: usize,
    pub step_eta: f64,
    pub step_mu: f64,
    /// Explicit phase step; omitted means scale-free auto selection.
    pub step_theta: Option<f64>,
    pub init_mode: InitModeConfig,
    pub quantizer_bits: u32,
    pub schemes: Vec<Scheme>,
    pub no_fading: bool,
    pub far_field: bool,
    /// Redraw user positions every run (else fixed across runs).
    pub redraw_users: bool,
    /// Meters of excess path length per reflected delay bin; omitted
    /// places every reflected tap one symbol after the peak.
    pub excess_delay_scale: Option<f64>,
    /// Record wall-clock time per run. Disable for byte-stable output.
    pub record_timing: bool,
    pub sweep: Option<SweepSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            num_users: 4,
            num_bs_antennas: 10,
            num_elements: 100,
            grid: true,
            element_size: 0.02,
            carrier_hz: 5.9e9,
            reflection: 1.0,
            alpha: 2.0,
            g_db: -43.0,
            g_prime_db: -43.0,
            symbol_interval: 1e-3,
            ris_offset: 50.0,
            bs_height: 25.0,
            ris_height: 25.0,
            bs_ris_horizontal: 100.0,
            square_side: 100.0,
            bs_to_square_center: 100.0,
            num_paths: 100,
            sv: SvConfig::default(),
            window: 16,
            runs: 300,
            master_seed: 0,
            sigma: 0.01,
            max_iters: 5000,
            restarts: 1,
            step_eta: 1e-2,
            step_mu: 1e-2,
            step_theta: None,
            init_mode: InitModeConfig::UniformRandom,
            quantizer_bits: 2,
            schemes: vec![Scheme::Pso, Scheme::Rps, Scheme::Dps, Scheme::NonRis],
            no_fading: false,
            far_field: true,
            redraw_users: true,
            excess_delay_scale: None,
            record_timing: true,
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    /// Parse a JSON config file; an empty (or whitespace-only) file maps
    /// to the defaults.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let trimmed = text.trim();
        let cfg: ExperimentConfig = if trimmed.is_empty() {
            ExperimentConfig::default()
        } else {
            serde_json::from_str(trimmed)?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.num_users == 0 {
            return Err(invalid("K", "must be at least 1"));
        }
        if self.num_elements == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if self.grid {
            let s = (self.num_elements as f64).sqrt().round() as usize;
            if s * s != self.num_elements {
                return Err(invalid(
                    "N",
                    format!("{} is not a perfect square (grid mode)", self.num_elements),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.reflection) {
            return Err(invalid("Gamma", "must lie in [0, 1]"));
        }
        if self.alpha < 0.0 {
            return Err(invalid("alpha", "must be non-negative"));
        }
        if self.element_size <= 0.0 {
            return Err(invalid("a", "must be positive"));
        }
        if self.symbol_interval <= 0.0 {
            return Err(invalid("T", "must be positive"));
        }
        if self.ris_offset <= 0.0 || self.bs_ris_horizontal < self.ris_offset {
            return Err(invalid("D", "requires 0 < D <= bs_ris_horizontal"));
        }
        if self.square_side < 0.0 || self.bs_to_square_center <= 0.0 {
            return Err(invalid("square_side", "geometry distances must be positive"));
        }
        if self.num_paths == 0 {
            return Err(invalid("L", "must be at least 1"));
        }
        if self.sv.cluster_rate <= 0.0
            || self.sv.ray_rate <= 0.0
            || self.sv.cluster_decay <= 0.0
            || self.sv.ray_decay <= 0.0
        {
            return Err(invalid("sv", "rates and decays must be positive"));
        }
        if self.window == 0 {
            return Err(invalid("window", "must be at least 1 symbol"));
        }
        if self.sigma <= 0.0 {
            return Err(invalid("sigma", "must be positive"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters", "must be at least 1"));
        }
        if self.step_eta <= 0.0 || self.step_mu <= 0.0 {
            return Err(invalid("step_eta", "step sizes must be positive"));
        }
        if let Some(s) = self.step_theta {
            if s <= 0.0 {
                return Err(invalid("step_theta", "must be positive when given"));
            }
        }
        if self.quantizer_bits == 0 {
            return Err(invalid("quantizer_bits", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme required"));
        }
        if self.schemes.contains(&Scheme::Remark1) && !self.num_elements.is_multiple_of(2) {
            return Err(invalid("schemes", "remark1 requires an even N"));
        }
        if self.runs == 0 {
            return Err(invalid("runs", "must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(invalid("sweep", "values must be non-empty"));
            }
            for &v in &sweep.values {
                self.clone().with_axis_value(sweep.axis, v)?;
            }
        }
        Ok(())
    }

    /// The config with one sweep-axis value substituted (and re-validated).
    pub fn with_axis_value(mut self, axis: SweepAxis, value: f64) -> Result<Self, ConfigError> {
        match axis {
            SweepAxis::L => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(invalid("sweep", format!("L value {value} must be a positive integer")));
                }
                self.num_paths = value as usize;
            }
            SweepAxis::SqrtN => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(invalid(
                        "sweep",
                        format!("sqrtN value {value} must be a positive integer"),
                    ));
                }
                let side = value as usize;
                self.num_elements = side * side;
            }
            SweepAxis::Gamma => {
                self.reflection = value;
            }
        }
        self.sweep = None;
        self.validate()?;
        Ok(self)
    }

    pub fn geometry(&self) -> GeometryConfig {
        GeometryConfig {
            num_users: self.num_users,
            num_bs_antennas: self.num_bs_antennas,
            num_elements: self.num_elements,
            element_size: self.element_size,
            bs_height: self.bs_height,
            ris_height: self.ris_height,
            ris_offset: self.ris_offset,
            bs_ris_horizontal: self.bs_ris_horizontal,
            square_side: self.square_side,
            bs_to_square_center: self.bs_to_square_center,
        }
    }

    pub fn channel_model(&self) -> ChannelModelConfig {
        ChannelModelConfig {
            path_loss: PathLossParams::from_db(self.g_db, self.g_prime_db, self.alpha),
            sv: SvFadingParams {
                cluster_rate: self.sv.cluster_rate,
                ray_rate: self.sv.ray_rate,
                cluster_decay: self.sv.cluster_decay,
                ray_decay: self.sv.ray_decay,
                num_paths: self.num_paths,
            },
            reflection: self.reflection,
            far_field: self.far_field,
            no_fading: self.no_fading,
            excess_delay_scale: self.excess_delay_scale,
            symbol_interval: self.symbol_interval,
        }
    }

    pub fn pso(&self) -> PsoConfig {
        PsoConfig {
            step_eta: self.step_eta,
            step_theta: self.step_theta,
            step_mu: self.step_mu,
            sigma: self.sigma,
            max_outer_iters: self.max_iters,
            num_restarts: self.restarts,
            init_mode: self.init_mode.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_yields_defaults() {
        let cfg = ExperimentConfig::from_json("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.num_users, 4);
        assert_eq!(cfg.num_elements, 100);
        assert_eq!(cfg.g_db, -43.0);
        assert_eq!(cfg.runs, 300);
    }

    #[test]
    fn gamma_out_of_range_rejected() {
        let err = ExperimentConfig::from_json(r#"{"Gamma": 1.5}"#).unwrap_err();
        assert!(err.to_string().contains("Gamma"), "{err}");
    }

    #[test]
    fn non_square_n_in_grid_mode_rejected() {
        let err = ExperimentConfig::from_json(r#"{"N": 101, "grid": true}"#).unwrap_err();
        assert!(err.to_string().contains("perfect square"), "{err}");
        // Without grid mode an arbitrary N is fine.
        let cfg = ExperimentConfig::from_json(r#"{"N": 101, "grid": false}"#).unwrap();
        assert_eq!(cfg.num_elements, 101);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ExperimentConfig::from_json(r#"{"Gama": 0.5}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn sweep_values_validated() {
        let err = ExperimentConfig::from_json(
            r#"{"sweep": {"axis": "sqrtN", "values": [4.5]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sqrtN"), "{err}");
        let cfg = ExperimentConfig::from_json(
            r#"{"sweep": {"axis": "sqrtN", "values": [4, 6]}}"#,
        )
        .unwrap();
        let sub = cfg.with_axis_value(SweepAxis::SqrtN, 6.0).unwrap();
        assert_eq!(sub.num_elements, 36);
    }

    #[test]
    fn effective_config_round_trips_through_json() {
        let cfg = ExperimentConfig::default();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }
}
