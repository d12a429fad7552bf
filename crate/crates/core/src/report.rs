//! Run configuration and the report envelope shared by all suites.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

/// splitmix64 finalizer applied to `seed ^ (index * golden)`; stable task
/// seeds for parallel work that do not depend on evaluation order.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub r_max: f64,
    pub grid_points: usize,
    pub frame_budget: usize,
    pub output_dir: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            r_max: 10.0,
            grid_points: 121,
            frame_budget: 100_000,
            output_dir: PathBuf::from("reports"),
            format: Format::Json,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(format!("r_max = {} must be positive", self.r_max));
        }
        if self.grid_points == 0 {
            return Err("grid_points must be positive".into());
        }
        if self.frame_budget == 0 {
            return Err("frame_budget must be positive".into());
        }
        Ok(())
    }
}

/// Pass/fail record of one suite. `timing` is wall-clock seconds and is kept
/// out of the serialized report so identical runs give identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub pass: bool,
    pub witnesses: serde_json::Value,
    pub config: RunConfig,
    pub seed_mixing: String,
    #[serde(skip)]
    pub timing: f64,
}

impl VerificationReport {
    pub fn new(suite: &str, pass: bool, witnesses: serde_json::Value, config: &RunConfig) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            pass,
            witnesses,
            config: config.clone(),
            seed_mixing: "task seed = splitmix64(seed ^ index * 0x9E3779B97F4A7C15)".into(),
            timing: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}
