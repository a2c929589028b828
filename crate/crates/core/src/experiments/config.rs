//! Flat JSON experiment configuration.
//!
//! One object holds link parameters, sweep fields and Monte-Carlo settings
//! side by side, keyed by their field names. Every key is optional.
//!
//! ```json
//! { "antenna_noise_var": 0.02, "swept_parameter": "rate",
//!   "values": [1, 2, 3], "num_realizations": 50000 }
//! ```

use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::montecarlo::McSettings;

use super::SweepSpec;

const PARAM_KEYS: [&str; 11] = [
    "source_power",
    "harvesting_efficiency",
    "dist_source_relay",
    "dist_relay_dest",
    "path_loss_exponent",
    "antenna_noise_var",
    "conversion_noise_var",
    "fading_mean_sr",
    "fading_mean_rd",
    "rate",
    "block_time",
];

const MC_KEYS: [&str; 3] = ["num_realizations", "master_seed", "antithetic"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    pub spec: SweepSpec,
    pub monte_carlo: McSettings,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let object: Map<String, Value> = serde_json::from_str(text)?;
        let mut params = Map::new();
        let mut mc = Map::new();
        let mut spec = Map::new();
        for (k, v) in object {
            if PARAM_KEYS.contains(&k.as_str()) {
                params.insert(k, v);
            } else if MC_KEYS.contains(&k.as_str()) {
                mc.insert(k, v);
            } else {
                spec.insert(k, v);
            }
        }
        Ok(ExperimentConfig {
            params: serde_json::from_value(Value::Object(params))?,
            spec: serde_json::from_value(Value::Object(spec))?,
            monte_carlo: serde_json::from_value(Value::Object(mc))?,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}
