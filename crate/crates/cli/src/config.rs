//! Run configuration: model parameters, absorption table, and thermometry
//! constants, loaded from a single JSON file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ramanwire::thermal::{default_absorption_table, AbsorptionTable, KAPPA_BULK_GE};
use ramanwire::RcfParams;

use crate::CliError;

/// Configuration for a run. Every field has a sensible default so the tool
/// works without a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Forward-model parameters.
    pub params: RcfParams,
    /// Absorption coefficients (cm^-1) per excitation wavelength, keys
    /// formatted with three decimals.
    pub absorption_table: AbsorptionTable,
    /// Proportionality coefficient of the anti-Stokes/Stokes ratio.
    pub gamma_coeff: f64,
    /// Bulk thermal conductivity reference in W/(m K).
    pub kappa_bulk: f64,
    /// Heat-path dimension ratio L/A (layer thickness over heated
    /// cross-section). Recorded for provenance only: the bulk-relative
    /// conductivity estimate cancels it.
    pub heat_path_ratio: Option<f64>,
    /// Conducted heat per measurement. Recorded for provenance only, like
    /// `heat_path_ratio`.
    pub conducted_heat: Option<f64>,
    /// Default output directory; the `--out` flag overrides it.
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: RcfParams::default(),
            absorption_table: default_absorption_table(),
            gamma_coeff: 1.0,
            kappa_bulk: KAPPA_BULK_GE,
            heat_path_ratio: None,
            conducted_heat: None,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if !(self.gamma_coeff > 0.0) {
            return Err(CliError::Usage(format!(
                "gamma_coeff must be positive, got {}",
                self.gamma_coeff
            )));
        }
        if !(self.kappa_bulk > 0.0) {
            return Err(CliError::Usage(format!(
                "kappa_bulk must be positive, got {}",
                self.kappa_bulk
            )));
        }
        for (name, value) in [
            ("heat_path_ratio", self.heat_path_ratio),
            ("conducted_heat", self.conducted_heat),
        ] {
            if let Some(v) = value {
                if !(v > 0.0) {
                    return Err(CliError::Usage(format!(
                        "{name} must be positive when given, got {v}"
                    )));
                }
            }
        }
        for (key, alpha) in &self.absorption_table {
            if !(*alpha > 0.0) {
                return Err(CliError::Usage(format!(
                    "absorption coefficient for {key} nm must be positive, got {alpha}"
                )));
            }
        }
        Ok(())
    }
}
