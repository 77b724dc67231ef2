//! Stokes/anti-Stokes thermometry and relative thermal-conductivity
//! estimation.
//!
//! The anti-Stokes to Stokes intensity ratio of a phonon line rises with
//! local temperature, so the slope of ln(I_AS/I_S) against delivered laser
//! power measures how strongly the laser heats a sample. Comparing a
//! sample's slope with the bulk reference slope gives a thermal conductivity
//! relative to bulk: more heating per microwatt means poorer conduction, so
//! kappa = kappa_bulk * r_bulk / r_sample with r the absolute ln-ratio
//! slope. Only slope ratios enter, which cancels the proportionality
//! coefficient of the ratio-temperature relation, the conducted heat, and
//! the heat-path geometry.
//!
//! Absolute temperatures use the Boltzmann relation
//! `I_AS/I_S = gamma * exp(-nu / (k_B T))` with the wavenumber Boltzmann
//! constant [`BOLTZMANN_CM_PER_K`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_features, PowerSeries};
use crate::numeric::{ols_line, trapezoid};
use crate::spectrum::{MeasurementMeta, Spectrum};

/// Boltzmann constant in wavenumber units, cm^-1 per kelvin.
pub const BOLTZMANN_CM_PER_K: f64 = 0.695035;

/// Bulk germanium thermal conductivity in W/(m K), the reference for
/// relative estimates.
pub const KAPPA_BULK_GE: f64 = 59.9;

/// Maximum allowed mismatch between the Stokes and anti-Stokes peak
/// positions (cm^-1) after mirroring; the two bands probe the same phonon.
const PEAK_MATCH_TOL: f64 = 5.0;

/// A matched pair of Stokes and anti-Stokes bands from one measurement.
///
/// The anti-Stokes band may be supplied on its native negative-shift axis;
/// it is mirrored onto positive shifts at construction so one peak pipeline
/// serves both bands.
#[derive(Debug, Clone, PartialEq)]
pub struct StokesPair {
    stokes: Spectrum,
    antistokes: Spectrum,
    meta: MeasurementMeta,
}

impl StokesPair {
    pub fn new(stokes: Spectrum, antistokes: Spectrum, meta: MeasurementMeta) -> Result<Self> {
        meta.validate()?;
        let antistokes = if antistokes.wavenumbers().iter().all(|&w| w < 0.0) {
            mirror_to_positive(&antistokes)?
        } else {
            antistokes
        };
        let fs = extract_features(&stokes)?;
        let fa = extract_features(&antistokes)?;
        if (fs.position - fa.position).abs() > PEAK_MATCH_TOL {
            return Err(Error::Validation(format!(
                "Stokes and anti-Stokes peaks at |shift| {:.2} and {:.2} cm^-1 do not match",
                fs.position, fa.position
            )));
        }
        Ok(Self {
            stokes,
            antistokes,
            meta,
        })
    }

    pub fn stokes(&self) -> &Spectrum {
        &self.stokes
    }

    /// Anti-Stokes band on the positive-shift axis.
    pub fn antistokes(&self) -> &Spectrum {
        &self.antistokes
    }

    pub fn meta(&self) -> &MeasurementMeta {
        &self.meta
    }
}

/// Reflects a negative-shift band onto positive shifts, preserving ascending
/// wavenumber order.
fn mirror_to_positive(spectrum: &Spectrum) -> Result<Spectrum> {
    let ws: Vec<f64> = spectrum.wavenumbers().iter().rev().map(|&w| -w).collect();
    let ys: Vec<f64> = spectrum.intensities().iter().rev().copied().collect();
    Spectrum::new(ws, ys)
}

/// Anti-Stokes to Stokes ratio of integrated band areas (trapezoidal rule
/// over the baseline-corrected, cropped bands).
pub fn stokes_antistokes_ratio(pair: &StokesPair) -> Result<f64> {
    // Both bands passed feature extraction at construction; areas of peaked
    // bands are positive.
    let area_s = trapezoid(pair.stokes.wavenumbers(), pair.stokes.intensities());
    let area_as = trapezoid(pair.antistokes.wavenumbers(), pair.antistokes.intensities());
    if !(area_s > 0.0) {
        return Err(Error::Validation(format!(
            "Stokes band area {area_s} is not positive"
        )));
    }
    Ok(area_as / area_s)
}

/// Convention for converting a ratio to a temperature quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureConvention {
    /// Absolute temperature from the Boltzmann relation; defined only while
    /// ratio < gamma.
    Boltzmann,
    /// ln(ratio) as a temperature-proportional index. No absolute
    /// calibration; only differences of the index are meaningful, which is
    /// all the conductivity pipeline uses.
    PaperLinear,
}

/// Converts an anti-Stokes/Stokes ratio to a temperature (kelvin, Boltzmann
/// convention) or to the linear temperature index ln(ratio).
pub fn temperature_from_ratio(
    ratio: f64,
    nu_tilde: f64,
    gamma_coeff: f64,
    convention: TemperatureConvention,
) -> Result<f64> {
    if !(ratio > 0.0) {
        return Err(Error::Domain(format!(
            "ratio must be positive, got {ratio}"
        )));
    }
    if !(nu_tilde > 0.0) {
        return Err(Error::Domain(format!(
            "phonon wavenumber must be positive, got {nu_tilde}"
        )));
    }
    if !(gamma_coeff > 0.0) {
        return Err(Error::Domain(format!(
            "gamma coefficient must be positive, got {gamma_coeff}"
        )));
    }
    match convention {
        TemperatureConvention::Boltzmann => {
            let log_term = (ratio / gamma_coeff).ln();
            if log_term >= 0.0 {
                return Err(Error::NonphysicalRatio { ratio, gamma_coeff });
            }
            Ok(-nu_tilde / (BOLTZMANN_CM_PER_K * log_term))
        }
        TemperatureConvention::PaperLinear => Ok(ratio.ln()),
    }
}

/// Boltzmann-model ratio gamma * exp(-nu / (k_B T)), the inverse of
/// [`temperature_from_ratio`] in the Boltzmann convention.
pub fn boltzmann_ratio(temperature_k: f64, nu_tilde: f64, gamma_coeff: f64) -> f64 {
    gamma_coeff * (-nu_tilde / (BOLTZMANN_CM_PER_K * temperature_k)).exp()
}

/// Absolute slope of ln(ratio) against delivered power, by ordinary least
/// squares over a [`PowerSeries`] of (power, ln ratio) entries.
pub fn fit_ratio_slope(series: &PowerSeries) -> f64 {
    let xs: Vec<f64> = series.entries().iter().map(|e| e.0).collect();
    let ys: Vec<f64> = series.entries().iter().map(|e| e.1).collect();
    ols_line(&xs, &ys).slope.abs()
}

/// A relative thermal-conductivity estimate with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    /// Estimated thermal conductivity in W/(m K).
    pub kappa: f64,
    /// Absolute ln-ratio-per-microwatt slope of the sample.
    pub slope_sample: f64,
    /// Absolute ln-ratio-per-microwatt slope of the bulk reference.
    pub slope_bulk: f64,
    /// Bulk conductivity the estimate is relative to, W/(m K).
    pub kappa_bulk: f64,
}

/// Relative thermal conductivity kappa = kappa_bulk * r_bulk / r_sample.
///
/// A steeper ln-ratio slope means more heating per delivered microwatt and
/// therefore a lower conductivity.
pub fn relative_kappa(r_sample: f64, r_bulk: f64, kappa_bulk: f64) -> Result<KappaEstimate> {
    for (name, v) in [("sample slope", r_sample), ("bulk slope", r_bulk)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(kappa_bulk > 0.0) || !kappa_bulk.is_finite() {
        return Err(Error::Domain(format!(
            "bulk conductivity must be positive, got {kappa_bulk}"
        )));
    }
    Ok(KappaEstimate {
        kappa: kappa_bulk * (r_bulk / r_sample),
        slope_sample: r_sample,
        slope_bulk: r_bulk,
        kappa_bulk,
    })
}

/// Absorption coefficients (cm^-1) keyed by excitation wavelength rendered
/// with three decimals, e.g. `"514.523"`.
pub type AbsorptionTable = BTreeMap<String, f64>;

/// Formats a wavelength as an absorption-table key.
pub fn absorption_key(wavelength_nm: f64) -> String {
    format!("{wavelength_nm:.3}")
}

/// The shipped germanium table: 600 cm^-1 at the 514.523 nm Ar+ line and
/// 150 cm^-1 at the 633.817 nm Kr+ line.
pub fn default_absorption_table() -> AbsorptionTable {
    let mut table = BTreeMap::new();
    table.insert(absorption_key(514.523), 600.0);
    table.insert(absorption_key(633.817), 150.0);
    table
}

/// Maps a delivered power at one wavelength to the power at the reference
/// wavelength that deposits the same heat, using tabulated absorption
/// coefficients: power * alpha(wavelength) / alpha(reference).
pub fn equivalent_absorbed_power(
    power_uw: f64,
    wavelength_nm: f64,
    reference_wavelength_nm: f64,
    table: &AbsorptionTable,
) -> Result<f64> {
    if !(power_uw > 0.0) {
        return Err(Error::Domain(format!(
            "power must be positive, got {power_uw}"
        )));
    }
    let lookup = |nm: f64| -> Result<f64> {
        let key = absorption_key(nm);
        let alpha = table.get(&key).copied().ok_or(Error::MissingAbsorption {
            wavelength_key: key,
        })?;
        if !(alpha > 0.0) {
            return Err(Error::Validation(format!(
                "absorption coefficient for {nm} nm must be positive, got {alpha}"
            )));
        }
        Ok(alpha)
    };
    let alpha = lookup(wavelength_nm)?;
    let alpha_ref = lookup(reference_wavelength_nm)?;
    Ok(power_uw * alpha / alpha_ref)
}
