//! Core spectrum types and preprocessing: baseline removal, cropping, and
//! peak normalization.
//!
//! A [`Spectrum`] is immutable after construction and all operations return
//! new values, so spectra can be shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of samples for a spectrum or crop window. Peak position and
/// FWHM interpolation stop being meaningful below this.
pub const MIN_POINTS: usize = 8;

/// A sampled Raman spectrum: intensity versus wavenumber (cm^-1).
///
/// Invariants, enforced at construction:
/// - both sequences have the same length, at least [`MIN_POINTS`];
/// - wavenumbers are finite and strictly increasing;
/// - intensities are finite (negative values are allowed: baseline
///   subtraction deliberately does not clamp).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    wavenumbers: Vec<f64>,
    intensities: Vec<f64>,
}

impl Spectrum {
    pub fn new(wavenumbers: Vec<f64>, intensities: Vec<f64>) -> Result<Self> {
        if wavenumbers.len() != intensities.len() {
            return Err(Error::Validation(format!(
                "wavenumber/intensity length mismatch: {} vs {}",
                wavenumbers.len(),
                intensities.len()
            )));
        }
        if wavenumbers.len() < MIN_POINTS {
            return Err(Error::InsufficientData {
                needed: MIN_POINTS,
                got: wavenumbers.len(),
            });
        }
        if wavenumbers.iter().any(|w| !w.is_finite()) || intensities.iter().any(|y| !y.is_finite())
        {
            return Err(Error::Validation("non-finite sample value".into()));
        }
        for pair in wavenumbers.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::Validation(format!(
                    "wavenumbers not strictly increasing at {} -> {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            wavenumbers,
            intensities,
        })
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    pub fn max_intensity(&self) -> f64 {
        self.intensities
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Removes a straight-line baseline anchored at the component-wise
    /// medians of the first and last `ceil(edge_fraction * n)` samples.
    ///
    /// `edge_fraction` must lie in (0, 0.4]. The output may contain small
    /// negative intensities; no clamping is applied because clamping biases
    /// downstream least-squares fits.
    pub fn subtract_baseline(&self, edge_fraction: f64) -> Result<Spectrum> {
        if !(edge_fraction > 0.0 && edge_fraction <= 0.4) {
            return Err(Error::Validation(format!(
                "edge_fraction {edge_fraction} outside (0, 0.4]"
            )));
        }
        let n = self.len();
        let k = ((edge_fraction * n as f64).ceil() as usize).max(1);
        let x1 = median(&self.wavenumbers[..k]);
        let y1 = median(&self.intensities[..k]);
        let x2 = median(&self.wavenumbers[n - k..]);
        let y2 = median(&self.intensities[n - k..]);
        let slope = (y2 - y1) / (x2 - x1);
        let corrected: Vec<f64> = self
            .wavenumbers
            .iter()
            .zip(&self.intensities)
            .map(|(&w, &y)| y - (y1 + slope * (w - x1)))
            .collect();
        Spectrum::new(self.wavenumbers.clone(), corrected)
    }

    /// Returns the sub-spectrum with `lo <= wavenumber <= hi`.
    pub fn crop_window(&self, lo: f64, hi: f64) -> Result<Spectrum> {
        if !(lo < hi) {
            return Err(Error::Validation(format!(
                "crop window [{lo}, {hi}] is not an interval"
            )));
        }
        let mut ws = Vec::new();
        let mut ys = Vec::new();
        for (&w, &y) in self.wavenumbers.iter().zip(&self.intensities) {
            if w >= lo && w <= hi {
                ws.push(w);
                ys.push(y);
            }
        }
        if ws.len() < MIN_POINTS {
            return Err(Error::InsufficientData {
                needed: MIN_POINTS,
                got: ws.len(),
            });
        }
        Spectrum::new(ws, ys)
    }

    /// Rescales intensities so the maximum equals exactly 1.0.
    pub fn normalize_peak(&self) -> Result<Spectrum> {
        let max = self.max_intensity();
        if !(max > 0.0) {
            return Err(Error::Validation(format!(
                "cannot normalize: maximum intensity {max} is not positive"
            )));
        }
        let scaled: Vec<f64> = self.intensities.iter().map(|&y| y / max).collect();
        Spectrum::new(self.wavenumbers.clone(), scaled)
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Acquisition metadata for one recorded spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMeta {
    /// Excitation wavelength in nm.
    pub wavelength_nm: f64,
    /// Laser power before neutral-density filters, in microwatts.
    #[serde(rename = "source_power_uW")]
    pub source_power_uw: f64,
    /// Neutral-density filter optical density (power is attenuated by
    /// 10^-OD).
    pub filter_od: f64,
    /// Nominal catalyst diameter in nm, when known.
    #[serde(default)]
    pub catalyst_size_nm: Option<f64>,
    /// Free-text sample label.
    #[serde(default)]
    pub label: String,
}

impl MeasurementMeta {
    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength_nm > 0.0) {
            return Err(Error::Validation(format!(
                "wavelength_nm must be positive, got {}",
                self.wavelength_nm
            )));
        }
        if !(self.source_power_uw > 0.0) {
            return Err(Error::Validation(format!(
                "source_power_uW must be positive, got {}",
                self.source_power_uw
            )));
        }
        if !(self.filter_od >= 0.0) {
            return Err(Error::Validation(format!(
                "filter_od must be >= 0, got {}",
                self.filter_od
            )));
        }
        if let Some(d) = self.catalyst_size_nm {
            if !(d > 0.0) {
                return Err(Error::Validation(format!(
                    "catalyst_size_nm must be positive, got {d}"
                )));
            }
        }
        Ok(())
    }

    /// Power reaching the sample: source power attenuated by the filter.
    pub fn delivered_power_uw(&self) -> f64 {
        self.source_power_uw * 10f64.powf(-self.filter_od)
    }
}
