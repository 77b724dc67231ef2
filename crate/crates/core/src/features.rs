//! Peak feature extraction and feature-versus-power regression.
//!
//! A peak is summarized by four numbers: sub-sample position from a 3-point
//! parabola through the discrete maximum, interpolated amplitude, FWHM from
//! linearly interpolated half-maximum crossings, and the asymmetry ratio
//! left half-width / right half-width. Confined nanowire peaks develop a
//! low-frequency tail, so their asymmetry exceeds 1.
//!
//! Feature-versus-power series are reduced with a first-order (straight
//! line) fit; the intercept is the zero-power estimate of the feature, free
//! of laser heating.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ols_line;
pub use crate::numeric::LineFit;
use crate::spectrum::Spectrum;

/// Scalar summary of a single Raman peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakFeatures {
    /// Peak position in cm^-1.
    pub position: f64,
    /// Full width at half maximum in cm^-1.
    pub fwhm: f64,
    /// Left half-width divided by right half-width (dimensionless).
    pub asymmetry: f64,
    /// Interpolated peak height, in the units of the input intensities.
    pub amplitude: f64,
}

/// Extracts peak features from a baseline-corrected spectrum.
///
/// The global maximum must be strictly interior; a maximum on the first or
/// last sample means there is no usable peak. Both half-maximum crossings
/// must exist inside the sampled window.
pub fn extract_features(spectrum: &Spectrum) -> Result<PeakFeatures> {
    let ws = spectrum.wavenumbers();
    let ys = spectrum.intensities();
    let n = ys.len();

    let mut imax = 0;
    for i in 1..n {
        if ys[i] > ys[imax] {
            imax = i;
        }
    }
    if imax == 0 || imax == n - 1 {
        return Err(Error::NoPeak(format!(
            "global maximum sits on the {} edge of the window",
            if imax == 0 { "low" } else { "high" }
        )));
    }

    let (position, amplitude) = parabolic_vertex(
        ws[imax - 1],
        ys[imax - 1],
        ws[imax],
        ys[imax],
        ws[imax + 1],
        ys[imax + 1],
    );
    if !(amplitude > 0.0) {
        return Err(Error::NoPeak(format!(
            "interpolated peak amplitude {amplitude} is not positive"
        )));
    }
    let half = amplitude / 2.0;

    // Walk outward from the maximum to the first crossing on each side.
    let mut left = None;
    for j in (0..imax).rev() {
        if ys[j] < half {
            let t = (half - ys[j]) / (ys[j + 1] - ys[j]);
            left = Some(ws[j] + t * (ws[j + 1] - ws[j]));
            break;
        }
    }
    let mut right = None;
    for j in imax + 1..n {
        if ys[j] < half {
            let t = (half - ys[j - 1]) / (ys[j] - ys[j - 1]);
            right = Some(ws[j - 1] + t * (ws[j] - ws[j - 1]));
            break;
        }
    }
    let (left, right) = match (left, right) {
        (Some(l), Some(r)) => (l, r),
        (None, _) => {
            return Err(Error::IncompletePeak(
                "no half-maximum crossing on the low-frequency side".into(),
            ))
        }
        (_, None) => {
            return Err(Error::IncompletePeak(
                "no half-maximum crossing on the high-frequency side".into(),
            ))
        }
    };
    if !(left < position && position < right) {
        return Err(Error::IncompletePeak(format!(
            "half-maximum crossings [{left}, {right}] do not bracket the peak at {position}"
        )));
    }

    Ok(PeakFeatures {
        position,
        fwhm: right - left,
        asymmetry: (position - left) / (right - position),
        amplitude,
    })
}

/// Vertex of the parabola through three points (grid spacing may be
/// non-uniform). Falls back to the central sample when the three points are
/// collinear.
fn parabolic_vertex(x1: f64, y1: f64, x2: f64, y2: f64, x3: f64, y3: f64) -> (f64, f64) {
    let d1 = x2 - x1;
    let d2 = x3 - x2;
    let denom = (y1 - y2) * d2 + (y3 - y2) * d1;
    if denom == 0.0 {
        return (x2, y2);
    }
    let position = x2 + 0.5 * ((y1 - y2) * d2 * d2 - (y3 - y2) * d1 * d1) / denom;
    // Evaluate the interpolating quadratic at the vertex (Lagrange form).
    let l1 = (position - x2) * (position - x3) / ((x1 - x2) * (x1 - x3));
    let l2 = (position - x1) * (position - x3) / ((x2 - x1) * (x2 - x3));
    let l3 = (position - x1) * (position - x2) / ((x3 - x1) * (x3 - x2));
    (position, y1 * l1 + y2 * l2 + y3 * l3)
}

/// A feature value recorded at several delivered laser powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    entries: Vec<(f64, f64)>,
}

impl PowerSeries {
    /// Builds a series of (delivered_power_uW, value) pairs. Powers must be
    /// positive and pairwise distinct, with at least two entries.
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: entries.len(),
            });
        }
        for &(p, v) in &entries {
            if !(p > 0.0) || !p.is_finite() {
                return Err(Error::Validation(format!(
                    "delivered power must be positive and finite, got {p}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!("non-finite series value {v}")));
            }
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                if entries[i].0 == entries[j].0 {
                    return Err(Error::RankDeficient(format!(
                        "duplicate power {} uW makes the line fit rank deficient",
                        entries[i].0
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }
}

/// First-order fit of a feature against delivered power. The intercept is
/// the zero-power (heating-free) feature estimate.
pub fn fit_feature_vs_power(series: &PowerSeries) -> LineFit {
    let xs: Vec<f64> = series.entries.iter().map(|e| e.0).collect();
    let ys: Vec<f64> = series.entries.iter().map(|e| e.1).collect();
    ols_line(&xs, &ys)
}
