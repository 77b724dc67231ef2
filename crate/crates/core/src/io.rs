//! Reading and writing spectra and their metadata sidecars.
//!
//! Spectra travel as two-column plain text (wavenumber, intensity), one
//! sample per row, `#` starting a comment line. Columns may be separated by
//! a comma, whitespace, or both; files are written comma-separated. Numbers
//! always use `.` as the decimal point. Values are written in the shortest
//! form that parses back to the identical f64, so a save/load cycle is
//! bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spectrum::{MeasurementMeta, Spectrum, MIN_POINTS};

/// Parses two-column spectrum text. Rows may appear in any order; the result
/// is sorted by wavenumber. Duplicate wavenumbers are rejected.
pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').flat_map(str::split_whitespace).collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 columns, found {}", fields.len()),
            });
        }
        let parse_field = |s: &str, what: &str| -> Result<f64> {
            let v: f64 = s.parse().map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad {what} {s:?}: {e}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite {what} {s:?}"),
                });
            }
            Ok(v)
        };
        let w = parse_field(fields[0], "wavenumber")?;
        let y = parse_field(fields[1], "intensity")?;
        rows.push((w, y));
    }
    if rows.len() < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            got: rows.len(),
        });
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite wavenumbers"));
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Validation(format!(
                "duplicate wavenumber {}",
                pair[0].0
            )));
        }
    }
    let (ws, ys): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    Spectrum::new(ws, ys)
}

/// Loads a two-column spectrum file.
pub fn load_spectrum(path: impl AsRef<Path>) -> Result<Spectrum> {
    let text = fs::read_to_string(path.as_ref())?;
    parse_spectrum(&text)
}

/// Renders a spectrum in the two-column format accepted by
/// [`parse_spectrum`].
pub fn format_spectrum(spectrum: &Spectrum) -> String {
    let mut out = String::from("# wavenumber_cm-1,intensity\n");
    for (&w, &y) in spectrum.wavenumbers().iter().zip(spectrum.intensities()) {
        out.push_str(&format!("{w},{y}\n"));
    }
    out
}

/// Writes a spectrum as two-column text.
pub fn save_spectrum(path: impl AsRef<Path>, spectrum: &Spectrum) -> Result<()> {
    fs::write(path.as_ref(), format_spectrum(spectrum))?;
    Ok(())
}

/// Loads a metadata sidecar (JSON with keys `wavelength_nm`,
/// `source_power_uW`, `filter_od`, `catalyst_size_nm`, `label`).
pub fn load_meta(path: impl AsRef<Path>) -> Result<MeasurementMeta> {
    let text = fs::read_to_string(path.as_ref())?;
    let meta: MeasurementMeta = serde_json::from_str(&text)?;
    meta.validate()?;
    Ok(meta)
}

/// Writes a metadata sidecar.
pub fn save_meta(path: impl AsRef<Path>, meta: &MeasurementMeta) -> Result<()> {
    meta.validate()?;
    fs::write(path.as_ref(), serde_json::to_string_pretty(meta)?)?;
    Ok(())
}
