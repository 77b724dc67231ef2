//! Implementations of the four subcommands.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use ramanwire::diameter::{
    fit_grid_distribution, fit_interval_distribution, fit_single_diameter, DiameterDistribution,
};
use ramanwire::features::{
    extract_features, fit_feature_vs_power, LineFit, PeakFeatures, PowerSeries,
};
use ramanwire::rcf::{simulate_spectrum, DiameterSpec, ModelSpectrumRequest};
use ramanwire::thermal::{
    equivalent_absorbed_power, fit_ratio_slope, relative_kappa, stokes_antistokes_ratio, StokesPair,
};
use ramanwire::{io, FitReport, MeasurementMeta, Spectrum};

use crate::config::RunConfig;
use crate::{
    parse_grid, parse_pair, CliError, FeaturesArgs, FitArgs, PrepArgs, SimulateArgs, ThermalArgs,
};

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Computation(format!("cannot serialize output: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn load_spectrum(path: &Path) -> Result<Spectrum, CliError> {
    io::load_spectrum(path)
        .map_err(|e| CliError::Usage(format!("cannot load spectrum {}: {e}", path.display())))
}

/// Baseline subtraction and optional cropping, per the shared flags.
fn preprocess(spectrum: Spectrum, prep: &PrepArgs) -> Result<Spectrum, CliError> {
    let mut s = spectrum;
    if !prep.no_baseline {
        s = s
            .subtract_baseline(prep.edge_fraction)
            .map_err(CliError::from_input_error)?;
    }
    if let Some(window) = &prep.window {
        let (lo, hi) = parse_pair(window, "window")?;
        s = s.crop_window(lo, hi).map_err(CliError::from_input_error)?;
    }
    Ok(s)
}

pub fn simulate(config: &RunConfig, out_dir: &Path, args: SimulateArgs) -> Result<(), CliError> {
    let omega_grid = parse_grid(&args.grid)?;

    let diameter = if let Some(d) = args.d {
        if !(d > 0.0) {
            return Err(CliError::Usage(format!(
                "diameter must be positive, got {d} nm"
            )));
        }
        DiameterSpec::Single(d)
    } else if let Some(interval) = &args.interval {
        let (lo, hi) = parse_pair(interval, "interval")?;
        DiameterSpec::Distribution(
            DiameterDistribution::uniform_interval(lo, hi).map_err(CliError::from_input_error)?,
        )
    } else if let Some(dist_path) = &args.dist {
        let text = std::fs::read_to_string(dist_path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", dist_path.display())))?;
        let dist: DiameterDistribution = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", dist_path.display())))?;
        dist.validate().map_err(CliError::from_input_error)?;
        DiameterSpec::Distribution(dist)
    } else {
        return Err(CliError::Usage(
            "one of --d, --interval, or --dist is required".into(),
        ));
    };

    let request = ModelSpectrumRequest {
        omega_grid,
        diameter,
        params: config.params.clone(),
    };
    let warnings = request.validate().map_err(CliError::from_input_error)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let spectrum = simulate_spectrum(&request).map_err(CliError::from_input_error)?;
    let features = extract_features(&spectrum)
        .map_err(|e| CliError::Computation(format!("feature extraction failed: {e}")))?;

    let spectrum_path = out_dir.join(format!("{}.csv", args.prefix));
    io::save_spectrum(&spectrum_path, &spectrum)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", spectrum_path.display())))?;

    let distribution_json = match &request.diameter {
        DiameterSpec::Single(d) => json!({ "kind": "point", "point_nm": d }),
        DiameterSpec::Distribution(dist) => serde_json::to_value(dist)
            .map_err(|e| CliError::Computation(format!("cannot serialize: {e}")))?,
    };
    let features_path = out_dir.join(format!("{}_features.json", args.prefix));
    write_json(
        &features_path,
        &json!({
            "distribution": distribution_json,
            "geometry": config.params.geometry.to_string(),
            "quad_nodes": config.params.quad_nodes,
            "features": features,
        }),
    )?;

    println!(
        "wrote {} ({} points) and {}",
        spectrum_path.display(),
        spectrum.len(),
        features_path.display()
    );
    println!(
        "peak {:.4} cm^-1, fwhm {:.4} cm^-1, asymmetry {:.4}",
        features.position, features.fwhm, features.asymmetry
    );
    Ok(())
}

/// Wrapper serialized for fit outputs: the report plus run provenance.
#[derive(Debug, Serialize, Deserialize)]
struct FitOutput {
    input: String,
    mode: String,
    geometry: String,
    quad_nodes: usize,
    report: FitReport,
}

pub fn fit(config: &RunConfig, out_dir: &Path, args: FitArgs) -> Result<(), CliError> {
    let measured = load_spectrum(&args.measured)?;
    let measured = preprocess(measured, &args.prep)?;

    let report = match args.mode.as_str() {
        "point" => {
            let d_range = parse_pair(&args.d_range, "d-range")?;
            fit_single_diameter(&measured, &config.params, d_range)
                .map_err(|e| CliError::Computation(format!("fit failed: {e}")))?
        }
        "interval" => {
            let d_range = parse_pair(&args.d_range, "d-range")?;
            fit_interval_distribution(&measured, &config.params, d_range)
                .map_err(|e| CliError::Computation(format!("fit failed: {e}")))?
        }
        "grid" => {
            let spec = args
                .d_grid
                .as_deref()
                .ok_or_else(|| CliError::Usage("grid mode requires --d-grid D1,D2,...".into()))?;
            let grid: Vec<f64> = spec
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::Usage(format!("bad grid diameter {p:?}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            fit_grid_distribution(&measured, &config.params, &grid)
                .map_err(|e| CliError::Computation(format!("fit failed: {e}")))?
        }
        other => return Err(CliError::Usage(format!("unknown fit mode {other:?}"))),
    };

    for w in &report.warnings {
        eprintln!("warning: {w}");
    }

    let stem = args
        .prefix
        .clone()
        .or_else(|| {
            args.measured
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
        })
        .unwrap_or_else(|| "fit".into());
    let path = out_dir.join(format!("{stem}_fit.json"));
    write_json(
        &path,
        &FitOutput {
            input: args.measured.display().to_string(),
            mode: args.mode.clone(),
            geometry: config.params.geometry.to_string(),
            quad_nodes: config.params.quad_nodes,
            report: report.clone(),
        },
    )?;

    println!("{}", report.distribution.summary());
    println!(
        "sse {:.6e}, {} model evaluations, wrote {}",
        report.sse,
        report.n_model_evals,
        path.display()
    );
    Ok(())
}

/// One manifest entry binding a Stokes/anti-Stokes file pair to its
/// acquisition metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestEntry {
    stokes_file: PathBuf,
    antistokes_file: PathBuf,
    meta: MeasurementMeta,
}

#[derive(Debug, Serialize)]
struct RatioPoint {
    label: String,
    delivered_power_uw: f64,
    ratio: f64,
    ln_ratio: f64,
}

fn load_manifest(path: &Path) -> Result<Vec<ManifestEntry>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read manifest {}: {e}", path.display())))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse manifest {}: {e}", path.display())))?;
    if entries.is_empty() {
        return Err(CliError::Usage(format!(
            "manifest {} has no entries",
            path.display()
        )));
    }
    Ok(entries)
}

/// Mirrors a native negative-shift band onto positive shifts.
fn mirror_if_negative(spectrum: Spectrum) -> Result<Spectrum, CliError> {
    if spectrum.wavenumbers().iter().all(|&w| w < 0.0) {
        let ws: Vec<f64> = spectrum.wavenumbers().iter().rev().map(|&w| -w).collect();
        let ys: Vec<f64> = spectrum.intensities().iter().rev().copied().collect();
        Spectrum::new(ws, ys).map_err(CliError::from_input_error)
    } else {
        Ok(spectrum)
    }
}

/// Ratio-versus-power points for one manifest.
fn ratio_series(
    config: &RunConfig,
    manifest_path: &Path,
    prep: &PrepArgs,
    reference_wavelength: Option<f64>,
) -> Result<Vec<RatioPoint>, CliError> {
    let entries = load_manifest(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut points = Vec::with_capacity(entries.len());
    for entry in &entries {
        let stokes = mirror_if_negative(load_spectrum(&base.join(&entry.stokes_file))?)?;
        let antistokes = mirror_if_negative(load_spectrum(&base.join(&entry.antistokes_file))?)?;
        let stokes = preprocess(stokes, prep)?;
        let antistokes = preprocess(antistokes, prep)?;
        let pair = StokesPair::new(stokes, antistokes, entry.meta.clone())
            .map_err(CliError::from_input_error)?;
        let ratio =
            stokes_antistokes_ratio(&pair).map_err(|e| CliError::Computation(e.to_string()))?;
        if !(ratio > 0.0) {
            return Err(CliError::Computation(format!(
                "nonpositive Stokes/anti-Stokes ratio {ratio} for {}",
                entry.stokes_file.display()
            )));
        }
        let mut power = entry.meta.delivered_power_uw();
        if let Some(reference) = reference_wavelength {
            power = equivalent_absorbed_power(
                power,
                entry.meta.wavelength_nm,
                reference,
                &config.absorption_table,
            )
            .map_err(CliError::from_input_error)?;
        }
        points.push(RatioPoint {
            label: entry.meta.label.clone(),
            delivered_power_uw: power,
            ratio,
            ln_ratio: ratio.ln(),
        });
    }
    Ok(points)
}

fn slope_of(points: &[RatioPoint]) -> Result<f64, CliError> {
    let series = PowerSeries::new(
        points
            .iter()
            .map(|p| (p.delivered_power_uw, p.ln_ratio))
            .collect(),
    )
    .map_err(CliError::from_input_error)?;
    Ok(fit_ratio_slope(&series))
}

pub fn thermal(config: &RunConfig, out_dir: &Path, args: ThermalArgs) -> Result<(), CliError> {
    let sample_points = ratio_series(
        config,
        &args.manifest,
        &args.prep,
        args.reference_wavelength,
    )?;
    let bulk_points = ratio_series(
        config,
        &args.bulk_manifest,
        &args.prep,
        args.reference_wavelength,
    )?;

    let r_sample = slope_of(&sample_points)?;
    let r_bulk = slope_of(&bulk_points)?;
    let estimate = relative_kappa(r_sample, r_bulk, config.kappa_bulk)
        .map_err(|e| CliError::Computation(e.to_string()))?;

    let kappa_path = out_dir.join(format!("{}_kappa.json", args.prefix));
    write_json(
        &kappa_path,
        &json!({
            "geometry": config.params.geometry.to_string(),
            "gamma_coeff": config.gamma_coeff,
            // provenance only: the bulk-relative estimate cancels these
            "heat_path_ratio": config.heat_path_ratio,
            "conducted_heat": config.conducted_heat,
            "estimate": estimate,
            "sample_points": sample_points,
            "bulk_points": bulk_points,
        }),
    )?;

    let table_path = out_dir.join(format!("{}_ratios.csv", args.prefix));
    let mut table = String::from("# series,label,delivered_power_uW,ratio,ln_ratio\n");
    for (series, points) in [("sample", &sample_points), ("bulk", &bulk_points)] {
        for p in points {
            table.push_str(&format!(
                "{series},{},{},{},{}\n",
                p.label, p.delivered_power_uw, p.ratio, p.ln_ratio
            ));
        }
    }
    std::fs::write(&table_path, table)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", table_path.display())))?;

    println!(
        "kappa = {:.4} W/(m K) (bulk {:.4}, slopes sample {:.6e} / bulk {:.6e})",
        estimate.kappa, estimate.kappa_bulk, estimate.slope_sample, estimate.slope_bulk
    );
    println!(
        "wrote {} and {}",
        kappa_path.display(),
        table_path.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct FeatureRow {
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    delivered_power_uw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<PeakFeatures>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ZeroPowerExtrapolation {
    position: LineFit,
    fwhm: LineFit,
    asymmetry: LineFit,
    amplitude: LineFit,
}

pub fn features(_config: &RunConfig, out_dir: &Path, args: FeaturesArgs) -> Result<(), CliError> {
    let mut rows: Vec<FeatureRow> = Vec::with_capacity(args.files.len());
    for file in &args.files {
        let row = match process_one(file, &args.prep) {
            Ok((power, feats)) => FeatureRow {
                file: file.display().to_string(),
                delivered_power_uw: power,
                features: Some(feats),
                error: None,
            },
            Err(msg) => {
                eprintln!("warning: {}: {msg}", file.display());
                FeatureRow {
                    file: file.display().to_string(),
                    delivered_power_uw: None,
                    features: None,
                    error: Some(msg),
                }
            }
        };
        rows.push(row);
    }

    let successes: Vec<&FeatureRow> = rows.iter().filter(|r| r.features.is_some()).collect();
    if successes.is_empty() {
        return Err(CliError::Computation(
            "no input file yielded a usable peak".into(),
        ));
    }

    // Zero-power extrapolation needs at least two successful rows with
    // distinct delivered powers.
    let powered: Vec<(&FeatureRow, f64)> = successes
        .iter()
        .filter_map(|r| r.delivered_power_uw.map(|p| (*r, p)))
        .collect();
    let mut distinct = powered.iter().map(|e| e.1).collect::<Vec<f64>>();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    let zero_power = if distinct.len() >= 2 {
        let series_of = |pick: fn(&PeakFeatures) -> f64| -> Result<LineFit, CliError> {
            let entries: Vec<(f64, f64)> = powered
                .iter()
                .map(|(r, p)| (*p, pick(r.features.as_ref().expect("filtered"))))
                .collect();
            let series = PowerSeries::new(entries).map_err(CliError::from_input_error)?;
            Ok(fit_feature_vs_power(&series))
        };
        Some(ZeroPowerExtrapolation {
            position: series_of(|f| f.position)?,
            fwhm: series_of(|f| f.fwhm)?,
            asymmetry: series_of(|f| f.asymmetry)?,
            amplitude: series_of(|f| f.amplitude)?,
        })
    } else {
        None
    };

    let path = out_dir.join(format!("{}_features.json", args.prefix));
    write_json(
        &path,
        &json!({
            "files": rows,
            "zero_power": zero_power,
        }),
    )?;

    for row in &rows {
        match (&row.features, &row.error) {
            (Some(f), _) => println!(
                "{}: position {:.4}, fwhm {:.4}, asymmetry {:.4}, amplitude {:.6e}{}",
                row.file,
                f.position,
                f.fwhm,
                f.asymmetry,
                f.amplitude,
                row.delivered_power_uw
                    .map(|p| format!(", power {p:.3} uW"))
                    .unwrap_or_default()
            ),
            (None, Some(e)) => println!("{}: FAILED ({e})", row.file),
            _ => unreachable!(),
        }
    }
    if let Some(z) = &zero_power {
        println!(
            "zero-power intercepts: position {:.4}, fwhm {:.4}, asymmetry {:.4}",
            z.position.intercept, z.fwhm.intercept, z.asymmetry.intercept
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

/// Loads, preprocesses, and extracts features for one file; the sidecar
/// `FILE.meta.json` supplies the delivered power when present.
fn process_one(file: &Path, prep: &PrepArgs) -> Result<(Option<f64>, PeakFeatures), String> {
    let spectrum = io::load_spectrum(file).map_err(|e| e.to_string())?;
    let spectrum = preprocess(spectrum, prep).map_err(|e| match e {
        CliError::Usage(m) | CliError::Computation(m) => m,
    })?;
    let feats = extract_features(&spectrum).map_err(|e| e.to_string())?;

    let sidecar = PathBuf::from(format!("{}.meta.json", file.display()));
    let power = if sidecar.exists() {
        let meta = io::load_meta(&sidecar).map_err(|e| e.to_string())?;
        Some(meta.delivered_power_uw())
    } else {
        None
    };
    Ok((power, feats))
}
