//! Helpers shared by the CLI integration and acceptance tests.

// Each test target compiles this module separately and uses a different
// subset of the helpers.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

use ramanwire::rcf::{simulate_spectrum, DiameterSpec, ModelSpectrumRequest, RcfParams};
use ramanwire::{io, Spectrum};

/// Path of the compiled CLI binary.
pub fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_ramanwire")
}

/// Runs the CLI with `args` in `cwd`, returning the raw process output.
pub fn run_cli(cwd: &Path, args: &[&str]) -> Output {
    std::process::Command::new(binary())
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("CLI binary runs")
}

pub fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

/// Model parameters used by test fixtures: library defaults with a reduced
/// node count to keep fitting fast.
pub fn test_params() -> RcfParams {
    RcfParams {
        quad_nodes: 512,
        ..RcfParams::default()
    }
}

/// Writes a config file carrying `test_params` into `dir` and returns its
/// path.
pub fn write_test_config(dir: &Path) -> PathBuf {
    let params = test_params();
    let config = serde_json::json!({ "params": params });
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize + 1;
    (0..n).map(|i| lo + i as f64 * step).collect()
}

/// Synthesizes a confinement-model spectrum and writes it as a two-column
/// file.
pub fn write_model_spectrum(
    path: &Path,
    diameter: DiameterSpec,
    params: &RcfParams,
    step: f64,
) -> Spectrum {
    let spectrum = simulate_spectrum(&ModelSpectrumRequest {
        omega_grid: uniform_grid(270.0, 315.0, step),
        diameter,
        params: params.clone(),
    })
    .unwrap();
    io::save_spectrum(path, &spectrum).unwrap();
    spectrum
}

/// Writes a Lorentzian band file on `[lo, hi]` with the given step.
pub fn write_lorentzian(
    path: &Path,
    lo: f64,
    hi: f64,
    step: f64,
    center: f64,
    fwhm: f64,
    amplitude: f64,
) {
    let ws = uniform_grid(lo, hi, step);
    let hwhm = fwhm / 2.0;
    let ys: Vec<f64> = ws
        .iter()
        .map(|&w| amplitude * hwhm * hwhm / ((w - center).powi(2) + hwhm * hwhm))
        .collect();
    let s = Spectrum::new(ws, ys).unwrap();
    io::save_spectrum(path, &s).unwrap();
}

/// Builds a Stokes/anti-Stokes manifest whose ln-ratio falls linearly with
/// delivered power at the given absolute slope. Files are written next to
/// the manifest; the anti-Stokes band uses its native negative axis.
pub fn write_thermal_manifest(
    dir: &Path,
    name: &str,
    slope_per_uw: f64,
    powers: &[f64],
) -> PathBuf {
    let mut entries = Vec::new();
    for &p in powers {
        let ratio = (-1.4656 - slope_per_uw * p).exp();
        let stokes_name = format!("{name}_S_{p:.0}.csv");
        let anti_name = format!("{name}_AS_{p:.0}.csv");
        write_lorentzian(
            &dir.join(&stokes_name),
            280.0,
            321.0,
            0.1,
            300.5,
            3.0,
            1000.0,
        );

        // anti-Stokes on negative shifts, ascending wavenumber
        let ws = uniform_grid(-321.0, -280.0, 0.1);
        let ys: Vec<f64> = ws
            .iter()
            .map(|&w| ratio * 1000.0 * 2.25 / ((-w - 300.5f64).powi(2) + 2.25))
            .collect();
        let anti = Spectrum::new(ws, ys).unwrap();
        io::save_spectrum(dir.join(&anti_name), &anti).unwrap();

        entries.push(serde_json::json!({
            "stokes_file": stokes_name,
            "antistokes_file": anti_name,
            "meta": {
                "wavelength_nm": 514.523,
                "source_power_uW": p,
                "filter_od": 0.0,
                "label": name,
            }
        }));
    }
    let path = dir.join(format!("{name}_manifest.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&entries).unwrap()).unwrap();
    path
}
