//! Round-trip identifiability of the diameter fits: spectra synthesized by
//! the forward model must invert back to their generating parameters.

use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use ramanwire::diameter::{
    fit_grid_distribution, fit_interval_distribution, fit_single_diameter, DiameterDistribution,
};
use ramanwire::rcf::{simulate_spectrum, DiameterSpec, ModelSpectrumRequest, RcfParams};
use ramanwire::spectrum::Spectrum;

fn fit_params() -> RcfParams {
    // 512 nodes are converged far beyond the fit tolerances and keep the
    // Monte-Carlo loops quick.
    RcfParams {
        quad_nodes: 512,
        ..RcfParams::default()
    }
}

fn grid(step: f64) -> Vec<f64> {
    let n = ((315.0f64 - 270.0) / step).round() as usize + 1;
    (0..n).map(|i| 270.0 + i as f64 * step).collect()
}

fn synth(diameter: DiameterSpec, params: &RcfParams, step: f64) -> Spectrum {
    simulate_spectrum(&ModelSpectrumRequest {
        omega_grid: grid(step),
        diameter,
        params: params.clone(),
    })
    .unwrap()
}

fn point_of(report: &ramanwire::FitReport) -> f64 {
    match report.distribution {
        DiameterDistribution::Point { point_nm } => point_nm,
        ref other => panic!("expected point distribution, got {other:?}"),
    }
}

#[test]
fn noiseless_round_trip_across_the_size_range() {
    let params = fit_params();
    for &d_true in &[4.0, 5.0, 8.0, 10.0, 15.0, 20.0] {
        let measured = synth(DiameterSpec::Single(d_true), &params, 0.15);
        let report = fit_single_diameter(&measured, &params, (3.0, 30.0)).unwrap();
        let d = point_of(&report);
        assert!((d - d_true).abs() <= 0.05, "D_true={d_true}: recovered {d}");
    }
}

#[test]
fn noisy_round_trip_stays_within_tolerance() {
    // 1% of peak Gaussian noise, 100 seeded trials cycling through the
    // diameter set; at least 95 must land within +/-0.3 nm.
    let params = fit_params();
    let diameters = [4.0, 5.0, 8.0, 10.0, 15.0, 20.0];
    let omega_grid = grid(0.1);
    let mut hits = 0;
    for trial in 0..100u64 {
        let d_true = diameters[trial as usize % diameters.len()];
        let clean = synth(DiameterSpec::Single(d_true), &params, 0.1);
        let mut rng = StdRng::seed_from_u64(4242 + trial);
        let noise = Normal::new(0.0, 0.01).unwrap();
        let noisy: Vec<f64> = clean
            .intensities()
            .iter()
            .map(|y| y + noise.sample(&mut rng))
            .collect();
        let measured = Spectrum::new(omega_grid.clone(), noisy).unwrap();
        let report = fit_single_diameter(&measured, &params, (3.0, 30.0)).unwrap();
        if (point_of(&report) - d_true).abs() <= 0.3 {
            hits += 1;
        }
    }
    assert!(hits >= 95, "only {hits}/100 trials within 0.3 nm");
}

#[test]
fn interval_round_trip_recovers_both_endpoints() {
    let params = fit_params();
    let measured = synth(
        DiameterSpec::Distribution(DiameterDistribution::uniform_interval(7.0, 9.0).unwrap()),
        &params,
        0.15,
    );
    let report = fit_interval_distribution(&measured, &params, (3.0, 30.0)).unwrap();
    match report.distribution {
        DiameterDistribution::UniformInterval {
            interval_nm: (lo, hi),
        } => {
            assert!((lo - 7.0).abs() <= 0.3, "lower endpoint {lo}");
            assert!((hi - 9.0).abs() <= 0.3, "upper endpoint {hi}");
        }
        other => panic!("expected interval, got {other:?}"),
    }
}

#[test]
fn narrow_interval_round_trip() {
    let params = fit_params();
    let measured = synth(
        DiameterSpec::Distribution(DiameterDistribution::uniform_interval(4.0, 5.0).unwrap()),
        &params,
        0.15,
    );
    let report = fit_interval_distribution(&measured, &params, (3.0, 30.0)).unwrap();
    match report.distribution {
        DiameterDistribution::UniformInterval {
            interval_nm: (lo, hi),
        } => {
            assert!((lo - 4.0).abs() <= 0.3, "lower endpoint {lo}");
            assert!((hi - 5.0).abs() <= 0.3, "upper endpoint {hi}");
            assert_eq!(report.distribution.summary(), format!("{lo:.1}~{hi:.1} nm"));
        }
        other => panic!("expected interval, got {other:?}"),
    }
}

#[test]
fn grid_round_trip_recovers_sparse_weights() {
    let params = fit_params();
    let truth = DiameterDistribution::grid(
        vec![4.0, 6.0, 9.0, 13.0, 18.0, 25.0],
        vec![0.0, 0.35, 0.0, 0.65, 0.0, 0.0],
    )
    .unwrap();
    let measured = synth(DiameterSpec::Distribution(truth), &params, 0.15);
    let report =
        fit_grid_distribution(&measured, &params, &[4.0, 6.0, 9.0, 13.0, 18.0, 25.0]).unwrap();
    match &report.distribution {
        DiameterDistribution::Grid { weights, .. } => {
            assert!((weights[1] - 0.35).abs() < 0.05, "weights {weights:?}");
            assert!((weights[3] - 0.65).abs() < 0.05, "weights {weights:?}");
        }
        other => panic!("expected grid, got {other:?}"),
    }
}

#[test]
fn fit_reports_serialize_with_distribution_tags() {
    let params = fit_params();
    let measured = synth(DiameterSpec::Single(8.0), &params, 0.15);
    let report = fit_single_diameter(&measured, &params, (3.0, 30.0)).unwrap();
    let json = serde_json::to_string(&report).unwrap();
    assert!(json.contains("\"kind\":\"point\""));
    assert!(json.contains("\"sse\":"));
    assert!(json.contains("\"n_model_evals\":"));
    let back: ramanwire::FitReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report, back);
}
