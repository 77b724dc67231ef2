//! Forward phonon-confinement lineshape model for nanowire Raman spectra.
//!
//! The Raman intensity at shift omega is the Brillouin-zone integral of a
//! Lorentzian kernel weighted by a Gaussian confinement function:
//!
//! ```text
//! I(omega) = ∫₀¹ w(xi) * exp(-xi² D² / 4a²)
//!            / [(omega - omega(xi))² + (Γ₀/2)²] d xi
//! ```
//!
//! with the optical-branch dispersion
//! `omega(xi) = sqrt(A + B cos(pi xi)) + C`. Momentum is normalized as
//! `q = xi * 2π/a`, so the zone boundary sits at `xi = 1` and the confinement
//! exponent reduces to `-xi² D²/(4 a²)`. The geometric measure `w(xi)` is
//! `4π xi²` for spherical zone integration and `2π xi` for columnar
//! (two-dimensional) confinement.
//!
//! The integral is evaluated with a fixed-node Gauss-Legendre rule so results
//! are bit-reproducible across runs; the integrand is smooth and a few
//! hundred nodes already reach machine accuracy.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diameter::DiameterDistribution;
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::numeric::gauss_legendre_unit;
use crate::spectrum::Spectrum;

/// Default bulk reference linewidth (cm^-1), overridden whenever a measured
/// bulk reference is calibrated in.
pub const DEFAULT_GAMMA0: f64 = 3.0;

/// Germanium lattice constant in nm.
pub const GE_LATTICE_NM: f64 = 0.5658;

/// Default Gauss-Legendre node count.
pub const DEFAULT_QUAD_NODES: usize = 2048;

/// Minimum accepted node count.
pub const MIN_QUAD_NODES: usize = 64;

/// Number of equally spaced diameters used to average a uniform interval
/// distribution.
pub const INTERVAL_INNER_POINTS: usize = 21;

/// Zone integration measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    /// Spherical integration, measure 4π xi².
    #[serde(rename = "sphere3d")]
    Sphere3d,
    /// Columnar (two-dimensional) integration, measure 2π xi.
    #[serde(rename = "column2d")]
    Column2d,
}

impl Geometry {
    fn measure(self, xi: f64) -> f64 {
        match self {
            Geometry::Sphere3d => 4.0 * PI * xi * xi,
            Geometry::Column2d => 2.0 * PI * xi,
        }
    }
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere3d" => Ok(Geometry::Sphere3d),
            "column2d" => Ok(Geometry::Column2d),
            other => Err(Error::Validation(format!(
                "unknown geometry {other:?}; expected \"sphere3d\" or \"column2d\""
            ))),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Geometry::Sphere3d => "sphere3d",
            Geometry::Column2d => "column2d",
        })
    }
}

/// Parameters of the confinement lineshape model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcfParams {
    /// Dispersion constant A in cm^-2.
    #[serde(rename = "A")]
    pub dispersion_a: f64,
    /// Dispersion constant B in cm^-2. Must satisfy A > B > 0 so the
    /// dispersion stays real over the whole zone.
    #[serde(rename = "B")]
    pub dispersion_b: f64,
    /// Additive calibration offset in cm^-1, matching the measured bulk peak
    /// of a particular setup.
    #[serde(rename = "C")]
    pub calibration_c: f64,
    /// Bulk reference FWHM Γ₀ in cm^-1.
    pub gamma0: f64,
    /// Lattice constant in nm.
    pub lattice_a: f64,
    /// Zone integration measure.
    pub geometry: Geometry,
    /// Gauss-Legendre node count for the zone integral.
    pub quad_nodes: usize,
}

impl Default for RcfParams {
    /// Germanium defaults: the published dispersion constants, no calibration
    /// offset, 3 cm^-1 reference linewidth, spherical integration.
    fn default() -> Self {
        Self {
            dispersion_a: 0.69e5,
            dispersion_b: 0.195e5,
            calibration_c: 0.0,
            gamma0: DEFAULT_GAMMA0,
            lattice_a: GE_LATTICE_NM,
            geometry: Geometry::Sphere3d,
            quad_nodes: DEFAULT_QUAD_NODES,
        }
    }
}

impl RcfParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.dispersion_a > self.dispersion_b && self.dispersion_b > 0.0) {
            return Err(Error::Validation(format!(
                "dispersion constants must satisfy A > B > 0, got A={}, B={}",
                self.dispersion_a, self.dispersion_b
            )));
        }
        if !self.calibration_c.is_finite() {
            return Err(Error::Validation("calibration C must be finite".into()));
        }
        if !(self.gamma0 > 0.0) {
            return Err(Error::Validation(format!(
                "gamma0 must be positive, got {}",
                self.gamma0
            )));
        }
        if !(self.lattice_a > 0.0) {
            return Err(Error::Validation(format!(
                "lattice_a must be positive, got {}",
                self.lattice_a
            )));
        }
        if self.quad_nodes < MIN_QUAD_NODES {
            return Err(Error::Validation(format!(
                "quad_nodes must be at least {MIN_QUAD_NODES}, got {}",
                self.quad_nodes
            )));
        }
        Ok(())
    }

    /// Zone-center phonon frequency sqrt(A + B) + C, the bulk peak position.
    pub fn zone_center_omega(&self) -> f64 {
        (self.dispersion_a + self.dispersion_b).sqrt() + self.calibration_c
    }

    /// Zone-boundary phonon frequency sqrt(A - B) + C.
    pub fn zone_boundary_omega(&self) -> f64 {
        (self.dispersion_a - self.dispersion_b).sqrt() + self.calibration_c
    }
}

/// Phonon dispersion omega(xi) = sqrt(A + B cos(pi xi)) + C at zone fraction
/// xi in [0, 1].
pub fn dispersion_omega(xi: f64, params: &RcfParams) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("zone fraction {xi} outside [0, 1]")));
    }
    Ok((params.dispersion_a + params.dispersion_b * (PI * xi).cos()).sqrt() + params.calibration_c)
}

/// Gaussian confinement weight exp(-xi² D² / 4a²), i.e. exp(-q² D²/16π²)
/// under q = xi * 2π/a.
pub fn confinement_weight(xi: f64, diameter_nm: f64, params: &RcfParams) -> Result<f64> {
    params.validate()?;
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("zone fraction {xi} outside [0, 1]")));
    }
    if !(diameter_nm > 0.0) {
        return Err(Error::Domain(format!(
            "diameter must be positive, got {diameter_nm} nm"
        )));
    }
    let ratio = diameter_nm / params.lattice_a;
    Ok((-xi * xi * ratio * ratio / 4.0).exp())
}

/// Raw (unnormalized) confinement intensities over a wavenumber grid for one
/// diameter. Shared by the single-point evaluator, the simulator, and the
/// diameter fitters.
pub(crate) fn raw_intensity_curve(
    omega_grid: &[f64],
    diameter_nm: f64,
    params: &RcfParams,
) -> Result<Vec<f64>> {
    params.validate()?;
    if !(diameter_nm > 0.0) {
        return Err(Error::Domain(format!(
            "diameter must be positive, got {diameter_nm} nm"
        )));
    }
    let rule = gauss_legendre_unit(params.quad_nodes);
    let half_gamma_sq = (params.gamma0 / 2.0) * (params.gamma0 / 2.0);
    let ratio = diameter_nm / params.lattice_a;

    // Per-node factors are independent of omega; hoist them out of the grid
    // loop.
    let n = rule.nodes.len();
    let mut centers = Vec::with_capacity(n);
    let mut node_weights = Vec::with_capacity(n);
    for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
        let disp = (params.dispersion_a + params.dispersion_b * (PI * xi).cos()).sqrt()
            + params.calibration_c;
        let conf = (-xi * xi * ratio * ratio / 4.0).exp();
        centers.push(disp);
        node_weights.push(w * params.geometry.measure(xi) * conf);
    }

    Ok(omega_grid
        .iter()
        .map(|&omega| {
            let mut acc = 0.0;
            for i in 0..n {
                let d = omega - centers[i];
                acc += node_weights[i] / (d * d + half_gamma_sq);
            }
            acc
        })
        .collect())
}

/// Confinement-model intensity at a single Raman shift, in arbitrary units.
pub fn rcf_intensity(omega: f64, diameter_nm: f64, params: &RcfParams) -> Result<f64> {
    Ok(raw_intensity_curve(&[omega], diameter_nm, params)?[0])
}

/// Diameter input for a simulation: one diameter or a distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum DiameterSpec {
    Single(f64),
    Distribution(DiameterDistribution),
}

impl From<f64> for DiameterSpec {
    fn from(d: f64) -> Self {
        DiameterSpec::Single(d)
    }
}

impl From<DiameterDistribution> for DiameterSpec {
    fn from(d: DiameterDistribution) -> Self {
        DiameterSpec::Distribution(d)
    }
}

/// A request to evaluate the model over a wavenumber grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpectrumRequest {
    /// Strictly increasing Raman-shift grid in cm^-1.
    pub omega_grid: Vec<f64>,
    pub diameter: DiameterSpec,
    pub params: RcfParams,
}

impl ModelSpectrumRequest {
    /// Validates the request. Returns advisory warnings (not errors) when the
    /// grid extends far outside the band the dispersion can populate.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.params.validate()?;
        if self.omega_grid.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: self.omega_grid.len(),
            });
        }
        for pair in self.omega_grid.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::Validation(
                    "omega grid must be strictly increasing".into(),
                ));
            }
        }
        match &self.diameter {
            DiameterSpec::Single(d) => {
                if !(*d > 0.0) {
                    return Err(Error::Domain(format!(
                        "diameter must be positive, got {d} nm"
                    )));
                }
            }
            DiameterSpec::Distribution(dist) => dist.validate()?,
        }
        let mut warnings = Vec::new();
        let lo_rec = self.params.zone_boundary_omega() - 10.0 * self.params.gamma0;
        let hi_rec = self.params.zone_center_omega() + 10.0 * self.params.gamma0;
        let lo = *self.omega_grid.first().expect("validated nonempty");
        let hi = *self.omega_grid.last().expect("validated nonempty");
        if lo < lo_rec || hi > hi_rec {
            warnings.push(format!(
                "omega grid [{lo}, {hi}] extends outside the recommended band [{lo_rec:.2}, {hi_rec:.2}]"
            ));
        }
        Ok(warnings)
    }
}

/// Simulates a peak-normalized model spectrum.
///
/// For a distribution the raw intensity curves are averaged with the
/// distribution weights first and the mixture is normalized once at the end,
/// so the mixture of raw curves is exactly the weighted mean of its
/// components.
pub fn simulate_spectrum(request: &ModelSpectrumRequest) -> Result<Spectrum> {
    request.validate()?;
    let raw = raw_mixture_curve(&request.omega_grid, &request.diameter, &request.params)?;
    let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let normalized: Vec<f64> = raw.iter().map(|y| y / max).collect();
    Spectrum::new(request.omega_grid.clone(), normalized)
}

/// Raw mixture curve before normalization.
pub(crate) fn raw_mixture_curve(
    omega_grid: &[f64],
    diameter: &DiameterSpec,
    params: &RcfParams,
) -> Result<Vec<f64>> {
    match diameter {
        DiameterSpec::Single(d) => raw_intensity_curve(omega_grid, *d, params),
        DiameterSpec::Distribution(DiameterDistribution::Point { point_nm }) => {
            raw_intensity_curve(omega_grid, *point_nm, params)
        }
        DiameterSpec::Distribution(DiameterDistribution::UniformInterval { interval_nm }) => {
            let (lo, hi) = *interval_nm;
            let mut acc = vec![0.0; omega_grid.len()];
            for k in 0..INTERVAL_INNER_POINTS {
                let d = lo + (hi - lo) * k as f64 / (INTERVAL_INNER_POINTS - 1) as f64;
                let curve = raw_intensity_curve(omega_grid, d, params)?;
                for (a, c) in acc.iter_mut().zip(&curve) {
                    *a += c;
                }
            }
            let inv = 1.0 / INTERVAL_INNER_POINTS as f64;
            for a in &mut acc {
                *a *= inv;
            }
            Ok(acc)
        }
        DiameterSpec::Distribution(DiameterDistribution::Grid { grid_nm, weights }) => {
            let mut acc = vec![0.0; omega_grid.len()];
            for (&d, &w) in grid_nm.iter().zip(weights) {
                if w == 0.0 {
                    continue;
                }
                let curve = raw_intensity_curve(omega_grid, d, params)?;
                for (a, c) in acc.iter_mut().zip(&curve) {
                    *a += w * c;
                }
            }
            Ok(acc)
        }
    }
}

/// Calibrates the additive offset C and the reference linewidth Γ₀ against a
/// measured bulk spectrum.
///
/// In the large-diameter limit the model peaks at sqrt(A + B) + C, so C is
/// set to move that limit onto the measured bulk peak; Γ₀ is taken from the
/// bulk peak's extracted FWHM.
pub fn calibrate_c(bulk_reference: &Spectrum, params: &RcfParams) -> Result<RcfParams> {
    params.validate()?;
    let features = extract_features(bulk_reference)?;
    let mut out = params.clone();
    out.calibration_c = features.position - (params.dispersion_a + params.dispersion_b).sqrt();
    out.gamma0 = features.fwhm;
    out.validate()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::lorentzian_spectrum;

    fn params() -> RcfParams {
        RcfParams::default()
    }

    #[test]
    fn dispersion_endpoints_match_closed_form() {
        let p = params();
        let at_zero = dispersion_omega(0.0, &p).unwrap();
        let at_one = dispersion_omega(1.0, &p).unwrap();
        assert!((at_zero - 88_500f64.sqrt()).abs() < 1e-12);
        assert!((at_one - 49_500f64.sqrt()).abs() < 1e-12);
        // published-constant spot values
        assert!((at_zero - 297.49).abs() < 0.01);
        assert!((at_one - 222.49).abs() < 0.01);
    }

    #[test]
    fn dispersion_shifts_by_calibration_offset() {
        let mut p = params();
        p.calibration_c = 3.0;
        let v = dispersion_omega(0.0, &p).unwrap();
        assert!((v - 300.49).abs() < 0.01);
        assert!((v - (88_500f64.sqrt() + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn dispersion_rejects_out_of_zone_fraction() {
        let p = params();
        assert!(matches!(dispersion_omega(-0.01, &p), Err(Error::Domain(_))));
        assert!(matches!(dispersion_omega(1.01, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn dispersion_is_strictly_decreasing() {
        let p = params();
        let mut prev = dispersion_omega(0.0, &p).unwrap();
        for i in 1..=100 {
            let xi = i as f64 / 100.0;
            let v = dispersion_omega(xi, &p).unwrap();
            assert!(v < prev, "dispersion not decreasing at xi={xi}");
            prev = v;
        }
    }

    #[test]
    fn confinement_weight_matches_closed_form() {
        let p = params();
        assert_eq!(confinement_weight(0.0, 12.0, &p).unwrap(), 1.0);
        let v = confinement_weight(1.0, 5.0, &p).unwrap();
        let expected = (-(5.0f64 / 0.5658).powi(2) / 4.0).exp();
        assert!((v - expected).abs() / expected < 1e-12);
        // about exp(-19.52) ~ 3.3e-9
        assert!((v / 3.3e-9 - 1.0).abs() < 0.05);
    }

    #[test]
    fn confinement_weight_depends_only_on_product() {
        let p = params();
        for &(xi, d) in &[(0.1, 8.0), (0.25, 5.0), (0.4, 3.0)] {
            let a = confinement_weight(xi, 2.0 * d, &p).unwrap();
            let b = confinement_weight(2.0 * xi, d, &p).unwrap();
            assert!((a - b).abs() < 1e-15 * a.max(1e-300));
        }
    }

    #[test]
    fn confinement_weight_strictly_decreasing_in_xi_and_diameter() {
        let p = params();
        let mut prev = confinement_weight(0.0, 10.0, &p).unwrap();
        for i in 1..=50 {
            let v = confinement_weight(i as f64 / 50.0, 10.0, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = confinement_weight(0.3, 1.0, &p).unwrap();
        for i in 1..=20 {
            let v = confinement_weight(0.3, 1.0 + i as f64, &p).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn confinement_weight_rejects_bad_input() {
        let p = params();
        assert!(matches!(
            confinement_weight(0.5, 0.0, &p),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            confinement_weight(1.5, 5.0, &p),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn intensity_is_positive_everywhere() {
        let p = params();
        for &omega in &[0.0, 150.0, 222.5, 260.0, 297.5, 400.0, 1000.0] {
            let v = rcf_intensity(omega, 8.0, &p).unwrap();
            assert!(v > 0.0, "intensity at {omega} not positive: {v}");
        }
    }

    #[test]
    fn quadrature_is_converged_at_default_nodes() {
        let mut p1 = params();
        p1.quad_nodes = 1024;
        let mut p2 = params();
        p2.quad_nodes = 2048;
        for &d in &[5.0, 20.0] {
            for i in 0..60 {
                let omega = 250.0 + i as f64;
                let a = rcf_intensity(omega, d, &p1).unwrap();
                let b = rcf_intensity(omega, d, &p2).unwrap();
                assert!(
                    ((a - b) / b).abs() < 1e-8,
                    "node doubling changed intensity by {} at D={d}, omega={omega}",
                    ((a - b) / b).abs()
                );
            }
        }
    }

    fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).round() as usize + 1;
        (0..n).map(|i| lo + i as f64 * step).collect()
    }

    fn simulate_single(d: f64, p: &RcfParams) -> Spectrum {
        simulate_spectrum(&ModelSpectrumRequest {
            omega_grid: grid(250.0, 320.0, 0.05),
            diameter: DiameterSpec::Single(d),
            params: p.clone(),
        })
        .unwrap()
    }

    #[test]
    fn peak_position_orders_with_diameter() {
        let p = params();
        let f5 = extract_features(&simulate_single(5.0, &p)).unwrap();
        let f20 = extract_features(&simulate_single(20.0, &p)).unwrap();
        let bulk = p.zone_center_omega();
        assert!(f5.position < f20.position);
        assert!(f20.position < bulk);
    }

    #[test]
    fn large_diameter_limit_is_nearly_lorentzian_at_center() {
        // At D = 100 lattice constants the normalized model intensity at the
        // zone-center frequency is within 1% of the normalized Lorentzian
        // peak value (= 1).
        let p = params();
        let d = 100.0 * p.lattice_a;
        let g = grid(280.0, 315.0, 0.01);
        let s = simulate_spectrum(&ModelSpectrumRequest {
            omega_grid: g.clone(),
            diameter: DiameterSpec::Single(d),
            params: p.clone(),
        })
        .unwrap();
        let omega0 = p.zone_center_omega();
        let idx = g
            .iter()
            .position(|&w| (w - omega0).abs() < 0.005)
            .expect("zone-center on grid");
        let value = s.intensities()[idx];
        assert!(
            (value - 1.0).abs() < 0.01,
            "normalized intensity at zone center = {value}"
        );
    }

    #[test]
    fn large_diameter_asymptotics_are_pinned() {
        // Measured behavior of the model at the quoted large-D test point:
        // the residual downshift decays like 1/D^2 and the width converges to
        // gamma0 much faster. Frozen values come from an independent
        // high-resolution quadrature oracle.
        let p = params();
        let omega0 = p.zone_center_omega();

        let f100a = extract_features(&simulate_single(100.0 * p.lattice_a, &p)).unwrap();
        assert!(
            ((f100a.position - omega0) - (-0.0963)).abs() < 0.003,
            "peak residual at 100a: {}",
            f100a.position - omega0
        );
        assert!(
            (f100a.fwhm - p.gamma0).abs() / p.gamma0 < 0.02,
            "FWHM at 100a: {}",
            f100a.fwhm
        );

        // Four times the diameter shrinks the residual by roughly 16x.
        let f400a = extract_features(&simulate_single(400.0 * p.lattice_a, &p)).unwrap();
        let resid = (f400a.position - omega0).abs();
        assert!(resid < 0.05, "peak residual at 400a: {resid}");
        assert!(resid < (f100a.position - omega0).abs() / 10.0);
    }

    #[test]
    fn point_distribution_matches_single_diameter_exactly() {
        let p = params();
        let g = grid(250.0, 320.0, 0.1);
        let single = simulate_spectrum(&ModelSpectrumRequest {
            omega_grid: g.clone(),
            diameter: DiameterSpec::Single(8.0),
            params: p.clone(),
        })
        .unwrap();
        let point = simulate_spectrum(&ModelSpectrumRequest {
            omega_grid: g,
            diameter: DiameterSpec::Distribution(DiameterDistribution::point(8.0).unwrap()),
            params: p,
        })
        .unwrap();
        assert_eq!(single, point);
    }

    #[test]
    fn uniform_interval_mixture_stays_inside_raw_envelope() {
        // Raw intensity decreases pointwise as the diameter grows, so the raw
        // mixture over [7, 9] nm must sit between the raw 9 nm and 7 nm
        // curves everywhere.
        let p = params();
        let g = grid(250.0, 320.0, 0.1);
        let c7 = raw_intensity_curve(&g, 7.0, &p).unwrap();
        let c9 = raw_intensity_curve(&g, 9.0, &p).unwrap();
        let mix = raw_mixture_curve(
            &g,
            &DiameterSpec::Distribution(DiameterDistribution::uniform_interval(7.0, 9.0).unwrap()),
            &p,
        )
        .unwrap();
        for i in 0..g.len() {
            assert!(
                mix[i] >= c9[i] * (1.0 - 1e-12),
                "below envelope at {}",
                g[i]
            );
            assert!(
                mix[i] <= c7[i] * (1.0 + 1e-12),
                "above envelope at {}",
                g[i]
            );
        }
    }

    #[test]
    fn strongly_confined_spectrum_is_shifted_broadened_asymmetric() {
        let p = params();
        let confined = extract_features(&simulate_single(4.5, &p)).unwrap();
        let bulk = p.zone_center_omega();
        assert!(confined.position < bulk - 5.0);
        assert!(confined.fwhm > 2.0 * p.gamma0);
        assert!(confined.asymmetry > 1.5);
    }

    #[test]
    fn calibration_sets_offset_and_linewidth_from_bulk() {
        let p = params();
        let bulk = lorentzian_spectrum(280.0, 321.0, 0.02, 300.5, 3.0, 1.0, 0.0);
        let cal = calibrate_c(&bulk, &p).unwrap();
        assert!((cal.calibration_c - 3.01).abs() < 0.01);
        assert!((cal.gamma0 - 3.0).abs() < 0.01);

        // bulk peak exactly at sqrt(A+B) gives C = 0
        let center = (p.dispersion_a + p.dispersion_b).sqrt();
        let bulk0 = lorentzian_spectrum(center - 20.0, center + 20.0, 0.02, center, 3.0, 1.0, 0.0);
        let cal0 = calibrate_c(&bulk0, &p).unwrap();
        assert!(cal0.calibration_c.abs() < 0.01);
    }

    #[test]
    fn params_validation_catches_bad_values() {
        let mut p = params();
        p.dispersion_b = p.dispersion_a + 1.0;
        assert!(p.validate().is_err());

        let mut p = params();
        p.quad_nodes = 32;
        assert!(p.validate().is_err());

        let mut p = params();
        p.gamma0 = 0.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn params_serialize_with_stable_field_names() {
        let p = params();
        let json = serde_json::to_string(&p).unwrap();
        for key in [
            "\"A\":",
            "\"B\":",
            "\"C\":",
            "\"gamma0\":",
            "\"lattice_a\":",
            "\"geometry\":",
            "\"quad_nodes\":",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        assert!(json.contains("\"sphere3d\""));
        let back: RcfParams = serde_json::from_str(&json).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn request_warns_outside_recommended_band() {
        let p = params();
        let req = ModelSpectrumRequest {
            omega_grid: grid(100.0, 400.0, 1.0),
            diameter: DiameterSpec::Single(8.0),
            params: p,
        };
        let warnings = req.validate().unwrap();
        assert_eq!(warnings.len(), 1);

        let req2 = ModelSpectrumRequest {
            omega_grid: grid(250.0, 320.0, 1.0),
            ..req
        };
        assert!(req2.validate().unwrap().is_empty());
    }
}
