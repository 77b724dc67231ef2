//! Inversion of measured spectra to nanowire diameters by least squares
//! against the confinement forward model.
//!
//! All fitters share the same structure: amplitude and additive offset are
//! linear nuisance parameters solved in closed form at every candidate, so
//! the nonlinear search runs over one dimension (a single diameter), two
//! (an interval), or a nonnegative weight vector (a diameter grid, solved
//! with NNLS). Model curves are cached per diameter because the inner zone
//! integral dominates the cost.

use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{golden_section_min, nelder_mead_2d, nnls};
use crate::rcf::{raw_intensity_curve, RcfParams, INTERVAL_INNER_POINTS};
use crate::spectrum::Spectrum;

/// Number of points in the initial coarse diameter scan.
pub const COARSE_SCAN_POINTS: usize = 16;

/// Diameter resolution of the golden-section refinement, in nm. Model curves
/// are cached at the same resolution.
const DIAMETER_TOL_NM: f64 = 1e-4;

/// Relative SSE difference below which the landscape counts as flat; ties
/// resolve to the smaller diameter so output is deterministic.
const TIE_EPS: f64 = 1e-12;

/// A diameter distribution: a single value, a uniform interval, or weights
/// on an explicit grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiameterDistribution {
    Point {
        point_nm: f64,
    },
    UniformInterval {
        /// (D_min, D_max) in nm with D_min < D_max.
        interval_nm: (f64, f64),
    },
    Grid {
        grid_nm: Vec<f64>,
        /// Nonnegative weights summing to 1.
        weights: Vec<f64>,
    },
}

impl DiameterDistribution {
    pub fn point(point_nm: f64) -> Result<Self> {
        let d = Self::Point { point_nm };
        d.validate()?;
        Ok(d)
    }

    pub fn uniform_interval(d_min: f64, d_max: f64) -> Result<Self> {
        let d = Self::UniformInterval {
            interval_nm: (d_min, d_max),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn grid(grid_nm: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let d = Self::Grid { grid_nm, weights };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Point { point_nm } => {
                if !(*point_nm > 0.0) || !point_nm.is_finite() {
                    return Err(Error::Validation(format!(
                        "point diameter must be positive, got {point_nm}"
                    )));
                }
            }
            Self::UniformInterval { interval_nm } => {
                let (lo, hi) = *interval_nm;
                if !(lo > 0.0 && lo < hi) || !hi.is_finite() {
                    return Err(Error::Validation(format!(
                        "interval ({lo}, {hi}) must satisfy 0 < D_min < D_max"
                    )));
                }
            }
            Self::Grid { grid_nm, weights } => {
                if grid_nm.len() != weights.len() {
                    return Err(Error::Validation(format!(
                        "grid/weight length mismatch: {} vs {}",
                        grid_nm.len(),
                        weights.len()
                    )));
                }
                if grid_nm.is_empty() {
                    return Err(Error::Validation("empty diameter grid".into()));
                }
                if grid_nm.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
                    return Err(Error::Validation("grid diameters must be positive".into()));
                }
                if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
                    return Err(Error::Validation("weights must be nonnegative".into()));
                }
                let sum: f64 = weights.iter().sum();
                if (sum - 1.0).abs() > 1e-12 {
                    return Err(Error::Validation(format!(
                        "weights sum to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Human-readable summary; intervals use the `Dmin~Dmax nm` notation.
    pub fn summary(&self) -> String {
        match self {
            Self::Point { point_nm } => format!("{point_nm:.2} nm"),
            Self::UniformInterval { interval_nm } => {
                format!("{:.1}~{:.1} nm", interval_nm.0, interval_nm.1)
            }
            Self::Grid { grid_nm, .. } => format!("grid of {} diameters", grid_nm.len()),
        }
    }
}

/// Outcome of a diameter fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub distribution: DiameterDistribution,
    /// Nonnegative amplitude factor applied to the normalized model.
    pub scale: f64,
    /// Additive intensity offset.
    pub offset: f64,
    /// Sum of squared residuals at the solution.
    pub sse: f64,
    /// Forward-model curve evaluations performed (cache misses).
    pub n_model_evals: usize,
    /// Fit-quality notes, e.g. a diameter pinned at a search bound.
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// Per-fit cache of raw model curves, keyed by diameter rounded to
/// [`DIAMETER_TOL_NM`].
struct ModelTable<'a> {
    grid: &'a [f64],
    params: &'a RcfParams,
    cache: HashMap<i64, Rc<Vec<f64>>>,
    evals: usize,
}

impl<'a> ModelTable<'a> {
    fn new(grid: &'a [f64], params: &'a RcfParams) -> Self {
        Self {
            grid,
            params,
            cache: HashMap::new(),
            evals: 0,
        }
    }

    fn key(d: f64) -> i64 {
        (d / DIAMETER_TOL_NM).round() as i64
    }

    fn raw_curve(&mut self, d: f64) -> Result<Rc<Vec<f64>>> {
        let key = Self::key(d);
        if let Some(c) = self.cache.get(&key) {
            return Ok(c.clone());
        }
        let snapped = key as f64 * DIAMETER_TOL_NM;
        let curve = Rc::new(raw_intensity_curve(self.grid, snapped, self.params)?);
        self.evals += 1;
        self.cache.insert(key, curve.clone());
        Ok(curve)
    }

    /// Normalized single-diameter model curve.
    fn point_model(&mut self, d: f64) -> Result<Vec<f64>> {
        let raw = self.raw_curve(d)?;
        Ok(normalize(&raw))
    }

    /// Normalized uniform-interval model: mean of the raw curves on an
    /// inner grid of [`INTERVAL_INNER_POINTS`] equally spaced diameters.
    fn interval_model(&mut self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; self.grid.len()];
        for k in 0..INTERVAL_INNER_POINTS {
            let d = lo + (hi - lo) * k as f64 / (INTERVAL_INNER_POINTS - 1) as f64;
            let raw = self.raw_curve(d)?;
            for (a, c) in acc.iter_mut().zip(raw.iter()) {
                *a += c;
            }
        }
        Ok(normalize(&acc))
    }
}

fn normalize(curve: &[f64]) -> Vec<f64> {
    let max = curve.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    curve.iter().map(|y| y / max).collect()
}

/// Closed-form least-squares solve of y ~ scale * model + offset, with the
/// scale clamped to be nonnegative. Returns (scale, offset, sse).
fn solve_scale_offset(model: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = model.len() as f64;
    let sum_m: f64 = model.iter().sum();
    let sum_y: f64 = y.iter().sum();
    let sum_mm: f64 = model.iter().map(|m| m * m).sum();
    let sum_my: f64 = model.iter().zip(y).map(|(m, v)| m * v).sum();
    let det = n * sum_mm - sum_m * sum_m;
    let mut scale = if det.abs() > 0.0 {
        (n * sum_my - sum_m * sum_y) / det
    } else {
        0.0
    };
    if scale < 0.0 {
        scale = 0.0;
    }
    let offset = (sum_y - scale * sum_m) / n;
    let sse: f64 = model
        .iter()
        .zip(y)
        .map(|(m, v)| {
            let r = v - scale * m - offset;
            r * r
        })
        .sum();
    (scale, offset, sse)
}

/// Measured intensities scaled to unit peak so fits are invariant under
/// intensity scaling; returns (normalized intensities, the scale factor).
fn normalized_target(measured: &Spectrum) -> Result<(Vec<f64>, f64)> {
    let max = measured.max_intensity();
    if !(max > 0.0) {
        return Err(Error::Validation(
            "measured spectrum has no positive intensity to fit".into(),
        ));
    }
    Ok((
        measured.intensities().iter().map(|y| y / max).collect(),
        max,
    ))
}

fn validate_d_range(d_range: (f64, f64)) -> Result<()> {
    let (lo, hi) = d_range;
    if !(lo > 0.0 && lo < hi) || !hi.is_finite() {
        return Err(Error::Validation(format!(
            "diameter range ({lo}, {hi}) must satisfy 0 < d_min < d_max"
        )));
    }
    Ok(())
}

/// Replaces `best` when `candidate` is more than a relative [`TIE_EPS`]
/// better; exact ties keep the earlier (smaller-diameter) entry.
fn improves(candidate: f64, best: f64) -> bool {
    if !best.is_finite() {
        return candidate < best;
    }
    candidate < best - TIE_EPS * best.abs().max(f64::MIN_POSITIVE)
}

/// Fits a single diameter by golden-section search seeded with a
/// [`COARSE_SCAN_POINTS`]-point scan over `d_range`.
pub fn fit_single_diameter(
    measured: &Spectrum,
    params: &RcfParams,
    d_range: (f64, f64),
) -> Result<FitReport> {
    params.validate()?;
    validate_d_range(d_range)?;
    let (y, y_scale) = normalized_target(measured)?;
    let mut table = ModelTable::new(measured.wavenumbers(), params);

    let sse_at = |table: &mut ModelTable, d: f64| -> Result<f64> {
        let model = table.point_model(d)?;
        Ok(solve_scale_offset(&model, &y).2)
    };

    // Coarse scan, ascending, ties keep the smaller diameter.
    let (lo, hi) = d_range;
    let mut best_d = lo;
    let mut best_sse = f64::INFINITY;
    let mut coarse = Vec::with_capacity(COARSE_SCAN_POINTS);
    for i in 0..COARSE_SCAN_POINTS {
        let d = lo + (hi - lo) * i as f64 / (COARSE_SCAN_POINTS - 1) as f64;
        let sse = sse_at(&mut table, d)?;
        coarse.push(d);
        if improves(sse, best_sse) {
            best_sse = sse;
            best_d = d;
        }
    }

    // Golden-section refinement between the coarse neighbors of the best
    // point.
    let idx = coarse
        .iter()
        .position(|&d| d == best_d)
        .expect("best point comes from the scan");
    let bracket_lo = if idx == 0 { lo } else { coarse[idx - 1] };
    let bracket_hi = if idx + 1 == coarse.len() {
        hi
    } else {
        coarse[idx + 1]
    };
    let mut failure: Option<Error> = None;
    let (gd, gsse) = golden_section_min(
        |d| match sse_at(&mut table, d) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        bracket_lo,
        bracket_hi,
        DIAMETER_TOL_NM,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if improves(gsse, best_sse) {
        best_d = gd;
    }

    let mut warnings = Vec::new();
    if hi - best_d < 10.0 * DIAMETER_TOL_NM {
        warnings.push(format!(
            "best-fit diameter {best_d:.4} nm is pinned at the upper search bound {hi}; \
             the spectrum may be unconfined (bulk-like)"
        ));
    } else if best_d - lo < 10.0 * DIAMETER_TOL_NM {
        warnings.push(format!(
            "best-fit diameter {best_d:.4} nm is pinned at the lower search bound {lo}"
        ));
    }

    let model = table.point_model(best_d)?;
    let (scale, offset, sse) = solve_scale_offset(&model, &y);
    Ok(FitReport {
        distribution: DiameterDistribution::point(best_d)?,
        scale: scale * y_scale,
        offset: offset * y_scale,
        sse: sse * y_scale * y_scale,
        n_model_evals: table.evals,
        warnings,
    })
}

/// Fits a uniform interval (D_min, D_max): coarse scan over admissible
/// endpoint pairs, then simplex refinement in (center, width) coordinates.
pub fn fit_interval_distribution(
    measured: &Spectrum,
    params: &RcfParams,
    d_range: (f64, f64),
) -> Result<FitReport> {
    params.validate()?;
    validate_d_range(d_range)?;
    let (y, y_scale) = normalized_target(measured)?;
    let mut table = ModelTable::new(measured.wavenumbers(), params);

    let sse_at = |table: &mut ModelTable, lo: f64, hi: f64| -> Result<f64> {
        let model = if hi - lo < DIAMETER_TOL_NM {
            table.point_model(0.5 * (lo + hi))?
        } else {
            table.interval_model(lo, hi)?
        };
        Ok(solve_scale_offset(&model, &y).2)
    };

    // Coarse scan over endpoint pairs lo <= hi on a 12-point grid.
    const PAIR_GRID: usize = 12;
    let (range_lo, range_hi) = d_range;
    let coarse_d: Vec<f64> = (0..PAIR_GRID)
        .map(|i| range_lo + (range_hi - range_lo) * i as f64 / (PAIR_GRID - 1) as f64)
        .collect();
    let mut best = (range_lo, range_hi);
    let mut best_sse = f64::INFINITY;
    for (i, &lo) in coarse_d.iter().enumerate() {
        for &hi in &coarse_d[i..] {
            let sse = sse_at(&mut table, lo, hi)?;
            if improves(sse, best_sse) {
                best_sse = sse;
                best = (lo, hi);
            }
        }
    }

    // Local refinement with a deterministic Nelder-Mead simplex on
    // (center, width). The two endpoints trade off strongly along the
    // interval mean, which defeats axis-by-axis refinement; the simplex
    // walks the curved valley instead. Infeasible candidates (interval
    // leaving the search range) are fenced off with an infinite SSE.
    let mut failure: Option<Error> = None;
    {
        let start = (0.5 * (best.0 + best.1), best.1 - best.0);
        let coarse_step = (range_hi - range_lo) / (PAIR_GRID - 1) as f64;
        let ((center, width), sse) = nelder_mead_2d(
            |center, width| {
                if width < 0.0
                    || center - 0.5 * width < range_lo - 1e-12
                    || center + 0.5 * width > range_hi + 1e-12
                {
                    return f64::INFINITY;
                }
                match sse_at(&mut table, center - 0.5 * width, center + 0.5 * width) {
                    Ok(v) => v,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                }
            },
            start,
            (0.5 * coarse_step, 0.5 * coarse_step),
            10.0 * DIAMETER_TOL_NM,
            400,
        );
        if improves(sse, best_sse) {
            best = (center - 0.5 * width, center + 0.5 * width);
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let (lo, hi) = best;
    if hi - lo < DIAMETER_TOL_NM {
        // Degenerate interval: report a point fit instead.
        let d = 0.5 * (lo + hi);
        let model = table.point_model(d)?;
        let (scale, offset, sse) = solve_scale_offset(&model, &y);
        return Ok(FitReport {
            distribution: DiameterDistribution::point(d)?,
            scale: scale * y_scale,
            offset: offset * y_scale,
            sse: sse * y_scale * y_scale,
            n_model_evals: table.evals,
            warnings: vec![format!(
                "interval fit collapsed to a point at {d:.4} nm; reporting a point distribution"
            )],
        });
    }

    let model = table.interval_model(lo, hi)?;
    let (scale, offset, sse) = solve_scale_offset(&model, &y);
    Ok(FitReport {
        distribution: DiameterDistribution::uniform_interval(lo, hi)?,
        scale: scale * y_scale,
        offset: offset * y_scale,
        sse: sse * y_scale * y_scale,
        n_model_evals: table.evals,
        warnings: Vec::new(),
    })
}

/// KKT tolerance for the grid-weight NNLS solve.
pub const NNLS_KKT_TOL: f64 = 1e-10;

const NNLS_MAX_ITER: usize = 400_000;

/// Fits nonnegative weights over an explicit diameter grid.
///
/// The dictionary holds one raw model curve per grid diameter; the overall
/// scale is folded into the weights and recovered afterwards, while the
/// additive offset is eliminated by centering both sides. Weights are
/// renormalized to sum to 1 and the absorbed scale is reported separately.
pub fn fit_grid_distribution(
    measured: &Spectrum,
    params: &RcfParams,
    grid_nm: &[f64],
) -> Result<FitReport> {
    params.validate()?;
    if grid_nm.len() < 5 || grid_nm.len() > 50 {
        return Err(Error::Validation(format!(
            "diameter grid must have 5 to 50 entries, got {}",
            grid_nm.len()
        )));
    }
    if grid_nm.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(Error::Validation("grid diameters must be positive".into()));
    }
    for pair in grid_nm.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Validation(
                "grid diameters must be strictly increasing".into(),
            ));
        }
    }
    let (y, y_scale) = normalized_target(measured)?;
    let mut table = ModelTable::new(measured.wavenumbers(), params);

    let n = y.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let y_mean = mean(&y);
    let y_centered: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let mut columns = Vec::with_capacity(grid_nm.len());
    let mut col_means = Vec::with_capacity(grid_nm.len());
    for &d in grid_nm {
        let raw = table.raw_curve(d)?;
        let m = mean(&raw);
        col_means.push(m);
        columns.push(raw.iter().map(|v| v - m).collect::<Vec<f64>>());
    }

    let solution = nnls(&columns, &y_centered, NNLS_KKT_TOL, NNLS_MAX_ITER);
    let weight_sum: f64 = solution.weights.iter().sum();
    if !(weight_sum > 0.0) {
        return Err(Error::NoFit(
            "all grid weights are zero; the dictionary cannot represent the spectrum".into(),
        ));
    }
    let mut warnings = Vec::new();
    if solution.kkt_residual >= NNLS_KKT_TOL {
        warnings.push(format!(
            "NNLS stopped at the iteration cap with KKT residual {:.3e}",
            solution.kkt_residual
        ));
    }

    let offset = y_mean
        - solution
            .weights
            .iter()
            .zip(&col_means)
            .map(|(w, m)| w * m)
            .sum::<f64>();
    let weights: Vec<f64> = solution.weights.iter().map(|w| w / weight_sum).collect();

    Ok(FitReport {
        distribution: DiameterDistribution::grid(grid_nm.to_vec(), weights)?,
        scale: weight_sum * y_scale,
        offset: offset * y_scale,
        sse: solution.objective * y_scale * y_scale,
        n_model_evals: table.evals,
        warnings,
    })
}
