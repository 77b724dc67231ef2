//! Shared numerical routines: Gauss-Legendre quadrature nodes, golden-section
//! minimization, ordinary least squares, trapezoidal integration, and a
//! projected-gradient nonnegative least squares solver.
//!
//! Everything here is deterministic: fixed node counts, fixed iteration
//! schedules, no randomness.

// The matrix kernels below read better with explicit indices.
#![allow(clippy::needless_range_loop)]

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A Gauss-Legendre rule mapped to the unit interval [0, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    /// Quadrature nodes in (0, 1), ascending.
    pub nodes: Vec<f64>,
    /// Matching weights; they sum to 1.
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the n-point rule with Newton iteration on the Legendre
    /// polynomial recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "Gauss-Legendre rule needs at least 2 nodes");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let (_, d2) = legendre_with_derivative(n, x);
                    dp = d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Guesses start near +1 and walk toward the center; mirror the
            // other half so the rule is exactly symmetric.
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        // Map [-1, 1] -> [0, 1].
        for i in 0..n {
            nodes[i] = 0.5 * (nodes[i] + 1.0);
            weights[i] *= 0.5;
        }
        Self { nodes, weights }
    }
}

/// Evaluates (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}

/// Returns the n-point unit-interval rule from a process-wide cache.
///
/// Node construction is O(n^2); fitting loops request the same rule thousands
/// of times, so rules are computed once and shared.
pub fn gauss_legendre_unit(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Golden-section search for the minimum of `f` on [a, b].
///
/// Returns the best evaluated point `(x_min, f_min)`. Shrinks the bracket
/// until it is narrower than `tol`.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Nelder-Mead simplex minimization in two variables.
///
/// Deterministic: fixed initial simplex, fixed coefficients, fixed caps.
/// The incumbent best vertex never worsens, so seeding with a coarse-scan
/// winner guarantees the result is at least as good as the scan. Infeasible
/// regions can be fenced off by returning `f64::INFINITY` from `f`.
///
/// Returns the best vertex and its value once the simplex diameter falls
/// below `tol` (or after `max_iter` reflections).
pub fn nelder_mead_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    start: (f64, f64),
    step: (f64, f64),
    tol: f64,
    max_iter: usize,
) -> ((f64, f64), f64) {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex = [
        (start, f(start.0, start.1)),
        ((start.0 + step.0, start.1), f(start.0 + step.0, start.1)),
        ((start.0, start.1 + step.1), f(start.0, start.1 + step.1)),
    ];

    let dist = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let diameter = dist(simplex[0].0, simplex[1].0)
            .max(dist(simplex[0].0, simplex[2].0))
            .max(dist(simplex[1].0, simplex[2].0));
        if diameter < tol {
            break;
        }
        let best = simplex[0];
        let second = simplex[1];
        let worst = simplex[2];
        let centroid = (
            0.5 * (best.0 .0 + second.0 .0),
            0.5 * (best.0 .1 + second.0 .1),
        );
        let reflect = (
            centroid.0 + ALPHA * (centroid.0 - worst.0 .0),
            centroid.1 + ALPHA * (centroid.1 - worst.0 .1),
        );
        let fr = f(reflect.0, reflect.1);
        if fr < best.1 {
            let expand = (
                centroid.0 + GAMMA * (centroid.0 - worst.0 .0),
                centroid.1 + GAMMA * (centroid.1 - worst.0 .1),
            );
            let fe = f(expand.0, expand.1);
            simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            continue;
        }
        if fr < second.1 {
            simplex[2] = (reflect, fr);
            continue;
        }
        let contract = if fr < worst.1 {
            (
                centroid.0 + RHO * (reflect.0 - centroid.0),
                centroid.1 + RHO * (reflect.1 - centroid.1),
            )
        } else {
            (
                centroid.0 - RHO * (centroid.0 - worst.0 .0),
                centroid.1 - RHO * (centroid.1 - worst.0 .1),
            )
        };
        let fc = f(contract.0, contract.1);
        if fc < fr.min(worst.1) {
            simplex[2] = (contract, fc);
            continue;
        }
        // shrink toward the best vertex
        for v in simplex.iter_mut().skip(1) {
            let p = (
                best.0 .0 + SIGMA * (v.0 .0 - best.0 .0),
                best.0 .1 + SIGMA * (v.0 .1 - best.0 .1),
            );
            *v = (p, f(p.0, p.1));
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    (simplex[0].0, simplex[0].1)
}

/// Ordinary least-squares straight line y = slope * x + intercept.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square of the fit residuals.
    pub residual_rms: f64,
}

/// Fits a straight line through (x, y) pairs. The caller guarantees at least
/// two pairwise-distinct abscissae.
pub fn ols_line(xs: &[f64], ys: &[f64]) -> LineFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - slope * x - intercept;
            r * r
        })
        .sum();
    LineFit {
        slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
    }
}

/// Trapezoidal integral of sampled data.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

/// Result of a nonnegative least-squares solve.
#[derive(Debug, Clone)]
pub struct NnlsSolution {
    /// Nonnegative coefficients, one per column.
    pub weights: Vec<f64>,
    /// Max KKT violation at termination (see `nnls`).
    pub kkt_residual: f64,
    /// Projected-gradient iterations performed.
    pub iterations: usize,
    /// Final sum of squared residuals.
    pub objective: f64,
}

/// Solves min ||A w - y||^2 subject to w >= 0 by projected gradient descent.
///
/// Columns are rescaled to unit norm internally, which keeps the fixed step
/// size usable for dictionaries whose columns differ in magnitude by orders
/// of magnitude. Every 64 iterations the current support is polished with an
/// exact unconstrained solve; the polished point is only accepted when it is
/// feasible and lowers the objective, so the objective is non-increasing
/// across iterations.
///
/// The KKT residual is measured in the original variables:
/// max over j of |g_j| where w_j > 0, and max(0, -g_j) where w_j = 0,
/// with g = A^T (A w - y). Iteration stops once it drops below `kkt_tol`.
pub fn nnls(columns: &[Vec<f64>], rhs: &[f64], kkt_tol: f64, max_iter: usize) -> NnlsSolution {
    let k = columns.len();
    let m = rhs.len();
    assert!(k > 0 && m > 0);
    for c in columns {
        assert_eq!(c.len(), m, "all columns must match the rhs length");
    }

    // Column scaling: a_j = col_j / c_j with c_j = ||col_j||.
    let scales: Vec<f64> = columns
        .iter()
        .map(|c| {
            let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();

    let col = |j: usize, i: usize| columns[j][i] / scales[j];

    // Lipschitz constant of the scaled normal matrix by power iteration.
    let mut v = vec![1.0 / (k as f64).sqrt(); k];
    let mut lip = 1.0;
    for _ in 0..100 {
        // u = A v
        let mut u = vec![0.0; m];
        for j in 0..k {
            if v[j] != 0.0 {
                for (i, ui) in u.iter_mut().enumerate() {
                    *ui += col(j, i) * v[j];
                }
            }
        }
        // t = A^T u
        let mut t = vec![0.0; k];
        for (j, tj) in t.iter_mut().enumerate() {
            *tj = u.iter().enumerate().map(|(i, ui)| col(j, i) * ui).sum();
        }
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        lip = norm;
        for (vj, tj) in v.iter_mut().zip(&t) {
            *vj = tj / norm;
        }
    }
    let mut step = 1.0 / (lip * 1.05);

    let objective = |w: &[f64]| -> f64 {
        let mut ss = 0.0;
        for i in 0..m {
            let mut r = -rhs[i];
            for j in 0..k {
                if w[j] != 0.0 {
                    r += col(j, i) * w[j];
                }
            }
            ss += r * r;
        }
        ss
    };
    let gradient = |w: &[f64]| -> Vec<f64> {
        let mut resid = vec![0.0; m];
        for i in 0..m {
            let mut r = -rhs[i];
            for j in 0..k {
                if w[j] != 0.0 {
                    r += col(j, i) * w[j];
                }
            }
            resid[i] = r;
        }
        (0..k)
            .map(|j| resid.iter().enumerate().map(|(i, ri)| col(j, i) * ri).sum())
            .collect()
    };

    let mut w = vec![0.0; k];
    let mut obj = objective(&w);
    let mut kkt = f64::INFINITY;
    let mut iterations = 0;

    for it in 0..max_iter {
        iterations = it + 1;
        let g = gradient(&w);

        // KKT residual in original variables: g_orig_j = c_j * g_scaled_j.
        kkt = 0.0f64;
        for j in 0..k {
            let go = scales[j] * g[j];
            let viol = if w[j] > 0.0 { go.abs() } else { (-go).max(0.0) };
            kkt = kkt.max(viol);
        }
        if kkt < kkt_tol {
            break;
        }

        // Projected gradient step with a monotonicity guard.
        let mut accepted = false;
        let mut s = step;
        for _ in 0..40 {
            let cand: Vec<f64> = w
                .iter()
                .zip(&g)
                .map(|(&wj, &gj)| (wj - s * gj).max(0.0))
                .collect();
            let cobj = objective(&cand);
            if cobj <= obj {
                w = cand;
                obj = cobj;
                step = s;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if !accepted {
            break; // no descent direction left at representable step sizes
        }

        // Periodic exact polish on the current support.
        if (it + 1).is_multiple_of(64) {
            let support: Vec<usize> = (0..k).filter(|&j| w[j] > 0.0).collect();
            if !support.is_empty() && support.len() <= m {
                if let Some(sol) = solve_support(columns, rhs, &scales, &support, m) {
                    if sol.iter().all(|&x| x >= 0.0) {
                        let mut cand = vec![0.0; k];
                        for (idx, &j) in support.iter().enumerate() {
                            cand[j] = sol[idx];
                        }
                        let cobj = objective(&cand);
                        if cobj < obj {
                            w = cand;
                            obj = cobj;
                        }
                    }
                }
            }
        }
    }

    let weights: Vec<f64> = w.iter().zip(&scales).map(|(&wj, &cj)| wj / cj).collect();
    NnlsSolution {
        weights,
        kkt_residual: kkt,
        iterations,
        objective: obj,
    }
}

/// Unconstrained least squares restricted to `support` (scaled variables),
/// solved via the normal equations with partial pivoting. Returns None for a
/// numerically singular system.
fn solve_support(
    columns: &[Vec<f64>],
    rhs: &[f64],
    scales: &[f64],
    support: &[usize],
    m: usize,
) -> Option<Vec<f64>> {
    let k = support.len();
    let mut ata = vec![vec![0.0; k]; k];
    let mut aty = vec![0.0; k];
    for (p, &jp) in support.iter().enumerate() {
        for (q, &jq) in support.iter().enumerate().skip(p) {
            let mut dot = 0.0;
            for i in 0..m {
                dot += (columns[jp][i] / scales[jp]) * (columns[jq][i] / scales[jq]);
            }
            ata[p][q] = dot;
            ata[q][p] = dot;
        }
        aty[p] = (0..m).map(|i| (columns[jp][i] / scales[jp]) * rhs[i]).sum();
    }
    // Gaussian elimination with partial pivoting.
    for c in 0..k {
        let mut piv = c;
        for r in c + 1..k {
            if ata[r][c].abs() > ata[piv][c].abs() {
                piv = r;
            }
        }
        if ata[piv][c].abs() < 1e-300 {
            return None;
        }
        ata.swap(c, piv);
        aty.swap(c, piv);
        for r in c + 1..k {
            let factor = ata[r][c] / ata[c][c];
            for cc in c..k {
                ata[r][cc] -= factor * ata[c][cc];
            }
            aty[r] -= factor * aty[c];
        }
    }
    let mut x = vec![0.0; k];
    for c in (0..k).rev() {
        let mut acc = aty[c];
        for cc in c + 1..k {
            acc -= ata[c][cc] * x[cc];
        }
        x[c] = acc / ata[c][c];
    }
    Some(x)
}
