//! Executable checks of the estimators' mathematical guarantees.
//!
//! Each check runs a fixed number of randomized trials and returns a
//! [`PropertyReport`] instead of panicking, so the same code serves the test
//! suite and the CLI's property runner. Tolerances are fixed here, next to
//! the property they guard:
//!
//! * symmetry and identity of the shared-slice estimators are exact (the two
//!   evaluations perform identical arithmetic);
//! * the triangle inequality of the shared-slice estimators holds by the
//!   Minkowski inequality in exact arithmetic, so it gets a pure
//!   floating-point slack of 1e-9;
//! * analytic gradients against central finite differences: 1e-5 relative;
//! * Lipschitz domination of the sliced estimate by the exact distance: 1e-9.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::assignment::exact_wp;
use crate::dataset::{sample_unit_sphere_with, PointCloud};
use crate::defining::DefiningFunction;
use crate::distance::{gsw_with_thetas, max_sw, slice_pth_power};
use crate::error::Result;
use crate::flow::flow_gradient;
use crate::one_d::{sort_permutation, wasserstein_1d};
use crate::optim::{AdamParams, OptimizerConfig};
use crate::rng::{standard_normal, stream_rng};

/// Tolerance for the triangle inequality of shared-slice estimators.
pub const TRIANGLE_SLACK: f64 = 1e-9;
/// Tolerance for gradient vs finite-difference agreement.
pub const GRADIENT_TOL: f64 = 1e-5;
/// Tolerance for `sliced <= exact` domination checks.
pub const BOUND_SLACK: f64 = 1e-9;
/// Tolerance for `gsw <= max_gsw` (covers optimizer slack).
pub const MAX_SLACK: f64 = 1e-6;

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    /// Trials attempted (including excluded ones).
    pub trials: usize,
    /// Trials that violated the property beyond its tolerance.
    pub failures: usize,
    /// Largest violation magnitude observed, even when inside tolerance.
    pub worst_violation: f64,
    /// Trials skipped under a documented exclusion rule (near-singular
    /// circular points); excluded trials are neither passes nor failures.
    pub excluded: usize,
}

impl PropertyReport {
    fn new(name: String, trials: usize) -> Self {
        Self {
            name,
            trials,
            failures: 0,
            worst_violation: 0.0,
            excluded: 0,
        }
    }

    fn record(&mut self, violation: f64, tolerance: f64) -> bool {
        if violation > self.worst_violation {
            self.worst_violation = violation;
        }
        violation > tolerance
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl std::fmt::Display for PropertyReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "{}: {}/{} trials failed ({} excluded), worst violation {:.3e}",
            self.name, self.failures, self.trials, self.excluded, self.worst_violation
        )
    }
}

/// How the per-slice distances are combined in the axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricForm {
    /// The Monte-Carlo estimator: p-mean over the shared slice set.
    Average,
    /// The max estimator: maximum over the shared slice set. The
    /// optimization-based `max_gsw` only approximates this; the axioms are a
    /// statement about the max itself, so the check takes an exact max over
    /// a fixed finite slice set.
    Max,
}

impl MetricForm {
    fn name(self) -> &'static str {
        match self {
            MetricForm::Average => "average",
            MetricForm::Max => "max",
        }
    }
}

fn gaussian_cloud(n: usize, d: usize, rng: &mut impl Rng) -> PointCloud {
    let mut pts = Array2::zeros((n, d));
    for v in pts.iter_mut() {
        *v = 2.0 * standard_normal(rng);
    }
    PointCloud::new(pts).unwrap()
}

/// Pseudo-metric axioms of the shared-slice estimator over random cloud
/// triples: non-negativity, exact symmetry, exact `d(x, x) = 0`, and the
/// triangle inequality within [`TRIANGLE_SLACK`].
pub fn check_metric_axioms(
    form: MetricForm,
    f: &DefiningFunction,
    p: f64,
    trials: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(
        format!("metric_axioms({}, {})", f.name(), form.name()),
        trials,
    );
    let d = f.data_dim();

    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let thetas = sample_unit_sphere_with(f.dim_theta(), 10, &mut rng)?;
        let n = rng.gen_range(4..=24);
        let a = gaussian_cloud(n, d, &mut rng);
        // Every 25th trial exercises the degenerate case x = y = z.
        let (b, c) = if t % 25 == 24 {
            (a.clone(), a.clone())
        } else {
            (gaussian_cloud(n, d, &mut rng), gaussian_cloud(n, d, &mut rng))
        };

        let dist = |u: &PointCloud, v: &PointCloud| -> Result<f64> {
            match form {
                MetricForm::Average => gsw_with_thetas(u, v, f, p, &thetas),
                MetricForm::Max => {
                    let mut best = 0.0f64;
                    for theta in &thetas {
                        best = best.max(slice_pth_power(u, v, f, p, theta.view())?);
                    }
                    Ok(best.powf(1.0 / p))
                }
            }
        };

        let ab = dist(&a, &b)?;
        let ba = dist(&b, &a)?;
        let ac = dist(&a, &c)?;
        let cb = dist(&c, &b)?;
        let aa = dist(&a, &a)?;

        let mut failed = false;
        failed |= report.record((-ab).max(0.0), 0.0); // non-negativity, exact
        failed |= report.record((ab - ba).abs(), 0.0); // symmetry, exact
        failed |= report.record(aa.abs(), 0.0); // identity, exact
        failed |= report.record(ab - (ac + cb), TRIANGLE_SLACK);
        if failed {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// Analytic gradients versus central finite differences (h = 1e-5):
/// `grad_x` and `grad_theta` at random points, and `flow_gradient` against
/// the fixed-matching objective on every 10th trial. Circular trials with a
/// data point within 0.05 of the singularity `x = r*theta` are excluded, not
/// failed; the step size makes finite differences unreliable there.
pub fn check_gradients(f: &DefiningFunction, trials: usize, seed: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport::new(format!("gradients({})", f.name()), trials);
    let d = f.data_dim();
    let h = 1e-5;

    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let theta = f.sample_theta(&mut rng);
        let x = Array1::from_iter((0..d).map(|_| 2.0 * standard_normal(&mut rng)));

        if near_circular_singularity(f, theta.view(), x.view()) {
            report.excluded += 1;
            continue;
        }

        let mut failed = false;

        let gx = f.grad_x(theta.view(), x.view())?;
        let fd_x = fd_vector(
            |xv| f.eval(theta.view(), xv.view()),
            &x,
            h,
        )?;
        failed |= report.record(rel_err(&gx, &fd_x), GRADIENT_TOL);

        let gt = f.grad_theta(theta.view(), x.view())?;
        let fd_t = fd_vector(
            |tv| f.eval(tv.view(), x.view()),
            &theta,
            h,
        )?;
        failed |= report.record(rel_err(&gt, &fd_t), GRADIENT_TOL);

        if t % 10 == 0 {
            match flow_gradient_violation(f, &mut rng)? {
                Some(violation) => failed |= report.record(violation, GRADIENT_TOL),
                None => {
                    report.excluded += 1;
                    continue;
                }
            }
        }

        if failed {
            report.failures += 1;
        }
    }
    Ok(report)
}

fn near_circular_singularity(
    f: &DefiningFunction,
    theta: ndarray::ArrayView1<'_, f64>,
    x: ndarray::ArrayView1<'_, f64>,
) -> bool {
    match f {
        DefiningFunction::Circular { .. } => {
            f.eval(theta, x).map(|v| v < 0.05).unwrap_or(true)
        }
        _ => false,
    }
}

fn fd_vector(
    eval: impl Fn(&Array1<f64>) -> Result<f64>,
    at: &Array1<f64>,
    h: f64,
) -> Result<Array1<f64>> {
    let mut grad = Array1::zeros(at.len());
    for j in 0..at.len() {
        let mut hi = at.clone();
        let mut lo = at.clone();
        hi[j] += h;
        lo[j] -= h;
        grad[j] = (eval(&hi)? - eval(&lo)?) / (2.0 * h);
    }
    Ok(grad)
}

fn rel_err(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let diff = (a - b).mapv(f64::abs).sum();
    let scale = b.mapv(f64::abs).sum().max(1e-3);
    diff / scale
}

/// Finite-difference check of `flow_gradient` on one random instance
/// (N = 8, L = 3). Returns `None` when a circular instance sits too close to
/// the singularity to difference reliably.
fn flow_gradient_violation(f: &DefiningFunction, rng: &mut impl Rng) -> Result<Option<f64>> {
    let n = 8;
    let l = 3;
    let d = f.data_dim();
    let p = 2.0;
    // Unit-scale points: the squared polynomial projections grow as fast as
    // |x|^(2m), and large objective values drown the finite differences in
    // cancellation noise.
    let mut pts_x = Array2::zeros((n, d));
    let mut pts_y = Array2::zeros((n, d));
    for v in pts_x.iter_mut().chain(pts_y.iter_mut()) {
        *v = standard_normal(rng);
    }
    let x = PointCloud::new(pts_x)?;
    let y = PointCloud::new(pts_y)?;
    let thetas = sample_unit_sphere_with(f.dim_theta(), l, rng)?;

    if matches!(f, DefiningFunction::Circular { .. }) {
        for theta in &thetas {
            for row in x.points().rows() {
                if f.eval(theta.view(), row)? < 0.05 {
                    return Ok(None);
                }
            }
        }
    }

    let grad = flow_gradient(&x, &y, &thetas, f, p)?;

    // Matchings fixed at the base configuration; the objective below is then
    // smooth in the particle positions.
    let matchings: Vec<(Vec<usize>, Vec<f64>, Vec<usize>)> = thetas
        .iter()
        .map(|t| {
            let xs: Vec<f64> = x
                .points()
                .rows()
                .into_iter()
                .map(|row| f.eval(t.view(), row).unwrap())
                .collect();
            let ys: Vec<f64> = y
                .points()
                .rows()
                .into_iter()
                .map(|row| f.eval(t.view(), row).unwrap())
                .collect();
            (sort_permutation(&xs), ys.clone(), sort_permutation(&ys))
        })
        .collect();
    let objective = |pts: &Array2<f64>| -> Result<f64> {
        let mut acc = 0.0;
        for (theta, (xi, ys, yi)) in thetas.iter().zip(&matchings) {
            for k in 0..n {
                let gx = f.eval(theta.view(), pts.row(xi[k]))?;
                let delta = gx - ys[yi[k]];
                acc += delta.powi(2) / n as f64;
            }
        }
        Ok(acc / l as f64)
    };

    let h = 1e-5;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..d {
            let mut hi = x.points().clone();
            let mut lo = x.points().clone();
            hi[[i, j]] += h;
            lo[[i, j]] -= h;
            let fd = (objective(&hi)? - objective(&lo)?) / (2.0 * h);
            let scale = fd.abs().max(1e-3);
            worst = worst.max((grad[[i, j]] - fd).abs() / scale);
        }
    }
    Ok(Some(worst))
}

/// Ordering and equivalence bounds tying the estimators together:
/// `sw <= exact W_p` and `gsw(circular) <= exact W_p` (Lipschitz slicing),
/// `gsw <= max_gsw + 1e-6` (average below max; optimizer slack), exact
/// agreement of `sw` with `wasserstein_1d` in one dimension, and
/// `max_sw = exact = ||a - b||` on single-point clouds.
pub fn check_bounds(trials: usize, seed: u64) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("bounds".to_string(), trials);
    let p = 2.0;
    let linear = DefiningFunction::linear(2)?;
    let circular = DefiningFunction::circular(2, 1.0)?;
    let opt = OptimizerConfig {
        adam: AdamParams::with_lr(0.05),
        steps: 100,
        min_step: 1e-7,
    };

    for t in 0..trials {
        let mut rng = stream_rng(seed, t as u64);
        let n = 64;
        let x = gaussian_cloud(n, 2, &mut rng);
        let y = gaussian_cloud(n, 2, &mut rng);
        let oracle = exact_wp(&x, &y, p)?.cost;

        let mut failed = false;

        // Lipschitz domination, shared slices for determinism.
        let thetas = sample_unit_sphere_with(2, 10, &mut rng)?;
        let sw_val = gsw_with_thetas(&x, &y, &linear, p, &thetas)?;
        failed |= report.record(sw_val - oracle, BOUND_SLACK);
        let gsw_circ = gsw_with_thetas(&x, &y, &circular, p, &thetas)?;
        failed |= report.record(gsw_circ - oracle, BOUND_SLACK);

        // Average below max, skipped when the optimizer fails outright.
        match crate::distance::max_gsw(&x, &y, &linear, p, &opt, 4, rng.gen()) {
            Ok(max_est) => failed |= report.record(sw_val - max_est.value, MAX_SLACK),
            Err(_) => report.excluded += 1,
        }

        // 1D equivalence.
        let m = rng.gen_range(1..=64);
        let mut xs1 = Array2::zeros((m, 1));
        let mut ys1 = Array2::zeros((m, 1));
        for i in 0..m {
            xs1[[i, 0]] = 3.0 * standard_normal(&mut rng);
            ys1[[i, 0]] = 3.0 * standard_normal(&mut rng);
        }
        let xv: Vec<f64> = xs1.column(0).to_vec();
        let yv: Vec<f64> = ys1.column(0).to_vec();
        let x1 = PointCloud::new(xs1)?;
        let y1 = PointCloud::new(ys1)?;
        let direct = wasserstein_1d(&xv, &yv, p)?;
        let sliced = crate::distance::sw(&x1, &y1, p, 3, rng.gen())?.value;
        failed |= report.record(
            (sliced - direct).abs() / direct.max(1.0),
            1e-10,
        );

        // Single-point closed form.
        let a = Array1::from_iter((0..2).map(|_| 2.0 * standard_normal(&mut rng)));
        let b = Array1::from_iter((0..2).map(|_| 2.0 * standard_normal(&mut rng)));
        let diff = &a - &b;
        let gap = diff.dot(&diff).sqrt();
        if gap > 0.1 {
            let xa = PointCloud::new(a.clone().insert_axis(ndarray::Axis(0)))?;
            let yb = PointCloud::new(b.clone().insert_axis(ndarray::Axis(0)))?;
            let single_oracle = exact_wp(&xa, &yb, p)?.cost;
            failed |= report.record((single_oracle - gap).abs() / gap, 1e-12);
            match max_sw(&xa, &yb, p, &opt, 4, rng.gen()) {
                Ok(est) => {
                    failed |= report.record((est.value - gap).abs() / gap, 1e-3);
                }
                Err(_) => report.excluded += 1,
            }
        }

        if failed {
            report.failures += 1;
        }
    }
    Ok(report)
}

/// The full battery at a given trial count: axioms for the four acceptance
/// methods, gradients for each family, and the bound checks.
pub fn check_all(trials: usize, seed: u64) -> Result<Vec<PropertyReport>> {
    let linear = DefiningFunction::linear(2)?;
    let circular = DefiningFunction::circular(2, 1.0)?;
    let poly3 = DefiningFunction::poly_homogeneous(2, 3)?;
    let poly5 = DefiningFunction::poly_homogeneous(2, 5)?;

    let mut reports = vec![
        check_metric_axioms(MetricForm::Average, &linear, 2.0, trials, seed)?,
        check_metric_axioms(MetricForm::Average, &circular, 2.0, trials, seed)?,
        check_metric_axioms(MetricForm::Average, &poly3, 2.0, trials, seed)?,
        check_metric_axioms(MetricForm::Max, &linear, 2.0, trials, seed)?,
    ];
    for f in [&linear, &circular, &poly3, &poly5] {
        reports.push(check_gradients(f, trials, seed)?);
    }
    reports.push(check_bounds(trials.min(100), seed)?);
    Ok(reports)
}
