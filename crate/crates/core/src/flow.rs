//! Sliced-distance gradient flows.
//!
//! A flow moves source particles to minimize the (max-)GSW distance to a
//! fixed target cloud: per iteration, draw fresh slices (or optimize one),
//! differentiate the Monte-Carlo estimate of the distance's p-th power with
//! respect to particle positions, and take an ADAM step. Minimizing the p-th
//! power rather than the distance itself avoids the root's gradient
//! singularity at zero.

use ndarray::{Array1, Array2};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::assignment::exact_wp;
use crate::dataset::{sample_unit_sphere_with, PointCloud};
use crate::defining::DefiningFunction;
use crate::distance::{gsw_with_thetas, objective_and_grad, project_cloud};
use crate::error::{Error, Result};
use crate::one_d::sort_permutation;
use crate::optim::{projected_ascent, AdamParams, AdamState, OptimizerConfig};
use crate::rng::stream_rng;

/// How slices are chosen each iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowMethod {
    /// L fresh random slices per iteration (stochastic gradient over theta).
    Gsw,
    /// One optimized slice per iteration, warm-started from the previous
    /// iteration's maximizer.
    MaxGsw,
}

/// Full description of a flow run.
#[derive(Debug, Clone)]
pub struct FlowConfig {
    pub function: DefiningFunction,
    pub p: f64,
    /// Slices per iteration (Gsw method only).
    pub l: usize,
    pub method: FlowMethod,
    pub iterations: usize,
    /// ADAM hyperparameters for the particle updates.
    pub particle_adam: AdamParams,
    /// Budget for the per-iteration slice optimization (MaxGsw method only).
    pub theta_opt: OptimizerConfig,
    /// Evaluate the exact oracle every this many iterations; `None` disables
    /// oracle tracking entirely.
    pub oracle_every: Option<usize>,
    pub seed: u64,
}

impl FlowConfig {
    /// Defaults: p = 2, L = 10, plain GSW slicing, 500 iterations, oracle
    /// every 10 iterations.
    pub fn new(function: DefiningFunction, seed: u64) -> Self {
        Self {
            function,
            p: 2.0,
            l: 10,
            method: FlowMethod::Gsw,
            iterations: 500,
            particle_adam: AdamParams::default(),
            theta_opt: OptimizerConfig::default(),
            oracle_every: Some(10),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be >= 1"));
        }
        if self.method == FlowMethod::Gsw && self.l == 0 {
            return Err(Error::invalid("slice count must be >= 1"));
        }
        if self.oracle_every == Some(0) {
            return Err(Error::invalid("oracle_every must be >= 1"));
        }
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::invalid(format!("p must be in [1, inf), got {}", self.p)));
        }
        self.particle_adam.validate()?;
        self.theta_opt.validate()
    }
}

/// State of the flow after one iteration's particle update.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowRecord {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Sliced estimate between the updated particles and the target, using
    /// the iteration's own slices.
    pub estimate: f64,
    /// Exact 2-Wasserstein distance to the target, present on iterations
    /// divisible by `oracle_every`.
    pub oracle_w2: Option<f64>,
}

/// One record per iteration plus the final particle positions.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub records: Vec<FlowRecord>,
    pub final_cloud: PointCloud,
}

/// Gradient of the fixed-matching Monte-Carlo estimate of GSW_p^p with
/// respect to the source positions:
/// `d/dx_i = (1/(L*N)) sum_l p * sign(delta) * |delta|^(p-1) * grad_x(theta_l, x_i)`
/// where `delta` is the matched projected difference under slice `l`.
pub fn flow_gradient(
    x: &PointCloud,
    y: &PointCloud,
    thetas: &[Array1<f64>],
    f: &DefiningFunction,
    p: f64,
) -> Result<Array2<f64>> {
    if x.len() != y.len() {
        return Err(Error::SizeMismatch(x.len(), y.len()));
    }
    if thetas.is_empty() {
        return Err(Error::invalid("slice set must be non-empty"));
    }

    let compute = |theta: &Array1<f64>| slice_gradient(x, y, theta, f, p);
    #[cfg(feature = "parallel")]
    let contributions: Vec<Array2<f64>> = thetas.par_iter().map(compute).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let contributions: Vec<Array2<f64>> = thetas.iter().map(compute).collect::<Result<_>>()?;

    let mut total = Array2::zeros((x.len(), x.dim()));
    for c in contributions {
        total += &c;
    }
    total /= thetas.len() as f64;
    Ok(total)
}

fn slice_gradient(
    x: &PointCloud,
    y: &PointCloud,
    theta: &Array1<f64>,
    f: &DefiningFunction,
    p: f64,
) -> Result<Array2<f64>> {
    let xs = project_cloud(x, f, theta.view())?;
    let ys = project_cloud(y, f, theta.view())?;
    let xi = sort_permutation(&xs);
    let yi = sort_permutation(&ys);

    let n = x.len();
    let mut grad = Array2::zeros((n, x.dim()));
    for k in 0..n {
        let (i, j) = (xi[k], yi[k]);
        let delta = xs[i] - ys[j];
        let mag = delta.abs();
        if mag > 0.0 {
            let weight = p * mag.powf(p - 1.0) * delta.signum() / n as f64;
            let gx = f.grad_x(theta.view(), x.points().row(i))?;
            let mut row = grad.row_mut(i);
            row.scaled_add(weight, &gx);
        }
    }
    Ok(grad)
}

/// Run a flow from `source` toward `target`. Deterministic given the config
/// seed; each record reflects the particle state after that iteration's
/// update.
pub fn run_flow(source: &PointCloud, target: &PointCloud, config: &FlowConfig) -> Result<FlowTrace> {
    config.validate()?;
    let f = &config.function;
    if source.len() != target.len() {
        return Err(Error::SizeMismatch(source.len(), target.len()));
    }
    if source.dim() != f.data_dim() || target.dim() != f.data_dim() {
        return Err(Error::DimensionMismatch {
            expected: f.data_dim(),
            got: source.dim(),
        });
    }

    let mut particles = source.points().clone();
    let mut adam = AdamState::like(&particles, config.particle_adam)?;
    let mut warm_theta: Option<Array1<f64>> = None;
    let mut records = Vec::with_capacity(config.iterations);

    for k in 1..=config.iterations {
        let current = PointCloud::new(particles.clone())?;
        let thetas = match config.method {
            FlowMethod::Gsw => {
                let mut rng = stream_rng(config.seed, k as u64);
                sample_unit_sphere_with(f.dim_theta(), config.l, &mut rng)?
            }
            FlowMethod::MaxGsw => {
                let init = match &warm_theta {
                    Some(theta) => theta.clone(),
                    None => {
                        let mut rng = stream_rng(config.seed, k as u64);
                        f.sample_theta(&mut rng)
                    }
                };
                let result = projected_ascent(
                    |theta| objective_and_grad(&current, target, f, config.p, theta),
                    init.view(),
                    &config.theta_opt,
                )?;
                warm_theta = Some(result.best_theta.clone());
                vec![result.best_theta]
            }
        };

        let grad = flow_gradient(&current, target, &thetas, f, config.p)?;
        adam.step(&mut particles, &grad)?;

        let updated = PointCloud::new(particles.clone())?;
        let estimate = gsw_with_thetas(&updated, target, f, config.p, &thetas)?;
        let oracle_w2 = match config.oracle_every {
            Some(every) if k % every == 0 => Some(exact_wp(&updated, target, 2.0)?.cost),
            _ => None,
        };
        records.push(FlowRecord {
            iteration: k,
            estimate,
            oracle_w2,
        });
    }

    Ok(FlowTrace {
        records,
        final_cloud: PointCloud::new(particles)?,
    })
}
