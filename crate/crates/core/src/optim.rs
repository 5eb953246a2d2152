//! ADAM optimization with unit-sphere projection.
//!
//! The same machinery serves two callers: maximizing the sliced objective
//! over the parameter sphere (max-GSW), and moving flow particles (where the
//! variable is an N x d matrix and no projection is applied).

use ndarray::{Array, Array1, ArrayView1, Dimension, Zip};

use crate::defining::project_to_unit_sphere;
use crate::error::{Error, Result};

/// ADAM hyperparameters. Defaults are `lr = 0.001`, `beta1 = 0.9`,
/// `beta2 = 0.999`, `epsilon = 1e-8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            lr: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamParams {
    pub fn with_lr(lr: f64) -> Self {
        Self {
            lr,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid(format!("lr must be positive, got {}", self.lr)));
        }
        for (name, beta) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::invalid(format!(
                    "{name} must be in [0, 1), got {beta}"
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Moment accumulators for one optimization run. The state has the same
/// shape as the variable (vector for theta, matrix for particles).
#[derive(Debug, Clone)]
pub struct AdamState<D: Dimension> {
    m: Array<f64, D>,
    v: Array<f64, D>,
    t: u64,
    params: AdamParams,
}

impl<D: Dimension> AdamState<D> {
    /// Fresh zeroed state shaped like `var`.
    pub fn like(var: &Array<f64, D>, params: AdamParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            m: Array::zeros(var.raw_dim()),
            v: Array::zeros(var.raw_dim()),
            t: 0,
            params,
        })
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One bias-corrected ADAM descent step: `var -= lr * m_hat / (sqrt(v_hat)
    /// + eps)`. Ascent callers pass the negated gradient.
    pub fn step(&mut self, var: &mut Array<f64, D>, grad: &Array<f64, D>) -> Result<()> {
        if grad.raw_dim() != self.m.raw_dim() || var.raw_dim() != self.m.raw_dim() {
            return Err(Error::invalid(format!(
                "adam shapes disagree: state {:?}, var {:?}, grad {:?}",
                self.m.shape(),
                var.shape(),
                grad.shape()
            )));
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }

        self.t += 1;
        let AdamParams {
            lr,
            beta1,
            beta2,
            epsilon,
        } = self.params;
        let m_corr = 1.0 - beta1.powi(self.t as i32);
        let v_corr = 1.0 - beta2.powi(self.t as i32);

        Zip::from(&mut self.m)
            .and(grad)
            .for_each(|m, &g| *m = beta1 * *m + (1.0 - beta1) * g);
        Zip::from(&mut self.v)
            .and(grad)
            .for_each(|v, &g| *v = beta2 * *v + (1.0 - beta2) * g * g);
        Zip::from(var)
            .and(&self.m)
            .and(&self.v)
            .for_each(|x, &m, &v| {
                let m_hat = m / m_corr;
                let v_hat = v / v_corr;
                *x -= lr * m_hat / (v_hat.sqrt() + epsilon);
            });
        Ok(())
    }
}

/// Budget for one projected-ascent run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub adam: AdamParams,
    /// Inner iterations per run. Default 50.
    pub steps: usize,
    /// Early exit once `||theta_new - theta_old|| < min_step`. Default 1e-6.
    pub min_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            adam: AdamParams::default(),
            steps: 50,
            min_step: 1e-6,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        if !(self.min_step >= 0.0 && self.min_step.is_finite()) {
            return Err(Error::invalid(format!(
                "min_step must be >= 0, got {}",
                self.min_step
            )));
        }
        Ok(())
    }
}

/// Outcome of [`projected_ascent`]: the final iterate plus the best point
/// seen anywhere along the trajectory (ADAM is not monotone, so they can
/// differ).
#[derive(Debug, Clone)]
pub struct AscentResult {
    pub theta: Array1<f64>,
    pub best_theta: Array1<f64>,
    pub best_value: f64,
    pub steps_taken: usize,
}

/// Maximize a smooth objective over the unit sphere: repeat an ADAM step on
/// the gradient followed by projection back to the sphere.
///
/// The raw gradient is first projected onto the tangent space at theta
/// (`g - <g, theta> theta`). The radial component is destroyed by the sphere
/// projection anyway, but feeding it to ADAM skews the per-coordinate moment
/// estimates enough to stall convergence near the maximizer, so it is removed
/// up front.
///
/// `eval` returns the objective value and its ambient gradient at a given
/// unit vector. The initial point counts toward `best_*`, so the result is
/// never worse than where the search started.
pub fn projected_ascent<F>(
    mut eval: F,
    init: ArrayView1<'_, f64>,
    config: &OptimizerConfig,
) -> Result<AscentResult>
where
    F: FnMut(ArrayView1<'_, f64>) -> Result<(f64, Array1<f64>)>,
{
    config.validate()?;
    let mut theta = project_to_unit_sphere(init)?;
    let mut adam = AdamState::like(&theta, config.adam)?;

    let (mut value, mut grad) = eval(theta.view())?;
    if !value.is_finite() {
        return Err(Error::NonFinite("objective"));
    }
    let mut best_theta = theta.clone();
    let mut best_value = value;
    let mut steps_taken = 0;

    for step in 0..config.steps {
        let radial = theta.dot(&grad);
        let tangent = &grad - &(&theta * radial);
        let neg = tangent.mapv(|g| -g);

        let prev = theta.clone();
        adam.step(&mut theta, &neg)?;
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::OptimizerDiverged(step));
        }
        theta = project_to_unit_sphere(theta.view())?;
        steps_taken = step + 1;

        let moved = (&theta - &prev).mapv(|d| d * d).sum().sqrt();
        let out = eval(theta.view())?;
        value = out.0;
        grad = out.1;
        if !value.is_finite() {
            return Err(Error::OptimizerDiverged(step));
        }
        if value > best_value {
            best_value = value;
            best_theta = theta.clone();
        }
        if moved < config.min_step {
            break;
        }
    }

    Ok(AscentResult {
        theta,
        best_theta,
        best_value,
        steps_taken,
    })
}
