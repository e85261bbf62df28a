//! Scaled conjugate gradient (Møller, 1993).
//!
//! Each iteration approximates the curvature along the search direction p
//! by a one-sided difference of gradients with step sigma/|p|, regularises
//! it with a Levenberg-Marquardt term lambda |p|^2, and sets the step size
//! in closed form. The comparison ratio between predicted and actual loss
//! reduction drives lambda up or down. Directions restart at steepest
//! descent every N successful steps, N being the parameter count.

use serde::{Deserialize, Serialize};

use super::mlp::{batch_loss, batch_loss_grad, check_batch, Batch, Mlp, TrainingInfo};
use crate::error::{Error, Result};
use crate::hrv::{apply_normalizer, fit_normalizer, FeatureMatrix};

const LAMBDA_MAX: f64 = 1e100;
const LAMBDA_MIN: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScgParams {
    pub max_iter: usize,
    pub sigma: f64,
    pub lambda0: f64,
    pub goal_loss: f64,
    /// Consecutive non-improving validation checks tolerated.
    pub patience: usize,
    /// Stop once the gradient norm falls below this.
    pub min_grad: f64,
}

impl Default for ScgParams {
    fn default() -> Self {
        ScgParams {
            max_iter: 500,
            sigma: 5e-5,
            lambda0: 5e-7,
            goal_loss: 1e-5,
            patience: 20,
            min_grad: 1e-10,
        }
    }
}

impl ScgParams {
    fn validate(&self) -> Result<()> {
        if self.sigma > 0.0 && self.lambda0 > 0.0 && self.goal_loss >= 0.0 && self.patience > 0 {
            Ok(())
        } else {
            Err(Error::invalid("SCG parameters must be positive"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    GoalReached,
    GradientVanished,
    ValidationPatience,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::GoalReached => "goal_reached",
            StopReason::GradientVanished => "gradient_vanished",
            StopReason::ValidationPatience => "validation_patience",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// Training loss after every iteration, starting with the initial loss.
    pub loss: Vec<f64>,
    /// Validation loss after every successful step, when validating.
    pub val_loss: Vec<f64>,
    pub stop: StopReason,
}

/// A differentiable scalar function of a flat parameter vector.
pub trait Objective {
    fn loss(&self, w: &[f64]) -> f64;
    fn loss_grad(&self, w: &[f64]) -> (f64, Vec<f64>);
}

/// What to do after a successful step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepControl {
    Continue,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScgOutcome {
    pub weights: Vec<f64>,
    pub loss: Vec<f64>,
    pub stop: StopReason,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn checked(loss: f64, iteration: usize) -> Result<f64> {
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFiniteLoss { iteration })
    }
}

/// Minimises `objective` from `w0`. `on_step` runs after every accepted
/// step with the new weights; returning [`StepControl::Stop`] ends the run
/// with [`StopReason::ValidationPatience`].
pub fn scg_minimize<O, F>(objective: &O, w0: Vec<f64>, params: &ScgParams, mut on_step: F) -> Result<ScgOutcome>
where
    O: Objective + ?Sized,
    F: FnMut(&[f64]) -> StepControl,
{
    params.validate()?;
    let n = w0.len().max(1);
    let mut w = w0;
    let (e0, g0) = objective.loss_grad(&w);
    let mut e = checked(e0, 0)?;
    let mut r: Vec<f64> = g0.iter().map(|g| -g).collect();
    let mut p = r.clone();
    let mut lambda = params.lambda0;
    let mut lambda_bar = 0.0;
    let mut success = true;
    let mut delta = 0.0;
    let mut n_success = 0usize;
    let mut history = vec![e];
    let mut trial = vec![0.0; w.len()];

    let mut stop = StopReason::MaxIterations;
    let mut iterations = 0;
    for k in 1..=params.max_iter {
        if e <= params.goal_loss {
            stop = StopReason::GoalReached;
            break;
        }
        let r_norm2 = dot(&r, &r);
        if r_norm2.sqrt() < params.min_grad {
            stop = StopReason::GradientVanished;
            break;
        }
        iterations = k;
        let p2 = dot(&p, &p);

        // second-order information along p
        if success {
            let sigma_k = params.sigma / p2.sqrt();
            for ((t, wi), pi) in trial.iter_mut().zip(&w).zip(&p) {
                *t = wi + sigma_k * pi;
            }
            let (_, g_plus) = objective.loss_grad(&trial);
            // s = (E'(w + sigma_k p) - E'(w)) / sigma_k, with E'(w) = -r
            delta = g_plus
                .iter()
                .zip(&r)
                .zip(&p)
                .map(|((gp, ri), pi)| pi * (gp + ri) / sigma_k)
                .sum();
        }

        // scale, then force a positive definite curvature estimate
        delta += (lambda - lambda_bar) * p2;
        if delta <= 0.0 {
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }

        let mu = dot(&p, &r);
        let alpha = mu / delta;
        for ((t, wi), pi) in trial.iter_mut().zip(&w).zip(&p) {
            *t = wi + alpha * pi;
        }
        let e_new = checked(objective.loss(&trial), k)?;
        let comparison = 2.0 * delta * (e - e_new) / (mu * mu);

        if comparison >= 0.0 {
            std::mem::swap(&mut w, &mut trial);
            let (e_w, g_new) = objective.loss_grad(&w);
            e = checked(e_w, k)?;
            let r_new: Vec<f64> = g_new.iter().map(|g| -g).collect();
            lambda_bar = 0.0;
            success = true;
            n_success += 1;
            if n_success.is_multiple_of(n) {
                p.clone_from(&r_new);
            } else {
                let beta = (dot(&r_new, &r_new) - dot(&r_new, &r)) / mu;
                for (pi, ri) in p.iter_mut().zip(&r_new) {
                    *pi = ri + beta * *pi;
                }
                if dot(&p, &r_new) <= 0.0 {
                    p.clone_from(&r_new);
                }
            }
            r = r_new;
            if comparison >= 0.75 {
                lambda = (lambda / 4.0).max(LAMBDA_MIN);
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if comparison < 0.25 {
            lambda = (lambda + delta * (1.0 - comparison) / p2).min(LAMBDA_MAX);
        }
        history.push(e);

        if success && on_step(&w) == StepControl::Stop {
            stop = StopReason::ValidationPatience;
            break;
        }
    }
    Ok(ScgOutcome {
        weights: w,
        loss: history,
        stop,
        iterations,
    })
}

struct NetObjective<'a> {
    net: &'a Mlp,
    batch: &'a Batch,
}

impl Objective for NetObjective<'_> {
    fn loss(&self, w: &[f64]) -> f64 {
        batch_loss(&self.net.topology, w, self.batch)
    }

    fn loss_grad(&self, w: &[f64]) -> (f64, Vec<f64>) {
        batch_loss_grad(&self.net.topology, w, self.batch)
    }
}

/// Trains `net` full-batch. A normaliser is fitted on `train` unless the
/// net already carries one. With a validation set, training stops after
/// `patience` consecutive successful steps without a new best validation
/// loss and the best-validation weights are kept.
pub fn scg_train(
    net: &Mlp,
    train: &FeatureMatrix,
    val: Option<&FeatureMatrix>,
    params: &ScgParams,
) -> Result<(Mlp, TrainingHistory)> {
    if train.is_empty() {
        return Err(Error::Coverage("training set is empty".into()));
    }
    let normalizer = match &net.normalizer {
        Some(nz) => nz.clone(),
        None => fit_normalizer(train)?,
    };
    let out_dim = net.topology.output_dim;
    let batch = Batch::from_matrix(&apply_normalizer(&normalizer, train), out_dim)?;
    check_batch(&net.topology, &batch)?;
    let val_batch = match val {
        Some(v) if !v.is_empty() => Some(Batch::from_matrix(&apply_normalizer(&normalizer, v), out_dim)?),
        _ => None,
    };

    let objective = NetObjective { net, batch: &batch };
    let mut val_loss = Vec::new();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut stale = 0usize;
    let outcome = scg_minimize(&objective, net.params.clone(), params, |w| {
        let Some(vb) = &val_batch else {
            return StepControl::Continue;
        };
        let l = batch_loss(&net.topology, w, vb);
        val_loss.push(l);
        match &best {
            Some((b, _)) if l >= *b => {
                stale += 1;
                if stale >= params.patience {
                    return StepControl::Stop;
                }
            }
            _ => {
                best = Some((l, w.to_vec()));
                stale = 0;
            }
        }
        StepControl::Continue
    })?;

    let mut weights = outcome.weights;
    let mut final_loss = *outcome.loss.last().unwrap();
    if let (StopReason::ValidationPatience, Some((_, w))) = (outcome.stop, best) {
        weights = w;
        final_loss = batch_loss(&net.topology, &weights, &batch);
    }
    let trained = Mlp {
        topology: net.topology.clone(),
        params: weights,
        normalizer: Some(normalizer),
        class_names: net.class_names.clone(),
        seed: net.seed,
        training: Some(TrainingInfo {
            iterations: outcome.iterations,
            final_loss,
            stop_reason: outcome.stop.as_str().to_string(),
        }),
    };
    Ok((
        trained,
        TrainingHistory {
            loss: outcome.loss,
            val_loss,
            stop: outcome.stop,
        },
    ))
}
