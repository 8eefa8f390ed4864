//! Full-batch gradient descent on the mean cross-entropy.

use rand_distr::{Distribution, Normal};

use super::data::Dataset;
use super::model::{LinearModel, Mlp1Model};
use crate::error::{Error, Result};
use crate::rng::stream_rng;

const INIT_SCALE: f64 = 0.01;
const MAX_HALVINGS: usize = 60;

/// Loss history of a training run; entry 0 is the initial loss.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainLog {
    pub losses: Vec<f64>,
    pub final_lr: f64,
}

/// Gradient descent where a step that would increase the loss is retried with
/// half the learning rate, so recorded losses never increase. The reduced rate
/// carries over to later epochs.
fn descend(
    params: &mut Vec<f64>,
    epochs: usize,
    mut lr: f64,
    mut loss_grad: impl FnMut(&[f64]) -> (f64, Vec<f64>),
) -> TrainLog {
    let (mut loss, mut grad) = loss_grad(params);
    let mut losses = vec![loss];
    'epochs: for _ in 0..epochs {
        let mut halvings = 0;
        loop {
            let trial: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
            let (trial_loss, trial_grad) = loss_grad(&trial);
            if trial_loss <= loss {
                *params = trial;
                loss = trial_loss;
                grad = trial_grad;
                break;
            }
            lr *= 0.5;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break 'epochs;
            }
        }
        losses.push(loss);
    }
    TrainLog {
        losses,
        final_lr: lr,
    }
}

fn check_dataset(data: &Dataset, lr: f64) -> Result<(usize, usize)> {
    if data.is_empty() {
        return Err(Error::Invalid(
            "training requires a nonempty dataset".into(),
        ));
    }
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::Invalid(format!(
            "learning rate must be positive, got {lr}"
        )));
    }
    Ok((data.dim().unwrap_or(0), data.n_classes()))
}

/// Multinomial logistic regression. Weights start at `N(0, 0.01²)`, biases at zero.
pub fn train_linear(data: &Dataset, epochs: usize, lr: f64, seed: u64) -> Result<LinearModel> {
    train_linear_logged(data, epochs, lr, seed).map(|(m, _)| m)
}

pub fn train_linear_logged(
    data: &Dataset,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<(LinearModel, TrainLog)> {
    let (n, m) = check_dataset(data, lr)?;
    let mut model = LinearModel::zeros(n, m);
    let mut rng = stream_rng(seed, 0);
    let init = Normal::new(0.0, INIT_SCALE).expect("valid normal");
    let mut params: Vec<f64> = (0..n * m).map(|_| init.sample(&mut rng)).collect();
    params.extend(std::iter::repeat_n(0.0, m));
    let mut scratch = model.clone();
    let log = descend(&mut params, epochs, lr, |p| {
        scratch.set_params(p);
        scratch.loss_and_param_gradient(&data.points, &data.labels)
    });
    model.set_params(&params);
    Ok((model, log))
}

/// Trains a one-hidden-layer `tanh` network from [`Mlp1Model::random`].
pub fn train_mlp(
    data: &Dataset,
    hidden: usize,
    epochs: usize,
    lr: f64,
    seed: u64,
) -> Result<(Mlp1Model, TrainLog)> {
    let (n, m) = check_dataset(data, lr)?;
    let mut model = Mlp1Model::random(n, hidden, m, seed)?;
    let mut params = model.params();
    let mut scratch = model.clone();
    let log = descend(&mut params, epochs, lr, |p| {
        scratch.set_params(p);
        scratch.loss_and_param_gradient(&data.points, &data.labels)
    });
    model.set_params(&params);
    Ok((model, log))
}
