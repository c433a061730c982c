//! Update rules shared by both trainers.

use std::str::FromStr;

use crate::{Error, Result};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Optimizer {
    /// Plain gradient descent, `p -= lr * g`.
    Sgd,
    /// Adam with beta 0.9 / 0.999 and eps 1e-8.
    Adam,
}

impl FromStr for Optimizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sgd" => Ok(Optimizer::Sgd),
            "adam" => Ok(Optimizer::Adam),
            other => Err(Error::InvalidArgument(format!(
                "unknown optimizer `{other}`"
            ))),
        }
    }
}

/// Optimizer state over a fixed list of tensors.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    optimizer: Optimizer,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    steps: i32,
}

impl OptimizerState {
    pub fn new(optimizer: Optimizer, shapes: &[&[f64]]) -> Self {
        let zeros: Vec<Vec<f64>> = match optimizer {
            Optimizer::Sgd => Vec::new(),
            Optimizer::Adam => shapes.iter().map(|t| vec![0.0; t.len()]).collect(),
        };
        Self {
            optimizer,
            m: zeros.clone(),
            v: zeros,
            steps: 0,
        }
    }

    /// Applies one update of `params` from `grads`, tensor by tensor.
    pub fn update(&mut self, params: Vec<&mut Vec<f64>>, grads: Vec<&[f64]>, lr: f64) {
        self.steps += 1;
        match self.optimizer {
            Optimizer::Sgd => {
                for (p, g) in params.into_iter().zip(grads) {
                    crate::nn::axpy(p, -lr, g);
                }
            }
            Optimizer::Adam => {
                let c1 = 1.0 - BETA1.powi(self.steps);
                let c2 = 1.0 - BETA2.powi(self.steps);
                for (((p, g), m), v) in params
                    .into_iter()
                    .zip(grads)
                    .zip(&mut self.m)
                    .zip(&mut self.v)
                {
                    for i in 0..p.len() {
                        m[i] = BETA1 * m[i] + (1.0 - BETA1) * g[i];
                        v[i] = BETA2 * v[i] + (1.0 - BETA2) * g[i] * g[i];
                        p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + ADAM_EPS);
                    }
                }
            }
        }
    }
}
