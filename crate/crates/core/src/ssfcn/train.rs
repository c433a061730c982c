use super::{ssfcn_loss_and_grad, SsfcnParams, VideoClip};
use crate::optim::{Optimizer, OptimizerState};
use crate::saliency::SaliencyMap;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub steps: usize,
    pub optimizer: Optimizer,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            steps: 200,
            optimizer: Optimizer::Adam,
        }
    }
}

/// One plain gradient-descent step at the configured learning rate.
pub fn ssfcn_train_step(
    params: &SsfcnParams,
    clip: &VideoClip,
    target: &SaliencyMap,
) -> Result<(SsfcnParams, f64)> {
    let (loss, grads) = ssfcn_loss_and_grad(params, clip, target)?;
    let mut next = params.clone();
    next.add_scaled(-params.config.learning_rate, &grads);
    Ok((next, loss))
}

/// Full-batch trainer holding optimizer state.
#[derive(Debug, Clone)]
pub struct SsfcnTrainer {
    params: SsfcnParams,
    state: OptimizerState,
}

impl SsfcnTrainer {
    pub fn new(params: SsfcnParams, optimizer: Optimizer) -> Self {
        let state = OptimizerState::new(optimizer, &params.tensors());
        Self { params, state }
    }

    pub fn params(&self) -> &SsfcnParams {
        &self.params
    }

    pub fn into_params(self) -> SsfcnParams {
        self.params
    }

    /// Averages loss and gradient over the batch, in order, then updates.
    /// Returns the mean loss before the update.
    pub fn step(&mut self, batch: &[(&VideoClip, &SaliencyMap)]) -> Result<f64> {
        if batch.is_empty() {
            return Err(Error::InvalidDataset("training batch is empty".into()));
        }
        let scale = 1.0 / batch.len() as f64;
        let mut total = SsfcnParams::zeros(&self.params.config)?;
        let mut loss = 0.0;
        for (clip, target) in batch {
            let (l, g) = ssfcn_loss_and_grad(&self.params, clip, target)?;
            loss += scale * l;
            total.add_scaled(scale, &g);
        }
        let lr = self.params.config.learning_rate;
        self.state
            .update(self.params.tensors_mut(), total.tensors(), lr);
        Ok(loss)
    }
}

/// Full-batch training; returns the parameters and the loss of every step.
pub fn train(
    params: SsfcnParams,
    data: &[(VideoClip, SaliencyMap)],
    opts: &TrainOptions,
) -> Result<(SsfcnParams, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::InvalidDataset("no training clips".into()));
    }
    let batch: Vec<(&VideoClip, &SaliencyMap)> = data.iter().map(|(c, t)| (c, t)).collect();
    let mut trainer = SsfcnTrainer::new(params, opts.optimizer);
    let mut history = Vec::with_capacity(opts.steps);
    for _ in 0..opts.steps {
        history.push(trainer.step(&batch)?);
    }
    Ok((trainer.into_params(), history))
}
