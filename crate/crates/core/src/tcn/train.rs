use rand::seq::SliceRandom;

use super::model::{backward, forward, predict_score, Mode};
use super::TcnParams;
use crate::dsp::HyperPatternWindow;
use crate::optim::{Optimizer, OptimizerState};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub optimizer: Optimizer,
    /// Drives shuffling and dropout masks.
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            epochs: 20,
            learning_rate: 1e-3,
            batch_size: 16,
            optimizer: Optimizer::Adam,
            seed: 0,
        }
    }
}

/// Mini-batch training on the cross-entropy of the softmax head, with the
/// batch-mean gradient fed to `opts.optimizer`.
///
/// Returns the trained parameters and the mean training loss of each epoch
/// (averaged over the samples as they were visited). Gradients within a
/// batch are summed in visiting order, so a run is bit-reproducible.
pub fn train(
    mut params: TcnParams,
    dataset: &[HyperPatternWindow],
    opts: &TrainOptions,
) -> Result<(TcnParams, Vec<f64>)> {
    if dataset.is_empty() {
        return Err(Error::InvalidDataset("training set is empty".into()));
    }
    if let Some(i) = dataset.iter().position(|w| w.label.is_none()) {
        return Err(Error::InvalidDataset(format!("window {i} has no label")));
    }
    if opts.batch_size == 0 {
        return Err(Error::InvalidArgument(
            "batch_size must be at least 1".into(),
        ));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut history = Vec::with_capacity(opts.epochs);
    let mut state = OptimizerState::new(opts.optimizer, &params.tensors());
    let mut visit: u64 = 0;
    for epoch in 0..opts.epochs {
        order.shuffle(&mut seed::rng(seed::derive_indexed(
            opts.seed,
            "tcn.shuffle",
            epoch as u64,
        )));
        let mut epoch_loss = 0.0;
        for batch in order.chunks(opts.batch_size) {
            let mut acc = TcnParams::zeros(&params.config)?;
            for &i in batch {
                let window = &dataset[i];
                let class = window.label.expect("checked above").class_index();
                let mode = Mode::Train {
                    dropout_seed: seed::derive_indexed(opts.seed, "tcn.dropout", visit),
                };
                visit += 1;
                let fwd = forward(&params, window, mode)?;
                let (loss, grad) = backward(&params, &fwd, class)?;
                epoch_loss += loss;
                acc.add_scaled(1.0, &grad);
            }
            let mean = 1.0 / batch.len() as f64;
            acc.tensors_mut()
                .into_iter()
                .for_each(|t| t.iter_mut().for_each(|g| *g *= mean));
            state.update(params.tensors_mut(), acc.tensors(), opts.learning_rate);
        }
        history.push(epoch_loss / dataset.len() as f64);
    }
    Ok((params, history))
}

/// Fraction of labeled windows whose predicted class (score ≥ 0.5 means
/// wakeful) matches the label.
pub fn accuracy(params: &TcnParams, windows: &[HyperPatternWindow]) -> Result<f64> {
    if windows.is_empty() {
        return Err(Error::InvalidDataset("evaluation set is empty".into()));
    }
    let mut correct = 0usize;
    for w in windows {
        let label = w
            .label
            .ok_or_else(|| Error::InvalidDataset("evaluation window has no label".into()))?;
        let predicted = if predict_score(params, w)?.value >= 0.5 {
            1
        } else {
            0
        };
        correct += usize::from(predicted == label.class_index());
    }
    Ok(correct as f64 / windows.len() as f64)
}
