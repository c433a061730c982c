//! Driver-attention pipeline.
//!
//! Two sensing branches feed one decision stage:
//!
//! - [`dsp`] turns a raw PPG recording into 22-channel hyper-filtered windows,
//!   which [`tcn`] scores with a dilated causal temporal convolutional network;
//! - [`ssfcn`] predicts per-frame saliency maps from short video clips, and
//!   [`saliency`] evaluates them and measures how fast the scene changes;
//! - [`fusion`] compares measured attention with scene-required attention
//!   and raises alerts.
//!
//! [`harness`] wires the branches together for training, evaluation and
//! deterministic stream replay, with synthetic stand-ins from [`synth`].

// Negated comparisons are how NaN is rejected alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dsp;
pub mod error;
pub mod fusion;
pub mod harness;
pub mod io;
mod nn;
pub mod optim;
pub mod saliency;
pub mod seed;
pub mod ssfcn;
pub mod synth;
pub mod tcn;

pub use error::{Error, Result};
