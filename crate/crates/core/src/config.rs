//! Run configuration: a UTF-8 file of `section.key = value` lines.
//!
//! Blank lines and lines starting with `#` are ignored. Unknown and repeated
//! keys are rejected, and every value is checked against the owning
//! module's invariants at load time; errors name the offending key.
//!
//! ```text
//! seed = 7
//! split.train_fraction = 0.70
//! dsp.decimate_factor = 20
//! tcn.num_blocks = 12
//! ssfcn.encoder_channels = 8,16,32,64,64
//! fusion.theta = 0.45
//! replay.map_fps = 10
//! ```

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use crate::dsp::{
    build_filter_bank_with_order, BANK_CHANNELS, DEFAULT_DECIMATE_FACTOR, DEFAULT_FIR_ORDER,
    NATIVE_RATE_HZ,
};
use crate::fusion::FusionConfig;
use crate::optim::Optimizer;
use crate::seed::derive_seed;
use crate::ssfcn::{self, SsfcnConfig};
use crate::tcn::{self, TcnConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DspSettings {
    pub decimate_factor: usize,
    pub fir_order: usize,
    pub window_len_s: f64,
    pub hop_s: f64,
    /// Drop the filter-bank transient from both ends before windowing.
    pub trim_transient: bool,
}

impl Default for DspSettings {
    fn default() -> Self {
        Self {
            decimate_factor: DEFAULT_DECIMATE_FACTOR,
            fir_order: DEFAULT_FIR_ORDER,
            window_len_s: 10.0,
            hop_s: 5.0,
            trim_transient: true,
        }
    }
}

impl DspSettings {
    pub fn bank_rate_hz(&self) -> f64 {
        NATIVE_RATE_HZ / self.decimate_factor as f64
    }

    pub fn window_samples(&self) -> usize {
        (self.window_len_s * self.bank_rate_hz()).round() as usize
    }

    pub fn hop_samples(&self) -> usize {
        (self.hop_s * self.bank_rate_hz()).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub train_fraction: f64,
    pub dsp: DspSettings,
    /// `seed` is replaced by a value derived from the run seed unless
    /// `tcn.seed` is set explicitly; see [`RunConfig::tcn_config`].
    pub tcn: TcnConfig,
    pub tcn_seed: Option<u64>,
    pub tcn_train: tcn::TrainOptions,
    pub ssfcn: SsfcnConfig,
    pub ssfcn_seed: Option<u64>,
    pub ssfcn_train: ssfcn::TrainOptions,
    pub fusion: FusionConfig,
    /// Frame rate of saliency-map sequences given to `replay`.
    pub map_fps: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            train_fraction: 0.70,
            dsp: DspSettings::default(),
            tcn: TcnConfig::default(),
            tcn_seed: None,
            tcn_train: tcn::TrainOptions {
                epochs: 15,
                learning_rate: 1e-3,
                batch_size: 8,
                optimizer: Optimizer::Adam,
                seed: 0,
            },
            ssfcn: SsfcnConfig::default(),
            ssfcn_seed: None,
            ssfcn_train: ssfcn::TrainOptions::default(),
            fusion: FusionConfig::default(),
            map_fps: 10.0,
        }
    }
}

fn cfg_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config {
        key: key.to_string(),
        msg: msg.to_string(),
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| cfg_err(key, format!("cannot parse `{value}`: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(cfg_err(
            key,
            format!("expected true or false, got `{value}`"),
        )),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|v| parse(key, v.trim())).collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = crate::io::read_text(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(cfg_err(
                    &format!("line {}", i + 1),
                    "expected `key = value`",
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(cfg_err(key, "key given more than once"));
            }
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse(key, v)?,
            "split.train_fraction" => self.train_fraction = parse(key, v)?,
            "dsp.decimate_factor" => self.dsp.decimate_factor = parse(key, v)?,
            "dsp.fir_order" => self.dsp.fir_order = parse(key, v)?,
            "dsp.window_len_s" => self.dsp.window_len_s = parse(key, v)?,
            "dsp.hop_s" => self.dsp.hop_s = parse(key, v)?,
            "dsp.trim_transient" => self.dsp.trim_transient = parse_bool(key, v)?,
            "tcn.num_blocks" => self.tcn.num_blocks = parse(key, v)?,
            "tcn.kernel_size" => self.tcn.kernel_size = parse(key, v)?,
            "tcn.dilation_schedule" => self.tcn.dilation_schedule = parse(key, v)?,
            "tcn.channels_per_block" => self.tcn.channels_per_block = parse(key, v)?,
            "tcn.dropout_rate" => self.tcn.dropout_rate = parse(key, v)?,
            "tcn.num_classes" => self.tcn.num_classes = parse(key, v)?,
            "tcn.input_channels" => self.tcn.input_channels = parse(key, v)?,
            "tcn.seed" => self.tcn_seed = Some(parse(key, v)?),
            "tcn.strict_causal" => self.tcn.strict_causal = parse_bool(key, v)?,
            "tcn.learning_rate" => self.tcn_train.learning_rate = parse(key, v)?,
            "tcn.epochs" => self.tcn_train.epochs = parse(key, v)?,
            "tcn.batch_size" => self.tcn_train.batch_size = parse(key, v)?,
            "tcn.optimizer" => self.tcn_train.optimizer = parse(key, v)?,
            "ssfcn.clip_len" => self.ssfcn.clip_len = parse(key, v)?,
            "ssfcn.encoder_channels" => self.ssfcn.encoder_channels = parse_list(key, v)?,
            "ssfcn.input_channels" => self.ssfcn.input_channels = parse(key, v)?,
            "ssfcn.seed" => self.ssfcn_seed = Some(parse(key, v)?),
            "ssfcn.learning_rate" => self.ssfcn.learning_rate = parse(key, v)?,
            "ssfcn.bridge" => self.ssfcn.bridge = parse(key, v)?,
            "ssfcn.separable" => self.ssfcn.separable = parse_bool(key, v)?,
            "ssfcn.steps" => self.ssfcn_train.steps = parse(key, v)?,
            "ssfcn.optimizer" => self.ssfcn_train.optimizer = parse(key, v)?,
            "fusion.theta" => self.fusion.theta = parse(key, v)?,
            "fusion.attention_high_min" => self.fusion.attention_high_min = parse(key, v)?,
            "fusion.debounce_windows" => self.fusion.debounce_windows = parse(key, v)?,
            "replay.map_fps" => self.map_fps = parse(key, v)?,
            _ => return Err(cfg_err(key, "unknown key")),
        }
        Ok(())
    }

    /// Checks every setting; the error names the first offending key.
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(cfg_err("split.train_fraction", "must be in (0, 1)"));
        }
        let d = &self.dsp;
        if d.decimate_factor == 0 {
            return Err(cfg_err("dsp.decimate_factor", "must be at least 1"));
        }
        if d.fir_order < 3 || d.fir_order.is_multiple_of(2) {
            return Err(cfg_err("dsp.fir_order", "must be odd and at least 3"));
        }
        build_filter_bank_with_order(d.bank_rate_hz(), d.fir_order)
            .map_err(|e| cfg_err("dsp.decimate_factor", e))?;
        if !(d.window_len_s.is_finite() && d.window_samples() >= 1) {
            return Err(cfg_err("dsp.window_len_s", "must span at least one sample"));
        }
        if !(d.hop_s.is_finite() && d.hop_samples() >= 1) {
            return Err(cfg_err("dsp.hop_s", "must span at least one sample"));
        }
        let t = self.tcn_config();
        t.validate()
            .map_err(|e| cfg_err(tcn_key(&e.to_string()), e))?;
        if t.input_channels != BANK_CHANNELS {
            return Err(cfg_err(
                "tcn.input_channels",
                format!("the filter bank has {BANK_CHANNELS} channels"),
            ));
        }
        if t.num_classes != 2 {
            return Err(cfg_err(
                "tcn.num_classes",
                "the pipeline has two classes (drowsy, wakeful)",
            ));
        }
        let tt = &self.tcn_train;
        if !(tt.learning_rate.is_finite() && tt.learning_rate > 0.0) {
            return Err(cfg_err("tcn.learning_rate", "must be positive"));
        }
        if tt.batch_size == 0 {
            return Err(cfg_err("tcn.batch_size", "must be at least 1"));
        }
        let s = self.ssfcn_config();
        s.validate()
            .map_err(|e| cfg_err(ssfcn_key(&e.to_string()), e))?;
        let f = &self.fusion;
        if !(f.theta > 0.0 && f.theta < 1.0) {
            return Err(cfg_err("fusion.theta", "must be in (0, 1)"));
        }
        if !(f.attention_high_min > 0.0 && f.attention_high_min <= 1.0) {
            return Err(cfg_err("fusion.attention_high_min", "must be in (0, 1]"));
        }
        if f.debounce_windows == 0 {
            return Err(cfg_err("fusion.debounce_windows", "must be at least 1"));
        }
        if !(self.map_fps.is_finite() && self.map_fps > 0.0) {
            return Err(cfg_err("replay.map_fps", "must be positive"));
        }
        Ok(())
    }

    pub fn tcn_config(&self) -> TcnConfig {
        TcnConfig {
            seed: self
                .tcn_seed
                .unwrap_or_else(|| derive_seed(self.seed, "tcn")),
            ..self.tcn.clone()
        }
    }

    pub fn tcn_train_options(&self) -> tcn::TrainOptions {
        tcn::TrainOptions {
            seed: derive_seed(self.seed, "tcn.train"),
            ..self.tcn_train.clone()
        }
    }

    pub fn ssfcn_config(&self) -> SsfcnConfig {
        SsfcnConfig {
            seed: self
                .ssfcn_seed
                .unwrap_or_else(|| derive_seed(self.seed, "ssfcn")),
            ..self.ssfcn.clone()
        }
    }
}

/// Best-effort mapping of a TCN validation message to its key.
fn tcn_key(msg: &str) -> &'static str {
    for (needle, key) in [
        ("num_blocks", "tcn.num_blocks"),
        ("kernel", "tcn.kernel_size"),
        ("channels_per_block", "tcn.channels_per_block"),
        ("dropout", "tcn.dropout_rate"),
        ("num_classes", "tcn.num_classes"),
        ("input_channels", "tcn.input_channels"),
    ] {
        if msg.contains(needle) {
            return key;
        }
    }
    "tcn"
}

fn ssfcn_key(msg: &str) -> &'static str {
    for (needle, key) in [
        ("clip_len", "ssfcn.clip_len"),
        ("encoder", "ssfcn.encoder_channels"),
        ("input_channels", "ssfcn.input_channels"),
        ("learning rate", "ssfcn.learning_rate"),
    ] {
        if msg.contains(needle) {
            return key;
        }
    }
    "ssfcn"
}
