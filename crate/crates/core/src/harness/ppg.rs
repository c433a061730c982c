use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::{DspSettings, RunConfig};
use crate::dsp::{
    apply_filter_bank, build_filter_bank_with_order, decimate_with_order, segment_windows,
    HyperPatternWindow, Label, PpgSeries,
};
use crate::io::{load_ppg_csv, write_ppg_csv};
use crate::seed::{derive_indexed, derive_seed, rng};
use crate::synth::{gen_synthetic_ppg, SyntheticPpg, SyntheticPpgSpec};
use crate::tcn::{self, TcnParams};
use crate::{Error, Result};

/// Decimate, filter-bank, optionally trim the transient, and cut z-normalized
/// windows.
pub fn ppg_to_windows(series: &PpgSeries, dsp: &DspSettings) -> Result<Vec<HyperPatternWindow>> {
    let decimated = decimate_with_order(series, dsp.decimate_factor, dsp.fir_order)?;
    let bank = build_filter_bank_with_order(decimated.sample_rate_hz(), dsp.fir_order)?;
    let mut hyper = apply_filter_bank(&decimated, &bank)?;
    if dsp.trim_transient {
        hyper = hyper.trim(hyper.transient)?;
    }
    segment_windows(&hyper, dsp.window_samples(), dsp.hop_samples())
}

/// Shape of a synthetic two-class PPG dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PpgDatasetSpec {
    pub windows_per_class: usize,
    pub windows_per_recording: usize,
    /// Heart rates are drawn uniformly from this range for both classes.
    pub heart_rate_hz: (f64, f64),
    pub noise_std: f64,
}

impl Default for PpgDatasetSpec {
    fn default() -> Self {
        Self {
            windows_per_class: 200,
            windows_per_recording: 20,
            heart_rate_hz: (0.9, 1.6),
            noise_std: 0.02,
        }
    }
}

impl PpgDatasetSpec {
    /// Recording length that yields `windows_per_recording` windows after the
    /// transient is trimmed, plus one second of slack.
    pub fn recording_duration_s(&self, dsp: &DspSettings) -> Result<f64> {
        let rate = dsp.bank_rate_hz();
        let transient = if dsp.trim_transient {
            build_filter_bank_with_order(rate, dsp.fir_order)?.transient_len() as f64 / rate
        } else {
            0.0
        };
        let span = dsp.window_len_s + (self.windows_per_recording.max(1) - 1) as f64 * dsp.hop_s;
        Ok(span + 2.0 * transient + 1.0)
    }
}

/// Drowsy recordings first, then wakeful ones; recording `i` of the run uses
/// seeds derived from `(seed, i)`.
pub fn synthetic_ppg_recordings(
    spec: &PpgDatasetSpec,
    dsp: &DspSettings,
    seed: u64,
) -> Result<Vec<SyntheticPpg>> {
    if spec.windows_per_class == 0 || spec.windows_per_recording == 0 {
        return Err(Error::InvalidDataset(
            "synthetic dataset needs at least one window per class".into(),
        ));
    }
    let per_class = spec.windows_per_class.div_ceil(spec.windows_per_recording);
    let duration = spec.recording_duration_s(dsp)?;
    let (lo, hi) = spec.heart_rate_hz;
    let mut out = Vec::with_capacity(2 * per_class);
    for (c, class) in [Label::Drowsy, Label::Wakeful].into_iter().enumerate() {
        for k in 0..per_class {
            let i = (c * per_class + k) as u64;
            let hr = lo + (hi - lo) * rng(derive_indexed(seed, "synth.hr", i)).gen::<f64>();
            let mut s = SyntheticPpgSpec::for_class(
                class,
                hr,
                duration,
                derive_indexed(seed, "synth.recording", i),
            );
            s.noise_std = spec.noise_std;
            out.push(gen_synthetic_ppg(&s)?);
        }
    }
    Ok(out)
}

/// Exactly `windows_per_class` labeled windows per class, drowsy first.
pub fn synthetic_ppg_dataset(
    spec: &PpgDatasetSpec,
    dsp: &DspSettings,
    seed: u64,
) -> Result<Vec<HyperPatternWindow>> {
    let mut counts = [0usize; 2];
    let mut out = Vec::with_capacity(2 * spec.windows_per_class);
    for rec in synthetic_ppg_recordings(spec, dsp, seed)? {
        let c = rec.label.class_index();
        for w in ppg_to_windows(&rec.series, dsp)? {
            if counts[c] < spec.windows_per_class {
                counts[c] += 1;
                out.push(w.with_label(rec.label));
            }
        }
    }
    if counts != [spec.windows_per_class; 2] {
        return Err(Error::InvalidDataset(format!(
            "generated {counts:?} windows per class"
        )));
    }
    Ok(out)
}

/// Writes `rec_NNN.csv` files and a `labels.csv` manifest into `dir`.
pub fn write_synthetic_ppg(dir: &Path, recordings: &[SyntheticPpg]) -> Result<PathBuf> {
    crate::io::create_dir(dir)?;
    let mut entries = Vec::with_capacity(recordings.len());
    for (i, r) in recordings.iter().enumerate() {
        let name = format!("rec_{i:03}.csv");
        write_ppg_csv(&dir.join(&name), &r.series)?;
        entries.push((PathBuf::from(name), r.label));
    }
    let manifest = dir.join("labels.csv");
    write_manifest(&manifest, &entries)?;
    Ok(manifest)
}

/// `path,label` rows; paths are relative to the manifest's directory.
pub fn write_manifest(path: &Path, entries: &[(PathBuf, Label)]) -> Result<()> {
    let mut s = String::from("path,label\n");
    for (p, l) in entries {
        let _ = writeln!(s, "{},{}", p.display(), l.as_str());
    }
    crate::io::write_text(path, &s)
}

pub fn read_manifest(path: &Path) -> Result<Vec<(PathBuf, Label)>> {
    let text = crate::io::read_text(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == "path,label" => {}
        _ => return Err(Error::ingest(path, 1, "expected header `path,label`")),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((p, l)) = line.rsplit_once(',') else {
            return Err(Error::ingest(path, i + 1, "expected `path,label`"));
        };
        let label: Label = l
            .trim()
            .parse()
            .map_err(|e: Error| Error::ingest(path, i + 1, e.to_string()))?;
        out.push((base.join(p.trim()), label));
    }
    if out.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "{} lists no recordings",
            path.display()
        )));
    }
    Ok(out)
}

/// Loads every recording of a manifest and cuts labeled windows.
pub fn windows_from_manifest(path: &Path, dsp: &DspSettings) -> Result<Vec<HyperPatternWindow>> {
    let mut out = Vec::new();
    for (p, label) in read_manifest(path)? {
        let series = load_ppg_csv(&p)?;
        out.extend(
            ppg_to_windows(&series, dsp)?
                .into_iter()
                .map(|w| w.with_label(label)),
        );
    }
    Ok(out)
}

/// Seeded shuffle, then the first `round(n * fraction)` indices train.
pub fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::InvalidDataset(
            "cannot split an empty dataset".into(),
        ));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng(derive_seed(seed, "split")));
    let n_train = ((n as f64 * fraction).round() as usize).min(n);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

#[derive(Debug, Clone)]
pub struct TcnRun {
    pub params: TcnParams,
    pub history: Vec<f64>,
    pub n_train: usize,
    pub n_test: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

/// Splits, trains a freshly initialized network and scores both parts.
pub fn train_tcn(cfg: &RunConfig, windows: &[HyperPatternWindow]) -> Result<TcnRun> {
    let (train_idx, test_idx) = split_indices(windows.len(), cfg.train_fraction, cfg.seed)?;
    if test_idx.is_empty() || train_idx.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "{} windows are too few to split",
            windows.len()
        )));
    }
    let train_set: Vec<HyperPatternWindow> =
        train_idx.iter().map(|&i| windows[i].clone()).collect();
    let test_set: Vec<HyperPatternWindow> = test_idx.iter().map(|&i| windows[i].clone()).collect();
    let params = TcnParams::init(&cfg.tcn_config())?;
    let (params, history) = tcn::train(params, &train_set, &cfg.tcn_train_options())?;
    Ok(TcnRun {
        train_accuracy: tcn::accuracy(&params, &train_set)?,
        test_accuracy: tcn::accuracy(&params, &test_set)?,
        params,
        history,
        n_train: train_set.len(),
        n_test: test_set.len(),
    })
}
