//! On-disk clip layout written by `gen-clips`:
//!
//! ```text
//! clip_000/frames/frame_000000.pgm ...     input frames
//! clip_000/truth/frame_000000.{pgm,f64}     density of every frame
//! clip_000/fixations/frame_000000.pgm       fixations of every frame
//! ```

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::io::{frame_stem, read_pnm, write_pgm, Image};
use crate::saliency::{FixationMap, MetricRow, SaliencyMap};
use crate::ssfcn::{self, preprocess_clip, SsfcnParams, VideoClip};
use crate::synth::SyntheticClip;
use crate::{Error, Result};

pub fn write_clip_dir(dir: &Path, clip: &SyntheticClip) -> Result<()> {
    let frames = dir.join("frames");
    let truth = dir.join("truth");
    let fixations = dir.join("fixations");
    for d in [&frames, &truth, &fixations] {
        crate::io::create_dir(d)?;
    }
    let c = &clip.clip;
    let plane = c.height() * c.width();
    for t in 0..c.t_len() {
        let stem = frame_stem(t);
        let start = t * plane;
        let bytes: Vec<u8> = c.data()[start..start + plane]
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect();
        write_pgm(
            &frames.join(format!("{stem}.pgm")),
            c.width(),
            c.height(),
            &bytes,
        )?;
        clip.frame_truth[t].save(&truth, &stem)?;
        clip.frame_fixations[t].save_pgm(&fixations.join(format!("{stem}.pgm")))?;
    }
    Ok(())
}

/// Writes `clip_NNN` directories under `root`.
pub fn write_synthetic_clips(root: &Path, clips: &[SyntheticClip]) -> Result<Vec<PathBuf>> {
    clips
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let dir = root.join(format!("clip_{i:03}"));
            write_clip_dir(&dir, c)?;
            Ok(dir)
        })
        .collect()
}

/// Sorted stems of the `frame_*.pgm` / `frame_*.ppm` files in `dir`.
pub fn list_stems(dir: &Path) -> Result<Vec<String>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut stems = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path.extension().and_then(|e| e.to_str());
        if !matches!(ext, Some("pgm" | "ppm")) {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            if stem.starts_with("frame_") {
                stems.push(stem.to_string());
            }
        }
    }
    stems.sort();
    stems.dedup();
    Ok(stems)
}

fn frame_path(dir: &Path, stem: &str) -> PathBuf {
    let pgm = dir.join(format!("{stem}.pgm"));
    if pgm.exists() {
        pgm
    } else {
        dir.join(format!("{stem}.ppm"))
    }
}

/// Reads every frame of `dir` in stem order.
pub fn load_frames(dir: &Path) -> Result<(Vec<Image>, Vec<String>)> {
    let stems = list_stems(dir)?;
    let frames = stems
        .iter()
        .map(|s| read_pnm(&frame_path(dir, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok((frames, stems))
}

/// A clip with the density of its last frame.
#[derive(Debug, Clone)]
pub struct TrainingPair {
    pub clip: VideoClip,
    pub target: SaliencyMap,
    /// Stem of the clip's last frame.
    pub stem: String,
}

/// Cuts the clip directory into network clips and pairs each with the truth
/// map of its last frame.
pub fn load_training_pairs(clip_dir: &Path, cfg: &RunConfig) -> Result<Vec<TrainingPair>> {
    let frames_dir = clip_dir.join("frames");
    let (frames, stems) = load_frames(&frames_dir)?;
    let names: Vec<String> = stems
        .iter()
        .map(|s| frame_path(&frames_dir, s).display().to_string())
        .collect();
    let scfg = cfg.ssfcn_config();
    let clips = preprocess_clip(
        &frames,
        &names,
        scfg.clip_len,
        scfg.spatial_multiple(),
        cfg.map_fps,
        0,
    )?;
    let hop = (scfg.clip_len / 2).max(1);
    clips
        .into_iter()
        .enumerate()
        .map(|(i, clip)| {
            let stem = stems[i * hop + scfg.clip_len - 1].clone();
            let target = SaliencyMap::load(
                &clip_dir.join("truth"),
                &stem,
                clip.frame_ms(clip.t_len() - 1),
            )?;
            if !target.same_shape(clip.height(), clip.width()) {
                return Err(Error::Shape(format!(
                    "truth map {stem} is {}x{}, clip is {}x{}",
                    target.height(),
                    target.width(),
                    clip.height(),
                    clip.width()
                )));
            }
            Ok(TrainingPair { clip, target, stem })
        })
        .collect()
}

/// Trains on every clip directory under `root` (names sorted).
pub fn train_ssfcn_dirs(cfg: &RunConfig, root: &Path) -> Result<(SsfcnParams, Vec<f64>)> {
    let dirs = clip_dirs(root)?;
    let mut data = Vec::new();
    for d in &dirs {
        data.extend(
            load_training_pairs(d, cfg)?
                .into_iter()
                .map(|p| (p.clip, p.target)),
        );
    }
    if data.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "no clips under {}",
            root.display()
        )));
    }
    let params = SsfcnParams::init(&cfg.ssfcn_config())?;
    ssfcn::train(params, &data, &cfg.ssfcn_train)
}

pub(crate) fn clip_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    let mut dirs = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() && path.join("frames").is_dir() {
            dirs.push(path);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Predicts the last frame of every clip cut from `clip_dir` and saves the
/// maps under `out` with the frame's stem.
pub fn predict_clip_dir(
    params: &SsfcnParams,
    cfg: &RunConfig,
    clip_dir: &Path,
    out: &Path,
) -> Result<Vec<String>> {
    crate::io::create_dir(out)?;
    let mut stems = Vec::new();
    for pair in load_training_pairs(clip_dir, cfg)? {
        ssfcn::ssfcn_forward(params, &pair.clip)?.save(out, &pair.stem)?;
        stems.push(pair.stem);
    }
    Ok(stems)
}

/// One metric row per predicted map in `pred_dir`, against the same stem in
/// `truth_dir` and `fixation_dir`.
pub fn eval_saliency(
    pred_dir: &Path,
    truth_dir: &Path,
    fixation_dir: &Path,
) -> Result<Vec<MetricRow>> {
    let stems = list_stems(pred_dir)?;
    if stems.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "no maps in {}",
            pred_dir.display()
        )));
    }
    stems
        .iter()
        .map(|stem| {
            let pred = SaliencyMap::load(pred_dir, stem, 0)?;
            let truth = SaliencyMap::load(truth_dir, stem, 0)?;
            let fix = FixationMap::load_pgm(&fixation_dir.join(format!("{stem}.pgm")))?;
            MetricRow::compute(stem.clone(), &pred, &truth, &fix)
        })
        .collect()
}
