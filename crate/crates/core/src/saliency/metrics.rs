//! AUC-Judd, NSS, CC and SIM.
//!
//! Undefined cases (no fixations, zero variance, zero mass) are errors,
//! never NaN.

use std::fmt::Write as _;
use std::path::Path;

use super::{FixationMap, SaliencyMap};
use crate::{Error, Result};

fn check_shape(pred: &SaliencyMap, h: usize, w: usize) -> Result<()> {
    if !pred.same_shape(h, w) {
        return Err(Error::Shape(format!(
            "prediction is {} x {}, reference is {h} x {w}",
            pred.height(),
            pred.width()
        )));
    }
    Ok(())
}

/// Mean and population standard deviation.
fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn standardize(v: &[f64], what: &str) -> Result<Vec<f64>> {
    let (mean, std) = moments(v);
    if std <= f64::EPSILON * mean.abs().max(1.0) {
        return Err(Error::UndefinedMetric(format!("{what} has zero variance")));
    }
    Ok(v.iter().map(|x| (x - mean) / std).collect())
}

/// ROC area with fixations as positives and every other pixel as negative.
///
/// Thresholds are the distinct predicted values at fixated pixels; a pixel
/// is "on" at threshold `th` when its value is `>= th`. The curve runs from
/// (0, 0) through each threshold, descending, to (1, 1) and is integrated
/// with the trapezoid rule.
pub fn metric_auc(pred: &SaliencyMap, fix: &FixationMap) -> Result<f64> {
    check_shape(pred, fix.height(), fix.width())?;
    let mut positives: Vec<f64> = Vec::new();
    let mut all: Vec<f64> = pred.values().to_vec();
    for (&v, &f) in pred.values().iter().zip(fix.fixations()) {
        if f {
            positives.push(v);
        }
    }
    let n_pos = positives.len();
    let n_neg = all.len() - n_pos;
    if n_pos == 0 {
        return Err(Error::UndefinedMetric(
            "AUC needs at least one fixation".into(),
        ));
    }
    if n_neg == 0 {
        return Err(Error::UndefinedMetric(
            "AUC needs at least one non-fixated pixel".into(),
        ));
    }
    // descending order; counts of values >= th via partition points
    positives.sort_by(|a, b| b.total_cmp(a));
    all.sort_by(|a, b| b.total_cmp(a));
    let mut thresholds = positives.clone();
    thresholds.dedup();
    let (mut area, mut prev_fp, mut prev_tp) = (0.0, 0.0, 0.0);
    for th in thresholds {
        let tp_count = positives.partition_point(|&v| v >= th);
        let on_count = all.partition_point(|&v| v >= th);
        let tp = tp_count as f64 / n_pos as f64;
        let fp = (on_count - tp_count) as f64 / n_neg as f64;
        area += (fp - prev_fp) * (tp + prev_tp) / 2.0;
        prev_fp = fp;
        prev_tp = tp;
    }
    area += (1.0 - prev_fp) * (1.0 + prev_tp) / 2.0;
    Ok(area)
}

/// Mean z-score (population standard deviation) of the prediction at the
/// fixated pixels.
pub fn metric_nss(pred: &SaliencyMap, fix: &FixationMap) -> Result<f64> {
    check_shape(pred, fix.height(), fix.width())?;
    let n_fix = fix.count();
    if n_fix == 0 {
        return Err(Error::UndefinedMetric(
            "NSS needs at least one fixation".into(),
        ));
    }
    let z = standardize(pred.values(), "prediction")?;
    let sum: f64 = z
        .iter()
        .zip(fix.fixations())
        .filter_map(|(v, &f)| f.then_some(v))
        .sum();
    Ok(sum / n_fix as f64)
}

/// Pearson correlation over all pixels.
pub fn metric_cc(pred: &SaliencyMap, truth: &SaliencyMap) -> Result<f64> {
    check_shape(pred, truth.height(), truth.width())?;
    let a = standardize(pred.values(), "prediction")?;
    let b = standardize(truth.values(), "ground truth")?;
    let r = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / a.len() as f64;
    Ok(r.clamp(-1.0, 1.0))
}

/// Histogram intersection of the two maps, each normalized to unit mass.
pub fn metric_sim(pred: &SaliencyMap, truth: &SaliencyMap) -> Result<f64> {
    check_shape(pred, truth.height(), truth.width())?;
    let sp: f64 = pred.values().iter().sum();
    let st: f64 = truth.values().iter().sum();
    if sp <= 0.0 || st <= 0.0 {
        return Err(Error::UndefinedMetric(
            "SIM needs maps with positive mass".into(),
        ));
    }
    let s: f64 = pred
        .values()
        .iter()
        .zip(truth.values())
        .map(|(p, q)| (p / sp).min(q / st))
        .sum();
    Ok(s.clamp(0.0, 1.0))
}

/// One line of a metric report.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub frame: String,
    pub auc: f64,
    pub nss: f64,
    pub cc: f64,
    pub sim: f64,
}

impl MetricRow {
    pub fn compute(
        frame: impl Into<String>,
        pred: &SaliencyMap,
        truth: &SaliencyMap,
        fix: &FixationMap,
    ) -> Result<Self> {
        Ok(Self {
            frame: frame.into(),
            auc: metric_auc(pred, fix)?,
            nss: metric_nss(pred, fix)?,
            cc: metric_cc(pred, truth)?,
            sim: metric_sim(pred, truth)?,
        })
    }

    /// `frame,auc,nss,cc,sim` CSV with a header.
    pub fn write_csv(path: &Path, rows: &[MetricRow]) -> Result<()> {
        let mut s = String::from("frame,auc,nss,cc,sim\n");
        for r in rows {
            let _ = writeln!(s, "{},{},{},{},{}", r.frame, r.auc, r.nss, r.cc, r.sim);
        }
        crate::io::write_text(path, &s)
    }
}
