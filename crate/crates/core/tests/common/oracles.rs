//! Brute-force reference implementations, written for clarity rather than
//! speed and sharing no code with the library.

#![allow(dead_code)]

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn pop_std(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// ROC by exhaustive counting at every fixated value.
pub fn auc_judd(pred: &[f64], fix: &[bool]) -> f64 {
    let mut thresholds: Vec<f64> = pred
        .iter()
        .zip(fix)
        .filter(|(_, &f)| f)
        .map(|(&v, _)| v)
        .collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let n_pos = fix.iter().filter(|&&f| f).count() as f64;
    let n_neg = fix.len() as f64 - n_pos;
    let mut curve = vec![(0.0, 0.0)];
    for th in thresholds {
        let mut tp = 0.0;
        let mut fp = 0.0;
        for (&v, &f) in pred.iter().zip(fix) {
            if v >= th {
                if f {
                    tp += 1.0;
                } else {
                    fp += 1.0;
                }
            }
        }
        curve.push((fp / n_neg, tp / n_pos));
    }
    curve.push((1.0, 1.0));
    curve
        .windows(2)
        .map(|p| (p[1].0 - p[0].0) * (p[1].1 + p[0].1) / 2.0)
        .sum()
}

pub fn nss(pred: &[f64], fix: &[bool]) -> f64 {
    let (m, s) = (mean(pred), pop_std(pred));
    let z: Vec<f64> = pred
        .iter()
        .zip(fix)
        .filter(|(_, &f)| f)
        .map(|(&v, _)| (v - m) / s)
        .collect();
    mean(&z)
}

pub fn cc(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for i in 0..a.len() {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    sab / (saa * sbb).sqrt()
}

pub fn sim(a: &[f64], b: &[f64]) -> f64 {
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    (0..a.len()).map(|i| (a[i] / sa).min(b[i] / sb)).sum()
}

pub fn scene_gradient(maps: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for k in 1..maps.len() {
        let mut d = 0.0;
        for i in 0..maps[k].len() {
            d += (maps[k][i] - maps[k - 1][i]).abs();
        }
        total += d / maps[k].len() as f64;
    }
    total / (maps.len() - 1) as f64
}
