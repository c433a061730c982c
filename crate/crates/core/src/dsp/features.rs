use super::PpgSeries;
use crate::{Error, Result};

/// Indices of local maxima and minima, each sorted ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtremaList {
    pub maxima_idx: Vec<usize>,
    pub minima_idx: Vec<usize>,
}

/// First (`order = 1`) or second (`order = 2`) time derivative.
///
/// Central differences in the interior; endpoints use one-sided stencils
/// (four-point when the series is long enough, three-point otherwise).
pub fn derivative(series: &PpgSeries, order: u8) -> Result<PpgSeries> {
    let x = series.samples();
    let n = x.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "derivative needs at least 3 samples, got {n}"
        )));
    }
    let h = 1.0 / series.sample_rate_hz();
    let mut d = vec![0.0; n];
    match order {
        1 => {
            for i in 1..n - 1 {
                d[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
            }
            if n >= 4 {
                d[0] = (-11.0 * x[0] + 18.0 * x[1] - 9.0 * x[2] + 2.0 * x[3]) / (6.0 * h);
                d[n - 1] = (11.0 * x[n - 1] - 18.0 * x[n - 2] + 9.0 * x[n - 3] - 2.0 * x[n - 4])
                    / (6.0 * h);
            } else {
                d[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
                d[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
            }
        }
        2 => {
            let h2 = h * h;
            for i in 1..n - 1 {
                d[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / h2;
            }
            if n >= 4 {
                d[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / h2;
                d[n - 1] = (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) / h2;
            } else {
                d[0] = (x[0] - 2.0 * x[1] + x[2]) / h2;
                d[n - 1] = d[0];
            }
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "derivative order must be 1 or 2, got {order}"
            )))
        }
    }
    Ok(series.with_samples(d))
}

/// Local extrema from sign changes of the first difference.
///
/// A run of equal samples bounded on both sides by lower (higher) values is
/// one maximum (minimum) at the run's first index. Runs touching either end
/// of the series are never extrema.
pub fn detect_extrema(series: &PpgSeries) -> ExtremaList {
    let x = series.samples();
    let n = x.len();
    let mut out = ExtremaList::default();
    let mut i = 1;
    while i + 1 < n {
        if x[i] == x[i - 1] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == x[i] {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let (left, here, right) = (x[i - 1], x[i], x[j + 1]);
        if left < here && right < here {
            out.maxima_idx.push(i);
        } else if left > here && right > here {
            out.minima_idx.push(i);
        }
        i = j + 1;
    }
    out
}
