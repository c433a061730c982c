use super::HyperMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Drowsy,
    Wakeful,
}

impl Label {
    /// Class index used by the classifier head.
    pub fn class_index(self) -> usize {
        match self {
            Label::Drowsy => 0,
            Label::Wakeful => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Drowsy => "drowsy",
            Label::Wakeful => "wakeful",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "drowsy" | "0" => Ok(Label::Drowsy),
            "wakeful" | "1" => Ok(Label::Wakeful),
            other => Err(Error::InvalidArgument(format!("unknown label `{other}`"))),
        }
    }
}

/// A channels x time slice of the filter-bank output, the classifier input.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperPatternWindow {
    n_channels: usize,
    len: usize,
    /// Row-major, channel by channel.
    data: Vec<f64>,
    pub window_start_ms: i64,
    pub label: Option<Label>,
}

impl HyperPatternWindow {
    pub fn new(
        n_channels: usize,
        len: usize,
        data: Vec<f64>,
        window_start_ms: i64,
    ) -> Result<Self> {
        if n_channels == 0 || len == 0 {
            return Err(Error::Shape(format!("empty window {n_channels} x {len}")));
        }
        if data.len() != n_channels * len {
            return Err(Error::Shape(format!(
                "window data holds {} values, expected {n_channels} x {len}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "window values must be finite".into(),
            ));
        }
        Ok(Self {
            n_channels,
            len,
            data,
            window_start_ms,
            label: None,
        })
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, c: usize) -> &[f64] {
        &self.data[c * self.len..(c + 1) * self.len]
    }
}

/// z-normalizes in place with the population variance; rows with no spread
/// become zeros.
fn normalize_row(row: &mut [f64]) {
    let n = row.len() as f64;
    let mean = row.iter().sum::<f64>() / n;
    let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std <= 1e-12 * (1.0 + mean.abs()) {
        row.fill(0.0);
    } else {
        for v in row.iter_mut() {
            *v = (*v - mean) / std;
        }
    }
}

/// Cuts `⌊(N - window_len) / hop⌋ + 1` windows and z-normalizes every row.
pub fn segment_windows(
    matrix: &HyperMatrix,
    window_len: usize,
    hop: usize,
) -> Result<Vec<HyperPatternWindow>> {
    let n = matrix.len();
    if window_len == 0 || hop == 0 {
        return Err(Error::InvalidArgument(
            "window length and hop must be at least 1".into(),
        ));
    }
    if window_len > n {
        return Err(Error::InvalidArgument(format!(
            "window length {window_len} exceeds series length {n}"
        )));
    }
    let count = (n - window_len) / hop + 1;
    (0..count)
        .map(|w| {
            let start = w * hop;
            let mut data = Vec::with_capacity(matrix.n_channels() * window_len);
            for row in &matrix.rows {
                let from = data.len();
                data.extend_from_slice(&row[start..start + window_len]);
                normalize_row(&mut data[from..]);
            }
            HyperPatternWindow::new(
                matrix.n_channels(),
                window_len,
                data,
                matrix.start_time_ms + matrix.offset_ms(start),
            )
        })
        .collect()
}
