use std::path::Path;

use crate::io::{read_f64_map, read_pnm, write_f64_map, write_pgm};
use crate::{Error, Result};

/// Per-pixel saliency in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
    pub frame_ms: i64,
}

impl SaliencyMap {
    pub fn new(height: usize, width: usize, values: Vec<f64>, frame_ms: i64) -> Result<Self> {
        if height == 0 || width == 0 || values.len() != height * width {
            return Err(Error::Shape(format!(
                "map holds {} values, expected {height} x {width}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "saliency value {} at pixel {i} is outside [0, 1]",
                values[i]
            )));
        }
        Ok(Self {
            height,
            width,
            values,
            frame_ms,
        })
    }

    pub fn uniform(height: usize, width: usize, value: f64, frame_ms: i64) -> Result<Self> {
        Self::new(height, width, vec![value; height * width], frame_ms)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn same_shape(&self, h: usize, w: usize) -> bool {
        self.height == h && self.width == w
    }

    /// Index of the largest value (first one on ties) as `(row, col)`.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best / self.width, best % self.width)
    }

    /// 8-bit rendering, `round(v * 255)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect()
    }

    /// Writes `<stem>.pgm` and the lossless `<stem>.f64` sidecar.
    pub fn save(&self, dir: &Path, stem: &str) -> Result<()> {
        write_pgm(
            &dir.join(format!("{stem}.pgm")),
            self.width,
            self.height,
            &self.to_bytes(),
        )?;
        write_f64_map(&dir.join(format!("{stem}.f64")), &self.values)
    }

    /// Reads `<stem>.f64` when present (shape from `<stem>.pgm`), otherwise
    /// the PGM scaled to `[0, 1]`.
    pub fn load(dir: &Path, stem: &str, frame_ms: i64) -> Result<Self> {
        let pgm = read_pnm(&dir.join(format!("{stem}.pgm")))?;
        if pgm.channels != 1 {
            return Err(Error::ingest(
                dir.join(format!("{stem}.pgm")),
                1,
                "maps must be grayscale",
            ));
        }
        let sidecar = dir.join(format!("{stem}.f64"));
        let values = if sidecar.exists() {
            read_f64_map(&sidecar, pgm.width * pgm.height)?
        } else {
            pgm.data.iter().map(|&b| f64::from(b) / 255.0).collect()
        };
        Self::new(pgm.height, pgm.width, values, frame_ms)
            .map_err(|e| Error::ingest(sidecar, 1, e.to_string()))
    }
}

/// Binary human-fixation ground truth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixationMap {
    height: usize,
    width: usize,
    fixations: Vec<bool>,
}

impl FixationMap {
    pub fn new(height: usize, width: usize, fixations: Vec<bool>) -> Result<Self> {
        if height == 0 || width == 0 || fixations.len() != height * width {
            return Err(Error::Shape(format!(
                "fixation map holds {} cells, expected {height} x {width}",
                fixations.len()
            )));
        }
        Ok(Self {
            height,
            width,
            fixations,
        })
    }

    pub fn from_points(height: usize, width: usize, points: &[(usize, usize)]) -> Result<Self> {
        let mut fixations = vec![false; height * width];
        for &(r, c) in points {
            if r >= height || c >= width {
                return Err(Error::InvalidArgument(format!(
                    "fixation ({r}, {c}) is off the map"
                )));
            }
            fixations[r * width + c] = true;
        }
        Self::new(height, width, fixations)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn fixations(&self) -> &[bool] {
        &self.fixations
    }

    pub fn count(&self) -> usize {
        self.fixations.iter().filter(|f| **f).count()
    }

    pub fn save_pgm(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self
            .fixations
            .iter()
            .map(|&f| if f { 255 } else { 0 })
            .collect();
        write_pgm(path, self.width, self.height, &bytes)
    }

    /// Any nonzero pixel is a fixation.
    pub fn load_pgm(path: &Path) -> Result<Self> {
        let img = read_pnm(path)?;
        if img.channels != 1 {
            return Err(Error::ingest(path, 1, "fixation maps must be grayscale"));
        }
        Self::new(
            img.height,
            img.width,
            img.data.iter().map(|&b| b != 0).collect(),
        )
    }
}
