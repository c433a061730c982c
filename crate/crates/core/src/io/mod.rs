//! File formats: PPG CSV, PGM/PPM frames, `.f64` map sidecars, small CSV
//! exports and binary checkpoint helpers.

pub(crate) mod bin;
mod csv;
mod pnm;
mod ppg_csv;
mod sidecar;

pub use csv::{write_loss_csv, write_taps_csv};
pub use pnm::{read_pnm, write_pgm, Image};
pub use ppg_csv::{load_ppg_csv, parse_ppg_csv, write_ppg_csv};
pub use sidecar::{read_f64_map, write_f64_map};

use std::path::Path;

use crate::{Error, Result};

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// `frame_%06d` stem used for every per-frame file.
pub fn frame_stem(index: usize) -> String {
    format!("frame_{index:06}")
}
