use std::fmt::Write as _;
use std::path::Path;

use crate::Result;

/// `idx,tap` rows.
pub fn write_taps_csv(path: &Path, taps: &[f64]) -> Result<()> {
    let mut s = String::from("idx,tap\n");
    for (i, t) in taps.iter().enumerate() {
        let _ = writeln!(s, "{i},{t}");
    }
    super::write_text(path, &s)
}

/// `epoch,loss` rows.
pub fn write_loss_csv(path: &Path, history: &[f64]) -> Result<()> {
    let mut s = String::from("epoch,loss\n");
    for (i, l) in history.iter().enumerate() {
        let _ = writeln!(s, "{i},{l}");
    }
    super::write_text(path, &s)
}
