use std::fmt::Write as _;
use std::path::Path;

use crate::dsp::PpgSeries;
use crate::{Error, Result};

const HEADER: &str = "t_ms,value";

/// Parses `t_ms,value` text. Timestamps are integer milliseconds with one
/// constant step; any deviation is rejected with its 1-based line number
/// (the header is line 1).
pub fn parse_ppg_csv(text: &str, path: &Path) -> Result<PpgSeries> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => {
            return Err(Error::ingest(
                path,
                1,
                format!("expected header `{HEADER}`"),
            ))
        }
    }
    let mut times: Vec<i64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut step: Option<i64> = None;
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::ingest(
                path,
                line_no,
                "expected two fields `t_ms,value`",
            ));
        };
        let t: i64 = t.trim().parse().map_err(|_| {
            Error::ingest(
                path,
                line_no,
                format!("t_ms `{}` is not an integer", t.trim()),
            )
        })?;
        let v: f64 = v.trim().parse().map_err(|_| {
            Error::ingest(
                path,
                line_no,
                format!("value `{}` is not a number", v.trim()),
            )
        })?;
        if !v.is_finite() {
            return Err(Error::ingest(path, line_no, "value is not finite"));
        }
        if let Some(&prev) = times.last() {
            let d = t - prev;
            match step {
                None if d > 0 => step = Some(d),
                None => return Err(Error::ingest(path, line_no, "timestamps must increase")),
                Some(s) if s != d => {
                    return Err(Error::ingest(
                        path,
                        line_no,
                        format!("timestamp step {d} ms differs from {s} ms"),
                    ))
                }
                Some(_) => {}
            }
        }
        times.push(t);
        values.push(v);
    }
    let Some(step) = step else {
        return Err(Error::ingest(
            path,
            1,
            "need at least two samples to infer the rate",
        ));
    };
    PpgSeries::new(1000.0 / step as f64, times[0], values)
        .map_err(|e| Error::ingest(path, 1, e.to_string()))
}

pub fn load_ppg_csv(path: &Path) -> Result<PpgSeries> {
    parse_ppg_csv(&super::read_text(path)?, path)
}

/// Writes the series; the rate must correspond to a whole-millisecond step.
pub fn write_ppg_csv(path: &Path, series: &PpgSeries) -> Result<()> {
    let step = 1000.0 / series.sample_rate_hz();
    if (step - step.round()).abs() > 1e-9 || step.round() < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sample rate {} Hz has no whole-millisecond step",
            series.sample_rate_hz()
        )));
    }
    let step = step.round() as i64;
    let mut s = String::with_capacity(series.len() * 16);
    s.push_str(HEADER);
    s.push('\n');
    for (i, v) in series.samples().iter().enumerate() {
        let _ = writeln!(s, "{},{v}", series.start_time_ms() + i as i64 * step);
    }
    super::write_text(path, &s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<PpgSeries> {
        parse_ppg_csv(text, Path::new("test.csv"))
    }

    #[test]
    fn infers_rate() {
        let s = parse("t_ms,value\n0,1.5\n1,2.5\n2,-3\n").unwrap();
        assert_eq!(s.sample_rate_hz(), 1000.0);
        assert_eq!(s.samples(), &[1.5, 2.5, -3.0]);
        let s = parse("t_ms,value\n100,0\n120,0\n").unwrap();
        assert_eq!(s.sample_rate_hz(), 50.0);
        assert_eq!(s.start_time_ms(), 100);
    }

    #[test]
    fn jitter_reports_line() {
        match parse("t_ms,value\n0,1\n1,1\n3,1\n") {
            Err(Error::Ingest { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_fields() {
        match parse("t_ms,value\n0,1\n1,abc\n") {
            Err(Error::Ingest { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse("time,value\n0,1\n1,1\n").is_err());
        assert!(parse("t_ms,value\n0,1\n").is_err());
        assert!(parse("t_ms,value\n0,1\n0,1\n").is_err());
        assert!(parse("t_ms,value\n0,1,2\n1,1\n").is_err());
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let s = PpgSeries::new(1000.0, 5, vec![0.25, -1.0, 3.0e-7]).unwrap();
        write_ppg_csv(&path, &s).unwrap();
        assert_eq!(load_ppg_csv(&path).unwrap(), s);
        let odd = PpgSeries::new(300.0, 0, vec![1.0]).unwrap();
        assert!(write_ppg_csv(&path, &odd).is_err());
    }
}
