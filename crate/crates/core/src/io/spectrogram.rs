//! Spectrogram export: 16-bit PGM images and axis-labeled CSV grids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::extract::{DelayDopplerFrame, DopplerTimeMap};

fn check_nonnegative(values: &Array2<f64>) -> Result<()> {
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidConfig("magnitudes must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Write a grid as binary PGM (P5, maxval 65535, big-endian pixels per the
/// format). Values are min-max normalized; a constant grid maps to zero.
/// `rows x cols` become `height x width`.
fn write_pgm(path: &Path, values: &Array2<f64>) -> Result<()> {
    check_nonnegative(values)?;
    let (rows, cols) = values.dim();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{cols} {rows}\n65535\n")?;
    for r in 0..rows {
        for c in 0..cols {
            let v = if span > 0.0 {
                ((values[(r, c)] - lo) / span * 65535.0).round() as u16
            } else {
                0
            };
            w.write_all(&v.to_be_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// CSV with a labeled header row and a label column.
fn write_csv(
    path: &Path,
    corner: &str,
    col_axis: &[f64],
    row_axis: &[f64],
    cell: impl Fn(usize, usize) -> f64,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "{corner}")?;
    for c in col_axis {
        write!(w, ",{c}")?;
    }
    writeln!(w)?;
    for (ri, r) in row_axis.iter().enumerate() {
        write!(w, "{r}")?;
        for ci in 0..col_axis.len() {
            write!(w, ",{}", cell(ri, ci) as f32)?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Doppler-time map as PGM: rows (height) = Doppler bins, columns (width) =
/// CPI frames, i.e. time runs left-to-right.
pub fn export_map_pgm(map: &DopplerTimeMap, path: &Path) -> Result<()> {
    write_pgm(path, &map.magnitudes)
}

/// Doppler-time map as CSV: one row per CPI (first column its start time in
/// seconds), one column per Doppler bin (header row carries the Hz axis).
/// A 39-bin x 64-CPI map therefore becomes 64 data rows of 39 values.
pub fn export_map_csv(map: &DopplerTimeMap, path: &Path) -> Result<()> {
    check_nonnegative(&map.magnitudes)?;
    write_csv(
        path,
        "time_s\\doppler_hz",
        &map.doppler_axis,
        &map.cpi_times,
        |t, f| map.magnitudes[(f, t)],
    )
}

/// Delay-Doppler frame as PGM: rows = delay bins, columns = Doppler bins.
pub fn export_frame_pgm(frame: &DelayDopplerFrame, path: &Path) -> Result<()> {
    write_pgm(path, &frame.magnitudes)
}

/// Delay-Doppler frame as CSV: one row per delay bin (first column its
/// excess range in meters), one column per Doppler bin.
pub fn export_frame_csv(frame: &DelayDopplerFrame, path: &Path) -> Result<()> {
    check_nonnegative(&frame.magnitudes)?;
    let ranges = frame.grid.as_range_meters();
    write_csv(
        path,
        "range_m\\doppler_hz",
        &frame.doppler_axis,
        &ranges,
        |d, f| frame.magnitudes[(d, f)],
    )
}

/// Parse a CSV grid written by the exporters: returns (column axis, row
/// axis, values) with values[(row, col)].
pub fn read_csv_grid(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Array2<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::EmptyInput("csv file".into()))?;
    let col_axis: Vec<f64> = header
        .split(',')
        .skip(1)
        .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidConfig(e.to_string())))
        .collect::<Result<_>>()?;
    let mut row_axis = Vec::new();
    let mut rows = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label = fields
            .next()
            .ok_or_else(|| Error::InvalidConfig("missing row label".into()))?;
        row_axis.push(label.parse::<f64>().map_err(|e| Error::InvalidConfig(e.to_string()))?);
        let row: Vec<f64> = fields
            .map(|s| s.parse::<f64>().map_err(|e| Error::InvalidConfig(e.to_string())))
            .collect::<Result<_>>()?;
        if row.len() != col_axis.len() {
            return Err(Error::DimensionMismatch("ragged csv row".into()));
        }
        rows.push(row);
    }
    let values = Array2::from_shape_fn((rows.len(), col_axis.len()), |(r, c)| rows[r][c]);
    Ok((col_axis, row_axis, values))
}
