//! Binary CSI capture format (`.wcsi`).
//!
//! Little-endian layout:
//!
//! ```text
//! magic        4 bytes  "WCSI"
//! version      u16      1
//! N            u32      subcarriers
//! M_total      u64      symbols
//! sample_rate  f64      Hz (1 / symbol interval)
//! carrier      f64      Hz
//! frequencies  N x f64  Hz
//! payload      N*M x (f32, f32)   subcarrier-major (all symbols of
//!                                  subcarrier 0, then subcarrier 1, ...)
//! ```
//!
//! Samples are stored as f32 pairs (8 bytes per complex sample), so the
//! payload is `N * M_total * 8` bytes; axes stay f64.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sim::{CsiFrame, SubcarrierGrid};

pub const CSI_MAGIC: [u8; 4] = *b"WCSI";
const CSI_VERSION: u16 = 1;

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8], expected: u64, seen: &mut u64) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => {
            *seen += buf.len() as u64;
            Ok(())
        }
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Err(Error::TruncatedPayload { expected, found: *seen })
        }
        Err(e) => Err(e.into()),
    }
}

/// Write a CSI frame plus its carrier frequency.
pub fn write_csi(path: &Path, frame: &CsiFrame, carrier_hz: f64) -> Result<()> {
    let n = frame.num_subcarriers();
    let m = frame.num_symbols();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&CSI_MAGIC)?;
    w.write_all(&CSI_VERSION.to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&frame.grid.sample_rate().to_le_bytes())?;
    w.write_all(&carrier_hz.to_le_bytes())?;
    for &f in &frame.grid.frequencies {
        w.write_all(&f.to_le_bytes())?;
    }
    for i in 0..n {
        for j in 0..m {
            let v = frame.samples[(i, j)];
            w.write_all(&(v.re as f32).to_le_bytes())?;
            w.write_all(&(v.im as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read a CSI frame; returns the frame and the stored carrier frequency.
pub fn read_csi(path: &Path) -> Result<(CsiFrame, f64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut seen = 0u64;

    let mut magic = [0u8; 4];
    read_exact_or_truncated(&mut r, &mut magic, 4, &mut seen)?;
    if magic != CSI_MAGIC {
        return Err(Error::BadMagic { expected: CSI_MAGIC, found: magic });
    }
    let mut b2 = [0u8; 2];
    read_exact_or_truncated(&mut r, &mut b2, 6, &mut seen)?;
    let version = u16::from_le_bytes(b2);
    if version != CSI_VERSION {
        return Err(Error::VersionMismatch { expected: CSI_VERSION, found: version });
    }
    let mut b4 = [0u8; 4];
    read_exact_or_truncated(&mut r, &mut b4, 10, &mut seen)?;
    let n = u32::from_le_bytes(b4) as usize;
    let mut b8 = [0u8; 8];
    read_exact_or_truncated(&mut r, &mut b8, 18, &mut seen)?;
    let m = u64::from_le_bytes(b8) as usize;

    let header_len = 18 + 16 + 8 * n as u64;
    let total_len = header_len + (n as u64) * (m as u64) * 8;

    read_exact_or_truncated(&mut r, &mut b8, total_len, &mut seen)?;
    let sample_rate = f64::from_le_bytes(b8);
    read_exact_or_truncated(&mut r, &mut b8, total_len, &mut seen)?;
    let carrier = f64::from_le_bytes(b8);
    let mut frequencies = Vec::with_capacity(n);
    for _ in 0..n {
        read_exact_or_truncated(&mut r, &mut b8, total_len, &mut seen)?;
        frequencies.push(f64::from_le_bytes(b8));
    }

    let mut samples = Array2::<Complex64>::zeros((n, m));
    let mut pair = [0u8; 8];
    for i in 0..n {
        for j in 0..m {
            read_exact_or_truncated(&mut r, &mut pair, total_len, &mut seen)?;
            let re = f32::from_le_bytes(pair[0..4].try_into().unwrap());
            let im = f32::from_le_bytes(pair[4..8].try_into().unwrap());
            samples[(i, j)] = Complex64::new(re as f64, im as f64);
        }
    }

    let grid = SubcarrierGrid {
        frequencies,
        symbol_interval: 1.0 / sample_rate,
        num_symbols: m,
    };
    Ok((CsiFrame { samples, grid }, carrier))
}
