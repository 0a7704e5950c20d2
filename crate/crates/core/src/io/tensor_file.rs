//! Binary delay-Doppler-time tensor format (`.wddt`).
//!
//! Little-endian layout:
//!
//! ```text
//! magic        4 bytes  "WDDT"
//! version      u16      1
//! L_Delay      u32
//! L_Doppler    u32
//! L_CPI        u32
//! cpi_stride   u32      symbols between CPI starts
//! delay axis   L_Delay x f64    excess range (m)
//! doppler axis L_Doppler x f64  Hz
//! cpi axis     L_CPI x f64      CPI start time (s)
//! payload      f32, row-major over (delay, doppler, cpi)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::extract::{DelayGrid, FeatureTensor};
use crate::SPEED_OF_LIGHT;

pub const TENSOR_MAGIC: [u8; 4] = *b"WDDT";
const TENSOR_VERSION: u16 = 1;

pub fn write_tensor(path: &Path, tensor: &FeatureTensor) -> Result<()> {
    let (ld, lf, lt) = tensor.data.dim();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&TENSOR_MAGIC)?;
    w.write_all(&TENSOR_VERSION.to_le_bytes())?;
    for dim in [ld, lf, lt, tensor.cpi_stride] {
        w.write_all(&(dim as u32).to_le_bytes())?;
    }
    for r in tensor.delay_grid.as_range_meters() {
        w.write_all(&r.to_le_bytes())?;
    }
    for &f in &tensor.doppler_axis {
        w.write_all(&f.to_le_bytes())?;
    }
    for &t in &tensor.cpi_times {
        w.write_all(&t.to_le_bytes())?;
    }
    for d in 0..ld {
        for f in 0..lf {
            for t in 0..lt {
                w.write_all(&(tensor.data[(d, f, t)] as f32).to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_tensor(path: &Path) -> Result<FeatureTensor> {
    let mut r = BufReader::new(File::open(path)?);
    let mut read_bytes = |buf: &mut [u8]| -> Result<()> {
        r.read_exact(buf).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::TruncatedPayload { expected: 0, found: 0 }
            } else {
                Error::Io(e)
            }
        })
    };

    let mut magic = [0u8; 4];
    read_bytes(&mut magic)?;
    if magic != TENSOR_MAGIC {
        return Err(Error::BadMagic { expected: TENSOR_MAGIC, found: magic });
    }
    let mut b2 = [0u8; 2];
    read_bytes(&mut b2)?;
    let version = u16::from_le_bytes(b2);
    if version != TENSOR_VERSION {
        return Err(Error::VersionMismatch { expected: TENSOR_VERSION, found: version });
    }
    let mut b4 = [0u8; 4];
    let mut dims = [0usize; 4];
    for d in &mut dims {
        read_bytes(&mut b4)?;
        *d = u32::from_le_bytes(b4) as usize;
    }
    let [ld, lf, lt, cpi_stride] = dims;

    let mut b8 = [0u8; 8];
    let mut axis = |len: usize| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            read_bytes(&mut b8)?;
            out.push(f64::from_le_bytes(b8));
        }
        Ok(out)
    };
    let range_m = axis(ld)?;
    let doppler_axis = axis(lf)?;
    let cpi_times = axis(lt)?;

    let mut data = Array3::<f64>::zeros((ld, lf, lt));
    let mut pair = [0u8; 4];
    for d in 0..ld {
        for f in 0..lf {
            for t in 0..lt {
                read_bytes(&mut pair)?;
                data[(d, f, t)] = f32::from_le_bytes(pair) as f64;
            }
        }
    }

    Ok(FeatureTensor {
        data,
        delay_grid: DelayGrid::new(range_m.iter().map(|r| r / SPEED_OF_LIGHT).collect())?,
        doppler_axis,
        cpi_times,
        cpi_stride,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_tensor() -> FeatureTensor {
        let mut data = Array3::<f64>::zeros((4, 7, 3));
        for (k, v) in data.iter_mut().enumerate() {
            *v = ((k as f64 * 0.37).sin().abs() * 10.0 * 1024.0).round() / 1024.0;
        }
        FeatureTensor {
            data,
            delay_grid: DelayGrid::from_range_meters(0.0, 4.0, 1.0).unwrap(),
            doppler_axis: (-3..=3).map(|k| k as f64 * 7.8125).collect(),
            cpi_times: vec![0.0, 0.032, 0.064],
            cpi_stride: 32,
        }
    }

    #[test]
    fn roundtrip_preserves_everything() {
        let dir = std::env::temp_dir().join("bisense_tensor_file_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("roundtrip.wddt");
        let tensor = sample_tensor();
        write_tensor(&path, &tensor).unwrap();
        let back = read_tensor(&path).unwrap();
        assert_eq!(back.data.dim(), tensor.data.dim());
        assert_eq!(back.doppler_axis, tensor.doppler_axis);
        assert_eq!(back.cpi_times, tensor.cpi_times);
        assert_eq!(back.cpi_stride, tensor.cpi_stride);
        for (a, b) in tensor.data.iter().zip(back.data.iter()) {
            assert_eq!(*a as f32, *b as f32);
        }
        // Byte-stable on rewrite.
        let path2 = dir.join("roundtrip2.wddt");
        write_tensor(&path2, &back).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = std::env::temp_dir().join("bisense_tensor_file_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.wddt");
        write_tensor(&path, &sample_tensor()).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[1] = b'?';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn truncation_rejected() {
        let dir = std::env::temp_dir().join("bisense_tensor_file_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("short.wddt");
        write_tensor(&path, &sample_tensor()).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::TruncatedPayload { .. })));
    }
}
