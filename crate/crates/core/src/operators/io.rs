//! Matrix interchange: little-endian binary container and CSV triplets.
//! The byte layout is described in docs/formats.md.

use super::Entries;
use crate::error::{invalid, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::io::{Read, Write};

pub const MATRIX_MAGIC: &[u8; 4] = b"SCHM";
pub const MATRIX_VERSION: u32 = 1;

pub fn write_binary<W: Write>(m: &Entries, mut out: W) -> Result<()> {
    let t = m.triplets();
    let d = m.dim() as u64;
    out.write_all(MATRIX_MAGIC)?;
    out.write_all(&MATRIX_VERSION.to_le_bytes())?;
    out.write_all(&d.to_le_bytes())?;
    out.write_all(&d.to_le_bytes())?;
    out.write_all(&(t.len() as u64).to_le_bytes())?;
    for (r, c, v) in t {
        out.write_all(&(r as u64).to_le_bytes())?;
        out.write_all(&(c as u64).to_le_bytes())?;
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

/// Reads a binary container into a dense matrix.
pub fn read_binary<R: Read>(mut input: R) -> Result<DMatrix<Complex64>> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic)?;
    if &magic != MATRIX_MAGIC {
        return invalid("matrix", "bad magic bytes");
    }
    let mut vb = [0u8; 4];
    input.read_exact(&mut vb)?;
    let version = u32::from_le_bytes(vb);
    if version != MATRIX_VERSION {
        return invalid("matrix", format!("unsupported container version {version}"));
    }
    let rows = read_u64(&mut input)? as usize;
    let cols = read_u64(&mut input)? as usize;
    let nnz = read_u64(&mut input)?;
    let mut m = DMatrix::from_element(rows, cols, Complex64::new(0.0, 0.0));
    for _ in 0..nnz {
        let r = read_u64(&mut input)? as usize;
        let c = read_u64(&mut input)? as usize;
        let re = read_f64(&mut input)?;
        let im = read_f64(&mut input)?;
        if r >= rows || c >= cols {
            return invalid("matrix", format!("entry ({r}, {c}) outside {rows}x{cols}"));
        }
        m[(r, c)] = Complex64::new(re, im);
    }
    Ok(m)
}

/// CSV with header `row,col,re,im`, values in shortest round-trip form.
pub fn write_csv_triplets<W: Write>(m: &Entries, mut out: W) -> Result<()> {
    writeln!(out, "row,col,re,im")?;
    for (r, c, v) in m.triplets() {
        writeln!(out, "{r},{c},{:?},{:?}", v.re, v.im)?;
    }
    Ok(())
}

pub fn read_csv_triplets<R: Read>(mut input: R, dim: usize) -> Result<DMatrix<Complex64>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return invalid("matrix", format!("line {} has {} fields", i + 1, f.len()));
        }
        let bad = |_| crate::error::LabError::InvalidParameter {
            name: "matrix",
            reason: format!("unparsable line {}", i + 1),
        };
        let r: usize = f[0].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
        let c: usize = f[1].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
        let re: f64 = f[2].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
        let im: f64 = f[3].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
        if r >= dim || c >= dim {
            return invalid("matrix", format!("entry ({r}, {c}) outside dimension {dim}"));
        }
        m[(r, c)] = Complex64::new(re, im);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::assemble_tg;
    use crate::spaces::Symbol;

    #[test]
    fn binary_and_csv_roundtrip() {
        let g = Symbol::taylor(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, -0.1),
            Complex64::new(1.0 / 3.0, 0.0),
        ])
        .unwrap();
        let m = assemble_tg(&g, 0.4, 9).unwrap();
        let mut buf = Vec::new();
        write_binary(&m.entries, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"SCHM");
        assert_eq!(buf.len(), 4 + 4 + 24 + 32 * m.entries.triplets().len());
        let back = read_binary(&buf[..]).unwrap();
        assert_eq!(back, m.entries.to_dense());
        let mut csv = Vec::new();
        write_csv_triplets(&m.entries, &mut csv).unwrap();
        let back = read_csv_triplets(&csv[..], 10).unwrap();
        assert_eq!(back, m.entries.to_dense());
    }
}
