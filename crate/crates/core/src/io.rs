//! Binary field files ("SSNS" format) and small text helpers.
//!
//! Layout: magic bytes `SSNS`, u32 n, u32 ncomp, f64 L (little-endian),
//! then ncomp * n^3 f64 samples, x index fastest, component-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read as IoRead, Write as IoWrite};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RealField, ALLOWED_N};
use crate::real::Real;

pub const MAGIC: [u8; 4] = *b"SSNS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldFileHeader {
    pub n: u32,
    pub ncomp: u32,
    pub l: f64,
}

impl FieldFileHeader {
    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() {
            return Err(Error::Format(format!("field size {} is not a power of two", self.n)));
        }
        if self.ncomp != 1 && self.ncomp != 3 {
            return Err(Error::Format(format!("ncomp must be 1 or 3, got {}", self.ncomp)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::Format(format!("bad box half-width {}", self.l)));
        }
        Ok(())
    }
}

/// Write a field; bit-exact for f64 data.
pub fn write_field<T: Real, W: IoWrite>(f: &RealField<T>, mut w: W) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(f.spec.n() as u32).to_le_bytes())?;
    w.write_all(&(f.ncomp as u32).to_le_bytes())?;
    w.write_all(&f.spec.half_width().as_f64().to_le_bytes())?;
    for v in &f.data {
        w.write_all(&v.as_f64().to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field_file<T: Real>(f: &RealField<T>, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    write_field(f, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_header<R: IoRead>(r: &mut R) -> Result<FieldFileHeader> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            magic, MAGIC
        )));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4);
    r.read_exact(&mut b4)?;
    let ncomp = u32::from_le_bytes(b4);
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8)?;
    let l = f64::from_le_bytes(b8);
    let header = FieldFileHeader { n, ncomp, l };
    header.validate()?;
    Ok(header)
}

pub fn read_field<T: Real, R: IoRead>(mut r: R) -> Result<RealField<T>> {
    let header = read_header(&mut r)?;
    let n = header.n as usize;
    if !ALLOWED_N.contains(&n) {
        return Err(Error::Format(format!(
            "field size {n} outside the supported set {ALLOWED_N:?}"
        )));
    }
    let spec = GridSpec::new(n, T::of(header.l))?;
    let count = header.ncomp as usize * spec.points_per_comp();
    let mut data = Vec::with_capacity(count);
    let mut b8 = [0u8; 8];
    for _ in 0..count {
        r.read_exact(&mut b8)?;
        data.push(T::of(f64::from_le_bytes(b8)));
    }
    // trailing bytes mean a corrupt or mislabeled file
    let mut probe = [0u8; 1];
    match r.read(&mut probe) {
        Ok(0) => {}
        Ok(_) => return Err(Error::Format("trailing bytes after field data".into())),
        Err(e) => return Err(e.into()),
    }
    Ok(RealField {
        spec,
        ncomp: header.ncomp as usize,
        data,
    })
}

pub fn read_field_file<T: Real>(path: &Path) -> Result<RealField<T>> {
    let file = File::open(path)?;
    read_field(BufReader::new(file))
}

/// key=value sidecar lines ('#' comments allowed).
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| {
            Error::Format(format!("line {}: expected key=value", lineno + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_bit_exact() {
        let g = GridSpec::new(32, 8.0f64).unwrap();
        let f = RealField::vector_from_fn(g, |p| {
            [p[0].sin() * 0.1, (p[1] * p[2]).cos(), p[0] * 1e-17 + 0.3]
        });
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 20 + 8 * 3 * 32 * 32 * 32);
        let back: RealField<f64> = read_field(&buf[..]).unwrap();
        assert_eq!(back.ncomp, 3);
        assert_eq!(back.spec, g);
        assert_eq!(back.data, f.data);
    }

    #[test]
    fn header_validation_rejects_corruption() {
        let g = GridSpec::new(32, 8.0f64).unwrap();
        let f = RealField::zeros(g, 1);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();

        let mut bad_magic = buf.clone();
        bad_magic[0] = b'X';
        assert!(read_field::<f64, _>(&bad_magic[..]).is_err());

        let mut bad_n = buf.clone();
        bad_n[4..8].copy_from_slice(&33u32.to_le_bytes());
        assert!(read_field::<f64, _>(&bad_n[..]).is_err());

        let mut bad_ncomp = buf.clone();
        bad_ncomp[8..12].copy_from_slice(&2u32.to_le_bytes());
        assert!(read_field::<f64, _>(&bad_ncomp[..]).is_err());

        let mut truncated = buf.clone();
        truncated.truncate(buf.len() - 8);
        assert!(read_field::<f64, _>(&truncated[..]).is_err());

        let mut padded = buf.clone();
        padded.push(0);
        assert!(read_field::<f64, _>(&padded[..]).is_err());
    }

    #[test]
    fn key_value_parsing() {
        let kv = parse_key_values("a = 1\n# comment\nb=two # inline\n\n").unwrap();
        assert_eq!(kv, vec![("a".into(), "1".into()), ("b".into(), "two".into())]);
        assert!(parse_key_values("not a pair").is_err());
    }
}
