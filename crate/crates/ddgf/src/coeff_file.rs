//! Bit-exact binary coefficient file format (".ddgf").
//!
//! Layout, all integers and floats little-endian:
//! magic "DDGF", version u32 = 1, M i32, N i32, translation count u32,
//! translations f64..., entry count u64, then (re, im) f64 pairs in the
//! sampling set's canonical entry order.

use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use thiserror::Error;

use crate::sampling::{build_sampling_set, SamplingSet};
use crate::transform::CoefficientSet;

const MAGIC: &[u8; 4] = b"DDGF";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CoeffFileError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic bytes; not a coefficient file")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("malformed payload: {0}")]
    Malformed(String),
}

/// Translation grids are written verbatim; on read they must be the
/// arithmetic grid `{step·k : |k| ≤ k_max}` so the sampling set can be
/// rebuilt exactly.
pub fn write_coefficients(c: &CoefficientSet, path: impl AsRef<Path>) -> Result<(), CoeffFileError> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&c.sampling.m_extent.to_le_bytes())?;
    out.write_all(&c.sampling.n_extent.to_le_bytes())?;
    out.write_all(&(c.sampling.translations.len() as u32).to_le_bytes())?;
    for &t in &c.sampling.translations {
        out.write_all(&t.to_le_bytes())?;
    }
    out.write_all(&(c.values.len() as u64).to_le_bytes())?;
    for v in &c.values {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_exact<const N: usize>(r: &mut impl Read) -> Result<[u8; N], CoeffFileError> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_coefficients(path: impl AsRef<Path>) -> Result<CoefficientSet, CoeffFileError> {
    let mut r = BufReader::new(File::open(path)?);
    if &read_exact::<4>(&mut r)? != MAGIC {
        return Err(CoeffFileError::BadMagic);
    }
    let version = u32::from_le_bytes(read_exact::<4>(&mut r)?);
    if version != VERSION {
        return Err(CoeffFileError::UnsupportedVersion(version));
    }
    let m = i32::from_le_bytes(read_exact::<4>(&mut r)?);
    let n = i32::from_le_bytes(read_exact::<4>(&mut r)?);
    if m < 1 || n < 1 {
        return Err(CoeffFileError::Malformed(format!("bad lattice extents {m}, {n}")));
    }
    let t_count = u32::from_le_bytes(read_exact::<4>(&mut r)?) as usize;
    let mut translations = Vec::with_capacity(t_count);
    for _ in 0..t_count {
        translations.push(f64::from_le_bytes(read_exact::<8>(&mut r)?));
    }
    let sampling = rebuild_sampling(m, n, &translations)?;
    let count = u64::from_le_bytes(read_exact::<8>(&mut r)?) as usize;
    if count != sampling.entry_count() {
        return Err(CoeffFileError::Malformed(format!(
            "entry count {count} does not match the sampling set ({})",
            sampling.entry_count()
        )));
    }
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let re = f64::from_le_bytes(read_exact::<8>(&mut r)?);
        let im = f64::from_le_bytes(read_exact::<8>(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    Ok(CoefficientSet { sampling, values })
}

fn rebuild_sampling(m: i32, n: i32, translations: &[f64]) -> Result<SamplingSet, CoeffFileError> {
    if translations.is_empty() || translations.len() % 2 == 0 {
        return Err(CoeffFileError::Malformed(
            "translation grid must have odd length".into(),
        ));
    }
    let k_max = (translations.len() / 2) as i32;
    let step = if k_max == 0 { 4.0 } else { translations[(k_max + 1) as usize] };
    if step <= 0.0 {
        return Err(CoeffFileError::Malformed("non-positive translation step".into()));
    }
    let s = build_sampling_set(m, n, step, k_max);
    for (a, b) in s.translations.iter().zip(translations) {
        if a != b {
            return Err(CoeffFileError::Malformed(
                "translations are not an arithmetic grid".into(),
            ));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_coeffs(m: i32, n: i32, step: f64, k_max: i32, seed: u64) -> CoefficientSet {
        let s = build_sampling_set(m, n, step, k_max);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..s.entry_count())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        CoefficientSet { sampling: s, values }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let c = random_coeffs(4, 4, 4.0, 5, 1);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_coefficients(&c, f.path()).unwrap();
        let back = read_coefficients(f.path()).unwrap();
        assert_eq!(back.sampling, c.sampling);
        // bit-exact, not approximately equal
        for (a, b) in back.values.iter().zip(c.values.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn round_trip_nonredundant() {
        let c = random_coeffs(2, 3, 2.5, 0, 2);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_coefficients(&c, f.path()).unwrap();
        let back = read_coefficients(f.path()).unwrap();
        assert_eq!(back.sampling.translations, vec![0.0]);
        assert_eq!(back.values, c.values);
    }

    #[test]
    fn bad_magic_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, b"NOPE").unwrap();
        assert!(matches!(read_coefficients(f.path()), Err(CoeffFileError::BadMagic)));
    }

    #[test]
    fn unknown_version_rejected() {
        let c = random_coeffs(1, 1, 4.0, 0, 3);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_coefficients(&c, f.path()).unwrap();
        let mut bytes = std::fs::read(f.path()).unwrap();
        bytes[4] = 9;
        std::fs::write(f.path(), &bytes).unwrap();
        assert!(matches!(
            read_coefficients(f.path()),
            Err(CoeffFileError::UnsupportedVersion(9))
        ));
    }

    #[test]
    fn truncated_payload_rejected() {
        let c = random_coeffs(2, 2, 4.0, 1, 4);
        let f = tempfile::NamedTempFile::new().unwrap();
        write_coefficients(&c, f.path()).unwrap();
        let bytes = std::fs::read(f.path()).unwrap();
        std::fs::write(f.path(), &bytes[..bytes.len() - 8]).unwrap();
        assert!(read_coefficients(f.path()).is_err());
    }
}
