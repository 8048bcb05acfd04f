//! Image container, pixel/coordinate conventions and binary PGM I/O.
//!
//! Pixels are real intensities in nominal range `[0,1]`, stored row-major.
//! Pixel `(i,j)` sits at coordinate `(i − w/2 + 1/2, j − h/2 + 1/2)` in
//! pixel units, so the grid spans `[−P/2, P/2)` symmetrically about the
//! origin. All inner products use unit pixel weight.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported magic {0:?}, only binary PGM (P5) is accepted")]
    UnsupportedMagic(String),
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("truncated pixel payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },
    #[error("image dimensions must be even and at least 2, got {0}x{1}")]
    BadDimensions(u32, u32),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("reference image has zero norm")]
    ZeroNorm,
    #[error("non-finite pixel value")]
    NonFinite,
}

/// Real-valued 2-D grid of intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    /// Both dimensions must be even and at least 2, all values finite.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self, ImageError> {
        if width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0 {
            return Err(ImageError::BadDimensions(width as u32, height as u32));
        }
        assert_eq!(pixels.len(), width * height, "pixel buffer size mismatch");
        if pixels.iter().any(|p| !p.is_finite()) {
            return Err(ImageError::NonFinite);
        }
        Ok(Image { width, height, pixels })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Image::new(width, height, vec![0.0; width * height]).expect("valid dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels[j * self.width + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.pixels[j * self.width + i] = v;
    }

    pub fn grid(&self) -> GridMap {
        GridMap::new(self.width, self.height)
    }
}

/// Complex-valued field on the same grid as an [`Image`]; the output type
/// of synthesis and the carrier for atoms.
#[derive(Debug, Clone)]
pub struct Field {
    pub width: usize,
    pub height: usize,
    pub values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(width: usize, height: usize) -> Self {
        Field { width, height, values: vec![Complex64::new(0.0, 0.0); width * height] }
    }

    pub fn from_image(img: &Image) -> Self {
        Field {
            width: img.width,
            height: img.height,
            values: img.pixels.iter().map(|&p| Complex64::new(p, 0.0)).collect(),
        }
    }

    /// Real part as an image; the imaginary residue is the caller's problem.
    pub fn real_part(&self) -> Image {
        Image::new(self.width, self.height, self.values.iter().map(|v| v.re).collect())
            .expect("field dimensions come from a valid image")
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Pixel index to continuum coordinate map: `(i,j) ↦ (i − w/2 + 1/2, j − h/2 + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridMap {
    pub width: usize,
    pub height: usize,
}

impl GridMap {
    pub fn new(width: usize, height: usize) -> Self {
        GridMap { width, height }
    }

    #[inline]
    pub fn coord(&self, i: usize, j: usize) -> (f64, f64) {
        (
            i as f64 - self.width as f64 / 2.0 + 0.5,
            j as f64 - self.height as f64 / 2.0 + 0.5,
        )
    }
}

/// Unit-weight inner product of a real image against a complex field:
/// `Σ_p f(p)·conj(h(p))`.
pub fn inner(f: &Image, h: &Field) -> Result<Complex64, ImageError> {
    if f.width != h.width || f.height != h.height {
        return Err(ImageError::DimensionMismatch(f.width, f.height, h.width, h.height));
    }
    Ok(f.pixels
        .iter()
        .zip(h.values.iter())
        .map(|(&fp, hp)| fp * hp.conj())
        .sum())
}

pub fn inner_images(f: &Image, h: &Image) -> Result<f64, ImageError> {
    if f.width != h.width || f.height != h.height {
        return Err(ImageError::DimensionMismatch(f.width, f.height, h.width, h.height));
    }
    Ok(f.pixels.iter().zip(h.pixels.iter()).map(|(a, b)| a * b).sum())
}

/// Plain ℓ² norm of the pixel vector.
pub fn norm2(f: &Image) -> f64 {
    f.pixels.iter().map(|p| p * p).sum::<f64>().sqrt()
}

/// `‖f̃ − f‖₂ / ‖f‖₂`; errors on a zero-norm reference.
pub fn relative_error(approx: &Image, reference: &Image) -> Result<f64, ImageError> {
    if approx.width != reference.width || approx.height != reference.height {
        return Err(ImageError::DimensionMismatch(
            approx.width,
            approx.height,
            reference.width,
            reference.height,
        ));
    }
    let denom = norm2(reference);
    if denom == 0.0 {
        return Err(ImageError::ZeroNorm);
    }
    let diff: f64 = approx
        .pixels
        .iter()
        .zip(reference.pixels.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(diff.sqrt() / denom)
}

// ---- PGM (P5) ----

fn skip_ws_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_number(bytes: &[u8], pos: usize) -> Result<(u32, usize), ImageError> {
    let start = skip_ws_and_comments(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(ImageError::MalformedHeader("expected a decimal field".into()));
    }
    let s = std::str::from_utf8(&bytes[start..end]).unwrap();
    let v = s
        .parse::<u32>()
        .map_err(|_| ImageError::MalformedHeader(format!("bad number {s:?}")))?;
    Ok((v, end))
}

/// Loads a binary PGM (P5) file, 8- or 16-bit, mapping intensities to
/// `[0,1]` by dividing by maxval.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image, ImageError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < 2 {
        return Err(ImageError::MalformedHeader("file too short".into()));
    }
    let magic = &bytes[..2];
    if magic != b"P5" {
        return Err(ImageError::UnsupportedMagic(
            String::from_utf8_lossy(magic).into_owned(),
        ));
    }
    let (width, pos) = read_number(&bytes, 2)?;
    let (height, pos) = read_number(&bytes, pos)?;
    let (maxval, pos) = read_number(&bytes, pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(ImageError::MalformedHeader(format!("bad maxval {maxval}")));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ImageError::MalformedHeader("missing separator before payload".into()));
    }
    let data = &bytes[pos + 1..];
    let n = width as usize * height as usize;
    let wide = maxval > 255;
    let expected = if wide { 2 * n } else { n };
    if data.len() < expected {
        return Err(ImageError::TruncatedPayload { expected, got: data.len() });
    }
    let scale = 1.0 / maxval as f64;
    let pixels: Vec<f64> = if wide {
        data[..expected]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 * scale)
            .collect()
    } else {
        data[..expected].iter().map(|&b| b as f64 * scale).collect()
    };
    Image::new(width as usize, height as usize, pixels)
}

/// Writes an 8-bit binary PGM, clamping to `[0,1]` and rounding half up.
pub fn save_pgm(img: &Image, path: impl AsRef<Path>) -> Result<(), ImageError> {
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height)?;
    let bytes: Vec<u8> = img
        .pixels
        .iter()
        .map(|&p| (p.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8)
        .collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_bytes(bytes: &[u8]) -> tempfile::NamedTempFile {
        use std::io::Write as _;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(bytes).unwrap();
        f
    }

    #[test]
    fn load_8bit_scales_linearly() {
        let f = write_bytes(b"P5\n2 2\n255\n\x00\xff\x80\x40");
        let img = load_pgm(f.path()).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0, 128.0 / 255.0, 64.0 / 255.0]);
    }

    #[test]
    fn load_16bit_full_scale_is_one() {
        let f = write_bytes(b"P5\n2 2\n65535\n\xff\xff\x00\x00\x00\x00\x00\x00");
        let img = load_pgm(f.path()).unwrap();
        assert_eq!(img.pixels()[0], 1.0);
    }

    #[test]
    fn color_magic_is_rejected() {
        let f = write_bytes(b"P6\n2 2\n255\nxxxxxxxxxxxx");
        assert!(matches!(load_pgm(f.path()), Err(ImageError::UnsupportedMagic(_))));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let f = write_bytes(b"P5\n2 2\n255\n\x00\x01");
        assert!(matches!(load_pgm(f.path()), Err(ImageError::TruncatedPayload { .. })));
    }

    #[test]
    fn comments_in_header_are_skipped() {
        let f = write_bytes(b"P5\n# a comment\n2 2\n255\n\x00\x01\x02\x03");
        let img = load_pgm(f.path()).unwrap();
        assert_eq!(img.width(), 2);
    }

    #[test]
    fn save_quantizes_with_clamp_and_round_half_up() {
        let img = Image::new(2, 2, vec![0.0, 1.0, 1.7, 0.5]).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_pgm(&img, f.path()).unwrap();
        let mut bytes = Vec::new();
        File::open(f.path()).unwrap().read_to_end(&mut bytes).unwrap();
        let payload = &bytes[bytes.len() - 4..];
        assert_eq!(payload, &[0, 255, 255, 128]);
    }

    #[test]
    fn save_load_round_trip_within_half_quantum() {
        let pixels: Vec<f64> = (0..16).map(|k| k as f64 / 15.7 + 0.01).collect();
        let img = Image::new(4, 4, pixels).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_pgm(&img, f.path()).unwrap();
        let back = load_pgm(f.path()).unwrap();
        for (a, b) in back.pixels().iter().zip(img.pixels()) {
            assert!((a - b.clamp(0.0, 1.0)).abs() <= 1.0 / 510.0 + 1e-12);
        }
    }

    #[test]
    fn inner_all_ones() {
        let f = Image::new(4, 4, vec![1.0; 16]).unwrap();
        let h = Field::from_image(&f);
        assert_eq!(inner(&f, &h).unwrap(), Complex64::new(16.0, 0.0));
    }

    #[test]
    fn inner_disjoint_supports_is_zero() {
        let mut f = Image::zeros(4, 4);
        f.set(0, 0, 2.0);
        let mut h = Image::zeros(4, 4);
        h.set(3, 3, 5.0);
        assert_eq!(inner(&f, &Field::from_image(&h)).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn inner_matches_elementwise_sum_oracle() {
        // independent elementwise oracle on a fixed "random" 4x4 pair
        let fv: Vec<f64> = (0..16).map(|k| ((k * 37 + 11) % 13) as f64 * 0.1 - 0.5).collect();
        let hv: Vec<f64> = (0..16).map(|k| ((k * 53 + 7) % 17) as f64 * 0.07 - 0.4).collect();
        let f = Image::new(4, 4, fv.clone()).unwrap();
        let h = Image::new(4, 4, hv.clone()).unwrap();
        let oracle: f64 = (0..16).map(|k| fv[k] * hv[k]).sum();
        let got = inner(&f, &Field::from_image(&h)).unwrap();
        assert!((got.re - oracle).abs() < 1e-12 && got.im == 0.0);
    }

    #[test]
    fn inner_dimension_mismatch() {
        let f = Image::zeros(4, 4);
        let h = Field::zeros(4, 6);
        assert!(inner(&f, &h).is_err());
    }

    #[test]
    fn inner_equals_norm_squared() {
        let fv: Vec<f64> = (0..16).map(|k| (k as f64).sin()).collect();
        let f = Image::new(4, 4, fv).unwrap();
        let n = norm2(&f);
        let ip = inner(&f, &Field::from_image(&f)).unwrap().re;
        assert!((ip - n * n).abs() <= 1e-12 * ip.abs().max(1.0));
    }

    #[test]
    fn relative_error_basics() {
        let f = Image::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(relative_error(&f, &f).unwrap(), 0.0);
        let zero = Image::zeros(2, 2);
        assert_eq!(relative_error(&zero, &f).unwrap(), 1.0);
        let double = Image::new(2, 2, vec![2.0, 4.0, 6.0, 8.0]).unwrap();
        assert!((relative_error(&double, &f).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(relative_error(&f, &zero), Err(ImageError::ZeroNorm)));
    }

    #[test]
    fn relative_error_is_jointly_scale_invariant() {
        let f = Image::new(2, 2, vec![1.0, -2.0, 3.0, 0.5]).unwrap();
        let g = Image::new(2, 2, vec![1.1, -1.8, 2.7, 0.9]).unwrap();
        let c = -3.25;
        let fc = Image::new(2, 2, f.pixels().iter().map(|p| c * p).collect()).unwrap();
        let gc = Image::new(2, 2, g.pixels().iter().map(|p| c * p).collect()).unwrap();
        let a = relative_error(&g, &f).unwrap();
        let b = relative_error(&gc, &fc).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn odd_dimensions_rejected() {
        assert!(Image::new(3, 4, vec![0.0; 12]).is_err());
        assert!(Image::new(4, 1, vec![0.0; 4]).is_err());
    }

    #[test]
    fn grid_coordinates_are_symmetric_half_integers() {
        let g = GridMap::new(4, 4);
        assert_eq!(g.coord(0, 0), (-1.5, -1.5));
        assert_eq!(g.coord(3, 3), (1.5, 1.5));
    }
}
