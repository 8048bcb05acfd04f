//! Minimal undecimated (à-trous) 2-D Haar transform with periodic
//! boundaries, used as the non-redundant wavelet baseline in reports.
//!
//! Level ℓ averages/differences samples a hole-spacing `2^ℓ` apart:
//! `A v(x) = (v(x) + v(x+s))/2`, `D v(x) = (v(x) − v(x+s))/2`, so
//! `A + D = id` and reconstruction is an exact sum of the four subbands.

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error)]
pub enum HaarError {
    #[error("too many levels: 2^{0} exceeds the smaller image side {1}")]
    TooManyLevels(usize, usize),
}

/// One level's three detail subbands, in (LH, HL, HH) order.
pub type DetailBands = [Image; 3];

#[derive(Debug, Clone)]
pub struct HaarCoefficients {
    /// Coarsest approximation band.
    pub approx: Image,
    /// Detail bands from the finest level (index 0) to the coarsest.
    pub details: Vec<DetailBands>,
}

fn split_axis(f: &Image, spacing: usize, along_x: bool) -> (Image, Image) {
    let (w, h) = (f.width(), f.height());
    let mut low = Image::zeros(w, h);
    let mut high = Image::zeros(w, h);
    for j in 0..h {
        for i in 0..w {
            let other = if along_x {
                f.get((i + spacing) % w, j)
            } else {
                f.get(i, (j + spacing) % h)
            };
            let v = f.get(i, j);
            low.set(i, j, 0.5 * (v + other));
            high.set(i, j, 0.5 * (v - other));
        }
    }
    (low, high)
}

/// À-trous decomposition over `levels` scales.
pub fn haar_undecimated(f: &Image, levels: usize) -> Result<HaarCoefficients, HaarError> {
    assert!(levels >= 1, "need at least one level");
    let side = f.width().min(f.height());
    if (1usize << levels) > side {
        return Err(HaarError::TooManyLevels(levels, side));
    }
    let mut approx = f.clone();
    let mut details = Vec::with_capacity(levels);
    for level in 0..levels {
        let spacing = 1usize << level;
        let (ax, dx) = split_axis(&approx, spacing, true);
        let (ll, lh) = split_axis(&ax, spacing, false);
        let (hl, hh) = split_axis(&dx, spacing, false);
        details.push([lh, hl, hh]);
        approx = ll;
    }
    Ok(HaarCoefficients { approx, details })
}

/// Exact inverse: per level the four subbands sum back to the input.
pub fn inverse_haar(coeffs: &HaarCoefficients) -> Image {
    let mut approx = coeffs.approx.clone();
    for bands in coeffs.details.iter().rev() {
        for band in bands {
            for (a, d) in approx.pixels_mut().iter_mut().zip(band.pixels()) {
                *a += d;
            }
        }
    }
    approx
}

impl HaarCoefficients {
    /// All detail values flattened in a fixed order (level, band, pixel);
    /// the approximation band is not included.
    pub fn detail_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for bands in &self.details {
            for band in bands {
                out.extend_from_slice(band.pixels());
            }
        }
        out
    }

    /// Writes flattened detail values back in the same order.
    pub fn set_detail_values(&mut self, values: &[f64]) {
        let mut pos = 0;
        for bands in &mut self.details {
            for band in bands {
                let n = band.pixels().len();
                band.pixels_mut().copy_from_slice(&values[pos..pos + n]);
                pos += n;
            }
        }
        assert_eq!(pos, values.len());
    }
}
