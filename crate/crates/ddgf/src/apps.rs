//! Compression and denoising pipelines: global keep-fraction thresholding,
//! the PSNR metric, seeded Gaussian noise, and report structures.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::image::{relative_error, Image};
use crate::sampling::SamplingSet;
use crate::transform::{analyze, reconstruct, CoefficientSet, TransformConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdRule {
    Hard,
    Soft,
}

impl std::fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ThresholdRule::Hard => "hard",
            ThresholdRule::Soft => "soft",
        })
    }
}

/// Indices of the `⌈keep_fraction·len⌉` largest-magnitude values, plus the
/// magnitude of the first discarded one (0 when nothing is discarded).
/// Ranking is global over all coefficients; ties keep the lower entry index.
fn keep_set(values: &[Complex64], keep_fraction: f64) -> (Vec<bool>, f64) {
    assert!((0.0..=1.0).contains(&keep_fraction), "keep fraction outside [0,1]");
    let n = values.len();
    let keep_count = ((keep_fraction * n as f64).ceil() as usize).min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        values[j]
            .norm()
            .partial_cmp(&values[i].norm())
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut kept = vec![false; n];
    for &i in &order[..keep_count] {
        kept[i] = true;
    }
    let tau = if keep_count < n { values[order[keep_count]].norm() } else { 0.0 };
    (kept, tau)
}

/// Keeps the largest-magnitude fraction of coefficients, zeroing the rest.
pub fn hard_threshold(c: &CoefficientSet, keep_fraction: f64) -> CoefficientSet {
    let (kept, _) = keep_set(&c.values, keep_fraction);
    let mut out = c.clone();
    for (v, k) in out.values.iter_mut().zip(kept) {
        if !k {
            *v = Complex64::default();
        }
    }
    out
}

/// Same ranking as [`hard_threshold`], but kept values are shrunk towards
/// zero by the threshold magnitude `τ` (the first discarded coefficient).
pub fn soft_threshold(c: &CoefficientSet, keep_fraction: f64) -> CoefficientSet {
    let (kept, tau) = keep_set(&c.values, keep_fraction);
    let mut out = c.clone();
    for (v, k) in out.values.iter_mut().zip(kept) {
        if !k {
            *v = Complex64::default();
        } else {
            let mag = v.norm();
            let shrunk = (mag - tau).max(0.0);
            *v = if mag == 0.0 { Complex64::default() } else { *v * (shrunk / mag) };
        }
    }
    out
}

pub fn threshold(c: &CoefficientSet, keep_fraction: f64, rule: ThresholdRule) -> CoefficientSet {
    match rule {
        ThresholdRule::Hard => hard_threshold(c, keep_fraction),
        ThresholdRule::Soft => soft_threshold(c, keep_fraction),
    }
}

#[derive(Debug, Clone)]
pub struct CompressionReport {
    /// Keep-complement fractions, e.g. 0.90 discards 90% of coefficients.
    pub levels: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub cg_converged: Vec<bool>,
    pub method: String,
}

/// Analyzes once, thresholds at each level and reconstructs through the
/// frame-operator inverse. Returns the report and the per-level images.
pub fn compress(
    f: &Image,
    sampling: &SamplingSet,
    cfg: &TransformConfig,
    levels: &[f64],
    method: &str,
) -> (CompressionReport, Vec<Image>) {
    let coeffs = analyze(f, sampling, cfg);
    let grid = f.grid();
    let per_level: Vec<(f64, bool, Image)> = levels
        .par_iter()
        .map(|&level| {
            let kept = hard_threshold(&coeffs, 1.0 - level);
            let r = reconstruct(&kept, sampling, cfg, &grid);
            let err = relative_error(&r.solution, f).expect("matching dimensions");
            (err, r.converged, r.solution)
        })
        .collect();
    let report = CompressionReport {
        levels: levels.to_vec(),
        relative_errors: per_level.iter().map(|t| t.0).collect(),
        cg_converged: per_level.iter().map(|t| t.1).collect(),
        method: method.to_string(),
    };
    (report, per_level.into_iter().map(|t| t.2).collect())
}

/// Adds i.i.d. Gaussian noise of the given variance on the `[0,1]`
/// intensity scale. Values are left unclamped; clamping happens only at
/// file output.
pub fn add_noise(f: &Image, sigma_sq: f64, seed: u64) -> Image {
    assert!(sigma_sq >= 0.0);
    if sigma_sq == 0.0 {
        return f.clone();
    }
    let normal = Normal::new(0.0, sigma_sq.sqrt()).expect("valid std deviation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = f.clone();
    for p in out.pixels_mut() {
        *p += normal.sample(&mut rng);
    }
    out
}

/// `−10·log₁₀(RMSE)` on the `[0,1]` intensity scale; note the absence of a
/// peak term — large values still mean better fidelity. Identical images
/// give `+∞`.
pub fn psnr(approx: &Image, reference: &Image) -> f64 {
    assert_eq!(
        (approx.width(), approx.height()),
        (reference.width(), reference.height()),
        "dimension mismatch"
    );
    let n = approx.pixels().len() as f64;
    let mse: f64 = approx
        .pixels()
        .iter()
        .zip(reference.pixels())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.sqrt().log10()
    }
}

#[derive(Debug, Clone)]
pub struct DenoiseReport {
    pub sigma_sq: f64,
    pub trials: usize,
    pub sweep: Vec<f64>,
    /// Mean PSNR per sweep fraction, hard rule.
    pub mean_psnr_hard: Vec<f64>,
    /// Mean PSNR per sweep fraction, soft rule.
    pub mean_psnr_soft: Vec<f64>,
    /// Mean PSNR of the raw noisy images against the clean reference.
    pub mean_noisy_psnr: f64,
    /// `(fraction, rule, mean PSNR)` of the best grid point.
    pub best: (f64, ThresholdRule, f64),
}

/// The canonical threshold sweep 0.75–0.995 in steps of 0.005.
pub fn default_sweep() -> Vec<f64> {
    (0..50).map(|k| 0.75 + 0.005 * k as f64).collect()
}

/// Noise → analyze → threshold sweep → reconstruct, averaged over seeded
/// trials. `fraction` values in the sweep are discard fractions, matching
/// the compression levels.
pub fn denoise(
    f: &Image,
    sampling: &SamplingSet,
    cfg: &TransformConfig,
    sigma_sq: f64,
    trials: usize,
    sweep: &[f64],
    base_seed: u64,
) -> DenoiseReport {
    assert!(trials >= 1);
    assert!(!sweep.is_empty());
    let grid = f.grid();
    let mut sum_hard = vec![0.0; sweep.len()];
    let mut sum_soft = vec![0.0; sweep.len()];
    let mut sum_noisy = 0.0;
    for trial in 0..trials {
        let noisy = add_noise(f, sigma_sq, base_seed.wrapping_add(trial as u64));
        sum_noisy += psnr(&noisy, f);
        let coeffs = analyze(&noisy, sampling, cfg);
        let scores: Vec<(f64, f64)> = sweep
            .par_iter()
            .map(|&fraction| {
                let run = |rule| {
                    let kept = threshold(&coeffs, 1.0 - fraction, rule);
                    let r = reconstruct(&kept, sampling, cfg, &grid);
                    psnr(&r.solution, f)
                };
                (run(ThresholdRule::Hard), run(ThresholdRule::Soft))
            })
            .collect();
        for (k, (h, s)) in scores.into_iter().enumerate() {
            sum_hard[k] += h;
            sum_soft[k] += s;
        }
    }
    let t = trials as f64;
    let mean_psnr_hard: Vec<f64> = sum_hard.iter().map(|v| v / t).collect();
    let mean_psnr_soft: Vec<f64> = sum_soft.iter().map(|v| v / t).collect();
    let mut best = (sweep[0], ThresholdRule::Hard, f64::NEG_INFINITY);
    for (k, &fraction) in sweep.iter().enumerate() {
        if mean_psnr_hard[k] > best.2 {
            best = (fraction, ThresholdRule::Hard, mean_psnr_hard[k]);
        }
        if mean_psnr_soft[k] > best.2 {
            best = (fraction, ThresholdRule::Soft, mean_psnr_soft[k]);
        }
    }
    DenoiseReport {
        sigma_sq,
        trials,
        sweep: sweep.to_vec(),
        mean_psnr_hard,
        mean_psnr_soft,
        mean_noisy_psnr: sum_noisy / t,
        best,
    }
}
