//! Theoretical frame-bound formulas and empirical spectral estimation of
//! the discrete frame operator.
//!
//! Three closed-form bound families are exposed — the multidimensional
//! Kadec quarter-theorem pair, the Bessel perturbation bound, and the main
//! integral bounds `A = (1/ω)∫ a(γ)|ĝ|²`, `B = (1/ω)∫ b(γ)|ĝ|²` — together
//! with power-iteration estimates of the extreme Rayleigh quotients of the
//! implemented frame operator on a band-limited test subspace. The constant
//! conventions intentionally follow their respective statements and are not
//! reconciled: the standalone Kadec pair carries `(2π)^d` while the
//! integrand `a(γ)` carries `(2π)^{2d}`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use thiserror::Error;

use crate::image::Image;
use crate::sampling::SamplingSet;
use crate::transform::{frame_apply, TransformConfig};
use crate::window::Window;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("window has unbounded frequency support")]
    UnboundedSupport,
    #[error("frame hypothesis violated: computed lower bound {0} is not positive")]
    HypothesisViolation(f64),
}

/// Kadec quarter-theorem Riesz bounds:
/// `A = (2π)^d (cos πL − sin πL)^{2d}`, `B = (2π)^d (2 − cos πL + sin πL)^{2d}`.
pub fn kadec_bounds(l: f64, d: u32) -> Result<(f64, f64), BoundsError> {
    if !(0.0..0.25).contains(&l) {
        return Err(BoundsError::Domain(format!("L = {l} outside [0, 1/4)")));
    }
    if d == 0 {
        return Err(BoundsError::Domain("d must be positive".into()));
    }
    let (s, c) = (PI * l).sin_cos();
    let tau = (2.0 * PI).powi(d as i32);
    Ok((tau * (c - s).powi(2 * d as i32), tau * (2.0 - c + s).powi(2 * d as i32)))
}

/// Bessel perturbation: `B′ = (B/A)(e^{M²ρ²d}−1)(e^{π²d/ρ²}−1)` and the
/// perturbed upper bound `B(1+√B′)²`.
pub fn bessel_perturbation(
    a: f64,
    b: f64,
    m: f64,
    rho: f64,
    d: u32,
) -> Result<(f64, f64), BoundsError> {
    if a <= 0.0 || b < a {
        return Err(BoundsError::Domain(format!("need 0 < A ≤ B, got A={a}, B={b}")));
    }
    if m < 0.0 || rho <= 0.0 {
        return Err(BoundsError::Domain("need M ≥ 0 and ρ > 0".into()));
    }
    let d = d as f64;
    let b_prime = (b / a) * ((m * m * rho * rho * d).exp() - 1.0)
        * ((PI * PI * d / (rho * rho)).exp() - 1.0);
    Ok((b_prime, b * (1.0 + b_prime.sqrt()).powi(2)))
}

/// Adaptive Simpson quadrature to an absolute tolerance, with a depth cap
/// as a safety net for the rapidly growing `b(γ)` integrand.
fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        // the relative floor stops refinement once the error estimate is
        // dominated by floating-point noise of a large integrand
        let floor = 1e-14 * (left.abs() + right.abs());
        if depth == 0 || delta.abs() <= 15.0 * tol.max(floor) {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 40)
}

/// Integral frame bounds for a compactly frequency-supported window:
/// `A = (1/ω)∫_{−1/4}^{1/4} (2π)^{2d}(cos π|γ| − sin π|γ|)^{2d} |ĝ(γ)|² dγ`,
/// `B = (1/ω)∫_{supp ĝ} (1+√c(γ))² |ĝ(γ)|² dγ`,
/// `c(γ) = (e^{γ²d} − 1)(e^{π²d} − 1)`.
pub fn main_theorem_bounds(
    w: &Window,
    omega: f64,
    d: u32,
    quad_tol: f64,
) -> Result<(f64, f64), BoundsError> {
    if omega <= 0.0 {
        return Err(BoundsError::Domain("ω must be positive".into()));
    }
    let hw = w.freq_support_halfwidth().ok_or(BoundsError::UnboundedSupport)?;
    let di = 2 * d as i32;
    let df = d as f64;
    let a_integrand = move |gamma: f64| {
        let (s, c) = (PI * gamma.abs()).sin_cos();
        let g = w.eval_frequency(gamma);
        (2.0 * PI).powi(di) * (c - s).powi(di) * g * g
    };
    let c_big = (PI * PI * df).exp() - 1.0;
    let b_integrand = move |gamma: f64| {
        let c = ((gamma * gamma * df).exp() - 1.0) * c_big;
        let g = w.eval_frequency(gamma);
        (1.0 + c.sqrt()).powi(2) * g * g
    };
    let a_hi = hw.min(0.25);
    let a = adaptive_simpson(&a_integrand, -a_hi, a_hi, quad_tol) / omega;
    let b = adaptive_simpson(&b_integrand, -hw, hw, quad_tol) / omega;
    if a <= 0.0 {
        return Err(BoundsError::HypothesisViolation(a));
    }
    Ok((a, b))
}

/// Random image whose spectrum lies inside `[−K, K]²` with
/// `K = ⌊band_fraction·P/2⌋`, built from real cosine modes.
pub fn random_band_limited(p: usize, band_fraction: f64, seed: u64) -> Image {
    assert!(p >= 2 && p % 2 == 0);
    assert!(band_fraction > 0.0 && band_fraction <= 1.0);
    let k_band = ((band_fraction * p as f64 / 2.0).floor() as i32).clamp(1, p as i32 / 2 - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    for k1 in -k_band..=k_band {
        for k2 in -k_band..=k_band {
            let amp: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..2.0 * PI);
            modes.push((k1, k2, amp, phase));
        }
    }
    let mut img = Image::zeros(p, p);
    let grid = img.grid();
    for j in 0..p {
        for i in 0..p {
            let (x, y) = grid.coord(i, j);
            let mut v = 0.0;
            for &(k1, k2, amp, phase) in &modes {
                v += amp * (2.0 * PI * (k1 as f64 * x + k2 as f64 * y) / p as f64 + phase).cos();
            }
            img.set(i, j, v / modes.len() as f64);
        }
    }
    img
}

/// Orthogonal projection onto the subspace of images whose DFT bins lie in
/// `[−K, K]²` (indices taken modulo P).
pub fn band_project(img: &Image, k_band: i32) -> Image {
    let p = img.width();
    assert_eq!(p, img.height());
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(p);
    let inv = planner.plan_fft_inverse(p);
    let mut data: Vec<Complex64> =
        img.pixels().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for row in data.chunks_exact_mut(p) {
        fwd.process(row);
    }
    let mut col = vec![Complex64::default(); p];
    for x in 0..p {
        for y in 0..p {
            col[y] = data[y * p + x];
        }
        fwd.process(&mut col);
        for y in 0..p {
            data[y * p + x] = col[y];
        }
    }
    let inside = |j: usize| -> bool {
        let k = if j <= p / 2 { j as i32 } else { j as i32 - p as i32 };
        k.abs() <= k_band
    };
    for jy in 0..p {
        for jx in 0..p {
            if !inside(jx) || !inside(jy) {
                data[jy * p + jx] = Complex64::default();
            }
        }
    }
    for row in data.chunks_exact_mut(p) {
        inv.process(row);
    }
    for x in 0..p {
        for y in 0..p {
            col[y] = data[y * p + x];
        }
        inv.process(&mut col);
        for y in 0..p {
            data[y * p + x] = col[y];
        }
    }
    let scale = 1.0 / (p * p) as f64;
    Image::new(p, p, data.iter().map(|v| v.re * scale).collect())
        .expect("projection preserves finiteness")
}

#[derive(Debug, Clone)]
pub struct EmpiricalBounds {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_samples: usize,
    /// Human-readable description of the restricted test subspace.
    pub subspace: String,
}

#[derive(Debug, Clone, Default)]
pub struct FrameBoundsReport {
    pub kadec: Option<(f64, f64)>,
    pub bessel_perturbed_upper: Option<f64>,
    pub main: Option<(f64, f64)>,
    pub empirical: Option<EmpiricalBounds>,
}

impl FrameBoundsReport {
    /// All present bounds nonnegative with A ≤ B inside each pair.
    pub fn is_consistent(&self) -> bool {
        let pair_ok = |p: Option<(f64, f64)>| p.map_or(true, |(a, b)| a >= 0.0 && a <= b);
        pair_ok(self.kadec)
            && pair_ok(self.main)
            && self.bessel_perturbed_upper.map_or(true, |b| b >= 0.0)
            && self
                .empirical
                .as_ref()
                .map_or(true, |e| e.lambda_min >= 0.0 && e.lambda_min <= e.lambda_max)
    }
}

fn rayleigh(f: &Image, s: &SamplingSet, cfg: &TransformConfig) -> f64 {
    let sf = frame_apply(f, s, cfg);
    let num = crate::image::inner_images(&sf, f).unwrap();
    let den = crate::image::inner_images(f, f).unwrap();
    num / den
}

/// Power iteration for the largest eigenvalue of the projected operator
/// `v ↦ project(op(v))`, started from `v0` (already projected).
fn power_iteration(
    op: &dyn Fn(&Image) -> Image,
    project: &dyn Fn(&Image) -> Image,
    v0: Image,
    max_iter: usize,
    tol: f64,
) -> f64 {
    let mut v = v0;
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let mut w = project(&op(&v));
        let norm = crate::image::norm2(&w);
        if norm == 0.0 {
            return 0.0;
        }
        for p in w.pixels_mut() {
            *p /= norm;
        }
        let wv = op(&w);
        let new_lambda = crate::image::inner_images(&wv, &w).unwrap();
        let done = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1.0);
        lambda = new_lambda;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

/// Extreme Rayleigh quotients of the frame operator restricted (by
/// projection) to a caller-supplied subspace.
pub fn empirical_bounds_with_projector(
    s: &SamplingSet,
    cfg: &TransformConfig,
    p: usize,
    n_samples: usize,
    project: &dyn Fn(&Image) -> Image,
    make_start: &dyn Fn(u64) -> Image,
    subspace: String,
) -> EmpiricalBounds {
    assert!(n_samples >= 1);
    let op = |f: &Image| frame_apply(f, s, cfg);
    let _ = p;
    let mut lambda_max = f64::NEG_INFINITY;
    for k in 0..n_samples {
        let v0 = project(&make_start(k as u64));
        let l = power_iteration(&op, project, v0, 100, 1e-6);
        lambda_max = lambda_max.max(l);
    }
    // largest eigenvalue of λ_max·I − S on the subspace gives the smallest
    // eigenvalue of S there
    let shifted = |f: &Image| {
        let sf = frame_apply(f, s, cfg);
        let mut out = f.clone();
        for (o, (fp, sp)) in out
            .pixels_mut()
            .iter_mut()
            .zip(f.pixels().iter().zip(sf.pixels()))
        {
            *o = lambda_max * fp - sp;
        }
        out
    };
    let mut mu_max = f64::NEG_INFINITY;
    for k in 0..n_samples {
        let v0 = project(&make_start(1000 + k as u64));
        let mu = power_iteration(&shifted, project, v0, 100, 1e-6);
        mu_max = mu_max.max(mu);
    }
    EmpiricalBounds {
        lambda_min: (lambda_max - mu_max).max(0.0),
        lambda_max,
        n_samples,
        subspace,
    }
}

/// Extreme Rayleigh quotients over the band-limited subspace with DFT bins
/// inside `band_fraction` of the lattice extent.
pub fn empirical_bounds(
    s: &SamplingSet,
    cfg: &TransformConfig,
    p: usize,
    n_samples: usize,
    band_fraction: f64,
) -> EmpiricalBounds {
    let k_band = ((band_fraction * p as f64 / 2.0).floor() as i32).clamp(1, p as i32 / 2 - 1);
    empirical_bounds_with_projector(
        s,
        cfg,
        p,
        n_samples,
        &|f| band_project(f, k_band),
        &|seed| random_band_limited(p, band_fraction, 0x5eed ^ seed),
        format!("DFT bins within [-{k_band}, {k_band}]^2 on a {p}x{p} grid"),
    )
}

/// Rayleigh quotient `Σ|c|²/‖f‖²` of a single image; exposed for tests and
/// the CLI report.
pub fn rayleigh_quotient(f: &Image, s: &SamplingSet, cfg: &TransformConfig) -> f64 {
    rayleigh(f, s, cfg)
}
