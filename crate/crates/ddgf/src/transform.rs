//! Analysis and synthesis operators for the directional Gabor system, the
//! frame operator, and its conjugate-gradient inversion.
//!
//! The reference semantics is the spatial sum `values[e] = ⟨f, atom(e)⟩`
//! (`analyze_direct`). The fast path evaluates the same coefficients
//! through the Fourier-slice identity: a zero-padded spectrum is sampled
//! along the ray through each lattice point and integrated against `ĝ` by
//! the trapezoid rule. Synthesis on either path is the exact adjoint of
//! the corresponding analysis map, so the frame operator is symmetric
//! positive semidefinite by construction and safe to invert with CG.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::image::{Field, GridMap, Image};
use crate::sampling::{DirectionModulation, LatticePoint, SamplingSet};
use crate::spectrum::{Interpolation, SpectrumPlan};
use crate::window::Window;

/// Number of fixed partitions used when scattering in parallel; the
/// partition (and hence the floating-point reduction order) does not
/// depend on the worker count.
const SCATTER_CHUNKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformConfig {
    pub window: Window,
    /// Zero-padding factor q for the fast path's frequency grid.
    pub oversampling: usize,
    pub fast_path: bool,
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
    pub interpolation: Interpolation,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            window: Window::sinc_pow4(16.0),
            oversampling: 8,
            fast_path: true,
            cg_tolerance: 1e-6,
            cg_max_iterations: 500,
            interpolation: Interpolation::Bicubic,
        }
    }
}

/// Complex analysis coefficients in the sampling set's canonical order.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub sampling: SamplingSet,
    pub values: Vec<Complex64>,
}

impl CoefficientSet {
    pub fn zeros(sampling: SamplingSet) -> Self {
        let n = sampling.entry_count();
        CoefficientSet { sampling, values: vec![Complex64::default(); n] }
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// The directional Gabor atom `exp(2πi(a₁x/P_x + a₂y/P_y))·g(u·x − n)`
/// evaluated over the whole grid.
pub fn atom(a: LatticePoint, n: f64, window: &Window, grid: &GridMap) -> Field {
    let dm = DirectionModulation::from_lattice_point(a);
    let mut field = Field::zeros(grid.width, grid.height);
    let (px, py) = (grid.width as f64, grid.height as f64);
    for j in 0..grid.height {
        for i in 0..grid.width {
            let (x, y) = grid.coord(i, j);
            let phase = 2.0 * PI * (a.a1 as f64 * x / px + a.a2 as f64 * y / py);
            let ridge = window.eval_spatial(dm.u.0 * x + dm.u.1 * y - n);
            field.values[j * grid.width + i] = Complex64::from_polar(ridge, phase);
        }
    }
    field
}

/// Reference analysis: plain spatial inner products against every atom.
pub fn analyze_direct(f: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> CoefficientSet {
    let grid = f.grid();
    let ntrans = sampling.translations.len();
    let mut coeffs = CoefficientSet::zeros(sampling.clone());
    let (px, py) = (grid.width as f64, grid.height as f64);
    coeffs
        .values
        .par_chunks_mut(ntrans)
        .zip(sampling.lattice.par_iter())
        .for_each(|(block, &a)| {
            let dm = DirectionModulation::from_lattice_point(a);
            let mut acc = vec![Complex64::default(); ntrans];
            for j in 0..grid.height {
                for i in 0..grid.width {
                    let fp = f.get(i, j);
                    if fp == 0.0 {
                        continue;
                    }
                    let (x, y) = grid.coord(i, j);
                    let phase = -2.0 * PI * (a.a1 as f64 * x / px + a.a2 as f64 * y / py);
                    let mode = fp * Complex64::from_polar(1.0, phase);
                    let t = dm.u.0 * x + dm.u.1 * y;
                    for (k, &n) in sampling.translations.iter().enumerate() {
                        acc[k] += mode * cfg.window.eval_spatial(t - n);
                    }
                }
            }
            block.copy_from_slice(&acc);
        });
    coeffs
}

/// Exact adjoint of [`analyze_direct`]: `Σ_e values[e]·atom(e)`.
pub fn synthesize_direct(
    coeffs: &CoefficientSet,
    cfg: &TransformConfig,
    grid: &GridMap,
) -> Field {
    let sampling = &coeffs.sampling;
    let ntrans = sampling.translations.len();
    let (px, py) = (grid.width as f64, grid.height as f64);
    let partials: Vec<Vec<Complex64>> = chunk_ranges(sampling.lattice.len(), SCATTER_CHUNKS)
        .into_par_iter()
        .map(|range| {
            let mut local = vec![Complex64::default(); grid.width * grid.height];
            for ai in range {
                let a = sampling.lattice[ai];
                let dm = DirectionModulation::from_lattice_point(a);
                let block = &coeffs.values[ai * ntrans..(ai + 1) * ntrans];
                for j in 0..grid.height {
                    for i in 0..grid.width {
                        let (x, y) = grid.coord(i, j);
                        let phase = 2.0 * PI * (a.a1 as f64 * x / px + a.a2 as f64 * y / py);
                        let t = dm.u.0 * x + dm.u.1 * y;
                        let mut ridge_sum = Complex64::default();
                        for (k, &n) in sampling.translations.iter().enumerate() {
                            ridge_sum += block[k] * cfg.window.eval_spatial(t - n);
                        }
                        local[j * grid.width + i] += ridge_sum * Complex64::from_polar(1.0, phase);
                    }
                }
            }
            local
        })
        .collect();
    let mut field = Field::zeros(grid.width, grid.height);
    for local in &partials {
        for (dst, src) in field.values.iter_mut().zip(local.iter()) {
            *dst += src;
        }
    }
    field
}

fn chunk_ranges(len: usize, chunks: usize) -> Vec<std::ops::Range<usize>> {
    let size = len.div_ceil(chunks.max(1));
    (0..len)
        .step_by(size.max(1))
        .map(|start| start..(start + size).min(len))
        .collect()
}

/// Quadrature nodes over `supp ĝ` with spacing at most `1/(q·P)`.
struct RayQuadrature {
    nodes: Vec<f64>,
    /// Trapezoid weights, halved at the endpoints.
    weights: Vec<f64>,
}

impl RayQuadrature {
    fn new(halfwidth: f64, oversampling: usize, p_max: usize) -> Self {
        let steps = (2.0 * halfwidth * (oversampling * p_max) as f64).ceil() as usize;
        let steps = steps.max(2);
        let h = 2.0 * halfwidth / steps as f64;
        let nodes: Vec<f64> = (0..=steps).map(|t| -halfwidth + t as f64 * h).collect();
        let mut weights = vec![h; steps + 1];
        weights[0] = h / 2.0;
        weights[steps] = h / 2.0;
        RayQuadrature { nodes, weights }
    }
}

pub struct FastAnalysis {
    pub coeffs: CoefficientSet,
    /// Set when the window's frequency support is unbounded and the direct
    /// path was used instead.
    pub fell_back: bool,
}

/// Fourier-slice analysis; falls back to the direct path for windows
/// without compact frequency support.
pub fn analyze_fast(f: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> FastAnalysis {
    let Some(hw) = cfg.window.freq_support_halfwidth() else {
        return FastAnalysis { coeffs: analyze_direct(f, sampling, cfg), fell_back: true };
    };
    let (px, py) = (f.width(), f.height());
    let plan = SpectrumPlan::new(px, py, cfg.oversampling);
    let spec = plan.forward(f);
    let quad = RayQuadrature::new(hw, cfg.oversampling, px.max(py));
    let ntrans = sampling.translations.len();
    let mut coeffs = CoefficientSet::zeros(sampling.clone());
    coeffs
        .values
        .par_chunks_mut(ntrans)
        .zip(sampling.lattice.par_iter())
        .for_each(|(block, &a)| {
            let dm = DirectionModulation::from_lattice_point(a);
            let mut acc = vec![Complex64::default(); ntrans];
            for (&gamma, &w) in quad.nodes.iter().zip(quad.weights.iter()) {
                let gw = cfg.window.eval_frequency(gamma);
                if gw == 0.0 {
                    continue;
                }
                let xi_x = a.a1 as f64 / px as f64 - gamma * dm.u.0;
                let xi_y = a.a2 as f64 / py as f64 - gamma * dm.u.1;
                let r = w * gw * spec.sample(cfg.interpolation, xi_x, xi_y);
                for (k, &n) in sampling.translations.iter().enumerate() {
                    acc[k] += r * Complex64::from_polar(1.0, -2.0 * PI * gamma * n);
                }
            }
            block.copy_from_slice(&acc);
        });
    FastAnalysis { coeffs, fell_back: false }
}

/// Exact adjoint of [`analyze_fast`] under the same configuration.
pub fn synthesize_fast(coeffs: &CoefficientSet, cfg: &TransformConfig, grid: &GridMap) -> Field {
    let Some(hw) = cfg.window.freq_support_halfwidth() else {
        return synthesize_direct(coeffs, cfg, grid);
    };
    let sampling = &coeffs.sampling;
    let (px, py) = (grid.width, grid.height);
    let plan = SpectrumPlan::new(px, py, cfg.oversampling);
    let quad = RayQuadrature::new(hw, cfg.oversampling, px.max(py));
    let ntrans = sampling.translations.len();
    let partials: Vec<_> = chunk_ranges(sampling.lattice.len(), SCATTER_CHUNKS)
        .into_par_iter()
        .map(|range| {
            let mut acc = plan.empty_accumulator();
            for ai in range {
                let a = sampling.lattice[ai];
                let dm = DirectionModulation::from_lattice_point(a);
                let block = &coeffs.values[ai * ntrans..(ai + 1) * ntrans];
                for (&gamma, &w) in quad.nodes.iter().zip(quad.weights.iter()) {
                    let gw = cfg.window.eval_frequency(gamma);
                    if gw == 0.0 {
                        continue;
                    }
                    let mut s = Complex64::default();
                    for (k, &n) in sampling.translations.iter().enumerate() {
                        s += block[k] * Complex64::from_polar(1.0, 2.0 * PI * gamma * n);
                    }
                    let xi_x = a.a1 as f64 / px as f64 - gamma * dm.u.0;
                    let xi_y = a.a2 as f64 / py as f64 - gamma * dm.u.1;
                    acc.deposit(cfg.interpolation, xi_x, xi_y, w * gw * s);
                }
            }
            acc
        })
        .collect();
    let mut merged = plan.empty_accumulator();
    for p in &partials {
        merged.merge(p);
    }
    let values = plan.adjoint(merged);
    Field { width: px, height: py, values }
}

fn use_fast(cfg: &TransformConfig) -> bool {
    cfg.fast_path && cfg.window.freq_support_halfwidth().is_some()
}

/// Path dispatch: fast when enabled and applicable, otherwise direct.
pub fn analyze(f: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> CoefficientSet {
    if use_fast(cfg) {
        analyze_fast(f, sampling, cfg).coeffs
    } else {
        analyze_direct(f, sampling, cfg)
    }
}

pub fn synthesize(coeffs: &CoefficientSet, cfg: &TransformConfig, grid: &GridMap) -> Field {
    if use_fast(cfg) {
        synthesize_fast(coeffs, cfg, grid)
    } else {
        synthesize_direct(coeffs, cfg, grid)
    }
}

/// The frame operator `S = T*T` (real part; the imaginary residue from the
/// conjugate-symmetric coefficient structure is negligible for real input).
pub fn frame_apply(f: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> Image {
    frame_apply_field(f, sampling, cfg).real_part()
}

pub fn frame_apply_field(f: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> Field {
    let coeffs = analyze(f, sampling, cfg);
    synthesize(&coeffs, cfg, &f.grid())
}

#[derive(Debug, Clone)]
pub struct CgResult {
    pub solution: Image,
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Conjugate-gradient solve of `frame_apply(x) = y` to the configured
/// relative residual. A non-converged result is returned (flagged) rather
/// than treated as an error.
pub fn invert_frame(y: &Image, sampling: &SamplingSet, cfg: &TransformConfig) -> CgResult {
    let n = y.pixels().len();
    let b_norm = crate::image::norm2(y);
    if b_norm == 0.0 {
        return CgResult {
            solution: Image::zeros(y.width(), y.height()),
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = y.pixels().to_vec();
    let mut p = r.clone();
    let mut rs_old: f64 = r.iter().map(|v| v * v).sum();
    let mut iterations = 0;
    while iterations < cfg.cg_max_iterations {
        if rs_old.sqrt() / b_norm <= cfg.cg_tolerance {
            break;
        }
        let p_img = Image::new(y.width(), y.height(), p.clone()).expect("finite CG iterate");
        let ap = frame_apply(&p_img, sampling, cfg);
        let pap: f64 = p.iter().zip(ap.pixels()).map(|(a, b)| a * b).sum();
        if pap.abs() < f64::MIN_POSITIVE {
            break;
        }
        let alpha = rs_old / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap.pixels()[i];
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rs_new / rs_old;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rs_old = rs_new;
        iterations += 1;
    }
    let relative_residual = rs_old.sqrt() / b_norm;
    CgResult {
        solution: Image::new(y.width(), y.height(), x).expect("finite CG solution"),
        iterations,
        relative_residual,
        converged: relative_residual <= cfg.cg_tolerance,
    }
}

/// Reconstruction from coefficients: `invert_frame(Re T*c)`.
pub fn reconstruct(
    coeffs: &CoefficientSet,
    sampling: &SamplingSet,
    cfg: &TransformConfig,
    grid: &GridMap,
) -> CgResult {
    let y = synthesize(coeffs, cfg, grid).real_part();
    invert_frame(&y, sampling, cfg)
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    /// Spatial energy map `Σ_n |g(u·x − n)|²`, averaged over the sampled
    /// directions, row-major.
    pub map: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

impl CoverageReport {
    pub fn min_max_ratio(&self) -> f64 {
        if self.max == 0.0 {
            0.0
        } else {
            self.min / self.max
        }
    }
}

/// Diagnoses how well the translation grid covers the image spatially.
pub fn coverage_diagnostic(
    sampling: &SamplingSet,
    cfg: &TransformConfig,
    grid: &GridMap,
) -> CoverageReport {
    let basis = &sampling.direction_basis;
    let stride = basis.len().div_ceil(16).max(1);
    let dirs: Vec<_> = basis
        .iter()
        .step_by(stride)
        .map(|&a| DirectionModulation::from_lattice_point(a).u)
        .collect();
    let mut map = vec![0.0; grid.width * grid.height];
    for j in 0..grid.height {
        for i in 0..grid.width {
            let (x, y) = grid.coord(i, j);
            let mut total = 0.0;
            for &(u1, u2) in &dirs {
                let t = u1 * x + u2 * y;
                for &n in &sampling.translations {
                    let g = cfg.window.eval_spatial(t - n);
                    total += g * g;
                }
            }
            map[j * grid.width + i] = total / dirs.len() as f64;
        }
    }
    let min = map.iter().copied().fold(f64::INFINITY, f64::min);
    let max = map.iter().copied().fold(0.0, f64::max);
    CoverageReport { map, min, max }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{inner, norm2, relative_error};
    use crate::sampling::build_sampling_set;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(p: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Image::new(p, p, (0..p * p).map(|_| rng.gen_range(-0.5..0.5)).collect()).unwrap()
    }

    fn box_cfg(halfwidth: f64) -> TransformConfig {
        TransformConfig {
            window: Window::box_indicator(halfwidth),
            fast_path: false,
            ..TransformConfig::default()
        }
    }

    #[test]
    fn dc_atom_is_real_window_profile() {
        let grid = GridMap::new(8, 8);
        let cfg = TransformConfig::default();
        let a = atom(LatticePoint::new(0, 0), 0.0, &cfg.window, &grid);
        for j in 0..8 {
            for i in 0..8 {
                let v = a.values[j * 8 + i];
                assert_eq!(v.im, 0.0);
                let (x, _) = grid.coord(i, j);
                assert!((v.re - cfg.window.eval_spatial(x)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn box_atom_is_pure_fourier_mode() {
        let grid = GridMap::new(8, 8);
        let w = Window::box_indicator(8.0);
        let a = atom(LatticePoint::new(1, 0), 0.0, &w, &grid);
        for j in 0..8 {
            for i in 0..8 {
                let (x, _) = grid.coord(i, j);
                let want = Complex64::from_polar(1.0, 2.0 * PI * x / 8.0);
                assert!((a.values[j * 8 + i] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn atom_modulus_bounded_by_window_peak() {
        let grid = GridMap::new(8, 8);
        let cfg = TransformConfig::default();
        let a = atom(LatticePoint::new(3, -2), 4.0, &cfg.window, &grid);
        assert!(a.values.iter().all(|v| v.norm() <= 1.0 + 1e-15));
    }

    #[test]
    fn direct_analysis_impulse_and_constant() {
        // unit impulse picks out the atom value at that pixel
        let mut f = Image::zeros(8, 8);
        f.set(2, 5, 1.0);
        let s = build_sampling_set(1, 1, 4.0, 0);
        let cfg = TransformConfig { fast_path: false, ..TransformConfig::default() };
        let c = analyze_direct(&f, &s, &cfg);
        let (x, y) = f.grid().coord(2, 5);
        let dc_idx = s.lattice.iter().position(|&a| a == LatticePoint::new(0, 0)).unwrap();
        let want = cfg.window.eval_spatial(x + 0.0 * y);
        assert!((c.values[dc_idx].re - want).abs() < 1e-14);

        // all-ones with a box window that covers the domain: plain sum
        let ones = Image::new(8, 8, vec![1.0; 64]).unwrap();
        let c = analyze_direct(&ones, &s, &box_cfg(8.0));
        assert!((c.values[dc_idx] - Complex64::new(64.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn nonredundant_box_system_is_plain_dft() {
        let p = 8;
        let f = random_image(p, 3);
        let s = crate::sampling::dft_bin_lattice(p, p, 4.0, 0);
        // halfwidth large enough that the box is 1 on the whole grid for
        // every direction
        let c = analyze_direct(&f, &s, &box_cfg(p as f64));
        let grid = f.grid();
        for (idx, (a, _)) in s.entries().enumerate() {
            let mut dft = Complex64::default();
            for j in 0..p {
                for i in 0..p {
                    let (x, y) = grid.coord(i, j);
                    let ph = -2.0 * PI * (a.a1 as f64 * x + a.a2 as f64 * y) / p as f64;
                    dft += f.get(i, j) * Complex64::from_polar(1.0, ph);
                }
            }
            assert!((c.values[idx] - dft).norm() < 1e-10);
        }
    }

    #[test]
    fn analysis_is_linear() {
        let s = build_sampling_set(2, 2, 4.0, 1);
        let cfg = TransformConfig::default();
        let f = random_image(8, 1);
        let h = random_image(8, 2);
        let (alpha, beta) = (0.7, -1.3);
        let combo = Image::new(
            8,
            8,
            f.pixels()
                .iter()
                .zip(h.pixels())
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
        .unwrap();
        let cf = analyze(&f, &s, &cfg);
        let ch = analyze(&h, &s, &cfg);
        let cc = analyze(&combo, &s, &cfg);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..cc.values.len() {
            num += (cc.values[k] - (alpha * cf.values[k] + beta * ch.values[k])).norm_sqr();
            den += cc.values[k].norm_sqr();
        }
        assert!(num.sqrt() <= 1e-12 * den.sqrt());
    }

    #[test]
    fn direct_synthesize_is_exact_adjoint() {
        let s = build_sampling_set(2, 2, 4.0, 1);
        let cfg = TransformConfig { fast_path: false, ..TransformConfig::default() };
        let f = random_image(8, 7);
        let mut c = CoefficientSet::zeros(s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for v in c.values.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let tf = analyze_direct(&f, &s, &cfg);
        let lhs: Complex64 = tf
            .values
            .iter()
            .zip(c.values.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        let back = synthesize_direct(&c, &cfg, &f.grid());
        let rhs = inner(&f, &back).unwrap();
        assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0));
    }

    #[test]
    fn fast_synthesize_is_exact_adjoint_of_fast_analysis() {
        let s = build_sampling_set(4, 4, 4.0, 2);
        let cfg = TransformConfig::default();
        let f = random_image(16, 9);
        let mut c = CoefficientSet::zeros(s.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for v in c.values.iter_mut() {
            *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let tf = analyze_fast(&f, &s, &cfg).coeffs;
        let lhs: Complex64 = tf
            .values
            .iter()
            .zip(c.values.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        let back = synthesize_fast(&c, &cfg, &f.grid());
        let rhs = inner(&f, &back).unwrap();
        assert!(
            (lhs - rhs).norm() <= 1e-10 * lhs.norm().max(1.0),
            "{lhs} vs {rhs}"
        );
    }

    #[test]
    fn synthesize_single_entry_is_that_atom() {
        let s = build_sampling_set(1, 1, 4.0, 0);
        let cfg = TransformConfig { fast_path: false, ..TransformConfig::default() };
        let grid = GridMap::new(8, 8);
        let mut c = CoefficientSet::zeros(s.clone());
        let idx = 4usize; // some fixed entry
        c.values[idx] = Complex64::new(1.0, 0.0);
        let (a, n) = s.entries().nth(idx).unwrap();
        let direct = synthesize_direct(&c, &cfg, &grid);
        let expect = atom(a, n, &cfg.window, &grid);
        for (u, v) in direct.values.iter().zip(expect.values.iter()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn fast_matches_direct_within_tolerance() {
        let s = build_sampling_set(4, 4, 4.0, 2);
        let cfg = TransformConfig::default();
        let f = random_image(16, 21);
        let fast = analyze_fast(&f, &s, &cfg).coeffs;
        let direct = analyze_direct(&f, &s, &cfg);
        let mut num = 0.0;
        let mut den = 0.0;
        for (a, b) in fast.values.iter().zip(direct.values.iter()) {
            num += (a - b).norm_sqr();
            den += b.norm_sqr();
        }
        let dev = (num / den).sqrt();
        assert!(dev <= 1e-3, "relative deviation {dev}");
    }

    #[test]
    fn fast_falls_back_for_box_window() {
        let f = random_image(8, 4);
        let s = build_sampling_set(1, 1, 4.0, 0);
        let out = analyze_fast(&f, &s, &box_cfg(8.0));
        assert!(out.fell_back);
        let direct = analyze_direct(&f, &s, &box_cfg(8.0));
        assert_eq!(out.coeffs.values, direct.values);
    }

    #[test]
    fn analyze_zero_image_gives_zero_coefficients() {
        let f = Image::zeros(16, 16);
        let s = build_sampling_set(2, 2, 4.0, 1);
        let c = analyze(&f, &s, &TransformConfig::default());
        assert!(c.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn frame_operator_is_psd_and_symmetric() {
        let s = build_sampling_set(4, 4, 4.0, 2);
        let cfg = TransformConfig::default();
        let f = random_image(16, 31);
        let h = random_image(16, 32);
        let sf = frame_apply(&f, &s, &cfg);
        let sh = frame_apply(&h, &s, &cfg);
        let quad = crate::image::inner_images(&sf, &f).unwrap();
        assert!(quad >= 0.0);
        let lhs = crate::image::inner_images(&sf, &h).unwrap();
        let rhs = crate::image::inner_images(&f, &sh).unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0));
        // imaginary residue of the frame image stays negligible
        let field = frame_apply_field(&f, &s, &cfg);
        let imag: f64 = field.values.iter().map(|v| v.im * v.im).sum::<f64>().sqrt();
        assert!(imag <= 1e-9 * field.norm2());
        let zero = frame_apply(&Image::zeros(16, 16), &s, &cfg);
        assert_eq!(norm2(&zero), 0.0);
    }

    #[test]
    fn invert_frame_trivial_cases() {
        let s = build_sampling_set(2, 2, 4.0, 1);
        let cfg = TransformConfig::default();
        let zero = Image::zeros(8, 8);
        let r = invert_frame(&zero, &s, &cfg);
        assert!(r.converged && r.iterations == 0 && norm2(&r.solution) == 0.0);

        let y = random_image(8, 5);
        let cfg0 = TransformConfig { cg_max_iterations: 0, ..cfg };
        let r = invert_frame(&y, &s, &cfg0);
        assert!(!r.converged);
    }

    #[test]
    fn frame_round_trip_recovers_input() {
        let s = build_sampling_set(8, 8, 4.0, 3);
        let cfg = TransformConfig::default();
        let f = crate::bounds::random_band_limited(16, 0.5, 77);
        let y = frame_apply(&f, &s, &cfg);
        let r = invert_frame(&y, &s, &cfg);
        assert!(r.converged, "residual {}", r.relative_residual);
        let err = relative_error(&r.solution, &f).unwrap();
        assert!(err <= 1e-4, "round-trip error {err}");
    }

    #[test]
    fn reconstruct_round_trip() {
        let s = build_sampling_set(8, 8, 4.0, 3);
        let cfg = TransformConfig::default();
        let f = crate::bounds::random_band_limited(16, 0.5, 78);
        let c = analyze(&f, &s, &cfg);
        let r = reconstruct(&c, &s, &cfg, &f.grid());
        let err = relative_error(&r.solution, &f).unwrap();
        assert!(err <= 1e-4, "reconstruction error {err}");
    }

    #[test]
    fn coverage_diagnostic_properties() {
        let cfg = TransformConfig::default();
        let s = build_sampling_set(8, 8, 4.0, 5);
        let grid = GridMap::new(32, 32);
        let cov = coverage_diagnostic(&s, &cfg, &grid);
        assert!(cov.min <= cov.max);

        // all-covering box window with a single translation: constant map
        let cfg_box = box_cfg(64.0);
        let s0 = build_sampling_set(2, 2, 4.0, 0);
        let cov = coverage_diagnostic(&s0, &cfg_box, &grid);
        assert!((cov.min_max_ratio() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_scale_coverage_is_poor_near_edges() {
        let cfg = TransformConfig::default();
        let s = build_sampling_set(64, 64, 4.0, 5);
        let grid = GridMap::new(128, 128);
        let cov = coverage_diagnostic(&s, &cfg, &grid);
        assert!(cov.min_max_ratio() < 0.1, "ratio {}", cov.min_max_ratio());
    }
}
