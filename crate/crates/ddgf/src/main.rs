//! Command-line interface: transform, reconstruct, compress, denoise,
//! bounds and verify subcommands over PGM images and `.ddgf` coefficient
//! files. Exit codes: 0 success, 1 numerical failure, 2 I/O failure,
//! 3 bad configuration.

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ddgf::apps;
use ddgf::bounds;
use ddgf::coeff_file;
use ddgf::config::RunConfig;
use ddgf::image::{load_pgm, save_pgm, Image};
use ddgf::sampling::build_sampling_set;
use ddgf::theory;
use ddgf::transform;

#[derive(Parser)]
#[command(name = "ddgf", about = "Directional Gabor frame transforms for 2-D images")]
struct Cli {
    /// Cap the worker thread count (overrides DDGF_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Flat key=value config file; explicit flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Lattice extent M (default: width/2).
    #[arg(long)]
    m: Option<i32>,
    /// Lattice extent N (default: height/2).
    #[arg(long)]
    n: Option<i32>,
    /// Translation spacing in pixels.
    #[arg(long)]
    step: Option<f64>,
    /// Translation index bound; 0 selects the non-redundant system.
    #[arg(long)]
    k_max: Option<i32>,
    /// Zero-padding factor for the fast path.
    #[arg(long)]
    oversampling: Option<usize>,
    /// Window kind: sincpow4 or box.
    #[arg(long)]
    window: Option<String>,
    #[arg(long)]
    window_scale: Option<f64>,
    /// Use the direct (spatial-sum) path instead of the fast path.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    cg_tolerance: Option<f64>,
    #[arg(long)]
    cg_max_iterations: Option<usize>,
}

impl CommonOpts {
    fn merge_into(&self, cfg: &mut RunConfig) {
        if let Some(m) = self.m {
            cfg.m = Some(m);
        }
        if let Some(n) = self.n {
            cfg.n = Some(n);
        }
        if let Some(step) = self.step {
            cfg.translation_step = step;
        }
        if let Some(k) = self.k_max {
            cfg.k_max = k;
        }
        if let Some(q) = self.oversampling {
            cfg.oversampling = q;
        }
        if let Some(w) = &self.window {
            cfg.window_kind = w.clone();
        }
        if let Some(s) = self.window_scale {
            cfg.window_scale = s;
        }
        if self.exact {
            cfg.exact = true;
        }
        if let Some(t) = self.cg_tolerance {
            cfg.cg_tolerance = t;
        }
        if let Some(it) = self.cg_max_iterations {
            cfg.cg_max_iterations = it;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze an image into a coefficient file.
    Transform {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Invert a coefficient file back into an image.
    Reconstruct {
        input: PathBuf,
        output: PathBuf,
        /// Output image width (default: 2M from the file).
        #[arg(long)]
        width: Option<usize>,
        /// Output image height (default: 2N from the file).
        #[arg(long)]
        height: Option<usize>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Hard-threshold compression sweep with reconstruction error report.
    Compress {
        input: PathBuf,
        /// Comma-separated discard levels.
        #[arg(long, default_value = "0.90,0.96,0.98,0.99")]
        levels: String,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Threshold-sweep denoising of a noisy copy of the input.
    Denoise {
        input: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        sigma2: f64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        output_dir: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print theoretical/empirical frame bounds as CSV.
    Bounds {
        /// kadec, bessel, or main.
        kind: String,
        #[arg(long, default_value_t = 0.0)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long)]
        window_scale: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite: parseval, slice, annihilate, or bessel.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 32)]
        size: usize,
    },
}

enum CliError {
    Numerical(String),
    Io(String),
    Config(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Numerical(m) | CliError::Io(m) | CliError::Config(m) => m,
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> CliError {
    CliError::Io(e.to_string())
}

fn cfg_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// 17-significant-digit float formatting for reproducible CSV diffs.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_csv(path: &Path, rows: &[(String, String, String)]) -> Result<(), CliError> {
    let mut text = String::from("method,parameter,value\n");
    for (m, p, v) in rows {
        text.push_str(&format!("{m},{p},{v}\n"));
    }
    std::fs::write(path, text).map_err(io_err)
}

fn load_input(path: &Path) -> Result<Image, CliError> {
    load_pgm(path).map_err(io_err)
}

fn build_set(cfg: &RunConfig, width: usize, height: usize) -> ddgf::SamplingSet {
    let (m, n) = cfg.lattice_extents(width, height);
    build_sampling_set(m, n, cfg.translation_step, cfg.k_max)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.merge_file(path).map_err(cfg_err)?;
    }
    match cli.command {
        Command::Transform { input, output, common } => {
            common.merge_into(&mut cfg);
            let img = load_input(&input)?;
            let s = build_set(&cfg, img.width(), img.height());
            let tc = cfg.transform_config().map_err(cfg_err)?;
            let coeffs = transform::analyze(&img, &s, &tc);
            coeff_file::write_coefficients(&coeffs, &output).map_err(io_err)?;
            println!(
                "wrote {} entries, l2 energy {}",
                coeffs.values.len(),
                fmt17(coeffs.energy().sqrt())
            );
        }
        Command::Reconstruct { input, output, width, height, common } => {
            common.merge_into(&mut cfg);
            let coeffs = coeff_file::read_coefficients(&input).map_err(io_err)?;
            let w = width.unwrap_or(2 * coeffs.sampling.m_extent as usize);
            let h = height.unwrap_or(2 * coeffs.sampling.n_extent as usize);
            if w < 2 || h < 2 || w % 2 != 0 || h % 2 != 0 {
                return Err(CliError::Config(format!("bad output dimensions {w}x{h}")));
            }
            let tc = cfg.transform_config().map_err(cfg_err)?;
            let grid = ddgf::GridMap::new(w, h);
            let r = transform::reconstruct(&coeffs, &coeffs.sampling.clone(), &tc, &grid);
            if !r.converged {
                eprintln!(
                    "warning: CG stopped at relative residual {} after {} iterations",
                    r.relative_residual, r.iterations
                );
            }
            save_pgm(&r.solution, &output).map_err(io_err)?;
            println!("reconstructed {w}x{h} image, CG iterations {}", r.iterations);
        }
        Command::Compress { input, levels, output_dir, common } => {
            common.merge_into(&mut cfg);
            let img = load_input(&input)?;
            let levels: Vec<f64> = levels
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(cfg_err)?;
            if levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
                return Err(CliError::Config("levels must lie in [0,1]".into()));
            }
            let s = build_set(&cfg, img.width(), img.height());
            let tc = cfg.transform_config().map_err(cfg_err)?;
            let (report, images) = apps::compress(&img, &s, &tc, &levels, "ddgf");
            std::fs::create_dir_all(&output_dir).map_err(io_err)?;
            let mut rows = Vec::new();
            for (k, &level) in report.levels.iter().enumerate() {
                rows.push((
                    report.method.clone(),
                    format!("relative_error@{level}"),
                    fmt17(report.relative_errors[k]),
                ));
                if !report.cg_converged[k] {
                    rows.push((report.method.clone(), format!("cg_nonconverged@{level}"), "1".into()));
                }
                save_pgm(&images[k], output_dir.join(format!("compressed_{level}.pgm")))
                    .map_err(io_err)?;
            }
            write_csv(&output_dir.join("compress_report.csv"), &rows)?;
            println!("compression report for {} levels written", levels.len());
        }
        Command::Denoise { input, sigma2, trials, seed, output_dir, common } => {
            common.merge_into(&mut cfg);
            if trials == 0 {
                return Err(CliError::Config("trials must be at least 1".into()));
            }
            let img = load_input(&input)?;
            let s = build_set(&cfg, img.width(), img.height());
            let tc = cfg.transform_config().map_err(cfg_err)?;
            let sweep = apps::default_sweep();
            let report = apps::denoise(&img, &s, &tc, sigma2, trials, &sweep, seed);
            std::fs::create_dir_all(&output_dir).map_err(io_err)?;
            let mut rows = vec![(
                "noisy".to_string(),
                "mean_psnr".to_string(),
                fmt17(report.mean_noisy_psnr),
            )];
            for (k, &fr) in report.sweep.iter().enumerate() {
                rows.push(("hard".into(), format!("psnr@{fr}"), fmt17(report.mean_psnr_hard[k])));
                rows.push(("soft".into(), format!("psnr@{fr}"), fmt17(report.mean_psnr_soft[k])));
            }
            rows.push((
                format!("best_{}", report.best.1),
                format!("psnr@{}", report.best.0),
                fmt17(report.best.2),
            ));
            write_csv(&output_dir.join("denoise_report.csv"), &rows)?;
            // one representative denoised image at the best grid point
            let noisy = apps::add_noise(&img, sigma2, seed);
            let coeffs = transform::analyze(&noisy, &s, &tc);
            let kept = apps::threshold(&coeffs, 1.0 - report.best.0, report.best.1);
            let r = transform::reconstruct(&kept, &s, &tc, &img.grid());
            save_pgm(&r.solution, output_dir.join("denoised_best.pgm")).map_err(io_err)?;
            println!(
                "best: {} thresholding at {} -> mean PSNR {:.3} (noisy {:.3})",
                report.best.1, report.best.0, report.best.2, report.mean_noisy_psnr
            );
        }
        Command::Bounds {
            kind,
            l,
            d,
            a,
            b,
            perturbation,
            rho,
            omega,
            window_scale,
            output,
        } => {
            let rows = match kind.as_str() {
                "kadec" => {
                    let (ka, kb) = bounds::kadec_bounds(l, d)
                        .map_err(|e| CliError::Config(e.to_string()))?;
                    vec![
                        ("kadec".to_string(), "A".to_string(), fmt17(ka)),
                        ("kadec".to_string(), "B".to_string(), fmt17(kb)),
                    ]
                }
                "bessel" => {
                    let (bp, up) = bounds::bessel_perturbation(a, b, perturbation, rho, d)
                        .map_err(|e| CliError::Config(e.to_string()))?;
                    vec![
                        ("bessel".to_string(), "B_prime".to_string(), fmt17(bp)),
                        ("bessel".to_string(), "perturbed_upper".to_string(), fmt17(up)),
                    ]
                }
                "main" => {
                    let w = ddgf::Window::sinc_pow4(window_scale.unwrap_or(16.0));
                    let (ma, mb) = bounds::main_theorem_bounds(&w, omega, d, 1e-10)
                        .map_err(|e| CliError::Numerical(e.to_string()))?;
                    vec![
                        ("main".to_string(), "A".to_string(), fmt17(ma)),
                        ("main".to_string(), "B".to_string(), fmt17(mb)),
                    ]
                }
                other => {
                    return Err(CliError::Config(format!("unknown bounds kind {other:?}")))
                }
            };
            match output {
                Some(path) => write_csv(&path, &rows)?,
                None => {
                    println!("method,parameter,value");
                    for (m, p, v) in &rows {
                        println!("{m},{p},{v}");
                    }
                }
            }
        }
        Command::Verify { suite, size } => {
            if size < 8 || size % 2 != 0 {
                return Err(CliError::Config(format!("bad verification size {size}")));
            }
            let failures = run_verify(&suite, size)?;
            if failures > 0 {
                return Err(CliError::Numerical(format!("{failures} check(s) failed")));
            }
        }
    }
    Ok(())
}

fn check(name: &str, ok: bool, detail: String) -> usize {
    println!("{}: {name} ({detail})", if ok { "PASS" } else { "FAIL" });
    usize::from(!ok)
}

fn run_verify(suite: &str, size: usize) -> Result<usize, CliError> {
    use rand::{Rng, SeedableRng};
    let mut failures = 0;
    match suite {
        "parseval" => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let mut f = Image::zeros(size, size);
                let grid = f.grid();
                for j in 0..size {
                    for i in 0..size {
                        let (x, y) = grid.coord(i, j);
                        if (x * x + y * y).sqrt() <= size as f64 / 4.0 {
                            f.set(i, j, rng.gen_range(-1.0..1.0));
                        }
                    }
                }
                let ratio = theory::verify_toy_parseval(&f)
                    .map_err(|e| CliError::Numerical(e.to_string()))?;
                worst = worst.max((ratio - 1.0).abs());
            }
            failures += check("toy parseval ratio", worst <= 1e-10, format!("max |ratio-1| = {worst:.3e}"));
        }
        "slice" => {
            let f = bounds::random_band_limited(size, 0.4, 11);
            let axis = theory::verify_fourier_slice(&f, (1.0, 0.0)).max_relative_deviation;
            failures += check("axis slice", axis <= 1e-6, format!("deviation {axis:.3e}"));
            let oblique = theory::verify_fourier_slice(&f, (0.6, 0.8)).max_relative_deviation;
            failures += check("oblique slice", oblique <= 0.05, format!("deviation {oblique:.3e}"));
        }
        "annihilate" => {
            let dirs = [(1.0, 0.0), (0.6, 0.8), (-0.8, 0.6)];
            let r = theory::annihilated_function(&dirs, size.max(64), 1.25).1.residual_ratio;
            failures += check("annihilated residual", r <= 1e-3, format!("ratio {r:.3e}"));
        }
        "bessel" => {
            let seq = theory::unbounded_bessel_demo(100);
            let norms_ok = seq.windows(2).all(|w| w[1].0 < w[0].0);
            failures += check("norms strictly decreasing", norms_ok, format!("{} terms", seq.len()));
            let coeff_min = seq.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            failures += check("coefficients bounded below", coeff_min >= 0.9, format!("min {coeff_min:.4}"));
            let shrink = seq[0].0 / seq[99].0;
            failures += check("norm shrink factor", shrink >= 10.0, format!("{shrink:.3}x"));
        }
        other => return Err(CliError::Config(format!("unknown suite {other:?}"))),
    }
    Ok(failures)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("DDGF_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads {
        if t == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(3);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: could not configure thread pool: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
