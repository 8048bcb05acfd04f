//! Run configuration shared by the CLI commands: defaults, a flat
//! `key=value` config file, and the translation into module-level types.

use std::path::Path;
use thiserror::Error;

use crate::spectrum::Interpolation;
use crate::transform::TransformConfig;
use crate::window::Window;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad config line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("bad value for {key}: {value}")]
    BadValue { key: String, value: String },
    #[error("unknown key {0}")]
    UnknownKey(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub window_kind: String,
    pub window_scale: f64,
    /// Lattice extents; `None` defaults to image_side/2 at use time.
    pub m: Option<i32>,
    pub n: Option<i32>,
    pub translation_step: f64,
    pub k_max: i32,
    pub oversampling: usize,
    pub cg_tolerance: f64,
    pub cg_max_iterations: usize,
    pub seeds: Vec<u64>,
    pub output_dir: String,
    pub exact: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window_kind: "sincpow4".into(),
            window_scale: 16.0,
            m: None,
            n: None,
            translation_step: 4.0,
            k_max: 5,
            oversampling: 8,
            cg_tolerance: 1e-6,
            cg_max_iterations: 500,
            seeds: vec![0],
            output_dir: ".".into(),
            exact: false,
        }
    }
}

impl RunConfig {
    pub fn window(&self) -> Result<Window, ConfigError> {
        match self.window_kind.as_str() {
            "sincpow4" => Ok(Window::sinc_pow4(self.window_scale)),
            "box" => Ok(Window::box_indicator(self.window_scale)),
            other => Err(ConfigError::BadValue {
                key: "window".into(),
                value: other.into(),
            }),
        }
    }

    pub fn transform_config(&self) -> Result<TransformConfig, ConfigError> {
        Ok(TransformConfig {
            window: self.window()?,
            oversampling: self.oversampling,
            fast_path: !self.exact,
            cg_tolerance: self.cg_tolerance,
            cg_max_iterations: self.cg_max_iterations,
            interpolation: Interpolation::Bicubic,
        })
    }

    pub fn lattice_extents(&self, width: usize, height: usize) -> (i32, i32) {
        (
            self.m.unwrap_or(width as i32 / 2),
            self.n.unwrap_or(height as i32 / 2),
        )
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |key: &str, value: &str| ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
        };
        match key {
            "window" => self.window_kind = value.to_string(),
            "window_scale" => {
                self.window_scale = value.parse().map_err(|_| bad(key, value))?
            }
            "m" => self.m = Some(value.parse().map_err(|_| bad(key, value))?),
            "n" => self.n = Some(value.parse().map_err(|_| bad(key, value))?),
            "translation_step" => {
                self.translation_step = value.parse().map_err(|_| bad(key, value))?
            }
            "k_max" => self.k_max = value.parse().map_err(|_| bad(key, value))?,
            "oversampling" => {
                self.oversampling = value.parse().map_err(|_| bad(key, value))?
            }
            "cg_tolerance" => {
                self.cg_tolerance = value.parse().map_err(|_| bad(key, value))?
            }
            "cg_max_iterations" => {
                self.cg_max_iterations = value.parse().map_err(|_| bad(key, value))?
            }
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| bad(key, value))?
            }
            "output_dir" => self.output_dir = value.to_string(),
            "exact" => self.exact = value.parse().map_err(|_| bad(key, value))?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Parses `key=value` lines; `#` starts a comment, blank lines allowed.
    pub fn merge_file(&mut self, path: impl AsRef<Path>) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::BadLine {
                line: lineno + 1,
                reason: "expected key=value".into(),
            })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }
}
