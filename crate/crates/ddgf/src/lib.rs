//! Discrete directional Gabor frames for 2-D images.
//!
//! Atoms are Gabor-modulated ridge functions `exp(2πi a·x/P) g(u·x − n)`
//! built from a 1-D window `g`, a coprime direction set, and a finite
//! translation grid. The crate provides the analysis/synthesis operators,
//! conjugate-gradient inversion of the frame operator, theoretical and
//! empirical frame bounds, verification routines for the structural
//! theorems behind the construction, and compression/denoising pipelines
//! with an undecimated Haar baseline.

pub mod apps;
pub mod bounds;
pub mod coeff_file;
pub mod config;
pub mod haar;
pub mod image;
pub mod sampling;
pub mod spectrum;
pub mod theory;
pub mod transform;
pub mod window;

pub use image::{GridMap, Image};
pub use sampling::SamplingSet;
pub use transform::{CoefficientSet, TransformConfig};
pub use window::Window;
