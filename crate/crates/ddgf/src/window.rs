//! The 1-D generator window `g`, its closed-form Fourier transform, and the
//! support checks behind the main frame condition.
//!
//! Two families are supported: `sinc(x/s)^4` (compact frequency support
//! `[−2/s, 2/s]`, Fourier transform `s·β₃(sγ)` with `β₃` the centered cubic
//! B-spline) and the box indicator (compact spatial support). The frequency
//! side is always evaluated by closed form so the support statements are
//! exact rather than tolerance-based.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum WindowError {
    #[error("window has unbounded frequency support; frame hypothesis check is inapplicable")]
    UnboundedFrequencySupport,
}

/// 1-D generator window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    /// `g(x) = sinc(x/scale)^4` with the normalized sinc `sin(πt)/(πt)`.
    SincPow4 { scale: f64 },
    /// Indicator of `[−halfwidth, halfwidth]`, endpoints included.
    BoxIndicator { halfwidth: f64 },
}

/// Normalized sinc, `sin(πt)/(πt)` with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        let pt = std::f64::consts::PI * t;
        pt.sin() / pt
    }
}

/// Centered cubic B-spline (4-fold convolution of the unit box), support `[−2,2]`.
pub fn bspline3(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + a * a * a / 2.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameHypothesesReport {
    /// True iff shifted copies of `supp ĝ` at spacing `1/ω` overlap at most
    /// at a point.
    pub supp_disjoint: bool,
    /// True iff `ĝ` is not identically zero on `[−1/4, 1/4]`.
    pub nonzero_on_quarter: bool,
}

impl Window {
    pub fn sinc_pow4(scale: f64) -> Self {
        assert!(scale > 0.0, "window scale must be positive");
        Window::SincPow4 { scale }
    }

    pub fn box_indicator(halfwidth: f64) -> Self {
        assert!(halfwidth > 0.0, "halfwidth must be positive");
        Window::BoxIndicator { halfwidth }
    }

    /// Half-width of `supp ĝ` in cycles per pixel; `None` when unbounded.
    pub fn freq_support_halfwidth(&self) -> Option<f64> {
        match *self {
            Window::SincPow4 { scale } => Some(2.0 / scale),
            Window::BoxIndicator { .. } => None,
        }
    }

    pub fn eval_spatial(&self, x: f64) -> f64 {
        match *self {
            Window::SincPow4 { scale } => {
                let s = sinc(x / scale);
                s * s * s * s
            }
            Window::BoxIndicator { halfwidth } => {
                if x.abs() <= halfwidth {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Closed-form `ĝ(γ)`, γ in cycles per pixel.
    pub fn eval_frequency(&self, gamma: f64) -> f64 {
        match *self {
            Window::SincPow4 { scale } => scale * bspline3(scale * gamma),
            Window::BoxIndicator { halfwidth } => 2.0 * halfwidth * sinc(2.0 * halfwidth * gamma),
        }
    }

    /// Checks the hypotheses of the main frame condition for translation
    /// spacing `ω` (pixels): shifted frequency supports at spacing `1/ω`
    /// must be essentially disjoint, and `ĝ` must not vanish on `[−1/4,1/4]`.
    pub fn check_frame_hypotheses(&self, omega: f64) -> Result<FrameHypothesesReport, WindowError> {
        assert!(omega > 0.0, "omega must be positive");
        let hw = self
            .freq_support_halfwidth()
            .ok_or(WindowError::UnboundedFrequencySupport)?;
        let supp_disjoint = 2.0 * hw <= 1.0 / omega;
        // ĝ(0) = s·β₃(0) > 0 for the spline family, so the quarter-interval
        // condition reduces to the support reaching 0, which it always does.
        let nonzero_on_quarter = self.eval_frequency(0.0) > 0.0;
        Ok(FrameHypothesesReport { supp_disjoint, nonzero_on_quarter })
    }
}
