//! Exposure-value arithmetic.
//!
//! Under a linear camera response, changing the exposure by `v` EV
//! multiplies pixel values by `2^v`. This module estimates the properly
//! exposed luminance `L_0EV` from an enhanced luminance map (approach A
//! uses a known EV, approach B anchors the geometric mean to middle
//! gray), rescales it to arbitrary exposure values, and synthesizes
//! clamped LDR exposure stacks from HDR input.

use crate::error::InvalidParam;
use crate::image::{relative_luminance, ExposureStack, LuminanceMap, RgbImage, StackMember};
use thiserror::Error;

/// Middle gray on a zero-to-one scale: the anchor for the geometric mean
/// of a properly exposed scene.
pub const MIDDLE_GRAY: f64 = 0.18;

/// Default luminance floor substituted for zero pixels inside the
/// geometric mean; far below 1/255 quantization.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Default pseudo exposure values in EV units.
pub const DEFAULT_TARGET_EVS: [f64; 3] = [-1.0, 0.0, 1.0];

/// How `L_0EV` is estimated from the enhanced luminance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    /// The input's exposure value is known: `L_0EV = 2^-v * L_c`.
    /// Tracks the camera's own exposure choice, avoiding brightness and
    /// color drift relative to the input.
    A,
    /// No exposure value available: anchor the geometric mean of `L_c`
    /// to middle gray. Enhances contrast in all regions regardless of
    /// how the input was exposed.
    B,
}

impl std::str::FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Approach::A),
            "b" => Ok(Approach::B),
            other => Err(format!("unknown approach '{other}', expected 'a' or 'b'")),
        }
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::A => "a",
            Approach::B => "b",
        })
    }
}

/// Settings for pseudo exposure compensation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureCompConfig {
    pub approach: Approach,
    /// Exposure value of the input image; required for approach A.
    pub known_ev: Option<f64>,
    /// EVs of the pseudo exposures to generate.
    pub target_evs: Vec<f64>,
    /// Luminance floor for the geometric mean.
    pub epsilon: f64,
    /// Geometric-mean anchor used by approach B.
    pub middle_gray: f64,
}

impl Default for ExposureCompConfig {
    fn default() -> Self {
        Self {
            approach: Approach::B,
            known_ev: None,
            target_evs: DEFAULT_TARGET_EVS.to_vec(),
            epsilon: DEFAULT_EPSILON,
            middle_gray: MIDDLE_GRAY,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExposureError {
    #[error("approach A requires a known exposure value")]
    MissingKnownEv,
    #[error("target exposure value list is empty")]
    EmptyTargetEvs,
    #[error("target exposure value {0} is not finite")]
    NonFiniteEv(f64),
    #[error(transparent)]
    InvalidParam(#[from] InvalidParam),
    #[error("degenerate input: image has no positive luminance")]
    DegenerateInput,
}

impl ExposureCompConfig {
    pub fn validate(&self) -> Result<(), ExposureError> {
        if self.target_evs.is_empty() {
            return Err(ExposureError::EmptyTargetEvs);
        }
        for &ev in &self.target_evs {
            if !ev.is_finite() {
                return Err(ExposureError::NonFiniteEv(ev));
            }
        }
        InvalidParam::positive("epsilon", self.epsilon)?;
        InvalidParam::positive("middle_gray", self.middle_gray)?;
        match (self.approach, self.known_ev) {
            (Approach::A, None) => Err(ExposureError::MissingKnownEv),
            (Approach::A, Some(ev)) if !ev.is_finite() => Err(ExposureError::NonFiniteEv(ev)),
            _ => Ok(()),
        }
    }

    /// Runs the configured estimator.
    pub fn estimate_l0(&self, enhanced: &LuminanceMap) -> Result<LuminanceMap, ExposureError> {
        self.validate()?;
        Ok(match self.approach {
            Approach::A => estimate_l0_approach_a(
                enhanced,
                self.known_ev.expect("validate checked presence"),
            ),
            Approach::B => {
                estimate_l0_approach_b(enhanced, self.epsilon, self.middle_gray)
            }
        })
    }
}

/// Approach A: `L_0EV(p) = 2^-v * L_c(p)` for known exposure value `v`.
pub fn estimate_l0_approach_a(enhanced: &LuminanceMap, ev: f64) -> LuminanceMap {
    let scale = (-ev).exp2();
    enhanced.map(|v| scale * v)
}

/// Geometric mean `exp(mean(ln L))`, substituting `ln epsilon` for zero
/// pixels. Summation runs in a fixed left-to-right order.
pub fn geometric_mean(luminance: &LuminanceMap, epsilon: f64) -> f64 {
    assert!(
        epsilon > 0.0 && epsilon.is_finite(),
        "epsilon must be finite and > 0"
    );
    let log_eps = epsilon.ln();
    let mut sum = 0.0f64;
    for &v in luminance.values() {
        sum += if v == 0.0 { log_eps } else { v.ln() };
    }
    (sum / luminance.values().len() as f64).exp()
}

/// Approach B: scale `L_c` so its geometric mean lands on `middle_gray`.
/// An all-zero map stays all-zero (the scale applies to zeros).
pub fn estimate_l0_approach_b(
    enhanced: &LuminanceMap,
    epsilon: f64,
    middle_gray: f64,
) -> LuminanceMap {
    let mean = geometric_mean(enhanced, epsilon);
    let scale = middle_gray / mean;
    enhanced.map(|v| scale * v)
}

/// `L_i(p) = 2^v * L_0EV(p)`: the luminance the image would have had at
/// exposure value `v`.
pub fn apply_ev(l0: &LuminanceMap, ev: f64) -> LuminanceMap {
    let scale = ev.exp2();
    l0.map(|v| scale * v)
}

/// Maps an HDR image to a clamped LDR exposure stack.
///
/// The 0 EV anchor scales the image so the geometric mean of its
/// luminance equals [`MIDDLE_GRAY`]; the member at `v` EV is
/// `clamp(2^v * anchor, [0, 1])` channel-wise, modeling sensor
/// saturation under a linear response. Pre-clamp members satisfy
/// `I_i = 2^{v_i} * I_0EV` exactly.
pub fn synth_exposure_stack(
    hdr: &RgbImage,
    evs: &[f64],
    epsilon: f64,
) -> Result<ExposureStack, ExposureError> {
    if evs.is_empty() {
        return Err(ExposureError::EmptyTargetEvs);
    }
    InvalidParam::positive("epsilon", epsilon)?;
    let luminance = relative_luminance(hdr);
    if !luminance.values().iter().any(|&v| v > 0.0) {
        return Err(ExposureError::DegenerateInput);
    }
    let anchor_scale = MIDDLE_GRAY / geometric_mean(&luminance, epsilon);
    let members = evs
        .iter()
        .map(|&ev| {
            if !ev.is_finite() {
                return Err(ExposureError::NonFiniteEv(ev));
            }
            let scale = anchor_scale * ev.exp2();
            Ok(StackMember {
                ev,
                image: hdr.map(|c| (scale * c).clamp(0.0, 1.0)),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExposureStack::new(members).expect("members share the source dimensions"))
}
