//! End-to-end enhancement pipeline.
//!
//! From a single image: luminance, local contrast enhancement, pseudo
//! exposure compensation to a set of target EVs, per-member tone mapping
//! with color restoration, and fusion through a registered backend.

use crate::enhance::{local_contrast_enhance, BilateralParams};
use crate::error::DimensionMismatch;
use crate::exposure::{apply_ev, ExposureCompConfig, ExposureError};
use crate::fusion::{FusionError, FusionRegistry};
use crate::image::{relative_luminance, ExposureStack, LuminanceMap, RgbImage, StackMember};
use crate::tonemap::make_pseudo_exposure;
use thiserror::Error;

/// Everything the pipeline needs besides the input pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub exposure: ExposureCompConfig,
    pub bilateral: BilateralParams,
    /// Name of the fusion backend to look up in the registry.
    pub fusion_backend: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            exposure: ExposureCompConfig::default(),
            bilateral: BilateralParams::default(),
            fusion_backend: "mertens".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Exposure(#[from] ExposureError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Dimensions(#[from] DimensionMismatch),
}

/// Intermediate and final products of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Enhanced luminance `L_c`.
    pub enhanced_luminance: LuminanceMap,
    /// Tone-mapped pseudo exposures, tagged with their EVs.
    pub pseudo_exposures: ExposureStack,
    /// Fused result (unclamped; encode clamps).
    pub fused: RgbImage,
}

/// Runs the full pipeline on one image.
pub fn run(
    img: &RgbImage,
    config: &PipelineConfig,
    registry: &FusionRegistry,
) -> Result<PipelineOutput, PipelineError> {
    let luminance = relative_luminance(img);
    let enhanced = local_contrast_enhance(&luminance, &config.bilateral);

    let l0 = config.exposure.estimate_l0(&enhanced)?;

    let members = config
        .exposure
        .target_evs
        .iter()
        .map(|&ev| {
            let scaled = apply_ev(&l0, ev);
            let image = make_pseudo_exposure(img, &luminance, &scaled)?;
            Ok(StackMember { ev, image })
        })
        .collect::<Result<Vec<_>, DimensionMismatch>>()?;
    let stack = ExposureStack::new(members).expect("config validation guarantees >= 1 EV");

    let fused = registry.fuse(&config.fusion_backend, &stack)?;

    Ok(PipelineOutput {
        enhanced_luminance: enhanced,
        pseudo_exposures: stack,
        fused,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exposure::Approach;

    #[test]
    fn constant_mid_gray_survives_the_pipeline() {
        // Every stage fixes constants; fusion of constants is their
        // weighted mean, so the output stays constant too.
        let img = RgbImage::splat(16, 16, [0.18, 0.18, 0.18]).unwrap();
        let config = PipelineConfig::default();
        let registry = FusionRegistry::with_builtins();
        let out = run(&img, &config, &registry).unwrap();

        let reference = out.fused.pixel(8, 8);
        for p in out.fused.pixels() {
            for k in 0..3 {
                assert!((p[k] - reference[k]).abs() < 1e-3, "{} vs {}", p[k], reference[k]);
            }
        }
    }

    #[test]
    fn approach_a_zero_ev_member_matches_tonemapped_enhancement() {
        // With v = 0, estimation is the identity, so the 0 EV member's
        // luminance is the tone-mapped enhanced luminance.
        let mut img = RgbImage::new(12, 12).unwrap();
        for (i, p) in img.pixels_mut().iter_mut().enumerate() {
            let v = 0.05 + 0.9 * ((i % 12) as f64 / 11.0);
            *p = [v, v * 0.8, v * 0.6];
        }
        let config = PipelineConfig {
            exposure: ExposureCompConfig {
                approach: Approach::A,
                known_ev: Some(0.0),
                ..Default::default()
            },
            ..Default::default()
        };
        let registry = FusionRegistry::with_builtins();
        let out = run(&img, &config, &registry).unwrap();

        let member = out
            .pseudo_exposures
            .members()
            .iter()
            .find(|m| m.ev == 0.0)
            .unwrap();
        let got = relative_luminance(&member.image);

        let l_white = crate::tonemap::pick_l_white(&out.enhanced_luminance);
        let want = crate::tonemap::reinhard_global(&out.enhanced_luminance, l_white).unwrap();
        for (g, w) in got.values().iter().zip(want.values()) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
    }

    #[test]
    fn missing_ev_for_approach_a_fails() {
        let img = RgbImage::splat(4, 4, [0.5; 3]).unwrap();
        let config = PipelineConfig {
            exposure: ExposureCompConfig {
                approach: Approach::A,
                known_ev: None,
                ..Default::default()
            },
            ..Default::default()
        };
        let registry = FusionRegistry::with_builtins();
        assert!(matches!(
            run(&img, &config, &registry),
            Err(PipelineError::Exposure(ExposureError::MissingKnownEv))
        ));
    }

    #[test]
    fn unknown_backend_fails() {
        let img = RgbImage::splat(4, 4, [0.5; 3]).unwrap();
        let config = PipelineConfig {
            fusion_backend: "bogus".to_string(),
            ..Default::default()
        };
        let registry = FusionRegistry::with_builtins();
        assert!(matches!(
            run(&img, &config, &registry),
            Err(PipelineError::Fusion(FusionError::UnknownBackend { .. }))
        ));
    }
}
