//! Single-image exposure stack synthesis and multi-exposure fusion.
//!
//! From one photograph, this crate builds a set of pseudo exposures —
//! local contrast enhancement, exposure-value rescaling under a linear
//! response model, global tone mapping with color restoration — and
//! fuses them into a single output with per-pixel quality weights and
//! Laplacian-pyramid blending. It also ships the evaluation metrics used
//! to judge the results (mean CIEDE2000, statistical naturalness) and
//! bit-exact readers/writers for PPM, PNG, Radiance HDR and PFM.
//!
//! All operations are pure functions over immutable pixel buffers and
//! are safe to call concurrently on shared inputs. Where a kernel runs
//! in parallel internally, the per-pixel summation order is fixed, so
//! outputs never depend on the schedule.

pub mod enhance;
pub mod error;
pub mod exposure;
pub mod fusion;
pub mod image;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod tonemap;

pub use error::{DimensionMismatch, InvalidParam};
pub use image::{relative_luminance, ExposureStack, LuminanceMap, RgbImage, StackMember};
pub use pipeline::{PipelineConfig, PipelineError, PipelineOutput};
