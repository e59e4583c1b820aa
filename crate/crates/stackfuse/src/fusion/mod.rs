//! Fusion of an exposure stack into a single image.
//!
//! Backends implement [`FusionBackend`] and are selected by name through
//! a [`FusionRegistry`], so the pipeline and CLI stay agnostic of the
//! blending algorithm. The pyramid-blending backend (`"mertens"`) is
//! implemented; `"sakai"` and `"nejati"` are registered slots that
//! report themselves as unimplemented.

pub mod mertens;
pub mod pyramid;
pub mod weights;

pub use mertens::{fuse, MertensFusion};
pub use pyramid::{collapse, full_depth, gaussian_pyramid, laplacian_pyramid};
pub use pyramid::{GaussianPyramid, LaplacianPyramid};
pub use weights::{quality_weights, WeightExponents, WeightMaps};

use crate::image::{ExposureStack, RgbImage};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FusionError {
    #[error("fusion backend '{0}' is not implemented")]
    Unimplemented(&'static str),
    #[error("unknown fusion backend '{name}' (available: {available})")]
    UnknownBackend { name: String, available: String },
}

/// A named algorithm that fuses an exposure stack into one image.
///
/// Implementations must be pure: the same stack yields the same output.
pub trait FusionBackend: Send + Sync {
    fn name(&self) -> &'static str;
    fn fuse(&self, stack: &ExposureStack) -> Result<RgbImage, FusionError>;
}

/// Placeholder slot for a cited fusion method that is not shipped.
struct UnimplementedBackend {
    name: &'static str,
}

impl FusionBackend for UnimplementedBackend {
    fn name(&self) -> &'static str {
        self.name
    }

    fn fuse(&self, _stack: &ExposureStack) -> Result<RgbImage, FusionError> {
        Err(FusionError::Unimplemented(self.name))
    }
}

/// Name-keyed collection of fusion backends.
///
/// Registration order is preserved for listings; registering a backend
/// with an existing name replaces it.
pub struct FusionRegistry {
    backends: Vec<Box<dyn FusionBackend>>,
}

impl FusionRegistry {
    pub fn empty() -> Self {
        Self {
            backends: Vec::new(),
        }
    }

    /// Registry with the built-in backends: `mertens` (default
    /// parameters) plus the `sakai` and `nejati` slots.
    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(MertensFusion::default()));
        registry.register(Box::new(UnimplementedBackend { name: "sakai" }));
        registry.register(Box::new(UnimplementedBackend { name: "nejati" }));
        registry
    }

    pub fn register(&mut self, backend: Box<dyn FusionBackend>) {
        if let Some(slot) = self
            .backends
            .iter_mut()
            .find(|b| b.name() == backend.name())
        {
            *slot = backend;
        } else {
            self.backends.push(backend);
        }
    }

    pub fn get(&self, name: &str) -> Option<&dyn FusionBackend> {
        self.backends
            .iter()
            .find(|b| b.name() == name)
            .map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.backends.iter().map(|b| b.name()).collect()
    }

    /// Looks up `name` and runs it on `stack`.
    pub fn fuse(&self, name: &str, stack: &ExposureStack) -> Result<RgbImage, FusionError> {
        let backend = self.get(name).ok_or_else(|| FusionError::UnknownBackend {
            name: name.to_string(),
            available: self.names().join(", "),
        })?;
        backend.fuse(stack)
    }
}

impl Default for FusionRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::StackMember;

    fn tiny_stack() -> ExposureStack {
        ExposureStack::new(vec![StackMember {
            ev: 0.0,
            image: RgbImage::splat(2, 2, [0.5, 0.5, 0.5]).unwrap(),
        }])
        .unwrap()
    }

    #[test]
    fn builtins_are_registered_in_order() {
        let registry = FusionRegistry::with_builtins();
        assert_eq!(registry.names(), vec!["mertens", "sakai", "nejati"]);
    }

    #[test]
    fn mertens_backend_runs() {
        let registry = FusionRegistry::with_builtins();
        let out = registry.fuse("mertens", &tiny_stack()).unwrap();
        assert_eq!(out.dimensions(), (2, 2));
    }

    #[test]
    fn stub_backends_report_unimplemented() {
        let registry = FusionRegistry::with_builtins();
        for name in ["sakai", "nejati"] {
            assert_eq!(
                registry.fuse(name, &tiny_stack()).unwrap_err(),
                FusionError::Unimplemented(name)
            );
        }
    }

    #[test]
    fn unknown_backend_reports_available_names() {
        let registry = FusionRegistry::with_builtins();
        match registry.fuse("bogus", &tiny_stack()).unwrap_err() {
            FusionError::UnknownBackend { name, available } => {
                assert_eq!(name, "bogus");
                assert!(available.contains("mertens"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn registering_same_name_replaces() {
        let mut registry = FusionRegistry::with_builtins();
        let custom = MertensFusion::new(WeightExponents {
            contrast: 2.0,
            saturation: 1.0,
            exposedness: 0.5,
        });
        registry.register(Box::new(custom));
        assert_eq!(registry.names().len(), 3);
    }
}
