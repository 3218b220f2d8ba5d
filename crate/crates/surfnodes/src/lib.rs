//! Quasi-uniform, variable-density node sets on parametric surfaces.
//!
//! The crate generates point clouds ("node sets") on surfaces given by an
//! explicit parametrization `r: Ξ ⊂ ℝ^{d_Ξ} → ℝ^d`, its Jacobian, and a
//! target spacing function `h`. Three samplers are provided:
//!
//! * an advancing-front generator that walks the surface outward from a
//!   start node, placing neighbors `h` apart in ambient space,
//! * a naive parametric lattice mapped through `r` (fast, but spacing
//!   distorts wherever the map stretches), and
//! * a supersampled lattice thinned to a minimum ambient separation.
//!
//! Quality metrics (nearest-neighbor statistics, separation distance,
//! largest-empty-sphere estimates) and computable spacing-error bounds make
//! the uniformity claims checkable, and a spatial index (k-d tree or uniform
//! grid) keeps generation at `O(n·N·log N)`.
//!
//! Everything is generic over the scalar type through the [`Real`] trait;
//! [`Surface`](geometry::surface::Surface) aliases for `f64`/`f32` are
//! exported at the crate root for the common cases.

pub mod directions;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod nodegen;
pub mod quality;
pub mod real;
pub mod spatial;

pub use error::{Error, Result};
pub use real::Real;

/// Double-precision surface.
pub type Surface64 = geometry::surface::Surface<f64>;
/// Single-precision surface.
pub type Surface32 = geometry::surface::Surface<f32>;
/// Double-precision spacing field.
pub type SpacingField64 = geometry::surface::SpacingField<f64>;
/// Single-precision spacing field.
pub type SpacingField32 = geometry::surface::SpacingField<f32>;
