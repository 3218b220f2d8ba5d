//! Parametric surfaces (map + derivatives) and nodal spacing fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::altitude::AltitudeSpacing;
use crate::geometry::domain::ParamDomain;
use crate::linalg::Mat;
use crate::real::Real;

/// Writer-style surface map: evaluates r(ξ) into a caller-provided buffer.
/// Writer closures keep the generator's hot loop allocation-free.
pub type MapFn<R> = dyn Fn(&[R], &mut [R]) + Send + Sync;
/// Writer-style Jacobian: fills a `d × d_Ξ` row-major matrix with ∇r(ξ).
pub type JacobianFn<R> = dyn Fn(&[R], &mut Mat<R>) + Send + Sync;
/// Writer-style second derivatives: fills one `d_Ξ × d_Ξ` symmetric matrix
/// per ambient component (the Hessian of each component function r_i).
pub type HessiansFn<R> = dyn Fn(&[R], &mut [Mat<R>]) + Send + Sync;

/// Known extremal spectral quantities of a surface over its whole domain,
/// used to sharpen the global spacing-error bound beyond Monte Carlo search.
#[derive(Clone, Copy, Debug)]
pub struct SpectralExtremes<R> {
    /// max over Ξ and ambient components of σ₁(Hessian of r_i).
    pub hessian_spectral_max: R,
    /// min over Ξ of the smallest singular value of ∇r.
    pub jacobian_min_singular: R,
}

/// A parametric surface: domain, ambient dimension, map, Jacobian, and
/// optional second derivatives plus exact area.
///
/// All evaluators must be pure; surfaces are immutable after construction
/// and cheap to share.
#[derive(Clone)]
pub struct Surface<R> {
    name: String,
    domain: ParamDomain<R>,
    ambient_dim: usize,
    map: Arc<MapFn<R>>,
    jacobian: Arc<JacobianFn<R>>,
    hessians: Option<Arc<HessiansFn<R>>>,
    area: Option<R>,
    extremes: Option<SpectralExtremes<R>>,
}

impl<R: Real> Surface<R> {
    /// Assembles a surface from its parts. `area` is the exact surface
    /// measure |∂Ω| when known (used by the supersampling baseline).
    pub fn new(
        name: impl Into<String>,
        domain: ParamDomain<R>,
        ambient_dim: usize,
        map: Arc<MapFn<R>>,
        jacobian: Arc<JacobianFn<R>>,
    ) -> Self {
        Surface {
            name: name.into(),
            domain,
            ambient_dim,
            map,
            jacobian,
            hessians: None,
            area: None,
            extremes: None,
        }
    }

    /// Attaches per-component Hessian evaluation.
    pub fn with_hessians(mut self, hessians: Arc<HessiansFn<R>>) -> Self {
        self.hessians = Some(hessians);
        self
    }

    /// Attaches the exact surface area |∂Ω|.
    pub fn with_area(mut self, area: R) -> Self {
        self.area = Some(area);
        self
    }

    /// Attaches known spectral extremes for the global error bound.
    pub fn with_extremes(mut self, extremes: SpectralExtremes<R>) -> Self {
        self.extremes = Some(extremes);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &ParamDomain<R> {
        &self.domain
    }

    /// Parametric dimension d_Ξ.
    pub fn param_dim(&self) -> usize {
        self.domain.dim()
    }

    /// Ambient dimension d.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn area(&self) -> Option<R> {
        self.area
    }

    pub fn extremes(&self) -> Option<SpectralExtremes<R>> {
        self.extremes
    }

    pub fn has_hessians(&self) -> bool {
        self.hessians.is_some()
    }

    /// Evaluates r(ξ) into `out` (length d).
    #[inline]
    pub fn map_into(&self, xi: &[R], out: &mut [R]) {
        debug_assert_eq!(xi.len(), self.param_dim());
        debug_assert_eq!(out.len(), self.ambient_dim);
        (self.map)(xi, out);
    }

    /// Evaluates r(ξ), allocating the result.
    pub fn map_vec(&self, xi: &[R]) -> Vec<R> {
        let mut out = vec![R::zero(); self.ambient_dim];
        self.map_into(xi, &mut out);
        out
    }

    /// Evaluates ∇r(ξ) into a `d × d_Ξ` matrix.
    #[inline]
    pub fn jacobian_into(&self, xi: &[R], out: &mut Mat<R>) {
        debug_assert_eq!(xi.len(), self.param_dim());
        debug_assert_eq!(out.rows(), self.ambient_dim);
        debug_assert_eq!(out.cols(), self.param_dim());
        (self.jacobian)(xi, out);
    }

    /// Allocates a correctly shaped Jacobian buffer.
    pub fn jacobian_buffer(&self) -> Mat<R> {
        Mat::zeros(self.ambient_dim, self.param_dim())
    }

    /// Evaluates all d component Hessians at ξ into `out` (each `d_Ξ × d_Ξ`).
    pub fn hessians_into(&self, xi: &[R], out: &mut [Mat<R>]) -> Result<()> {
        let h = self
            .hessians
            .as_ref()
            .ok_or_else(|| Error::MissingHessians(self.name.clone()))?;
        debug_assert_eq!(out.len(), self.ambient_dim);
        h(xi, out);
        Ok(())
    }

    /// Allocates a correctly shaped Hessian buffer set.
    pub fn hessian_buffers(&self) -> Vec<Mat<R>> {
        (0..self.ambient_dim)
            .map(|_| Mat::zeros(self.param_dim(), self.param_dim()))
            .collect()
    }
}

impl<R: Real> std::fmt::Debug for Surface<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Surface")
            .field("name", &self.name)
            .field("param_dim", &self.param_dim())
            .field("ambient_dim", &self.ambient_dim)
            .field("has_hessians", &self.hessians.is_some())
            .field("area", &self.area)
            .finish()
    }
}

/// Nodal spacing function h: ambient point → target spacing (> 0).
#[derive(Clone)]
pub enum SpacingField<R> {
    /// Constant target spacing.
    Constant(R),
    /// Spacing interpolated from a latitude/longitude altitude grid.
    Altitude(Arc<AltitudeSpacing<R>>),
    /// Arbitrary user-supplied spacing function.
    Callable(Arc<dyn Fn(&[R]) -> R + Send + Sync>),
}

impl<R: Real> SpacingField<R> {
    /// Constructs a constant field, validating positivity.
    pub fn constant(h: R) -> Result<Self> {
        if !(h > R::zero()) || !h.is_finite() {
            return Err(Error::InvalidSpacing(format!("h must be positive and finite, got {h:?}")));
        }
        Ok(SpacingField::Constant(h))
    }

    /// Evaluates h(p).
    #[inline]
    pub fn eval(&self, p: &[R]) -> R {
        match self {
            SpacingField::Constant(h) => *h,
            SpacingField::Altitude(a) => a.eval(p),
            SpacingField::Callable(f) => f(p),
        }
    }

    /// Returns the field scaled by a positive factor (used for refinement
    /// probe sets: probe spacing = factor · h everywhere).
    pub fn scaled(&self, factor: R) -> Self {
        match self {
            SpacingField::Constant(h) => SpacingField::Constant(*h * factor),
            SpacingField::Altitude(a) => {
                let a = Arc::clone(a);
                SpacingField::Callable(Arc::new(move |p: &[R]| a.eval(p) * factor))
            }
            SpacingField::Callable(f) => {
                let f = Arc::clone(f);
                SpacingField::Callable(Arc::new(move |p: &[R]| f(p) * factor))
            }
        }
    }

    /// An upper bound on the field over the surface, when one is known
    /// structurally (constant value; altitude fields clamp to `h_max`).
    pub fn upper_bound(&self) -> Option<R> {
        match self {
            SpacingField::Constant(h) => Some(*h),
            SpacingField::Altitude(a) => Some(a.h_max()),
            SpacingField::Callable(_) => None,
        }
    }

    /// The constant value, if this is a constant field.
    pub fn as_constant(&self) -> Option<R> {
        match self {
            SpacingField::Constant(h) => Some(*h),
            _ => None,
        }
    }
}

impl<R: Real> std::fmt::Debug for SpacingField<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpacingField::Constant(h) => write!(f, "SpacingField::Constant({h:?})"),
            SpacingField::Altitude(_) => write!(f, "SpacingField::Altitude(..)"),
            SpacingField::Callable(_) => write!(f, "SpacingField::Callable(..)"),
        }
    }
}
