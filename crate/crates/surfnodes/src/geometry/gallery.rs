//! Built-in test geometries with hand-written analytic derivatives.
//!
//! Every surface here is exercised by the finite-difference checks in
//! [`crate::geometry::checks`], so the closed-form Jacobians and Hessians
//! below are guarded against transcription slips.
//!
//! Periodic parameters are deliberately *not* wrapped: a domain like
//! φ ∈ [0, 2π) is an ordinary half-open box with a seam, so generated node
//! sets may show one slightly larger gap where the two sides of the
//! parameter box meet.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::domain::ParamDomain;
use crate::geometry::surface::{SpectralExtremes, Surface};
use crate::linalg::Mat;
use crate::real::{cast, Real};

/// Names accepted by [`gallery`], in listing order.
pub const GALLERY_NAMES: &[&str] = &[
    "circle",
    "identity_square",
    "polar_curve",
    "heart",
    "torus",
    "roman",
    "sine_sheet",
    "sphere_patch",
    "sphere",
];

/// Looks up a built-in surface by name.
pub fn gallery<R: Real>(name: &str) -> Result<Surface<R>> {
    match name {
        "circle" => Ok(circle()),
        "identity_square" => Ok(identity_square()),
        "polar_curve" => Ok(polar_curve()),
        "heart" => Ok(heart()),
        "torus" => Ok(torus()),
        "roman" => Ok(roman()),
        "sine_sheet" => Ok(sine_sheet()),
        "sphere_patch" => Ok(sphere_patch()),
        "sphere" => Ok(sphere()),
        other => Err(Error::UnknownSurface(other.to_string())),
    }
}

/// Unit circle `(cos φ, sin φ)`, φ ∈ [0, 2π). Unit-speed curve: every
/// Jacobian column has norm 1, so parametric steps equal arc length.
pub fn circle<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let domain = ParamDomain::axis_box(vec![R::zero()], vec![tau], vec![false], Some(tau));
    Surface::new(
        "circle",
        domain,
        2,
        Arc::new(|xi: &[R], out: &mut [R]| {
            out[0] = xi[0].cos();
            out[1] = xi[0].sin();
        }),
        Arc::new(|xi: &[R], jac: &mut Mat<R>| {
            jac[(0, 0)] = -xi[0].sin();
            jac[(1, 0)] = xi[0].cos();
        }),
    )
    .with_hessians(Arc::new(|xi: &[R], hs: &mut [Mat<R>]| {
        hs[0][(0, 0)] = -xi[0].cos();
        hs[1][(0, 0)] = -xi[0].sin();
    }))
    .with_area(tau)
    .with_extremes(SpectralExtremes {
        hessian_spectral_max: R::one(),
        jacobian_min_singular: R::one(),
    })
}

/// The identity map on [0, 1]²: flat geometry where parametric and ambient
/// distances coincide exactly. Useful as a degenerate-curvature control.
pub fn identity_square<R: Real>() -> Surface<R> {
    let domain = ParamDomain::axis_box(
        vec![R::zero(), R::zero()],
        vec![R::one(), R::one()],
        vec![true, true],
        Some(R::one()),
    );
    Surface::new(
        "identity_square",
        domain,
        2,
        Arc::new(|xi: &[R], out: &mut [R]| {
            out[0] = xi[0];
            out[1] = xi[1];
        }),
        Arc::new(|_xi: &[R], jac: &mut Mat<R>| {
            jac[(0, 0)] = R::one();
            jac[(0, 1)] = R::zero();
            jac[(1, 0)] = R::zero();
            jac[(1, 1)] = R::one();
        }),
    )
    .with_hessians(Arc::new(|_xi: &[R], hs: &mut [Mat<R>]| {
        for h in hs.iter_mut() {
            h.fill_zero();
        }
    }))
    .with_area(R::one())
    .with_extremes(SpectralExtremes {
        hessian_spectral_max: R::zero(),
        jacobian_min_singular: R::one(),
    })
}

/// Radius and its φ-derivative for the flower-like polar curve
/// ρ(φ) = |cos(1.5φ)|^{sin(3φ)}.
///
/// Logarithmic differentiation:
/// ρ′ = ρ · (3 cos 3φ · ln|cos 1.5φ| − 1.5 sin 3φ · tan 1.5φ).
/// Near the three cusps (cos 1.5φ = 0) the derivative grows like ln|Δφ|;
/// the generator's non-finite/degenerate-step guards absorb the extremes.
fn polar_radius<R: Real>(phi: R) -> (R, R) {
    let half3 = cast::<R>(1.5);
    let three = cast::<R>(3.0);
    let a = (phi * half3).cos().abs();
    let s3 = (phi * three).sin();
    let c3 = (phi * three).cos();
    let rho = a.powf(s3);
    let log_deriv = three * c3 * a.ln() - half3 * s3 * (phi * half3).tan();
    (rho, rho * log_deriv)
}

/// Flower-like polar curve `ρ(φ)(cos φ, sin φ)` with ρ(φ) = |cos(1.5φ)|^{sin(3φ)},
/// φ ∈ [0, 2π): three smooth petals joined at three cusp points where the
/// curve speed varies over orders of magnitude.
pub fn polar_curve<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let domain = ParamDomain::axis_box(vec![R::zero()], vec![tau], vec![false], Some(tau));
    Surface::new(
        "polar_curve",
        domain,
        2,
        Arc::new(|xi: &[R], out: &mut [R]| {
            let (rho, _) = polar_radius(xi[0]);
            out[0] = rho * xi[0].cos();
            out[1] = rho * xi[0].sin();
        }),
        Arc::new(|xi: &[R], jac: &mut Mat<R>| {
            let (rho, drho) = polar_radius(xi[0]);
            let (c, s) = (xi[0].cos(), xi[0].sin());
            jac[(0, 0)] = drho * c - rho * s;
            jac[(1, 0)] = drho * s + rho * c;
        }),
    )
}

/// Heart-like closed surface
/// `(√(1−v²) cos u + v², √(1−v²) sin u, v)`, (u, v) ∈ [0, 2π) × [−1, 1).
/// The v-derivative blows up toward v = ±1 (the two "poles").
pub fn heart<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let domain = ParamDomain::axis_box(
        vec![R::zero(), -R::one()],
        vec![tau, R::one()],
        vec![false, false],
        Some(tau + tau),
    );
    let two = cast::<R>(2.0);
    Surface::new(
        "heart",
        domain,
        3,
        Arc::new(|xi: &[R], out: &mut [R]| {
            let (u, v) = (xi[0], xi[1]);
            let w = (R::one() - v * v).sqrt();
            out[0] = w * u.cos() + v * v;
            out[1] = w * u.sin();
            out[2] = v;
        }),
        Arc::new(move |xi: &[R], jac: &mut Mat<R>| {
            let (u, v) = (xi[0], xi[1]);
            let w = (R::one() - v * v).sqrt();
            let dw = -v / w;
            let (cu, su) = (u.cos(), u.sin());
            jac[(0, 0)] = -w * su;
            jac[(0, 1)] = dw * cu + two * v;
            jac[(1, 0)] = w * cu;
            jac[(1, 1)] = dw * su;
            jac[(2, 0)] = R::zero();
            jac[(2, 1)] = R::one();
        }),
    )
}

/// Torus `((cos ξ₂ + 2) cos ξ₁, (cos ξ₂ + 2) sin ξ₁, sin ξ₂)`, ξ ∈ [0, 2π]².
/// Tube radius 1 around a radius-2 center circle. Its curvature/metric
/// extremes are exactly known, which makes it the reference geometry for the
/// spacing-error bounds: max component Hessian spectral norm 3, min Jacobian
/// singular value 1.
pub fn torus<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let two = cast::<R>(2.0);
    let domain = ParamDomain::axis_box(
        vec![R::zero(), R::zero()],
        vec![tau, tau],
        vec![true, true],
        Some(tau * tau),
    );
    Surface::new(
        "torus",
        domain,
        3,
        Arc::new(move |xi: &[R], out: &mut [R]| {
            let ring = xi[1].cos() + two;
            out[0] = ring * xi[0].cos();
            out[1] = ring * xi[0].sin();
            out[2] = xi[1].sin();
        }),
        Arc::new(move |xi: &[R], jac: &mut Mat<R>| {
            let (c1, s1) = (xi[0].cos(), xi[0].sin());
            let (c2, s2) = (xi[1].cos(), xi[1].sin());
            let ring = c2 + two;
            jac[(0, 0)] = -ring * s1;
            jac[(0, 1)] = -s2 * c1;
            jac[(1, 0)] = ring * c1;
            jac[(1, 1)] = -s2 * s1;
            jac[(2, 0)] = R::zero();
            jac[(2, 1)] = c2;
        }),
    )
    .with_hessians(Arc::new(move |xi: &[R], hs: &mut [Mat<R>]| {
        let (c1, s1) = (xi[0].cos(), xi[0].sin());
        let (c2, s2) = (xi[1].cos(), xi[1].sin());
        let ring = c2 + two;
        hs[0][(0, 0)] = -ring * c1;
        hs[0][(0, 1)] = s2 * s1;
        hs[0][(1, 0)] = s2 * s1;
        hs[0][(1, 1)] = -c2 * c1;
        hs[1][(0, 0)] = -ring * s1;
        hs[1][(0, 1)] = -s2 * c1;
        hs[1][(1, 0)] = -s2 * c1;
        hs[1][(1, 1)] = -c2 * s1;
        hs[2][(0, 0)] = R::zero();
        hs[2][(0, 1)] = R::zero();
        hs[2][(1, 0)] = R::zero();
        hs[2][(1, 1)] = -s2;
    }))
    .with_area(cast::<R>(8.0 * PI * PI))
    .with_extremes(SpectralExtremes {
        hessian_spectral_max: cast::<R>(3.0),
        jacobian_min_singular: R::one(),
    })
}

/// Roman surface (an immersion of the real projective plane):
/// `(cos θ sin θ sin φ, cos θ sin θ cos φ, cos²θ cos φ sin φ)`,
/// θ ∈ [0, π/2], φ ∈ [0, 2π). Self-intersecting, non-orientable, with pinch
/// points — a stress test for purely proximity-based placement.
pub fn roman<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let half_pi = cast::<R>(PI / 2.0);
    let domain = ParamDomain::axis_box(
        vec![R::zero(), R::zero()],
        vec![half_pi, tau],
        vec![true, false],
        Some(half_pi * tau),
    );
    let two = cast::<R>(2.0);
    Surface::new(
        "roman",
        domain,
        3,
        Arc::new(|xi: &[R], out: &mut [R]| {
            let (t, p) = (xi[0], xi[1]);
            let cs = t.cos() * t.sin();
            out[0] = cs * p.sin();
            out[1] = cs * p.cos();
            out[2] = t.cos() * t.cos() * p.cos() * p.sin();
        }),
        Arc::new(move |xi: &[R], jac: &mut Mat<R>| {
            let (t, p) = (xi[0], xi[1]);
            let (ct, st) = (t.cos(), t.sin());
            let (cp, sp) = (p.cos(), p.sin());
            let cs = ct * st;
            let c2t = ct * ct - st * st;
            jac[(0, 0)] = c2t * sp;
            jac[(0, 1)] = cs * cp;
            jac[(1, 0)] = c2t * cp;
            jac[(1, 1)] = -cs * sp;
            jac[(2, 0)] = -two * cs * cp * sp;
            jac[(2, 1)] = ct * ct * (cp * cp - sp * sp);
        }),
    )
}

/// Wavy graph surface `(ξ₁, ξ₂, 3 sin ξ₁ sin ξ₂)` over [0, 3π]²: strongly
/// anisotropic metric (steep slopes shorten parametric steps) with exactly
/// known extremes: Hessian spectral norm peaks at 3, and the smallest
/// Jacobian singular value is identically 1.
pub fn sine_sheet<R: Real>() -> Surface<R> {
    let side = cast::<R>(3.0 * PI);
    let three = cast::<R>(3.0);
    let domain = ParamDomain::axis_box(
        vec![R::zero(), R::zero()],
        vec![side, side],
        vec![true, true],
        Some(side * side),
    );
    Surface::new(
        "sine_sheet",
        domain,
        3,
        Arc::new(move |xi: &[R], out: &mut [R]| {
            out[0] = xi[0];
            out[1] = xi[1];
            out[2] = three * xi[0].sin() * xi[1].sin();
        }),
        Arc::new(move |xi: &[R], jac: &mut Mat<R>| {
            jac[(0, 0)] = R::one();
            jac[(0, 1)] = R::zero();
            jac[(1, 0)] = R::zero();
            jac[(1, 1)] = R::one();
            jac[(2, 0)] = three * xi[0].cos() * xi[1].sin();
            jac[(2, 1)] = three * xi[0].sin() * xi[1].cos();
        }),
    )
    .with_hessians(Arc::new(move |xi: &[R], hs: &mut [Mat<R>]| {
        let (c1, s1) = (xi[0].cos(), xi[0].sin());
        let (c2, s2) = (xi[1].cos(), xi[1].sin());
        hs[0].fill_zero();
        hs[1].fill_zero();
        hs[2][(0, 0)] = -three * s1 * s2;
        hs[2][(0, 1)] = three * c1 * c2;
        hs[2][(1, 0)] = three * c1 * c2;
        hs[2][(1, 1)] = -three * s1 * s2;
    }))
    .with_extremes(SpectralExtremes {
        // Height Hessian eigenvalues are 3(−sin ξ₁ sin ξ₂ ± cos ξ₁ cos ξ₂)
        // = ∓3 cos(ξ₁ ± ξ₂); JᵀJ = I + ggᵀ has smallest eigenvalue 1.
        hessian_spectral_max: three,
        jacobian_min_singular: R::one(),
    })
}

/// Hemisphere with a deliberately non-standard parametrization
/// `(cos ξ₁ sin ξ₂², sin ξ₁ sin ξ₂², cos ξ₂²)`, ξ₁ ∈ [0, 2π),
/// ξ₂ ∈ [0, √(π/2)]: the whole Jacobian vanishes at ξ₂ = 0, so candidate
/// steps there are singular and must be skipped rather than crash.
pub fn sphere_patch<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let xi2_max = cast::<R>((PI / 2.0).sqrt());
    let domain = ParamDomain::axis_box(
        vec![R::zero(), R::zero()],
        vec![tau, xi2_max],
        vec![false, true],
        Some(tau * xi2_max),
    );
    let two = cast::<R>(2.0);
    Surface::new(
        "sphere_patch",
        domain,
        3,
        Arc::new(|xi: &[R], out: &mut [R]| {
            let q = xi[1] * xi[1];
            out[0] = xi[0].cos() * q.sin();
            out[1] = xi[0].sin() * q.sin();
            out[2] = q.cos();
        }),
        Arc::new(move |xi: &[R], jac: &mut Mat<R>| {
            let q = xi[1] * xi[1];
            let (c1, s1) = (xi[0].cos(), xi[0].sin());
            let (cq, sq) = (q.cos(), q.sin());
            let dq = two * xi[1];
            jac[(0, 0)] = -s1 * sq;
            jac[(0, 1)] = dq * c1 * cq;
            jac[(1, 0)] = c1 * sq;
            jac[(1, 1)] = dq * s1 * cq;
            jac[(2, 0)] = R::zero();
            jac[(2, 1)] = -dq * sq;
        }),
    )
    .with_area(tau)
}

/// Unit sphere in longitude/latitude coordinates
/// `(cos ξ₂ cos ξ₁, cos ξ₂ sin ξ₁, sin ξ₂)`, ξ₁ ∈ [0, 2π),
/// ξ₂ ∈ [−π/2, π/2]. Degenerate at the two poles (Jacobian loses rank);
/// the natural target for latitude/longitude altitude spacing fields.
pub fn sphere<R: Real>() -> Surface<R> {
    let tau = cast::<R>(TAU);
    let half_pi = cast::<R>(PI / 2.0);
    let domain = ParamDomain::axis_box(
        vec![R::zero(), -half_pi],
        vec![tau, half_pi],
        vec![false, true],
        Some(tau * cast::<R>(PI)),
    );
    Surface::new(
        "sphere",
        domain,
        3,
        Arc::new(|xi: &[R], out: &mut [R]| {
            let (c2, s2) = (xi[1].cos(), xi[1].sin());
            out[0] = c2 * xi[0].cos();
            out[1] = c2 * xi[0].sin();
            out[2] = s2;
        }),
        Arc::new(|xi: &[R], jac: &mut Mat<R>| {
            let (c1, s1) = (xi[0].cos(), xi[0].sin());
            let (c2, s2) = (xi[1].cos(), xi[1].sin());
            jac[(0, 0)] = -c2 * s1;
            jac[(0, 1)] = -s2 * c1;
            jac[(1, 0)] = c2 * c1;
            jac[(1, 1)] = -s2 * s1;
            jac[(2, 0)] = R::zero();
            jac[(2, 1)] = c2;
        }),
    )
    .with_hessians(Arc::new(|xi: &[R], hs: &mut [Mat<R>]| {
        let (c1, s1) = (xi[0].cos(), xi[0].sin());
        let (c2, s2) = (xi[1].cos(), xi[1].sin());
        hs[0][(0, 0)] = -c2 * c1;
        hs[0][(0, 1)] = s2 * s1;
        hs[0][(1, 0)] = s2 * s1;
        hs[0][(1, 1)] = -c2 * c1;
        hs[1][(0, 0)] = -c2 * s1;
        hs[1][(0, 1)] = -s2 * c1;
        hs[1][(1, 0)] = -s2 * c1;
        hs[1][(1, 1)] = -c2 * s1;
        hs[2][(0, 0)] = R::zero();
        hs[2][(0, 1)] = R::zero();
        hs[2][(1, 0)] = R::zero();
        hs[2][(1, 1)] = -s2;
    }))
    .with_area(cast::<R>(4.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::checks::{hessian_check, jacobian_check};
    use approx::assert_relative_eq;

    #[test]
    fn every_name_resolves() {
        for name in GALLERY_NAMES {
            let s = gallery::<f64>(name).unwrap();
            assert_eq!(s.name(), *name);
        }
        assert!(matches!(
            gallery::<f64>("klein_bottle"),
            Err(Error::UnknownSurface(_))
        ));
    }

    #[test]
    fn circle_values() {
        let s = circle::<f64>();
        assert_eq!(s.map_vec(&[0.0]), vec![1.0, 0.0]);
        let mut j = s.jacobian_buffer();
        s.jacobian_into(&[0.0], &mut j);
        assert_eq!((j[(0, 0)], j[(1, 0)]), (0.0, 1.0));
    }

    #[test]
    fn torus_passes_through_expected_point() {
        let s = torus::<f64>();
        // (cos 0 + 2)·cos 0 = 3 on the outer equator.
        assert_eq!(s.map_vec(&[0.0, 0.0]), vec![3.0, 0.0, 0.0]);
    }

    #[test]
    fn polar_curve_radius_at_quarter_turn() {
        // ρ(π/2) = |cos(3π/4)|^{sin(3π/2)} = (√2/2)^{−1} = √2.
        let s = polar_curve::<f64>();
        let p = s.map_vec(&[std::f64::consts::FRAC_PI_2]);
        assert_relative_eq!(p[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(p[1], std::f64::consts::SQRT_2, max_relative = 1e-12);
    }

    #[test]
    fn heart_equator_points() {
        let s = heart::<f64>();
        assert_eq!(s.map_vec(&[0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        let p = s.map_vec(&[std::f64::consts::FRAC_PI_2, 0.0]);
        assert_relative_eq!(p[1], 1.0, max_relative = 1e-15);
    }

    #[test]
    fn sphere_patch_jacobian_vanishes_on_lower_edge() {
        let s = sphere_patch::<f64>();
        let mut j = s.jacobian_buffer();
        s.jacobian_into(&[1.3, 0.0], &mut j);
        assert!(j.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn domain_seams_are_half_open() {
        let tau = std::f64::consts::TAU;
        assert!(!circle::<f64>().domain().contains(&[tau]));
        assert!(torus::<f64>().domain().contains(&[tau, tau]));
        assert!(!heart::<f64>().domain().contains(&[0.0, 1.0]));
        assert!(heart::<f64>().domain().contains(&[0.0, -1.0]));
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        for name in GALLERY_NAMES {
            let s = gallery::<f64>(name).unwrap();
            let report = jacobian_check(&s, 150, 42);
            assert!(
                report.passes(1e-5),
                "{name}: max relative deviation {:.3e}",
                report.max_rel_deviation
            );
        }
    }

    #[test]
    fn analytic_hessians_match_finite_differences() {
        for name in GALLERY_NAMES {
            let s = gallery::<f64>(name).unwrap();
            if !s.has_hessians() {
                continue;
            }
            let report = hessian_check(&s, 150, 43);
            assert!(
                report.passes(1e-4),
                "{name}: max relative deviation {:.3e}",
                report.max_rel_deviation
            );
        }
    }

    #[test]
    fn torus_extremes_match_sampled_spectra() {
        let s = torus::<f64>();
        let ext = s.extremes().unwrap();
        let mut jac = s.jacobian_buffer();
        let mut hs = s.hessian_buffers();
        let mut max_h: f64 = 0.0;
        let mut min_sigma = f64::INFINITY;
        for i in 0..40 {
            for j in 0..40 {
                let xi = [i as f64 * TAU / 40.0, j as f64 * TAU / 40.0];
                s.jacobian_into(&xi, &mut jac);
                s.hessians_into(&xi, &mut hs).unwrap();
                min_sigma = min_sigma.min(crate::linalg::min_singular_value(&jac));
                for h in &hs {
                    max_h = max_h.max(h.sym_spectral_norm());
                }
            }
        }
        // The scan hits the extremal parameters (0,0) and (0,π) exactly.
        assert_relative_eq!(max_h, ext.hessian_spectral_max, max_relative = 1e-12);
        assert_relative_eq!(min_sigma, ext.jacobian_min_singular, max_relative = 1e-12);
    }

    #[test]
    fn works_in_single_precision() {
        let s = torus::<f32>();
        let p = s.map_vec(&[0.0f32, 0.0f32]);
        assert_eq!(p, vec![3.0f32, 0.0, 0.0]);
        assert!(gallery::<f32>("heart").is_ok());
    }
}
