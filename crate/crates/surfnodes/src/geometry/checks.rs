//! Finite-difference consistency checks for analytic surface derivatives.
//!
//! Every gallery surface carries a hand-written Jacobian (and often Hessians).
//! These helpers compare them against central differences of the map at
//! randomly drawn interior parameters, so a transcription slip in any
//! analytic formula is caught by a cheap test rather than by a subtly wrong
//! node distribution.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::geometry::surface::Surface;
use crate::linalg::Mat;

/// Result of comparing an analytic derivative against finite differences.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeCheck {
    /// Largest relative deviation seen over all sample points,
    /// `‖analytic − numeric‖_F / max(‖numeric‖_F, 1)`.
    pub max_rel_deviation: f64,
    /// Number of interior parameter points sampled.
    pub samples: usize,
}

impl DerivativeCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_rel_deviation <= tol
    }
}

/// Draws a parameter point away from the box faces: inner 80% of each axis.
/// Central differences need room on both sides, and several gallery maps
/// have singular derivatives exactly on a face.
fn interior_sample(surface: &Surface<f64>, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = surface.domain().dim();
    let lo = surface.domain().lo();
    let hi = surface.domain().hi();
    let mut xi = vec![0.0; d];
    loop {
        for k in 0..d {
            let t = 0.1 + 0.8 * rng.gen::<f64>();
            xi[k] = lo[k] + t * (hi[k] - lo[k]);
        }
        if surface.domain().contains(&xi) {
            return xi;
        }
    }
}

/// Central-difference Jacobian of the map at `xi` with per-axis step
/// proportional to that axis's bounding-box extent.
fn fd_jacobian(surface: &Surface<f64>, xi: &[f64], rel_step: f64) -> Mat<f64> {
    let d_xi = surface.domain().dim();
    let d = surface.ambient_dim();
    let lo = surface.domain().lo();
    let hi = surface.domain().hi();
    let mut jac = Mat::zeros(d, d_xi);
    let mut plus = vec![0.0; d];
    let mut minus = vec![0.0; d];
    let mut shifted = xi.to_vec();
    for k in 0..d_xi {
        let step = rel_step * (hi[k] - lo[k]).max(1.0);
        shifted[k] = xi[k] + step;
        surface.map_into(&shifted, &mut plus);
        shifted[k] = xi[k] - step;
        surface.map_into(&shifted, &mut minus);
        shifted[k] = xi[k];
        for i in 0..d {
            jac[(i, k)] = (plus[i] - minus[i]) / (2.0 * step);
        }
    }
    jac
}

fn rel_deviation(analytic: &Mat<f64>, numeric: &Mat<f64>) -> f64 {
    let mut diff = 0.0f64;
    for (a, b) in analytic.as_slice().iter().zip(numeric.as_slice()) {
        diff += (a - b) * (a - b);
    }
    diff.sqrt() / numeric.frobenius().max(1.0)
}

/// Compares the surface's analytic Jacobian against central differences at
/// `samples` interior points. Step: `1e-6` of each axis's extent.
pub fn jacobian_check(surface: &Surface<f64>, samples: usize, seed: u64) -> DerivativeCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = surface.ambient_dim();
    let d_xi = surface.domain().dim();
    let mut analytic = Mat::zeros(d, d_xi);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let xi = interior_sample(surface, &mut rng);
        surface.jacobian_into(&xi, &mut analytic);
        let numeric = fd_jacobian(surface, &xi, 1e-6);
        worst = worst.max(rel_deviation(&analytic, &numeric));
    }
    DerivativeCheck { max_rel_deviation: worst, samples }
}

/// Compares analytic Hessians (one symmetric `d_Ξ × d_Ξ` matrix per ambient
/// component) against central differences of the analytic Jacobian:
/// `∂J_{i,l}/∂ξ_k = H_i[l,k]`. Panics if the surface carries no Hessians.
/// Step: `1e-5` of each axis's extent.
pub fn hessian_check(surface: &Surface<f64>, samples: usize, seed: u64) -> DerivativeCheck {
    assert!(
        surface.has_hessians(),
        "hessian_check called on `{}`, which has no analytic second derivatives",
        surface.name()
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = surface.ambient_dim();
    let d_xi = surface.domain().dim();
    let lo = surface.domain().lo();
    let hi = surface.domain().hi();
    let mut analytic = surface.hessian_buffers();
    let mut jac_plus = surface.jacobian_buffer();
    let mut jac_minus = surface.jacobian_buffer();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let xi = interior_sample(surface, &mut rng);
        surface
            .hessians_into(&xi, &mut analytic)
            .expect("surface reported has_hessians");
        let mut numeric = vec![Mat::zeros(d_xi, d_xi); d];
        let mut shifted = xi.clone();
        for k in 0..d_xi {
            let step = 1e-5 * (hi[k] - lo[k]).max(1.0);
            shifted[k] = xi[k] + step;
            surface.jacobian_into(&shifted, &mut jac_plus);
            shifted[k] = xi[k] - step;
            surface.jacobian_into(&shifted, &mut jac_minus);
            shifted[k] = xi[k];
            for i in 0..d {
                for l in 0..d_xi {
                    numeric[i][(l, k)] = (jac_plus[(i, l)] - jac_minus[(i, l)]) / (2.0 * step);
                }
            }
        }
        for i in 0..d {
            worst = worst.max(rel_deviation(&analytic[i], &numeric[i]));
        }
    }
    DerivativeCheck { max_rel_deviation: worst, samples }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::domain::ParamDomain;
    use crate::geometry::surface::Surface;
    use std::sync::Arc;

    /// Hand-rolled quadratic map with known derivatives, plus a deliberately
    /// corrupted variant, to make sure the checks detect what they should.
    fn quadratic(corrupt: bool) -> Surface<f64> {
        let domain = ParamDomain::axis_box(vec![0.0, 0.0], vec![1.0, 1.0], vec![true, true], Some(1.0));
        let jac_scale = if corrupt { 1.02 } else { 1.0 };
        Surface::new(
            "quadratic",
            domain,
            3,
            Arc::new(|xi: &[f64], out: &mut [f64]| {
                out[0] = xi[0] * xi[0];
                out[1] = xi[0] * xi[1];
                out[2] = xi[1];
            }),
            Arc::new(move |xi: &[f64], jac: &mut Mat<f64>| {
                jac[(0, 0)] = 2.0 * xi[0] * jac_scale;
                jac[(0, 1)] = 0.0;
                jac[(1, 0)] = xi[1];
                jac[(1, 1)] = xi[0];
                jac[(2, 0)] = 0.0;
                jac[(2, 1)] = 1.0;
            }),
        )
        .with_hessians(Arc::new(|_xi: &[f64], hs: &mut [Mat<f64>]| {
            for h in hs.iter_mut() {
                h.fill_zero();
            }
            hs[0][(0, 0)] = 2.0;
            hs[1][(0, 1)] = 1.0;
            hs[1][(1, 0)] = 1.0;
        }))
    }

    #[test]
    fn accepts_correct_derivatives() {
        let s = quadratic(false);
        assert!(jacobian_check(&s, 20, 7).passes(1e-5));
        assert!(hessian_check(&s, 20, 7).passes(1e-4));
    }

    #[test]
    fn flags_corrupted_jacobian() {
        let s = quadratic(true);
        assert!(!jacobian_check(&s, 20, 7).passes(1e-5));
    }
}
