//! Parametric domains, surfaces, spacing fields, altitude-grid ingestion,
//! the built-in geometry gallery, and derivative consistency checks.

pub mod altitude;
pub mod checks;
pub mod domain;
pub mod gallery;
pub mod surface;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Mat;
use crate::real::{cast, Real};
use surface::Surface;

/// Monte Carlo estimates of the domain measure |Ξ| and the surface measure
/// |∂Ω|, from uniform samples over the domain's bounding box:
///
/// * |Ξ| ≈ box volume × fraction of samples inside the domain,
/// * |∂Ω| ≈ box volume × mean of √det(∇rᵀ∇r) over in-domain samples
///   (zero contribution outside), the change-of-variables area element.
///
/// Statistics accumulate in `f64` regardless of the surface's scalar type.
/// Returns `(measure, area)`.
pub fn monte_carlo_measures<R: Real>(
    surface: &Surface<R>,
    samples: usize,
    seed: u64,
) -> (R, R) {
    assert!(samples > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = surface.domain();
    let mut xi = vec![R::zero(); domain.dim()];
    let mut jac = surface.jacobian_buffer();
    let mut inside = 0usize;
    let mut element_sum = 0.0f64;
    for _ in 0..samples {
        domain.sample_bbox(&mut rng, &mut xi);
        if !domain.contains(&xi) {
            continue;
        }
        inside += 1;
        surface.jacobian_into(&xi, &mut jac);
        element_sum += gram_det(&jac).max(0.0).sqrt();
    }
    let box_vol = domain.bbox_measure().to_f64().unwrap();
    let n = samples as f64;
    (
        cast::<R>(box_vol * inside as f64 / n),
        cast::<R>(box_vol * element_sum / n),
    )
}

/// det(JᵀJ) for a `d × d_Ξ` Jacobian, in `f64`. Dimensions 1 and 2 are
/// closed-form; higher parametric dimensions fall back to the product of
/// Gram eigenvalues.
fn gram_det<R: Real>(jac: &Mat<R>) -> f64 {
    let (d, d_xi) = (jac.rows(), jac.cols());
    let col = |k: usize| (0..d).map(move |i| jac[(i, k)].to_f64().unwrap());
    match d_xi {
        1 => col(0).map(|v| v * v).sum(),
        2 => {
            let (mut aa, mut bb, mut ab) = (0.0f64, 0.0, 0.0);
            for i in 0..d {
                let a = jac[(i, 0)].to_f64().unwrap();
                let b = jac[(i, 1)].to_f64().unwrap();
                aa += a * a;
                bb += b * b;
                ab += a * b;
            }
            aa * bb - ab * ab
        }
        _ => jac
            .gram()
            .sym_eigenvalues()
            .into_iter()
            .map(|e| e.to_f64().unwrap())
            .product(),
    }
}
