//! Candidate direction sets: a fixed unit-sphere discretization, randomly
//! rotated once per node expansion.
//!
//! The generator steps from each accepted node along `n` unit directions in
//! parameter space. Using the same pattern every time would imprint the
//! pattern's symmetry on the node set, so each expansion applies one
//! uniformly random (Haar) orthogonal transform to the whole pattern:
//! relative geometry is preserved, absolute orientation is random.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::real::{cast, Real};

/// A set of unit vectors in ℝ^dim, stored flat in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionPattern<R> {
    dim: usize,
    data: Vec<R>,
}

impl<R: Real> DirectionPattern<R> {
    /// Number of directions.
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The j-th direction.
    pub fn get(&self, j: usize) -> &[R] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[R]> {
        self.data.chunks_exact(self.dim)
    }

    /// Applies one uniformly random orthogonal transform to every direction,
    /// writing the result into `out` (which must have matching shape).
    /// Randomness is consumed as `f64` draws so all scalar types advance the
    /// generator identically:
    ///
    /// * dim 1: a random sign,
    /// * dim 2: a random planar rotation angle,
    /// * dim ≥ 3: the orthogonal factor of a Gaussian matrix
    ///   (modified Gram–Schmidt; dividing by the positive column norms fixes
    ///   the factorization's sign freedom, making Q Haar-distributed).
    pub fn rotated_into<G: Rng>(&self, rng: &mut G, out: &mut DirectionPattern<R>) {
        assert_eq!(out.dim, self.dim);
        assert_eq!(out.data.len(), self.data.len());
        match self.dim {
            1 => {
                let flip = rng.gen::<f64>() < 0.5;
                for (o, &v) in out.data.iter_mut().zip(&self.data) {
                    *o = if flip { -v } else { v };
                }
            }
            2 => {
                let angle = cast::<R>(rng.gen::<f64>() * std::f64::consts::TAU);
                let (c, s) = (angle.cos(), angle.sin());
                for (o, v) in out.data.chunks_exact_mut(2).zip(self.data.chunks_exact(2)) {
                    o[0] = c * v[0] - s * v[1];
                    o[1] = s * v[0] + c * v[1];
                }
            }
            dim => {
                let q = haar_orthogonal::<R, G>(dim, rng);
                for (o, v) in out.data.chunks_exact_mut(dim).zip(self.data.chunks_exact(dim)) {
                    for (i, oi) in o.iter_mut().enumerate() {
                        let mut acc = R::zero();
                        for (k, &vk) in v.iter().enumerate() {
                            acc = acc + q[(i, k)] * vk;
                        }
                        *oi = acc;
                    }
                }
            }
        }
    }

    /// Allocating variant of [`Self::rotated_into`].
    pub fn rotated<G: Rng>(&self, rng: &mut G) -> DirectionPattern<R> {
        let mut out = self.clone();
        self.rotated_into(rng, &mut out);
        out
    }
}

/// Haar-distributed orthogonal matrix: QR of an i.i.d. Gaussian matrix via
/// modified Gram–Schmidt. Column norms are positive, so R's diagonal is
/// positive and Q is uniquely determined — exactly the convention under
/// which Q is Haar.
fn haar_orthogonal<R: Real, G: Rng>(dim: usize, rng: &mut G) -> Mat<R> {
    let mut q = Mat::zeros(dim, dim);
    // Column-major fill order: entries of column j are drawn consecutively.
    for j in 0..dim {
        for i in 0..dim {
            let g: f64 = rng.sample(StandardNormal);
            q[(i, j)] = cast::<R>(g);
        }
    }
    for j in 0..dim {
        // Subtract projections onto previously orthonormalized columns.
        for k in 0..j {
            let mut proj = R::zero();
            for i in 0..dim {
                proj = proj + q[(i, k)] * q[(i, j)];
            }
            for i in 0..dim {
                let v = q[(i, j)] - proj * q[(i, k)];
                q[(i, j)] = v;
            }
        }
        let mut norm_sq = R::zero();
        for i in 0..dim {
            norm_sq = norm_sq + q[(i, j)] * q[(i, j)];
        }
        let norm = norm_sq.sqrt();
        for i in 0..dim {
            q[(i, j)] = q[(i, j)] / norm;
        }
    }
    q
}

/// The paper-following defaults for the candidate count: 2 directions on
/// curves, 15 on two-parameter surfaces (also used for higher dimensions,
/// where no established default exists).
pub fn default_candidate_count(dim: usize) -> usize {
    if dim == 1 { 2 } else { 15 }
}

/// The fixed base pattern of `n` unit directions in ℝ^dim:
///
/// * dim 1: `{+1, −1}` cycled to length n,
/// * dim 2: n equally spaced angles starting at 0,
/// * dim ≥ 3: latitude bands over the last coordinate — ⌈n^{1/(dim−1)}⌉
///   bands at inclinations θ_k = π(k+½)/m, each filled with a (dim−1)-
///   dimensional pattern scaled to the band radius sin θ_k, with per-band
///   counts proportional to sin θ_k.
///
/// The realized count for dim ≥ 3 is the sum of rounded band counts and may
/// differ slightly from `n`; read it back with [`DirectionPattern::len`].
pub fn base_pattern<R: Real>(n: usize, dim: usize) -> Result<DirectionPattern<R>> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidSpacing(format!(
            "direction pattern needs n ≥ 1 and dim ≥ 1, got n={n}, dim={dim}"
        )));
    }
    let mut data: Vec<R> = Vec::with_capacity(n * dim);
    match dim {
        1 => {
            for j in 0..n {
                data.push(if j % 2 == 0 { R::one() } else { -R::one() });
            }
        }
        2 => {
            for j in 0..n {
                let phi = cast::<R>(std::f64::consts::TAU * j as f64 / n as f64);
                data.push(phi.cos());
                data.push(phi.sin());
            }
        }
        _ => {
            let m = (n as f64).powf(1.0 / (dim - 1) as f64).ceil() as usize;
            let weights: Vec<f64> =
                (0..m).map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / m as f64).sin()).collect();
            let weight_sum: f64 = weights.iter().sum();
            for (k, w) in weights.iter().enumerate() {
                let band_n = ((n as f64 * w / weight_sum).round() as usize).max(1);
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / m as f64;
                let (sin_t, cos_t) = (cast::<R>(theta.sin()), cast::<R>(theta.cos()));
                let slice = base_pattern::<R>(band_n, dim - 1)?;
                for u in slice.iter() {
                    for &ui in u {
                        data.push(sin_t * ui);
                    }
                    data.push(cos_t);
                }
            }
        }
    }
    Ok(DirectionPattern { dim, data })
}
