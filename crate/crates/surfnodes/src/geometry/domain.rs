//! Parametric domains: a characteristic function plus an enclosing box.

use std::sync::Arc;

use rand::Rng;

use crate::real::{cast, Real};

/// A parametric domain Ξ ⊆ ℝ^{d_Ξ}, described by a membership predicate and
/// an axis-aligned bounding box that encloses it.
///
/// Supplying the domain as predicate + box (rather than geometric primitives)
/// keeps irregular domains expressible and matches how the generator consumes
/// it: candidates are filtered by `contains`, start parameters are
/// rejection-sampled from the box.
#[derive(Clone)]
pub struct ParamDomain<R> {
    dim: usize,
    lo: Vec<R>,
    hi: Vec<R>,
    contains: Arc<dyn Fn(&[R]) -> bool + Send + Sync>,
    measure: Option<R>,
}

impl<R: Real> ParamDomain<R> {
    /// Box domain with per-axis choice of whether the upper face is included.
    /// Lower faces are always included. `measure`, when the exact |Ξ| is
    /// known, spares the supersampling baseline a Monte Carlo estimate.
    pub fn axis_box(lo: Vec<R>, hi: Vec<R>, upper_closed: Vec<bool>, measure: Option<R>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert_eq!(lo.len(), upper_closed.len());
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a < b),
            "bounding box must have positive extent in every axis"
        );
        let dim = lo.len();
        let (plo, phi) = (lo.clone(), hi.clone());
        let contains = Arc::new(move |x: &[R]| {
            x.len() == dim
                && x.iter().enumerate().all(|(j, &v)| {
                    v >= plo[j] && if upper_closed[j] { v <= phi[j] } else { v < phi[j] }
                })
        });
        ParamDomain { dim, lo, hi, contains, measure }
    }

    /// Fully general domain: arbitrary predicate inside a bounding box.
    /// Every point with `contains(x) == true` must lie within the box.
    pub fn with_predicate(
        lo: Vec<R>,
        hi: Vec<R>,
        contains: Arc<dyn Fn(&[R]) -> bool + Send + Sync>,
        measure: Option<R>,
    ) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(
            lo.iter().zip(&hi).all(|(a, b)| a < b),
            "bounding box must have positive extent in every axis"
        );
        ParamDomain { dim: lo.len(), lo, hi, contains, measure }
    }

    /// Parametric dimension d_Ξ.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Lower corner of the bounding box.
    pub fn lo(&self) -> &[R] {
        &self.lo
    }

    /// Upper corner of the bounding box.
    pub fn hi(&self) -> &[R] {
        &self.hi
    }

    /// Exact measure |Ξ| when known.
    pub fn measure(&self) -> Option<R> {
        self.measure
    }

    /// Measure of the bounding box (product of extents).
    pub fn bbox_measure(&self) -> R {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| *b - *a)
            .fold(R::one(), |acc, e| acc * e)
    }

    /// Membership test (the characteristic function χ_Ξ).
    pub fn contains(&self, x: &[R]) -> bool {
        (self.contains)(x)
    }

    /// Draws one point uniformly from the bounding box (not necessarily
    /// inside Ξ). Randomness is consumed as `f64` so that all scalar types
    /// advance the generator identically.
    pub fn sample_bbox<G: Rng>(&self, rng: &mut G, out: &mut [R]) {
        debug_assert_eq!(out.len(), self.dim);
        for j in 0..self.dim {
            let u: f64 = rng.gen();
            out[j] = self.lo[j] + (self.hi[j] - self.lo[j]) * cast::<R>(u);
        }
    }
}

impl<R: Real> std::fmt::Debug for ParamDomain<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamDomain")
            .field("dim", &self.dim)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("measure", &self.measure)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_open_upper_face() {
        let d = ParamDomain::<f64>::axis_box(vec![0.0], vec![1.0], vec![false], None);
        assert!(d.contains(&[0.0]));
        assert!(d.contains(&[0.999]));
        assert!(!d.contains(&[1.0]));
    }

    #[test]
    fn closed_upper_face() {
        let d = ParamDomain::<f64>::axis_box(vec![0.0, 0.0], vec![1.0, 2.0], vec![true, true], None);
        assert!(d.contains(&[1.0, 2.0]));
        assert!(!d.contains(&[1.0, 2.0 + 1e-12]));
        assert_eq!(d.bbox_measure(), 2.0);
    }

    #[test]
    fn bbox_samples_stay_inside_box() {
        use rand::SeedableRng;
        let d = ParamDomain::<f64>::axis_box(vec![-1.0, 3.0], vec![1.0, 4.0], vec![false, false], None);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut x = [0.0; 2];
        for _ in 0..1000 {
            d.sample_bbox(&mut rng, &mut x);
            assert!(x[0] >= -1.0 && x[0] < 1.0);
            assert!(x[1] >= 3.0 && x[1] < 4.0);
        }
    }
}
