//! Uniform background-grid index: the constant-spacing fast path.
//!
//! Points are bucketed into axis-aligned cells of a fixed edge length.
//! With cell edge h/√d a cell's diagonal is h, so a generation run with
//! minimum separation ≈ h keeps O(1) points per cell and queries touch O(1)
//! cells — O(1) amortized insert and query, versus the tree's O(log N).
//!
//! Queries are exact for *any* radius (the scanned cell range is derived
//! from the query bound, growing shell by shell until provably done), so
//! swapping this index for the k-d tree changes performance, never results.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::real::Real;
use crate::spatial::{closer, Neighbor, PointStore};

/// Uniform grid over d-dimensional points with a fixed cell edge.
#[derive(Clone, Debug)]
pub struct GridIndex<R> {
    points: PointStore<R>,
    cell: f64,
    /// Cell coordinate vector (FNV-mixed) → ids of points in that cell.
    /// Hash collisions merely merge buckets: every lookup verifies true
    /// distances, so a superset of candidates is always safe.
    buckets: HashMap<u64, Vec<u32>>,
    /// Scratch for cell coordinates, reused across calls.
    dim: usize,
}

impl<R: Real> GridIndex<R> {
    /// Empty grid with the given cell edge length.
    pub fn new(dim: usize, cell: R) -> Result<Self> {
        assert!(dim >= 1, "dimension must be at least 1");
        let cell = cell.to_f64().unwrap_or(f64::NAN);
        if !(cell > 0.0) || !cell.is_finite() {
            return Err(Error::InvalidSpacing(format!(
                "grid cell edge must be positive and finite, got {cell}"
            )));
        }
        Ok(GridIndex { points: PointStore::new(dim), cell, buckets: HashMap::new(), dim })
    }

    /// Grid sized for a generation run with target spacing `h` over
    /// d-dimensional ambient points: cell edge h/√d (cell diagonal = h).
    pub fn for_spacing(dim: usize, h: R) -> Result<Self> {
        let h = h.to_f64().unwrap_or(f64::NAN);
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidSpacing(format!("spacing must be positive, got {h}")));
        }
        let cell = h / (dim as f64).sqrt();
        GridIndex::new(dim, crate::real::cast::<R>(cell))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stored coordinates of a point by insertion id.
    pub fn point(&self, id: u32) -> &[R] {
        self.points.get(id)
    }

    /// FNV-1a over the integer cell coordinates. Collisions are harmless
    /// (see `buckets`), so no coordinate-vector key storage is needed.
    fn cell_key(&self, coords: impl Iterator<Item = i64>) -> u64 {
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for c in coords {
            for byte in c.to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        hash
    }

    fn cell_coord(&self, v: R) -> i64 {
        (v.to_f64().unwrap() / self.cell).floor() as i64
    }

    fn key_of(&self, p: &[R]) -> u64 {
        self.cell_key(p.iter().map(|&v| self.cell_coord(v)))
    }

    /// Stores a point; returns its insertion id.
    pub fn insert(&mut self, p: &[R]) -> Result<u32> {
        if p.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.len() });
        }
        let key = self.key_of(p);
        let id = self.points.push(p);
        self.buckets.entry(key).or_default().push(id);
        Ok(id)
    }

    /// Exact nearest stored point; ties broken by lowest insertion id.
    pub fn nearest(&self, q: &[R]) -> Result<Neighbor<R>> {
        if self.is_empty() {
            return Err(Error::EmptyIndex);
        }
        if q.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: q.len() });
        }
        Ok(self
            .scan(q, None)
            .expect("nonempty grid yields a nearest point"))
    }

    /// Exact nearest stored point with `dist_sq` strictly below `bound_sq`;
    /// `None` when no stored point is that close.
    pub fn nearest_below(&self, q: &[R], bound_sq: R) -> Option<Neighbor<R>> {
        debug_assert_eq!(q.len(), self.dim);
        if !(bound_sq > R::zero()) {
            return None;
        }
        self.scan(q, Some(bound_sq))
    }

    /// Shell-by-shell scan around the query's cell. Shell k holds the cells
    /// at Chebyshev distance k; any point in shell k is at least
    /// (k−1)·cell away, so once that floor exceeds the incumbent (and the
    /// cap), the scan is provably complete.
    fn scan(&self, q: &[R], cap: Option<R>) -> Option<Neighbor<R>> {
        if self.is_empty() {
            return None;
        }
        let center: Vec<i64> = q.iter().map(|&v| self.cell_coord(v)).collect();
        let mut best: Option<Neighbor<R>> = None;
        let mut offsets: Vec<i64> = vec![0; self.dim];
        for shell in 0i64.. {
            // Provable-completion test: nothing in this or any farther shell
            // can beat the incumbent / fall under the cap. With at least one
            // stored point and no cap, growing shells eventually reach it,
            // so the loop always terminates.
            let floor = (shell - 1).max(0) as f64 * self.cell;
            let floor_sq = floor * floor;
            let beats_best = match &best {
                Some(b) => floor_sq <= b.dist_sq.to_f64().unwrap(),
                None => true,
            };
            let under_cap = match cap {
                Some(c) => floor_sq < c.to_f64().unwrap(),
                None => true,
            };
            if !(beats_best && under_cap) {
                break;
            }
            self.visit_shell(&center, &mut offsets, 0, shell, q, cap, &mut best);
        }
        best
    }

    /// Recursively enumerates cells whose offset vector has Chebyshev norm
    /// exactly `shell`, checking each bucket against the incumbent.
    #[allow(clippy::too_many_arguments)]
    fn visit_shell(
        &self,
        center: &[i64],
        offsets: &mut Vec<i64>,
        axis: usize,
        shell: i64,
        q: &[R],
        cap: Option<R>,
        best: &mut Option<Neighbor<R>>,
    ) {
        if axis == self.dim {
            if offsets.iter().map(|o| o.abs()).max().unwrap_or(0) != shell {
                return;
            }
            let key = self.cell_key(center.iter().zip(offsets.iter()).map(|(c, o)| c + o));
            if let Some(bucket) = self.buckets.get(&key) {
                for &id in bucket {
                    let d2 = self.points.dist_sq_to(id, q);
                    if let Some(c) = cap {
                        if d2 >= c {
                            continue;
                        }
                    }
                    let take = match best {
                        Some(b) => closer(d2, id, b.dist_sq, b.id),
                        None => true,
                    };
                    if take {
                        *best = Some(Neighbor { id, dist_sq: d2 });
                    }
                }
            }
            return;
        }
        for o in -shell..=shell {
            offsets[axis] = o;
            self.visit_shell(center, offsets, axis + 1, shell, q, cap, best);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_bad_cell_sizes() {
        assert!(GridIndex::<f64>::new(2, 0.0).is_err());
        assert!(GridIndex::<f64>::new(2, -1.0).is_err());
        assert!(GridIndex::<f64>::for_spacing(2, f64::NAN).is_err());
    }

    #[test]
    fn far_apart_points_found_exactly() {
        let mut g = GridIndex::new(3, 0.1).unwrap();
        g.insert(&[0.0, 0.0, 0.0]).unwrap();
        g.insert(&[5.0, 5.0, 5.0]).unwrap();
        g.insert(&[-3.0, 2.0, 9.0]).unwrap();
        let n = g.nearest(&[4.9, 5.0, 5.1]).unwrap();
        assert_eq!(n.id, 1);
    }

    #[test]
    fn empty_grid_reports_error() {
        let g = GridIndex::<f64>::new(2, 1.0).unwrap();
        assert!(matches!(g.nearest(&[0.0, 0.0]), Err(Error::EmptyIndex)));
        assert!(g.nearest_below(&[0.0, 0.0], 1.0).is_none());
    }

    #[test]
    fn negative_coordinates_bucket_correctly() {
        let mut g = GridIndex::new(1, 1.0).unwrap();
        g.insert(&[-0.5]).unwrap();
        g.insert(&[0.5]).unwrap();
        let n = g.nearest(&[-0.4]).unwrap();
        assert_eq!(n.id, 0);
    }

    #[test]
    fn matches_kdtree_on_random_interleaving() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut g = GridIndex::new(3, 0.05).unwrap();
        let mut t = crate::spatial::KdTree::new(3);
        for step in 0..3000 {
            let p: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
            assert_eq!(g.insert(&p).unwrap(), t.insert(&p).unwrap());
            if step % 2 == 0 {
                let q: Vec<f64> = (0..3).map(|_| rng.gen::<f64>()).collect();
                let a = g.nearest(&q).unwrap();
                let b = t.nearest(&q).unwrap();
                assert_eq!((a.id, a.dist_sq), (b.id, b.dist_sq));
                // Radius-capped query agreement, radius far beyond one cell.
                let cap = 0.3 + rng.gen::<f64>();
                assert_eq!(g.nearest_below(&q, cap), t.nearest_below(&q, cap));
            }
        }
    }

    #[test]
    fn nearest_below_is_strict_at_the_boundary() {
        let mut g = GridIndex::new(2, 0.25).unwrap();
        g.insert(&[0.0, 0.0]).unwrap();
        assert!(g.nearest_below(&[1.0, 0.0], 1.0).is_none());
        assert!(g.nearest_below(&[1.0, 0.0], 1.0 + 1e-9).is_some());
    }

    #[test]
    fn query_radius_spanning_many_shells() {
        // Sparse far-apart points force multi-shell scans.
        let mut g = GridIndex::new(2, 0.01).unwrap();
        g.insert(&[1.0, 0.0]).unwrap();
        g.insert(&[0.0, 0.8]).unwrap();
        let n = g.nearest(&[0.0, 0.0]).unwrap();
        assert_eq!(n.id, 1);
        assert!(g.nearest_below(&[0.0, 0.0], 0.64).is_none());
        assert_eq!(g.nearest_below(&[0.0, 0.0], 0.65).map(|n| n.id), Some(1));
    }
}
