//! Incremental nearest-neighbor indexes over ambient points.
//!
//! The generator interleaves inserts and nearest queries (one insert per
//! accepted node, one query per candidate), so both structures here are
//! built for that access pattern:
//!
//! * [`KdTree`]: axis-cycled k-d tree with partial rebuilds that keep the
//!   depth logarithmic under *any* insertion order (see the module docs in
//!   [`kdtree`] for why advancing-front order makes this necessary),
//! * [`GridIndex`]: uniform background grid, the fast path for constant
//!   spacing.
//!
//! Every distance both structures compute goes through [`crate::real::dist_sq`],
//! which keeps acceptance decisions reproducible across index kinds: a
//! candidate's distance to its parent equals the acceptance threshold
//! *exactly*, so two differently-rounded distance expressions would disagree
//! on the accept/reject boundary.

pub mod grid;
pub mod kdtree;

pub use grid::GridIndex;
pub use kdtree::KdTree;

use crate::error::{Error, Result};
use crate::real::{dist_sq, Real};

/// One answer from a proximity query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor<R> {
    /// Insertion id of the stored point (0-based, in insertion order).
    pub id: u32,
    /// Squared Euclidean distance to the query.
    pub dist_sq: R,
}

/// Lexicographic "closer" on (squared distance, id): distance first, lowest
/// insertion id breaking ties. The single comparison rule both index kinds
/// use, so they return identical answers on identical point sets.
#[inline]
pub(crate) fn closer<R: Real>(d2: R, id: u32, than_d2: R, than_id: u32) -> bool {
    d2 < than_d2 || (d2 == than_d2 && id < than_id)
}

/// Flat storage of d-dimensional points in insertion order, shared by both
/// index kinds.
#[derive(Clone, Debug, Default)]
pub(crate) struct PointStore<R> {
    dim: usize,
    data: Vec<R>,
}

impl<R: Real> PointStore<R> {
    pub fn new(dim: usize) -> Self {
        PointStore { dim, data: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 { 0 } else { self.data.len() / self.dim }
    }

    pub fn push(&mut self, p: &[R]) -> u32 {
        debug_assert_eq!(p.len(), self.dim);
        let id = self.len() as u32;
        self.data.extend_from_slice(p);
        id
    }

    pub fn get(&self, id: u32) -> &[R] {
        let start = id as usize * self.dim;
        &self.data[start..start + self.dim]
    }

    #[inline]
    pub fn dist_sq_to(&self, id: u32, q: &[R]) -> R {
        dist_sq(self.get(id), q)
    }
}

/// Which index implementation a generation run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexKind {
    KdTree,
    Grid,
}

impl std::str::FromStr for IndexKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kdtree" => Ok(IndexKind::KdTree),
            "grid" => Ok(IndexKind::Grid),
            other => Err(Error::InvalidSpacing(format!(
                "unknown index kind `{other}` (expected `kdtree` or `grid`)"
            ))),
        }
    }
}

/// Runtime-selected proximity index with a common interface.
#[derive(Clone, Debug)]
pub enum SpatialIndex<R> {
    KdTree(KdTree<R>),
    Grid(GridIndex<R>),
}

impl<R: Real> SpatialIndex<R> {
    /// Empty k-d tree index over `dim`-dimensional points.
    pub fn kdtree(dim: usize) -> Self {
        SpatialIndex::KdTree(KdTree::new(dim))
    }

    /// Empty grid index with the given cell edge length.
    pub fn grid(dim: usize, cell: R) -> Result<Self> {
        Ok(SpatialIndex::Grid(GridIndex::new(dim, cell)?))
    }

    pub fn len(&self) -> usize {
        match self {
            SpatialIndex::KdTree(t) => t.len(),
            SpatialIndex::Grid(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stored coordinates of a point by insertion id.
    pub fn point(&self, id: u32) -> &[R] {
        match self {
            SpatialIndex::KdTree(t) => t.point(id),
            SpatialIndex::Grid(g) => g.point(id),
        }
    }

    /// Stores a point; returns its insertion id.
    pub fn insert(&mut self, p: &[R]) -> Result<u32> {
        match self {
            SpatialIndex::KdTree(t) => t.insert(p),
            SpatialIndex::Grid(g) => g.insert(p),
        }
    }

    /// Exact nearest stored point (ties by lowest insertion id).
    pub fn nearest(&self, q: &[R]) -> Result<Neighbor<R>> {
        match self {
            SpatialIndex::KdTree(t) => t.nearest(q),
            SpatialIndex::Grid(g) => g.nearest(q),
        }
    }

    /// Exact nearest stored point with squared distance strictly below
    /// `bound_sq`, or `None` when every stored point is at least that far
    /// away. The generator's acceptance test: accept a candidate iff
    /// `nearest_below(c, ĥ²)` is `None`.
    pub fn nearest_below(&self, q: &[R], bound_sq: R) -> Option<Neighbor<R>> {
        match self {
            SpatialIndex::KdTree(t) => t.nearest_below(q, bound_sq),
            SpatialIndex::Grid(g) => g.nearest_below(q, bound_sq),
        }
    }
}
