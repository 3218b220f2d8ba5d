//! Node-set quality metrics: nearest-neighbor spacing statistics,
//! separation distance, covering-radius estimation, and curvature-based
//! spacing-error bounds (in [`bounds`]).
//!
//! All aggregate statistics accumulate in f64 regardless of the scalar type
//! the geometry runs in.

pub mod bounds;

use crate::error::{Error, Result};
use crate::geometry::surface::{SpacingField, Surface};
use crate::nodegen::{generate_proposed, GenerationConfig, NodeSet};
use crate::real::Real;
use crate::spatial::KdTree;

/// Per-node nearest-neighbor distance statistics.
///
/// For each node, the distances to its `c` nearest neighbors are reduced to
/// a mean, minimum, and maximum; the primed (normalized) variants divide by
/// the local target spacing h(p_i), so a perfectly spaced set has every
/// normalized mean at 1.
#[derive(Clone, Debug)]
pub struct NNStats {
    /// Neighbor count used.
    pub c: usize,
    /// Per-node mean neighbor distance d̄_i.
    pub mean_d: Vec<f64>,
    /// Per-node minimum neighbor distance.
    pub min_d: Vec<f64>,
    /// Per-node maximum neighbor distance.
    pub max_d: Vec<f64>,
    /// d̄_i / h(p_i).
    pub mean_d_norm: Vec<f64>,
    /// min_i / h(p_i).
    pub min_d_norm: Vec<f64>,
    /// max_i / h(p_i).
    pub max_d_norm: Vec<f64>,
    /// Mean over nodes of the normalized mean distance.
    pub mean_of_mean_norm: f64,
    /// Sample standard deviation (N−1 denominator) of the normalized mean
    /// distance — the primary uniformity figure of merit.
    pub std_of_mean_norm: f64,
    /// Mean over nodes of (max − min) normalized spread.
    pub mean_gap_norm: f64,
}

/// Default neighbor count for spacing statistics: 2 on curves, 3 on
/// higher-dimensional parameter domains.
pub fn default_neighbor_count(param_dim: usize) -> usize {
    if param_dim == 1 {
        2
    } else {
        3
    }
}

/// Exact c-nearest-neighbor statistics for a node set.
///
/// Distances are computed with a balanced k-d tree over the ambient points;
/// each node's own entry is excluded by identity, so duplicate coordinates
/// still count as neighbors.
pub fn nn_stats<R: Real>(nodes: &NodeSet<R>, c: usize, h: &SpacingField<R>) -> Result<NNStats> {
    let n = nodes.len();
    if c < 1 || n <= c {
        return Err(Error::TooFewPoints { need: c + 1, have: n });
    }
    let pts: Vec<&[R]> = nodes.points_iter().collect();
    let tree = KdTree::build(nodes.ambient_dim(), &pts)?;
    let mut stats = NNStats {
        c,
        mean_d: Vec::with_capacity(n),
        min_d: Vec::with_capacity(n),
        max_d: Vec::with_capacity(n),
        mean_d_norm: Vec::with_capacity(n),
        min_d_norm: Vec::with_capacity(n),
        max_d_norm: Vec::with_capacity(n),
        mean_of_mean_norm: 0.0,
        std_of_mean_norm: 0.0,
        mean_gap_norm: 0.0,
    };
    for i in 0..n {
        // Query c+1 and drop the node itself (matched by id, not by
        // distance, so coincident points remain genuine neighbors).
        let mut nbrs = tree.knn(nodes.point(i), c + 1);
        if let Some(pos) = nbrs.iter().position(|nb| nb.id as usize == i) {
            nbrs.remove(pos);
        }
        nbrs.truncate(c);
        debug_assert_eq!(nbrs.len(), c);
        let mut sum = 0.0;
        let mut dmin = f64::INFINITY;
        let mut dmax = 0.0f64;
        for nb in &nbrs {
            let dist = nb.dist_sq.to_f64().unwrap().sqrt();
            sum += dist;
            dmin = dmin.min(dist);
            dmax = dmax.max(dist);
        }
        let mean = sum / c as f64;
        let h_i = h.eval(nodes.point(i)).to_f64().unwrap();
        stats.mean_d.push(mean);
        stats.min_d.push(dmin);
        stats.max_d.push(dmax);
        stats.mean_d_norm.push(mean / h_i);
        stats.min_d_norm.push(dmin / h_i);
        stats.max_d_norm.push(dmax / h_i);
    }
    stats.mean_of_mean_norm = mean_f64(&stats.mean_d_norm);
    stats.std_of_mean_norm = std_f64(&stats.mean_d_norm);
    stats.mean_gap_norm = stats
        .max_d_norm
        .iter()
        .zip(&stats.min_d_norm)
        .map(|(mx, mn)| mx - mn)
        .sum::<f64>()
        / n as f64;
    Ok(stats)
}

fn mean_f64(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (N−1 denominator); 0 for fewer than 2 values.
fn std_f64(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean_f64(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Separation distance: half the minimum pairwise distance, computed
/// exactly via an all-points nearest-neighbor pass over a balanced tree.
pub fn separation_distance<R: Real>(nodes: &NodeSet<R>) -> Result<R> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::TooFewPoints { need: 2, have: n });
    }
    let pts: Vec<&[R]> = nodes.points_iter().collect();
    let tree = KdTree::build(nodes.ambient_dim(), &pts)?;
    let mut min_sq = R::infinity();
    for i in 0..n {
        for nb in tree.knn(nodes.point(i), 2) {
            if nb.id as usize != i && nb.dist_sq < min_sq {
                min_sq = nb.dist_sq;
            }
        }
    }
    Ok(min_sq.sqrt() / (R::one() + R::one()))
}

/// Minimum pairwise distance (twice the separation distance) — the quantity
/// the spacing-error lower bound h − |Δh| applies to.
pub fn min_pairwise_distance<R: Real>(nodes: &NodeSet<R>) -> Result<R> {
    let half = separation_distance(nodes)?;
    Ok(half + half)
}

/// Largest distance from any probe point to its nearest node: the covering
/// radius of `nodes` measured against an explicit probe set.
pub fn cover_radius<R: Real>(nodes: &NodeSet<R>, probes: &NodeSet<R>) -> Result<R> {
    if nodes.ambient_dim() != probes.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: nodes.ambient_dim(),
            got: probes.ambient_dim(),
        });
    }
    let pts: Vec<&[R]> = nodes.points_iter().collect();
    let tree = KdTree::build(nodes.ambient_dim(), &pts)?;
    let mut worst = R::zero();
    for p in probes.points_iter() {
        let d = tree.nearest(p)?.dist_sq;
        if d > worst {
            worst = d;
        }
    }
    Ok(worst.sqrt())
}

/// Estimates the maximum empty-sphere radius r_max of a node set on a
/// surface: the surface is re-sampled densely (advancing front at spacing
/// h·refinement) and the covering radius against those probes is returned.
///
/// `refinement` must lie in (0, 1); 1/5 is the usual default — fine enough
/// that probe discretization error is small next to r_max itself.
pub fn max_empty_sphere<R: Real>(
    surface: &Surface<R>,
    nodes: &NodeSet<R>,
    h: &SpacingField<R>,
    refinement: R,
    seed: u64,
) -> Result<R> {
    if !(refinement > R::zero()) || !(refinement < R::one()) {
        return Err(Error::InvalidSpacing(format!(
            "probe refinement must lie in (0, 1), got {refinement:?}"
        )));
    }
    let cfg = GenerationConfig { rng_seed: seed, ..GenerationConfig::default() };
    let probes = generate_proposed(surface, &h.scaled(refinement), &[], &cfg)?;
    cover_radius(nodes, &probes.nodes)
}

/// Separation and covering radii of a node set, normalized by a reference
/// spacing.
#[derive(Clone, Debug)]
pub struct UniformityReport<R> {
    /// Half the minimum pairwise distance.
    pub r_min: R,
    /// Probe-estimated maximum empty-sphere radius.
    pub r_max_estimate: R,
    /// Spacing the ratios are normalized by.
    pub h_reference: R,
    pub r_min_over_h: f64,
    pub r_max_over_h: f64,
}

/// Computes both uniformity radii for a node set.
pub fn uniformity_report<R: Real>(
    surface: &Surface<R>,
    nodes: &NodeSet<R>,
    h: &SpacingField<R>,
    h_reference: R,
    refinement: R,
    seed: u64,
) -> Result<UniformityReport<R>> {
    let r_min = separation_distance(nodes)?;
    let r_max = max_empty_sphere(surface, nodes, h, refinement, seed)?;
    let href = h_reference.to_f64().unwrap();
    Ok(UniformityReport {
        r_min,
        r_max_estimate: r_max,
        h_reference,
        r_min_over_h: r_min.to_f64().unwrap() / href,
        r_max_over_h: r_max.to_f64().unwrap() / href,
    })
}

/// An equal-width histogram over [lo, hi]; the last bin is right-closed so
/// `hi` itself is counted.
#[derive(Clone, Debug)]
pub struct Histogram {
    pub bin_left: Vec<f64>,
    pub bin_right: Vec<f64>,
    pub count: Vec<u64>,
}

impl Histogram {
    /// Bins `values` into `bins` equal-width bins spanning [lo, hi].
    /// Values outside the range are dropped.
    pub fn new(values: &[f64], bins: usize, lo: f64, hi: f64) -> Self {
        assert!(bins > 0 && hi > lo, "histogram needs bins > 0 and hi > lo");
        let width = (hi - lo) / bins as f64;
        let mut h = Histogram {
            bin_left: (0..bins).map(|i| lo + i as f64 * width).collect(),
            bin_right: (1..=bins).map(|i| lo + i as f64 * width).collect(),
            count: vec![0; bins],
        };
        h.bin_right[bins - 1] = hi;
        for &v in values {
            if v < lo || v > hi {
                continue;
            }
            let mut b = ((v - lo) / width) as usize;
            if b >= bins {
                b = bins - 1;
            }
            h.count[b] += 1;
        }
        h
    }

    /// Writes `bin_left,bin_right,count` rows.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "bin_left,bin_right,count")?;
        for i in 0..self.count.len() {
            writeln!(w, "{:.16e},{:.16e},{}", self.bin_left[i], self.bin_right[i], self.count[i])?;
        }
        Ok(())
    }
}
