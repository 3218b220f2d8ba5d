//! JSON report shapes. Reports carry no wall-clock values (except the
//! bench report, which exists for them), so identical runs serialize to
//! identical bytes.

use serde::{Deserialize, Serialize};

/// One sampler's metrics on one setup.
#[derive(Serialize, Deserialize, Clone)]
pub struct AlgorithmReport {
    pub algorithm: String,
    pub surface: String,
    pub h: f64,
    /// Candidate directions per expansion (advancing front only).
    pub n: Option<usize>,
    /// Supersampling factor (supersampled only).
    pub tau: Option<f64>,
    pub seed: u64,
    pub rng_id: String,
    pub metrics: Metrics,
    /// Present when the surface carries analytic Hessians.
    pub bounds: Option<BoundsSummary>,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct Metrics {
    pub node_count: u64,
    /// Neighbor count used for the spacing statistics.
    pub c: usize,
    /// Mean over nodes of the normalized mean neighbor distance d̄′.
    pub mean_d_norm: f64,
    /// Sample standard deviation of d̄′ — the uniformity figure of merit.
    pub std_d_norm: f64,
    /// Mean normalized (max − min) neighbor-distance spread.
    pub mean_gap_norm: f64,
    /// Half the minimum pairwise distance.
    pub r_min: f64,
    /// Probe-estimated maximum empty-sphere radius.
    pub r_max_estimate: f64,
    pub r_min_over_h: f64,
    pub r_max_over_h: f64,
    pub min_pairwise: f64,
}

/// Spacing-error bound evaluation attached to a report.
#[derive(Serialize, Deserialize, Clone)]
pub struct BoundsSummary {
    /// Global bound on |Δh| over the whole surface.
    pub global: f64,
    /// Largest per-pair bound among the evaluation samples.
    pub per_pair_max: f64,
    /// Largest per-point bound among the evaluation samples.
    pub per_point_max: f64,
    /// Largest measured |Δh| among the evaluation samples.
    pub measured_max: f64,
    pub hessian_max: f64,
    pub jacobian_min: f64,
    pub h_max: f64,
    pub sample_count: usize,
    pub skipped_samples: usize,
    pub ordering_ok: bool,
    pub measured_within_per_pair: bool,
    /// min pairwise distance ≥ h − global.
    pub conforms: bool,
}

/// One point of a bounds sweep (bounds.json is a list of these).
#[derive(Serialize, Deserialize, Clone)]
pub struct BoundsSweepEntry {
    pub h: f64,
    pub node_count: u64,
    pub min_pairwise: f64,
    #[serde(flatten)]
    pub bounds: BoundsSummary,
}

/// Timing results of a bench sweep.
#[derive(Serialize, Deserialize, Clone)]
pub struct BenchReport {
    pub algorithm: String,
    pub surface: String,
    pub seed: u64,
    pub rng_id: String,
    pub reps: usize,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of ln(median time) vs ln(node count); absent
    /// with fewer than two points.
    pub slope: Option<f64>,
    /// Decades of node-count range covered by the sweep.
    pub decades: f64,
    /// False when the sweep spans less than one decade of N (slope fits on
    /// narrow ranges are noise).
    pub slope_reliable: bool,
}

#[derive(Serialize, Deserialize, Clone)]
pub struct BenchPoint {
    pub h: f64,
    pub node_count: u64,
    pub median_s: f64,
    pub times_s: Vec<f64>,
}
