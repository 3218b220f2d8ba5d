//! The three node-set samplers.
//!
//! * [`generate_proposed`] — advancing front: grow the set outward from a
//!   start node, stepping in parameter space by a first-order-corrected
//!   amount so that steps land ≈ h apart in *ambient* space, keeping a
//!   candidate only when no existing node is closer than the step actually
//!   achieved.
//! * [`generate_naive`] — parametric lattice of spacing h mapped through r;
//!   ambient spacing distorts wherever the map stretches or compresses.
//! * [`generate_supersampled`] — parametric lattice of spacing h/γ mapped in
//!   sequence and thinned to a minimum ambient separation of h.
//!
//! All three are deterministic functions of (surface, spacing, seeds,
//! config): reruns reproduce node sets bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::directions::{base_pattern, default_candidate_count};
use crate::error::{Error, Result};
use crate::geometry::monte_carlo_measures;
use crate::geometry::surface::{SpacingField, Surface};
use crate::real::{cast, dist_sq, dot, Real};
use crate::spatial::{GridIndex, IndexKind, SpatialIndex};

/// Number of uniform bounding-box draws before giving up on finding a start
/// parameter inside the domain.
const START_ATTEMPTS: u64 = 1_000_000;

/// Monte Carlo sample count for estimating |Ξ| and |∂Ω| when the geometry
/// does not carry exact values.
const MEASURE_SAMPLES: usize = 1_000_000;

/// Sub-seed mixer: measure estimation draws from its own stream so that it
/// neither consumes nor depends on the generation stream.
const MEASURE_SEED_MIX: u64 = 0xA5A5_5A5A_DEAD_BEEF;

/// A generated node set: parameters, their images on the surface, and the
/// target spacing at each node, stored flat in insertion order.
#[derive(Clone, Debug)]
pub struct NodeSet<R> {
    param_dim: usize,
    ambient_dim: usize,
    params: Vec<R>,
    points: Vec<R>,
    spacing: Vec<R>,
}

impl<R: Real> NodeSet<R> {
    fn new(param_dim: usize, ambient_dim: usize) -> Self {
        NodeSet { param_dim, ambient_dim, params: Vec::new(), points: Vec::new(), spacing: Vec::new() }
    }

    /// Builds a set from flat row-major storage. Lengths must agree: one
    /// parameter row, one point row, and one spacing value per node.
    pub fn from_raw(
        param_dim: usize,
        ambient_dim: usize,
        params: Vec<R>,
        points: Vec<R>,
        spacing: Vec<R>,
    ) -> Result<Self> {
        let n = spacing.len();
        if param_dim == 0 || ambient_dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if params.len() != n * param_dim {
            return Err(Error::DimensionMismatch { expected: n * param_dim, got: params.len() });
        }
        if points.len() != n * ambient_dim {
            return Err(Error::DimensionMismatch { expected: n * ambient_dim, got: points.len() });
        }
        Ok(NodeSet { param_dim, ambient_dim, params, points, spacing })
    }

    pub fn len(&self) -> usize {
        self.spacing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacing.is_empty()
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Parameter of the i-th node.
    pub fn param(&self, i: usize) -> &[R] {
        &self.params[i * self.param_dim..(i + 1) * self.param_dim]
    }

    /// Surface point of the i-th node.
    pub fn point(&self, i: usize) -> &[R] {
        &self.points[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    /// Target spacing h(p_i) of the i-th node.
    pub fn spacing(&self, i: usize) -> R {
        self.spacing[i]
    }

    /// Iterates over surface points.
    pub fn points_iter(&self) -> impl Iterator<Item = &[R]> {
        self.points.chunks_exact(self.ambient_dim)
    }

    fn push(&mut self, param: &[R], point: &[R], h: R) {
        debug_assert_eq!(param.len(), self.param_dim);
        debug_assert_eq!(point.len(), self.ambient_dim);
        self.params.extend_from_slice(param);
        self.points.extend_from_slice(point);
        self.spacing.push(h);
    }

    /// Writes the set as CSV: header `x0,…,x{d−1},xi0,…,xi{dΞ−1},h`, one row
    /// per node, every value in full-precision scientific notation so reruns
    /// can be compared byte for byte.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        for i in 0..self.ambient_dim {
            write!(w, "{}x{}", if i == 0 { "" } else { "," }, i)?;
        }
        for i in 0..self.param_dim {
            write!(w, ",xi{i}")?;
        }
        writeln!(w, ",h")?;
        for i in 0..self.len() {
            for (k, v) in self.point(i).iter().enumerate() {
                write!(w, "{}{:.16e}", if k == 0 { "" } else { "," }, v.to_f64().unwrap())?;
            }
            for v in self.param(i) {
                write!(w, ",{:.16e}", v.to_f64().unwrap())?;
            }
            writeln!(w, ",{:.16e}", self.spacing(i).to_f64().unwrap())?;
        }
        Ok(())
    }
}

/// Tuning knobs shared by the samplers.
#[derive(Clone, Debug)]
pub struct GenerationConfig {
    /// Directions per expansion (advancing front only). `None` picks the
    /// dimension default: 2 for curves, 15 otherwise.
    pub n_candidates: Option<usize>,
    /// Seed for all randomness in the run (rotations, start sampling,
    /// measure estimation).
    pub rng_seed: u64,
    /// Safety cap on emitted nodes; reaching it truncates the run and sets
    /// [`GenerationDiagnostics::truncated`].
    pub max_nodes: usize,
    /// Proximity index implementation.
    pub index_kind: IndexKind,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            n_candidates: None,
            rng_seed: 0,
            max_nodes: 10_000_000,
            index_kind: IndexKind::KdTree,
        }
    }
}

/// Counters describing what happened during a run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GenerationDiagnostics {
    /// Candidates dropped because ‖∇r(ξ)s‖ fell below the singularity
    /// threshold (rank-deficient step direction).
    pub singular_skips: u64,
    /// Candidates whose parameter left the domain.
    pub out_of_domain: u64,
    /// Candidates with an existing node closer than the step length.
    pub proximity_rejects: u64,
    /// Candidates with a non-finite or zero-length ambient step (degenerate
    /// map values, e.g. at parametrization singularities).
    pub degenerate_skips: u64,
    /// True when the run stopped at the `max_nodes` cap.
    pub truncated: bool,
    /// Supersampling factor γ actually used (supersampling only).
    pub gamma: Option<f64>,
    /// Surface area used: exact when the surface carries one, otherwise the
    /// Monte Carlo estimate (supersampling only).
    pub area_used: Option<f64>,
    /// Domain measure used, as above (supersampling only).
    pub measure_used: Option<f64>,
}

/// A sampler's output: the node set plus run diagnostics. For the advancing
/// front, `accept_dists_sq` records each node's squared acceptance
/// threshold ĥ² (0 for seed nodes), making the acceptance invariant
/// checkable after the fact: every node's squared distance to each earlier
/// node is ≥ its threshold.
#[derive(Clone, Debug)]
pub struct Generation<R> {
    pub nodes: NodeSet<R>,
    pub diagnostics: GenerationDiagnostics,
    pub accept_dists_sq: Vec<R>,
}

/// First-order candidate step: from parameter ξ along unit direction s,
/// a step of α = h/‖∇r(ξ)s‖ lands ≈ h away in ambient space. Returns
/// (η, α) with η = ξ + αs. Errors on a singular direction
/// (‖∇r(ξ)s‖ < 1e-14).
pub fn propose_candidate<R: Real>(
    xi: &[R],
    s: &[R],
    h_i: R,
    surface: &Surface<R>,
) -> Result<(Vec<R>, R)> {
    let mut jac = surface.jacobian_buffer();
    surface.jacobian_into(xi, &mut jac);
    let mut w = vec![R::zero(); surface.ambient_dim()];
    jac.mul_vec(s, &mut w);
    let norm = dot(&w, &w).sqrt();
    if !(norm >= cast::<R>(1e-14)) {
        return Err(Error::InvalidSpacing(format!(
            "singular step direction: ‖∇r(ξ)s‖ = {:?}",
            norm
        )));
    }
    let alpha = h_i / norm;
    let eta = xi.iter().zip(s).map(|(&x, &sk)| x + alpha * sk).collect();
    Ok((eta, alpha))
}

/// Advancing-front generation.
///
/// The output array doubles as the FIFO queue: a cursor walks it from the
/// front while accepted candidates are appended at the back. For each
/// dequeued node the Jacobian is evaluated once and the base direction
/// pattern is rotated once; each of the n directions yields a candidate
/// η = ξ + (h/‖∇r(ξ)s‖)s, kept only if η stays in the domain and no
/// existing node lies strictly closer to r(η) than the step actually
/// achieved, ĥ = ‖r(η) − r(ξ)‖. Comparing against ĥ rather than h(p)
/// matters: where the first-order step overshoots (ĥ > h), comparing with
/// h(p) would still be fine, but where it undershoots, the expanding node
/// itself would sit closer than h(p) and would veto every frontier
/// candidate, stalling the front.
///
/// `seeds` may be empty (a start parameter is then drawn uniformly from the
/// bounding box until it lands inside the domain) or a list of in-domain
/// start parameters, which are all accepted unconditionally.
pub fn generate_proposed<R: Real>(
    surface: &Surface<R>,
    h: &SpacingField<R>,
    seeds: &[&[R]],
    cfg: &GenerationConfig,
) -> Result<Generation<R>> {
    let d_xi = surface.param_dim();
    let d = surface.ambient_dim();
    let n = cfg.n_candidates.unwrap_or_else(|| default_candidate_count(d_xi));
    let base = base_pattern::<R>(n, d_xi)?;
    let mut rotated = base.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut index = new_index(cfg.index_kind, d, h)?;
    let mut nodes = NodeSet::new(d_xi, d);
    let mut diag = GenerationDiagnostics::default();
    let mut accept_dists_sq: Vec<R> = Vec::new();

    // Seed the front.
    let mut point = vec![R::zero(); d];
    if seeds.is_empty() {
        let mut xi = vec![R::zero(); d_xi];
        let mut found = false;
        for _ in 0..START_ATTEMPTS {
            surface.domain().sample_bbox(&mut rng, &mut xi);
            if surface.domain().contains(&xi) {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NoStartFound(START_ATTEMPTS));
        }
        surface.map_into(&xi, &mut point);
        nodes.push(&xi, &point, h.eval(&point));
        accept_dists_sq.push(R::zero());
        index.insert(&point)?;
    } else {
        for &seed in seeds {
            if seed.len() != d_xi {
                return Err(Error::DimensionMismatch { expected: d_xi, got: seed.len() });
            }
            if !surface.domain().contains(seed) {
                return Err(Error::SeedOutsideDomain);
            }
            surface.map_into(seed, &mut point);
            nodes.push(seed, &point, h.eval(&point));
            accept_dists_sq.push(R::zero());
            index.insert(&point)?;
        }
    }

    // Expand: cursor-as-queue over the growing array.
    let mut jac = surface.jacobian_buffer();
    let mut xi_cur = vec![R::zero(); d_xi];
    let mut p_cur = vec![R::zero(); d];
    let mut w = vec![R::zero(); d];
    let mut eta = vec![R::zero(); d_xi];
    let mut c = vec![R::zero(); d];
    let singular_floor = cast::<R>(1e-14);
    let mut cursor = 0usize;
    'queue: while cursor < nodes.len() {
        xi_cur.copy_from_slice(nodes.param(cursor));
        p_cur.copy_from_slice(nodes.point(cursor));
        let h_i = nodes.spacing(cursor);
        surface.jacobian_into(&xi_cur, &mut jac);
        base.rotated_into(&mut rng, &mut rotated);
        for s in rotated.iter() {
            // α scales the parametric step so its first-order ambient length
            // is h_i. Written as a comparison that is false for NaN, so
            // degenerate Jacobians (e.g. poles) fall into the skip path.
            jac.mul_vec(s, &mut w);
            let norm = dot(&w, &w).sqrt();
            if !(norm >= singular_floor) {
                diag.singular_skips += 1;
                continue;
            }
            let alpha = h_i / norm;
            if !alpha.is_finite() {
                diag.degenerate_skips += 1;
                continue;
            }
            for (e, (&x, &sk)) in eta.iter_mut().zip(xi_cur.iter().zip(s)) {
                *e = x + alpha * sk;
            }
            if !surface.domain().contains(&eta) {
                diag.out_of_domain += 1;
                continue;
            }
            surface.map_into(&eta, &mut c);
            // ĥ² via the same dist_sq the index uses: the candidate's
            // distance to its own parent is *exactly* ĥ, so any rounding
            // difference between the two expressions would veto every
            // frontier candidate.
            let hh_sq = dist_sq(&c, &p_cur);
            if !hh_sq.is_finite() || !(hh_sq > R::zero()) {
                diag.degenerate_skips += 1;
                continue;
            }
            if index.nearest_below(&c, hh_sq).is_some() {
                diag.proximity_rejects += 1;
                continue;
            }
            nodes.push(&eta, &c, h.eval(&c));
            accept_dists_sq.push(hh_sq);
            index.insert(&c)?;
            if nodes.len() >= cfg.max_nodes {
                diag.truncated = true;
                break 'queue;
            }
        }
        cursor += 1;
    }
    Ok(Generation { nodes, diagnostics: diag, accept_dists_sq })
}

/// Parametric lattice sampling: an axis-aligned lattice of spacing `h`
/// anchored at the bounding-box minimum, filtered by the domain predicate
/// and mapped through r. No proximity filtering — the reference baseline.
pub fn generate_naive<R: Real>(
    surface: &Surface<R>,
    h: R,
    cfg: &GenerationConfig,
) -> Result<Generation<R>> {
    if !(h > R::zero()) || !h.is_finite() {
        return Err(Error::InvalidSpacing(format!("lattice spacing must be positive, got {h:?}")));
    }
    let mut nodes = NodeSet::new(surface.param_dim(), surface.ambient_dim());
    let mut diag = GenerationDiagnostics::default();
    let mut point = vec![R::zero(); surface.ambient_dim()];
    let mut truncated = false;
    for_each_lattice_param(surface, h, |xi| {
        if nodes.len() >= cfg.max_nodes {
            truncated = true;
            return false;
        }
        surface.map_into(xi, &mut point);
        nodes.push(xi, &point, h);
        true
    });
    diag.truncated = truncated;
    let n = nodes.len();
    Ok(Generation { nodes, diagnostics: diag, accept_dists_sq: vec![R::zero(); n] })
}

/// Supersampling–decimation: a parametric lattice of spacing h/γ (denser
/// than naive by the supersampling factor γ) is mapped in lattice order and
/// thinned — a point is kept only when every previously kept point is at
/// least h away. γ = τ·(|∂Ω|/|Ξ|)^{1/d_Ξ} compensates the average
/// parametric-to-ambient stretch; τ is the quality/cost knob.
pub fn generate_supersampled<R: Real>(
    surface: &Surface<R>,
    h: R,
    tau: R,
    cfg: &GenerationConfig,
) -> Result<Generation<R>> {
    if !(h > R::zero()) || !h.is_finite() {
        return Err(Error::InvalidSpacing(format!("target spacing must be positive, got {h:?}")));
    }
    if !(tau > R::zero()) {
        return Err(Error::InvalidSpacing(format!(
            "supersampling parameter must be positive, got {tau:?}"
        )));
    }
    let d_xi = surface.param_dim();
    // Exact measures when the geometry carries them, Monte Carlo otherwise.
    let needs_estimate = surface.area().is_none() || surface.domain().measure().is_none();
    let (mc_measure, mc_area) = if needs_estimate {
        monte_carlo_measures(surface, MEASURE_SAMPLES, cfg.rng_seed ^ MEASURE_SEED_MIX)
    } else {
        (R::zero(), R::zero())
    };
    let area = surface.area().unwrap_or(mc_area);
    let measure = surface.domain().measure().unwrap_or(mc_measure);
    let gamma = tau * (area / measure).powf(R::one() / cast::<R>(d_xi as f64));

    let mut diag = GenerationDiagnostics {
        gamma: gamma.to_f64(),
        area_used: area.to_f64(),
        measure_used: measure.to_f64(),
        ..GenerationDiagnostics::default()
    };
    let mut nodes = NodeSet::new(d_xi, surface.ambient_dim());
    let mut index = new_index(cfg.index_kind, surface.ambient_dim(), &SpacingField::Constant(h))?;
    let h_sq = h * h;
    let mut point = vec![R::zero(); surface.ambient_dim()];
    let mut truncated = false;
    let mut insert_err: Option<Error> = None;
    for_each_lattice_param(surface, h / gamma, |xi| {
        if nodes.len() >= cfg.max_nodes {
            truncated = true;
            return false;
        }
        surface.map_into(xi, &mut point);
        if index.nearest_below(&point, h_sq).is_some() {
            diag.proximity_rejects += 1;
            return true;
        }
        if let Err(e) = index.insert(&point) {
            insert_err = Some(e);
            return false;
        }
        nodes.push(xi, &point, h);
        true
    });
    if let Some(e) = insert_err {
        return Err(e);
    }
    diag.truncated = truncated;
    let n = nodes.len();
    Ok(Generation { nodes, diagnostics: diag, accept_dists_sq: vec![h_sq; n] })
}

/// Enumerates the axis-aligned lattice of the given spacing over the
/// domain's bounding box in row-major order (last axis fastest), anchored
/// at the box minimum and including upper-edge points that land on the
/// boundary exactly. Calls `f` for every lattice parameter *inside* the
/// domain; `f` returning false stops the walk.
fn for_each_lattice_param<R: Real, F: FnMut(&[R]) -> bool>(
    surface: &Surface<R>,
    spacing: R,
    mut f: F,
) {
    let domain = surface.domain();
    let d_xi = domain.dim();
    let (lo, hi) = (domain.lo(), domain.hi());
    // Per-axis point counts: i while lo + i·spacing ≤ hi. Counting via
    // comparison (not division) keeps exact upper-edge landings included.
    let mut counts = vec![0usize; d_xi];
    for k in 0..d_xi {
        let mut i = 0usize;
        while lo[k] + cast::<R>(i as f64) * spacing <= hi[k] {
            i += 1;
        }
        counts[k] = i;
    }
    let mut idx = vec![0usize; d_xi];
    let mut xi = vec![R::zero(); d_xi];
    'walk: loop {
        for k in 0..d_xi {
            xi[k] = lo[k] + cast::<R>(idx[k] as f64) * spacing;
        }
        if domain.contains(&xi) && !f(&xi) {
            return;
        }
        // Mixed-radix increment, last axis fastest.
        for k in (0..d_xi).rev() {
            idx[k] += 1;
            if idx[k] < counts[k] {
                continue 'walk;
            }
            idx[k] = 0;
        }
        return;
    }
}

/// Builds the configured index. The grid needs a cell size derived from an
/// upper bound on the spacing field; fields without a structural bound
/// (arbitrary callables) must use the tree.
fn new_index<R: Real>(kind: IndexKind, dim: usize, h: &SpacingField<R>) -> Result<SpatialIndex<R>> {
    match kind {
        IndexKind::KdTree => Ok(SpatialIndex::kdtree(dim)),
        IndexKind::Grid => {
            let bound = h.upper_bound().ok_or_else(|| {
                Error::InvalidSpacing(
                    "grid index needs a spacing field with a known upper bound; \
                     use the k-d tree for arbitrary callable fields"
                        .into(),
                )
            })?;
            let grid = GridIndex::for_spacing(dim, bound)?;
            Ok(SpatialIndex::Grid(grid))
        }
    }
}
