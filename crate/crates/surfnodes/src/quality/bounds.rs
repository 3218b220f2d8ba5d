//! Curvature-based bounds on the spacing error of first-order candidate
//! steps.
//!
//! A step of α = h/‖∇r(ξ)s‖ from ξ along a unit direction s lands at
//! ambient distance ĥ = ‖r(ξ+αs) − r(ξ)‖, which differs from the target h
//! by a second-order remainder. Three nested estimates of |Δh| = |h − ĥ|
//! are evaluated, from sharpest to coarsest:
//!
//! * **per-pair** (ξ, s): (√d_Ξ/2)·h²·max_i max_{θ∈[0,α]} |sᵀ(∇∇r_i)(ξ+θs)s| / ‖∇r(ξ)s‖²
//! * **per-point** (ξ):   (√d_Ξ/2)·h²·max_i max_{ζ∈B̄(ξ,ρ_ξ)} σ₁(∇∇r_i(ζ)) / σ_{d_Ξ}(∇r(ξ))²,  ρ_ξ = h/σ_{d_Ξ}(∇r(ξ))
//! * **global**:          (√d_Ξ/2)·h_M²·σ_{1,M}(∇∇r) / σ_{d_Ξ,m}(∇r)²
//!
//! The inner maxima are estimated numerically (dense 1-D scan along the
//! step; Monte Carlo over the parameter ball and the domain). Every
//! evaluation point feeding an inner bound is *pooled* into the outer
//! bounds' maxima as well, so the nesting per-pair ≤ per-point ≤ global
//! holds deterministically, not merely up to sampling luck. Known analytic
//! extremes carried by the surface are merged into the global pool.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::surface::{SpacingField, Surface};
use crate::linalg::min_singular_value;
use crate::nodegen::NodeSet;
use crate::quality::min_pairwise_distance;
use crate::real::{cast, dot, Real};

/// Rank-deficiency threshold: a sample whose Jacobian direction norm or
/// smallest singular value falls below this is skipped and flagged.
const RANK_FLOOR: f64 = 1e-14;

/// Sample-count knobs for the numerical maxima.
#[derive(Clone, Debug)]
pub struct BoundConfig {
    /// Points of the 1-D scan along each step segment (per-pair bound).
    pub scan_points: usize,
    /// Monte Carlo draws in each parameter ball (per-point bound).
    pub ball_samples: usize,
    /// Monte Carlo draws over the whole domain (global bound).
    pub global_samples: usize,
    /// Seed for all Monte Carlo draws.
    pub rng_seed: u64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig { scan_points: 64, ball_samples: 256, global_samples: 10_000, rng_seed: 0 }
    }
}

/// Evaluated bounds for a list of (ξ, s) samples, plus the measured error.
#[derive(Clone, Debug)]
pub struct BoundReport {
    /// Per-pair bound at each sample (0 where skipped).
    pub per_pair: Vec<f64>,
    /// Per-point bound at each sample (0 where skipped).
    pub per_point: Vec<f64>,
    /// Measured |h − ĥ| at each sample (0 where skipped).
    pub measured: Vec<f64>,
    /// True where the sample was skipped for rank deficiency.
    pub skipped: Vec<bool>,
    /// Global bound over the whole surface.
    pub global: f64,
    /// Largest Hessian spectral norm in the global pool (σ_{1,M}).
    pub hessian_max_used: f64,
    /// Smallest Jacobian singular value in the global pool (σ_{d_Ξ,m}).
    pub jacobian_min_used: f64,
    /// Largest target spacing in the global pool (h_M).
    pub h_max_used: f64,
    /// Number of skipped samples.
    pub skipped_samples: usize,
    /// per-pair ≤ per-point ≤ global at every retained sample.
    pub ordering_ok: bool,
    /// measured ≤ per-pair at every retained sample.
    pub measured_within_per_pair: bool,
}

/// Draws (ξ, s) evaluation samples: ξ uniform over the domain (rejection
/// from the bounding box), s uniform over unit directions.
pub fn bound_samples<R: Real>(
    surface: &Surface<R>,
    count: usize,
    seed: u64,
) -> Vec<(Vec<R>, Vec<R>)> {
    let d_xi = surface.param_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut xi = vec![R::zero(); d_xi];
    while out.len() < count {
        surface.domain().sample_bbox(&mut rng, &mut xi);
        if !surface.domain().contains(&xi) {
            continue;
        }
        out.push((xi.clone(), unit_direction(d_xi, &mut rng)));
    }
    out
}

fn unit_direction<R: Real, G: Rng>(dim: usize, rng: &mut G) -> Vec<R> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| cast::<R>(x / norm)).collect();
        }
    }
}

/// Uniform draw from the closed ball of radius `rho` around `center`.
fn ball_sample<R: Real, G: Rng>(center: &[R], rho: R, rng: &mut G, out: &mut [R]) {
    let dim = center.len();
    let dir = unit_direction::<R, G>(dim, rng);
    let u: f64 = rng.gen();
    let radius = rho * cast::<R>(u.powf(1.0 / dim as f64));
    for k in 0..dim {
        out[k] = center[k] + radius * dir[k];
    }
}

/// Max over ambient components of the Hessian spectral norm at ξ.
fn hessian_spectral_max<R: Real>(surface: &Surface<R>, xi: &[R], hess: &mut [crate::linalg::Mat<R>]) -> Result<f64> {
    surface.hessians_into(xi, hess)?;
    let mut worst = 0.0f64;
    for h in hess.iter() {
        worst = worst.max(h.sym_spectral_norm().to_f64().unwrap());
    }
    Ok(worst)
}

/// Evaluates the three spacing-error bounds and the measured error at the
/// given (ξ, s) samples. Needs analytic Hessians on the surface.
pub fn spacing_error_bounds<R: Real>(
    surface: &Surface<R>,
    h: &SpacingField<R>,
    samples: &[(Vec<R>, Vec<R>)],
    cfg: &BoundConfig,
) -> Result<BoundReport> {
    if !surface.has_hessians() {
        return Err(Error::MissingHessians(surface.name().to_string()));
    }
    let d_xi = surface.param_dim();
    let d = surface.ambient_dim();
    let prefactor = (d_xi as f64).sqrt() / 2.0;
    let scan_points = cfg.scan_points.max(2);

    let mut jac = surface.jacobian_buffer();
    let mut hess = surface.hessian_buffers();
    let mut w = vec![R::zero(); d];
    let mut p = vec![R::zero(); d];
    let mut q = vec![R::zero(); d];
    let mut zeta = vec![R::zero(); d_xi];

    // Global pools, fed by every evaluation made anywhere below and merged
    // with analytic extremes at the end.
    let mut pool_hess_max = 0.0f64;
    let mut pool_jac_min = f64::INFINITY;
    let mut pool_h_max = 0.0f64;

    let mut report = BoundReport {
        per_pair: Vec::with_capacity(samples.len()),
        per_point: Vec::with_capacity(samples.len()),
        measured: Vec::with_capacity(samples.len()),
        skipped: Vec::with_capacity(samples.len()),
        global: 0.0,
        hessian_max_used: 0.0,
        jacobian_min_used: 0.0,
        h_max_used: 0.0,
        skipped_samples: 0,
        ordering_ok: true,
        measured_within_per_pair: true,
    };

    for (row, (xi, s)) in samples.iter().enumerate() {
        if xi.len() != d_xi || s.len() != d_xi {
            return Err(Error::DimensionMismatch { expected: d_xi, got: xi.len().min(s.len()) });
        }
        surface.jacobian_into(xi, &mut jac);
        jac.mul_vec(s, &mut w);
        let dir_norm = dot(&w, &w).sqrt().to_f64().unwrap();
        let sigma_min = min_singular_value(&jac).to_f64().unwrap();
        if !(dir_norm >= RANK_FLOOR) || !(sigma_min >= RANK_FLOOR) {
            report.per_pair.push(0.0);
            report.per_point.push(0.0);
            report.measured.push(0.0);
            report.skipped.push(true);
            report.skipped_samples += 1;
            continue;
        }
        surface.map_into(xi, &mut p);
        let h_xi = h.eval(&p).to_f64().unwrap();
        pool_h_max = pool_h_max.max(h_xi);
        let alpha = cast::<R>(h_xi / dir_norm);

        // Per-pair: dense scan of |sᵀ H_i s| along the step segment. Each
        // scan point's spectral norm also feeds the per-point and global
        // pools, which keeps the bound nesting exact.
        let mut seg_quad_max = 0.0f64;
        let mut seg_spec_max = 0.0f64;
        for j in 0..scan_points {
            let t = cast::<R>(j as f64 / (scan_points - 1) as f64) * alpha;
            for k in 0..d_xi {
                zeta[k] = xi[k] + t * s[k];
            }
            surface.hessians_into(&zeta, &mut hess)?;
            for hm in hess.iter() {
                seg_quad_max = seg_quad_max.max(hm.quadratic_form(s).abs().to_f64().unwrap());
                seg_spec_max = seg_spec_max.max(hm.sym_spectral_norm().to_f64().unwrap());
            }
        }
        let per_pair = prefactor * h_xi * h_xi * seg_quad_max / (dir_norm * dir_norm);

        // Per-point: Monte Carlo over the parameter ball of radius
        // ρ_ξ = h/σ_min, pooled with the scan evaluations above. The
        // denominator takes the smaller of σ_min and the sampled direction
        // norm so rounding can never order it above the per-pair one.
        let mut ball_spec_max = seg_spec_max;
        let rho = cast::<R>(h_xi / sigma_min);
        let mut ball_rng =
            ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ (row as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for _ in 0..cfg.ball_samples {
            ball_sample(xi, rho, &mut ball_rng, &mut zeta);
            ball_spec_max = ball_spec_max.max(hessian_spectral_max(surface, &zeta, &mut hess)?);
        }
        let sigma_eff = sigma_min.min(dir_norm);
        let per_point = prefactor * h_xi * h_xi * ball_spec_max / (sigma_eff * sigma_eff);
        pool_hess_max = pool_hess_max.max(ball_spec_max);
        pool_jac_min = pool_jac_min.min(sigma_eff);

        // Measured error of the actual step.
        for k in 0..d_xi {
            zeta[k] = xi[k] + alpha * s[k];
        }
        surface.map_into(&zeta, &mut q);
        let h_hat = crate::real::dist_sq(&q, &p).sqrt().to_f64().unwrap();
        let measured = (h_xi - h_hat).abs();

        if measured > per_pair {
            report.measured_within_per_pair = false;
        }
        if per_pair > per_point {
            report.ordering_ok = false;
        }
        report.per_pair.push(per_pair);
        report.per_point.push(per_point);
        report.measured.push(measured);
        report.skipped.push(false);
    }

    // Global pool: domain-wide Monte Carlo on top of everything pooled so
    // far, then analytic extremes when the surface carries them.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ 0xC0FF_EE00_D15E_A5E5);
    let mut accepted = 0usize;
    let mut attempts = 0usize;
    let max_attempts = cfg.global_samples.saturating_mul(1000).max(1_000_000);
    while accepted < cfg.global_samples && attempts < max_attempts {
        attempts += 1;
        surface.domain().sample_bbox(&mut rng, &mut zeta);
        if !surface.domain().contains(&zeta) {
            continue;
        }
        accepted += 1;
        pool_hess_max = pool_hess_max.max(hessian_spectral_max(surface, &zeta, &mut hess)?);
        surface.jacobian_into(&zeta, &mut jac);
        let smin = min_singular_value(&jac).to_f64().unwrap();
        if smin < pool_jac_min {
            pool_jac_min = smin;
        }
        surface.map_into(&zeta, &mut p);
        pool_h_max = pool_h_max.max(h.eval(&p).to_f64().unwrap());
    }
    if let Some(ext) = surface.extremes() {
        pool_hess_max = pool_hess_max.max(ext.hessian_spectral_max.to_f64().unwrap());
        pool_jac_min = pool_jac_min.min(ext.jacobian_min_singular.to_f64().unwrap());
    }
    if let Some(ub) = h.upper_bound() {
        pool_h_max = pool_h_max.max(ub.to_f64().unwrap());
    }

    report.hessian_max_used = pool_hess_max;
    report.jacobian_min_used = pool_jac_min;
    report.h_max_used = pool_h_max;
    report.global = if pool_hess_max == 0.0 {
        0.0
    } else {
        prefactor * pool_h_max * pool_h_max * pool_hess_max / (pool_jac_min * pool_jac_min)
    };
    for i in 0..report.per_point.len() {
        if !report.skipped[i] && report.per_point[i] > report.global {
            report.ordering_ok = false;
        }
    }
    Ok(report)
}

/// One point of a spacing-conformance sweep: whether a generated set's
/// minimum pairwise distance stays above h − |Δh|, with |Δh| taken from the
/// global bound.
#[derive(Clone, Debug)]
pub struct Conformance {
    /// Target spacing of the node set.
    pub h: f64,
    /// Minimum pairwise distance of the set.
    pub min_pairwise: f64,
    /// Global bound on the spacing error |Δh|.
    pub delta_h_global: f64,
    /// min_pairwise ≥ h − delta_h_global.
    pub conforms: bool,
}

impl Conformance {
    /// Normalized row for plotting: (h, min-pairwise/h, (h − |Δh|)/h).
    pub fn csv_row(&self) -> (f64, f64, f64) {
        (self.h, self.min_pairwise / self.h, (self.h - self.delta_h_global) / self.h)
    }
}

/// Checks the spacing lower bound for a generated node set at constant
/// target spacing `h`.
pub fn bound_conformance<R: Real>(
    surface: &Surface<R>,
    h: R,
    nodes: &NodeSet<R>,
    cfg: &BoundConfig,
) -> Result<Conformance> {
    let field = SpacingField::constant(h)?;
    let report = spacing_error_bounds(surface, &field, &[], cfg)?;
    let min_pair = min_pairwise_distance(nodes)?.to_f64().unwrap();
    let h = h.to_f64().unwrap();
    Ok(Conformance {
        h,
        min_pairwise: min_pair,
        delta_h_global: report.global,
        conforms: min_pair >= h - report.global,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gallery;
    use crate::nodegen::{generate_proposed, GenerationConfig};

    fn small_cfg(seed: u64) -> BoundConfig {
        BoundConfig { global_samples: 2000, rng_seed: seed, ..BoundConfig::default() }
    }

    #[test]
    fn flat_geometry_has_zero_bounds_and_zero_error() {
        let s = gallery::identity_square::<f64>();
        let h = SpacingField::constant(0.25).unwrap();
        // Axis-aligned step from the origin: exactly representable, so even
        // the measured error is exactly zero.
        let samples = vec![(vec![0.0, 0.0], vec![1.0, 0.0])];
        let rep = spacing_error_bounds(&s, &h, &samples, &small_cfg(1)).unwrap();
        assert_eq!(rep.per_pair, vec![0.0]);
        assert_eq!(rep.per_point, vec![0.0]);
        assert_eq!(rep.global, 0.0);
        assert_eq!(rep.measured, vec![0.0]);
        assert!(rep.ordering_ok && rep.measured_within_per_pair);
    }

    #[test]
    fn torus_global_curvature_ratio_is_three() {
        // The torus carries analytic extremes: Hessian spectral max 3 at the
        // outer equator, Jacobian minimum singular value 1. The global bound
        // is then (√2/2)·3·h² exactly.
        let s = gallery::torus::<f64>();
        let h = 0.1;
        let field = SpacingField::constant(h).unwrap();
        let rep = spacing_error_bounds(&s, &field, &[], &small_cfg(2)).unwrap();
        // The sampled pools may round a hair past the analytic extremes;
        // agreement to 1e-12 is "equal" for a Monte-Carlo-backed maximum.
        assert!((rep.hessian_max_used - 3.0).abs() < 1e-12);
        assert!((rep.jacobian_min_used - 1.0).abs() < 1e-12);
        let expected = (2.0f64.sqrt() / 2.0) * 3.0 * h * h;
        assert!((rep.global - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn circle_chord_error_sits_far_below_the_bound() {
        let s = gallery::circle::<f64>();
        let h = 0.1;
        let field = SpacingField::constant(h).unwrap();
        let samples = bound_samples(&s, 32, 11);
        let rep = spacing_error_bounds(&s, &field, &samples, &small_cfg(3)).unwrap();
        // Unit-speed parametrization: ĥ is the chord 2 sin(h/2) at every
        // sample, so the measured error is |h − 2 sin(h/2)| ≈ 4.2e-5.
        let chord_err = (h - 2.0 * (h / 2.0).sin()).abs();
        for (i, &m) in rep.measured.iter().enumerate() {
            assert!(!rep.skipped[i]);
            assert!((m - chord_err).abs() < 1e-12);
        }
        // Global bound (1/2)·h²·1 = 5e-3 dominates it.
        assert!((rep.global - 5e-3).abs() < 1e-15);
        assert!(rep.measured.iter().all(|&m| m < rep.global));
    }

    #[test]
    fn bound_nesting_is_exact_on_curved_geometry() {
        for name in ["torus", "sine_sheet", "circle"] {
            let s = gallery::gallery::<f64>(name).unwrap();
            let h = SpacingField::constant(0.2).unwrap();
            let samples = bound_samples(&s, 40, 5);
            let rep = spacing_error_bounds(&s, &h, &samples, &small_cfg(5)).unwrap();
            assert!(rep.ordering_ok, "{name}: bound nesting violated");
            assert!(rep.measured_within_per_pair, "{name}: measured exceeded per-pair");
            assert_eq!(rep.skipped_samples, 0);
        }
    }

    #[test]
    fn missing_hessians_are_reported() {
        let s = gallery::heart::<f64>();
        let h = SpacingField::constant(0.1).unwrap();
        assert!(matches!(
            spacing_error_bounds(&s, &h, &[], &small_cfg(0)),
            Err(Error::MissingHessians(_))
        ));
    }

    #[test]
    fn rank_deficient_samples_are_skipped_not_fatal() {
        // The hemisphere patch Jacobian vanishes on its lower edge.
        let s = gallery::sphere_patch::<f64>();
        let with_hess = s; // patch carries no Hessians; use the full sphere
        let _ = with_hess;
        let sph = gallery::sphere::<f64>();
        let h = SpacingField::constant(0.1).unwrap();
        let pole = (vec![0.0, std::f64::consts::FRAC_PI_2], vec![1.0, 0.0]);
        let good = (vec![0.3, 0.1], vec![0.6, 0.8]);
        let rep = spacing_error_bounds(&sph, &h, &[pole, good], &small_cfg(6)).unwrap();
        assert_eq!(rep.skipped, vec![true, false]);
        assert_eq!(rep.skipped_samples, 1);
    }

    #[test]
    fn torus_conformance_at_moderate_spacing() {
        let s = gallery::torus::<f64>();
        let h = 0.2;
        let cfg = GenerationConfig { rng_seed: 9, ..Default::default() };
        let gen =
            generate_proposed(&s, &SpacingField::constant(h).unwrap(), &[], &cfg).unwrap();
        let conf = bound_conformance(&s, h, &gen.nodes, &small_cfg(9)).unwrap();
        assert!(conf.conforms, "min pairwise {} under bound", conf.min_pairwise);
        let (hh, ratio, bound) = conf.csv_row();
        assert_eq!(hh, h);
        assert!(ratio >= bound);
    }

    #[test]
    fn flat_lattice_conforms_exactly() {
        let s = gallery::identity_square::<f64>();
        let h = 0.25;
        let gen = crate::nodegen::generate_naive(&s, h, &Default::default()).unwrap();
        let conf = bound_conformance(&s, h, &gen.nodes, &small_cfg(4)).unwrap();
        assert_eq!(conf.delta_h_global, 0.0);
        assert!(conf.min_pairwise >= h);
        assert!(conf.conforms);
    }
}
