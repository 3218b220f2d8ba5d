//! Cross-surface behavior of the three samplers.

use surfnodes::geometry::gallery::{gallery, GALLERY_NAMES};
use surfnodes::geometry::surface::SpacingField;
use surfnodes::nodegen::{
    generate_naive, generate_proposed, generate_supersampled, GenerationConfig,
};
use surfnodes::quality::{min_pairwise_distance, nn_stats};
use surfnodes::real::dist_sq;
use surfnodes::spatial::IndexKind;

fn constant(h: f64) -> SpacingField<f64> {
    SpacingField::constant(h).unwrap()
}

#[test]
fn grid_and_kdtree_indexes_generate_identical_sets() {
    let s = gallery::<f64>("identity_square").unwrap();
    let h = constant(0.05);
    let kd = GenerationConfig { rng_seed: 21, ..Default::default() };
    let gr = GenerationConfig { rng_seed: 21, index_kind: IndexKind::Grid, ..Default::default() };
    let a = generate_proposed(&s, &h, &[], &kd).unwrap();
    let b = generate_proposed(&s, &h, &[], &gr).unwrap();
    assert_eq!(a.nodes.len(), b.nodes.len());
    for i in 0..a.nodes.len() {
        assert_eq!(a.nodes.param(i), b.nodes.param(i));
        assert_eq!(a.nodes.point(i), b.nodes.point(i));
    }
    assert_eq!(a.diagnostics, b.diagnostics);
}

#[test]
fn csv_export_is_byte_identical_across_reruns() {
    let s = gallery::<f64>("heart").unwrap();
    let cfg = GenerationConfig { rng_seed: 4, ..Default::default() };
    let mut bufs = Vec::new();
    for _ in 0..2 {
        let gen = generate_proposed(&s, &constant(0.12), &[], &cfg).unwrap();
        let mut buf = Vec::new();
        gen.nodes.write_csv(&mut buf).unwrap();
        bufs.push(buf);
    }
    assert_eq!(bufs[0], bufs[1]);
}

#[test]
fn acceptance_radii_replay_on_a_spacing_field() {
    // Nonconstant spacing: a callable field varying with height. Every
    // accepted node must keep its recorded clearance to all earlier nodes,
    // under the exact distance expression used during generation.
    let s = gallery::<f64>("torus").unwrap();
    let field = SpacingField::Callable(std::sync::Arc::new(|p: &[f64]| {
        0.25 + 0.1 * (p[2]).abs()
    }));
    let cfg = GenerationConfig { rng_seed: 13, ..Default::default() };
    let gen = generate_proposed(&s, &field, &[], &cfg).unwrap();
    let n = gen.nodes.len();
    assert!(n > 300, "unexpectedly sparse torus set: {n}");
    for i in 0..n {
        for j in 0..i {
            assert!(
                dist_sq(gen.nodes.point(i), gen.nodes.point(j)) >= gen.accept_dists_sq[i],
                "node {i} sits inside its acceptance radius relative to node {j}"
            );
        }
    }
}

#[test]
fn supersampled_separation_holds_on_every_surface_and_seed() {
    // Decimation must enforce min pairwise distance ≥ h exactly — strict
    // comparisons on exact squared distances, no epsilon anywhere.
    let cases: &[(&str, f64)] = &[
        ("circle", 0.1),
        ("identity_square", 0.13),
        ("polar_curve", 0.05),
        ("heart", 0.12),
        ("torus", 0.3),
        ("roman", 0.06),
        ("sine_sheet", 0.5),
        ("sphere_patch", 0.12),
        ("sphere", 0.2),
    ];
    let listed: Vec<&str> = cases.iter().map(|&(n, _)| n).collect();
    assert_eq!(listed, GALLERY_NAMES, "sweep must cover the whole gallery");
    for &(name, h) in cases {
        let s = gallery::<f64>(name).unwrap();
        for seed in 0..5u64 {
            let cfg = GenerationConfig { rng_seed: seed, ..Default::default() };
            let gen = generate_supersampled(&s, h, 5.0, &cfg).unwrap();
            let n = gen.nodes.len();
            assert!(n >= 2, "{name}/seed {seed}: degenerate set of {n}");
            let min_pair = min_pairwise_distance(&gen.nodes).unwrap();
            assert!(
                min_pair >= h,
                "{name}/seed {seed}: min pairwise {min_pair} < h = {h}"
            );
        }
    }
}

#[test]
fn naive_spacing_scatters_far_more_than_the_front() {
    // On the petal curve the parametric speed varies wildly, so a uniform
    // parameter lattice gives very uneven ambient spacing while the
    // advancing front holds its target.
    let s = gallery::<f64>("polar_curve").unwrap();
    let h = 0.06;
    let na = generate_naive(&s, h, &Default::default()).unwrap();
    let cfg = GenerationConfig { rng_seed: 2, ..Default::default() };
    let pa = generate_proposed(&s, &constant(h), &[], &cfg).unwrap();
    let field = constant(h);
    let na_stats = nn_stats(&na.nodes, 2, &field).unwrap();
    let pa_stats = nn_stats(&pa.nodes, 2, &field).unwrap();
    assert!(
        na_stats.std_of_mean_norm > 3.0 * pa_stats.std_of_mean_norm,
        "expected naive spread ≫ front spread, got {} vs {}",
        na_stats.std_of_mean_norm,
        pa_stats.std_of_mean_norm
    );
}

#[test]
fn front_spacing_conforms_to_the_curvature_bound_on_the_torus() {
    // Constant h on the torus: the spacing error obeys
    // |Δh| ≤ (√2/2)·3·h², so the min pairwise distance stays above
    // h·(1 − (√2/2)·3·h).
    let s = gallery::<f64>("torus").unwrap();
    for (seed, h) in [(1u64, 0.2f64), (2, 0.1)] {
        let cfg = GenerationConfig { rng_seed: seed, ..Default::default() };
        let gen = generate_proposed(&s, &constant(h), &[], &cfg).unwrap();
        let min_pair = min_pairwise_distance(&gen.nodes).unwrap();
        let b_rel = (2.0f64.sqrt() / 2.0) * 3.0 * h;
        assert!(
            min_pair >= h * (1.0 - b_rel),
            "h={h}: min pairwise {min_pair} under lower bound {}",
            h * (1.0 - b_rel)
        );
    }
}

#[test]
fn supersampling_diagnostics_expose_gamma_and_measures() {
    let s = gallery::<f64>("heart").unwrap();
    let gen = generate_supersampled(&s, 0.1, 5.0, &Default::default()).unwrap();
    let d = &gen.diagnostics;
    // |Ξ| = 4π is exact; the area comes from Monte Carlo and must be in a
    // plausible band (heart surface area ≈ 13.6).
    assert!((d.measure_used.unwrap() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    let area = d.area_used.unwrap();
    assert!((13.0..14.2).contains(&area), "heart area estimate {area}");
    // γ = τ·√(area/measure) = 5·√(13.6/4π) ≈ 5.2.
    let gamma = d.gamma.unwrap();
    assert!((4.8..5.6).contains(&gamma), "gamma {gamma}");
    assert!(gamma > 1.0, "supersampling should be denser than naive");
}

/// Full-scale spacing statistics on the petal curve (larger run, ~10⁶
/// lattice points): mean and spread of the supersampled set against the
/// reference values 1.1403 / 0.1715 within ±10%.
#[test]
#[ignore = "full-scale run; execute with --ignored"]
fn supersampled_polar_full_scale_statistics() {
    let s = gallery::<f64>("polar_curve").unwrap();
    let h = 3e-5;
    let gen = generate_supersampled(&s, h, 5.0, &Default::default()).unwrap();
    let stats = nn_stats(&gen.nodes, 2, &constant(h)).unwrap();
    assert!(
        (stats.mean_of_mean_norm - 1.1403).abs() < 0.10 * 1.1403,
        "mean {}",
        stats.mean_of_mean_norm
    );
    assert!(
        (stats.std_of_mean_norm - 0.1715).abs() < 0.10 * 0.1715,
        "std {}",
        stats.std_of_mean_norm
    );
}
