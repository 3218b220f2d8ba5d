//! Implementations of the five subcommands.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};

use surfnodes::geometry::altitude::{AltitudeGrid, AltitudeSpacing};
use surfnodes::geometry::gallery::gallery;
use surfnodes::geometry::surface::{SpacingField, Surface};
use surfnodes::nodegen::{
    generate_naive, generate_proposed, generate_supersampled, Generation, GenerationConfig,
    NodeSet,
};
use surfnodes::quality::bounds::{bound_samples, spacing_error_bounds, BoundConfig, BoundReport};
use surfnodes::quality::{
    cover_radius, default_neighbor_count, min_pairwise_distance, nn_stats, separation_distance,
    Histogram,
};
use surfnodes::real::dist_sq;
use surfnodes::spatial::IndexKind;

use crate::manifest::{Manifest, RNG_ID};
use crate::reports::{
    AlgorithmReport, BenchPoint, BenchReport, BoundsSummary, BoundsSweepEntry, Metrics,
};
use crate::{ReplayArgs, RunArgs};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Algorithm {
    Front,
    Supersampled,
    Naive,
}

impl Algorithm {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "pa" => Ok(Algorithm::Front),
            "sd" => Ok(Algorithm::Supersampled),
            "na" => Ok(Algorithm::Naive),
            other => bail!("unknown algorithm {other:?} (expected pa, sd, or na)"),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Algorithm::Front => "pa",
            Algorithm::Supersampled => "sd",
            Algorithm::Naive => "na",
        }
    }
}

fn parse_alg_list(s: &str) -> Result<Vec<Algorithm>> {
    s.split(',').map(|a| Algorithm::parse(a.trim())).collect()
}

fn parse_index(s: &str) -> Result<IndexKind> {
    s.parse::<IndexKind>().map_err(|e| anyhow!(e))
}

fn load_surface(name: &str) -> Result<Surface<f64>> {
    gallery::<f64>(name).map_err(|e| anyhow!(e))
}

/// Builds the spacing field: an altitude-driven field when --h-grid is
/// given, otherwise a constant from the single --h value.
fn build_field(args: &RunArgs, surface: &Surface<f64>) -> Result<SpacingField<f64>> {
    if let Some(grid_path) = &args.h_grid {
        if !args.h.is_empty() {
            bail!("pass either --h or --h-grid, not both");
        }
        if surface.ambient_dim() != 3 {
            bail!("--h-grid needs a surface embedded in 3-D space");
        }
        let grid = AltitudeGrid::from_path(grid_path)
            .with_context(|| format!("loading altitude grid {}", grid_path.display()))?;
        let spacing = AltitudeSpacing::new(grid, args.h_min, args.h_max)?;
        return Ok(spacing.into_field());
    }
    match args.h.as_slice() {
        [h] => Ok(SpacingField::constant(*h)?),
        [] => bail!("either --h or --h-grid is required"),
        _ => bail!("this command takes a single --h value"),
    }
}

fn single_h(args: &RunArgs) -> Result<f64> {
    if args.h_grid.is_some() {
        bail!("--h-grid is only supported by generate");
    }
    match args.h.as_slice() {
        [h] => Ok(*h),
        _ => bail!("this command takes a single --h value"),
    }
}

fn generation_config(args: &RunArgs) -> Result<GenerationConfig> {
    Ok(GenerationConfig {
        n_candidates: args.n,
        rng_seed: args.seed,
        max_nodes: args.max_nodes,
        index_kind: parse_index(&args.index)?,
    })
}

/// Runs one sampler. The front may take an explicit start parameter; the
/// lattice-based samplers need a constant spacing and ignore --start.
fn run_algorithm(
    alg: Algorithm,
    surface: &Surface<f64>,
    field: &SpacingField<f64>,
    args: &RunArgs,
) -> Result<Generation<f64>> {
    let cfg = generation_config(args)?;
    match alg {
        Algorithm::Front => {
            let seeds: Vec<&[f64]> = match &args.start {
                Some(s) => vec![s.as_slice()],
                None => Vec::new(),
            };
            Ok(generate_proposed(surface, field, &seeds, &cfg)?)
        }
        Algorithm::Supersampled => {
            let h = field
                .as_constant()
                .ok_or_else(|| anyhow!("the sd sampler needs a constant --h"))?;
            Ok(generate_supersampled(surface, h, args.tau, &cfg)?)
        }
        Algorithm::Naive => {
            let h = field
                .as_constant()
                .ok_or_else(|| anyhow!("the na sampler needs a constant --h"))?;
            Ok(generate_naive(surface, h, &cfg)?)
        }
    }
}

/// Output-set invariants checked before a command exits 0: parameters in
/// the domain, points matching the map, and (for the supersampled set) the
/// exact minimum-separation guarantee.
fn check_invariants(
    alg: Algorithm,
    surface: &Surface<f64>,
    nodes: &NodeSet<f64>,
    field: &SpacingField<f64>,
) -> Result<()> {
    let mut p = vec![0.0; surface.ambient_dim()];
    for i in 0..nodes.len() {
        let xi = nodes.param(i);
        if !surface.domain().contains(xi) {
            bail!("invariant violation: node {i} parameter outside the domain");
        }
        surface.map_into(xi, &mut p);
        if dist_sq(&p, nodes.point(i)).sqrt() > 1e-12 {
            bail!("invariant violation: node {i} point does not match map(param)");
        }
    }
    if alg == Algorithm::Supersampled && nodes.len() >= 2 {
        let h = field.as_constant().expect("sd ran with constant spacing");
        let min_pair = min_pairwise_distance(nodes)?;
        if min_pair < h {
            bail!("invariant violation: supersampled min pairwise {min_pair} < h = {h}");
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn to_json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn generate(args: &RunArgs) -> Result<Manifest> {
    let algs = parse_alg_list(&args.alg)?;
    let [alg] = algs.as_slice() else {
        bail!("generate takes a single --alg");
    };
    let surface = load_surface(&args.surface)?;
    let field = build_field(args, &surface)?;
    fs::create_dir_all(&args.out)?;

    let started = Instant::now();
    let gen = run_algorithm(*alg, &surface, &field, args)?;
    let wall = started.elapsed().as_secs_f64();
    check_invariants(*alg, &surface, &gen.nodes, &field)?;

    let mut csv = Vec::new();
    gen.nodes.write_csv(&mut csv).map_err(|e| anyhow!(e))?;
    write_file(&args.out, "nodes.csv", &csv)?;

    let mut man = Manifest::new("generate", args, vec![alg.as_str().to_string()]);
    man.outputs = vec!["nodes.csv".into()];
    man.node_count = Some(gen.nodes.len() as u64);
    man.truncated = Some(gen.diagnostics.truncated);
    man.gamma = gen.diagnostics.gamma;
    man.wall_time_s = wall;
    man.save(&args.out)?;
    if let Some(g) = gen.diagnostics.gamma {
        if g <= 1.0 {
            eprintln!("warning: supersampling factor gamma = {g:.4} <= 1; the lattice is no denser than naive sampling");
        }
    }
    println!("{} nodes -> {}", gen.nodes.len(), args.out.join("nodes.csv").display());
    Ok(man)
}

/// Bound evaluation shared by compare and bounds: evaluates the three
/// bounds at `samples` (ξ, s) draws, retrying the per-pair scan at 4×
/// resolution if the measured error ever exceeds it.
fn evaluate_bounds(
    surface: &Surface<f64>,
    field: &SpacingField<f64>,
    sample_count: usize,
    seed: u64,
) -> Result<(BoundReport, usize)> {
    let samples = bound_samples(surface, sample_count, seed ^ 0x51AB_11ED);
    let cfg = BoundConfig { rng_seed: seed, ..BoundConfig::default() };
    let mut rep = spacing_error_bounds(surface, field, &samples, &cfg)?;
    if !rep.measured_within_per_pair {
        let fine = BoundConfig { scan_points: 256, rng_seed: seed, ..BoundConfig::default() };
        rep = spacing_error_bounds(surface, field, &samples, &fine)?;
    }
    Ok((rep, samples.len()))
}

fn fold_max(xs: &[f64]) -> f64 {
    xs.iter().cloned().fold(0.0, f64::max)
}

fn bounds_summary(rep: &BoundReport, samples: usize, h: f64, min_pairwise: f64) -> BoundsSummary {
    BoundsSummary {
        global: rep.global,
        per_pair_max: fold_max(&rep.per_pair),
        per_point_max: fold_max(&rep.per_point),
        measured_max: fold_max(&rep.measured),
        hessian_max: rep.hessian_max_used,
        jacobian_min: rep.jacobian_min_used,
        h_max: rep.h_max_used,
        sample_count: samples,
        skipped_samples: rep.skipped_samples,
        ordering_ok: rep.ordering_ok,
        measured_within_per_pair: rep.measured_within_per_pair,
        conforms: min_pairwise >= h - rep.global,
    }
}

pub fn compare(args: &RunArgs) -> Result<Manifest> {
    let algs = parse_alg_list(&args.alg)?;
    if algs.len() < 2 {
        bail!("compare needs at least two comma-separated algorithms in --alg");
    }
    let surface = load_surface(&args.surface)?;
    let h = single_h(args)?;
    let field = SpacingField::constant(h)?;
    if !(args.refinement > 0.0 && args.refinement < 1.0) {
        bail!("--refinement must lie in (0, 1)");
    }
    fs::create_dir_all(&args.out)?;

    let started = Instant::now();

    // One shared probe set for hole-radius estimation keeps the covering
    // radii of the samplers directly comparable.
    let probe_cfg = GenerationConfig {
        n_candidates: args.n,
        rng_seed: args.seed ^ 0x9E37_79B9,
        max_nodes: args.max_nodes,
        index_kind: parse_index(&args.index)?,
    };
    let probes =
        generate_proposed(&surface, &field.scaled(args.refinement), &[], &probe_cfg)?;

    // Bound evaluation depends only on (surface, h); shared across samplers.
    let shared_bounds = if surface.has_hessians() {
        Some(evaluate_bounds(&surface, &field, 256, args.seed)?)
    } else {
        None
    };

    let c = default_neighbor_count(surface.param_dim());
    let mut reports = Vec::new();
    let mut outputs = vec!["compare.json".to_string()];
    for alg in &algs {
        let gen = run_algorithm(*alg, &surface, &field, args)?;
        check_invariants(*alg, &surface, &gen.nodes, &field)?;
        let stats = nn_stats(&gen.nodes, c, &field).map_err(|e| anyhow!(e))?;
        let r_min = separation_distance(&gen.nodes)?;
        let r_max = cover_radius(&gen.nodes, &probes.nodes)?;
        let min_pair = 2.0 * r_min;
        let bounds = shared_bounds
            .as_ref()
            .map(|(rep, n)| bounds_summary(rep, *n, h, min_pair));

        let name = alg.as_str();
        let hist_name = format!("hist_{name}.csv");
        let series_name = format!("series_{name}.csv");
        let lo = stats.mean_d_norm.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi_raw = fold_max(&stats.mean_d_norm);
        let hi = if hi_raw > lo { hi_raw } else { lo + 1e-9 };
        let hist = Histogram::new(&stats.mean_d_norm, 32, lo, hi);
        let mut buf = Vec::new();
        hist.write_csv(&mut buf).map_err(|e| anyhow!(e))?;
        write_file(&args.out, &hist_name, &buf)?;

        let mut series = Vec::new();
        writeln!(series, "node,dbar_norm")?;
        for (i, v) in stats.mean_d_norm.iter().enumerate() {
            writeln!(series, "{i},{v:.16e}")?;
        }
        write_file(&args.out, &series_name, &series)?;
        outputs.push(hist_name);
        outputs.push(series_name);

        reports.push(AlgorithmReport {
            algorithm: name.to_string(),
            surface: args.surface.clone(),
            h,
            n: match alg {
                Algorithm::Front => {
                    Some(args.n.unwrap_or_else(|| {
                        surfnodes::directions::default_candidate_count(surface.param_dim())
                    }))
                }
                _ => None,
            },
            tau: matches!(alg, Algorithm::Supersampled).then_some(args.tau),
            seed: args.seed,
            rng_id: RNG_ID.to_string(),
            metrics: Metrics {
                node_count: gen.nodes.len() as u64,
                c,
                mean_d_norm: stats.mean_of_mean_norm,
                std_d_norm: stats.std_of_mean_norm,
                mean_gap_norm: stats.mean_gap_norm,
                r_min,
                r_max_estimate: r_max,
                r_min_over_h: r_min / h,
                r_max_over_h: r_max / h,
                min_pairwise: min_pair,
            },
            bounds,
        });
    }
    let wall = started.elapsed().as_secs_f64();

    write_file(&args.out, "compare.json", &to_json_bytes(&reports)?)?;
    let mut man =
        Manifest::new("compare", args, algs.iter().map(|a| a.as_str().to_string()).collect());
    man.outputs = outputs;
    man.wall_time_s = wall;
    man.save(&args.out)?;
    for r in &reports {
        println!(
            "{}: N={} mean={:.4} std={:.4}",
            r.algorithm, r.metrics.node_count, r.metrics.mean_d_norm, r.metrics.std_d_norm
        );
    }
    Ok(man)
}

pub fn bench(args: &RunArgs) -> Result<Manifest> {
    let algs = parse_alg_list(&args.alg)?;
    let [alg] = algs.as_slice() else {
        bail!("bench takes a single --alg");
    };
    if args.h_grid.is_some() {
        bail!("--h-grid is only supported by generate");
    }
    if args.h.is_empty() {
        bail!("bench needs an --h sweep (comma-separated list)");
    }
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let surface = load_surface(&args.surface)?;
    fs::create_dir_all(&args.out)?;

    let started = Instant::now();
    let mut points = Vec::new();
    for &h in &args.h {
        let field = SpacingField::constant(h)?;
        let mut times = Vec::with_capacity(args.reps);
        let mut count = 0u64;
        for _ in 0..args.reps {
            let t = Instant::now();
            let gen = run_algorithm(*alg, &surface, &field, args)?;
            times.push(t.elapsed().as_secs_f64());
            count = gen.nodes.len() as u64;
        }
        let mut sorted = times.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        points.push(BenchPoint { h, node_count: count, median_s: median, times_s: times });
    }
    let wall = started.elapsed().as_secs_f64();

    let (slope, decades) = fit_slope(&points);
    let reliable = points.len() >= 2 && decades >= 1.0;
    let report = BenchReport {
        algorithm: alg.as_str().to_string(),
        surface: args.surface.clone(),
        seed: args.seed,
        rng_id: RNG_ID.to_string(),
        reps: args.reps,
        points,
        slope,
        decades,
        slope_reliable: reliable,
    };
    write_file(&args.out, "bench.json", &to_json_bytes(&report)?)?;

    // bench.csv holds only the deterministic columns; timings stay in the
    // JSON so replays can still byte-compare the CSV.
    let mut csv = Vec::new();
    writeln!(csv, "h,node_count")?;
    for p in &report.points {
        writeln!(csv, "{:.16e},{}", p.h, p.node_count)?;
    }
    write_file(&args.out, "bench.csv", &csv)?;

    let mut man = Manifest::new("bench", args, vec![alg.as_str().to_string()]);
    man.outputs = vec!["bench.csv".into()];
    man.volatile_outputs = vec!["bench.json".into()];
    man.wall_time_s = wall;
    man.save(&args.out)?;
    match report.slope {
        Some(s) if report.slope_reliable => println!("slope {s:.3} over {decades:.2} decades"),
        Some(s) => println!("slope {s:.3} over {decades:.2} decades (UNRELIABLE: < 1 decade)"),
        None => println!("single point; no slope"),
    }
    Ok(man)
}

/// Least-squares slope of ln(median time) against ln(node count), plus the
/// decades of N spanned.
fn fit_slope(points: &[BenchPoint]) -> (Option<f64>, f64) {
    if points.len() < 2 {
        return (None, 0.0);
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.node_count.max(1) as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.median_s.max(1e-12).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let decades = (hi - lo) / std::f64::consts::LN_10;
    if sxx == 0.0 {
        return (None, decades);
    }
    (Some(sxy / sxx), decades)
}

pub fn bounds(args: &RunArgs) -> Result<Manifest> {
    let algs = parse_alg_list(&args.alg)?;
    let [alg] = algs.as_slice() else {
        bail!("bounds takes a single --alg");
    };
    if args.h_grid.is_some() {
        bail!("--h-grid is only supported by generate");
    }
    if args.h.is_empty() {
        bail!("bounds needs an --h value or sweep");
    }
    let surface = load_surface(&args.surface)?;
    if !surface.has_hessians() {
        bail!("surface {:?} carries no analytic Hessians; bounds are unavailable", args.surface);
    }
    fs::create_dir_all(&args.out)?;

    let started = Instant::now();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    writeln!(rows, "h,r_min_over_h,bound_over_h")?;
    for &h in &args.h {
        let field = SpacingField::constant(h)?;
        let gen = run_algorithm(*alg, &surface, &field, args)?;
        check_invariants(*alg, &surface, &gen.nodes, &field)?;
        let min_pair = min_pairwise_distance(&gen.nodes)?;
        let (rep, n_samples) = evaluate_bounds(&surface, &field, 256, args.seed)?;
        let summary = bounds_summary(&rep, n_samples, h, min_pair);
        writeln!(rows, "{:.16e},{:.16e},{:.16e}", h, min_pair / h, (h - rep.global) / h)?;
        entries.push(BoundsSweepEntry {
            h,
            node_count: gen.nodes.len() as u64,
            min_pairwise: min_pair,
            bounds: summary,
        });
    }
    let wall = started.elapsed().as_secs_f64();

    write_file(&args.out, "bounds.json", &to_json_bytes(&entries)?)?;
    write_file(&args.out, "conformance.csv", &rows)?;

    let violations: Vec<String> = entries
        .iter()
        .flat_map(|e| {
            let mut v = Vec::new();
            if !e.bounds.ordering_ok {
                v.push(format!("h={}: bound ordering violated", e.h));
            }
            if !e.bounds.measured_within_per_pair {
                v.push(format!("h={}: measured error above per-pair bound", e.h));
            }
            if !e.bounds.conforms {
                v.push(format!("h={}: min pairwise below h − |Δh|", e.h));
            }
            v
        })
        .collect();

    let mut man = Manifest::new("bounds", args, vec![alg.as_str().to_string()]);
    man.outputs = vec!["bounds.json".into(), "conformance.csv".into()];
    man.wall_time_s = wall;
    man.save(&args.out)?;
    for e in &entries {
        println!(
            "h={}: min pairwise {:.6}, lower bound {:.6}, conforms={}",
            e.h,
            e.min_pairwise,
            e.h - e.bounds.global,
            e.bounds.conforms
        );
    }
    if !violations.is_empty() {
        bail!("invariant violations:\n  {}", violations.join("\n  "));
    }
    Ok(man)
}

pub fn replay(args: &ReplayArgs) -> Result<()> {
    let manifest_path = args.manifest.canonicalize().with_context(|| {
        format!("resolving manifest path {}", args.manifest.display())
    })?;
    let man = Manifest::load(&manifest_path)?;
    let original_dir = manifest_path.parent().expect("manifest has a parent directory");

    let tmp;
    let replay_dir = match &args.out {
        Some(dir) => dir.clone(),
        None => {
            tmp = tempfile::tempdir().context("creating temporary replay directory")?;
            tmp.path().to_path_buf()
        }
    };
    let run_args = man.to_args(original_dir, replay_dir.clone());
    match man.command.as_str() {
        "generate" => {
            generate(&run_args)?;
        }
        "compare" => {
            compare(&run_args)?;
        }
        "bench" => {
            bench(&run_args)?;
        }
        "bounds" => {
            bounds(&run_args)?;
        }
        other => bail!("manifest names unknown command {other:?}"),
    }

    let mut mismatches = Vec::new();
    for name in &man.outputs {
        let original = fs::read(original_dir.join(name))
            .with_context(|| format!("reading original output {name}"))?;
        let replayed = fs::read(replay_dir.join(name))
            .with_context(|| format!("reading replayed output {name}"))?;
        if original == replayed {
            println!("match    {name}");
        } else {
            println!("MISMATCH {name}");
            mismatches.push(name.clone());
        }
    }
    if !mismatches.is_empty() {
        bail!("replay diverged on: {}", mismatches.join(", "));
    }
    println!("replay reproduced {} output file(s) byte for byte", man.outputs.len());
    Ok(())
}
